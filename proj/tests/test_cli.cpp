#include "interpkit/cli.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

namespace fs = std::filesystem;

// Splits a command line the way a POSIX shell does for plain words and quotes.
auto split_command(const std::string& line) -> std::vector<std::string> {
  std::vector<std::string> out;
  std::string cur;
  bool in_word = false;
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quote) {
      if (c == quote) {
        quote = 0;
      } else if (quote == '"' && c == '\\' && i + 1 < line.size()) {
        cur += line[++i];
      } else {
        cur += c;
      }
    } else if (c == '"' || c == '\'') {
      quote = c;
      in_word = true;
    } else if (c == ' ' || c == '\t') {
      if (in_word) out.push_back(cur);
      cur.clear();
      in_word = false;
    } else {
      cur += c;
      in_word = true;
    }
  }
  if (in_word) out.push_back(cur);
  return out;
}

auto replace_all(std::string s, const std::string& from, const std::string& to) -> std::string {
  for (std::size_t p = s.find(from); p != std::string::npos; p = s.find(from, p + to.size())) s.replace(p, from.size(), to);
  return s;
}

struct Transcript {
  std::string command;
  std::string expected;
};

auto read_transcripts(const fs::path& file) -> std::vector<Transcript> {
  std::ifstream in(file);
  std::vector<Transcript> ts;
  std::string line;
  const std::string prompt = "$ interpkit ";
  while (std::getline(in, line)) {
    if (line.rfind(prompt, 0) == 0)
      ts.push_back({line.substr(prompt.size()), ""});
    else if (!ts.empty())
      ts.back().expected += line + "\n";
  }
  return ts;
}

auto replay(const std::string& command) -> std::string {
  auto args = split_command(replace_all(command, "{dir}", GOLDEN_DIR));
  std::ostringstream out, err;
  int rc = ik::cli::run(args, out, err);
  std::string text = out.str();
  std::string e = err.str();
  if (!e.empty()) text += "! " + e.substr(0, e.find('\n')) + "\n";
  return text + "[exit " + std::to_string(rc) + "]\n";
}

}  // namespace

TEST_CASE("command splitting") {
  CHECK(split_command("fg mul --rank 2 \"1,2\" '-2,3'") ==
        std::vector<std::string>{"fg", "mul", "--rank", "2", "1,2", "-2,3"});
  CHECK(split_command("eval \"(= 0 0)\"  x") == std::vector<std::string>{"eval", "(= 0 0)", "x"});
  CHECK(split_command("a \"\" b") == std::vector<std::string>{"a", "", "b"});
}

TEST_CASE("golden transcripts reproduce exactly") {
  std::size_t files = 0, commands = 0;
  for (const auto& entry : fs::directory_iterator(GOLDEN_DIR)) {
    if (entry.path().extension() != ".txt") continue;
    ++files;
    for (const auto& t : read_transcripts(entry.path())) {
      ++commands;
      CAPTURE(entry.path().filename().string());
      CAPTURE(t.command);
      CHECK(replay(t.command) == t.expected);
    }
  }
  CHECK(files >= 6);
  CHECK(commands >= 50);
}

TEST_CASE("help exits successfully") {
  std::ostringstream out, err;
  CHECK(ik::cli::run({"--help"}, out, err) == ik::cli::kTrue);
  CHECK(out.str().find("Subcommands") != std::string::npos);
}
