#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ik::cli {

// Exit codes: 0 TRUE or success, 1 FALSE or failure, 2 UNKNOWN, 64 usage error.
constexpr int kTrue = 0;
constexpr int kFalse = 1;
constexpr int kUnknown = 2;
constexpr int kUsage = 64;

auto run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) -> int;

}  // namespace ik::cli
