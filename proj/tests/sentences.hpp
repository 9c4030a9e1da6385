#pragma once

// Random fully bounded sentences over arithmetic or the list superstructure of N.

#include <random>
#include <string>
#include <vector>

namespace gen {

class Sentences {
 public:
  Sentences(bool lists, std::uint64_t seed) : lists_(lists), rng_(seed) {}

  auto next() -> std::string {
    nats_.clear();
    lists_in_scope_.clear();
    counter_ = 0;
    return formula(3);
  }

 private:
  auto pick(std::size_t n) -> std::size_t { return static_cast<std::size_t>(rng_() % n); }

  auto small() -> std::string {
    switch (pick(4)) {
      case 0: return "0";
      case 1: return "1";
      case 2: return "(+ 1 1)";
      default: return "(+ 1 (+ 1 1))";
    }
  }

  auto nat_term(int depth) -> std::string {
    std::size_t k = pick(depth > 0 ? 6 : 3);
    if (k == 0 && !nats_.empty()) return nats_[pick(nats_.size())];
    if (k == 1 && !lists_in_scope_.empty()) return "(len " + lists_in_scope_[pick(lists_in_scope_.size())] + ")";
    if (k == 3) return "(+ " + nat_term(depth - 1) + " " + nat_term(depth - 1) + ")";
    if (k == 4) return "(* " + nat_term(depth - 1) + " " + nat_term(depth - 1) + ")";
    if (!nats_.empty() && k == 5) return nats_[pick(nats_.size())];
    return small();
  }

  auto list_var() -> std::string { return lists_in_scope_[pick(lists_in_scope_.size())]; }

  auto atom() -> std::string {
    bool have_lists = !lists_in_scope_.empty();
    switch (pick(have_lists ? 5 : 2)) {
      case 0: return "(= " + nat_term(1) + " " + nat_term(1) + ")";
      case 1: return "(<= " + nat_term(1) + " " + nat_term(1) + ")";
      case 2: return "(t " + list_var() + " " + nat_term(0) + " " + nat_term(0) + ")";
      case 3: return "(= " + list_var() + " " + list_var() + ")";
      default: return "(= (concat " + list_var() + " " + list_var() + ") " + list_var() + ")";
    }
  }

  auto formula(int depth) -> std::string {
    if (depth == 0) return atom();
    switch (pick(lists_ ? 7 : 6)) {
      case 0: return "(not " + formula(depth - 1) + ")";
      case 1: return "(and " + formula(depth - 1) + " " + formula(depth - 1) + ")";
      case 2: return "(or " + formula(depth - 1) + " " + formula(depth - 1) + ")";
      case 3: return "(imp " + formula(depth - 1) + " " + formula(depth - 1) + ")";
      case 4:
      case 5: {
        std::string v = "n" + std::to_string(counter_++);
        std::string q = pick(2) ? "forall-lt" : "exists-lt";
        std::string head = "(" + q + " (" + v + " " + std::to_string(1 + pick(5)) + ") ";
        nats_.push_back(v);
        std::string body = formula(depth - 1);
        nats_.pop_back();
        return head + body + ")";
      }
      default: {
        std::string v = "s" + std::to_string(counter_++);
        std::string q = pick(2) ? "forall-lt" : "exists-lt";
        std::string head = "(" + q + " (" + v + " list " + std::to_string(1 + pick(40)) + ") ";
        lists_in_scope_.push_back(v);
        std::string body = formula(depth - 1);
        lists_in_scope_.pop_back();
        return head + body + ")";
      }
    }
  }

  bool lists_;
  std::mt19937_64 rng_;
  std::vector<std::string> nats_, lists_in_scope_;
  int counter_ = 0;
};

}  // namespace gen
