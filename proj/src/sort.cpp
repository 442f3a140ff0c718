#include "lamfin/sort.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <mutex>
#include <stdexcept>

namespace lamfin {

namespace detail {
struct SortRec {
  const SortRec* arg = nullptr;
  const SortRec* result = nullptr;
  unsigned order = 0;
  unsigned arity = 0;
};
}  // namespace detail

namespace {

struct SortTable {
  std::mutex mu;
  std::deque<detail::SortRec> recs;
  std::map<std::pair<const detail::SortRec*, const detail::SortRec*>, const detail::SortRec*> arrows;
  const detail::SortRec* base;

  SortTable() {
    recs.emplace_back();
    base = &recs.back();
  }
};

SortTable& table() {
  static SortTable t;
  return t;
}

}  // namespace

Sort::Sort() : rec_(table().base) {}

Sort Sort::base() { return Sort(); }

Sort Sort::arrow(Sort a, Sort r) {
  auto& t = table();
  std::lock_guard<std::mutex> lock(t.mu);
  auto key = std::make_pair(a.rec_, r.rec_);
  auto it = t.arrows.find(key);
  if (it != t.arrows.end()) return Sort(it->second);
  detail::SortRec rec;
  rec.arg = a.rec_;
  rec.result = r.rec_;
  rec.order = std::max(1 + a.rec_->order, r.rec_->order);
  rec.arity = 1 + r.rec_->arity;
  t.recs.push_back(rec);
  t.arrows.emplace(key, &t.recs.back());
  return Sort(&t.recs.back());
}

bool Sort::is_base() const { return rec_->arg == nullptr; }

Sort Sort::arg() const {
  if (is_base()) throw std::logic_error("Sort::arg on base sort");
  return Sort(rec_->arg);
}

Sort Sort::result() const {
  if (is_base()) throw std::logic_error("Sort::result on base sort");
  return Sort(rec_->result);
}

unsigned Sort::order() const { return rec_->order; }
unsigned Sort::arity() const { return rec_->arity; }

std::string Sort::str() const {
  if (is_base()) return "o";
  std::string a = arg().str();
  if (!arg().is_base()) a = "(" + a + ")";
  return a + " -> " + result().str();
}

std::string Sort::sexpr() const {
  if (is_base()) return "o";
  return "(-> " + arg().sexpr() + " " + result().sexpr() + ")";
}

bool operator<(Sort a, Sort b) {
  if (a == b) return false;
  if (a.is_base()) return true;
  if (b.is_base()) return false;
  if (a.arg() != b.arg()) return a.arg() < b.arg();
  return a.result() < b.result();
}

unsigned ord(Sort s) { return s.order(); }

}  // namespace lamfin
