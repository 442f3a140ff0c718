#pragma once

#include <cstddef>
#include <functional>
#include <string>

namespace lamfin {

namespace detail {
struct SortRec;
}

// Simple type over the base sort o.  Values are hash-consed, so equality is
// pointer equality and copies are cheap.
class Sort {
public:
  Sort();  // o

  static Sort base();
  static Sort arrow(Sort arg, Sort result);

  bool is_base() const;
  Sort arg() const;     // only for arrows
  Sort result() const;  // only for arrows
  unsigned order() const;
  // Number of arguments until the base sort is reached.
  unsigned arity() const;

  std::string str() const;   // o, o -> o, (o -> o) -> o
  std::string sexpr() const; // o, (-> o o)

  std::size_t hash() const { return std::hash<const void*>()(rec_); }
  friend bool operator==(Sort a, Sort b) { return a.rec_ == b.rec_; }
  friend bool operator!=(Sort a, Sort b) { return a.rec_ != b.rec_; }
  // Structural order, stable across runs.
  friend bool operator<(Sort a, Sort b);

private:
  explicit Sort(const detail::SortRec* r) : rec_(r) {}
  const detail::SortRec* rec_;
};

unsigned ord(Sort s);

}  // namespace lamfin

template <>
struct std::hash<lamfin::Sort> {
  std::size_t operator()(lamfin::Sort s) const { return s.hash(); }
};
