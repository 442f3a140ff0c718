#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lamfin/full_type.hpp"
#include "lamfin/term_graph.hpp"

namespace lamfin {

// Γ.  Variables are identified by their binder node; unlisted variables map
// to ∅.  Entries are sorted by variable, sets in structural order.
class TypeEnv {
public:
  using Entry = std::pair<SubtermRef, std::vector<FullType>>;

  TypeEnv() = default;
  static TypeEnv single(SubtermRef x, FullType t);

  void add(SubtermRef x, FullType t);
  void add_all(const TypeEnv& other);
  const std::vector<FullType>& at(SubtermRef x) const;
  bool contains(SubtermRef x, FullType t) const;
  TypeEnv without(SubtermRef x) const;
  bool empty() const { return entries_.empty(); }
  const std::vector<Entry>& entries() const { return entries_; }

  std::size_t hash() const;
  friend bool operator==(const TypeEnv& a, const TypeEnv& b) { return a.entries_ == b.entries_; }
  friend bool operator!=(const TypeEnv& a, const TypeEnv& b) { return !(a == b); }

  // [x↦{...}, ...] using binder names when a graph is given.
  std::string str(const TermGraph* g = nullptr) const;

private:
  std::vector<Entry> entries_;
};

// Split(Γ | (Γ_i)): every Γ_i(x) ⊆ Γ(x), and every full type in Γ(x) with a
// nonempty marker set occurs in some Γ_i(x).
bool split(const TypeEnv& gamma, const std::vector<TypeEnv>& parts);

struct CompInput {
  OrderSet flags;
  std::uint64_t counter = 0;
};

struct CompResult {
  OrderSet flags;
  std::uint64_t counter = 0;
  // placed[n] = f'_n for n = 0..m: flags of order n created at this node.
  std::vector<std::uint64_t> placed;
};

// Comp_m(M; (F_i, c_i)_i).
CompResult comp(unsigned m, OrderSet markers, const std::vector<CompInput>& inputs);

}  // namespace lamfin
