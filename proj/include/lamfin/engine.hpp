#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lamfin/derivation.hpp"

namespace lamfin {

struct EngineOptions {
  // Upper bound on generated rule instances; a safety valve only.
  std::uint64_t budget = 20'000'000;
  unsigned threads = 1;
};

class BudgetExhausted : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// ρ̂_m = (m, ∅, {0..m-1}, o).
FullType rho_hat(unsigned m);

// A judgment without its counter.
struct Skeleton {
  TypeEnv env;
  SubtermRef subject;
  FullType type;
};

// A derivation with two nodes on one branch carrying the same skeleton, the
// ancestor's counter strictly larger than the descendant's.
struct PumpWitness {
  DerivationPtr derivation;
  DerivationPath ancestor;
  DerivationPath descendant;
};

// Unrolls the section between ancestor and descendant `times` extra times.
DerivationPtr pump(const TermGraph& g, const PumpWitness& w, unsigned times);

struct EngineStats {
  std::size_t skeletons = 0;
  std::size_t instances = 0;
  std::size_t rounds = 0;
};

// Least fixpoint of derivable skeletons at order m, with every rule instance
// that derives one skeleton from others.
class Saturation {
public:
  struct Instance {
    std::uint32_t conclusion;
    Rule rule;
    std::vector<std::uint32_t> premisses;
    std::uint64_t gain;  // order-m flags created at this node
    OrderSet leaf_markers;
    unsigned branch = 0;
    std::optional<FullType> env_type;
  };

  // Each seed (σ, τ̂) offers the argument sets along τ̂'s arrows to the
  // binders of matching sort, as an enclosing application would.
  Saturation(const TermGraph& g, unsigned m, const EngineOptions& opts = {},
             const std::vector<std::pair<Sort, FullType>>& seeds = {});
  ~Saturation();
  Saturation(const Saturation&) = delete;
  Saturation& operator=(const Saturation&) = delete;

  unsigned order() const;
  const TermGraph& graph() const;
  std::size_t size() const;
  const Skeleton& skeleton(std::uint32_t id) const;
  std::optional<std::uint32_t> find(const Skeleton& s) const;
  const std::vector<std::uint32_t>& at(SubtermRef node) const;
  const std::vector<Instance>& instances() const;
  // Some derivation of the skeleton has a positive counter.
  bool can_grow(std::uint32_t id) const;
  EngineStats stats() const;

  std::uint64_t min_counter(std::uint32_t id) const;
  DerivationPtr min_derivation(std::uint32_t id) const;
  DerivationPtr positive_derivation(std::uint32_t id) const;

  // Pump witness rooted at `root`, shortest section first.
  std::optional<PumpWitness> find_pump(std::uint32_t root) const;
  // Largest counter of a derivation of `root`; only meaningful when no pump
  // exists from it.
  std::uint64_t max_counter(std::uint32_t root) const;
  DerivationPtr max_derivation(std::uint32_t root) const;

  // Skeletons with m-1 ∉ M and subject order ≤ m-1 that still admit a
  // positive counter.  Always empty for a sound engine.
  std::vector<std::uint32_t> zero_counter_violations() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct Verdict {
  enum class Kind { Finite, Infinite };
  Kind kind = Kind::Finite;
  unsigned order = 0;
  std::optional<PumpWitness> witness;
  bool root_derivable = false;
  // FINITE only: largest root counter and the tree size it implies.
  std::optional<std::uint64_t> max_counter;
  std::optional<std::uint64_t> size_bound;
  EngineStats stats;
};

const char* to_string(Verdict::Kind k);

Verdict decide_finiteness(const TermGraph& g, const EngineOptions& opts = {});

// nullptr means NotFound.  Throws BudgetExhausted and std::invalid_argument
// (target does not fit the subject's sort).
DerivationPtr find_derivation(const TermGraph& g, SubtermRef subject, FullType target, std::uint64_t min_counter,
                              const EngineOptions& opts = {});

// 2^2^...^c with m exponentials, nullopt on overflow.
std::optional<std::uint64_t> tower(unsigned m, std::uint64_t c);

}  // namespace lamfin
