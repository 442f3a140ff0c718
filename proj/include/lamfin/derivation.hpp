#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lamfin/term_graph.hpp"
#include "lamfin/type_env.hpp"

namespace lamfin {

enum class Rule { Br, Var, Lam, Con, App };
const char* to_string(Rule r);

enum class RuleError {
  SubjectMismatch,
  MarkerBelowBinderOrder,
  SplitViolation,
  FlagOrTypeMismatch,
  BinderLeak,
  BrNotAllowed,
  MarkerCollision,
  MarkerAtInnerNode,
  ArgSetMismatch,
  OrderExceeded,
  CounterMismatch,
  ConclusionMismatch,
  Malformed,
};
const char* to_string(RuleError e);

class DerivationError : public std::runtime_error {
public:
  DerivationError(RuleError code, const std::string& msg)
      : std::runtime_error(std::string(to_string(code)) + ": " + msg), code(code) {}
  RuleError code;
};

// Γ ⊢ P : τ̂ ▷ c
struct Judgment {
  TypeEnv env;
  SubtermRef subject;
  FullType type;
  std::uint64_t counter = 0;
};

struct Derivation;
using DerivationPtr = std::shared_ptr<const Derivation>;

struct Derivation {
  Judgment conclusion;
  Rule rule;
  std::vector<DerivationPtr> premisses;
  // (order, count) for every order with flags created at this node.
  std::vector<std::pair<unsigned, std::uint64_t>> placed_flags;
  OrderSet placed_markers;
  unsigned branch = 0;                // Br: 1 or 2
  std::optional<FullType> env_type;   // Var: the full type taken from Γ(x)
};

// Node count of the tree (shared subtrees counted once per occurrence).
std::uint64_t node_count(const Derivation& d);

// Rule constructors.  Each checks its side conditions and throws
// DerivationError; the result is a valid node whenever premisses are valid.
DerivationPtr apply_br(const TermGraph& g, DerivationPtr premiss, unsigned which, SubtermRef subject);
DerivationPtr apply_var(const TermGraph& g, const TypeEnv& env, SubtermRef x, FullType env_type,
                        FullType requested);
DerivationPtr apply_lambda(const TermGraph& g, DerivationPtr premiss, SubtermRef lambda,
                           std::vector<FullType> arg_set, const TypeEnv& env);
DerivationPtr apply_con(const TermGraph& g, SubtermRef subject, std::vector<DerivationPtr> premisses,
                        OrderSet marker_choice, const TypeEnv& env, unsigned m);
DerivationPtr apply_app(const TermGraph& g, SubtermRef subject, DerivationPtr op,
                        std::vector<DerivationPtr> args, const TypeEnv& env);

// Re-applies the node's rule to new premisses, keeping env and rule data.
DerivationPtr rebuild(const TermGraph& g, const Derivation& d, std::vector<DerivationPtr> premisses);

// Path of premiss indices from the root.
using DerivationPath = std::vector<std::size_t>;

const Derivation& at_path(const Derivation& d, const DerivationPath& path);
// Replaces the sub-derivation at `path` and recomputes counters upward.
DerivationPtr replace_at(const TermGraph& g, const DerivationPtr& d, const DerivationPath& path,
                         DerivationPtr replacement);

struct ValidationReport {
  bool ok = true;
  RuleError code = RuleError::Malformed;
  DerivationPath where;
  std::string message;
};

ValidationReport validate(const TermGraph& g, const Derivation& d);

}  // namespace lamfin
