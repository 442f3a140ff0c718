#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lamfin/term.hpp"

namespace lamfin {

// A node of the canonical regular graph of an infinitary unfolding.  Two refs
// of the same graph are equal iff their unfoldings are α-equal.
struct SubtermRef {
  std::uint32_t id = 0;
  friend bool operator==(SubtermRef a, SubtermRef b) { return a.id == b.id; }
  friend bool operator!=(SubtermRef a, SubtermRef b) { return a.id != b.id; }
  friend bool operator<(SubtermRef a, SubtermRef b) { return a.id < b.id; }
};

enum class NodeKind { Const, Var, App, Lam };

struct GraphNode {
  NodeKind kind;
  std::string name;      // symbol for Const, binder name for Lam and Var
  std::string fix_name;  // name of the fixpoint this node unfolds, if any
  Sort sort;
  std::vector<SubtermRef> kids;  // Const: args, App: {fn, arg}, Lam: {body}
  SubtermRef binder;             // Var only: its λ node
};

class TermGraph {
public:
  // Y M with M a λ unfolds to a cycle through M's body; any other Y becomes
  // the regular term Z = λx.x (Z x).  Nodes are deduplicated by bisimulation
  // and numbered breadth-first from the root.
  static TermGraph unfold(const Term& t);

  SubtermRef root() const { return SubtermRef{0}; }
  std::size_t size() const { return nodes_.size(); }
  const GraphNode& node(SubtermRef r) const { return nodes_.at(r.id); }
  const std::vector<GraphNode>& nodes() const { return nodes_; }
  unsigned order(SubtermRef r) const { return node(r).sort.order(); }
  unsigned complexity() const;

  std::vector<SubtermRef> closure() const;
  std::vector<SubtermRef> closure(SubtermRef from) const;

  std::string print(SubtermRef r) const;
  std::optional<SubtermRef> find(std::string_view printed) const;

private:
  std::vector<GraphNode> nodes_;
};

std::vector<SubtermRef> subterm_closure(const Term& t);
unsigned complexity(const Term& t);

}  // namespace lamfin

template <>
struct std::hash<lamfin::SubtermRef> {
  std::size_t operator()(lamfin::SubtermRef r) const { return std::hash<std::uint32_t>()(r.id); }
};
