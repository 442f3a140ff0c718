#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "lamfin/term.hpp"

namespace lamfin {

// Prefix of a Böhm tree.  `?` marks a node left unexpanded at the depth
// limit, `_|_` one whose head normalization ran out of steps.
struct PartialTree {
  enum class Kind { Node, Unexpanded, Diverged };
  Kind kind = Kind::Node;
  std::string label;
  std::vector<PartialTree> kids;

  std::string str() const;  // (br (e) (a ?))
};

// Finite br-free tree, ordered structurally so sets deduplicate.
struct FiniteTree {
  std::string label;
  std::vector<FiniteTree> kids;

  std::size_t size() const;
  std::string str() const;  // (a (a (e)))
  friend bool operator==(const FiniteTree& a, const FiniteTree& b) { return a.label == b.label && a.kids == b.kids; }
  friend bool operator<(const FiniteTree& a, const FiniteTree& b) {
    if (a.label != b.label) return a.label < b.label;
    return std::lexicographical_compare(a.kids.begin(), a.kids.end(), b.kids.begin(), b.kids.end());
  }
};

FiniteTree parse_finite_tree(const std::string& text);

struct Fuel {
  unsigned depth = 128;
  std::uint64_t steps = 10'000;  // head reduction steps per node
};

PartialTree bohm_expand(const TermPtr& p, const Fuel& fuel);

struct Language {
  std::set<FiniteTree> trees;
  // True when no cut-off could have hidden a tree within the size limit.
  bool complete = true;
};

Language language_upto(const TermPtr& p, std::size_t max_size, const Fuel& fuel);

// Searches for a choice of br branches in BT(p) that yields `t`.
bool replays(const TermPtr& p, const FiniteTree& t, const Fuel& fuel);

struct GrowthStep {
  std::size_t max_size;
  Fuel fuel;
};

struct GrowthRow {
  std::size_t max_size;
  std::size_t found;
  std::size_t largest;  // 0 when nothing was found
  bool complete;
};

struct GrowthReport {
  std::vector<GrowthRow> rows;
  bool strictly_increasing;
};

std::vector<GrowthStep> default_schedule();
GrowthReport growth_report(const TermPtr& p, const std::vector<GrowthStep>& schedule);
// One JSON object per schedule step, then a summary line.
std::string growth_report_jsonl(const GrowthReport& r);

}  // namespace lamfin
