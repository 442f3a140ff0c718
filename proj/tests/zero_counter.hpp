#pragma once

#include <cstddef>

#include "lamfin/derivation.hpp"

namespace testing {

// Nodes with m-1 ∉ M and subject order ≤ m-1 whose counter is not 0.
inline std::size_t zero_counter_bad_nodes(const lamfin::TermGraph& g, const lamfin::Derivation& d) {
  std::size_t bad = 0;
  const lamfin::Judgment& j = d.conclusion;
  unsigned m = j.type.order();
  if (m >= 1 && !j.type.markers().contains(m - 1) && g.order(j.subject) <= m - 1 && j.counter != 0) ++bad;
  for (const auto& p : d.premisses) bad += zero_counter_bad_nodes(g, *p);
  return bad;
}

}  // namespace testing
