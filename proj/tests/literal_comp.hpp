#pragma once

#include <cstdint>
#include <set>
#include <utility>
#include <vector>

namespace testing {

// Literal transcription of the flag recurrence, kept independent of comp():
// sets are std::set, the sums are written out per order.
struct LiteralComp {
  std::set<unsigned> flags;
  std::uint64_t counter;
};

inline LiteralComp literal_comp(unsigned m, const std::set<unsigned>& M,
                         const std::vector<std::pair<std::set<unsigned>, std::uint64_t>>& inputs) {
  std::vector<std::uint64_t> f(m + 1, 0), fp(m + 1, 0);
  for (unsigned n = 0; n <= m; ++n) {
    if (n >= 1 && M.count(n - 1)) fp[n] = f[n - 1];
    else fp[n] = 0;
    std::uint64_t sum = 0;
    for (const auto& in : inputs)
      if (in.first.count(n)) sum += 1;
    f[n] = fp[n] + sum;
  }
  LiteralComp out{{}, fp[m]};
  for (unsigned n = 0; n < m; ++n)
    if (f[n] > 0 && !M.count(n)) out.flags.insert(n);
  for (const auto& in : inputs) out.counter += in.second;
  return out;
}

}  // namespace testing
