#include "lamfin/type_env.hpp"

#include <algorithm>

namespace lamfin {

TypeEnv TypeEnv::single(SubtermRef x, FullType t) {
  TypeEnv e;
  e.add(x, t);
  return e;
}

void TypeEnv::add(SubtermRef x, FullType t) {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), x,
                             [](const Entry& e, SubtermRef v) { return e.first < v; });
  if (it == entries_.end() || it->first != x) it = entries_.insert(it, Entry{x, {}});
  auto& set = it->second;
  auto pos = std::lower_bound(set.begin(), set.end(), t, StructuralLess());
  if (pos == set.end() || *pos != t) set.insert(pos, t);
}

void TypeEnv::add_all(const TypeEnv& other) {
  for (const auto& [x, ts] : other.entries_)
    for (FullType t : ts) add(x, t);
}

const std::vector<FullType>& TypeEnv::at(SubtermRef x) const {
  static const std::vector<FullType> none;
  auto it = std::lower_bound(entries_.begin(), entries_.end(), x,
                             [](const Entry& e, SubtermRef v) { return e.first < v; });
  if (it == entries_.end() || it->first != x) return none;
  return it->second;
}

bool TypeEnv::contains(SubtermRef x, FullType t) const {
  const auto& set = at(x);
  return std::binary_search(set.begin(), set.end(), t, StructuralLess());
}

TypeEnv TypeEnv::without(SubtermRef x) const {
  TypeEnv e;
  for (const auto& entry : entries_)
    if (entry.first != x) e.entries_.push_back(entry);
  return e;
}

std::size_t TypeEnv::hash() const {
  std::size_t h = 1469598103934665603ull;
  for (const auto& [x, ts] : entries_) {
    h = (h ^ x.id) * 1099511628211ull;
    for (FullType t : ts) h = (h ^ t.id()) * 1099511628211ull;
    h = (h ^ 0xff) * 1099511628211ull;
  }
  return h;
}

std::string TypeEnv::str(const TermGraph* g) const {
  if (entries_.empty()) return "ε";
  std::string s = "[";
  bool first = true;
  for (const auto& [x, ts] : entries_) {
    if (!first) s += ", ";
    first = false;
    s += g ? g->node(x).name : "#" + std::to_string(x.id);
    s += "↦{";
    for (size_t i = 0; i < ts.size(); ++i) {
      if (i) s += ',';
      s += ts[i].str();
    }
    s += '}';
  }
  return s + "]";
}

bool split(const TypeEnv& gamma, const std::vector<TypeEnv>& parts) {
  for (const TypeEnv& p : parts)
    for (const auto& [x, ts] : p.entries())
      for (FullType t : ts)
        if (!gamma.contains(x, t)) return false;
  for (const auto& [x, ts] : gamma.entries())
    for (FullType t : ts) {
      if (t.markers().empty()) continue;
      bool found = std::any_of(parts.begin(), parts.end(), [&](const TypeEnv& p) { return p.contains(x, t); });
      if (!found) return false;
    }
  return true;
}

CompResult comp(unsigned m, OrderSet markers, const std::vector<CompInput>& inputs) {
  CompResult r;
  r.placed.assign(m + 1, 0);
  std::uint64_t prev = 0;  // f_{n-1}
  for (unsigned n = 0; n <= m; ++n) {
    std::uint64_t fp = (n > 0 && markers.contains(n - 1)) ? prev : 0;
    std::uint64_t f = fp;
    for (const CompInput& in : inputs)
      if (in.flags.contains(n)) ++f;
    r.placed[n] = fp;
    if (n < m && f > 0 && !markers.contains(n)) r.flags.insert(n);
    prev = f;
  }
  r.counter = r.placed[m];
  for (const CompInput& in : inputs) r.counter += in.counter;
  return r;
}

}  // namespace lamfin
