#include "lamfin/engine.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <functional>
#include <limits>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace lamfin {

FullType rho_hat(unsigned m) { return FullType::make(m, OrderSet(), OrderSet::range(m), IType::base()); }

const char* to_string(Verdict::Kind k) { return k == Verdict::Kind::Finite ? "FINITE" : "INFINITE"; }

std::optional<std::uint64_t> tower(unsigned m, std::uint64_t c) {
  std::uint64_t x = c;
  for (unsigned i = 0; i < m; ++i) {
    if (x >= 63) return std::nullopt;
    x = std::uint64_t{1} << x;
  }
  return x;
}

namespace {

constexpr std::uint64_t kInf = std::numeric_limits<std::uint64_t>::max();
constexpr std::uint32_t kNoInst = std::numeric_limits<std::uint32_t>::max();

struct SkelKey {
  std::uint32_t node;
  std::uint32_t type;
  TypeEnv env;
  friend bool operator==(const SkelKey& a, const SkelKey& b) {
    return a.node == b.node && a.type == b.type && a.env == b.env;
  }
};

struct SkelKeyHash {
  std::size_t operator()(const SkelKey& k) const {
    return k.env.hash() ^ (std::size_t{k.node} * 0x9e3779b97f4a7c15ull) ^ (std::size_t{k.type} << 20);
  }
};

struct VecHash {
  std::size_t operator()(const std::vector<std::uint64_t>& v) const {
    std::size_t h = 1469598103934665603ull;
    for (auto x : v) h = (h ^ x) * 1099511628211ull;
    return h;
  }
};

struct Candidate {
  Skeleton skel;
  Saturation::Instance inst;
};

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) { return a > kInf - b ? kInf : a + b; }

}  // namespace

struct Saturation::Impl {
  const TermGraph& g;
  unsigned m;
  EngineOptions opts;

  std::vector<Skeleton> skels;
  std::unordered_map<SkelKey, std::uint32_t, SkelKeyHash> index;
  std::vector<std::vector<std::uint32_t>> by_node;

  std::vector<std::vector<FullType>> universe;
  std::vector<std::unordered_set<std::uint32_t>> universe_ids;

  std::vector<Instance> insts;
  std::unordered_set<std::vector<std::uint64_t>, VecHash> inst_keys;
  std::vector<std::vector<std::uint32_t>> derived_by;
  std::vector<std::vector<std::uint32_t>> used_in;

  std::vector<std::vector<SubtermRef>> parents;
  std::vector<std::vector<SubtermRef>> var_of_binder;
  std::vector<std::vector<SubtermRef>> binders_for_app;
  std::unordered_map<Sort, std::vector<SubtermRef>> lam_by_sort;
  std::vector<std::size_t> app_cursor;

  std::vector<char> canpos;
  std::vector<std::uint32_t> pos_inst;
  // Premiss that made the conclusion positive, or kNoInst for a gain.  It was
  // marked strictly earlier, so following it always terminates.
  std::vector<std::uint32_t> pos_prem;
  std::vector<std::uint64_t> minc;
  std::vector<std::uint32_t> min_inst;

  mutable std::vector<DerivationPtr> min_memo;
  mutable std::vector<DerivationPtr> pos_memo;

  EngineStats stats;
  std::atomic<std::uint64_t> work{0};

  Impl(const TermGraph& g, unsigned m, const EngineOptions& o) : g(g), m(m), opts(o) {}

  void charge(std::uint64_t n = 1) {
    if (work.fetch_add(n) + n > opts.budget)
      throw BudgetExhausted("search budget of " + std::to_string(opts.budget) + " rule instances exhausted");
  }

  void prepare() {
    std::size_t n = g.size();
    by_node.assign(n, {});
    universe.assign(n, {});
    universe_ids.assign(n, {});
    parents.assign(n, {});
    var_of_binder.assign(n, {});
    binders_for_app.assign(n, {});
    app_cursor.assign(n, 0);
    for (std::uint32_t i = 0; i < n; ++i) {
      const GraphNode& nd = g.node(SubtermRef{i});
      for (SubtermRef k : nd.kids) parents[k.id].push_back(SubtermRef{i});
      if (nd.kind == NodeKind::Var) var_of_binder[nd.binder.id].push_back(SubtermRef{i});
      if (nd.kind == NodeKind::Lam) lam_by_sort[nd.sort].push_back(SubtermRef{i});
    }
    for (std::uint32_t i = 0; i < n; ++i) {
      const GraphNode& nd = g.node(SubtermRef{i});
      if (nd.kind != NodeKind::App) continue;
      auto it = lam_by_sort.find(g.node(nd.kids[0]).sort);
      if (it != lam_by_sort.end()) binders_for_app[i] = it->second;
    }
  }

  bool offer(SubtermRef binder, FullType t, std::vector<char>& dirty) {
    if (!universe_ids[binder.id].insert(t.id()).second) return false;
    universe[binder.id].push_back(t);
    for (SubtermRef v : var_of_binder[binder.id]) dirty[v.id] = 1;
    return true;
  }

  void seed(Sort s, FullType t, std::vector<char>& dirty) {
    IType tau = t.itype();
    while (!tau.is_base()) {
      auto it = lam_by_sort.find(s);
      if (it != lam_by_sort.end())
        for (SubtermRef b : it->second)
          for (FullType a : tau.args()) offer(b, a, dirty);
      s = s.result();
      tau = tau.result();
    }
  }

  void update_universes(std::vector<char>& dirty) {
    for (std::uint32_t i = 0; i < g.size(); ++i) {
      const GraphNode& nd = g.node(SubtermRef{i});
      if (nd.kind != NodeKind::App || binders_for_app[i].empty()) continue;
      unsigned k = g.order(nd.kids[0]);
      if (k > m) continue;
      const auto& qs = by_node[nd.kids[1].id];
      for (; app_cursor[i] < qs.size(); ++app_cursor[i]) {
        const FullType& q = skels[qs[app_cursor[i]]].type;
        FullType r = FullType::make(k, q.flags().below(k), q.markers().below(k), q.itype());
        for (SubtermRef b : binders_for_app[i]) offer(b, r, dirty);
      }
    }
  }

  // ------------------------------------------------------------ rules

  void compute_var(SubtermRef x, std::vector<Candidate>& out) {
    const GraphNode& nd = g.node(x);
    unsigned k = g.order(nd.binder);
    OrderSet all = OrderSet::range(m);
    for (FullType t : universe[nd.binder.id]) {
      if (!t.flags().subset_of(all) || !t.markers().subset_of(all)) continue;
      std::uint32_t free = (all.atleast(k) - t.flags()).bits();
      for (std::uint32_t extra = 0;; extra = (extra - free) & free) {
        charge();
        FullType req = FullType::make(m, t.flags(), t.markers() | OrderSet(extra), t.itype());
        Instance inst{0, Rule::Var, {}, 0, {}, 0, t};
        out.push_back({Skeleton{TypeEnv::single(nd.binder, t), x, req}, inst});
        if (extra == free) break;
      }
    }
  }

  void compute_br(SubtermRef node, std::vector<Candidate>& out) {
    const GraphNode& nd = g.node(node);
    for (unsigned j = 0; j < 2; ++j)
      for (std::uint32_t s : by_node[nd.kids[j].id]) {
        charge();
        Instance inst{0, Rule::Br, {s}, 0, {}, j + 1, {}};
        out.push_back({Skeleton{skels[s].env, node, skels[s].type}, inst});
      }
  }

  void compute_con(SubtermRef node, std::vector<Candidate>& out) {
    const GraphNode& nd = g.node(node);
    CompInput own = m == 0 ? CompInput{OrderSet(), 0} : CompInput{OrderSet{0}, 0};
    std::uint64_t own_gain = m == 0 ? 1 : 0;
    if (nd.kids.empty()) {
      std::uint32_t all = OrderSet::range(m).bits();
      for (std::uint32_t mk = 0;; mk = (mk - all) & all) {
        charge();
        CompResult r = comp(m, OrderSet(mk), {own});
        FullType t = FullType::make(m, r.flags, OrderSet(mk), IType::base());
        Instance inst{0, Rule::Con, {}, r.placed[m] + own_gain, OrderSet(mk), 0, {}};
        out.push_back({Skeleton{TypeEnv(), node, t}, inst});
        if (mk == all) break;
      }
      return;
    }
    std::vector<std::uint32_t> chosen;
    std::function<void(std::size_t, OrderSet)> rec = [&](std::size_t i, OrderSet markers) {
      if (i == nd.kids.size()) {
        charge();
        std::vector<CompInput> inputs{own};
        TypeEnv env;
        for (std::uint32_t s : chosen) {
          inputs.push_back({skels[s].type.flags(), 0});
          env.add_all(skels[s].env);
        }
        CompResult r = comp(m, markers, inputs);
        FullType t = FullType::make(m, r.flags, markers, IType::base());
        Instance inst{0, Rule::Con, chosen, r.placed[m] + own_gain, {}, 0, {}};
        out.push_back({Skeleton{std::move(env), node, t}, inst});
        return;
      }
      for (std::uint32_t s : by_node[nd.kids[i].id]) {
        OrderSet mk = skels[s].type.markers();
        if (!mk.disjoint(markers)) continue;
        chosen.push_back(s);
        rec(i + 1, markers | mk);
        chosen.pop_back();
      }
    };
    rec(0, OrderSet());
  }

  void compute_lam(SubtermRef node, std::vector<Candidate>& out) {
    const GraphNode& nd = g.node(node);
    for (std::uint32_t s : by_node[nd.kids[0].id]) {
      charge();
      const Skeleton& b = skels[s];
      const std::vector<FullType>& T = b.env.at(node);
      OrderSet provided;
      for (FullType t : T) provided = provided | t.markers();
      FullType t = FullType::make(m, b.type.flags(), b.type.markers() - provided, IType::arrow(T, b.type.itype()));
      Instance inst{0, Rule::Lam, {s}, 0, {}, 0, {}};
      out.push_back({Skeleton{b.env.without(node), node, t}, inst});
    }
  }

  void compute_app(SubtermRef node, std::vector<Candidate>& out) {
    const GraphNode& nd = g.node(node);
    unsigned k = g.order(nd.kids[0]);
    if (k > m) return;
    std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> groups;
    for (std::uint32_t q : by_node[nd.kids[1].id]) {
      const FullType& t = skels[q].type;
      groups[FullType::make(k, t.flags().below(k), t.markers().below(k), t.itype()).id()].push_back(q);
    }
    for (std::uint32_t s : by_node[nd.kids[0].id]) {
      const Skeleton& op = skels[s];
      if (op.type.itype().is_base()) continue;
      const auto& T0 = op.type.itype().args();
      std::vector<const std::vector<std::uint32_t>*> cands;
      bool ok = true;
      for (FullType t : T0) {
        auto it = groups.find(t.id());
        if (it == groups.end()) {
          ok = false;
          break;
        }
        cands.push_back(&it->second);
      }
      if (!ok) continue;
      std::vector<std::uint32_t> chosen{s};
      // Element i of T0, candidate j of its group; `any` once one is taken.
      std::function<void(std::size_t, std::size_t, bool, OrderSet)> rec = [&](std::size_t i, std::size_t j,
                                                                             bool any, OrderSet markers) {
        if (i == T0.size()) {
          charge();
          std::vector<CompInput> inputs{{op.type.flags(), 0}};
          TypeEnv env = op.env;
          for (std::size_t c = 1; c < chosen.size(); ++c) {
            const Skeleton& q = skels[chosen[c]];
            inputs.push_back({q.type.flags().atleast(k), 0});
            env.add_all(q.env);
          }
          CompResult r = comp(m, markers, inputs);
          FullType t = FullType::make(m, r.flags, markers, op.type.itype().result());
          Instance inst{0, Rule::App, chosen, r.placed[m], {}, 0, {}};
          out.push_back({Skeleton{std::move(env), node, t}, inst});
          return;
        }
        const auto& cs = *cands[i];
        if (j == cs.size()) {
          if (any) rec(i + 1, 0, false, markers);
          return;
        }
        OrderSet mk = skels[cs[j]].type.markers();
        if (mk.disjoint(markers)) {
          chosen.push_back(cs[j]);
          rec(i, j + 1, true, markers | mk);
          chosen.pop_back();
        }
        rec(i, j + 1, any, markers);
      };
      rec(0, 0, false, op.type.markers());
    }
  }

  void compute(SubtermRef node, std::vector<Candidate>& out) {
    const GraphNode& nd = g.node(node);
    switch (nd.kind) {
      case NodeKind::Var: compute_var(node, out); break;
      case NodeKind::Const:
        if (nd.name == kBr) compute_br(node, out);
        else compute_con(node, out);
        break;
      case NodeKind::Lam: compute_lam(node, out); break;
      case NodeKind::App: compute_app(node, out); break;
    }
  }

  // ---------------------------------------------------------- fixpoint

  void merge(SubtermRef node, std::vector<Candidate>& cands, std::vector<char>& dirty) {
    for (Candidate& c : cands) {
      SkelKey key{node.id, c.skel.type.id(), c.skel.env};
      auto it = index.find(key);
      std::uint32_t id;
      if (it == index.end()) {
        id = static_cast<std::uint32_t>(skels.size());
        index.emplace(std::move(key), id);
        skels.push_back(std::move(c.skel));
        by_node[node.id].push_back(id);
        derived_by.emplace_back();
        used_in.emplace_back();
        for (SubtermRef p : parents[node.id]) dirty[p.id] = 1;
      } else {
        id = it->second;
      }
      Instance& inst = c.inst;
      inst.conclusion = id;
      std::vector<std::uint64_t> ikey{node.id, static_cast<std::uint64_t>(inst.rule), inst.branch,
                                      inst.leaf_markers.bits(), inst.env_type ? inst.env_type->id() + 1ull : 0ull,
                                      id};
      for (auto p : inst.premisses) ikey.push_back(p);
      if (!inst_keys.insert(std::move(ikey)).second) continue;
      auto iid = static_cast<std::uint32_t>(insts.size());
      derived_by[id].push_back(iid);
      for (auto p : inst.premisses) used_in[p].push_back(iid);
      insts.push_back(std::move(inst));
    }
  }

  void saturate(const std::vector<std::pair<Sort, FullType>>& seeds) {
    prepare();
    std::size_t n = g.size();
    std::vector<char> dirty(n, 1);
    for (const auto& [s, t] : seeds) seed(s, t, dirty);
    unsigned threads = std::max(1u, opts.threads);
    for (;;) {
      update_universes(dirty);
      std::vector<SubtermRef> todo;
      for (std::uint32_t i = 0; i < n; ++i)
        if (dirty[i]) todo.push_back(SubtermRef{i});
      if (todo.empty()) break;
      std::fill(dirty.begin(), dirty.end(), 0);
      ++stats.rounds;
      std::vector<std::vector<Candidate>> results(todo.size());
      if (threads == 1 || todo.size() < 2) {
        for (std::size_t i = 0; i < todo.size(); ++i) compute(todo[i], results[i]);
      } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex error_mu;
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < std::min<std::size_t>(threads, todo.size()); ++w)
          pool.emplace_back([&] {
            for (;;) {
              std::size_t i = next.fetch_add(1);
              if (i >= todo.size()) return;
              try {
                compute(todo[i], results[i]);
              } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!error) error = std::current_exception();
                next = todo.size();
              }
            }
          });
        for (auto& t : pool) t.join();
        if (error) std::rethrow_exception(error);
      }
      for (std::size_t i = 0; i < todo.size(); ++i) merge(todo[i], results[i], dirty);
    }
    stats.skeletons = skels.size();
    stats.instances = insts.size();
    analyse();
  }

  void analyse() {
    std::size_t n = skels.size();
    // Minimal counters; pointers only move on strict improvement, which keeps
    // the chosen instances well-founded.
    minc.assign(n, kInf);
    min_inst.assign(n, kNoInst);
    for (bool changed = true; changed;) {
      changed = false;
      for (std::uint32_t i = 0; i < insts.size(); ++i) {
        const Instance& in = insts[i];
        std::uint64_t v = in.gain;
        for (auto p : in.premisses) v = sat_add(v, minc[p]);
        if (v < minc[in.conclusion]) {
          minc[in.conclusion] = v;
          min_inst[in.conclusion] = i;
          changed = true;
        }
      }
    }
    canpos.assign(n, 0);
    pos_inst.assign(n, kNoInst);
    pos_prem.assign(n, kNoInst);
    std::deque<std::uint32_t> work_list;
    for (std::uint32_t i = 0; i < insts.size(); ++i)
      if (insts[i].gain > 0 && !canpos[insts[i].conclusion]) {
        canpos[insts[i].conclusion] = 1;
        pos_inst[insts[i].conclusion] = i;
        work_list.push_back(insts[i].conclusion);
      }
    while (!work_list.empty()) {
      std::uint32_t s = work_list.front();
      work_list.pop_front();
      for (std::uint32_t i : used_in[s]) {
        std::uint32_t c = insts[i].conclusion;
        if (canpos[c]) continue;
        canpos[c] = 1;
        pos_inst[c] = i;
        const auto& ps = insts[i].premisses;
        pos_prem[c] = static_cast<std::uint32_t>(std::find(ps.begin(), ps.end(), s) - ps.begin());
        work_list.push_back(c);
      }
    }
    min_memo.assign(n, nullptr);
    pos_memo.assign(n, nullptr);
  }

  // ------------------------------------------------------ construction

  DerivationPtr make_node(const Instance& in, std::vector<DerivationPtr> prem) const {
    const Skeleton& c = skels[in.conclusion];
    switch (in.rule) {
      case Rule::Var: return apply_var(g, c.env, c.subject, *in.env_type, c.type);
      case Rule::Br: return apply_br(g, prem[0], in.branch, c.subject);
      case Rule::Lam: return apply_lambda(g, prem[0], c.subject, c.type.itype().args(), c.env);
      case Rule::Con: return apply_con(g, c.subject, std::move(prem), in.leaf_markers, c.env, m);
      case Rule::App: {
        DerivationPtr op = prem[0];
        prem.erase(prem.begin());
        return apply_app(g, c.subject, op, std::move(prem), c.env);
      }
    }
    throw std::logic_error("unknown rule");
  }

  DerivationPtr build_min(std::uint32_t s) const {
    if (min_memo[s]) return min_memo[s];
    const Instance& in = insts[min_inst[s]];
    std::vector<DerivationPtr> prem;
    for (auto p : in.premisses) prem.push_back(build_min(p));
    return min_memo[s] = make_node(in, std::move(prem));
  }

  DerivationPtr build_pos(std::uint32_t s) const {
    if (pos_memo[s]) return pos_memo[s];
    const Instance& in = insts[pos_inst[s]];
    std::vector<DerivationPtr> prem;
    for (std::uint32_t i = 0; i < in.premisses.size(); ++i)
      prem.push_back(i == pos_prem[s] ? build_pos(in.premisses[i]) : build_min(in.premisses[i]));
    return pos_memo[s] = make_node(in, std::move(prem));
  }

  std::vector<std::uint32_t> reachable(std::uint32_t root, std::vector<std::pair<std::uint32_t, std::uint32_t>>* via) const {
    std::vector<char> seen(skels.size(), 0);
    std::vector<std::uint32_t> order{root};
    if (via) via->assign(skels.size(), {kNoInst, 0});
    seen[root] = 1;
    for (std::size_t i = 0; i < order.size(); ++i)
      for (std::uint32_t iid : derived_by[order[i]]) {
        const Instance& in = insts[iid];
        for (std::uint32_t j = 0; j < in.premisses.size(); ++j) {
          std::uint32_t p = in.premisses[j];
          if (seen[p]) continue;
          seen[p] = 1;
          if (via) (*via)[p] = {iid, j};
          order.push_back(p);
        }
      }
    return order;
  }

  bool positive_edge(const Instance& in, std::uint32_t j) const {
    if (in.gain > 0) return true;
    for (std::uint32_t i = 0; i < in.premisses.size(); ++i)
      if (i != j && canpos[in.premisses[i]]) return true;
    return false;
  }

  std::optional<PumpWitness> find_pump(std::uint32_t root) const {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> via;
    std::vector<std::uint32_t> reach = reachable(root, &via);
    std::vector<char> in_reach(skels.size(), 0);
    for (auto s : reach) in_reach[s] = 1;

    // Strongly connected components of the reachable premiss graph.
    std::vector<int> comp_id(skels.size(), -1), low(skels.size(), 0), num(skels.size(), -1);
    std::vector<char> on_stack(skels.size(), 0);
    std::vector<std::uint32_t> stack;
    int counter = 0, comps = 0;
    auto succ = [&](std::uint32_t s) {
      std::vector<std::uint32_t> out;
      for (std::uint32_t iid : derived_by[s])
        for (auto p : insts[iid].premisses) out.push_back(p);
      return out;
    };
    for (std::uint32_t start : reach) {
      if (num[start] != -1) continue;
      std::vector<std::pair<std::uint32_t, std::vector<std::uint32_t>>> frames;
      std::vector<std::size_t> pos;
      auto push = [&](std::uint32_t v) {
        num[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = 1;
        frames.emplace_back(v, succ(v));
        pos.push_back(0);
      };
      push(start);
      while (!frames.empty()) {
        auto& [v, ws] = frames.back();
        std::size_t& i = pos.back();
        if (i < ws.size()) {
          std::uint32_t w = ws[i++];
          if (num[w] == -1) {
            push(w);
          } else if (on_stack[w]) {
            low[v] = std::min(low[v], num[w]);
          }
          continue;
        }
        if (low[v] == num[v]) {
          for (;;) {
            std::uint32_t w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            comp_id[w] = comps;
            if (w == v) break;
          }
          ++comps;
        }
        std::uint32_t done = v;
        frames.pop_back();
        pos.pop_back();
        if (!frames.empty()) low[frames.back().first] = std::min(low[frames.back().first], low[done]);
      }
    }

    struct Edge {
      std::uint32_t inst;
      std::uint32_t j;
    };
    std::optional<std::vector<Edge>> best;
    std::size_t tried = 0;
    for (std::uint32_t c : reach) {
      for (std::uint32_t iid : derived_by[c]) {
        const Instance& in = insts[iid];
        for (std::uint32_t j = 0; j < in.premisses.size(); ++j) {
          std::uint32_t p = in.premisses[j];
          if (comp_id[p] != comp_id[c] || !positive_edge(in, j)) continue;
          if (best && best->size() == 1) break;
          if (++tried > 4000 && best) break;
          // Shortest path p ⇝ c inside the component.
          std::unordered_map<std::uint32_t, Edge> from;
          std::deque<std::uint32_t> q{p};
          from[p] = {kNoInst, 0};
          bool found = p == c;
          while (!q.empty() && !found) {
            std::uint32_t v = q.front();
            q.pop_front();
            for (std::uint32_t vi : derived_by[v]) {
              const Instance& vin = insts[vi];
              for (std::uint32_t vj = 0; vj < vin.premisses.size() && !found; ++vj) {
                std::uint32_t w = vin.premisses[vj];
                if (comp_id[w] != comp_id[c] || from.count(w)) continue;
                from[w] = {vi, vj};
                if (w == c) found = true;
                q.push_back(w);
              }
              if (found) break;
            }
          }
          if (!found) continue;
          std::vector<Edge> cycle;
          for (std::uint32_t v = c; v != p;) {
            Edge e = from[v];
            cycle.push_back(e);
            v = insts[e.inst].conclusion;
          }
          cycle.push_back({iid, j});
          std::reverse(cycle.begin(), cycle.end());
          if (!best || cycle.size() < best->size()) best = std::move(cycle);
        }
      }
    }
    if (!best) return std::nullopt;

    std::uint32_t c = insts[best->front().inst].conclusion;
    std::vector<Edge> chain;
    for (std::uint32_t v = c; v != root;) {
      auto [iid, j] = via[v];
      chain.push_back({iid, j});
      v = insts[iid].conclusion;
    }
    std::reverse(chain.begin(), chain.end());

    PumpWitness w;
    for (const Edge& e : chain) w.ancestor.push_back(e.j);
    w.descendant = w.ancestor;
    for (const Edge& e : *best) w.descendant.push_back(e.j);

    std::vector<Edge> all = chain;
    all.insert(all.end(), best->begin(), best->end());
    std::size_t pos_edge = chain.size();
    DerivationPtr cur = build_min(c);
    for (std::size_t e = all.size(); e-- > 0;) {
      const Instance& in = insts[all[e].inst];
      bool need_side = e == pos_edge && in.gain == 0;
      std::vector<DerivationPtr> prem;
      for (std::uint32_t i = 0; i < in.premisses.size(); ++i) {
        if (i == all[e].j) {
          prem.push_back(cur);
        } else if (need_side && canpos[in.premisses[i]]) {
          prem.push_back(build_pos(in.premisses[i]));
          need_side = false;
        } else {
          prem.push_back(build_min(in.premisses[i]));
        }
      }
      cur = make_node(in, std::move(prem));
    }
    w.derivation = cur;
    return w;
  }

  void max_values(std::uint32_t root, std::vector<std::uint64_t>& maxc, std::vector<std::uint32_t>& max_inst) const {
    std::vector<std::uint32_t> reach = reachable(root, nullptr);
    std::vector<char> in_reach(skels.size(), 0);
    for (auto s : reach) in_reach[s] = 1;
    std::vector<std::uint32_t> relevant;
    for (auto s : reach)
      for (auto iid : derived_by[s]) relevant.push_back(iid);
    std::sort(relevant.begin(), relevant.end());
    maxc.assign(skels.size(), 0);
    max_inst.assign(skels.size(), kNoInst);
    std::vector<char> known(skels.size(), 0);
    std::size_t rounds = 0;
    for (bool changed = true; changed;) {
      changed = false;
      if (++rounds > reach.size() + 2)
        throw std::logic_error("counters grow without bound; a pump exists");
      for (std::uint32_t iid : relevant) {
        const Instance& in = insts[iid];
        bool ready = true;
        std::uint64_t v = in.gain;
        for (auto p : in.premisses) {
          if (!known[p]) {
            ready = false;
            break;
          }
          v = sat_add(v, maxc[p]);
        }
        if (!ready) continue;
        std::uint32_t c = in.conclusion;
        if (!known[c] || v > maxc[c]) {
          known[c] = 1;
          maxc[c] = v;
          max_inst[c] = iid;
          changed = true;
        }
      }
    }
  }
};

Saturation::Saturation(const TermGraph& g, unsigned m, const EngineOptions& opts,
                       const std::vector<std::pair<Sort, FullType>>& seeds)
    : impl_(std::make_unique<Impl>(g, m, opts)) {
  impl_->saturate(seeds);
}

Saturation::~Saturation() = default;

unsigned Saturation::order() const { return impl_->m; }
const TermGraph& Saturation::graph() const { return impl_->g; }
std::size_t Saturation::size() const { return impl_->skels.size(); }
const Skeleton& Saturation::skeleton(std::uint32_t id) const { return impl_->skels.at(id); }

std::optional<std::uint32_t> Saturation::find(const Skeleton& s) const {
  auto it = impl_->index.find(SkelKey{s.subject.id, s.type.id(), s.env});
  if (it == impl_->index.end()) return std::nullopt;
  return it->second;
}

const std::vector<std::uint32_t>& Saturation::at(SubtermRef node) const { return impl_->by_node.at(node.id); }
const std::vector<Saturation::Instance>& Saturation::instances() const { return impl_->insts; }
bool Saturation::can_grow(std::uint32_t id) const { return impl_->canpos.at(id) != 0; }
EngineStats Saturation::stats() const { return impl_->stats; }
std::uint64_t Saturation::min_counter(std::uint32_t id) const { return impl_->minc.at(id); }
DerivationPtr Saturation::min_derivation(std::uint32_t id) const { return impl_->build_min(id); }

DerivationPtr Saturation::positive_derivation(std::uint32_t id) const {
  if (!impl_->canpos.at(id)) return nullptr;
  return impl_->build_pos(id);
}

std::optional<PumpWitness> Saturation::find_pump(std::uint32_t root) const { return impl_->find_pump(root); }

std::uint64_t Saturation::max_counter(std::uint32_t root) const {
  std::vector<std::uint64_t> maxc;
  std::vector<std::uint32_t> mi;
  impl_->max_values(root, maxc, mi);
  return maxc[root];
}

DerivationPtr Saturation::max_derivation(std::uint32_t root) const {
  std::vector<std::uint64_t> maxc;
  std::vector<std::uint32_t> mi;
  impl_->max_values(root, maxc, mi);
  std::unordered_map<std::uint32_t, DerivationPtr> memo;
  std::function<DerivationPtr(std::uint32_t)> build = [&](std::uint32_t s) -> DerivationPtr {
    auto it = memo.find(s);
    if (it != memo.end()) return it->second;
    const Instance& in = impl_->insts[mi[s]];
    std::vector<DerivationPtr> prem;
    for (auto p : in.premisses) prem.push_back(build(p));
    return memo[s] = impl_->make_node(in, std::move(prem));
  };
  return build(root);
}

std::vector<std::uint32_t> Saturation::zero_counter_violations() const {
  std::vector<std::uint32_t> out;
  unsigned m = impl_->m;
  if (m == 0) return out;
  for (std::uint32_t i = 0; i < impl_->skels.size(); ++i) {
    const Skeleton& s = impl_->skels[i];
    if (s.type.markers().contains(m - 1)) continue;
    if (impl_->g.order(s.subject) > m - 1) continue;
    if (impl_->canpos[i]) out.push_back(i);
  }
  return out;
}

DerivationPtr pump(const TermGraph& g, const PumpWitness& w, unsigned times) {
  if (w.descendant.size() <= w.ancestor.size() ||
      !std::equal(w.ancestor.begin(), w.ancestor.end(), w.descendant.begin()))
    throw std::invalid_argument("descendant must lie strictly below the ancestor");
  const Derivation& a = at_path(*w.derivation, w.ancestor);
  DerivationPath rel(w.descendant.begin() + static_cast<std::ptrdiff_t>(w.ancestor.size()), w.descendant.end());
  // Copy the ancestor node into a shared pointer without touching the tree.
  DerivationPtr section = w.ancestor.empty() ? w.derivation : std::make_shared<Derivation>(a);
  DerivationPtr cur = section;
  for (unsigned i = 0; i < times; ++i) cur = replace_at(g, section, rel, cur);
  return replace_at(g, w.derivation, w.ancestor, cur);
}

Verdict decide_finiteness(const TermGraph& g, const EngineOptions& opts) {
  if (!g.node(g.root()).sort.is_base()) throw std::invalid_argument("decide_finiteness needs a term of sort o");
  Verdict v;
  v.order = g.complexity();
  Saturation sat(g, v.order, opts);
  v.stats = sat.stats();
  auto root = sat.find(Skeleton{TypeEnv(), g.root(), rho_hat(v.order)});
  if (!root) {
    v.kind = Verdict::Kind::Finite;
    v.size_bound = 0;
    return v;
  }
  v.root_derivable = true;
  if (auto w = sat.find_pump(*root)) {
    v.kind = Verdict::Kind::Infinite;
    v.witness = std::move(w);
    return v;
  }
  v.kind = Verdict::Kind::Finite;
  v.max_counter = sat.max_counter(*root);
  v.size_bound = tower(v.order, *v.max_counter);
  return v;
}

DerivationPtr find_derivation(const TermGraph& g, SubtermRef subject, FullType target, std::uint64_t min_counter,
                              const EngineOptions& opts) {
  Sort s = g.node(subject).sort;
  if (!has_sort(target, s)) throw std::invalid_argument("target " + target.str() + " does not fit sort " + s.str());
  Saturation sat(g, target.order(), opts, {{s, target}});
  auto id = sat.find(Skeleton{TypeEnv(), subject, target});
  if (!id) return nullptr;
  if (sat.min_counter(*id) >= min_counter) return sat.min_derivation(*id);
  if (auto w = sat.find_pump(*id)) {
    DerivationPtr d = w->derivation;
    for (unsigned k = 1; d->conclusion.counter < min_counter; ++k) {
      if (k > min_counter + 1) throw std::logic_error("pump witness does not increase the counter");
      d = pump(g, *w, k);
    }
    return d;
  }
  if (sat.max_counter(*id) >= min_counter) return sat.max_derivation(*id);
  return nullptr;
}

}  // namespace lamfin
