#include "lamfin/term_graph.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>
#include <unordered_map>

namespace lamfin {

namespace {

constexpr std::uint32_t kNone = UINT32_MAX;

struct RawNode {
  NodeKind kind = NodeKind::Const;
  bool indirection = false;
  std::string name;
  std::string fix_name;
  Sort sort;
  std::vector<std::uint32_t> kids;
  std::uint32_t binder = kNone;
  std::uint32_t forward = kNone;
};

struct EnvEntry {
  bool fix;
  std::uint32_t node;
};

struct Builder {
  std::vector<RawNode> nodes;
  std::unordered_map<std::uint32_t, std::uint32_t> var_of_binder;
  std::unordered_map<Sort, std::uint32_t> zeta;

  std::uint32_t add(RawNode n) {
    nodes.push_back(std::move(n));
    return static_cast<std::uint32_t>(nodes.size() - 1);
  }

  std::uint32_t resolve(std::uint32_t id) const {
    std::uint32_t steps = 0;
    while (nodes[id].indirection && nodes[id].forward != kNone) {
      id = nodes[id].forward;
      if (++steps > nodes.size()) break;
    }
    return id;
  }

  std::uint32_t var_node(std::uint32_t binder) {
    auto it = var_of_binder.find(binder);
    if (it != var_of_binder.end()) return it->second;
    RawNode v;
    v.kind = NodeKind::Var;
    v.name = nodes[binder].name;
    v.sort = nodes[binder].sort.arg();
    v.binder = binder;
    std::uint32_t id = add(std::move(v));
    var_of_binder[binder] = id;
    return id;
  }

  // Z = λx.x (Z x) at sort (α→α)→α.
  std::uint32_t z_node(Sort alpha) {
    auto it = zeta.find(alpha);
    if (it != zeta.end()) return it->second;
    RawNode l;
    l.kind = NodeKind::Lam;
    l.name = "x";
    l.fix_name = "Z";
    l.sort = Sort::arrow(Sort::arrow(alpha, alpha), alpha);
    std::uint32_t lid = add(std::move(l));
    zeta[alpha] = lid;
    std::uint32_t x = var_node(lid);
    RawNode zx;
    zx.kind = NodeKind::App;
    zx.sort = alpha;
    zx.kids = {lid, x};
    std::uint32_t zxid = add(std::move(zx));
    RawNode body;
    body.kind = NodeKind::App;
    body.sort = alpha;
    body.kids = {x, zxid};
    std::uint32_t bid = add(std::move(body));
    nodes[lid].kids = {bid};
    return lid;
  }

  std::uint32_t build(const Term& t, std::vector<EnvEntry>& env) {
    switch (t.kind) {
      case TermKind::Var: {
        const EnvEntry& e = env[env.size() - 1 - t.index];
        return e.fix ? e.node : var_node(e.node);
      }
      case TermKind::Const: {
        std::vector<std::uint32_t> kids;
        for (const auto& k : t.kids) kids.push_back(build(*k, env));
        RawNode n;
        n.kind = NodeKind::Const;
        n.name = t.name;
        n.sort = t.sort;
        n.kids = std::move(kids);
        return add(std::move(n));
      }
      case TermKind::Lam: {
        RawNode n;
        n.kind = NodeKind::Lam;
        n.name = t.name;
        n.sort = t.sort;
        std::uint32_t id = add(std::move(n));
        env.push_back({false, id});
        std::uint32_t body = build(*t.kids[0], env);
        env.pop_back();
        nodes[id].kids = {body};
        return id;
      }
      case TermKind::Y:
        return z_node(t.sort.result());
      case TermKind::App: {
        const Term& fn = *t.kids[0];
        const Term& arg = *t.kids[1];
        if (fn.kind == TermKind::Y && arg.kind == TermKind::Lam) {
          RawNode ind;
          ind.indirection = true;
          ind.sort = t.sort;
          std::uint32_t x = add(std::move(ind));
          env.push_back({true, x});
          std::uint32_t body = build(*arg.kids[0], env);
          env.pop_back();
          if (resolve(body) == x) {
            // Y (λs.s) and friends have no guarded unfolding; fall back to Z.
            std::uint32_t z = z_node(t.sort);
            std::uint32_t lam = build(arg, env);
            RawNode app;
            app.kind = NodeKind::App;
            app.sort = t.sort;
            app.kids = {z, lam};
            nodes[x].forward = add(std::move(app));
          } else {
            nodes[x].forward = body;
            std::uint32_t target = resolve(body);
            if (target != x && nodes[target].fix_name.empty() && !nodes[target].indirection &&
                nodes[target].kind != NodeKind::Var)
              nodes[target].fix_name = arg.name;
          }
          return x;
        }
        std::uint32_t f = build(fn, env);
        std::uint32_t a = build(arg, env);
        RawNode n;
        n.kind = NodeKind::App;
        n.sort = t.sort;
        n.kids = {f, a};
        return add(std::move(n));
      }
    }
    throw std::logic_error("unreachable");
  }
};

}  // namespace

TermGraph TermGraph::unfold(const Term& t) {
  Builder b;
  std::vector<EnvEntry> env;
  std::uint32_t root = b.build(t, env);
  for (auto& n : b.nodes) {
    for (auto& k : n.kids) k = b.resolve(k);
    if (n.binder != kNone) n.binder = b.resolve(n.binder);
  }
  root = b.resolve(root);

  // Reachable nodes.
  std::vector<std::uint32_t> order;
  std::vector<char> seen(b.nodes.size(), 0);
  std::deque<std::uint32_t> queue{root};
  seen[root] = 1;
  while (!queue.empty()) {
    std::uint32_t id = queue.front();
    queue.pop_front();
    order.push_back(id);
    for (std::uint32_t k : b.nodes[id].kids)
      if (!seen[k]) {
        seen[k] = 1;
        queue.push_back(k);
      }
  }

  // Partition refinement.
  std::unordered_map<std::uint32_t, std::uint32_t> cls;
  {
    std::map<std::tuple<int, std::string, std::size_t, std::size_t>, std::uint32_t> init;
    for (std::uint32_t id : order) {
      const RawNode& n = b.nodes[id];
      auto key = std::make_tuple(static_cast<int>(n.kind), n.kind == NodeKind::Const ? n.name : std::string(),
                                 n.sort.hash(), n.kids.size());
      auto [it, fresh] = init.emplace(key, static_cast<std::uint32_t>(init.size()));
      (void)fresh;
      cls[id] = it->second;
    }
  }
  std::size_t classes = 0;
  for (;;) {
    std::map<std::vector<std::uint32_t>, std::uint32_t> sig;
    std::unordered_map<std::uint32_t, std::uint32_t> next;
    for (std::uint32_t id : order) {
      const RawNode& n = b.nodes[id];
      std::vector<std::uint32_t> key{cls[id]};
      for (std::uint32_t k : n.kids) key.push_back(cls[k]);
      if (n.kind == NodeKind::Var) key.push_back(cls[n.binder]);
      auto [it, fresh] = sig.emplace(std::move(key), static_cast<std::uint32_t>(sig.size()));
      (void)fresh;
      next[id] = it->second;
    }
    cls.swap(next);
    if (sig.size() == classes) break;
    classes = sig.size();
  }

  // Canonical numbering: breadth-first over classes from the root.
  std::unordered_map<std::uint32_t, std::uint32_t> canon;
  std::unordered_map<std::uint32_t, std::uint32_t> rep;
  std::unordered_map<std::uint32_t, std::string> fix_of_class;
  for (std::uint32_t id : order) {
    rep.emplace(cls[id], id);
    const std::string& f = b.nodes[id].fix_name;
    if (!f.empty()) {
      auto& cur = fix_of_class[cls[id]];
      if (cur.empty() || f < cur) cur = f;
    }
  }
  std::vector<std::uint32_t> reps;
  queue = {root};
  canon[cls[root]] = 0;
  reps.push_back(root);
  while (!queue.empty()) {
    std::uint32_t id = queue.front();
    queue.pop_front();
    for (std::uint32_t k : b.nodes[id].kids) {
      std::uint32_t c = cls[k];
      if (!canon.count(c)) {
        canon[c] = static_cast<std::uint32_t>(reps.size());
        reps.push_back(rep[c]);
        queue.push_back(rep[c]);
      }
    }
  }

  TermGraph g;
  for (std::uint32_t id : reps) {
    const RawNode& n = b.nodes[id];
    GraphNode out;
    out.kind = n.kind;
    out.name = n.name;
    out.fix_name = fix_of_class[cls[id]];
    out.sort = n.sort;
    for (std::uint32_t k : n.kids) out.kids.push_back(SubtermRef{canon.at(cls[k])});
    if (n.kind == NodeKind::Var) out.binder = SubtermRef{canon.at(cls[n.binder])};
    g.nodes_.push_back(std::move(out));
  }
  return g;
}

unsigned TermGraph::complexity() const {
  unsigned m = 0;
  for (const auto& n : nodes_) m = std::max(m, n.sort.order());
  return m;
}

std::vector<SubtermRef> TermGraph::closure() const {
  std::vector<SubtermRef> out;
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) out.push_back(SubtermRef{i});
  return out;
}

std::vector<SubtermRef> TermGraph::closure(SubtermRef from) const {
  std::vector<char> seen(nodes_.size(), 0);
  std::vector<SubtermRef> out{from};
  seen[from.id] = 1;
  for (std::size_t i = 0; i < out.size(); ++i)
    for (SubtermRef k : node(out[i]).kids)
      if (!seen[k.id]) {
        seen[k.id] = 1;
        out.push_back(k);
      }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

struct GraphPrinter {
  const TermGraph& g;
  std::vector<char> on_path;
  std::ostringstream os;
  int budget = 2000;

  bool simple(SubtermRef r, bool top) const {
    const GraphNode& n = g.node(r);
    if (!top && !n.fix_name.empty()) return true;
    return n.kind == NodeKind::Var || (n.kind == NodeKind::Const && n.kids.empty());
  }

  void atom(SubtermRef r) {
    if (simple(r, false)) {
      print(r, false);
    } else {
      os << '(';
      print(r, false);
      os << ')';
    }
  }

  void print(SubtermRef r, bool top) {
    const GraphNode& n = g.node(r);
    if (--budget < 0) {
      os << "...";
      return;
    }
    if (!top && !n.fix_name.empty()) {
      os << n.fix_name;
      return;
    }
    if (on_path[r.id]) {
      os << '#' << r.id;
      return;
    }
    on_path[r.id] = 1;
    switch (n.kind) {
      case NodeKind::Var:
        os << n.name;
        break;
      case NodeKind::Const:
        os << n.name;
        for (SubtermRef k : n.kids) {
          os << ' ';
          atom(k);
        }
        break;
      case NodeKind::Lam:
        os << '\\' << n.name << ". ";
        print(n.kids[0], false);
        break;
      case NodeKind::App: {
        std::vector<SubtermRef> args;
        SubtermRef h = r;
        while (g.node(h).kind == NodeKind::App && (h == r || g.node(h).fix_name.empty())) {
          args.push_back(g.node(h).kids[1]);
          h = g.node(h).kids[0];
        }
        atom(h);
        for (auto it = args.rbegin(); it != args.rend(); ++it) {
          os << ' ';
          atom(*it);
        }
        break;
      }
    }
    on_path[r.id] = 0;
  }
};

}  // namespace

std::string TermGraph::print(SubtermRef r) const {
  GraphPrinter p{*this, std::vector<char>(nodes_.size(), 0), {}};
  p.print(r, true);
  return p.os.str();
}

std::optional<SubtermRef> TermGraph::find(std::string_view printed) const {
  for (std::uint32_t i = 0; i < nodes_.size(); ++i)
    if (print(SubtermRef{i}) == printed) return SubtermRef{i};
  return std::nullopt;
}

std::vector<SubtermRef> subterm_closure(const Term& t) { return TermGraph::unfold(t).closure(); }

unsigned complexity(const Term& t) { return TermGraph::unfold(t).complexity(); }

}  // namespace lamfin
