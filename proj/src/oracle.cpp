#include "lamfin/oracle.hpp"

#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <tuple>
#include <unordered_map>

#include "sexpr.hpp"

namespace lamfin {

namespace {

// Krivine machine over the finite term: closures pair a term with an
// environment of closures, Y M steps to M (Y M).
struct Env;
using EnvPtr = std::shared_ptr<const Env>;

struct Closure {
  TermPtr term;
  EnvPtr env;
};

struct Env {
  Closure head;
  EnvPtr tail;
};

// Hash-conses environments so that structurally equal closures share one
// pointer; the enumerator keys its memo and cycle check on those pointers.
class Interner {
public:
  EnvPtr bind(Closure head, const EnvPtr& tail) {
    // A variable closure is an indirection; store what it points to.
    while (head.term->kind == TermKind::Var) {
      const Env* e = head.env.get();
      for (unsigned i = 0; i < head.term->index; ++i) e = e->tail.get();
      head = e->head;
    }
    auto key = std::make_tuple(head.term.get(), head.env.get(), tail.get());
    auto it = envs_.find(key);
    if (it != envs_.end()) return it->second;
    auto e = std::make_shared<const Env>(Env{head, tail});
    envs_.emplace(key, e);
    return e;
  }

  // The term Y m, applied to the environment [M].
  const TermPtr& y_again(const TermPtr& y) {
    auto it = again_.find(y.get());
    if (it != again_.end()) return it->second;
    Sort alpha = y->sort.result();
    return again_[y.get()] = mk_app(y, mk_var("m", 0, Sort::arrow(alpha, alpha)));
  }

private:
  std::map<std::tuple<const Term*, const Env*, const Env*>, EnvPtr> envs_;
  std::unordered_map<const Term*, TermPtr> again_;
};

struct HeadForm {
  bool diverged = false;
  std::string symbol;
  std::vector<Closure> args;
};

HeadForm head_normalize(Closure c, std::uint64_t fuel, Interner& in) {
  std::vector<Closure> stack;
  for (std::uint64_t step = 0;; ++step) {
    if (step > fuel) return HeadForm{true, {}, {}};
    const Term& t = *c.term;
    switch (t.kind) {
      case TermKind::App:
        stack.push_back(Closure{t.kids[1], c.env});
        c = Closure{t.kids[0], c.env};
        break;
      case TermKind::Lam: {
        if (stack.empty()) throw ReductionError("abstraction in head position at sort o");
        Closure arg = std::move(stack.back());
        stack.pop_back();
        c = Closure{t.kids[0], in.bind(arg, c.env)};
        break;
      }
      case TermKind::Var: {
        const Env* e = c.env.get();
        for (unsigned i = 0; i < t.index; ++i) e = e->tail.get();
        c = e->head;
        break;
      }
      case TermKind::Y: {
        if (stack.empty()) throw ReductionError("unapplied Y in head position");
        Closure m = std::move(stack.back());
        stack.pop_back();
        stack.push_back(Closure{in.y_again(c.term), in.bind(m, nullptr)});
        c = std::move(m);
        break;
      }
      case TermKind::Const: {
        if (!stack.empty()) throw ReductionError("constant applied to extra arguments");
        HeadForm h{false, t.name, {}};
        for (const auto& k : t.kids) h.args.push_back(Closure{k, c.env});
        return h;
      }
    }
  }
}

PartialTree expand(const Closure& c, unsigned depth, const Fuel& fuel, Interner& in) {
  if (depth == 0) return PartialTree{PartialTree::Kind::Unexpanded, "?", {}};
  HeadForm h = head_normalize(c, fuel.steps, in);
  if (h.diverged) return PartialTree{PartialTree::Kind::Diverged, "_|_", {}};
  PartialTree out{PartialTree::Kind::Node, h.symbol, {}};
  for (const auto& a : h.args) out.kids.push_back(expand(a, depth - 1, fuel, in));
  return out;
}

// Budget-bounded enumeration.  br steps keep the budget, so the trees of a
// closure are those of the non-br head forms reachable from it through br
// steps alone; that set is finite up to interning and is searched with a
// visited set, which makes br cycles harmless.  Head forms and results are
// memoized on interned closures.
struct Enumerator {
  using Node = std::pair<const Term*, const Env*>;
  using Key = std::tuple<const Term*, const Env*, std::size_t>;

  Fuel fuel;
  bool complete = true;
  Interner in;
  std::map<Node, HeadForm> heads;
  std::map<Key, std::set<FiniteTree>> memo;

  const HeadForm& head(const Closure& c) {
    Node n{c.term.get(), c.env.get()};
    auto it = heads.find(n);
    if (it == heads.end()) it = heads.emplace(n, head_normalize(c, fuel.steps, in)).first;
    return it->second;
  }

  std::set<FiniteTree> gen(const Closure& c, std::size_t budget, unsigned depth) {
    if (budget == 0) return {};
    Key key{c.term.get(), c.env.get(), budget};
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::set<FiniteTree> out;
    std::set<Node> seen{{c.term.get(), c.env.get()}};
    std::vector<std::pair<Closure, unsigned>> todo{{c, depth}};
    while (!todo.empty()) {
      auto [cur, d] = todo.back();
      todo.pop_back();
      if (d >= fuel.depth) {
        complete = false;
        continue;
      }
      const HeadForm& h = head(cur);
      if (h.diverged) {
        complete = false;
        continue;
      }
      if (h.symbol == kBr) {
        for (const Closure& a : h.args)
          if (seen.insert({a.term.get(), a.env.get()}).second) todo.push_back({a, d + 1});
        continue;
      }
      out.merge(build(h, budget, d));
    }
    memo.emplace(key, out);
    return out;
  }

  std::set<FiniteTree> build(const HeadForm& h, std::size_t budget, unsigned depth) {
    std::size_t r = h.args.size();
    if (budget < 1 + r) return {};
    // Every other argument needs at least one node.
    std::size_t each = budget - 1 - (r == 0 ? 0 : r - 1);
    std::vector<std::vector<FiniteTree>> options;
    for (const auto& a : h.args) {
      auto s = gen(a, each, depth + 1);
      if (s.empty()) return {};
      options.emplace_back(s.begin(), s.end());
    }
    std::set<FiniteTree> out;
    FiniteTree cur{h.symbol, {}};
    std::function<void(std::size_t, std::size_t)> combine = [&](std::size_t i, std::size_t used) {
      if (i == r) {
        out.insert(cur);
        return;
      }
      for (const FiniteTree& t : options[i]) {
        std::size_t n = t.size();
        if (used + n + (r - i - 1) > budget) continue;
        cur.kids.push_back(t);
        combine(i + 1, used + n);
        cur.kids.pop_back();
      }
    };
    combine(0, 1);
    return out;
  }
};

struct Replayer {
  Fuel fuel;
  Interner in;
  // (closure, subtree) pairs on the current br path.
  std::set<std::tuple<const Term*, const Env*, const FiniteTree*>> open;

  bool run(const Closure& c, const FiniteTree& t, unsigned depth) {
    if (depth >= fuel.depth) return false;
    auto key = std::make_tuple(c.term.get(), c.env.get(), &t);
    if (!open.insert(key).second) return false;
    bool ok = match(c, t, depth);
    open.erase(key);
    return ok;
  }

  bool match(const Closure& c, const FiniteTree& t, unsigned depth) {
    HeadForm h = head_normalize(c, fuel.steps, in);
    if (h.diverged) return false;
    if (h.symbol == kBr) return run(h.args[0], t, depth + 1) || run(h.args[1], t, depth + 1);
    if (h.symbol != t.label || h.args.size() != t.kids.size()) return false;
    for (std::size_t i = 0; i < t.kids.size(); ++i)
      if (!run(h.args[i], t.kids[i], depth + 1)) return false;
    return true;
  }
};

FiniteTree tree_from(const detail::SExpr& e) {
  if (!e.is_list || e.list.empty() || e.list[0].is_list)
    throw ParseError(e.pos, "expected (symbol subtree...)");
  FiniteTree t{e.list[0].atom, {}};
  for (std::size_t i = 1; i < e.list.size(); ++i) t.kids.push_back(tree_from(e.list[i]));
  return t;
}

void check_closed(const TermPtr& p) {
  if (!p->sort.is_base()) throw std::invalid_argument("the oracle needs a term of sort o");
}

}  // namespace

std::string PartialTree::str() const {
  if (kind != Kind::Node) return label;
  std::string s = "(" + label;
  for (const auto& k : kids) s += " " + k.str();
  return s + ")";
}

std::size_t FiniteTree::size() const {
  std::size_t n = 1;
  for (const auto& k : kids) n += k.size();
  return n;
}

std::string FiniteTree::str() const {
  std::string s = "(" + label;
  for (const auto& k : kids) s += " " + k.str();
  return s + ")";
}

FiniteTree parse_finite_tree(const std::string& text) { return tree_from(detail::read_sexpr(text)); }

PartialTree bohm_expand(const TermPtr& p, const Fuel& fuel) {
  check_closed(p);
  Interner in;
  return expand(Closure{p, nullptr}, fuel.depth, fuel, in);
}

Language language_upto(const TermPtr& p, std::size_t max_size, const Fuel& fuel) {
  check_closed(p);
  Enumerator e;
  e.fuel = fuel;
  Language out;
  out.trees = e.gen(Closure{p, nullptr}, max_size, 0);
  out.complete = e.complete;
  return out;
}

bool replays(const TermPtr& p, const FiniteTree& t, const Fuel& fuel) {
  check_closed(p);
  Replayer r{fuel, {}, {}};
  return r.run(Closure{p, nullptr}, t, 0);
}

std::vector<GrowthStep> default_schedule() {
  return {{4, Fuel{}}, {10, Fuel{}}, {20, Fuel{}}};
}

GrowthReport growth_report(const TermPtr& p, const std::vector<GrowthStep>& schedule) {
  GrowthReport r{{}, true};
  for (const GrowthStep& s : schedule) {
    Language l = language_upto(p, s.max_size, s.fuel);
    std::size_t largest = 0;
    for (const auto& t : l.trees) largest = std::max(largest, t.size());
    if (!r.rows.empty() && largest <= r.rows.back().largest) r.strictly_increasing = false;
    r.rows.push_back({s.max_size, l.trees.size(), largest, l.complete});
  }
  return r;
}

std::string growth_report_jsonl(const GrowthReport& r) {
  std::string out;
  for (const GrowthRow& row : r.rows)
    out += nlohmann::json{{"max_size", row.max_size},
                          {"found", row.found},
                          {"largest", row.largest},
                          {"complete", row.complete}}
               .dump() +
           "\n";
  out += nlohmann::json{{"strictly_increasing", r.strictly_increasing}}.dump() + "\n";
  return out;
}

}  // namespace lamfin
