#include "lamfin/derivation.hpp"

#include <algorithm>
#include <unordered_map>

namespace lamfin {

const char* to_string(Rule r) {
  switch (r) {
    case Rule::Br: return "Br";
    case Rule::Var: return "Var";
    case Rule::Lam: return "Lam";
    case Rule::Con: return "Con";
    case Rule::App: return "App";
  }
  return "?";
}

const char* to_string(RuleError e) {
  switch (e) {
    case RuleError::SubjectMismatch: return "SubjectMismatch";
    case RuleError::MarkerBelowBinderOrder: return "MarkerBelowBinderOrder";
    case RuleError::SplitViolation: return "SplitViolation";
    case RuleError::FlagOrTypeMismatch: return "FlagOrTypeMismatch";
    case RuleError::BinderLeak: return "BinderLeak";
    case RuleError::BrNotAllowed: return "BrNotAllowed";
    case RuleError::MarkerCollision: return "MarkerCollision";
    case RuleError::MarkerAtInnerNode: return "MarkerAtInnerNode";
    case RuleError::ArgSetMismatch: return "ArgSetMismatch";
    case RuleError::OrderExceeded: return "OrderExceeded";
    case RuleError::CounterMismatch: return "CounterMismatch";
    case RuleError::ConclusionMismatch: return "ConclusionMismatch";
    case RuleError::Malformed: return "Malformed";
  }
  return "?";
}

namespace {

[[noreturn]] void fail(RuleError code, const std::string& msg) { throw DerivationError(code, msg); }

void check_split(const TypeEnv& env, const std::vector<TypeEnv>& parts) {
  if (!split(env, parts)) fail(RuleError::SplitViolation, "environment does not split into the premisses");
}

std::vector<std::pair<unsigned, std::uint64_t>> flag_list(const CompResult& r, bool con, unsigned m) {
  std::vector<std::pair<unsigned, std::uint64_t>> out;
  if (con) out.emplace_back(0, 1);  // F'={0}, or c'=1 when m=0
  for (unsigned n = 1; n <= m; ++n)
    if (r.placed[n] > 0) out.emplace_back(n, r.placed[n]);
  return out;
}

}  // namespace

std::uint64_t node_count(const Derivation& d) {
  std::uint64_t n = 1;
  for (const auto& p : d.premisses) n += node_count(*p);
  return n;
}

DerivationPtr apply_br(const TermGraph& g, DerivationPtr premiss, unsigned which, SubtermRef subject) {
  const GraphNode& n = g.node(subject);
  if (n.kind != NodeKind::Const || n.name != kBr) fail(RuleError::SubjectMismatch, "subject is not br P1 P2");
  if (which != 1 && which != 2) fail(RuleError::SubjectMismatch, "branch must be 1 or 2");
  if (premiss->conclusion.subject != n.kids[which - 1])
    fail(RuleError::SubjectMismatch, "premiss is not about the chosen branch");
  auto d = std::make_shared<Derivation>(Derivation{premiss->conclusion, Rule::Br, {premiss}, {}, {}, which, {}});
  d->conclusion.subject = subject;
  return d;
}

DerivationPtr apply_var(const TermGraph& g, const TypeEnv& env, SubtermRef x, FullType env_type,
                        FullType requested) {
  const GraphNode& n = g.node(x);
  if (n.kind != NodeKind::Var) fail(RuleError::SubjectMismatch, "subject is not a variable");
  unsigned k = g.order(n.binder);
  if (env_type.order() != k)
    fail(RuleError::FlagOrTypeMismatch, "environment type has order " + std::to_string(env_type.order()) +
                                            ", binder order is " + std::to_string(k));
  if (!has_sort(env_type, n.sort) || !has_sort(requested, n.sort))
    fail(RuleError::FlagOrTypeMismatch, "type does not match the variable's sort");
  if (env_type.flags() != requested.flags() || env_type.itype() != requested.itype())
    fail(RuleError::FlagOrTypeMismatch, "flags or type differ from the environment");
  if (requested.markers().below(k) != env_type.markers())
    fail(RuleError::MarkerBelowBinderOrder, "marker orders below " + std::to_string(k) + " differ");
  check_split(env, {TypeEnv::single(n.binder, env_type)});
  Derivation d{Judgment{env, x, requested, 0}, Rule::Var, {}, {}, requested.markers().atleast(k), 0, env_type};
  return std::make_shared<Derivation>(std::move(d));
}

DerivationPtr apply_lambda(const TermGraph& g, DerivationPtr premiss, SubtermRef lambda,
                           std::vector<FullType> arg_set, const TypeEnv& env) {
  const GraphNode& n = g.node(lambda);
  if (n.kind != NodeKind::Lam) fail(RuleError::SubjectMismatch, "subject is not an abstraction");
  if (premiss->conclusion.subject != n.kids[0]) fail(RuleError::SubjectMismatch, "premiss is not about the body");
  canonicalize(arg_set);
  unsigned k = n.sort.order();
  for (FullType t : arg_set)
    if (t.order() != k || !has_sort(t, n.sort.arg()))
      fail(RuleError::FlagOrTypeMismatch, "argument type " + t.str() + " does not fit the binder");
  const TypeEnv& pe = premiss->conclusion.env;
  if (pe.at(lambda) != arg_set) fail(RuleError::ArgSetMismatch, "premiss binds the variable to a different set");
  if (!env.at(lambda).empty()) fail(RuleError::BinderLeak, "conclusion environment binds the abstracted variable");
  check_split(env, {pe.without(lambda)});
  const FullType& body = premiss->conclusion.type;
  OrderSet provided;
  for (FullType t : arg_set) provided = provided | t.markers();
  FullType t = FullType::make(body.order(), body.flags(), body.markers() - provided,
                              IType::arrow(arg_set, body.itype()));
  Derivation d{Judgment{env, lambda, t, premiss->conclusion.counter}, Rule::Lam, {premiss}, {}, {}, 0, {}};
  return std::make_shared<Derivation>(std::move(d));
}

DerivationPtr apply_con(const TermGraph& g, SubtermRef subject, std::vector<DerivationPtr> premisses,
                        OrderSet marker_choice, const TypeEnv& env, unsigned m) {
  const GraphNode& n = g.node(subject);
  if (n.kind != NodeKind::Const) fail(RuleError::SubjectMismatch, "subject is not a constant");
  if (n.name == kBr) fail(RuleError::BrNotAllowed, "br is typed by the Br rule");
  if (premisses.size() != n.kids.size()) fail(RuleError::SubjectMismatch, "one premiss per argument required");
  if (!n.kids.empty() && !marker_choice.empty())
    fail(RuleError::MarkerAtInnerNode, "markers may only be placed at leaves");
  if (!marker_choice.subset_of(OrderSet::range(m)))
    fail(RuleError::FlagOrTypeMismatch, "marker order not below m");
  OrderSet markers = marker_choice;
  std::vector<CompInput> inputs;
  inputs.push_back(m == 0 ? CompInput{OrderSet(), 1} : CompInput{OrderSet{0}, 0});
  std::vector<TypeEnv> envs;
  for (size_t i = 0; i < premisses.size(); ++i) {
    const Judgment& j = premisses[i]->conclusion;
    if (j.subject != n.kids[i]) fail(RuleError::SubjectMismatch, "premiss " + std::to_string(i) + " subject");
    if (j.type.order() != m || !j.type.itype().is_base())
      fail(RuleError::FlagOrTypeMismatch, "premiss must have type (m,F,M,o)");
    if (!markers.disjoint(j.type.markers())) fail(RuleError::MarkerCollision, "marker sets overlap");
    markers = markers | j.type.markers();
    inputs.push_back({j.type.flags(), j.counter});
    envs.push_back(j.env);
  }
  check_split(env, envs);
  CompResult r = comp(m, markers, inputs);
  FullType t = FullType::make(m, r.flags, markers, IType::base());
  Derivation d{Judgment{env, subject, t, r.counter}, Rule::Con, std::move(premisses),
               flag_list(r, true, m), marker_choice, 0, {}};
  return std::make_shared<Derivation>(std::move(d));
}

DerivationPtr apply_app(const TermGraph& g, SubtermRef subject, DerivationPtr op,
                        std::vector<DerivationPtr> args, const TypeEnv& env) {
  const GraphNode& n = g.node(subject);
  if (n.kind != NodeKind::App) fail(RuleError::SubjectMismatch, "subject is not an application");
  const Judgment& oj = op->conclusion;
  if (oj.subject != n.kids[0]) fail(RuleError::SubjectMismatch, "operator premiss subject");
  if (oj.type.itype().is_base()) fail(RuleError::FlagOrTypeMismatch, "operator type is not an arrow");
  unsigned m = oj.type.order();
  unsigned k = g.order(n.kids[0]);
  if (k > m) fail(RuleError::OrderExceeded, "ord(P) > m");
  OrderSet markers = oj.type.markers();
  std::vector<CompInput> inputs{{oj.type.flags(), oj.counter}};
  std::vector<TypeEnv> envs{oj.env};
  std::vector<FullType> restricted;
  for (const auto& a : args) {
    const Judgment& j = a->conclusion;
    if (j.subject != n.kids[1]) fail(RuleError::SubjectMismatch, "argument premiss subject");
    if (j.type.order() != m) fail(RuleError::FlagOrTypeMismatch, "argument premiss must have order m");
    if (!markers.disjoint(j.type.markers())) fail(RuleError::MarkerCollision, "marker sets overlap");
    markers = markers | j.type.markers();
    restricted.push_back(FullType::make(k, j.type.flags().below(k), j.type.markers().below(k), j.type.itype()));
    inputs.push_back({j.type.flags().atleast(k), j.counter});
    envs.push_back(j.env);
  }
  canonicalize(restricted);
  if (restricted != oj.type.itype().args())
    fail(RuleError::ArgSetMismatch, "argument types do not match the operator's argument set");
  check_split(env, envs);
  CompResult r = comp(m, markers, inputs);
  FullType t = FullType::make(m, r.flags, markers, oj.type.itype().result());
  std::vector<DerivationPtr> prem{op};
  for (auto& a : args) prem.push_back(a);
  Derivation d{Judgment{env, subject, t, r.counter}, Rule::App, std::move(prem), flag_list(r, false, m), {}, 0, {}};
  return std::make_shared<Derivation>(std::move(d));
}

DerivationPtr rebuild(const TermGraph& g, const Derivation& d, std::vector<DerivationPtr> premisses) {
  const Judgment& c = d.conclusion;
  switch (d.rule) {
    case Rule::Br:
      if (premisses.size() != 1) fail(RuleError::Malformed, "Br needs one premiss");
      return apply_br(g, premisses[0], d.branch, c.subject);
    case Rule::Var:
      if (!premisses.empty()) fail(RuleError::Malformed, "Var has no premisses");
      if (!d.env_type) fail(RuleError::Malformed, "Var node lacks its environment type");
      return apply_var(g, c.env, c.subject, *d.env_type, c.type);
    case Rule::Lam:
      if (premisses.size() != 1) fail(RuleError::Malformed, "Lam needs one premiss");
      if (c.type.itype().is_base()) fail(RuleError::FlagOrTypeMismatch, "abstraction typed with o");
      return apply_lambda(g, premisses[0], c.subject, c.type.itype().args(), c.env);
    case Rule::Con:
      return apply_con(g, c.subject, std::move(premisses), d.placed_markers, c.env, c.type.order());
    case Rule::App: {
      if (premisses.empty()) fail(RuleError::Malformed, "App needs an operator premiss");
      DerivationPtr op = premisses[0];
      premisses.erase(premisses.begin());
      return apply_app(g, c.subject, op, std::move(premisses), c.env);
    }
  }
  fail(RuleError::Malformed, "unknown rule");
}

const Derivation& at_path(const Derivation& d, const DerivationPath& path) {
  const Derivation* cur = &d;
  for (std::size_t i : path) {
    if (i >= cur->premisses.size()) throw std::out_of_range("derivation path");
    cur = cur->premisses[i].get();
  }
  return *cur;
}

namespace {

DerivationPtr replace_rec(const TermGraph& g, const DerivationPtr& d, const DerivationPath& path, size_t depth,
                          const DerivationPtr& repl) {
  if (depth == path.size()) return repl;
  std::vector<DerivationPtr> prem = d->premisses;
  prem.at(path[depth]) = replace_rec(g, prem[path[depth]], path, depth + 1, repl);
  return rebuild(g, *d, std::move(prem));
}

}  // namespace

DerivationPtr replace_at(const TermGraph& g, const DerivationPtr& d, const DerivationPath& path,
                         DerivationPtr replacement) {
  return replace_rec(g, d, path, 0, replacement);
}

namespace {

struct Validator {
  const TermGraph& g;
  // Markers placed in a validated subtree, keyed by node address.
  std::unordered_map<const Derivation*, OrderSet> placed;
  ValidationReport report;

  bool fail_at(const DerivationPath& path, RuleError code, const std::string& msg) {
    report.ok = false;
    report.code = code;
    report.where = path;
    report.message = msg;
    return false;
  }

  bool visit(const Derivation& d, DerivationPath& path) {
    if (placed.count(&d)) return true;
    OrderSet below;
    for (std::size_t i = 0; i < d.premisses.size(); ++i) {
      path.push_back(i);
      if (!visit(*d.premisses[i], path)) return false;
      path.pop_back();
      OrderSet p = placed.at(d.premisses[i].get());
      if (!below.disjoint(p))
        return fail_at(path, RuleError::MarkerCollision, "two nodes place a marker of the same order");
      below = below | p;
    }
    if (!below.disjoint(d.placed_markers))
      return fail_at(path, RuleError::MarkerCollision, "two nodes place a marker of the same order");
    if (d.conclusion.subject.id >= g.size()) return fail_at(path, RuleError::Malformed, "subject outside the graph");
    DerivationPtr again;
    try {
      again = rebuild(g, d, d.premisses);
    } catch (const DerivationError& e) {
      return fail_at(path, e.code, e.what());
    } catch (const std::exception& e) {
      return fail_at(path, RuleError::Malformed, e.what());
    }
    const Judgment& a = again->conclusion;
    const Judgment& c = d.conclusion;
    if (a.subject != c.subject || a.env != c.env || a.type != c.type) {
      RuleError code = d.rule == Rule::Br ? RuleError::SubjectMismatch : RuleError::ConclusionMismatch;
      return fail_at(path, code, "conclusion should be " + a.type.str());
    }
    if (a.counter != c.counter)
      return fail_at(path, RuleError::CounterMismatch,
                     "counter " + std::to_string(c.counter) + ", recomputed " + std::to_string(a.counter));
    if (again->placed_flags != d.placed_flags || again->placed_markers != d.placed_markers)
      return fail_at(path, RuleError::ConclusionMismatch, "placement annotations disagree with the rule");
    placed[&d] = below | d.placed_markers;
    return true;
  }
};

}  // namespace

ValidationReport validate(const TermGraph& g, const Derivation& d) {
  Validator v{g, {}, {}};
  DerivationPath path;
  v.visit(d, path);
  return v.report;
}

}  // namespace lamfin
