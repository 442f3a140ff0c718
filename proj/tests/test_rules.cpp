#include "doctest.h"
#include "examples.hpp"

using namespace lamfin;
using testing::ft;

namespace {

RuleError code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const DerivationError& e) {
    return e.code;
  }
  FAIL("no derivation error");
  return RuleError::Malformed;
}

struct Identity {
  Alphabet sigma = testing::abe();
  TermGraph g = TermGraph::unfold(*parse_term("\\x:o. x", sigma));
  SubtermRef lam = g.root();
  SubtermRef x = g.node(lam).kids[0];
};

struct AX {
  Alphabet sigma = testing::abe();
  TermGraph g = TermGraph::unfold(*parse_term("\\x:o. a x", sigma));
  SubtermRef lam = g.root();
  SubtermRef ax = g.node(lam).kids[0];
  SubtermRef x = g.node(ax).kids[0];
  TypeEnv env = TypeEnv::single(lam, testing::rho1());
};

}  // namespace

TEST_CASE("Var places markers of orders at least the binder order") {
  AX t;
  auto left = apply_var(t.g, t.env, t.x, testing::rho1(), ft("(2,{},{0},o)"));
  CHECK(left->conclusion.counter == 0);
  CHECK(left->placed_markers.empty());
  auto right = apply_var(t.g, t.env, t.x, testing::rho1(), ft("(2,{},{0,1},o)"));
  CHECK(right->conclusion.counter == 0);
  CHECK(right->placed_markers == OrderSet{1});

  TypeEnv bare = TypeEnv::single(t.lam, ft("(1,{},{},o)"));
  CHECK(code_of([&] { apply_var(t.g, bare, t.x, ft("(1,{},{},o)"), ft("(2,{},{0,1},o)")); }) ==
        RuleError::MarkerBelowBinderOrder);
  CHECK(code_of([&] { apply_var(t.g, TypeEnv(), t.x, testing::rho1(), ft("(2,{},{0},o)")); }) ==
        RuleError::SplitViolation);
  CHECK(code_of([&] { apply_var(t.g, t.env, t.x, testing::rho1(), ft("(2,{1},{0},o)")); }) ==
        RuleError::FlagOrTypeMismatch);
}

TEST_CASE("lambda removes the markers provided by the argument set") {
  AX t;
  auto x0 = apply_var(t.g, t.env, t.x, testing::rho1(), ft("(2,{},{0},o)"));
  auto ax0 = apply_con(t.g, t.ax, {x0}, OrderSet(), t.env, 2);
  auto f = apply_lambda(t.g, ax0, t.lam, {testing::rho1()}, TypeEnv());
  CHECK(f->conclusion.type == testing::tau_f());
  CHECK(f->conclusion.counter == 0);

  auto x01 = apply_var(t.g, t.env, t.x, testing::rho1(), ft("(2,{},{0,1},o)"));
  auto ax1 = apply_con(t.g, t.ax, {x01}, OrderSet(), t.env, 2);
  auto m = apply_lambda(t.g, ax1, t.lam, {testing::rho1()}, TypeEnv());
  CHECK(m->conclusion.type == testing::tau_m());
  CHECK(m->conclusion.counter == 1);

  CHECK(code_of([&] { apply_lambda(t.g, ax0, t.lam, {testing::rho1()}, t.env); }) == RuleError::BinderLeak);
  CHECK(code_of([&] { apply_lambda(t.g, ax0, t.lam, {}, TypeEnv()); }) == RuleError::ArgSetMismatch);

  Identity id;
  TypeEnv env = TypeEnv::single(id.lam, testing::rho1());
  auto v = apply_var(id.g, env, id.x, testing::rho1(), ft("(2,{},{0},o)"));
  auto idf = apply_lambda(id.g, v, id.lam, {testing::rho1()}, TypeEnv());
  CHECK(idf->conclusion.type == ft("(2,{},{},{(1,{},{0},o)}->o)"));
  CHECK(idf->conclusion.counter == 0);
}

TEST_CASE("Con places flags") {
  AX t;
  auto x0 = apply_var(t.g, t.env, t.x, testing::rho1(), ft("(2,{},{0},o)"));
  auto left = apply_con(t.g, t.ax, {x0}, OrderSet(), t.env, 2);
  CHECK(left->conclusion.type == ft("(2,{1},{0},o)"));
  CHECK(left->conclusion.counter == 0);
  CHECK(left->placed_flags == std::vector<std::pair<unsigned, std::uint64_t>>{{0, 1}, {1, 1}});

  auto x01 = apply_var(t.g, t.env, t.x, testing::rho1(), ft("(2,{},{0,1},o)"));
  auto right = apply_con(t.g, t.ax, {x01}, OrderSet(), t.env, 2);
  CHECK(right->conclusion.type == ft("(2,{},{0,1},o)"));
  CHECK(right->conclusion.counter == 1);
  CHECK(right->placed_flags == std::vector<std::pair<unsigned, std::uint64_t>>{{0, 1}, {1, 1}, {2, 1}});

  testing::WorkedP1 ex;
  auto e = apply_con(ex.g, ex.e, {}, OrderSet{0}, TypeEnv(), 2);
  CHECK(e->conclusion.type == ft("(2,{1},{0},o)"));
  CHECK(e->conclusion.counter == 0);
  CHECK(e->conclusion.env.empty());

  auto e_m0 = apply_con(ex.g, ex.e, {}, OrderSet(), TypeEnv(), 0);
  CHECK(e_m0->conclusion.counter == 1);

  CHECK(code_of([&] { apply_con(t.g, t.ax, {x0}, OrderSet{1}, t.env, 2); }) == RuleError::MarkerAtInnerNode);
  CHECK(code_of([&] { apply_con(ex.g, ex.br, {}, OrderSet(), TypeEnv(), 2); }) == RuleError::BrNotAllowed);

  Alphabet s = testing::abe();
  TermGraph bee = TermGraph::unfold(*parse_term("b e e", s));
  SubtermRef leaf = bee.node(bee.root()).kids[0];
  auto e0 = apply_con(bee, leaf, {}, OrderSet{0}, TypeEnv(), 1);
  CHECK(code_of([&] { apply_con(bee, bee.root(), {e0, e0}, OrderSet(), TypeEnv(), 1); }) ==
        RuleError::MarkerCollision);
}

TEST_CASE("application passes restricted argument types") {
  testing::WorkedP1 ex;
  TypeEnv env = TypeEnv::single(ex.r, testing::tau_m());
  auto fv = apply_var(ex.g, env, ex.f, testing::tau_m(), testing::tau_m());
  auto e0 = apply_con(ex.g, ex.e, {}, OrderSet{0}, TypeEnv(), 2);
  auto fe = apply_app(ex.g, ex.fe, fv, {e0}, env);
  CHECK(fe->conclusion.type == ft("(2,{},{0,1},o)"));
  CHECK(fe->conclusion.counter == 1);

  CHECK(ex.p1->conclusion.type == testing::rho2());
  CHECK(ex.p1->conclusion.counter == 2);
  CHECK(ex.r_sig->conclusion.type == ft("(2,{},{0},{(2,{1},{},{(1,{},{0},o)}->o),(2,{},{1},{(1,{},{0},o)}->o)}->o)"));
  CHECK(ex.r_sig->conclusion.counter == 1);

  // Missing argument for τ̂_m.
  CHECK(code_of([&] { apply_app(ex.g, ex.root, ex.r_sig, {ex.ax_f}, TypeEnv()); }) == RuleError::ArgSetMismatch);
  // The order-1 marker arrives twice.
  CHECK(code_of([&] { apply_app(ex.g, ex.root, ex.r_sig, {ex.ax_f, ex.ax_m, ex.ax_m}, TypeEnv()); }) ==
        RuleError::MarkerCollision);

  // An order-2 operator cannot be applied in an order-1 derivation.
  Alphabet s = testing::abe();
  TermGraph g = TermGraph::unfold(*parse_term("(\\f:o -> o. f e) (\\x:o. a x)", s));
  SubtermRef lam = g.node(g.root()).kids[0];
  SubtermRef body = g.node(lam).kids[0];
  SubtermRef f = g.node(body).kids[0];
  FullType f2 = ft("(2,{},{},{}->o)");
  TypeEnv envf = TypeEnv::single(lam, f2);
  auto fv1 = apply_var(g, envf, f, f2, ft("(1,{},{},{}->o)"));
  auto fe1 = apply_app(g, body, fv1, {}, envf);
  CHECK(fe1->conclusion.type == ft("(1,{},{},o)"));
  auto op = apply_lambda(g, fe1, lam, {f2}, TypeEnv());
  CHECK(code_of([&] { apply_app(g, g.root(), op, {}, TypeEnv()); }) == RuleError::OrderExceeded);
}

TEST_CASE("Br keeps the premiss judgment") {
  testing::WorkedP1 ex;
  const Derivation& lam = *ex.r_sig;
  const Derivation& br = *lam.premisses[0];
  CHECK(br.rule == Rule::Br);
  CHECK(br.conclusion.subject == ex.br);
  CHECK(br.conclusion.counter == 1);
  CHECK(br.conclusion.type == br.premisses[0]->conclusion.type);
  CHECK(code_of([&] { apply_br(ex.g, br.premisses[0], 2, ex.br); }) == RuleError::SubjectMismatch);
  CHECK(code_of([&] { apply_br(ex.g, br.premisses[0], 1, ex.fe); }) == RuleError::SubjectMismatch);
}

TEST_CASE("validate accepts the worked derivation and locates faults") {
  testing::WorkedP1 ex;
  CHECK(validate(ex.g, *ex.p1).ok);
  CHECK(node_count(*ex.p1) == 12);

  // Counter of the τ̂_m argument perturbed by one.
  Derivation bad_arg = *ex.ax_m;
  bad_arg.conclusion.counter += 1;
  Derivation bad = *ex.p1;
  bad.premisses[2] = std::make_shared<Derivation>(bad_arg);
  auto r = validate(ex.g, bad);
  CHECK_FALSE(r.ok);
  CHECK(r.code == RuleError::CounterMismatch);
  CHECK(r.where == DerivationPath{2});

  // The order-0 marker placed at both leaves of b e e.
  Alphabet s = testing::abe();
  TermGraph bee = TermGraph::unfold(*parse_term("b e e", s));
  SubtermRef leaf = bee.node(bee.root()).kids[0];
  auto e0 = apply_con(bee, leaf, {}, OrderSet{0}, TypeEnv(), 1);
  Derivation twice{Judgment{TypeEnv(), bee.root(), ft("(1,{},{0},o)"), 0}, Rule::Con, {e0, e0}, {}, {}, 0, {}};
  auto rc = validate(bee, twice);
  CHECK_FALSE(rc.ok);
  CHECK(rc.code == RuleError::MarkerCollision);

  // A Br node whose recorded type differs from its premiss.
  Derivation lam = *ex.r_sig;
  Derivation br = *lam.premisses[0];
  br.conclusion.type = ft("(2,{1},{0},o)");
  lam.premisses[0] = std::make_shared<Derivation>(br);
  auto rb = validate(ex.g, lam);
  CHECK_FALSE(rb.ok);
  CHECK(rb.where == DerivationPath{0});
}

TEST_CASE("validate accepts environments weakened by marker-free types") {
  testing::WorkedP1 ex;
  // ex.r_sig already discards τ̂_f at the variable f.
  const Derivation& var = *ex.r_sig->premisses[0]->premisses[0]->premisses[0];
  CHECK(var.rule == Rule::Var);
  CHECK(var.conclusion.env.at(ex.r).size() == 2);
  CHECK(validate(ex.g, *ex.r_sig).ok);
}

TEST_CASE("rebuild and replace_at recompute counters upward") {
  testing::WorkedP1 ex;
  auto same = replace_at(ex.g, ex.p1, {2}, ex.ax_m);
  CHECK(same->conclusion.counter == 2);
  CHECK(at_path(*ex.p1, {0, 0}).rule == Rule::Br);
  CHECK_THROWS_AS(at_path(*ex.p1, {7}), std::out_of_range);
}
