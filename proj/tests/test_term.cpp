#include <algorithm>
#include <random>

#include "doctest.h"
#include "lamfin/scheme.hpp"
#include "lamfin/term_graph.hpp"
#include "support.hpp"

using namespace lamfin;

namespace {

const char* kR = "Y (\\R:(o -> o) -> o. \\f:o -> o. br (f e) (R (\\x:o. f (f x))))";

std::size_t term_size(const Term& t) {
  std::size_t n = 1;
  for (const auto& k : t.kids) n += term_size(*k);
  return n;
}

unsigned max_redex_order(const Term& t) {
  unsigned m = 0;
  for (const auto& r : redexes(t)) m = std::max(m, r.order);
  return m;
}

}  // namespace

TEST_CASE("sort orders") {
  Sort o = Sort::base();
  Sort oo = Sort::arrow(o, o);
  CHECK(ord(o) == 0);
  CHECK(ord(oo) == 1);
  CHECK(ord(Sort::arrow(oo, o)) == 2);
  CHECK(ord(Sort::arrow(o, Sort::arrow(oo, o))) == 2);
  CHECK(parse_sort("(o -> o) -> o") == Sort::arrow(oo, o));
  CHECK(Sort::arrow(oo, o).str() == "(o -> o) -> o");
}

TEST_CASE("arrow orders follow the recursion on random sorts") {
  std::mt19937 rng(7);
  std::function<Sort(int)> random_sort = [&](int depth) {
    if (depth == 0 || rng() % 3 == 0) return Sort::base();
    return Sort::arrow(random_sort(depth - 1), random_sort(depth - 1));
  };
  for (int i = 0; i < 500; ++i) {
    Sort s = random_sort(4);
    if (s.is_base()) continue;
    CHECK(ord(s) == std::max(1 + ord(s.arg()), ord(s.result())));
    CHECK(ord(s) >= 1);
  }
}

TEST_CASE("sort checking") {
  Alphabet s = testing::abe();
  CHECK(sort_check(*parse_term("a e", s), s) == Sort::base());
  CHECK(sort_check(*parse_term("\\x:o. a x", s), s) == parse_sort("o -> o"));

  auto kind_of = [&](const char* text) {
    try {
      parse_term(text, s);
    } catch (const SortError& e) {
      return e.kind;
    }
    FAIL("no sort error for " << text);
    return SortErrorKind::MissingAnnotation;
  };
  CHECK(kind_of("(\\x:o. x) (\\y:o. y)") == SortErrorKind::SortMismatch);
  CHECK(kind_of("a e e") == SortErrorKind::RankMismatch);
  CHECK(kind_of("a") == SortErrorKind::RankMismatch);
  CHECK(kind_of("a y") == SortErrorKind::UnboundVariable);
}

TEST_CASE("complexity") {
  Alphabet s = testing::abe();
  CHECK(complexity(*parse_term("e", s)) == 0);
  CHECK(complexity(*parse_term("\\x:o. a x", s)) == 1);
  auto p1 = testing::load_corpus("p1.hors");
  CHECK(complexity(*p1.term) == 2);
  CHECK(complexity(*testing::load_corpus("numerals.hors").term) == 3);
}

TEST_CASE("complexity is the largest order in the closure") {
  for (const auto& e : testing::manifest()) {
    CAPTURE(e.file);
    auto f = testing::load_corpus(e.file);
    TermGraph g = TermGraph::unfold(*f.term);
    unsigned m = 0;
    for (SubtermRef r : g.closure()) m = std::max(m, g.order(r));
    CHECK(complexity(*f.term) == m);
    CHECK(g.complexity() == m);
  }
}

TEST_CASE("scheme to term") {
  Scheme g = parse_scheme("symbol a 1\nsymbol e 0\nnonterminal S : o\nS = br e (a S)\n");
  TermPtr t = scheme_to_term(g);
  CHECK(same_term(*t, *parse_term("Y (\\s:o. br e (a s))", g.sigma)));

  // The two-rule scheme unfolds to the same regular tree as the direct term.
  auto p1 = testing::load_corpus("p1.hors");
  auto direct = parse_term(std::string(kR) + " (\\x:o. a x)", p1.sigma);
  TermGraph a = TermGraph::unfold(*p1.term);
  TermGraph b = TermGraph::unfold(*direct);
  REQUIRE(a.size() == b.size());
  for (std::uint32_t i = 0; i < a.size(); ++i) CHECK(a.print(SubtermRef{i}) == b.print(SubtermRef{i}));

  CHECK_THROWS_AS(parse_scheme("symbol e 0\n"), ParseError);
  CHECK_THROWS_AS(parse_scheme(""), ParseError);
}

TEST_CASE("scheme errors carry positions") {
  try {
    parse_scheme("symbol a 1\nnonterminal S : o\nS = a a\n");
    FAIL("expected an error");
  } catch (const SortError& e) {
    CHECK(e.pos.line == 3);
  }
  CHECK_THROWS(parse_scheme("nonterminal S : o -> o\nS x = x\n"));  // start must have sort o
  CHECK_THROWS(parse_scheme("symbol a 1\nnonterminal S : o\nS = a\n"));  // partial application
  CHECK_THROWS(parse_scheme("nonterminal S : o\nS = S\nS = S\n"));
}

TEST_CASE("schemes round-trip through print and parse") {
  for (const auto& e : testing::manifest()) {
    CAPTURE(e.file);
    Scheme a = parse_scheme(testing::read_file(testing::corpus_path(e.file)));
    std::string printed = print_scheme(a);
    Scheme b = parse_scheme(printed);
    CHECK(same_scheme(a, b));
    CHECK(print_scheme(b) == printed);
  }
}

TEST_CASE("terms round-trip through print and s-expressions") {
  for (const auto& e : testing::manifest()) {
    CAPTURE(e.file);
    auto f = testing::load_corpus(e.file);
    CHECK(same_term(*parse_term(print_term(*f.term, f.sigma), f.sigma), *f.term));
    TermFile back = term_from_sexpr(term_to_sexpr(*f.term, f.sigma));
    CHECK(same_term(*back.term, *f.term));
    CHECK(back.sigma == f.sigma);
  }
}

TEST_CASE("beta steps") {
  Alphabet s = testing::abe();
  auto r = beta_step(parse_term("(\\x:o. a x) e", s), {});
  CHECK(same_term(*r.term, *parse_term("a e", s)));
  CHECK(r.order == 1);

  std::string p3 = std::string(kR) + " (\\x:o. x)";
  auto p4 = parse_term("(\\g:o -> o. " + p3 + ") (\\x:o. a (a (a x)))", s);
  auto r4 = beta_step(p4, {});
  CHECK(same_term(*r4.term, *parse_term(p3, s)));
  CHECK(r4.order == 2);

  CHECK_THROWS_AS(beta_step(parse_term("e", s), {}), ReductionError);
  // Substitution avoids capture of the outer y.
  auto c = beta_step(parse_term("\\y:o. (\\x:o. \\y:o. b x y) y", s), {0});
  CHECK(same_term(*c.term, *parse_term("\\y:o. \\z:o. b y z", s)));
}

TEST_CASE("beta steps preserve sorts and never raise the redex order") {
  for (const auto& e : testing::manifest()) {
    CAPTURE(e.file);
    auto f = testing::load_corpus(e.file);
    TermPtr t = f.term;
    Sort before = sort_check(*t, f.sigma);
    unsigned bound = max_redex_order(*t);
    for (int step = 0; step < 25; ++step) {
      auto rs = redexes(*t);
      if (rs.empty() || term_size(*t) > 4000) break;
      auto top = std::max_element(rs.begin(), rs.end(), [](const Redex& a, const Redex& b) { return a.order < b.order; });
      auto r = beta_step(t, top->pos);
      CHECK(r.order == top->order);
      t = r.term;
      CHECK(sort_check(*t, f.sigma) == before);
      unsigned now = max_redex_order(*t);
      CHECK(now <= bound);
      bound = now;
    }
  }
}
