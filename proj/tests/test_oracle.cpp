#include <set>

#include "doctest.h"
#include "lamfin/oracle.hpp"
#include "support.hpp"

using namespace lamfin;

namespace {

std::set<std::size_t> sizes_of(const Language& l) {
  std::set<std::size_t> out;
  for (const auto& t : l.trees) out.insert(t.size());
  return out;
}

std::set<std::string> strs(const Language& l) {
  std::set<std::string> out;
  for (const auto& t : l.trees) out.insert(t.str());
  return out;
}

}  // namespace

TEST_CASE("Böhm prefixes") {
  Alphabet s = testing::abe();
  CHECK(bohm_expand(parse_term("a e", s), Fuel{}).str() == "(a (e))");
  CHECK(bohm_expand(parse_term("(\\x:o. b x x) e", s), Fuel{}).str() == "(b (e) (e))");
  CHECK(bohm_expand(testing::load_corpus("p3.hors").term, Fuel{3, 100'000}).str() == "(br (e) (br (e) (br ? ?)))");
  CHECK(bohm_expand(parse_term("Y[o] (\\s:o. s)", s), Fuel{8, 50}).str() == "_|_");
  CHECK(bohm_expand(parse_term("Y[o] (\\s:o. a s)", s), Fuel{2, 1000}).str() == "(a (a ?))");
}

TEST_CASE("finite tree parsing") {
  FiniteTree t = parse_finite_tree("(b (a (e)) (e))");
  CHECK(t.size() == 4);
  CHECK(t.str() == "(b (a (e)) (e))");
  CHECK_THROWS(parse_finite_tree("(b (e)"));
}

TEST_CASE("languages of small terms") {
  Alphabet s = testing::abe();
  Language l = language_upto(parse_term("br (a e) e", s), 10, Fuel{});
  CHECK(l.complete);
  CHECK(strs(l) == std::set<std::string>{"(a (e))", "(e)"});

  Language p3 = language_upto(testing::load_corpus("p3.hors").term, 10, Fuel{});
  CHECK(strs(p3) == std::set<std::string>{"(e)"});

  Language p1 = language_upto(testing::load_corpus("p1.hors").term, 10, Fuel{});
  CHECK(sizes_of(p1) == std::set<std::size_t>{2, 3, 5, 9});

  // A size limit below every tree gives an empty, complete answer.
  Language none = language_upto(parse_term("a (a e)", s), 2, Fuel{});
  CHECK(none.trees.empty());
  CHECK(none.complete);

  // Divergence marks the answer incomplete instead of inventing trees.
  Language stuck = language_upto(parse_term("Y[o] (\\s:o. s)", s), 5, Fuel{16, 200});
  CHECK(stuck.trees.empty());
  CHECK_FALSE(stuck.complete);
}

TEST_CASE("every enumerated tree replays and respects the size limit") {
  for (const auto& e : testing::manifest()) {
    CAPTURE(e.file);
    auto f = testing::load_corpus(e.file);
    Language l = language_upto(f.term, 12, Fuel{});
    for (const auto& t : l.trees) {
      CHECK(t.size() <= 12);
      CHECK(replays(f.term, t, Fuel{}));
    }
  }
  Alphabet s = testing::abe();
  CHECK_FALSE(replays(parse_term("br (a e) e", s), parse_finite_tree("(a (a (e)))"), Fuel{}));
}

TEST_CASE("languages grow with the size limit") {
  for (const auto& e : testing::manifest()) {
    CAPTURE(e.file);
    auto f = testing::load_corpus(e.file);
    Language small = language_upto(f.term, 6, Fuel{});
    Language big = language_upto(f.term, 12, Fuel{});
    for (const auto& t : small.trees) CHECK(big.trees.count(t) == 1);
    for (const auto& t : big.trees)
      if (t.size() <= 6) CHECK(small.trees.count(t) == 1);
  }
}

TEST_CASE("more fuel never loses trees") {
  auto f = testing::load_corpus("p1.hors");
  Language low = language_upto(f.term, 20, Fuel{12, 100'000});
  Language high = language_upto(f.term, 20, Fuel{128, 100'000});
  for (const auto& t : low.trees) CHECK(high.trees.count(t) == 1);
  CHECK(low.trees.size() < high.trees.size());
}

TEST_CASE("growth reports") {
  GrowthReport p1 = growth_report(testing::load_corpus("p1.hors").term, default_schedule());
  REQUIRE(p1.rows.size() == 3);
  CHECK(p1.rows[0].largest == 3);
  CHECK(p1.rows[1].largest == 9);
  CHECK(p1.rows[2].largest == 17);
  CHECK(p1.strictly_increasing);

  GrowthReport p3 = growth_report(testing::load_corpus("p3.hors").term, default_schedule());
  for (const auto& r : p3.rows) CHECK(r.largest == 1);
  CHECK_FALSE(p3.strictly_increasing);

  Alphabet s = testing::abe();
  GrowthReport e = growth_report(parse_term("e", s), default_schedule());
  for (const auto& r : e.rows) {
    CHECK(r.largest == 1);
    CHECK(r.found == 1);
  }
  CHECK_FALSE(e.strictly_increasing);

  std::string jsonl = growth_report_jsonl(p1);
  CHECK(std::count(jsonl.begin(), jsonl.end(), '\n') == 4);
  auto first = nlohmann::json::parse(jsonl.substr(0, jsonl.find('\n')));
  CHECK(first.at("largest") == 3);
}
