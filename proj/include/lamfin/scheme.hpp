#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "lamfin/term.hpp"

namespace lamfin {

struct RewriteRule {
  std::string nonterminal;
  std::vector<std::string> params;
  RawPtr body;
  SourcePos pos;
};

// Nondeterministic recursion scheme.  Text format, one item per line:
//
//   symbol a 1
//   nonterminal R : (o -> o) -> o
//   start S
//   R f = br (f e) (R (\x. f (f x)))
//
// br is implicitly a rank-2 symbol.  Without a start line the first declared
// nonterminal is the start symbol.
struct Scheme {
  Alphabet sigma;
  std::vector<std::pair<std::string, Sort>> nonterminals;
  std::vector<RewriteRule> rules;
  std::string start;

  const Sort* sort_of(const std::string& nt) const;
  const RewriteRule* rule_of(const std::string& nt) const;
};

// Parses and sort-checks.
Scheme parse_scheme(std::string_view text);
void check_scheme(const Scheme& g);
std::string print_scheme(const Scheme& g);
bool same_scheme(const Scheme& a, const Scheme& b);

// Closed λY-term of sort o; each nonterminal becomes a Y-fixpoint of its rule.
TermPtr scheme_to_term(const Scheme& g);

// Input files hold either a scheme or a serialized term; a leading '(' selects
// the latter.
TermFile load_program(std::string_view text);

}  // namespace lamfin
