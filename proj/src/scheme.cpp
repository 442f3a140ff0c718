#include "lamfin/scheme.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "lexer.hpp"

namespace lamfin {

using detail::Tok;
using detail::TokenStream;

const Sort* Scheme::sort_of(const std::string& nt) const {
  for (const auto& [n, s] : nonterminals)
    if (n == nt) return &s;
  return nullptr;
}

const RewriteRule* Scheme::rule_of(const std::string& nt) const {
  for (const auto& r : rules)
    if (r.nonterminal == nt) return &r;
  return nullptr;
}

namespace {

std::vector<std::pair<int, std::string>> logical_lines(std::string_view text) {
  std::vector<std::pair<int, std::string>> out;
  int line = 1;
  size_t i = 0;
  while (i <= text.size()) {
    size_t j = text.find('\n', i);
    if (j == std::string_view::npos) j = text.size();
    out.emplace_back(line, std::string(text.substr(i, j - i)));
    ++line;
    i = j + 1;
  }
  return out;
}

unsigned parse_rank(const detail::Token& t) {
  if (t.text.empty() || !std::all_of(t.text.begin(), t.text.end(), ::isdigit))
    throw ParseError(t.pos, "expected a rank, found '" + t.text + "'");
  return static_cast<unsigned>(std::stoul(t.text));
}

}  // namespace

Scheme parse_scheme(std::string_view text) {
  Scheme g;
  bool explicit_start = false;
  SourcePos start_pos;
  for (const auto& [lineno, line] : logical_lines(text)) {
    TokenStream ts(detail::tokenize(line, lineno));
    if (ts.done()) continue;
    const detail::Token& first = ts.peek();
    if (first.kind == Tok::Word && first.text == "symbol" && ts.peek(1).kind == Tok::Word &&
        ts.peek(2).kind == Tok::Word && ts.peek(3).kind == Tok::End) {
      ts.next();
      const auto& name = ts.next();
      if (!detail::is_identifier(name.text) || name.text == "Y")
        throw ParseError(name.pos, "bad symbol name '" + name.text + "'");
      if (name.text == kBr) throw ParseError(name.pos, "br is built in");
      unsigned r = parse_rank(ts.next());
      if (g.sigma.contains(name.text)) throw ParseError(name.pos, "symbol declared twice: " + name.text);
      g.sigma.add(name.text, r);
      continue;
    }
    if (first.kind == Tok::Word && first.text == "nonterminal" && ts.peek(2).kind == Tok::Colon) {
      ts.next();
      const auto& name = ts.expect(Tok::Word, "nonterminal name");
      ts.expect(Tok::Colon, "':'");
      Sort s = detail::parse_sort_tokens(ts);
      if (!ts.done()) throw ParseError(ts.peek().pos, "trailing input after sort");
      if (!detail::is_identifier(name.text) || name.text == "Y")
        throw ParseError(name.pos, "bad nonterminal name '" + name.text + "'");
      if (g.sort_of(name.text)) throw ParseError(name.pos, "nonterminal declared twice: " + name.text);
      g.nonterminals.emplace_back(name.text, s);
      continue;
    }
    if (first.kind == Tok::Word && first.text == "start" && ts.peek(1).kind == Tok::Word &&
        ts.peek(2).kind == Tok::End) {
      ts.next();
      if (explicit_start) throw ParseError(first.pos, "start given twice");
      g.start = ts.next().text;
      explicit_start = true;
      start_pos = first.pos;
      continue;
    }
    // N x1 ... xk = body
    RewriteRule r;
    r.pos = first.pos;
    r.nonterminal = ts.expect(Tok::Word, "rule head").text;
    while (ts.at(Tok::Word)) {
      const auto& p = ts.next();
      if (!detail::is_identifier(p.text) || p.text == "Y") throw ParseError(p.pos, "bad parameter '" + p.text + "'");
      r.params.push_back(p.text);
    }
    ts.expect(Tok::Equals, "'='");
    r.body = detail::parse_raw_tokens(ts);
    if (!ts.done()) throw ParseError(ts.peek().pos, "trailing input '" + ts.peek().text + "'");
    g.rules.push_back(std::move(r));
  }
  if (!explicit_start && !g.nonterminals.empty()) g.start = g.nonterminals.front().first;
  if (g.start.empty()) throw ParseError(start_pos, "scheme has no start nonterminal");
  check_scheme(g);
  return g;
}

void check_scheme(const Scheme& g) {
  if (g.start.empty() || !g.sort_of(g.start))
    throw ParseError({}, "start nonterminal '" + g.start + "' is not declared");
  if (!g.sort_of(g.start)->is_base())
    throw SortError(SortErrorKind::SortMismatch, {}, "start nonterminal must have sort o");
  for (const auto& [n, s] : g.nonterminals) {
    (void)s;
    if (g.sigma.contains(n)) throw ParseError({}, n + " is both a symbol and a nonterminal");
    size_t count = std::count_if(g.rules.begin(), g.rules.end(),
                                 [&](const RewriteRule& r) { return r.nonterminal == n; });
    if (count != 1)
      throw ParseError({}, "nonterminal " + n + " needs exactly one rule, has " + std::to_string(count));
  }
  for (const RewriteRule& r : g.rules) {
    const Sort* s = g.sort_of(r.nonterminal);
    if (!s) throw ParseError(r.pos, "rule for undeclared nonterminal " + r.nonterminal);
    std::vector<ScopeEntry> scope;
    for (const auto& [n, ns] : g.nonterminals) scope.push_back({n, ns});
    Sort cur = *s;
    std::set<std::string> seen;
    for (const auto& p : r.params) {
      if (cur.is_base())
        throw SortError(SortErrorKind::SortMismatch, r.pos, "too many parameters for " + r.nonterminal);
      if (!seen.insert(p).second) throw ParseError(r.pos, "parameter " + p + " repeated");
      if (g.sort_of(p) || g.sigma.contains(p))
        throw ParseError(r.pos, "parameter " + p + " clashes with a nonterminal or symbol");
      scope.push_back({p, cur.arg()});
      cur = cur.result();
    }
    elaborate(*r.body, g.sigma, scope, cur);
  }
}

std::string print_scheme(const Scheme& g) {
  std::ostringstream os;
  for (const auto& [n, r] : g.sigma.declared()) os << "symbol " << n << ' ' << r << '\n';
  for (const auto& [n, s] : g.nonterminals) os << "nonterminal " << n << " : " << s.str() << '\n';
  os << "start " << g.start << '\n';
  for (const RewriteRule& r : g.rules) {
    os << r.nonterminal;
    for (const auto& p : r.params) os << ' ' << p;
    os << " = " << print_raw(*r.body) << '\n';
  }
  return os.str();
}

bool same_scheme(const Scheme& a, const Scheme& b) {
  if (!(a.sigma == b.sigma) || a.nonterminals != b.nonterminals || a.start != b.start ||
      a.rules.size() != b.rules.size())
    return false;
  for (size_t i = 0; i < a.rules.size(); ++i) {
    const RewriteRule& x = a.rules[i];
    const RewriteRule& y = b.rules[i];
    if (x.nonterminal != y.nonterminal || x.params != y.params || !same_raw(*x.body, *y.body)) return false;
  }
  return true;
}

namespace {

struct Bekic {
  const Scheme& g;

  RawPtr node(RawTerm::Kind k, std::string name, std::vector<RawPtr> kids = {},
              std::optional<Sort> annot = std::nullopt) const {
    auto r = std::make_shared<RawTerm>();
    r->kind = k;
    r->name = std::move(name);
    r->kids = std::move(kids);
    r->annot = annot;
    return r;
  }

  // Replaces references to nonterminals outside `bound` by their fixpoints.
  RawPtr inline_refs(const RawPtr& t, const std::vector<std::string>& bound,
                     std::vector<std::string>& shadow) const {
    switch (t->kind) {
      case RawTerm::Ident: {
        if (std::find(shadow.begin(), shadow.end(), t->name) != shadow.end()) return t;
        if (!g.sort_of(t->name)) return t;
        if (std::find(bound.begin(), bound.end(), t->name) != bound.end()) return t;
        return fixpoint(t->name, bound);
      }
      case RawTerm::Y:
        return t;
      case RawTerm::App: {
        RawPtr f = inline_refs(t->kids[0], bound, shadow);
        return node(RawTerm::App, "", {f, inline_refs(t->kids[1], bound, shadow)});
      }
      case RawTerm::Lam: {
        shadow.push_back(t->name);
        RawPtr b = inline_refs(t->kids[0], bound, shadow);
        shadow.pop_back();
        return node(RawTerm::Lam, t->name, {b}, t->annot);
      }
    }
    return t;
  }

  RawPtr fixpoint(const std::string& nt, std::vector<std::string> bound) const {
    bound.push_back(nt);
    const RewriteRule* r = g.rule_of(nt);
    Sort s = *g.sort_of(nt);
    std::vector<std::string> shadow(r->params.begin(), r->params.end());
    RawPtr body = inline_refs(r->body, bound, shadow);
    std::vector<Sort> param_sorts;
    Sort cur = s;
    for (size_t i = 0; i < r->params.size(); ++i) {
      param_sorts.push_back(cur.arg());
      cur = cur.result();
    }
    for (size_t i = r->params.size(); i-- > 0;)
      body = node(RawTerm::Lam, r->params[i], {body}, param_sorts[i]);
    RawPtr lam = node(RawTerm::Lam, nt, {body}, s);
    return node(RawTerm::App, "", {node(RawTerm::Y, "Y"), lam});
  }
};

}  // namespace

TermPtr scheme_to_term(const Scheme& g) {
  check_scheme(g);
  Bekic b{g};
  RawPtr r = b.fixpoint(g.start, {});
  std::vector<ScopeEntry> scope;
  return elaborate(*r, g.sigma, scope, Sort::base());
}

TermFile load_program(std::string_view text) {
  size_t i = 0;
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
    } else if (text[i] == '#' || text[i] == ';') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else {
      break;
    }
  }
  if (i < text.size() && text[i] == '(') {
    return term_from_sexpr(text);
  }
  Scheme g = parse_scheme(text);
  return {g.sigma, scheme_to_term(g)};
}

}  // namespace lamfin
