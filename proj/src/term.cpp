#include "lamfin/term.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

#include "lexer.hpp"
#include "sexpr.hpp"

namespace lamfin {

const char* to_string(SortErrorKind k) {
  switch (k) {
    case SortErrorKind::SortMismatch: return "SortMismatch";
    case SortErrorKind::RankMismatch: return "RankMismatch";
    case SortErrorKind::UnboundVariable: return "UnboundVariable";
    case SortErrorKind::MissingAnnotation: return "MissingAnnotation";
  }
  return "?";
}

Alphabet::Alphabet() { ranks_[kBr] = 2; }

void Alphabet::add(const std::string& name, unsigned rank) {
  if (ranks_.count(name)) throw std::invalid_argument("symbol declared twice: " + name);
  ranks_[name] = rank;
  declared_.emplace_back(name, rank);
}

std::optional<unsigned> Alphabet::rank(const std::string& name) const {
  auto it = ranks_.find(name);
  if (it == ranks_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------- builders

namespace {

TermPtr make(TermKind kind, std::string name, Sort sort, std::vector<TermPtr> kids = {}) {
  auto t = std::make_shared<Term>();
  t->kind = kind;
  t->name = std::move(name);
  t->sort = sort;
  t->kids = std::move(kids);
  return t;
}

[[noreturn]] void mismatch(const std::string& msg, SourcePos pos = {}) {
  throw SortError(SortErrorKind::SortMismatch, pos, msg);
}

}  // namespace

TermPtr mk_const(const std::string& symbol, std::vector<TermPtr> args) {
  for (const auto& a : args)
    if (!a->sort.is_base()) mismatch("argument of " + symbol + " has sort " + a->sort.str());
  return make(TermKind::Const, symbol, Sort::base(), std::move(args));
}

TermPtr mk_var(const std::string& name, unsigned index, Sort sort) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Var;
  t->name = name;
  t->index = index;
  t->sort = sort;
  return t;
}

TermPtr mk_app(TermPtr fn, TermPtr arg) {
  if (fn->sort.is_base()) mismatch("applying a term of sort o");
  if (fn->sort.arg() != arg->sort)
    mismatch("expected argument of sort " + fn->sort.arg().str() + ", got " + arg->sort.str());
  Sort s = fn->sort.result();
  return make(TermKind::App, "", s, {std::move(fn), std::move(arg)});
}

TermPtr mk_lam(const std::string& binder, Sort binder_sort, TermPtr body) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Lam;
  t->name = binder;
  t->binder_sort = binder_sort;
  t->sort = Sort::arrow(binder_sort, body->sort);
  t->kids = {std::move(body)};
  return t;
}

TermPtr mk_y(Sort alpha) {
  return make(TermKind::Y, "Y", Sort::arrow(Sort::arrow(alpha, alpha), alpha));
}

// ------------------------------------------------------------- sort_check

namespace {

Sort check_rec(const Term& t, const Alphabet& sigma, std::vector<Sort>& ctx) {
  switch (t.kind) {
    case TermKind::Var: {
      if (t.index >= ctx.size())
        throw SortError(SortErrorKind::UnboundVariable, {}, "unbound variable " + t.name);
      Sort s = ctx[ctx.size() - 1 - t.index];
      if (s != t.sort) mismatch("variable " + t.name + " annotated " + t.sort.str() + " but bound at " + s.str());
      return s;
    }
    case TermKind::Const: {
      auto r = sigma.rank(t.name);
      if (!r) throw SortError(SortErrorKind::UnboundVariable, {}, "unknown symbol " + t.name);
      if (*r != t.kids.size())
        throw SortError(SortErrorKind::RankMismatch, {},
                        t.name + " has rank " + std::to_string(*r) + " but " +
                            std::to_string(t.kids.size()) + " arguments");
      for (const auto& k : t.kids)
        if (!check_rec(*k, sigma, ctx).is_base()) mismatch("constant argument must have sort o");
      if (!t.sort.is_base()) mismatch("constant node must have sort o");
      return t.sort;
    }
    case TermKind::App: {
      Sort f = check_rec(*t.kids[0], sigma, ctx);
      Sort a = check_rec(*t.kids[1], sigma, ctx);
      if (f.is_base() || f.arg() != a) mismatch("operator/operand clash");
      if (f.result() != t.sort) mismatch("application node sort");
      return t.sort;
    }
    case TermKind::Lam: {
      ctx.push_back(t.binder_sort);
      Sort b = check_rec(*t.kids[0], sigma, ctx);
      ctx.pop_back();
      if (Sort::arrow(t.binder_sort, b) != t.sort) mismatch("abstraction node sort");
      return t.sort;
    }
    case TermKind::Y: {
      const Sort s = t.sort;
      if (s.is_base() || s.arg().is_base() || s.arg().arg() != s.arg().result() ||
          s.arg().arg() != s.result())
        mismatch("Y must have sort (α→α)→α");
      return s;
    }
  }
  return t.sort;
}

}  // namespace

Sort sort_check(const Term& t, const Alphabet& sigma) {
  std::vector<Sort> ctx;
  return check_rec(t, sigma, ctx);
}

bool same_term(const Term& a, const Term& b) {
  if (a.kind != b.kind || a.sort != b.sort || a.kids.size() != b.kids.size()) return false;
  switch (a.kind) {
    case TermKind::Var:
      if (a.index != b.index) return false;
      break;
    case TermKind::Const:
      if (a.name != b.name) return false;
      break;
    case TermKind::Lam:
      if (a.binder_sort != b.binder_sort) return false;
      break;
    default:
      break;
  }
  for (size_t i = 0; i < a.kids.size(); ++i)
    if (!same_term(*a.kids[i], *b.kids[i])) return false;
  return true;
}

// ------------------------------------------------------------------ lexer

namespace detail {

bool is_identifier(const std::string& w) {
  if (w.empty() || std::isdigit(static_cast<unsigned char>(w[0]))) return false;
  return true;
}

std::vector<Token> tokenize(std::string_view text, int first_line) {
  std::vector<Token> out;
  int line = first_line, col = 1;
  size_t i = 0;
  auto word_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  };
  while (i < text.size()) {
    char c = text[i];
    SourcePos pos{line, col};
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      ++col;
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    if (word_char(c)) {
      size_t j = i;
      while (j < text.size() && word_char(text[j])) ++j;
      out.push_back({Tok::Word, std::string(text.substr(i, j - i)), pos});
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
      out.push_back({Tok::Arrow, "->", pos});
      i += 2;
      col += 2;
      continue;
    }
    if (static_cast<unsigned char>(c) == 0xCE && i + 1 < text.size() &&
        static_cast<unsigned char>(text[i + 1]) == 0xBB) {
      out.push_back({Tok::Lambda, "\\", pos});
      i += 2;
      ++col;
      continue;
    }
    Tok k;
    switch (c) {
      case '\\': k = Tok::Lambda; break;
      case '.': k = Tok::Dot; break;
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '[': k = Tok::LBracket; break;
      case ']': k = Tok::RBracket; break;
      case ':': k = Tok::Colon; break;
      case '=': k = Tok::Equals; break;
      default:
        throw ParseError(pos, std::string("unexpected character '") + c + "'");
    }
    out.push_back({k, std::string(1, c), pos});
    ++i;
    ++col;
  }
  out.push_back({Tok::End, "", SourcePos{line, col}});
  return out;
}

const Token& TokenStream::expect(Tok k, const char* what) {
  if (!at(k)) {
    const Token& t = peek();
    throw ParseError(t.pos, std::string("expected ") + what + ", found '" +
                                (t.kind == Tok::End ? std::string("end of input") : t.text) + "'");
  }
  return next();
}

namespace {

Sort parse_sort_atom(TokenStream& ts) {
  if (ts.at(Tok::LParen)) {
    ts.next();
    Sort s = parse_sort_tokens(ts);
    ts.expect(Tok::RParen, "')'");
    return s;
  }
  const Token& t = ts.expect(Tok::Word, "sort");
  if (t.text != "o") throw ParseError(t.pos, "unknown base sort '" + t.text + "'");
  return Sort::base();
}

RawPtr raw(RawTerm::Kind k, std::string name, SourcePos pos, std::vector<RawPtr> kids = {},
           std::optional<Sort> annot = std::nullopt) {
  auto r = std::make_shared<RawTerm>();
  r->kind = k;
  r->name = std::move(name);
  r->pos = pos;
  r->kids = std::move(kids);
  r->annot = annot;
  return r;
}

RawPtr parse_term_rec(TokenStream& ts);

bool starts_atom(const TokenStream& ts) {
  return ts.at(Tok::Word) || ts.at(Tok::LParen) || ts.at(Tok::Lambda);
}

RawPtr parse_atom(TokenStream& ts) {
  const Token& t = ts.peek();
  if (t.kind == Tok::LParen) {
    ts.next();
    RawPtr r = parse_term_rec(ts);
    ts.expect(Tok::RParen, "')'");
    return r;
  }
  if (t.kind == Tok::Lambda) return parse_term_rec(ts);
  const Token& w = ts.expect(Tok::Word, "term");
  if (w.text == "Y") {
    std::optional<Sort> alpha;
    if (ts.at(Tok::LBracket)) {
      ts.next();
      alpha = parse_sort_tokens(ts);
      ts.expect(Tok::RBracket, "']'");
    }
    return raw(RawTerm::Y, "Y", w.pos, {}, alpha);
  }
  if (!is_identifier(w.text)) throw ParseError(w.pos, "bad identifier '" + w.text + "'");
  return raw(RawTerm::Ident, w.text, w.pos);
}

RawPtr parse_term_rec(TokenStream& ts) {
  if (ts.at(Tok::Lambda)) {
    SourcePos pos = ts.next().pos;
    const Token& x = ts.expect(Tok::Word, "binder name");
    if (!is_identifier(x.text) || x.text == "Y") throw ParseError(x.pos, "bad binder '" + x.text + "'");
    std::optional<Sort> annot;
    if (ts.at(Tok::Colon)) {
      ts.next();
      annot = parse_sort_tokens(ts);
    }
    ts.expect(Tok::Dot, "'.'");
    RawPtr body = parse_term_rec(ts);
    return raw(RawTerm::Lam, x.text, pos, {body}, annot);
  }
  RawPtr head = parse_atom(ts);
  while (starts_atom(ts)) {
    bool lam = ts.at(Tok::Lambda);
    RawPtr arg = parse_atom(ts);
    head = raw(RawTerm::App, "", head->pos, {head, arg});
    if (lam) break;  // a bare λ argument extends to the end
  }
  return head;
}

}  // namespace

Sort parse_sort_tokens(TokenStream& ts) {
  Sort a = parse_sort_atom(ts);
  if (ts.at(Tok::Arrow)) {
    ts.next();
    return Sort::arrow(a, parse_sort_tokens(ts));
  }
  return a;
}

RawPtr parse_raw_tokens(TokenStream& ts) { return parse_term_rec(ts); }

}  // namespace detail

RawPtr parse_raw_term(std::string_view text) {
  detail::TokenStream ts(detail::tokenize(text));
  RawPtr r = detail::parse_raw_tokens(ts);
  if (!ts.done()) throw ParseError(ts.peek().pos, "trailing input '" + ts.peek().text + "'");
  return r;
}

Sort parse_sort(std::string_view text) {
  detail::TokenStream ts(detail::tokenize(text));
  Sort s = detail::parse_sort_tokens(ts);
  if (!ts.done()) throw ParseError(ts.peek().pos, "trailing input after sort");
  return s;
}

bool same_raw(const RawTerm& a, const RawTerm& b) {
  if (a.kind != b.kind || a.name != b.name || a.annot != b.annot || a.kids.size() != b.kids.size())
    return false;
  for (size_t i = 0; i < a.kids.size(); ++i)
    if (!same_raw(*a.kids[i], *b.kids[i])) return false;
  return true;
}

namespace {

void print_raw_rec(const RawTerm& t, std::ostream& os, bool atom);

void print_raw_spine(const RawTerm& t, std::ostream& os) {
  std::vector<const RawTerm*> args;
  const RawTerm* h = &t;
  while (h->kind == RawTerm::App) {
    args.push_back(h->kids[1].get());
    h = h->kids[0].get();
  }
  print_raw_rec(*h, os, true);
  for (auto it = args.rbegin(); it != args.rend(); ++it) {
    os << ' ';
    print_raw_rec(**it, os, true);
  }
}

void print_raw_rec(const RawTerm& t, std::ostream& os, bool atom) {
  switch (t.kind) {
    case RawTerm::Ident:
      os << t.name;
      return;
    case RawTerm::Y:
      os << "Y";
      if (t.annot) os << '[' << t.annot->str() << ']';
      return;
    case RawTerm::App:
      if (atom) os << '(';
      print_raw_spine(t, os);
      if (atom) os << ')';
      return;
    case RawTerm::Lam:
      if (atom) os << '(';
      os << '\\' << t.name;
      if (t.annot) os << ':' << t.annot->str();
      os << ". ";
      print_raw_rec(*t.kids[0], os, false);
      if (atom) os << ')';
      return;
  }
}

}  // namespace

std::string print_raw(const RawTerm& t) {
  std::ostringstream os;
  print_raw_rec(t, os, false);
  return os.str();
}

// ------------------------------------------------------------- elaboration

namespace {

struct Elaborator {
  const Alphabet& sigma;
  std::vector<ScopeEntry>& scope;

  std::optional<unsigned> lookup(const std::string& name, Sort* sort) const {
    for (size_t i = scope.size(); i-- > 0;) {
      if (scope[i].name == name) {
        *sort = scope[i].sort;
        return static_cast<unsigned>(scope.size() - 1 - i);
      }
    }
    return std::nullopt;
  }

  TermPtr check(const RawTerm& r, Sort expected) {
    if (r.kind == RawTerm::Lam) {
      if (expected.is_base())
        throw SortError(SortErrorKind::SortMismatch, r.pos,
                        "abstraction where a term of sort o is expected");
      Sort b = expected.arg();
      if (r.annot && *r.annot != b)
        throw SortError(SortErrorKind::SortMismatch, r.pos,
                        "binder " + r.name + " annotated " + r.annot->str() + ", expected " + b.str());
      scope.push_back({r.name, b});
      TermPtr body = check(*r.kids[0], expected.result());
      scope.pop_back();
      return mk_lam(r.name, b, body);
    }
    TermPtr t = infer(r, expected);
    if (t->sort != expected)
      throw SortError(SortErrorKind::SortMismatch, r.pos,
                      "expected sort " + expected.str() + ", got " + t->sort.str());
    return t;
  }

  TermPtr apply_args(TermPtr head, const std::vector<const RawTerm*>& args, size_t from) {
    for (size_t i = from; i < args.size(); ++i) {
      if (head->sort.is_base())
        throw SortError(SortErrorKind::SortMismatch, args[i]->pos, "too many arguments");
      TermPtr a = check(*args[i], head->sort.arg());
      head = mk_app(head, a);
    }
    return head;
  }

  // `hint` is the expected sort of the whole spine when known.
  TermPtr infer(const RawTerm& r, std::optional<Sort> hint = std::nullopt) {
    std::vector<const RawTerm*> args;
    const RawTerm* h = &r;
    while (h->kind == RawTerm::App) {
      args.push_back(h->kids[1].get());
      h = h->kids[0].get();
    }
    std::reverse(args.begin(), args.end());

    switch (h->kind) {
      case RawTerm::Ident: {
        Sort s;
        if (auto idx = lookup(h->name, &s)) return apply_args(mk_var(h->name, *idx, s), args, 0);
        auto rank = sigma.rank(h->name);
        if (!rank) throw SortError(SortErrorKind::UnboundVariable, h->pos, "unbound identifier " + h->name);
        if (args.size() != *rank)
          throw SortError(SortErrorKind::RankMismatch, h->pos,
                          h->name + " has rank " + std::to_string(*rank) + " but is given " +
                              std::to_string(args.size()) + " arguments");
        std::vector<TermPtr> kids;
        for (const RawTerm* a : args) kids.push_back(check(*a, Sort::base()));
        return mk_const(h->name, std::move(kids));
      }
      case RawTerm::Y: {
        std::optional<Sort> alpha = h->annot;
        if (!alpha && !args.empty()) {
          const RawTerm* m = args[0];
          if (m->kind == RawTerm::Lam && m->annot) alpha = m->annot;
          else if (args.size() == 1 && hint) alpha = hint;
          else if (m->kind != RawTerm::Lam) {
            TermPtr mt = infer(*m);
            if (mt->sort.is_base())
              throw SortError(SortErrorKind::SortMismatch, m->pos, "argument of Y must be a function");
            alpha = mt->sort.result();
            return apply_args(mk_app(mk_y(*alpha), checked_same(mt, Sort::arrow(*alpha, *alpha), m->pos)),
                              args, 1);
          }
        }
        if (!alpha)
          throw SortError(SortErrorKind::MissingAnnotation, h->pos, "cannot infer the sort of Y; write Y[sort]");
        return apply_args(mk_y(*alpha), args, 0);
      }
      case RawTerm::Lam: {
        if (h->annot) {
          scope.push_back({h->name, *h->annot});
          TermPtr body = infer(*h->kids[0]);
          scope.pop_back();
          return apply_args(mk_lam(h->name, *h->annot, body), args, 0);
        }
        if (args.empty())
          throw SortError(SortErrorKind::MissingAnnotation, h->pos,
                          "cannot infer the sort of binder " + h->name + "; annotate it");
        TermPtr a0 = infer(*args[0]);
        scope.push_back({h->name, a0->sort});
        TermPtr body = infer(*h->kids[0]);
        scope.pop_back();
        return apply_args(mk_app(mk_lam(h->name, a0->sort, body), a0), args, 1);
      }
      case RawTerm::App:
        break;
    }
    throw std::logic_error("unreachable");
  }

  TermPtr checked_same(TermPtr t, Sort s, SourcePos pos) {
    if (t->sort != s)
      throw SortError(SortErrorKind::SortMismatch, pos, "expected sort " + s.str() + ", got " + t->sort.str());
    return t;
  }
};

}  // namespace

TermPtr elaborate(const RawTerm& raw, const Alphabet& sigma, std::vector<ScopeEntry>& scope,
                  std::optional<Sort> expected) {
  Elaborator e{sigma, scope};
  if (expected) return e.check(raw, *expected);
  return e.infer(raw);
}

TermPtr parse_term(std::string_view text, const Alphabet& sigma) {
  RawPtr r = parse_raw_term(text);
  std::vector<ScopeEntry> scope;
  return elaborate(*r, sigma, scope);
}

// ---------------------------------------------------------------- printing

namespace {

struct Printer {
  const Alphabet& sigma;
  std::vector<std::string> names;
  std::ostringstream os;

  bool bound(const std::string& n) const {
    for (const auto& x : names)
      if (x == n) return true;
    return false;
  }

  std::string fresh(std::string n) {
    if (n.empty()) n = "x";
    while (bound(n) || sigma.contains(n) || n == "Y") n += '\'';
    return n;
  }

  void atom(const Term& t) {
    bool simple = t.kind == TermKind::Var || (t.kind == TermKind::Const && t.kids.empty()) ||
                  t.kind == TermKind::Y;
    if (simple) {
      print(t);
    } else {
      os << '(';
      print(t);
      os << ')';
    }
  }

  void print(const Term& t) {
    switch (t.kind) {
      case TermKind::Var:
        os << names[names.size() - 1 - t.index];
        return;
      case TermKind::Const:
        os << t.name;
        for (const auto& k : t.kids) {
          os << ' ';
          atom(*k);
        }
        return;
      case TermKind::Y:
        os << "Y[" << t.sort.result().str() << ']';
        return;
      case TermKind::Lam: {
        std::string n = fresh(t.name);
        os << '\\' << n << ':' << t.binder_sort.str() << ". ";
        names.push_back(n);
        print(*t.kids[0]);
        names.pop_back();
        return;
      }
      case TermKind::App: {
        std::vector<const Term*> args;
        const Term* h = &t;
        while (h->kind == TermKind::App) {
          args.push_back(h->kids[1].get());
          h = h->kids[0].get();
        }
        if (h->kind == TermKind::Y && args.back()->kind == TermKind::Lam)
          os << "Y";
        else
          atom(*h);
        for (auto it = args.rbegin(); it != args.rend(); ++it) {
          os << ' ';
          atom(**it);
        }
        return;
      }
    }
  }
};

}  // namespace

std::string print_term(const Term& t, const Alphabet& sigma) {
  Printer p{sigma, {}, {}};
  p.print(t);
  return p.os.str();
}

// ------------------------------------------------------------ s-expressions

namespace {

void sexpr_rec(const Term& t, std::ostream& os) {
  switch (t.kind) {
    case TermKind::Var:
      os << "(var " << t.name << ' ' << t.index << ')';
      return;
    case TermKind::Const:
      os << "(const " << t.name;
      for (const auto& k : t.kids) {
        os << ' ';
        sexpr_rec(*k, os);
      }
      os << ')';
      return;
    case TermKind::App:
      os << "(app ";
      sexpr_rec(*t.kids[0], os);
      os << ' ';
      sexpr_rec(*t.kids[1], os);
      os << ')';
      return;
    case TermKind::Lam:
      os << "(lam " << t.name << ' ' << t.binder_sort.sexpr() << ' ';
      sexpr_rec(*t.kids[0], os);
      os << ')';
      return;
    case TermKind::Y:
      os << "(Y " << t.sort.result().sexpr() << ')';
      return;
  }
}

Sort sort_from_sexpr(const detail::SExpr& e) {
  if (e.is_atom()) {
    if (e.atom != "o") throw ParseError(e.pos, "unknown sort " + e.atom);
    return Sort::base();
  }
  if (e.list.size() != 3 || !e.list[0].is_atom() || e.list[0].atom != "->")
    throw ParseError(e.pos, "malformed sort");
  return Sort::arrow(sort_from_sexpr(e.list[1]), sort_from_sexpr(e.list[2]));
}

TermPtr term_from(const detail::SExpr& e, std::vector<Sort>& ctx) {
  if (e.is_atom() || e.list.empty() || !e.list[0].is_atom()) throw ParseError(e.pos, "malformed term");
  const std::string& tag = e.list[0].atom;
  const auto& l = e.list;
  auto need = [&](size_t n) {
    if (l.size() != n) throw ParseError(e.pos, "wrong number of fields in (" + tag + " ...)");
  };
  if (tag == "var") {
    need(3);
    unsigned idx = static_cast<unsigned>(std::stoul(l[2].atom));
    if (idx >= ctx.size()) throw SortError(SortErrorKind::UnboundVariable, e.pos, "index out of scope");
    return mk_var(l[1].atom, idx, ctx[ctx.size() - 1 - idx]);
  }
  if (tag == "const") {
    std::vector<TermPtr> args;
    for (size_t i = 2; i < l.size(); ++i) args.push_back(term_from(l[i], ctx));
    return mk_const(l[1].atom, std::move(args));
  }
  if (tag == "app") {
    need(3);
    TermPtr f = term_from(l[1], ctx);
    return mk_app(f, term_from(l[2], ctx));
  }
  if (tag == "lam") {
    need(4);
    Sort s = sort_from_sexpr(l[2]);
    ctx.push_back(s);
    TermPtr b = term_from(l[3], ctx);
    ctx.pop_back();
    return mk_lam(l[1].atom, s, b);
  }
  if (tag == "Y") {
    need(2);
    return mk_y(sort_from_sexpr(l[1]));
  }
  throw ParseError(e.pos, "unknown term tag " + tag);
}

}  // namespace

std::string term_to_sexpr(const Term& t, const Alphabet& sigma) {
  std::ostringstream os;
  os << "(term (symbols";
  for (const auto& [n, r] : sigma.declared()) os << " (" << n << ' ' << r << ')';
  os << ") ";
  sexpr_rec(t, os);
  os << ')';
  return os.str();
}

TermFile term_from_sexpr(std::string_view text) {
  detail::SExpr e = detail::read_sexpr(text);
  if (e.is_atom() || e.list.size() != 3 || !e.list[0].is_atom() || e.list[0].atom != "term")
    throw ParseError(e.pos, "expected (term (symbols ...) BODY)");
  const auto& syms = e.list[1];
  if (syms.is_atom() || syms.list.empty() || syms.list[0].atom != "symbols")
    throw ParseError(syms.pos, "expected (symbols ...)");
  TermFile f;
  for (size_t i = 1; i < syms.list.size(); ++i) {
    const auto& s = syms.list[i];
    if (s.is_atom() || s.list.size() != 2) throw ParseError(s.pos, "expected (name rank)");
    f.sigma.add(s.list[0].atom, static_cast<unsigned>(std::stoul(s.list[1].atom)));
  }
  std::vector<Sort> ctx;
  f.term = term_from(e.list[2], ctx);
  sort_check(*f.term, f.sigma);
  return f;
}

// -------------------------------------------------------------- reduction

const Term& subterm_at(const Term& t, const Position& pos) {
  const Term* cur = &t;
  for (unsigned i : pos) {
    if (i >= cur->kids.size()) throw ReductionError("position outside the term");
    cur = cur->kids[i].get();
  }
  return *cur;
}

namespace {

TermPtr shift(const TermPtr& t, int d, unsigned cutoff) {
  switch (t->kind) {
    case TermKind::Var:
      if (t->index < cutoff) return t;
      return mk_var(t->name, static_cast<unsigned>(static_cast<int>(t->index) + d), t->sort);
    case TermKind::Y:
      return t;
    case TermKind::Lam:
      return mk_lam(t->name, t->binder_sort, shift(t->kids[0], d, cutoff + 1));
    case TermKind::App:
      return mk_app(shift(t->kids[0], d, cutoff), shift(t->kids[1], d, cutoff));
    case TermKind::Const: {
      std::vector<TermPtr> k;
      for (const auto& a : t->kids) k.push_back(shift(a, d, cutoff));
      return mk_const(t->name, std::move(k));
    }
  }
  return t;
}

// Replaces index j by s (s already shifted to the current depth), and
// decrements indices above j.
TermPtr subst(const TermPtr& t, unsigned j, const TermPtr& s) {
  switch (t->kind) {
    case TermKind::Var:
      if (t->index == j) return s;
      if (t->index > j) return mk_var(t->name, t->index - 1, t->sort);
      return t;
    case TermKind::Y:
      return t;
    case TermKind::Lam:
      return mk_lam(t->name, t->binder_sort, subst(t->kids[0], j + 1, shift(s, 1, 0)));
    case TermKind::App:
      return mk_app(subst(t->kids[0], j, s), subst(t->kids[1], j, s));
    case TermKind::Const: {
      std::vector<TermPtr> k;
      for (const auto& a : t->kids) k.push_back(subst(a, j, s));
      return mk_const(t->name, std::move(k));
    }
  }
  return t;
}

TermPtr replace_at(const TermPtr& t, const Position& pos, size_t depth, const TermPtr& repl) {
  if (depth == pos.size()) return repl;
  unsigned i = pos[depth];
  TermPtr k = replace_at(t->kids[i], pos, depth + 1, repl);
  switch (t->kind) {
    case TermKind::Lam:
      return mk_lam(t->name, t->binder_sort, k);
    case TermKind::App:
      return i == 0 ? mk_app(k, t->kids[1]) : mk_app(t->kids[0], k);
    case TermKind::Const: {
      auto kids = t->kids;
      kids[i] = k;
      return mk_const(t->name, std::move(kids));
    }
    default:
      throw ReductionError("position outside the term");
  }
}

void collect_redexes(const Term& t, Position& pos, std::vector<Redex>& out) {
  if (t.kind == TermKind::App && t.kids[0]->kind == TermKind::Lam)
    out.push_back({pos, t.kids[0]->sort.order()});
  for (unsigned i = 0; i < t.kids.size(); ++i) {
    pos.push_back(i);
    collect_redexes(*t.kids[i], pos, out);
    pos.pop_back();
  }
}

}  // namespace

TermPtr subst0(const TermPtr& body, const TermPtr& arg) { return subst(body, 0, arg); }

BetaResult beta_step(const TermPtr& t, const Position& redex) {
  const Term& r = subterm_at(*t, redex);
  if (r.kind != TermKind::App || r.kids[0]->kind != TermKind::Lam)
    throw ReductionError("not a redex");
  const Term& lam = *r.kids[0];
  TermPtr contractum = subst0(lam.kids[0], r.kids[1]);
  return {replace_at(t, redex, 0, contractum), lam.sort.order()};
}

std::vector<Redex> redexes(const Term& t) {
  std::vector<Redex> out;
  Position pos;
  collect_redexes(t, pos, out);
  return out;
}

}  // namespace lamfin
