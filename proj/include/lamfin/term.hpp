#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lamfin/sort.hpp"

namespace lamfin {

struct SourcePos {
  int line = 0;
  int col = 0;
  std::string str() const { return std::to_string(line) + ":" + std::to_string(col); }
};

class ParseError : public std::runtime_error {
public:
  ParseError(SourcePos pos, const std::string& msg)
      : std::runtime_error(pos.str() + ": " + msg), pos(pos) {}
  SourcePos pos;
};

enum class SortErrorKind { SortMismatch, RankMismatch, UnboundVariable, MissingAnnotation };

const char* to_string(SortErrorKind k);

class SortError : public std::runtime_error {
public:
  SortError(SortErrorKind kind, SourcePos pos, const std::string& msg)
      : std::runtime_error(pos.str() + ": " + std::string(to_string(kind)) + ": " + msg),
        kind(kind), pos(pos) {}
  SortErrorKind kind;
  SourcePos pos;
};

class ReductionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kBr = "br";

// Ranked alphabet.  br (rank 2) is always present.
class Alphabet {
public:
  Alphabet();
  void add(const std::string& name, unsigned rank);
  std::optional<unsigned> rank(const std::string& name) const;
  bool contains(const std::string& name) const { return rank(name).has_value(); }
  // Declaration order, br excluded.
  const std::vector<std::pair<std::string, unsigned>>& declared() const { return declared_; }
  friend bool operator==(const Alphabet& a, const Alphabet& b) { return a.declared_ == b.declared_; }

private:
  std::map<std::string, unsigned> ranks_;
  std::vector<std::pair<std::string, unsigned>> declared_;
};

enum class TermKind { Const, Var, App, Lam, Y };

struct Term;
using TermPtr = std::shared_ptr<const Term>;

// Finite λY-term with de Bruijn variables.  Names are kept for printing only.
struct Term {
  TermKind kind;
  std::string name;      // symbol, variable name, or binder name
  unsigned index = 0;    // de Bruijn index of a Var
  Sort sort;             // sort of this node; for Y it is (α→α)→α
  Sort binder_sort;      // Lam only
  std::vector<TermPtr> kids;  // Const: args, App: {fn, arg}, Lam: {body}
};

// Builders check local sort consistency and throw SortError.
TermPtr mk_const(const std::string& symbol, std::vector<TermPtr> args);
TermPtr mk_var(const std::string& name, unsigned index, Sort sort);
TermPtr mk_app(TermPtr fn, TermPtr arg);
TermPtr mk_lam(const std::string& binder, Sort binder_sort, TermPtr body);
TermPtr mk_y(Sort alpha);

// Re-checks a whole closed term against the alphabet and returns its sort.
Sort sort_check(const Term& t, const Alphabet& sigma);

// α-equivalence (binder names ignored).
bool same_term(const Term& a, const Term& b);

// Named surface syntax as produced by the parser, before sort elaboration.
struct RawTerm;
using RawPtr = std::shared_ptr<const RawTerm>;
struct RawTerm {
  enum Kind { Ident, App, Lam, Y } kind;
  std::string name;
  std::optional<Sort> annot;  // Lam binder sort, or α for Y[α]
  std::vector<RawPtr> kids;
  SourcePos pos;
};

bool same_raw(const RawTerm& a, const RawTerm& b);
std::string print_raw(const RawTerm& t);

RawPtr parse_raw_term(std::string_view text);
Sort parse_sort(std::string_view text);

// Sort elaboration of surface syntax.  Free identifiers are looked up in
// `scope` (innermost last), then in the alphabet.
struct ScopeEntry {
  std::string name;
  Sort sort;
};
TermPtr elaborate(const RawTerm& raw, const Alphabet& sigma, std::vector<ScopeEntry>& scope,
                  std::optional<Sort> expected = std::nullopt);
TermPtr parse_term(std::string_view text, const Alphabet& sigma);

// Surface syntax with binder annotations; parse_term(print_term(t)) == t.
std::string print_term(const Term& t, const Alphabet& sigma);

// Serialized AST: (term (symbols (a 1) (e 0)) BODY).
std::string term_to_sexpr(const Term& t, const Alphabet& sigma);
struct TermFile {
  Alphabet sigma;
  TermPtr term;
};
TermFile term_from_sexpr(std::string_view text);

// Path of child indices from the root (Const args, App {0 fn, 1 arg}, Lam {0 body}).
using Position = std::vector<unsigned>;

const Term& subterm_at(const Term& t, const Position& pos);

struct BetaResult {
  TermPtr term;
  unsigned order;  // ord of the contracted λ
};
BetaResult beta_step(const TermPtr& t, const Position& redex);

struct Redex {
  Position pos;
  unsigned order;
};
std::vector<Redex> redexes(const Term& t);

// Substitutes `arg` for de Bruijn index 0 in `body`.
TermPtr subst0(const TermPtr& body, const TermPtr& arg);

}  // namespace lamfin
