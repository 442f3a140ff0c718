#include "lamfin/full_type.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <deque>
#include <map>
#include <mutex>
#include <stdexcept>

namespace lamfin {

// ---------------------------------------------------------------- OrderSet

OrderSet::OrderSet(std::initializer_list<unsigned> xs) {
  for (unsigned x : xs) insert(x);
}

OrderSet OrderSet::range(unsigned n) {
  if (n >= 32) throw std::out_of_range("order too large");
  return OrderSet((1u << n) - 1u);
}

void OrderSet::insert(unsigned n) {
  if (n >= 32) throw std::out_of_range("order too large");
  bits_ |= 1u << n;
}

unsigned OrderSet::size() const { return static_cast<unsigned>(std::popcount(bits_)); }

unsigned OrderSet::bound() const { return bits_ == 0 ? 0 : 32 - static_cast<unsigned>(std::countl_zero(bits_)); }

std::vector<unsigned> OrderSet::elements() const {
  std::vector<unsigned> out;
  for (unsigned i = 0; i < 32; ++i)
    if (contains(i)) out.push_back(i);
  return out;
}

OrderSet OrderSet::below(unsigned n) const {
  if (n >= 32) return *this;
  return OrderSet(bits_ & ((1u << n) - 1u));
}

OrderSet OrderSet::atleast(unsigned n) const { return *this - below(n); }

std::string OrderSet::str() const {
  std::string s = "{";
  bool first = true;
  for (unsigned e : elements()) {
    if (!first) s += ',';
    s += std::to_string(e);
    first = false;
  }
  return s + "}";
}

OrderSet restrict(OrderSet a, unsigned n, RestrictMode mode) {
  return mode == RestrictMode::Below ? a.below(n) : a.atleast(n);
}

// ---------------------------------------------------------------- interning

namespace detail {

struct ITypeRec {
  bool base = true;
  std::vector<FullType> args;
  const ITypeRec* result = nullptr;
  std::uint32_t id = 0;
};

struct FullTypeRec {
  unsigned order = 0;
  OrderSet flags;
  OrderSet markers;
  const ITypeRec* itype = nullptr;
  std::uint32_t id = 0;
};

}  // namespace detail

namespace {

struct Store {
  std::mutex mu;
  std::deque<detail::ITypeRec> itypes;
  std::deque<detail::FullTypeRec> fulls;
  std::map<std::pair<std::vector<std::uint32_t>, const detail::ITypeRec*>, const detail::ITypeRec*> arrow_index;
  std::map<std::tuple<unsigned, std::uint32_t, std::uint32_t, const detail::ITypeRec*>, const detail::FullTypeRec*>
      full_index;
  const detail::ITypeRec* base;

  Store() {
    itypes.emplace_back();
    base = &itypes.back();
  }
};

Store& store() {
  static Store s;
  return s;
}

}  // namespace

IType::IType() : rec_(store().base) {}

IType IType::arrow(std::vector<FullType> args, IType result) {
  canonicalize(args);
  std::vector<std::uint32_t> key;
  key.reserve(args.size());
  for (FullType t : args) key.push_back(t.id());
  auto& s = store();
  std::lock_guard<std::mutex> lock(s.mu);
  auto k = std::make_pair(std::move(key), result.rec_);
  auto it = s.arrow_index.find(k);
  if (it != s.arrow_index.end()) return IType(it->second);
  detail::ITypeRec rec;
  rec.base = false;
  rec.args = std::move(args);
  rec.result = result.rec_;
  rec.id = static_cast<std::uint32_t>(s.itypes.size());
  s.itypes.push_back(std::move(rec));
  s.arrow_index.emplace(std::move(k), &s.itypes.back());
  return IType(&s.itypes.back());
}

bool IType::is_base() const { return rec_->base; }

const std::vector<FullType>& IType::args() const {
  if (rec_->base) throw std::logic_error("IType::args on o");
  return rec_->args;
}

IType IType::result() const {
  if (rec_->base) throw std::logic_error("IType::result on o");
  return IType(rec_->result);
}

std::uint32_t IType::id() const { return rec_->id; }

std::string IType::str() const {
  if (is_base()) return "o";
  std::string s = "{";
  for (size_t i = 0; i < rec_->args.size(); ++i) {
    if (i) s += ',';
    s += rec_->args[i].str();
  }
  return s + "}->" + result().str();
}

FullType FullType::make(unsigned order, OrderSet flags, OrderSet markers, IType itype) {
  if (order >= 32) throw std::invalid_argument("order too large");
  if (!flags.subset_of(OrderSet::range(order)) || !markers.subset_of(OrderSet::range(order)))
    throw std::invalid_argument("flag and marker orders must lie below the type order");
  if (!flags.disjoint(markers)) throw std::invalid_argument("flags and markers intersect");
  auto& s = store();
  std::lock_guard<std::mutex> lock(s.mu);
  auto key = std::make_tuple(order, flags.bits(), markers.bits(), itype.rec_);
  auto it = s.full_index.find(key);
  if (it != s.full_index.end()) return FullType(it->second);
  detail::FullTypeRec rec;
  rec.order = order;
  rec.flags = flags;
  rec.markers = markers;
  rec.itype = itype.rec_;
  rec.id = static_cast<std::uint32_t>(s.fulls.size());
  s.fulls.push_back(rec);
  s.full_index.emplace(key, &s.fulls.back());
  return FullType(&s.fulls.back());
}

unsigned FullType::order() const { return rec_->order; }
OrderSet FullType::flags() const { return rec_->flags; }
OrderSet FullType::markers() const { return rec_->markers; }
IType FullType::itype() const { return IType(rec_->itype); }
std::uint32_t FullType::id() const { return rec_->id; }

std::string FullType::str() const {
  return "(" + std::to_string(order()) + "," + flags().str() + "," + markers().str() + "," + itype().str() + ")";
}

int compare(IType a, IType b) {
  if (a == b) return 0;
  if (a.is_base()) return -1;
  if (b.is_base()) return 1;
  const auto& x = a.args();
  const auto& y = b.args();
  for (size_t i = 0; i < x.size() && i < y.size(); ++i)
    if (int c = compare(x[i], y[i])) return c;
  if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
  return compare(a.result(), b.result());
}

int compare(FullType a, FullType b) {
  if (a == b) return 0;
  if (a.order() != b.order()) return a.order() < b.order() ? -1 : 1;
  if (a.flags() != b.flags()) return a.flags().bits() < b.flags().bits() ? -1 : 1;
  if (a.markers() != b.markers()) return a.markers().bits() < b.markers().bits() ? -1 : 1;
  return compare(a.itype(), b.itype());
}

void canonicalize(std::vector<FullType>& set) {
  std::sort(set.begin(), set.end(), StructuralLess());
  set.erase(std::unique(set.begin(), set.end()), set.end());
}

bool has_sort(IType t, Sort s) {
  if (t.is_base()) return s.is_base();
  if (s.is_base()) return false;
  for (FullType a : t.args())
    if (a.order() != s.order() || !has_sort(a.itype(), s.arg())) return false;
  return has_sort(t.result(), s.result());
}

bool has_sort(FullType t, Sort s) { return has_sort(t.itype(), s); }

// ----------------------------------------------------------------- parsing

namespace {

struct TypeParser {
  std::string_view s;
  size_t i = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::invalid_argument("full type, offset " + std::to_string(i) + ": " + msg);
  }
  void ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool eat(char c) {
    ws();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
  void need(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }
  unsigned number() {
    ws();
    size_t j = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (j == i) fail("expected a number");
    unsigned long v = std::stoul(std::string(s.substr(j, i - j)));
    if (v >= 32) fail("order too large");
    return static_cast<unsigned>(v);
  }
  OrderSet orders() {
    need('{');
    OrderSet out;
    if (eat('}')) return out;
    do {
      unsigned n = number();
      if (out.contains(n)) fail("repeated order");
      out.insert(n);
    } while (eat(','));
    need('}');
    return out;
  }
  FullType full() {
    need('(');
    unsigned k = number();
    need(',');
    OrderSet f = orders();
    need(',');
    OrderSet m = orders();
    need(',');
    IType t = itype();
    need(')');
    try {
      return FullType::make(k, f, m, t);
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }
  IType itype() {
    ws();
    if (eat('o')) return IType::base();
    need('{');
    std::vector<FullType> args;
    if (!eat('}')) {
      do {
        args.push_back(full());
      } while (eat(','));
      need('}');
    }
    size_t n = args.size();
    std::vector<FullType> copy = args;
    canonicalize(copy);
    if (copy.size() != n) fail("repeated element in a type set");
    ws();
    if (!(i + 1 < s.size() && s[i] == '-' && s[i + 1] == '>')) fail("expected '->'");
    i += 2;
    return IType::arrow(std::move(args), itype());
  }
  void end() {
    ws();
    if (i != s.size()) fail("trailing input");
  }
};

}  // namespace

FullType parse_full_type(std::string_view text) {
  TypeParser p{text};
  FullType t = p.full();
  p.end();
  return t;
}

IType parse_itype(std::string_view text) {
  TypeParser p{text};
  IType t = p.itype();
  p.end();
  return t;
}

// ------------------------------------------------------------- enumeration

namespace {

std::recursive_mutex enum_mu;
std::map<Sort, std::vector<IType>> itype_memo;
std::map<std::pair<Sort, unsigned>, std::vector<FullType>> full_memo;

}  // namespace

const std::vector<IType>& enumerate_itypes(Sort s, std::size_t limit) {
  std::lock_guard<std::recursive_mutex> lock(enum_mu);
  auto it = itype_memo.find(s);
  if (it != itype_memo.end()) return it->second;
  std::vector<IType> out;
  if (s.is_base()) {
    out.push_back(IType::base());
  } else {
    const auto& elems = enumerate_full_types(s.arg(), s.order(), limit);
    const auto& results = enumerate_itypes(s.result(), limit);
    if (elems.size() >= 40 || (std::uint64_t{1} << elems.size()) * results.size() > limit)
      throw std::length_error("type space of " + s.str() + " is too large to enumerate");
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << elems.size()); ++mask) {
      std::vector<FullType> subset;
      for (size_t j = 0; j < elems.size(); ++j)
        if ((mask >> j) & 1u) subset.push_back(elems[j]);
      for (IType r : results) out.push_back(IType::arrow(subset, r));
    }
  }
  return itype_memo.emplace(s, std::move(out)).first->second;
}

const std::vector<FullType>& enumerate_full_types(Sort s, unsigned k, std::size_t limit) {
  std::lock_guard<std::recursive_mutex> lock(enum_mu);
  auto key = std::make_pair(s, k);
  auto it = full_memo.find(key);
  if (it != full_memo.end()) return it->second;
  const auto& taus = enumerate_itypes(s, limit);
  std::vector<FullType> out;
  std::uint32_t all = OrderSet::range(k).bits();
  for (IType t : taus) {
    // F ranges over subsets of {0..k-1}; M over subsets of the complement.
    for (std::uint32_t f = 0;; f = (f - all) & all) {
      std::uint32_t rest = all & ~f;
      for (std::uint32_t m = 0;; m = (m - rest) & rest) {
        out.push_back(FullType::make(k, OrderSet(f), OrderSet(m), t));
        if (m == rest) break;
      }
      if (f == all) break;
    }
    if (out.size() > limit) throw std::length_error("too many full types");
  }
  canonicalize(out);
  return full_memo.emplace(key, std::move(out)).first->second;
}

namespace {

std::optional<std::uint64_t> mul(std::optional<std::uint64_t> a, std::optional<std::uint64_t> b) {
  if (!a || !b) return std::nullopt;
  if (*a != 0 && *b > UINT64_MAX / *a) return std::nullopt;
  return *a * *b;
}

std::optional<std::uint64_t> count_itypes(Sort s) {
  if (s.is_base()) return 1;
  auto elems = count_full_types(s.arg(), s.order());
  if (!elems || *elems >= 64) return std::nullopt;
  return mul(std::uint64_t{1} << *elems, count_itypes(s.result()));
}

}  // namespace

std::optional<std::uint64_t> count_full_types(Sort s, unsigned k) {
  std::optional<std::uint64_t> pairs = 1;
  for (unsigned i = 0; i < k; ++i) pairs = mul(pairs, 3);
  return mul(pairs, count_itypes(s));
}

}  // namespace lamfin
