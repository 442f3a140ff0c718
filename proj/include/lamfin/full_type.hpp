#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lamfin/sort.hpp"

namespace lamfin {

// Finite set of orders (flag orders F, marker orders M).  Orders are < 32.
class OrderSet {
public:
  constexpr OrderSet() = default;
  constexpr explicit OrderSet(std::uint32_t bits) : bits_(bits) {}
  OrderSet(std::initializer_list<unsigned> xs);

  static OrderSet range(unsigned n);  // {0, ..., n-1}

  bool contains(unsigned n) const { return n < 32 && ((bits_ >> n) & 1u); }
  void insert(unsigned n);
  void erase(unsigned n) {
    if (n < 32) bits_ &= ~(1u << n);
  }
  bool empty() const { return bits_ == 0; }
  unsigned size() const;
  std::uint32_t bits() const { return bits_; }
  std::vector<unsigned> elements() const;
  // Largest element + 1, or 0 for the empty set.
  unsigned bound() const;

  OrderSet below(unsigned n) const;    // A↾<n
  OrderSet atleast(unsigned n) const;  // A↾≥n

  bool subset_of(OrderSet o) const { return (bits_ & ~o.bits_) == 0; }
  bool disjoint(OrderSet o) const { return (bits_ & o.bits_) == 0; }

  friend OrderSet operator|(OrderSet a, OrderSet b) { return OrderSet(a.bits_ | b.bits_); }
  friend OrderSet operator&(OrderSet a, OrderSet b) { return OrderSet(a.bits_ & b.bits_); }
  friend OrderSet operator-(OrderSet a, OrderSet b) { return OrderSet(a.bits_ & ~b.bits_); }
  friend bool operator==(OrderSet a, OrderSet b) { return a.bits_ == b.bits_; }
  friend bool operator!=(OrderSet a, OrderSet b) { return a.bits_ != b.bits_; }

  std::string str() const;  // {0,1}

private:
  std::uint32_t bits_ = 0;
};

enum class RestrictMode { Below, AtLeast };
OrderSet restrict(OrderSet a, unsigned n, RestrictMode mode);

namespace detail {
struct ITypeRec;
struct FullTypeRec;
}  // namespace detail

class FullType;

// τ: either o, or T→τ' with T a set of full types.  Hash-consed; argument
// sets are kept in structural order without duplicates.
class IType {
public:
  IType();  // o
  static IType base() { return IType(); }
  static IType arrow(std::vector<FullType> args, IType result);

  bool is_base() const;
  const std::vector<FullType>& args() const;
  IType result() const;
  std::uint32_t id() const;
  std::string str() const;

  friend bool operator==(IType a, IType b) { return a.rec_ == b.rec_; }
  friend bool operator!=(IType a, IType b) { return a.rec_ != b.rec_; }

private:
  friend class FullType;
  explicit IType(const detail::ITypeRec* r) : rec_(r) {}
  const detail::ITypeRec* rec_;
};

// (k, F, M, τ).
class FullType {
public:
  // Throws std::invalid_argument when F or M leave {0..k-1} or intersect.
  static FullType make(unsigned order, OrderSet flags, OrderSet markers, IType itype);

  unsigned order() const;
  OrderSet flags() const;
  OrderSet markers() const;
  IType itype() const;
  std::uint32_t id() const;
  std::string str() const;

  friend bool operator==(FullType a, FullType b) { return a.rec_ == b.rec_; }
  friend bool operator!=(FullType a, FullType b) { return a.rec_ != b.rec_; }

private:
  friend class IType;
  explicit FullType(const detail::FullTypeRec* r) : rec_(r) {}
  const detail::FullTypeRec* rec_;
};

// Structural total orders, independent of interning history.
int compare(IType a, IType b);
int compare(FullType a, FullType b);
struct StructuralLess {
  bool operator()(FullType a, FullType b) const { return compare(a, b) < 0; }
};
void canonicalize(std::vector<FullType>& set);

// τ ∈ 𝒯^α.
bool has_sort(IType t, Sort s);
bool has_sort(FullType t, Sort s);

FullType parse_full_type(std::string_view text);
IType parse_itype(std::string_view text);

// Members of 𝒯^α and ℱ_k^α, memoized per sort (and order).  Throws
// std::length_error rather than build more than `limit` elements.
const std::vector<IType>& enumerate_itypes(Sort s, std::size_t limit = 1u << 20);
const std::vector<FullType>& enumerate_full_types(Sort s, unsigned k, std::size_t limit = 1u << 20);
// |ℱ_k^α|, or nullopt when it does not fit in 64 bits.
std::optional<std::uint64_t> count_full_types(Sort s, unsigned k);

}  // namespace lamfin

template <>
struct std::hash<lamfin::FullType> {
  std::size_t operator()(lamfin::FullType t) const { return std::hash<std::uint32_t>()(t.id()); }
};
template <>
struct std::hash<lamfin::IType> {
  std::size_t operator()(lamfin::IType t) const { return std::hash<std::uint32_t>()(t.id()); }
};
