#pragma once

// Generic dense polynomial algorithms over a runtime field object.  A field
// object carries the context a bare element type cannot (the prime of F_q,
// the descriptor of a valued field) and exposes arithmetic as methods.

#include <berk/errors.hpp>
#include <berk/field.hpp>
#include <berk/rational.hpp>

#include <concepts>
#include <vector>

namespace berk {

template <class F>
concept field_ops = requires(const F f, const typename F::Elem& a, const typename F::Elem& b) {
  { f.zero() } -> std::same_as<typename F::Elem>;
  { f.one() } -> std::same_as<typename F::Elem>;
  { f.add(a, b) } -> std::same_as<typename F::Elem>;
  { f.sub(a, b) } -> std::same_as<typename F::Elem>;
  { f.mul(a, b) } -> std::same_as<typename F::Elem>;
  { f.div(a, b) } -> std::same_as<typename F::Elem>;
  { f.neg(a) } -> std::same_as<typename F::Elem>;
  { f.from_int(long()) } -> std::same_as<typename F::Elem>;
  { f.is_zero(a) } -> std::same_as<bool>;
  { f.eq(a, b) } -> std::same_as<bool>;
};

// The rational numbers.
struct QOps {
  using Elem = Rat;
  Elem zero() const { return Rat(0); }
  Elem one() const { return Rat(1); }
  Elem add(const Elem& a, const Elem& b) const { return a + b; }
  Elem sub(const Elem& a, const Elem& b) const { return a - b; }
  Elem mul(const Elem& a, const Elem& b) const { return a * b; }
  Elem div(const Elem& a, const Elem& b) const {
    require(b != 0, "division by zero");
    return a / b;
  }
  Elem neg(const Elem& a) const { return -a; }
  Elem from_int(long n) const { return Rat(n); }
  bool is_zero(const Elem& a) const { return a == 0; }
  bool eq(const Elem& a, const Elem& b) const { return a == b; }
  unsigned characteristic() const { return 0; }
};

// A valued-field backend viewed as a coefficient field.  Division over the
// Laurent backends is exact ring division and may throw; the algorithms
// below only divide where their contracts allow it.
struct ValuedOps {
  using Elem = FieldElement;
  FieldDescriptor d;
  explicit ValuedOps(const FieldDescriptor& desc) : d(desc) {}
  Elem zero() const { return FieldElement::zero(d); }
  Elem one() const { return FieldElement::one(d); }
  Elem add(const Elem& a, const Elem& b) const { return a + b; }
  Elem sub(const Elem& a, const Elem& b) const { return a - b; }
  Elem mul(const Elem& a, const Elem& b) const { return a * b; }
  Elem div(const Elem& a, const Elem& b) const { return a / b; }
  Elem neg(const Elem& a) const { return -a; }
  Elem from_int(long n) const { return FieldElement::from_int(d, n); }
  bool is_zero(const Elem& a) const { return a.is_zero(); }
  bool eq(const Elem& a, const Elem& b) const { return a == b; }
  unsigned characteristic() const { return d.kind == FieldKind::LaurentFp ? d.p : 0; }
};

template <field_ops F>
using PolyVec = std::vector<typename F::Elem>;

template <field_ops F>
void poly_trim(const F& f, PolyVec<F>& p) {
  while (!p.empty() && f.is_zero(p.back())) p.pop_back();
}

template <field_ops F>
long poly_degree(const PolyVec<F>& p) {
  return static_cast<long>(p.size()) - 1;  // -1 for the zero polynomial
}

template <field_ops F>
bool poly_is_zero(const PolyVec<F>& p) {
  return p.empty();
}

template <field_ops F>
PolyVec<F> poly_add(const F& f, const PolyVec<F>& a, const PolyVec<F>& b) {
  PolyVec<F> r(std::max(a.size(), b.size()), f.zero());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] = f.add(r[i], b[i]);
  poly_trim(f, r);
  return r;
}

template <field_ops F>
PolyVec<F> poly_neg(const F& f, const PolyVec<F>& a) {
  PolyVec<F> r = a;
  for (auto& c : r) c = f.neg(c);
  return r;
}

template <field_ops F>
PolyVec<F> poly_sub(const F& f, const PolyVec<F>& a, const PolyVec<F>& b) {
  return poly_add(f, a, poly_neg(f, b));
}

template <field_ops F>
PolyVec<F> poly_mul(const F& f, const PolyVec<F>& a, const PolyVec<F>& b) {
  if (a.empty() || b.empty()) return {};
  PolyVec<F> r(a.size() + b.size() - 1, f.zero());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = f.add(r[i + j], f.mul(a[i], b[j]));
  poly_trim(f, r);
  return r;
}

template <field_ops F>
PolyVec<F> poly_scale(const F& f, const typename F::Elem& c, const PolyVec<F>& a) {
  PolyVec<F> r = a;
  for (auto& x : r) x = f.mul(c, x);
  poly_trim(f, r);
  return r;
}

template <field_ops F>
typename F::Elem poly_eval(const F& f, const PolyVec<F>& p, const typename F::Elem& x) {
  typename F::Elem acc = f.zero();
  for (std::size_t i = p.size(); i-- > 0;) acc = f.add(f.mul(acc, x), p[i]);
  return acc;
}

template <field_ops F>
PolyVec<F> poly_derivative(const F& f, const PolyVec<F>& p) {
  PolyVec<F> r;
  for (std::size_t i = 1; i < p.size(); ++i)
    r.push_back(f.mul(f.from_int(static_cast<long>(i)), p[i]));
  poly_trim(f, r);
  return r;
}

// Coefficients of p(a + u) in u, by the Horner-style Taylor shift.
template <field_ops F>
PolyVec<F> poly_shift(const F& f, const PolyVec<F>& p, const typename F::Elem& a) {
  PolyVec<F> b = p;
  if (b.size() < 2 || f.is_zero(a)) return b;
  const std::size_t d = b.size() - 1;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = d - 1; j + 1 > i; --j) b[j] = f.add(b[j], f.mul(a, b[j + 1]));
  return b;
}

// Quotient and remainder; divides by the leading coefficient of b.
template <field_ops F>
std::pair<PolyVec<F>, PolyVec<F>> poly_divmod(const F& f, PolyVec<F> a, const PolyVec<F>& b) {
  require(!b.empty(), "poly_divmod: zero divisor");
  if (a.size() < b.size()) return {{}, a};
  PolyVec<F> q(a.size() - b.size() + 1, f.zero());
  for (std::size_t i = q.size(); i-- > 0;) {
    typename F::Elem c = f.div(a[i + b.size() - 1], b.back());
    q[i] = c;
    for (std::size_t j = 0; j < b.size(); ++j)
      a[i + j] = f.sub(a[i + j], f.mul(c, b[j]));
  }
  poly_trim(f, q);
  poly_trim(f, a);
  return {q, a};
}

// Monic gcd by the Euclid algorithm.
template <field_ops F>
PolyVec<F> poly_gcd(const F& f, PolyVec<F> a, PolyVec<F> b) {
  poly_trim(f, a);
  poly_trim(f, b);
  while (!b.empty()) {
    auto [q, r] = poly_divmod(f, a, b);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty() && !f.eq(a.back(), f.one())) a = poly_scale(f, f.div(f.one(), a.back()), a);
  return a;
}

template <field_ops F>
PolyVec<F> poly_pow(const F& f, PolyVec<F> base, long e) {
  PolyVec<F> r = {f.one()};
  while (e > 0) {
    if (e & 1) r = poly_mul(f, r, base);
    e >>= 1;
    if (e) base = poly_mul(f, base, base);
  }
  return r;
}

template <field_ops F>
bool poly_eq(const F& f, const PolyVec<F>& a, const PolyVec<F>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!f.eq(a[i], b[i])) return false;
  return true;
}

// Multiplicity of root a (0 if p(a) != 0); exact synthetic division.
template <field_ops F>
long poly_root_multiplicity(const F& f, PolyVec<F> p, const typename F::Elem& a) {
  long m = 0;
  while (!p.empty() && f.is_zero(poly_eval(f, p, a))) {
    // divide by the monic (z - a); ring-safe
    PolyVec<F> q(p.size() - 1, f.zero());
    typename F::Elem carry = f.zero();
    for (std::size_t i = p.size(); i-- > 1;) {
      carry = f.add(p[i], f.mul(a, carry));
      q[i - 1] = carry;
    }
    p = std::move(q);
    poly_trim(f, p);
    ++m;
    if (m > 4096) throw invariant_error("poly_root_multiplicity: runaway");
  }
  return m;
}

}  // namespace berk
