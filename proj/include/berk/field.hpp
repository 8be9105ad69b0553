#pragma once

// Exact arithmetic in computable non-archimedean valued fields.  Three
// backends share one element type: Q with the p-adic valuation, and finite
// Laurent polynomials over Q or F_p with the t-adic valuation.  Valuations
// are normalized so the uniformizer (p or t) has valuation 1; they are never
// converted to floats.

#include <berk/errors.hpp>
#include <berk/rational.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace berk {

enum class FieldKind { PAdic, LaurentQ, LaurentFp };

inline bool is_prime(unsigned n) {
  if (n < 2) return false;
  for (unsigned d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

struct FieldDescriptor {
  FieldKind kind = FieldKind::PAdic;
  unsigned p = 2;  // prime; ignored by LaurentQ

  static FieldDescriptor padic(unsigned p) { return checked({FieldKind::PAdic, p}); }
  static FieldDescriptor laurent_q() { return {FieldKind::LaurentQ, 0}; }
  static FieldDescriptor laurent_fp(unsigned p) { return checked({FieldKind::LaurentFp, p}); }

  static FieldDescriptor checked(FieldDescriptor d) {
    if (d.kind != FieldKind::LaurentQ)
      require(is_prime(d.p), "field descriptor: p must be prime");
    return d;
  }

  // Characteristic of the residue field (0 for Q).
  unsigned residue_char() const { return kind == FieldKind::LaurentQ ? 0 : p; }
  bool finite_residue_field() const { return kind != FieldKind::LaurentQ; }

  std::string str() const {
    switch (kind) {
      case FieldKind::PAdic: return "p-adic(p=" + std::to_string(p) + ")";
      case FieldKind::LaurentQ: return "laurent-q";
      default: return "laurent-fp(p=" + std::to_string(p) + ")";
    }
  }

  friend bool operator==(const FieldDescriptor& a, const FieldDescriptor& b) {
    return a.kind == b.kind && (a.kind == FieldKind::LaurentQ || a.p == b.p);
  }
};

namespace detail {

inline long padic_val_int(Int n, unsigned p) {
  ensure(n != 0, "padic_val_int: zero");
  long v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

inline Int int_pow(const Int& b, long e) {
  Int r = 1;
  for (long i = 0; i < e; ++i) r *= b;
  return r;
}

// Inverse of a mod m for gcd(a, m) = 1, by extended Euclid.
inline Int mod_inverse(Int a, const Int& m) {
  a %= m;
  if (a < 0) a += m;
  Int r0 = m, r1 = a, s0 = 0, s1 = 1;
  while (r1 != 0) {
    Int q = r0 / r1;
    Int r2 = r0 - q * r1;
    Int s2 = s0 - q * s1;
    r0 = r1; r1 = r2;
    s0 = s1; s1 = s2;
  }
  require(r0 == 1, "mod_inverse: arguments not coprime");
  s0 %= m;
  if (s0 < 0) s0 += m;
  return s0;
}

inline Int modpow(Int b, Int e, const Int& m) {
  Int r = 1;
  b %= m;
  if (b < 0) b += m;
  while (e > 0) {
    if (e % 2 == 1) r = r * b % m;
    b = b * b % m;
    e /= 2;
  }
  return r;
}

// a/b mod p for p not dividing b, result in [0, p).
inline long mod_p(const Rat& q, unsigned p) {
  Int den = rat_den(q) % p;
  require(den != 0, "mod_p: denominator divisible by p");
  Int r = rat_num(q) % p * mod_inverse(den, Int(p)) % p;
  if (r < 0) r += p;
  return static_cast<long>(r);
}

// Least nonnegative representative of a/b mod p^N (b a p-unit).
inline Int mod_prime_power(const Rat& q, unsigned p, long N) {
  Int m = int_pow(Int(p), N);
  Int num = rat_num(q) % m;
  if (num < 0) num += m;
  return num * mod_inverse(rat_den(q), m) % m;
}

inline std::optional<Rat> rational_sqrt_exact(const Rat& q) {
  if (q < 0) return std::nullopt;
  Int n = boost::multiprecision::sqrt(rat_num(q));
  Int d = boost::multiprecision::sqrt(rat_den(q));
  if (n * n != rat_num(q) || d * d != rat_den(q)) return std::nullopt;
  return Rat(n, d);
}

}  // namespace detail

struct LaurentTerm {
  long exp;
  Rat coeff;
  friend bool operator==(const LaurentTerm&, const LaurentTerm&) = default;
};

class FieldElement {
public:
  FieldElement() : d_(FieldDescriptor::laurent_q()) {}

  static FieldElement zero(const FieldDescriptor& d) { return FieldElement(d); }
  static FieldElement one(const FieldDescriptor& d) { return from_rational(d, Rat(1)); }

  // Constant element.  Over laurent-fp the rational is reduced mod p, which
  // requires the denominator to be a p-unit.
  static FieldElement from_rational(const FieldDescriptor& d, const Rat& q) {
    FieldElement x(d);
    if (d.kind == FieldKind::PAdic) {
      x.q_ = q;
    } else if (q != 0) {
      x.t_ = {{0, q}};
      x.normalize_laurent();
    }
    return x;
  }

  static FieldElement from_int(const FieldDescriptor& d, long n) {
    return from_rational(d, Rat(n));
  }

  static FieldElement laurent(const FieldDescriptor& d, std::vector<LaurentTerm> terms) {
    require(d.kind != FieldKind::PAdic, "laurent payload on a p-adic field");
    FieldElement x(d);
    x.t_ = std::move(terms);
    x.normalize_laurent();
    return x;
  }

  // pi^k where pi is the uniformizer (p or t); k may be negative.
  static FieldElement uniformizer_pow(const FieldDescriptor& d, long k) {
    if (d.kind == FieldKind::PAdic) {
      Rat q(1);
      for (long i = 0; i < (k >= 0 ? k : -k); ++i) q *= d.p;
      return from_rational(d, k >= 0 ? q : Rat(1) / q);
    }
    FieldElement x(d);
    x.t_ = {{k, Rat(1)}};
    return x;
  }

  const FieldDescriptor& field() const { return d_; }

  bool is_zero() const {
    return d_.kind == FieldKind::PAdic ? q_ == 0 : t_.empty();
  }

  // v(x) with v(0) = +inf and v(uniformizer) = 1.
  LogValue valuation() const {
    if (is_zero()) return LogValue::pos_inf();
    if (d_.kind == FieldKind::PAdic) {
      long v = 0;
      const Int num = rat_num(q_), den = rat_den(q_);
      if (num % d_.p == 0) v = detail::padic_val_int(num, d_.p);
      else if (den % d_.p == 0) v = -detail::padic_val_int(den, d_.p);
      return LogValue(v);
    }
    return LogValue(t_.front().exp);  // terms sorted by exponent
  }

  // Image in the residue field, as a canonical rational (an integer in
  // [0, p) when the residue field is F_p).  Requires v(x) >= 0.
  Rat residue() const {
    require(!(valuation() < LogValue(0)), "residue: negative valuation");
    if (d_.kind == FieldKind::PAdic) return Rat(detail::mod_p(q_, d_.p));
    for (const auto& t : t_)
      if (t.exp == 0) return t.coeff;
    return Rat(0);
  }

  friend FieldElement operator+(const FieldElement& a, const FieldElement& b) {
    a.check_same(b);
    FieldElement r(a.d_);
    if (a.d_.kind == FieldKind::PAdic) {
      r.q_ = a.q_ + b.q_;
      return r;
    }
    r.t_ = a.t_;
    r.t_.insert(r.t_.end(), b.t_.begin(), b.t_.end());
    r.normalize_laurent();
    return r;
  }

  FieldElement operator-() const {
    FieldElement r(*this);
    if (d_.kind == FieldKind::PAdic) {
      r.q_ = -q_;
    } else {
      for (auto& t : r.t_) t.coeff = -t.coeff;
      r.normalize_laurent();
    }
    return r;
  }

  friend FieldElement operator-(const FieldElement& a, const FieldElement& b) { return a + (-b); }

  friend FieldElement operator*(const FieldElement& a, const FieldElement& b) {
    a.check_same(b);
    FieldElement r(a.d_);
    if (a.d_.kind == FieldKind::PAdic) {
      r.q_ = a.q_ * b.q_;
      return r;
    }
    std::map<long, Rat> acc;
    for (const auto& s : a.t_)
      for (const auto& t : b.t_) acc[s.exp + t.exp] += s.coeff * t.coeff;
    for (auto& [e, c] : acc) r.t_.push_back({e, c});
    r.normalize_laurent();
    return r;
  }

  // Exact division.  The p-adic backend is a true field.  Laurent backends
  // are rings of finite Laurent polynomials, so x/y is defined only when the
  // quotient is again a finite Laurent polynomial; otherwise this raises.
  // Operations that only need valuations avoid division altogether.
  friend FieldElement operator/(const FieldElement& a, const FieldElement& b) {
    a.check_same(b);
    require(!b.is_zero(), "division by zero");
    if (a.d_.kind == FieldKind::PAdic) {
      FieldElement r(a.d_);
      r.q_ = a.q_ / b.q_;
      return r;
    }
    if (a.is_zero()) return a;
    return a.laurent_exact_div(b);
  }

  FieldElement pow(long k) const {
    if (k < 0) return one(d_) / pow(-k);
    FieldElement r = one(d_), base = *this;
    long e = k;
    while (e > 0) {
      if (e & 1) r = r * base;
      e >>= 1;
      if (e) base = base * base;
    }
    return r;
  }

  friend bool operator==(const FieldElement& a, const FieldElement& b) {
    if (!(a.d_ == b.d_)) return false;
    return a.d_.kind == FieldKind::PAdic ? a.q_ == b.q_ : a.t_ == b.t_;
  }

  const Rat& rational_payload() const {
    ensure(d_.kind == FieldKind::PAdic, "rational payload on a Laurent field");
    return q_;
  }
  const std::vector<LaurentTerm>& laurent_payload() const {
    ensure(d_.kind != FieldKind::PAdic, "laurent payload on a p-adic field");
    return t_;
  }

  std::string str() const {
    if (d_.kind == FieldKind::PAdic) return rat_str(q_);
    if (t_.empty()) return "0";
    std::string s;
    for (std::size_t i = 0; i < t_.size(); ++i) {
      if (i) s += " + ";
      s += "(" + rat_str(t_[i].coeff) + ")*t^" + std::to_string(t_[i].exp);
    }
    return s;
  }

private:
  explicit FieldElement(const FieldDescriptor& d) : d_(d), q_(0) {}

  void check_same(const FieldElement& b) const {
    require(d_ == b.d_, "field descriptor mismatch");
  }

  Rat coeff_canon(const Rat& c) const {
    return d_.kind == FieldKind::LaurentFp ? Rat(detail::mod_p(c, d_.p)) : c;
  }

  void normalize_laurent() {
    std::map<long, Rat> acc;
    for (const auto& t : t_) acc[t.exp] += t.coeff;
    t_.clear();
    for (auto& [e, c] : acc) {
      Rat r = coeff_canon(c);
      if (r != 0) t_.push_back({e, r});
    }
  }

  // Long division over the coefficient field (Q or F_p) after shifting both
  // operands to plain polynomials; exact iff the remainder vanishes.
  FieldElement laurent_exact_div(const FieldElement& b) const {
    const long sa = t_.front().exp, sb = b.t_.front().exp;
    auto poly_of = [](const FieldElement& x, long shift) {
      std::vector<Rat> c(static_cast<std::size_t>(x.t_.back().exp - shift) + 1, Rat(0));
      for (const auto& t : x.t_) c[static_cast<std::size_t>(t.exp - shift)] = t.coeff;
      return c;
    };
    std::vector<Rat> num = poly_of(*this, sa);
    const std::vector<Rat> den = poly_of(b, sb);
    if (num.size() < den.size()) throw precondition_error("laurent division is not exact");

    const Rat lead_inv = d_.kind == FieldKind::LaurentQ
                             ? Rat(1) / den.back()
                             : Rat(detail::mod_inverse(Int(detail::mod_p(den.back(), d_.p)), Int(d_.p)));
    std::vector<Rat> q(num.size() - den.size() + 1, Rat(0));
    for (std::size_t i = q.size(); i-- > 0;) {
      Rat c = coeff_canon(num[i + den.size() - 1] * lead_inv);
      q[i] = c;
      for (std::size_t j = 0; j < den.size(); ++j) num[i + j] -= c * den[j];
    }
    for (const Rat& r : num)
      if (coeff_canon(r) != 0) throw precondition_error("laurent division is not exact");
    std::vector<LaurentTerm> terms;
    for (std::size_t i = 0; i < q.size(); ++i)
      if (q[i] != 0) terms.push_back({static_cast<long>(i) + sa - sb, q[i]});
    return laurent(d_, std::move(terms));
  }

  FieldDescriptor d_;
  Rat q_;                       // PAdic payload
  std::vector<LaurentTerm> t_;  // Laurent payload, sorted, nonzero coefficients
};

inline LogValue valuation(const FieldElement& x) { return x.valuation(); }

// Units zeta_1..zeta_m with pairwise distinct nonzero residues, so that
// v(zeta_i) = 0 and v(zeta_i - zeta_j) = 0 for i != j.  Over F_p there are
// only p - 1 nonzero residue classes, hence the bound.
inline std::vector<FieldElement> distinct_residue_sequence(const FieldDescriptor& d, unsigned m) {
  if (d.finite_residue_field())
    require(m + 1 <= d.p, "residue field too small for " + std::to_string(m) + " distinct units");
  std::vector<FieldElement> out;
  out.reserve(m);
  for (unsigned i = 1; i <= m; ++i) out.push_back(FieldElement::from_int(d, i));
  return out;
}

namespace detail {

// Square roots of x over the coefficient field of a Laurent backend.
inline std::optional<Rat> coeff_sqrt(const FieldDescriptor& d, const Rat& c) {
  if (d.kind == FieldKind::LaurentQ) return rational_sqrt_exact(c);
  for (long s = 0; s < static_cast<long>(d.p); ++s)
    if (s * s % d.p == detail::mod_p(c, d.p)) return Rat(s);
  return std::nullopt;
}

}  // namespace detail

// Square root to prescribed precision: returns a with v(a^2 - x) >= precision
// and 2 v(a) = v(x).  Deterministic branch: among the integer representatives
// mod p^N solving the congruence, the least nonnegative one is returned.
// Over the Laurent backends only exact squares in the ring have roots.
inline FieldElement hensel_sqrt(const FieldElement& x, const LogValue& precision) {
  require(!x.is_zero(), "hensel_sqrt: zero input");
  const FieldDescriptor& d = x.field();
  const LogValue v = x.valuation();
  require(rat_is_integer(v.finite()) && rat_num(v.finite()) % 2 == 0,
          "hensel_sqrt: odd valuation");
  const long vx = static_cast<long>(rat_num(v.finite()));

  if (d.kind != FieldKind::PAdic) {
    // A square root in the Laurent ring, if any, is a polynomial in the
    // shifted coordinate of half the degree; solve for its coefficients and
    // verify by squaring.
    const FieldElement unit = x / FieldElement::uniformizer_pow(d, vx);
    const auto& terms = unit.laurent_payload();
    const long n = terms.back().exp;
    require(n % 2 == 0, "hensel_sqrt: not a square in the Laurent ring");
    std::vector<Rat> c(static_cast<std::size_t>(n) + 1, Rat(0));
    for (const auto& t : terms) c[static_cast<std::size_t>(t.exp)] = t.coeff;
    const long m = n / 2;
    std::vector<Rat> g(static_cast<std::size_t>(m) + 1, Rat(0));
    if (d.residue_char() == 2) {
      // char 2: squaring doubles exponents, so squares have even support
      for (long e = 0; e <= n; ++e) {
        if (c[e] == 0) continue;
        require(e % 2 == 0, "hensel_sqrt: not a square in the Laurent ring");
        g[e / 2] = c[e];  // F_2 coefficients are their own square roots
      }
    } else {
      auto s0 = detail::coeff_sqrt(d, c[0]);
      require(s0.has_value(), "hensel_sqrt: leading coefficient is not a square");
      g[0] = *s0;
      const Rat inv2g0 =
          d.kind == FieldKind::LaurentFp
              ? Rat(detail::mod_inverse(Int(detail::mod_p(2 * g[0], d.p)), Int(d.p)))
              : Rat(1) / (2 * g[0]);
      for (long k = 1; k <= m; ++k) {
        Rat acc = c[k];
        for (long j = 1; j < k; ++j) acc -= g[j] * g[k - j];
        acc *= inv2g0;
        g[k] = d.kind == FieldKind::LaurentFp ? Rat(detail::mod_p(acc, d.p)) : acc;
      }
    }
    std::vector<LaurentTerm> rt;
    for (long j = 0; j <= m; ++j)
      if (g[j] != 0) rt.push_back({j, g[j]});
    FieldElement root = FieldElement::laurent(d, rt);
    require(root * root == unit, "hensel_sqrt: not a square in the Laurent ring");
    return root * FieldElement::uniformizer_pow(d, vx / 2);
  }

  // p-adic: lift a root of the unit part mod p^N with N >= precision - v(x).
  long N = 3;
  if (precision.is_finite()) {
    const Rat need = precision.finite() - Rat(vx);
    Int up = rat_num(need) / rat_den(need) + (rat_num(need) > 0 && rat_num(need) % rat_den(need) != 0 ? 1 : 0);
    N = std::max<long>(N, static_cast<long>(up));
  } else {
    require(precision.is_neg_inf(), "hensel_sqrt: +inf precision unsupported");
  }
  const Rat unit = x.rational_payload() / FieldElement::uniformizer_pow(d, vx).rational_payload();
  const Int M = detail::int_pow(Int(d.p), N);
  const Int u = detail::mod_prime_power(unit, d.p, N);

  Int s;
  if (d.p == 2) {
    require(detail::mod_prime_power(unit, 2, 3) == 1, "hensel_sqrt: unit part not 1 mod 8");
    s = 1;  // 1^2 = u mod 8; lift one bit per step
    for (long k = 3; k < N; ++k) {
      const Int step = detail::int_pow(Int(2), k + 1);
      if ((s * s - u) % step != 0) s += detail::int_pow(Int(2), k - 1);
    }
  } else {
    const long r0 = detail::mod_p(unit, d.p);
    require(detail::modpow(Int(r0), Int((d.p - 1) / 2), Int(d.p)) == 1,
            "hensel_sqrt: unit part is not a square mod p");
    long s0 = 0;
    for (long c = 1; c < static_cast<long>(d.p); ++c)
      if (c * c % d.p == r0) {
        s0 = c;
        break;
      }
    s = s0;
    Int mod(d.p);
    while (mod < M) {
      mod *= mod;  // Newton doubles the precision
      const Int inv2 = (mod + 1) / 2;
      s = (s + u % mod * detail::mod_inverse(s, mod)) % mod * inv2 % mod;
    }
    s %= M;
  }

  // All residues mod p^N solving c^2 = u; pick the least representative.
  std::vector<Int> cands = {s % M, (M - s % M) % M};
  if (d.p == 2 && N >= 2) {
    const Int half = M / 2;
    cands.push_back((s + half) % M);
    cands.push_back((M - s % M + half) % M);
  }
  Int best = -1;
  for (const Int& c : cands)
    if (c * c % M == u % M && (best < 0 || c < best)) best = c;
  ensure(best >= 0, "hensel_sqrt: lifting failed");

  const Rat a = Rat(best) * FieldElement::uniformizer_pow(d, vx / 2).rational_payload();
  FieldElement res = FieldElement::from_rational(d, a);
  ensure(!((res * res - x).valuation() < precision), "hensel_sqrt: postcondition failed");
  return res;
}

}  // namespace berk
