#pragma once

// Polynomials and rational maps over a valued field acting on Berkovich
// points: recentering, ball images, local and directional degrees, reduction
// to the residue field, derivative sup-norms, Mittag-Leffler partial
// fractions and the witness-point diameter oracle.
//
// Everything runs on one primitive: after recentering f at the ball center,
// the log of |f - f(a)| on the ball B(a, tau) is max_{i>=1} (i tau - v(c_i)),
// and the attaining indices carry the local behaviour (largest = degree on
// the ball, smallest = degree towards the center direction).

#include <berk/errors.hpp>
#include <berk/field.hpp>
#include <berk/galois.hpp>
#include <berk/pl.hpp>
#include <berk/poly.hpp>
#include <berk/residue_maps.hpp>
#include <berk/tree.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace berk {

struct PolynomialMap {
  FieldDescriptor desc;
  std::vector<FieldElement> coeffs;  // ascending, trimmed

  static PolynomialMap make(const FieldDescriptor& d, std::vector<FieldElement> c) {
    ValuedOps ops(d);
    poly_trim(ops, c);
    return {d, std::move(c)};
  }
  static PolynomialMap from_rationals(const FieldDescriptor& d, const std::vector<Rat>& c) {
    std::vector<FieldElement> v;
    v.reserve(c.size());
    for (const Rat& q : c) v.push_back(FieldElement::from_rational(d, q));
    return make(d, std::move(v));
  }
  // z^k scaled by c
  static PolynomialMap monomial(const FieldDescriptor& d, long k, const FieldElement& c) {
    std::vector<FieldElement> v(static_cast<std::size_t>(k) + 1, FieldElement::zero(d));
    v.back() = c;
    return make(d, std::move(v));
  }

  long degree() const { return static_cast<long>(coeffs.size()) - 1; }
  bool is_constant() const { return degree() <= 0; }
  FieldElement eval(const FieldElement& x) const { return poly_eval(ValuedOps(desc), coeffs, x); }
  PolynomialMap derivative() const {
    return make(desc, poly_derivative(ValuedOps(desc), coeffs));
  }
  friend bool operator==(const PolynomialMap& a, const PolynomialMap& b) {
    return a.desc == b.desc && poly_eq(ValuedOps(a.desc), a.coeffs, b.coeffs);
  }
};

struct RationalMap {
  PolynomialMap num, den;

  // Over the p-adic backend common factors are removed by a gcd over Q; the
  // Laurent coefficient rings have no effective fraction-field gcd here, so
  // callers keep those inputs coprime.
  static RationalMap make(PolynomialMap p, PolynomialMap q) {
    require(p.desc == q.desc, "rational map: mixed descriptors");
    require(q.degree() >= 0, "rational map: zero denominator");
    if (p.desc.kind == FieldKind::PAdic && p.degree() >= 0) {
      ValuedOps ops(p.desc);
      auto g = poly_gcd(ops, p.coeffs, q.coeffs);
      if (poly_degree<ValuedOps>(g) > 0) {
        p.coeffs = poly_divmod(ops, p.coeffs, g).first;
        q.coeffs = poly_divmod(ops, q.coeffs, g).first;
      }
    }
    return {std::move(p), std::move(q)};
  }
  static RationalMap of(PolynomialMap p) {
    auto one = PolynomialMap::make(p.desc, {FieldElement::one(p.desc)});
    return {std::move(p), std::move(one)};
  }

  const FieldDescriptor& field() const { return num.desc; }
  long degree() const { return std::max(num.degree(), den.degree()); }
};

inline PolynomialMap recenter(const PolynomialMap& f, const FieldElement& a) {
  return PolynomialMap::make(f.desc, poly_shift(ValuedOps(f.desc), f.coeffs, a));
}

namespace detail {

// max_{i>=1} (i tau - v(c_i)) over the recentered coefficients, together
// with the extreme attaining indices.  The largest index is the number of
// preimages of a generic point in the ball (the local degree), the smallest
// is the slope of log-diam from below.
struct BallGrowth {
  LogValue log_diam = LogValue::neg_inf();
  long largest = 0;   // 0 when no i >= 1 contributes (constant map)
  long smallest = 0;
};

inline BallGrowth ball_growth(const std::vector<FieldElement>& recentered, const LogValue& tau) {
  BallGrowth g;
  for (std::size_t i = 1; i < recentered.size(); ++i) {
    if (recentered[i].is_zero()) continue;
    LogValue term = static_cast<long>(i) * tau - recentered[i].valuation();
    if (g.largest == 0 || g.log_diam < term) {
      g.log_diam = term;
      g.largest = g.smallest = static_cast<long>(i);
    } else if (term == g.log_diam) {
      g.largest = static_cast<long>(i);
    }
  }
  return g;
}

// residue(A/B) for v(A) >= v(B) without ring division: scale both to units
// and divide in the residue field.
inline Rat residue_of_quotient(const FieldElement& A, const FieldElement& B) {
  require(!B.is_zero(), "residue_of_quotient: zero denominator");
  if (A.is_zero()) return Rat(0);
  const LogValue va = A.valuation(), vb = B.valuation();
  require(!(va < vb), "residue_of_quotient: valuation drop");
  if (vb < va) return Rat(0);
  const FieldDescriptor& d = A.field();
  const long v = static_cast<long>(rat_num(va.finite()));  // value group Z
  const Rat ra = (A * FieldElement::uniformizer_pow(d, -v)).residue();
  const Rat rb = (B * FieldElement::uniformizer_pow(d, -v)).residue();
  if (d.residue_char() == 0) return ra / rb;
  return Rat(detail::mod_p(ra * Rat(detail::mod_inverse(Int(detail::mod_p(rb, d.p)), Int(d.p))),
                           d.p));
}

}  // namespace detail

// |f(x)|: the multiplicative semi-norm of the polynomial at the point,
// i.e. the sup of |f| over the ball.
inline LogValue gauss_norm(const PolynomialMap& f, const BerkovichPoint& x) {
  require(!x.is_infinity(), "gauss_norm: infinity");
  if (x.type() == PointType::TypeI) return -f.eval(x.center()).valuation();
  auto rc = recenter(f, x.center());
  LogValue best = rc.coeffs.empty() ? LogValue::neg_inf() : -rc.coeffs[0].valuation();
  if (!rc.coeffs.empty() && rc.coeffs[0].is_zero()) best = LogValue::neg_inf();
  return log_max(best, detail::ball_growth(rc.coeffs, x.tau()).log_diam);
}

// |x - w| for a rigid w: max(diam(x), |center - w|).
inline LogValue log_distance_to_rigid(const BerkovichPoint& x, const FieldElement& w) {
  require(!x.is_infinity(), "log_distance_to_rigid: infinity");
  return log_max(x.tau(), -(x.center() - w).valuation());
}

inline BerkovichPoint image_of_ball(const PolynomialMap& f, const BerkovichPoint& x) {
  require(!x.is_infinity(), "image_of_ball: infinity");
  if (x.type() == PointType::TypeI) return BerkovichPoint::rigid(f.eval(x.center()));
  auto rc = recenter(f, x.center());
  auto g = detail::ball_growth(rc.coeffs, x.tau());
  const FieldElement b = rc.coeffs.empty() ? FieldElement::zero(f.desc) : rc.coeffs[0];
  if (g.largest == 0) return BerkovichPoint::rigid(b);  // constant map
  return BerkovichPoint::make(b, g.log_diam);
}

namespace detail {

// The denominator is pole-free on the closed ball iff the constant term of
// the recentered polynomial strictly dominates the Gauss norm.
inline bool constant_dominant(const std::vector<FieldElement>& rc, const LogValue& tau) {
  if (rc.empty() || rc[0].is_zero()) return false;
  const LogValue v0 = -rc[0].valuation();
  for (std::size_t i = 1; i < rc.size(); ++i) {
    if (rc[i].is_zero()) continue;
    if (!(static_cast<long>(i) * tau - rc[i].valuation() < v0)) return false;
  }
  return true;
}

// Numerator of f(a+u) - f(a) for f = P/Q, up to the constant Q(a+u) Q(a):
// N(u) = P(a+u) Q(a) - P(a) Q(a+u).
inline std::vector<FieldElement> cross_numerator(const ValuedOps& ops,
                                                 const std::vector<FieldElement>& rcP,
                                                 const std::vector<FieldElement>& rcQ) {
  const FieldElement p0 = rcP.empty() ? ops.zero() : rcP[0];
  const FieldElement q0 = rcQ.empty() ? ops.zero() : rcQ[0];
  return poly_sub(ops, poly_scale(ops, q0, rcP), poly_scale(ops, p0, rcQ));
}

}  // namespace detail

// Log-diameter of the image ball of x under a rational map with pole-free
// denominator on ball(x); computed from valuations only, so it works over
// every backend (the image center may not be representable over the Laurent
// rings, see image_of_ball below).
inline LogValue rational_image_log_diam(const RationalMap& R, const BerkovichPoint& x) {
  require(!x.is_infinity() && x.in_hyperbolic_space(),
          "rational_image_log_diam: need a point of H");
  ValuedOps ops(R.field());
  auto rcP = poly_shift(ops, R.num.coeffs, x.center());
  auto rcQ = poly_shift(ops, R.den.coeffs, x.center());
  require(detail::constant_dominant(rcQ, x.tau()), "rational map has a pole in the ball");
  auto N = detail::cross_numerator(ops, rcP, rcQ);
  auto g = detail::ball_growth(N, x.tau());
  if (g.largest == 0) return LogValue::neg_inf();  // constant on the ball
  return g.log_diam + 2 * rcQ[0].valuation();
}

inline BerkovichPoint image_of_ball(const RationalMap& R, const BerkovichPoint& x) {
  require(!x.is_infinity(), "image_of_ball: infinity");
  if (x.type() == PointType::TypeI) {
    const FieldElement qv = R.den.eval(x.center());
    require(!qv.is_zero(), "rational map has a pole at the point");
    return BerkovichPoint::rigid(R.num.eval(x.center()) / qv);
  }
  const LogValue diam = rational_image_log_diam(R, x);
  const FieldElement center = R.num.eval(x.center()) / R.den.eval(x.center());
  if (diam.is_neg_inf()) return BerkovichPoint::rigid(center);
  return BerkovichPoint::make(center, diam);
}

// deg_x f: the largest index attaining the Newton-polygon maximum at tau.
inline long local_degree(const PolynomialMap& f, const BerkovichPoint& x) {
  require(x.in_hyperbolic_space(), "local_degree: need a point of type II or III");
  require(!f.is_constant(), "local_degree: constant map");
  auto rc = recenter(f, x.center());
  return detail::ball_growth(rc.coeffs, x.tau()).largest;
}

// Multiplicity of f at a rigid point: vanishing order of f(z) - f(a) at a.
inline long rigid_multiplicity(const PolynomialMap& f, const FieldElement& a) {
  require(!f.is_constant(), "rigid_multiplicity: constant map");
  auto rc = recenter(f, a);
  for (std::size_t i = 1; i < rc.coeffs.size(); ++i)
    if (!rc.coeffs[i].is_zero()) return static_cast<long>(i);
  throw invariant_error("rigid_multiplicity: nonconstant map with constant shift");
}

// Degree of the tangent map in a given direction at a type II point: the
// slope of log-diam into that direction (largest attaining index towards
// infinity, smallest after recentering at a lift of a residue class).
inline long directional_degree(const PolynomialMap& f, const BerkovichPoint& x,
                               const Direction& dir) {
  require(x.type() == PointType::TypeII, "directional_degree: base must be type II");
  require(!f.is_constant(), "directional_degree: constant map");
  if (dir.towards_infinity) return local_degree(f, x);
  const long tau = static_cast<long>(rat_num(x.tau().finite()));
  const FieldElement lift = FieldElement::from_rational(f.desc, dir.residue_class) *
                            FieldElement::uniformizer_pow(f.desc, -tau);
  auto rc = recenter(f, x.center() + lift);
  return detail::ball_growth(rc.coeffs, x.tau()).smallest;
}

// The reduction T_x f of a pole-free map at a type II point with type II
// image: a polynomial over the residue field (encoded by canonical
// rationals), of degree equal to the local degree.
struct ReducedRationalMap {
  unsigned residue_char = 0;  // 0 means the residue field is Q
  std::vector<Rat> num, den;  // den = {1} for pole-free reductions
  long degree() const {
    return std::max<long>(static_cast<long>(num.size()) - 1, static_cast<long>(den.size()) - 1);
  }
};

inline ReducedRationalMap reduction_map(const RationalMap& R, const BerkovichPoint& x) {
  require(x.type() == PointType::TypeII, "reduction_map: need an integral tau");
  ValuedOps ops(R.field());
  const long tau = static_cast<long>(rat_num(x.tau().finite()));
  auto rcP = poly_shift(ops, R.num.coeffs, x.center());
  auto rcQ = poly_shift(ops, R.den.coeffs, x.center());
  require(detail::constant_dominant(rcQ, x.tau()), "reduction_map: pole in the ball");
  auto N = detail::cross_numerator(ops, rcP, rcQ);
  auto g = detail::ball_growth(N, x.tau());
  require(g.largest >= 1, "reduction_map: map is constant on the ball");
  const LogValue tau_img = g.log_diam + 2 * rcQ[0].valuation();
  require(tau_img.is_finite() && rat_is_integer(tau_img.finite()),
          "reduction_map: image is not a type II point");
  // scale: coefficient i of the unit-normalized map is N_i pi^{-i tau} / D,
  // D = q0^2 pi^{-tau_img}, a unit multiple of the smallest coefficient.
  const FieldDescriptor& d = R.field();
  const FieldElement D = rcQ[0] * rcQ[0] *
                         FieldElement::uniformizer_pow(d, -static_cast<long>(rat_num(tau_img.finite())));
  ReducedRationalMap out;
  out.residue_char = d.residue_char();
  out.num.assign(1, Rat(0));
  for (std::size_t i = 1; i < N.size(); ++i) {
    if (N[i].is_zero()) {
      out.num.push_back(Rat(0));
      continue;
    }
    const FieldElement scaled = N[i] * FieldElement::uniformizer_pow(d, -static_cast<long>(i) * tau);
    out.num.push_back(detail::residue_of_quotient(scaled, D));
  }
  while (!out.num.empty() && out.num.back() == 0) out.num.pop_back();
  out.den = {Rat(1)};
  ensure(out.degree() == g.largest, "reduction_map: degree differs from the local degree");
  return out;
}

inline ReducedRationalMap reduction_map(const PolynomialMap& f, const BerkovichPoint& x) {
  return reduction_map(RationalMap::of(f), x);
}

inline RRMap<GFOps> to_gf(const GFOps& gf, const ReducedRationalMap& r) {
  auto conv = [&](const std::vector<Rat>& c) {
    PolyVec<GFOps> out;
    for (const Rat& q : c) out.push_back(gf.from_int(static_cast<long>(rat_num(q))));
    poly_trim(gf, out);
    return out;
  };
  return make_rrmap(gf, conv(r.num), conv(r.den));
}

inline RRMap<QOps> to_q(const ReducedRationalMap& r) {
  QOps q;
  PolyVec<QOps> num = r.num, den = r.den;
  poly_trim(q, num);
  poly_trim(q, den);
  return make_rrmap(q, num, den);
}

// p^n from the Frobenius factorization of the reduction; 1 in residue
// characteristic zero.
inline long inseparable_degree(const RationalMap& R, const BerkovichPoint& x) {
  const ReducedRationalMap red = reduction_map(R, x);
  if (red.residue_char == 0) return 1;
  GFOps gf(red.residue_char);
  const long n = frobenius_factor(gf, to_gf(gf, red)).second;
  long out = 1;
  for (long i = 0; i < n; ++i) out *= red.residue_char;
  return out;
}

inline long inseparable_degree(const PolynomialMap& f, const BerkovichPoint& x) {
  return inseparable_degree(RationalMap::of(f), x);
}

// log sup |f'| on ball(x), read off f's own recentered coefficients:
// max_{i>=1} ((i-1) tau - v(i c_i)).  -inf when f' vanishes identically.
inline LogValue derivative_sup_norm(const PolynomialMap& f, const BerkovichPoint& x) {
  require(x.in_hyperbolic_space(), "derivative_sup_norm: need a point of H");
  auto rc = recenter(f, x.center());
  LogValue best = LogValue::neg_inf();
  bool seen = false;
  for (std::size_t i = 1; i < rc.coeffs.size(); ++i) {
    const FieldElement ci = FieldElement::from_int(f.desc, static_cast<long>(i)) * rc.coeffs[i];
    if (ci.is_zero()) continue;
    const LogValue term = static_cast<long>(i - 1) * x.tau() - ci.valuation();
    best = seen ? log_max(best, term) : term;
    seen = true;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Mittag-Leffler decomposition with prescribed poles.

struct PartialFractions {
  PolynomialMap poly_part;
  struct Part {
    FieldElement pole;
    std::vector<FieldElement> coeffs;  // coeffs[i-1] is the weight of (z - pole)^{-i}
  };
  std::vector<Part> parts;
};

inline PartialFractions partial_fractions(const RationalMap& R,
                                          const std::vector<FieldElement>& poles) {
  ValuedOps ops(R.field());
  // peel off the prescribed linear factors (monic division, ring-safe)
  std::vector<long> mult(poles.size(), 0);
  PolyVec<ValuedOps> rest = R.den.coeffs;
  for (std::size_t j = 0; j < poles.size(); ++j) {
    for (std::size_t j2 = 0; j2 < j; ++j2)
      require(!(poles[j] == poles[j2]), "partial_fractions: repeated pole in the list");
    mult[j] = poly_root_multiplicity(ops, rest, poles[j]);
    require(mult[j] >= 1, "partial_fractions: listed pole does not divide the denominator");
    PolyVec<ValuedOps> lin = {ops.neg(poles[j]), ops.one()};
    for (long k = 0; k < mult[j]; ++k) rest = poly_divmod(ops, rest, lin).first;
  }
  require(poly_degree<ValuedOps>(rest) == 0,
          "partial_fractions: denominator does not split over the given poles");
  const FieldElement lc = rest[0];

  auto [polyq, rem] = poly_divmod(ops, R.num.coeffs, R.den.coeffs);
  PartialFractions out;
  out.poly_part = PolynomialMap::make(R.field(), polyq);

  for (std::size_t j = 0; j < poles.size(); ++j) {
    // Q_j = den / (z - z_j)^{m_j}; series of rem/Q_j at z_j to order m_j
    PolyVec<ValuedOps> qj = R.den.coeffs;
    PolyVec<ValuedOps> lin = {ops.neg(poles[j]), ops.one()};
    for (long k = 0; k < mult[j]; ++k) qj = poly_divmod(ops, qj, lin).first;
    auto tb = poly_shift(ops, rem, poles[j]);
    auto tq = poly_shift(ops, qj, poles[j]);
    tb.resize(std::max<std::size_t>(tb.size(), static_cast<std::size_t>(mult[j])), ops.zero());
    std::vector<FieldElement> series;
    for (long l = 0; l < mult[j]; ++l) {
      FieldElement acc = tb[static_cast<std::size_t>(l)];
      for (long r = 0; r < l; ++r) {
        const std::size_t k = static_cast<std::size_t>(l - r);
        if (k < tq.size()) acc = acc - series[static_cast<std::size_t>(r)] * tq[k];
      }
      series.push_back(acc / tq[0]);
    }
    PartialFractions::Part part;
    part.pole = poles[j];
    part.coeffs.assign(static_cast<std::size_t>(mult[j]), ops.zero());
    for (long l = 0; l < mult[j]; ++l)
      part.coeffs[static_cast<std::size_t>(mult[j] - l - 1)] = series[static_cast<std::size_t>(l)];
    out.parts.push_back(std::move(part));
  }

  // recombination check: poly_part + sum of principal parts equals R
  PolyVec<ValuedOps> D = {ops.one()};
  for (std::size_t j = 0; j < poles.size(); ++j) {
    PolyVec<ValuedOps> lin = {ops.neg(poles[j]), ops.one()};
    for (long k = 0; k < mult[j]; ++k) D = poly_mul(ops, D, lin);
  }
  PolyVec<ValuedOps> total = poly_mul(ops, out.poly_part.coeffs, D);
  for (std::size_t j = 0; j < poles.size(); ++j) {
    PolyVec<ValuedOps> lin = {ops.neg(poles[j]), ops.one()};
    for (long i = 1; i <= mult[j]; ++i) {
      PolyVec<ValuedOps> cof = {out.parts[j].coeffs[static_cast<std::size_t>(i - 1)]};
      PolyVec<ValuedOps> dh = D;
      for (long k = 0; k < i; ++k) dh = poly_divmod(ops, dh, lin).first;
      total = poly_add(ops, total, poly_mul(ops, cof, dh));
    }
  }
  ensure(poly_eq(ops, poly_scale(ops, lc, total), R.num.coeffs),
         "partial_fractions: recombination mismatch");
  return out;
}

// ---------------------------------------------------------------------------
// Witness-point diameter: the independent oracle for ball images.

// max over pairs of log |R(w_i) - R(w_j)|, computed by cross-multiplication
// so no field division is needed.  The ultrametric collapses the quadratic
// pair scan: the largest pairwise distance within a set equals the largest
// distance to any fixed member, so one base point suffices.
inline LogValue pairwise_image_log_diam(const RationalMap& R,
                                        const std::vector<FieldElement>& pts) {
  require(pts.size() >= 2, "pairwise_image_log_diam: need at least two points");
  std::vector<FieldElement> pv, qv;
  for (const auto& w : pts) {
    pv.push_back(R.num.eval(w));
    qv.push_back(R.den.eval(w));
    require(!qv.back().is_zero(), "pairwise_image_log_diam: pole at a sample");
  }
  LogValue best = LogValue::neg_inf();
  for (std::size_t j = 1; j < pts.size(); ++j) {
    const FieldElement cross = pv[0] * qv[j] - pv[j] * qv[0];
    best = log_max(best, -(cross.valuation() - qv[0].valuation() - qv[j].valuation()));
  }
  return best;
}

// Diameter of the image ball from deg(R) + 2 witnesses on the sphere of x,
// one per residue class; equals rational_image_log_diam on its domain.
inline LogValue diam_via_witnesses(const RationalMap& R, const BerkovichPoint& x) {
  require(x.type() == PointType::TypeII, "diam_via_witnesses: need a type II point");
  ValuedOps ops(R.field());
  auto rcQ = poly_shift(ops, R.den.coeffs, x.center());
  require(detail::constant_dominant(rcQ, x.tau()), "diam_via_witnesses: pole in the ball");
  const long degree = R.degree();
  require(degree >= 1, "diam_via_witnesses: constant map");
  const auto units = distinct_residue_sequence(R.field(), static_cast<unsigned>(degree) + 2);
  const long tau = static_cast<long>(rat_num(x.tau().finite()));
  const FieldElement s = FieldElement::uniformizer_pow(R.field(), -tau);
  std::vector<FieldElement> witnesses;
  witnesses.reserve(units.size());
  for (const auto& u : units) witnesses.push_back(x.center() + s * u);
  return pairwise_image_log_diam(R, witnesses);
}

// Restriction of tau -> log diam image_of_ball(f, B(a, tau)) to a window, as
// an exact convex PL map (the Newton polygon of the recentered coefficients).
inline PiecewiseAffineMap log_diam_polygon(const PolynomialMap& f, const FieldElement& a,
                                           const Rat& lo, const Rat& hi) {
  require(!f.is_constant(), "log_diam_polygon: constant map");
  auto rc = recenter(f, a);
  std::vector<EnvelopeLine> lines;
  for (std::size_t i = 1; i < rc.coeffs.size(); ++i)
    if (!rc.coeffs[i].is_zero())
      lines.push_back({Int(i), Rat(rc.coeffs[i].valuation().finite())});
  return upper_envelope(std::move(lines), lo, hi);
}

}  // namespace berk
