#pragma once

// Valuation polygons of truncated entire series and the induced dynamics on
// the ray [0, infinity): phi(tau) = max_n (n tau - v_n) on a window that a
// tail certificate proves unaffected by the truncation.  Includes the two
// example families (the quadratic-valuation series with a_{n+1} = lambda^{-n}
// a_n, and the wandering-annuli series driven by the recurrence
// l_{n+2} = (n+1)(l_{n+1} - l_n)), fixed-point classification, and the
// annuli-orbit verification.

#include <berk/errors.hpp>
#include <berk/field.hpp>
#include <berk/maps.hpp>
#include <berk/pl.hpp>
#include <berk/rational.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace berk {

class TruncatedEntireSeries {
public:
  enum class Tail { Geometric, Baker, AffineBound, Finite, None };

  // a_1 = 1, a_{n+1} = lambda^{-n} a_n with v(lambda) = vlambda < 0, so that
  // v(a_n) = n(n-1)/2 * |vlambda|.
  static TruncatedEntireSeries geometric(const Rat& vlambda, long N) {
    require(vlambda < 0, "geometric series: need |lambda| > 1, i.e. v(lambda) < 0");
    TruncatedEntireSeries s;
    s.tail_ = Tail::Geometric;
    s.L_ = -vlambda;
    s.vals_.push_back(LogValue::pos_inf());  // a_0 = 0
    for (long n = 1; n <= N; ++n) s.vals_.push_back(LogValue(Rat(n * (n - 1)) / 2 * s.L_));
    return s;
  }

  // f(z) = sum_{n>=5} lambda^{l_n} z^n with l_5 < 0, l_6 < 3 l_5 and
  // l_{n+2} = (n+1)(l_{n+1} - l_n).
  static TruncatedEntireSeries baker(const Rat& vlambda, const Int& l5, const Int& l6, long N) {
    require(vlambda < 0, "baker series: need |lambda| > 1, i.e. v(lambda) < 0");
    require(l5 < 0, "baker series: l_5 must be negative");
    require(l6 < 3 * l5, "baker series: need l_6 < 3 l_5");
    TruncatedEntireSeries s;
    s.tail_ = Tail::Baker;
    s.L_ = -vlambda;
    s.ell_ = {l5, l6};
    s.vals_.assign(5, LogValue::pos_inf());
    for (long n = 5; n <= N; ++n) s.vals_.push_back(LogValue(-s.ell(n) * s.L_));
    return s;
  }

  // User-supplied valuations with an affine-in-n lower bound for the tail:
  // v_n >= alpha n + beta for all n > N.
  static TruncatedEntireSeries explicit_series(std::vector<LogValue> vals,
                                               std::optional<std::pair<Rat, Rat>> affine_tail) {
    TruncatedEntireSeries s;
    s.vals_ = std::move(vals);
    require(!s.vals_.empty(), "explicit series: no coefficients");
    if (affine_tail) {
      s.tail_ = Tail::AffineBound;
      s.alpha_ = affine_tail->first;
      s.beta_ = affine_tail->second;
    } else {
      s.tail_ = Tail::None;
    }
    return s;
  }

  // The translation preprocessor for ray dynamics at a fixed rigid point:
  // g(u) = f(z0 + u) - z0 vanishes at the origin, and a polynomial has no
  // tail at all, so every window is certified.
  static TruncatedEntireSeries from_polynomial(const PolynomialMap& f, const FieldElement& z0) {
    require(f.eval(z0) == z0, "from_polynomial: z0 is not a fixed point");
    auto g = recenter(f, z0);
    TruncatedEntireSeries s;
    s.tail_ = Tail::Finite;
    s.vals_.push_back(LogValue::pos_inf());  // constant term cancels against z0
    for (std::size_t i = 1; i < g.coeffs.size(); ++i) s.vals_.push_back(g.coeffs[i].valuation());
    return s;
  }

  long truncation_order() const { return static_cast<long>(vals_.size()) - 1; }
  const std::vector<LogValue>& valuations() const { return vals_; }
  bool vanishes_at_origin() const { return vals_[0].is_pos_inf(); }
  Tail tail() const { return tail_; }
  const Rat& scale() const { return L_; }

  // l_n of the wandering-annuli recurrence (n >= 5), extended on demand.
  Int ell(long n) const {
    require(tail_ == Tail::Baker && n >= 5, "ell: only for the baker family");
    while (static_cast<long>(ell_.size()) < n - 4) {
      const std::size_t k = ell_.size();
      // l_{n+2} = (n+1)(l_{n+1} - l_n) with n = k + 3
      ell_.push_back(Int(k + 4) * (ell_[k - 1] - ell_[k - 2]));
    }
    return ell_[static_cast<std::size_t>(n - 5)];
  }

  // Exact valuation of a_n from the closed form, any n (the tail bound).
  LogValue tail_valuation(long n) const {
    switch (tail_) {
      case Tail::Geometric:
        return n == 0 ? LogValue::pos_inf() : LogValue(Rat(n) * Rat(n - 1) / 2 * L_);
      case Tail::Baker:
        return n < 5 ? LogValue::pos_inf() : LogValue(-ell(n) * L_);
      case Tail::AffineBound:
        return LogValue(alpha_ * n + beta_);
      case Tail::Finite:
        return n <= truncation_order() ? vals_[static_cast<std::size_t>(n)]
                                       : LogValue::pos_inf();
      default:
        throw precondition_error("series has no tail certificate");
    }
  }

  // Window certification: for every n beyond the truncation, the line
  // n tau - v_n stays at least 1 below the truncated maximum on the whole
  // window.  It suffices to check at tau = hi and to see the valuation
  // increments v_{n+1} - v_n exceed hi from some point on while
  // non-decreasing (all three closed forms have non-decreasing increments).
  void certify_window(const Rat& lo, const Rat& hi) const {
    require(lo < hi, "certify_window: empty window");
    require(tail_ != Tail::None, "certify_window: series has no tail certificate");
    if (tail_ == Tail::Finite) return;  // a polynomial: nothing beyond N
    const long N = truncation_order();
    LogValue phimax = LogValue::neg_inf();
    for (long n = 0; n <= N; ++n)
      if (vals_[n].is_finite()) phimax = log_max(phimax, LogValue(Rat(n) * hi) - vals_[n]);
    require(phimax.is_finite(), "certify_window: truncation has no finite coefficient");

    const long horizon = std::max<long>(4 * N, N + 8);
    for (long n = N + 1; n <= horizon; ++n) {
      const LogValue term = LogValue(Rat(n) * hi) - tail_valuation(n);
      require(term < phimax - LogValue(1) || term == phimax - LogValue(1),
              "certify_window: tail term at n=" + std::to_string(n) + " reaches the maximum");
    }
    LogValue d_prev = tail_valuation(horizon) - tail_valuation(horizon - 1);
    const LogValue d_last = tail_valuation(horizon + 1) - tail_valuation(horizon);
    require(!(d_last < d_prev), "certify_window: tail increments decreasing at the horizon");
    require(LogValue(hi + 1) < d_last || LogValue(hi + 1) == d_last,
            "certify_window: tail increments do not outgrow the window");
  }

  // Coefficients pi^{v_n} over the given backend; exact when all finite
  // valuations are integers.
  PolynomialMap materialize(const FieldDescriptor& d) const {
    std::vector<FieldElement> coeffs;
    for (const auto& v : vals_) {
      if (v.is_pos_inf()) {
        coeffs.push_back(FieldElement::zero(d));
        continue;
      }
      require(rat_is_integer(v.finite()), "materialize: non-integral coefficient valuation");
      coeffs.push_back(FieldElement::uniformizer_pow(d, static_cast<long>(rat_num(v.finite()))));
    }
    return PolynomialMap::make(d, coeffs);
  }

private:
  TruncatedEntireSeries() = default;
  std::vector<LogValue> vals_;
  Tail tail_ = Tail::None;
  Rat L_ = 1;               // |v(lambda)| for the two families
  mutable std::vector<Int> ell_;  // baker recurrence cache, index n-5
  Rat alpha_ = 0, beta_ = 0;      // affine tail bound
};

// phi restricted to a certified window, as an exact convex PL map.
inline PiecewiseAffineMap valuation_polygon(const TruncatedEntireSeries& s, const Rat& lo,
                                            const Rat& hi) {
  s.certify_window(lo, hi);
  std::vector<EnvelopeLine> lines;
  const auto& vals = s.valuations();
  for (std::size_t n = 0; n < vals.size(); ++n)
    if (vals[n].is_finite()) lines.push_back({Int(n), vals[n].finite()});
  require(!lines.empty(), "valuation_polygon: no finite coefficients");
  auto pl = upper_envelope(std::move(lines), lo, hi);
  ensure(pl.convex(), "valuation_polygon: envelope is not convex");
  return pl;
}

inline Rat ray_image(const PiecewiseAffineMap& phi, const Rat& tau) { return phi.eval(tau); }

struct RayOrbit {
  std::vector<Rat> values;  // tau_0, phi(tau_0), ...
  bool exited_window = false;
  // values.size() - 1 iterates were completed; when exited_window is set the
  // last entry is the first point outside the domain of phi.
};

inline RayOrbit iterate_ray(const PiecewiseAffineMap& phi, const Rat& tau0, long m) {
  require(phi.contains(tau0), "iterate_ray: start outside the window");
  RayOrbit orbit;
  orbit.values.push_back(tau0);
  for (long i = 0; i < m; ++i) {
    const Rat next = phi.eval(orbit.values.back());
    orbit.values.push_back(next);
    if (!phi.contains(next) && i + 1 < m) {
      orbit.exited_window = true;
      break;
    }
  }
  // expanding starts give strictly increasing orbits (convexity)
  if (orbit.values.size() >= 2 && orbit.values[0] < orbit.values[1])
    for (std::size_t i = 0; i + 1 < orbit.values.size(); ++i)
      ensure(orbit.values[i] < orbit.values[i + 1], "iterate_ray: orbit not increasing");
  return orbit;
}

// Polygon vertices tau in [lo, hi] with phi(tau) > tau; each certifies that
// the Julia set meets the closure of the circle of log-radius tau.  The
// polygon is built on a slightly larger certified window so vertices at the
// window ends are visible.
inline std::vector<std::pair<Rat, Rat>> julia_breakpoints(const TruncatedEntireSeries& s,
                                                          const Rat& lo, const Rat& hi) {
  auto phi = valuation_polygon(s, lo - 1, hi + 1);
  std::vector<std::pair<Rat, Rat>> out;
  for (const Rat& v : phi.vertices()) {
    if (v < lo || hi < v) continue;
    const Rat img = phi.eval(v);
    if (v < img) out.push_back({v, img});
  }
  return out;
}

struct JuliaRayPoint {
  Rat tau_star;
  long iterations;  // m with phi^m(tau_star) a qualifying vertex
};

// Smallest tau* > tau_x (scanning m = 0, 1, ...) whose m-th image under phi
// is a polygon vertex with phi(v) > v; exact PL preimages.
inline JuliaRayPoint find_julia_ray_point(const TruncatedEntireSeries& s, const Rat& tau_x,
                                          const Rat& window_hi, long m_max = 16) {
  require(s.vanishes_at_origin(), "find_julia_ray_point: series must vanish at the origin");
  require(tau_x < window_hi, "find_julia_ray_point: window ends before the start point");
  auto phi = valuation_polygon(s, tau_x, window_hi + 1);
  std::vector<Rat> targets;
  for (const Rat& v : phi.vertices())
    if (v < phi.eval(v)) targets.push_back(v);
  for (long m = 0; m <= m_max; ++m) {
    std::optional<Rat> best;
    for (const Rat& v : targets) {
      // pull v back m times through the strictly increasing polygon
      std::optional<Rat> tau = v;
      for (long k = 0; k < m && tau; ++k) tau = phi.invert(*tau);
      if (!tau || !(tau_x < *tau) || window_hi < *tau) continue;
      if (!best || *tau < *best) best = *tau;
    }
    if (best) return {*best, m};
  }
  throw precondition_error(
      "find_julia_ray_point: window exhausted; enlarge the window or the truncation order");
}

enum class FixedPointClass { Attracting, Indifferent, Repelling };

struct FixedPointReport {
  FixedPointClass cls;
  bool normal;  // iterates form a normal family near the fixed point
  LogValue multiplier_valuation;
};

// Classification by v(f'(z0)); the iterates are normal at z0 exactly when
// |f'(z0)| <= 1.
inline FixedPointReport classify_fixed_point(const PolynomialMap& f, const FieldElement& z0) {
  require(f.eval(z0) == z0, "classify_fixed_point: not a fixed point");
  const LogValue v = f.derivative().eval(z0).valuation();
  FixedPointClass cls = v == LogValue(0) ? FixedPointClass::Indifferent
                        : LogValue(0) < v ? FixedPointClass::Attracting
                                          : FixedPointClass::Repelling;
  return {cls, !(v < LogValue(0)), v};
}

// Fixed point of a series at the origin (a_0 = 0): the multiplier is a_1.
inline FixedPointReport classify_fixed_point(const TruncatedEntireSeries& s) {
  require(s.vanishes_at_origin(), "classify_fixed_point: series does not fix the origin");
  require(s.truncation_order() >= 1, "classify_fixed_point: no linear coefficient");
  const LogValue v = s.valuations()[1];
  FixedPointClass cls = v == LogValue(0) ? FixedPointClass::Indifferent
                        : LogValue(0) < v ? FixedPointClass::Attracting
                                          : FixedPointClass::Repelling;
  return {cls, !(v < LogValue(0)), v};
}

struct AnnulusStep {
  long n;
  Rat lo, hi;        // tau-interval of A_n
  Int slope;         // the single polygon slope on it, n + 1
  Rat image_lo, image_hi;
  bool maps_onto_next;      // phi(A_n) = A_{n+1} with matching endpoints
  bool endpoint_identity;   // (n+1)(l_{n+1}-l_{n+2}) + l_{n+1} = l_{n+2}-l_{n+3}
};

// The wandering-annuli verification: on each A_n the polygon is a single
// affine piece of slope n+1 carrying A_n onto A_{n+1} endpoint-exactly.
inline std::vector<AnnulusStep> annuli_orbit(const TruncatedEntireSeries& s, long n_lo,
                                             long n_hi) {
  require(s.tail() == TruncatedEntireSeries::Tail::Baker, "annuli_orbit: baker family only");
  require(5 <= n_lo && n_lo <= n_hi, "annuli_orbit: need 5 <= n_lo <= n_hi");
  const Rat L = s.scale();
  auto lo_of = [&](long n) { return Rat(s.ell(n) - s.ell(n + 1)) * L; };
  auto hi_of = [&](long n) { return Rat(s.ell(n + 1) - s.ell(n + 2)) * L; };

  // the proof's induction claim, kept as a hard invariant while extending
  for (long n = n_lo; n <= n_hi + 2; ++n)
    ensure(s.ell(n + 1) < Int(n - 2) * s.ell(n), "annuli_orbit: l_{n+1} < (n-2) l_n fails");

  auto phi = valuation_polygon(s, lo_of(n_lo), hi_of(n_hi + 1));
  std::vector<EnvelopeLine> lines;
  for (std::size_t k = 0; k < s.valuations().size(); ++k)
    if (s.valuations()[k].is_finite()) lines.push_back({Int(k), s.valuations()[k].finite()});
  std::vector<AnnulusStep> out;
  for (long n = n_lo; n <= n_hi; ++n) {
    AnnulusStep st;
    st.n = n;
    st.lo = lo_of(n);
    st.hi = hi_of(n);
    auto piece = upper_envelope(lines, st.lo, st.hi);
    st.slope = piece.slopes().size() == 1 ? piece.slopes()[0] : Int(-1);
    st.image_lo = phi.eval(st.lo);
    st.image_hi = phi.eval(st.hi);
    st.maps_onto_next = piece.slopes().size() == 1 && st.slope == Int(n + 1) &&
                        st.image_lo == lo_of(n + 1) && st.image_hi == hi_of(n + 1);
    const Int lhs = Int(n + 1) * (s.ell(n + 1) - s.ell(n + 2)) + s.ell(n + 1);
    st.endpoint_identity = lhs == s.ell(n + 2) - s.ell(n + 3);
    ensure(st.maps_onto_next, "annuli_orbit: phi(A_n) != A_{n+1}");
    ensure(st.endpoint_identity, "annuli_orbit: endpoint identity fails");
    out.push_back(std::move(st));
  }
  return out;
}

}  // namespace berk
