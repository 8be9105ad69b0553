#pragma once

// Rational maps over a residue field (F_q or Q): Frobenius factorization,
// ramification indices, orbit classification of points of P^1, and the
// enumeration of separable maps whose exceptional fibers stay inside a
// prescribed finite set.

#include <berk/errors.hpp>
#include <berk/galois.hpp>
#include <berk/poly.hpp>

#include <algorithm>
#include <optional>
#include <vector>

namespace berk {

template <class E>
struct ProjPoint {
  bool inf = false;
  E v{};
  static ProjPoint infinity() { return {true, E{}}; }
  static ProjPoint finite(E x) { return {false, std::move(x)}; }
};

template <class E>
bool proj_eq(const ProjPoint<E>& a, const ProjPoint<E>& b) {
  return a.inf == b.inf && (a.inf || a.v == b.v);
}

// A rational self-map of P^1 over the coefficient field, kept in a canonical
// form: numerator and denominator coprime, denominator monic.
template <field_ops F>
struct RRMap {
  PolyVec<F> num, den;
};

template <field_ops F>
RRMap<F> make_rrmap(const F& f, PolyVec<F> num, PolyVec<F> den) {
  poly_trim(f, num);
  poly_trim(f, den);
  require(!den.empty(), "rational map: zero denominator");
  PolyVec<F> g = poly_gcd(f, num, den);
  if (poly_degree<F>(g) > 0) {
    num = poly_divmod(f, num, g).first;
    den = poly_divmod(f, den, g).first;
  }
  const auto lead_inv = f.div(f.one(), den.back());
  return {poly_scale(f, lead_inv, num), poly_scale(f, lead_inv, den)};
}

template <field_ops F>
long rrmap_degree(const RRMap<F>& r) {
  return std::max(poly_degree<F>(r.num), poly_degree<F>(r.den));
}

template <field_ops F>
bool rrmap_eq(const F& f, const RRMap<F>& a, const RRMap<F>& b) {
  return poly_eq(f, a.num, b.num) && poly_eq(f, a.den, b.den);
}

template <field_ops F>
ProjPoint<typename F::Elem> rrmap_eval(const F& f, const RRMap<F>& r,
                                       const ProjPoint<typename F::Elem>& x) {
  using P = ProjPoint<typename F::Elem>;
  const long dn = poly_degree<F>(r.num), dd = poly_degree<F>(r.den);
  if (x.inf) {
    if (dn > dd) return P::infinity();
    if (dn < dd) return P::finite(f.zero());
    return P::finite(f.div(r.num.back(), r.den.back()));
  }
  const auto q = poly_eval(f, r.den, x.v);
  if (f.is_zero(q)) return P::infinity();  // coprime, so num(x) != 0
  return P::finite(f.div(poly_eval(f, r.num, x.v), q));
}

// Source-chart swap w = 1/z: coefficients reversed after padding to the
// common degree.  Used to measure ramification at infinity.
template <field_ops F>
RRMap<F> rrmap_reciprocal_source(const F& f, const RRMap<F>& r) {
  const std::size_t d = static_cast<std::size_t>(rrmap_degree(r));
  auto rev = [&](const PolyVec<F>& p) {
    PolyVec<F> out(d + 1, f.zero());
    for (std::size_t i = 0; i < p.size(); ++i) out[d - i] = p[i];
    poly_trim(f, out);
    return out;
  };
  return make_rrmap(f, rev(r.num), rev(r.den));
}

// Ramification index e_x(R) >= 1: the multiplicity of x in its own fiber.
template <field_ops F>
long rrmap_ram_index(const F& f, const RRMap<F>& r, const ProjPoint<typename F::Elem>& x) {
  if (x.inf) {
    return rrmap_ram_index(f, rrmap_reciprocal_source(f, r),
                           ProjPoint<typename F::Elem>::finite(f.zero()));
  }
  const auto w = rrmap_eval(f, r, x);
  if (w.inf) return poly_root_multiplicity(f, r.den, x.v);
  PolyVec<F> h = poly_sub(f, r.num, poly_scale(f, w.v, r.den));
  return poly_root_multiplicity(f, h, x.v);
}

// Frobenius factorization R(z) = R_sep(z^{p^n}) with R_sep separable and n
// maximal; n = 0 in characteristic zero.
template <field_ops F>
std::pair<RRMap<F>, long> frobenius_factor(const F& f, RRMap<F> r) {
  const unsigned p = f.characteristic();
  long n = 0;
  if (p == 0) return {r, 0};
  auto support_in_pz = [&](const PolyVec<F>& v) {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!f.is_zero(v[i]) && i % p != 0) return false;
    return true;
  };
  auto deflate = [&](const PolyVec<F>& v) {
    PolyVec<F> out;
    for (std::size_t i = 0; i < v.size(); i += p) out.push_back(v[i]);
    poly_trim(f, out);
    return out;
  };
  while (rrmap_degree(r) > 0 && support_in_pz(r.num) && support_in_pz(r.den)) {
    r.num = deflate(r.num);
    r.den = deflate(r.den);
    ++n;
  }
  return {r, n};
}

template <field_ops F>
bool rrmap_separable(const F& f, const RRMap<F>& r) {
  return frobenius_factor(f, r).second == 0;
}

enum class OrbitClass {
  NonPreperiodic,           // certified by strict magnitude growth
  PreperiodicCritical,      // falls onto a cycle containing a critical point
  PreperiodicNoncritical,
  NonPreperiodicBudget,     // no revisit, no certificate within the budget
};

template <field_ops F>
struct OrbitReport {
  OrbitClass verdict;
  std::vector<ProjPoint<typename F::Elem>> orbit;  // prefix of the forward orbit
  long preperiod = 0;   // valid for the preperiodic verdicts
  long period = 0;
};

namespace detail {

// Escape certificate for polynomials over Q of degree >= 2: once |x| exceeds
// max(1, (1 + sum |c_i|) / |c_d|), the absolute value strictly grows forever.
inline std::optional<Rat> escape_threshold_q(const QOps& f, const RRMap<QOps>& r) {
  if (poly_degree<QOps>(r.den) != 0 || rrmap_degree(r) < 2) return std::nullopt;
  Rat sum(0);
  const Rat den0 = r.den[0];
  for (std::size_t i = 0; i + 1 < r.num.size(); ++i) sum += abs(r.num[i] / den0);
  Rat lead = abs(r.num.back() / den0);
  Rat thr = (Rat(1) + sum) / lead;
  (void)f;
  return thr < 1 ? Rat(1) : thr;
}

}  // namespace detail

// Forward-orbit classification of a residue direction.  Over a finite field
// the orbit always closes up; over Q a revisit decides preperiodicity, the
// polynomial escape bound certifies non-preperiodicity, and anything else is
// the distinguished budget verdict.
template <field_ops F>
OrbitReport<F> classify_direction(const F& f, const RRMap<F>& r,
                                  const ProjPoint<typename F::Elem>& start, long budget = 64) {
  require(rrmap_degree(r) >= 1, "classify_direction: constant map");
  if constexpr (std::is_same_v<F, GFOps>)
    budget = std::max<long>(budget, f.order() + 2);  // P^1(F_q) orbits must close up
  OrbitReport<F> rep;
  rep.orbit.push_back(start);
  std::optional<Rat> escape;
  if constexpr (std::is_same_v<F, QOps>) escape = detail::escape_threshold_q(f, r);
  for (long step = 0; step < budget; ++step) {
    const auto nxt = rrmap_eval(f, r, rep.orbit.back());
    for (std::size_t i = 0; i < rep.orbit.size(); ++i) {
      if (proj_eq(rep.orbit[i], nxt)) {
        rep.preperiod = static_cast<long>(i);
        rep.period = static_cast<long>(rep.orbit.size() - i);
        bool critical = false;
        for (std::size_t j = i; j < rep.orbit.size(); ++j)
          if (rrmap_ram_index(f, r, rep.orbit[j]) >= 2) critical = true;
        rep.verdict = critical ? OrbitClass::PreperiodicCritical : OrbitClass::PreperiodicNoncritical;
        return rep;
      }
    }
    rep.orbit.push_back(nxt);
    if constexpr (std::is_same_v<F, QOps>) {
      if (escape && !nxt.inf && *escape < abs(nxt.v)) {
        rep.verdict = OrbitClass::NonPreperiodic;
        return rep;
      }
    }
  }
  rep.verdict = f.characteristic() == 0 ? OrbitClass::NonPreperiodicBudget
                                        : OrbitClass::NonPreperiodic;
  ensure(f.characteristic() == 0, "classify_direction: finite orbit did not close up");
  return rep;
}

// ---------------------------------------------------------------------------
// Enumeration of separable maps R with R^{-1}{0,1,inf} inside a finite S.

namespace detail {

// Does p split completely with all roots in roots_allowed?  (Checked by
// deflating linear factors; whatever remains must be a constant.)
template <field_ops F>
bool splits_within(const F& f, PolyVec<F> p, const std::vector<typename F::Elem>& roots_allowed) {
  poly_trim(f, p);
  if (p.empty()) return true;
  for (const auto& s : roots_allowed) {
    while (poly_degree<F>(p) > 0 && f.is_zero(poly_eval(f, p, s))) {
      PolyVec<F> lin = {f.neg(s), f.one()};
      p = poly_divmod(f, p, lin).first;
    }
  }
  return poly_degree<F>(p) <= 0;
}

// Fiber condition of the lemma: every preimage of 0, 1 and infinity lies in
// S (over the algebraic closure, hence the split requirement).
inline bool restricted_fibers(const GFOps& f, const RRMap<GFOps>& r,
                              const std::vector<ProjPoint<GFOps::Elem>>& S) {
  std::vector<GFOps::Elem> fin;
  bool has_inf = false;
  for (const auto& s : S) {
    if (s.inf) has_inf = true;
    else fin.push_back(s.v);
  }
  const long dn = poly_degree<GFOps>(r.num), dd = poly_degree<GFOps>(r.den);
  if (!splits_within(f, r.num, fin)) return false;           // 0-fiber
  if (!splits_within(f, r.den, fin)) return false;           // inf-fiber
  PolyVec<GFOps> h = poly_sub(f, r.num, r.den);
  if (!splits_within(f, h, fin)) return false;               // 1-fiber
  if (dn < dd && !has_inf) return false;                      // R(inf) = 0
  if (dn > dd && !has_inf) return false;                      // R(inf) = inf
  if (dn == dd && poly_degree<GFOps>(h) < dn && !has_inf) return false;  // R(inf) = 1
  return true;
}

inline bool rrmap_coeff_less(const RRMap<GFOps>& a, const RRMap<GFOps>& b) {
  auto key = [](const RRMap<GFOps>& r) {
    std::vector<int> k = {static_cast<int>(rrmap_degree(r))};
    for (auto c : r.den) k.push_back(c);
    k.push_back(-1);
    for (auto c : r.num) k.push_back(c);
    return k;
  };
  return key(a) < key(b);
}

// The lemma's counting chain, asserted numerically for one map: the three
// exceptional fibers carry 3d points with multiplicity, separability caps
// the total ramification excess at 2d - 2, and the fiber set sits inside S.
inline void assert_degree_chain(const GFOps& f, const RRMap<GFOps>& r, std::size_t s_size) {
  const long d = rrmap_degree(r);
  long excess = 0, fiber_points = 0;
  for (int which = 0; which < 3; ++which) {
    std::vector<ProjPoint<GFOps::Elem>> fiber;
    for (unsigned e = 0; e < f.order(); ++e) {
      auto x = ProjPoint<GFOps::Elem>::finite(static_cast<GFOps::Elem>(e));
      auto w = rrmap_eval(f, r, x);
      bool hit = which == 0 ? (!w.inf && f.is_zero(w.v))
                 : which == 1 ? (!w.inf && f.eq(w.v, f.one()))
                              : w.inf;
      if (hit) fiber.push_back(x);
    }
    auto winf = rrmap_eval(f, r, ProjPoint<GFOps::Elem>::infinity());
    bool hit_inf = which == 0 ? (!winf.inf && f.is_zero(winf.v))
                   : which == 1 ? (!winf.inf && f.eq(winf.v, f.one()))
                                : winf.inf;
    if (hit_inf) fiber.push_back(ProjPoint<GFOps::Elem>::infinity());
    for (const auto& x : fiber) excess += rrmap_ram_index(f, r, x) - 1;
    fiber_points += static_cast<long>(fiber.size());
  }
  ensure(excess <= 2 * d - 2, "restricted map: ramification excess exceeds 2d-2");
  ensure(fiber_points == 3 * d - excess, "restricted map: fiber count mismatch");
  ensure(fiber_points <= static_cast<long>(s_size), "restricted map: fiber escapes S");
  ensure(d <= static_cast<long>(s_size) - 2, "restricted map: degree bound #S-2 violated");
}

}  // namespace detail

// All separable rational maps R with deg R in [1, d_max] and
// R^{-1}{0,1,inf} inside S, built from the normal form
// R = a prod(T - z_i) / prod(T - z'_j) with roots in S and R(z'') = 1 for
// some z'' in S.  Output is deduplicated and sorted by coefficients.
inline std::vector<RRMap<GFOps>> enumerate_restricted_maps(
    const GFOps& f, const std::vector<ProjPoint<GFOps::Elem>>& S, long d_max) {
  require(d_max >= 1, "enumerate_restricted_maps: d_max >= 1");
  std::vector<GFOps::Elem> fin;
  for (const auto& s : S)
    if (!s.inf) fin.push_back(s.v);

  // multisets of roots drawn from fin, of size <= d_max
  std::vector<std::vector<GFOps::Elem>> multisets = {{}};
  for (std::size_t head = 0; head < multisets.size(); ++head) {
    auto base = multisets[head];
    if (static_cast<long>(base.size()) >= d_max) continue;
    std::size_t start = 0;
    if (!base.empty())
      start = static_cast<std::size_t>(std::find(fin.begin(), fin.end(), base.back()) - fin.begin());
    for (std::size_t i = start; i < fin.size(); ++i) {
      auto next = base;
      next.push_back(fin[i]);
      multisets.push_back(std::move(next));
    }
  }

  std::vector<RRMap<GFOps>> out;
  for (const auto& zeros : multisets) {
    for (const auto& poles : multisets) {
      if (zeros.empty() && poles.empty()) continue;
      // coprimality: shared roots would cancel
      bool shared = false;
      for (auto z : zeros)
        if (std::find(poles.begin(), poles.end(), z) != poles.end()) shared = true;
      if (shared) continue;

      PolyVec<GFOps> num = {f.one()}, den = {f.one()};
      for (auto z : zeros) num = poly_mul(f, num, {f.neg(z), f.one()});
      for (auto z : poles) den = poly_mul(f, den, {f.neg(z), f.one()});

      // the scale a is pinned by R(z'') = 1 for some z'' in S
      std::vector<GFOps::Elem> scales;
      for (const auto& s : S) {
        if (s.inf) {
          if (zeros.size() == poles.size()) scales.push_back(f.one());
          continue;
        }
        const auto nv = poly_eval(f, num, s.v), dv = poly_eval(f, den, s.v);
        if (!f.is_zero(nv) && !f.is_zero(dv)) scales.push_back(f.div(dv, nv));
      }
      for (auto a : scales) {
        RRMap<GFOps> r = make_rrmap(f, poly_scale(f, a, num), den);
        if (rrmap_degree(r) < 1 || rrmap_degree(r) > d_max) continue;
        if (!rrmap_separable(f, r)) continue;
        if (!detail::restricted_fibers(f, r, S)) continue;
        bool dup = false;
        for (const auto& prev : out) dup = dup || rrmap_eq(f, prev, r);
        if (!dup) {
          detail::assert_degree_chain(f, r, S.size());
          out.push_back(std::move(r));
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), detail::rrmap_coeff_less);
  return out;
}

// Exhaustive oracle over every coefficient pair; feasible for q <= 3 and
// d_max <= 3, where it cross-checks the normal-form enumeration.
inline std::vector<RRMap<GFOps>> brute_force_restricted_maps(
    const GFOps& f, const std::vector<ProjPoint<GFOps::Elem>>& S, long d_max) {
  require(f.order() <= 3 && d_max <= 3, "brute force reserved for tiny instances");
  const unsigned q = f.order();
  const std::size_t n = static_cast<std::size_t>(d_max) + 1;
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= q;

  std::vector<RRMap<GFOps>> out;
  for (std::size_t a = 0; a < total; ++a) {
    for (std::size_t b = 1; b < total; ++b) {
      PolyVec<GFOps> num, den;
      std::size_t ta = a, tb = b;
      for (std::size_t i = 0; i < n; ++i, ta /= q, tb /= q) {
        num.push_back(static_cast<GFOps::Elem>(ta % q));
        den.push_back(static_cast<GFOps::Elem>(tb % q));
      }
      poly_trim(f, num);
      poly_trim(f, den);
      if (num.empty() || den.empty()) continue;
      if (poly_degree<GFOps>(poly_gcd(f, num, den)) > 0) continue;  // same map, lower form
      RRMap<GFOps> r = make_rrmap(f, num, den);
      if (rrmap_degree(r) < 1 || rrmap_degree(r) > d_max) continue;
      if (!rrmap_separable(f, r)) continue;
      if (!detail::restricted_fibers(f, r, S)) continue;
      bool dup = false;
      for (const auto& prev : out) dup = dup || rrmap_eq(f, prev, r);
      if (!dup) out.push_back(std::move(r));
    }
  }
  std::sort(out.begin(), out.end(), detail::rrmap_coeff_less);
  return out;
}

}  // namespace berk
