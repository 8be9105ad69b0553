#pragma once

// Executable instances of the limit phenomena: pointwise-limit probes for
// parametrized map families, degree-explosion collapse, good-reduction
// factorial iterates classified through the residue dynamics, the quadratic
// Cantor coding, and the Schwarz-norm identity.

#include <berk/affinoid.hpp>
#include <berk/entire.hpp>
#include <berk/errors.hpp>
#include <berk/maps.hpp>
#include <berk/residue_maps.hpp>

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace berk {

// ---------------------------------------------------------------------------
// Map families.

struct MapFamily {
  enum class Kind { ShiftedMonomial, Power, FrobeniusPerturbed, ScaledPower };
  Kind kind;
  FieldDescriptor desc;
  long r = 1, s = 1;         // shifted-monomial exponents, r <= s
  FieldElement a;            // shifted-monomial amplitude
  FieldElement scale;        // scaled-power u

  // z^r + a zeta_n z^s with zeta_n running through units of pairwise
  // distinct residues.
  static MapFamily shifted_monomial(const FieldDescriptor& d, long r, long s,
                                    const FieldElement& a) {
    require(1 <= r && r <= s, "shifted_monomial: need 1 <= r <= s");
    MapFamily f{Kind::ShiftedMonomial, d, r, s, a, FieldElement::zero(d)};
    return f;
  }
  static MapFamily power(const FieldDescriptor& d) {
    return {Kind::Power, d, 1, 1, FieldElement::zero(d), FieldElement::zero(d)};
  }
  // z^{p^n} + eps_n z^{p^n + 1} with eps_n = t^n (Laurent backends)
  static MapFamily frobenius_perturbed(const FieldDescriptor& d) {
    require(d.kind == FieldKind::LaurentFp, "frobenius_perturbed: laurent-fp backend required");
    return {Kind::FrobeniusPerturbed, d, 1, 1, FieldElement::zero(d), FieldElement::zero(d)};
  }
  // (u z)^{p^n}
  static MapFamily scaled_power(const FieldDescriptor& d, const FieldElement& u) {
    require(d.residue_char() > 0, "scaled_power: positive residue characteristic required");
    require(!u.is_zero(), "scaled_power: zero scale");
    return {Kind::ScaledPower, d, 1, 1, FieldElement::zero(d), u};
  }

  PolynomialMap map_at(long n) const {
    require(n >= 1, "map_at: index starts at 1");
    ValuedOps ops(desc);
    switch (kind) {
      case Kind::ShiftedMonomial: {
        require(!desc.finite_residue_field() || static_cast<unsigned>(n) < desc.p,
                "shifted_monomial: residue field exhausted");
        const FieldElement zeta = FieldElement::from_int(desc, n);
        std::vector<FieldElement> c(static_cast<std::size_t>(s) + 1, ops.zero());
        c[static_cast<std::size_t>(r)] = c[static_cast<std::size_t>(r)] + ops.one();
        c[static_cast<std::size_t>(s)] = c[static_cast<std::size_t>(s)] + a * zeta;
        return PolynomialMap::make(desc, c);
      }
      case Kind::Power:
        return PolynomialMap::monomial(desc, n, FieldElement::one(desc));
      case Kind::FrobeniusPerturbed: {
        long q = 1;
        for (long i = 0; i < n; ++i) q *= desc.p;
        std::vector<FieldElement> c(static_cast<std::size_t>(q) + 2, ops.zero());
        c[static_cast<std::size_t>(q)] = ops.one();
        c[static_cast<std::size_t>(q) + 1] = FieldElement::uniformizer_pow(desc, n);
        return PolynomialMap::make(desc, c);
      }
      case Kind::ScaledPower: {
        long q = 1;
        for (long i = 0; i < n; ++i) q *= desc.p;
        return PolynomialMap::monomial(desc, q, scale.pow(q));
      }
    }
    throw invariant_error("map_at: unreachable");
  }
};

// ---------------------------------------------------------------------------
// Pointwise limit probe.

struct WitnessTrack {
  FieldElement witness;
  std::vector<LogValue> values;  // log |f_n(x) - w| for n = 1..n_max
  bool stabilized = false;
  LogValue limit = LogValue::neg_inf();  // the stabilized value
};

struct LimitProbeReport {
  std::vector<WitnessTrack> tracks;
  std::optional<BerkovichPoint> inferred_ball;
};

// Per-witness value sequences with exact stabilization (the last
// ceil(n_max/3) entries must coincide); when every witness stabilizes, a
// limit ball is inferred from the minimizing witness and verified against
// |z - w| = max(diam z, |center - w|) for all of them.
inline LimitProbeReport pointwise_limit_probe(const MapFamily& family, const BerkovichPoint& x,
                                              long n_max,
                                              const std::vector<FieldElement>& witnesses) {
  require(n_max >= 3, "pointwise_limit_probe: need n_max >= 3");
  LimitProbeReport rep;
  std::vector<BerkovichPoint> images;
  for (long n = 1; n <= n_max; ++n) images.push_back(image_of_ball(family.map_at(n), x));
  const std::size_t window = static_cast<std::size_t>((n_max + 2) / 3);
  for (const auto& w : witnesses) {
    WitnessTrack tr;
    tr.witness = w;
    for (const auto& img : images) tr.values.push_back(log_distance_to_rigid(img, w));
    tr.stabilized = true;
    for (std::size_t i = tr.values.size() - window; i < tr.values.size(); ++i)
      tr.stabilized = tr.stabilized && tr.values[i] == tr.values.back();
    if (tr.stabilized) tr.limit = tr.values.back();
    rep.tracks.push_back(std::move(tr));
  }

  bool all = !rep.tracks.empty();
  for (const auto& tr : rep.tracks) all = all && tr.stabilized;
  if (all) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < rep.tracks.size(); ++i)
      if (rep.tracks[i].limit < rep.tracks[best].limit) best = i;
    const FieldElement& center = rep.tracks[best].witness;
    const LogValue tau = rep.tracks[best].limit;
    bool coherent = !tau.is_pos_inf();
    for (const auto& tr : rep.tracks)
      coherent = coherent &&
                 tr.limit == log_max(tau, -(center - tr.witness).valuation());
    if (coherent) {
      rep.inferred_ball = tau.is_neg_inf() ? BerkovichPoint::rigid(center)
                                           : BerkovichPoint::make(center, tau);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Degree explosion.

struct DegreeExplosionRow {
  long n;
  long degree;
  LogValue image_log_diam;
};

struct DegreeExplosionReport {
  std::vector<DegreeExplosionRow> rows;
  bool collapse_verified = false;  // image diameters eventually strictly fall
  std::string note;
};

inline DegreeExplosionReport degree_explosion_probe(const MapFamily& family,
                                                    const BerkovichPoint& x, long n_max) {
  require(x.in_hyperbolic_space(), "degree_explosion_probe: need a ball point");
  DegreeExplosionReport rep;
  for (long n = 1; n <= n_max; ++n) {
    const PolynomialMap f = family.map_at(n);
    rep.rows.push_back({n, local_degree(f, x), image_of_ball(f, x).tau()});
  }
  bool strict = rep.rows.size() >= 2;
  for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i)
    strict = strict && rep.rows[i + 1].image_log_diam < rep.rows[i].image_log_diam;
  rep.collapse_verified = strict;
  if (family.kind == MapFamily::Kind::ScaledPower) {
    const LogValue vu = family.scale.valuation();
    if (x.tau() < vu) {
      ensure(strict, "degree_explosion_probe: scaled-power diameters failed to collapse");
      // exact collapse law tau_n = p^n (tau - v(u))
      long q = 1;
      for (const auto& row : rep.rows) {
        q *= family.desc.p;
        ensure(row.image_log_diam == q * (x.tau() - vu),
               "degree_explosion_probe: scaled-power image diameter off the exact law");
      }
    } else {
      rep.note = "scaled-power hypothesis tau(x) < v(u) violated; no collapse expected";
    }
  } else if (!strict) {
    rep.note = "image diameters do not collapse (bounded-degree or fixed-point case)";
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Good reduction and the factorial subsequence.

enum class GoodReductionCase {
  TowardsGauss,       // residue class non-preperiodic
  TowardsConstant,    // preperiodic to a critical cycle
  PeriodicBall,       // preperiodic to a noncritical cycle
};

struct GoodReductionSampleRow {
  FieldElement sample;
  long verified_up_to = 0;  // last factorial index n with the prediction confirmed
  bool ok = true;
  std::string note;
};

struct GoodReductionReport {
  ReducedRationalMap reduction;
  GoodReductionCase verdict;
  bool budget_limited = false;  // classification over Q ran out of budget
  long preperiod = 0, period = 0;
  std::vector<Rat> residue_orbit;  // finite points as canonical rationals
  std::vector<GoodReductionSampleRow> samples;
};

namespace detail {

// Coefficient-wise reduction of a map with coefficients in the valuation
// ring; good reduction means the degree survives and no common factor
// appears.
inline ReducedRationalMap good_reduction_of(const RationalMap& R) {
  auto reduce = [&](const PolynomialMap& p) {
    std::vector<Rat> out;
    for (const auto& c : p.coeffs) {
      require(!(c.valuation() < LogValue(0)), "good reduction: coefficient outside the ring");
      out.push_back(c.residue());
    }
    while (!out.empty() && out.back() == 0) out.pop_back();
    return out;
  };
  ReducedRationalMap red;
  red.residue_char = R.field().residue_char();
  red.num = reduce(R.num);
  red.den = reduce(R.den);
  require(!red.den.empty(), "bad reduction: the denominator reduces to zero");
  require(red.degree() == R.degree(), "bad reduction: the degree drops");
  if (red.residue_char == 0) {
    auto rr = to_q(red);
    require(rrmap_degree(rr) == R.degree(), "bad reduction: common factor after reduction");
  } else {
    GFOps gf(red.residue_char);
    auto rr = to_gf(gf, red);
    require(rrmap_degree(rr) == R.degree(), "bad reduction: common factor after reduction");
  }
  return red;
}

// One truncated iteration step for a polynomial with coefficients in the
// valuation ring: over p-adic backends values are reduced mod p^M, which is
// exact for every valuation below M.
inline FieldElement truncated_step(const PolynomialMap& f, const FieldElement& z, long M) {
  FieldElement w = f.eval(z);
  if (f.desc.kind == FieldKind::PAdic && !w.is_zero() && !(w.valuation() < LogValue(0))) {
    const Rat r(detail::mod_prime_power(w.rational_payload(), f.desc.p, M));
    return FieldElement::from_rational(f.desc, r);
  }
  return w;
}

inline bool height_capped(const FieldElement& z, long bits) {
  if (z.field().kind == FieldKind::PAdic) {
    const Rat& q = z.rational_payload();
    return static_cast<long>(boost::multiprecision::msb(abs(rat_num(q)) + 1) +
                             boost::multiprecision::msb(rat_den(q) + 1)) > bits;
  }
  long total = 0;
  for (const auto& t : z.laurent_payload())
    total += static_cast<long>(boost::multiprecision::msb(abs(rat_num(t.coeff)) + 1) +
                               boost::multiprecision::msb(rat_den(t.coeff) + 1));
  return total > bits;
}

}  // namespace detail

// Classification of the residue direction of a good-reduction map, plus a
// factorial-iterate verification on rigid samples.  Samples are iterated
// step by step (truncated p-adic arithmetic over Q_p backends, height-capped
// exact arithmetic otherwise) and checked at the indices n! <= step_budget:
//   towards-Gauss: the sampled residues must keep tracking distinct classes;
//   towards-constant: the orbit must contract along the cycle period;
//   periodic-ball: the sampled residues must follow the predicted cycle.
inline GoodReductionReport good_reduction_limit_probe(const RationalMap& R, const Rat& zeta,
                                                      long n_max,
                                                      const std::vector<FieldElement>& samples,
                                                      long step_budget = 720) {
  GoodReductionReport rep;
  rep.reduction = detail::good_reduction_of(R);
  require(R.den.degree() == 0, "good_reduction_limit_probe: polynomial maps only");

  // classify the residue direction
  long period = 0, preperiod = 0;
  if (rep.reduction.residue_char == 0) {
    QOps q;
    auto rr = to_q(rep.reduction);
    auto orb = classify_direction(q, rr, ProjPoint<Rat>::finite(zeta), 48);
    rep.budget_limited = orb.verdict == OrbitClass::NonPreperiodicBudget;
    rep.verdict = orb.verdict == OrbitClass::PreperiodicCritical ? GoodReductionCase::TowardsConstant
                  : orb.verdict == OrbitClass::PreperiodicNoncritical
                      ? GoodReductionCase::PeriodicBall
                      : GoodReductionCase::TowardsGauss;
    preperiod = orb.preperiod;
    period = orb.period;
    for (const auto& pt : orb.orbit)
      if (!pt.inf) rep.residue_orbit.push_back(pt.v);
  } else {
    GFOps gf(rep.reduction.residue_char);
    auto rr = to_gf(gf, rep.reduction);
    auto orb = classify_direction(gf, rr,
                                  ProjPoint<GFOps::Elem>::finite(static_cast<GFOps::Elem>(
                                      rat_num(zeta) % gf.order())));
    rep.verdict = orb.verdict == OrbitClass::PreperiodicCritical ? GoodReductionCase::TowardsConstant
                  : orb.verdict == OrbitClass::PreperiodicNoncritical
                      ? GoodReductionCase::PeriodicBall
                      : GoodReductionCase::TowardsGauss;
    preperiod = orb.preperiod;
    period = orb.period;
    for (const auto& pt : orb.orbit)
      if (!pt.inf) rep.residue_orbit.push_back(Rat(pt.v));
  }
  rep.preperiod = preperiod;
  rep.period = period;

  const long M = 64;
  for (const auto& z0 : samples) {
    GoodReductionSampleRow row;
    row.sample = z0;
    require(z0.residue() == FieldElement::from_rational(R.field(), zeta).residue(),
            "good_reduction_limit_probe: sample outside the residue ball");
    std::vector<FieldElement> orbit = {z0};
    long factorial = 1;
    for (long n = 1; factorial <= step_budget; ++n, factorial *= n) {
      // extend the orbit to length factorial + 1
      bool capped = false;
      while (static_cast<long>(orbit.size()) <= factorial) {
        if (detail::height_capped(orbit.back(), 1 << 14)) {
          capped = true;
          break;
        }
        orbit.push_back(detail::truncated_step(R.num, orbit.back(), M));
      }
      if (capped || n > n_max) {
        row.note = capped ? "height cap reached" : "n_max reached";
        break;
      }
      const FieldElement& zn = orbit[static_cast<std::size_t>(factorial)];
      bool ok = true;
      switch (rep.verdict) {
        case GoodReductionCase::TowardsGauss: {
          // non-preperiodic direction: the orbit keeps entering fresh
          // residue classes, so every earlier iterate sits at distance one
          for (long i = 0; ok && i < factorial; ++i)
            ok = !(LogValue(0) < (orbit[static_cast<std::size_t>(i)] - zn).valuation());
          break;
        }
        case GoodReductionCase::TowardsConstant: {
          // contraction along the cycle period: v(z_{k+T} - z_k) increases
          if (factorial > preperiod + 2 * period && period > 0) {
            const auto& a = orbit[static_cast<std::size_t>(factorial - period)];
            const auto& b = orbit[static_cast<std::size_t>(factorial - 2 * period)];
            ok = (zn - a).valuation() > (a - b).valuation() ||
                 ((zn - a).valuation().is_pos_inf());
          }
          break;
        }
        case GoodReductionCase::PeriodicBall: {
          // after the preperiod the residue follows the predicted cycle
          if (factorial >= preperiod && period > 0) {
            const std::size_t idx =
                static_cast<std::size_t>(preperiod + ((factorial - preperiod) % period));
            if (idx < rep.residue_orbit.size()) {
              unsigned p = R.field().residue_char();
              Rat want = rep.residue_orbit[idx];
              Rat got = zn.residue();
              ok = p == 0 ? got == want
                          : detail::mod_p(got, p) == detail::mod_p(want, p);
            }
          }
          break;
        }
      }
      if (!ok) {
        row.ok = false;
        row.note = "prediction failed at n=" + std::to_string(n);
        break;
      }
      row.verified_up_to = n;
    }
    rep.samples.push_back(std::move(row));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Cantor coding for P_c(z) = z^2 + c with |c| >= 4 over Q_2.

namespace detail {

// A square of Q_2 inside the ball B(A, tau), when one exists: the valuation
// of A must be even and its unit part a square modulo the relative precision
// the radius leaves free.  Choosing the representative inside the ball is
// what anchors the preimage tree at rational centers (for the start ball of
// c = 3/16 it picks the fixed point 1/4 as center).
inline FieldElement square_in_ball(const FieldElement& A, const LogValue& tau) {
  const FieldDescriptor& d = A.field();
  require(!A.is_zero(), "square_in_ball: zero center");
  const LogValue v = A.valuation();
  const long vA = static_cast<long>(rat_num(v.finite()));
  require(vA % 2 == 0, "square_in_ball: no square in the ball (odd valuation)");
  // relative precision: perturbations delta with v(delta) >= ceil(-tau)
  const Rat neg_tau = -tau.finite();
  Int ceilv = rat_num(neg_tau) / rat_den(neg_tau);
  if (rat_num(neg_tau) > 0 && rat_num(neg_tau) % rat_den(neg_tau) != 0) ceilv += 1;
  const long m = static_cast<long>(ceilv) - vA;

  const Rat unit = A.rational_payload() /
                   FieldElement::uniformizer_pow(d, vA).rational_payload();
  const long u8 = static_cast<long>(detail::mod_prime_power(unit, 2, 3));
  if (u8 == 1) return A;
  if (m >= 3)
    throw precondition_error("square_in_ball: no square in the ball (unit not 1 mod 8)");
  if (m == 2) {
    require(u8 % 4 == 1, "square_in_ball: no square in the ball (unit not 1 mod 4)");
  }
  // replace the unit part by 1; the correction stays below the radius
  return FieldElement::uniformizer_pow(d, vA);
}

}  // namespace detail

struct CantorBall {
  BerkovichPoint ball;
  long degree;                // degree of P_c on the ball (onto its parent)
  std::vector<int> address;   // partition symbols of the forward images
};

struct CantorReport {
  BerkovichPoint start;
  std::vector<std::vector<CantorBall>> levels;  // levels[k]: preimages of order k+1
  long separation_level = 0;                    // first level with two balls
  bool disjoint_ok = true;
  bool images_ok = true;
  bool counts_ok = true;
};

inline CantorReport cantor_coding(const FieldElement& c, long depth) {
  const FieldDescriptor& d = c.field();
  require(d.kind == FieldKind::PAdic && d.p == 2, "cantor_coding: p-adic p=2 backend required");
  require(!(LogValue(-2) < c.valuation()), "cantor_coding: need |c| >= 4");
  require(depth >= 1, "cantor_coding: depth >= 1");

  const long vc = static_cast<long>(rat_num(c.valuation().finite()));
  const PolynomialMap pc =
      PolynomialMap::make(d, {c, FieldElement::zero(d), FieldElement::one(d)});
  CantorReport rep{BerkovichPoint::make(FieldElement::zero(d), LogValue(Rat(-vc, 2))),
                   {}, 0, true, true, true};

  const LogValue prec(64 + 4 * depth);
  std::vector<BerkovichPoint> frontier = {rep.start};
  for (long level = 1; level <= depth; ++level) {
    std::vector<BerkovichPoint> next;
    for (const auto& target : frontier) {
      // preimage centers solve z^2 = w' - c for a representative w' of the
      // target ball whose offset is a square
      FieldElement z0 = FieldElement::zero(d);
      try {
        const FieldElement A = detail::square_in_ball(target.center() - c, target.tau());
        z0 = hensel_sqrt(A, prec);
      } catch (const precondition_error& e) {
        throw precondition_error("cantor_coding: square-root obstruction at level " +
                                 std::to_string(level) + " (" + e.what() + ")");
      }
      for (const FieldElement& center : {z0, -z0}) {
        auto rc = recenter(pc, center);
        // sigma with image log-diam equal to the target's
        Rat sigma;
        bool seen = false;
        for (std::size_t i = 1; i < rc.coeffs.size(); ++i) {
          if (rc.coeffs[i].is_zero()) continue;
          Rat cand = (target.tau().finite() + rc.coeffs[i].valuation().finite()) / Rat(i);
          if (!seen || cand < sigma) sigma = cand;
          seen = true;
        }
        auto ball = BerkovichPoint::make(center, LogValue(sigma));
        ensure(equal_points(image_of_ball(pc, ball), target), "cantor_coding: image mismatch");
        bool dup = false;
        for (const auto& prev : next) dup = dup || equal_points(prev, ball);
        if (!dup) next.push_back(ball);
      }
    }
    std::vector<CantorBall> lvl;
    for (const auto& b : next) lvl.push_back({b, local_degree(pc, b), {}});
    rep.levels.push_back(std::move(lvl));
    if (rep.separation_level == 0 && next.size() >= 2) rep.separation_level = level;
    frontier = std::move(next);
  }

  // pairwise disjointness past the separation level
  for (std::size_t k = 0; k < rep.levels.size(); ++k) {
    const auto& lvl = rep.levels[k];
    for (std::size_t i = 0; i < lvl.size(); ++i)
      for (std::size_t j = i + 1; j < lvl.size(); ++j)
        if (leq(lvl[i].ball, lvl[j].ball) || leq(lvl[j].ball, lvl[i].ball))
          rep.disjoint_ok = false;
    // forward images equal the parent ball
    for (const auto& cb : lvl) {
      const BerkovichPoint img = image_of_ball(pc, cb.ball);
      const bool to_start = k == 0 ? equal_points(img, rep.start) : false;
      bool to_parent = to_start;
      if (k > 0)
        for (const auto& par : rep.levels[k - 1]) to_parent = to_parent || equal_points(img, par.ball);
      if (!to_parent) rep.images_ok = false;
    }
    // counts double from the separation level on
    const long level = static_cast<long>(k) + 1;
    const long expect = (rep.separation_level == 0 || level < rep.separation_level)
                            ? 1
                            : 1L << (level - rep.separation_level + 1);
    if (static_cast<long>(lvl.size()) != expect) rep.counts_ok = false;
  }

  // addresses: symbols of the forward images through the partition
  if (rep.separation_level > 0) {
    const auto& partition = rep.levels[static_cast<std::size_t>(rep.separation_level - 1)];
    for (auto& lvl : rep.levels) {
      for (auto& cb : lvl) {
        BerkovichPoint cur = cb.ball;
        for (long g = 0; g <= depth; ++g) {  // images climb one level per step
          int sym = -1;
          for (std::size_t s = 0; s < partition.size(); ++s)
            if (leq(cur, partition[s].ball)) sym = static_cast<int>(s);
          if (sym < 0) break;
          cb.address.push_back(sym);
          cur = image_of_ball(pc, cur);
        }
      }
    }
  }
  return rep;
}

struct ItineraryCheck {
  std::vector<int> symbols;
  bool shift_ok = true;     // itinerary of P(z) is the shifted itinerary of z
  bool address_ok = true;   // containing-ball addresses match the symbols
};

// Symbol sequence of a (possibly approximate) bounded-orbit point through
// the separation-level partition, with the conjugacy checks.
inline ItineraryCheck check_itinerary(const CantorReport& rep, const FieldElement& c,
                                      const FieldElement& z, long depth) {
  const FieldDescriptor& d = c.field();
  const PolynomialMap pc =
      PolynomialMap::make(d, {c, FieldElement::zero(d), FieldElement::one(d)});
  require(rep.separation_level > 0, "check_itinerary: no separation level");
  const auto& partition = rep.levels[static_cast<std::size_t>(rep.separation_level - 1)];

  auto symbol_of = [&](const FieldElement& w) {
    for (std::size_t s = 0; s < partition.size(); ++s)
      if (leq(BerkovichPoint::rigid(w), partition[s].ball)) return static_cast<int>(s);
    return -1;
  };

  ItineraryCheck out;
  std::vector<FieldElement> orbit = {z};
  for (long m = 1; m < depth + 1; ++m) orbit.push_back(pc.eval(orbit.back()));
  for (long m = 0; m < depth; ++m) {
    int sym = symbol_of(orbit[static_cast<std::size_t>(m)]);
    require(sym >= 0, "check_itinerary: orbit left the partition (not a bounded-orbit point?)");
    out.symbols.push_back(sym);
  }
  // shift relation: recompute the itinerary of P(z) independently
  for (long m = 0; m + 1 < depth; ++m) {
    int sym = symbol_of(orbit[static_cast<std::size_t>(m + 1)]);
    if (sym != out.symbols[static_cast<std::size_t>(m + 1)]) out.shift_ok = false;
  }
  // the containing level-k ball's address is the symbol prefix
  for (std::size_t k = 0; k < rep.levels.size(); ++k) {
    const CantorBall* container = nullptr;
    for (const auto& cb : rep.levels[k])
      if (leq(BerkovichPoint::rigid(z), cb.ball)) container = &cb;
    if (!container) continue;
    for (std::size_t i = 0; i < container->address.size() && i < out.symbols.size(); ++i)
      if (container->address[i] != out.symbols[i]) out.address_ok = false;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Schwarz identity.

struct SchwarzReport {
  LogValue via_coefficients;       // derivative sup-norm from f's coefficients
  LogValue via_derivative_norm;    // semi-norm of f' at the point
  bool equal = false;
};

inline SchwarzReport schwarz_check(const PolynomialMap& f, const BerkovichPoint& x) {
  require(x.type() == PointType::TypeII, "schwarz_check: need a type II point");
  const BerkovichPoint img = image_of_ball(f, x);
  require(leq(img, BerkovichPoint::gauss(f.desc)), "schwarz_check: image not in the unit ball");
  SchwarzReport rep;
  rep.via_coefficients = derivative_sup_norm(f, x);
  rep.via_derivative_norm = gauss_norm(f.derivative(), x);
  rep.equal = rep.via_coefficients == rep.via_derivative_norm;
  ensure(rep.equal, "schwarz_check: the two derivative norms disagree");
  return rep;
}

}  // namespace berk
