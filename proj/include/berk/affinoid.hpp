#pragma once

// Affinoid domains of the affine line (a closed ball minus finitely many
// open balls, all described by their boundary points), fast arcs towards the
// boundary, and the degree bound and degree-sum verifications they support.

#include <berk/errors.hpp>
#include <berk/maps.hpp>
#include <berk/tree.hpp>

#include <algorithm>
#include <string>
#include <vector>

namespace berk {

struct Affinoid {
  BerkovichPoint outer;
  std::vector<BerkovichPoint> holes;  // boundary points of the removed open balls

  // The outer boundary point is the unique maximal one for containment.
  static Affinoid from_boundary(std::vector<BerkovichPoint> boundary) {
    require(!boundary.empty(), "affinoid: empty boundary");
    for (const auto& b : boundary)
      require(b.type() == PointType::TypeII, "affinoid: boundary points must be of type II");
    std::size_t top = 0;
    for (std::size_t i = 1; i < boundary.size(); ++i)
      if (leq(boundary[top], boundary[i])) top = i;
    Affinoid y{boundary[top], {}};
    for (std::size_t i = 0; i < boundary.size(); ++i) {
      if (i == top) continue;
      require(leq(boundary[i], y.outer) && !equal_points(boundary[i], y.outer),
              "affinoid: boundary points must be nested below a single outer ball");
      y.holes.push_back(boundary[i]);
    }
    for (std::size_t i = 0; i < y.holes.size(); ++i)
      for (std::size_t j = i + 1; j < y.holes.size(); ++j)
        require(!leq(y.holes[i], y.holes[j]) && !leq(y.holes[j], y.holes[i]),
                "affinoid: hole balls must be disjoint");
    return y;
  }

  std::vector<BerkovichPoint> boundary() const {
    std::vector<BerkovichPoint> b = {outer};
    b.insert(b.end(), holes.begin(), holes.end());
    return b;
  }

  // Membership of a ball point in Y = outer minus the open holes.  A point
  // lies in the open ball of h iff both its radius and its center offset
  // drop strictly below the radius of h.
  bool contains(const BerkovichPoint& x) const {
    if (x.is_infinity() || !leq(x, outer)) return false;
    for (const auto& h : holes)
      if (x.tau() < h.tau() && -(x.center() - h.center()).valuation() < h.tau()) return false;
    return true;
  }

  // The topological interior: Y minus its finitely many boundary points.
  bool interior_contains(const BerkovichPoint& x) const {
    if (!contains(x) || equal_points(x, outer)) return false;
    for (const auto& h : holes)
      if (equal_points(x, h)) return false;
    return true;
  }
};

// Number of directions at an interior point x that contain a boundary point
// of Y (the branching valence of the convex hull of the boundary plus x).
inline long boundary_valence(const Affinoid& y, const BerkovichPoint& x) {
  require(x.type() == PointType::TypeII, "boundary_valence: need a type II point");
  require(y.interior_contains(x), "boundary_valence: point is not interior");
  std::vector<Direction> dirs;
  for (const auto& b : y.boundary()) {
    Direction d = direction_at(x, b);
    bool seen = false;
    for (const auto& e : dirs) seen = seen || e == d;
    if (!seen) dirs.push_back(d);
  }
  return static_cast<long>(dirs.size());
}

struct FastArcReport {
  std::vector<BerkovichPoint> vertices;  // x0 = v_0, branch vertices, x' in dY
  std::vector<long> segment_degrees;     // slope of log-diam just above each vertex
  std::vector<long> valences;            // val_Y at every vertex except x'
  Rat C;                                 // 1 / prod of the valences
  long start_degree = 0;                 // deg_{x0} f
  long boundary_degree = 0;              // deg_{x'} f
};

// The fast arc of a polynomial from an interior point to the boundary.  A
// polynomial sends only the infinity direction to the infinity direction of
// the image, so the arc ascends: B(a, tau) for increasing tau until the
// first boundary point, collecting the branch vertices of hull(dY + x0) on
// the way.  Along the ascent log-diam grows with slope equal to the local
// degree, which certifies deg_{x'} f >= C deg_{x0} f with
// C = 1 / prod val_Y(v_i).
inline FastArcReport fast_arc(const PolynomialMap& f, const Affinoid& y,
                              const BerkovichPoint& x0) {
  require(!f.is_constant(), "fast_arc: constant map");
  require(x0.type() == PointType::TypeII, "fast_arc: start must be a type II point");
  require(y.interior_contains(x0), "fast_arc: start must be interior");

  const FieldElement& a = x0.center();
  const Rat tau0 = x0.tau().finite();

  // first boundary point hit by the ascent tau -> B(a, tau); the outer
  // radius is always reached, a hole only when its sphere carries the center
  Rat tau_end = y.outer.tau().finite();
  for (const auto& h : y.holes) {
    if (!(tau0 < h.tau().finite())) continue;
    if (!(h.tau() < -(a - h.center()).valuation())) {  // ascent passes through h
      tau_end = std::min(tau_end, h.tau().finite());
    }
  }

  // branch vertices: joins of x0 with boundary points, strictly inside
  std::vector<Rat> cuts;
  for (const auto& b : y.boundary()) {
    const Rat tj = join(x0, b).tau().finite();
    if (tau0 < tj && tj < tau_end) cuts.push_back(tj);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  FastArcReport rep;
  rep.vertices.push_back(x0);
  for (const Rat& t : cuts) rep.vertices.push_back(BerkovichPoint::make(a, LogValue(t)));
  rep.vertices.push_back(BerkovichPoint::make(a, LogValue(tau_end)));

  auto polygon = log_diam_polygon(f, a, tau0, tau_end);
  rep.start_degree = local_degree(f, x0);
  rep.boundary_degree = local_degree(f, rep.vertices.back());
  rep.C = Rat(1);
  for (std::size_t i = 0; i + 1 < rep.vertices.size(); ++i) {
    rep.segment_degrees.push_back(
        static_cast<long>(polygon.slope_above(rep.vertices[i].tau().finite())));
    const long val = boundary_valence(y, rep.vertices[i]);
    rep.valences.push_back(val);
    rep.C /= val;
  }

  // certificate checks (Convexity: log-diam strictly increasing; the degree
  // along the arc never falls below C deg_{x0} f)
  ensure(Rat(0) < rep.C && !(Rat(1) < rep.C), "fast_arc: C outside (0, 1]");
  for (long d : rep.segment_degrees) {
    ensure(d >= 1, "fast_arc: log-diam not strictly increasing");
    ensure(!(Rat(d) < rep.C * rep.start_degree), "fast_arc: slope fell below C deg_{x0}");
  }
  ensure(!(Rat(rep.boundary_degree) < rep.C * rep.start_degree),
         "fast_arc: boundary degree below C deg_{x0}");
  return rep;
}

struct DegreeBoundEntry {
  BerkovichPoint sample;
  long degree;
  Rat bound;  // (1/C) * max boundary degree for this sample's arc
  FastArcReport arc;
};

struct DegreeBoundReport {
  long max_boundary_degree = 0;
  std::vector<DegreeBoundEntry> entries;
  bool all_bounded = true;
};

// deg_x f <= C' sup_{dY} deg f for every sample, with C' = 1/C taken from
// the sample's own fast arc.
inline DegreeBoundReport degree_bound_check(const PolynomialMap& f, const Affinoid& y,
                                            const std::vector<BerkovichPoint>& samples) {
  DegreeBoundReport rep;
  for (const auto& b : y.boundary())
    rep.max_boundary_degree = std::max(rep.max_boundary_degree, local_degree(f, b));
  for (const auto& x : samples) {
    DegreeBoundEntry e{x, local_degree(f, x), Rat(0), fast_arc(f, y, x)};
    e.bound = Rat(rep.max_boundary_degree) / e.arc.C;
    if (e.bound < Rat(e.degree)) rep.all_bounded = false;
    rep.entries.push_back(std::move(e));
  }
  ensure(rep.all_bounded, "degree_bound_check: a sample exceeded the boundary bound");
  return rep;
}

// ---------------------------------------------------------------------------
// Fibers and the degree sum.

// Exact n-th root over the p-adic backend (rational payload), if one exists.
inline std::optional<FieldElement> nth_root_exact(const FieldElement& x, long n) {
  require(n >= 1, "nth_root_exact: n >= 1");
  if (x.is_zero()) return FieldElement::zero(x.field());
  if (x.field().kind != FieldKind::PAdic) return std::nullopt;
  const Rat q = x.rational_payload();
  if (q < 0 && n % 2 == 0) return std::nullopt;
  auto iroot = [&](Int v) -> std::optional<Int> {
    bool negative = v < 0;
    if (negative) v = -v;
    if (v == 0) return Int(0);
    Int lo = 0, hi = v + 1;
    while (lo + 1 < hi) {  // binary search for floor root
      Int mid = (lo + hi) / 2;
      Int p = 1;
      for (long i = 0; i < n; ++i) p *= mid;
      if (p <= v) lo = mid;
      else hi = mid;
    }
    Int p = 1;
    for (long i = 0; i < n; ++i) p *= lo;
    if (p != v) return std::nullopt;
    return negative ? -lo : lo;
  };
  auto rn = iroot(rat_num(q));
  auto rd = iroot(rat_den(q));
  if (!rn || !rd) return std::nullopt;
  return FieldElement::from_rational(x.field(), Rat(*rn, *rd));
}

// Roots of c2 z^2 + c1 z + c0 to the given precision via the quadratic
// formula; throws when the discriminant is not a square in the backend.
inline std::vector<FieldElement> quadratic_roots(const FieldElement& c0, const FieldElement& c1,
                                                 const FieldElement& c2, const LogValue& prec) {
  require(!c2.is_zero(), "quadratic_roots: degenerate quadratic");
  const FieldDescriptor& d = c0.field();
  const FieldElement four = FieldElement::from_int(d, 4);
  const FieldElement two = FieldElement::from_int(d, 2);
  const FieldElement disc = c1 * c1 - four * c2 * c0;
  if (disc.is_zero()) return {-c1 / (two * c2)};
  const FieldElement root = hensel_sqrt(disc, prec);
  return {(-c1 + root) / (two * c2), (-c1 - root) / (two * c2)};
}

struct FiberComponent {
  BerkovichPoint ball;
  long degree;
};

struct DegreeSumReport {
  std::vector<FiberComponent> fibers;
  long total = 0;
  long expected = 0;  // deg of f restricted to the domain ball
};

// Preimage components of a target ball under f on a domain ball, with their
// local degrees; the degrees must add up to the degree of f on the domain.
// Fiber solving handles linear maps, quadratics (via hensel_sqrt) and
// two-term fibers with exact roots; unrepresentable branch centers raise a
// precondition_error naming the obstruction.
inline DegreeSumReport degree_sum_check(const PolynomialMap& f, const BerkovichPoint& target,
                                        const BerkovichPoint& domain) {
  require(!f.is_constant(), "degree_sum_check: constant map");
  require(domain.in_hyperbolic_space() && target.in_hyperbolic_space(),
          "degree_sum_check: need ball points");
  require(leq(target, image_of_ball(f, domain)), "degree_sum_check: target outside the image");

  const FieldDescriptor& d = f.desc;
  ValuedOps ops(d);
  // fiber polynomial g(z) = f(z) - w
  std::vector<FieldElement> g = f.coeffs;
  g[0] = g[0] - target.center();
  poly_trim(ops, g);
  const long deg = poly_degree<ValuedOps>(g);

  std::vector<FieldElement> centers;
  const LogValue prec = LogValue(64);
  if (deg == 1) {
    centers.push_back(-g[0] / g[1]);
  } else if (deg == 2) {
    try {
      centers = quadratic_roots(g[0], g[1], g[2], prec);
    } catch (const precondition_error& e) {
      throw precondition_error(std::string("degree_sum_check: fiber not representable (") +
                               e.what() + ")");
    }
  } else {
    // two-term fibers z^deg = A
    bool two_term = true;
    for (long i = 1; i < deg; ++i) two_term = two_term && g[static_cast<std::size_t>(i)].is_zero();
    require(two_term, "degree_sum_check: fiber solving handles quadratics and monomials only");
    const FieldElement A = -g[0] / g[static_cast<std::size_t>(deg)];
    if (A.is_zero()) {
      centers.push_back(FieldElement::zero(d));
    } else {
      auto r = nth_root_exact(A, deg);
      require(r.has_value(), "degree_sum_check: fiber not representable (no exact n-th root)");
      centers.push_back(*r);
      if (deg % 2 == 0) centers.push_back(-*r);
    }
  }

  // the maximal ball around each center whose image is the target:
  // sigma = min_i (tau_target + v(c_i)) / i over the recentered coefficients
  DegreeSumReport rep;
  rep.expected = local_degree(f, domain);
  std::vector<BerkovichPoint> balls;
  for (const auto& z : centers) {
    auto rc = recenter(f, z);
    Rat sigma;
    bool seen = false;
    for (std::size_t i = 1; i < rc.coeffs.size(); ++i) {
      if (rc.coeffs[i].is_zero()) continue;
      Rat cand = (target.tau().finite() + rc.coeffs[i].valuation().finite()) / Rat(i);
      if (!seen || cand < sigma) sigma = cand;
      seen = true;
    }
    ensure(seen, "degree_sum_check: constant fiber polynomial");
    auto ball = BerkovichPoint::make(z, LogValue(sigma));
    ensure(equal_points(image_of_ball(f, ball), target),
           "degree_sum_check: imprecise fiber center");
    bool dup = false;
    for (const auto& prev : balls) dup = dup || equal_points(prev, ball);
    if (dup) continue;
    require(leq(ball, domain), "degree_sum_check: fiber component escapes the domain");
    balls.push_back(ball);
    rep.fibers.push_back({ball, local_degree(f, ball)});
    rep.total += rep.fibers.back().degree;
  }
  require(rep.total == rep.expected,
          "degree_sum_check: fiber degrees sum to " + std::to_string(rep.total) + " instead of " +
              std::to_string(rep.expected) + " (unrepresentable branches)");
  return rep;
}

}  // namespace berk
