#include <berk/montel.hpp>

#include <catch_amalgamated.hpp>

#include "test_util.hpp"

using namespace berk;
using testutil::SplitMix;

namespace {

FieldElement Q(const FieldDescriptor& d, long num, long den = 1) {
  return FieldElement::from_rational(d, Rat(num, den));
}

}  // namespace

TEST_CASE("pointwise limit probe on the shifted-monomial family") {
  auto lq = FieldDescriptor::laurent_q();
  // f_n = z + t (n) z^2 at the rigid point 1, witnesses {0, 1, 1+t}
  auto t = FieldElement::uniformizer_pow(lq, 1);
  auto fam = MapFamily::shifted_monomial(lq, 1, 2, t);
  auto x = BerkovichPoint::rigid(Q(lq, 1));
  std::vector<FieldElement> witnesses = {Q(lq, 0), Q(lq, 1), Q(lq, 1) + t};
  auto rep = pointwise_limit_probe(fam, x, 20, witnesses);

  REQUIRE(rep.tracks.size() == 3);
  for (const auto& tr : rep.tracks) CHECK(tr.stabilized);
  CHECK(rep.tracks[0].limit == LogValue(0));   // log |f_n(1) - 0| = 0
  CHECK(rep.tracks[1].limit == LogValue(-1));  // log |f_n(1) - 1| = v-log of t
  CHECK(rep.tracks[2].limit == LogValue(-1));
  REQUIRE(rep.inferred_ball.has_value());
  // the inferred ball is B(z^r, |a| |z|^s) = B(1, tau = -1)
  CHECK(equal_points(*rep.inferred_ball, BerkovichPoint::make(Q(lq, 1), LogValue(-1))));
}

TEST_CASE("power family witness sequences need not stabilize") {
  auto p3 = FieldDescriptor::padic(3);
  auto fam = MapFamily::power(p3);
  auto x = BerkovichPoint::rigid(Q(p3, 2));
  auto rep = pointwise_limit_probe(fam, x, 20, {Q(p3, 0), Q(p3, 1)});
  REQUIRE(rep.tracks.size() == 2);
  CHECK(rep.tracks[0].stabilized);               // log |2^n| = 0 always
  CHECK(rep.tracks[0].limit == LogValue(0));
  CHECK(!rep.tracks[1].stabilized);              // 2^n mod 3 alternates 2, 1
  CHECK(!rep.inferred_ball.has_value());
}

TEST_CASE("empty witness lists give empty reports") {
  auto lq = FieldDescriptor::laurent_q();
  auto fam = MapFamily::power(lq);
  auto rep = pointwise_limit_probe(fam, BerkovichPoint::rigid(Q(lq, 2)), 6, {});
  CHECK(rep.tracks.empty());
  CHECK(!rep.inferred_ball.has_value());
}

TEST_CASE("shifted-monomial inference matches the limit ball on random points") {
  SplitMix rng(20240814);
  auto lq = FieldDescriptor::laurent_q();
  int done = 0;
  while (done < 30) {
    long r = rng.range(1, 3), s = r + rng.range(0, 2);
    auto a = FieldElement::laurent(lq, {{rng.range(-3, 3), Rat(rng.range(1, 9))}});
    auto z = FieldElement::laurent(lq, {{rng.range(-2, 2), Rat(rng.range(1, 9))}});
    if (z.is_zero() || a.is_zero()) continue;
    ++done;
    auto fam = MapFamily::shifted_monomial(lq, r, s, a);
    // witnesses: the limit center z^r, plus two probes
    std::vector<FieldElement> witnesses = {z.pow(r), Q(lq, 0), z.pow(r) + Q(lq, 1)};
    auto rep = pointwise_limit_probe(fam, BerkovichPoint::rigid(z), 12, witnesses);
    REQUIRE(rep.inferred_ball.has_value());
    const LogValue expected_tau = -(a.valuation() + s * z.valuation());
    CHECK(equal_points(*rep.inferred_ball,
                       BerkovichPoint::make(z.pow(r), expected_tau)));
  }
}

TEST_CASE("degree explosion of the scaled-power family") {
  auto f2 = FieldDescriptor::laurent_fp(2);
  auto fam = MapFamily::scaled_power(f2, FieldElement::uniformizer_pow(f2, 1));

  auto rep = degree_explosion_probe(fam, BerkovichPoint::gauss(f2), 8);
  REQUIRE(rep.rows.size() == 8);
  long q = 1;
  for (const auto& row : rep.rows) {
    q *= 2;
    CHECK(row.degree == q);
    CHECK(row.image_log_diam == LogValue(-q));  // 2^n (0 - 1)
  }
  CHECK(rep.collapse_verified);

  auto half = BerkovichPoint::make(FieldElement::zero(f2), LogValue(Rat(1, 2)));
  auto rep2 = degree_explosion_probe(fam, half, 8);
  q = 1;
  for (const auto& row : rep2.rows) {
    q *= 2;
    CHECK(row.image_log_diam == LogValue(Rat(-q, 2)));  // 2^n (1/2 - 1)
  }

  // z^n at the Gauss point: degrees grow but nothing collapses
  auto pow = MapFamily::power(f2);
  auto rep3 = degree_explosion_probe(pow, BerkovichPoint::gauss(f2), 8);
  CHECK(!rep3.collapse_verified);
  CHECK(!rep3.note.empty());
  for (const auto& row : rep3.rows) CHECK(row.image_log_diam == LogValue(0));
}

TEST_CASE("good reduction probe over p=3") {
  auto p3 = FieldDescriptor::padic(3);
  auto sq = RationalMap::of(PolynomialMap::from_rationals(p3, {Rat(0), Rat(0), Rat(1)}));

  SECTION("critical direction: orbit contracts to the constant") {
    auto rep = good_reduction_limit_probe(sq, Rat(0), 4, {Q(p3, 3)});
    CHECK(rep.verdict == GoodReductionCase::TowardsConstant);
    REQUIRE(rep.samples.size() == 1);
    CHECK(rep.samples[0].ok);
    CHECK(rep.samples[0].verified_up_to >= 3);
  }

  SECTION("noncritical cycle: residues follow 2 -> 1 -> 1") {
    auto rep = good_reduction_limit_probe(sq, Rat(2), 4, {Q(p3, 2), Q(p3, 5)});
    CHECK(rep.verdict == GoodReductionCase::PeriodicBall);
    CHECK(rep.preperiod == 1);
    CHECK(rep.period == 1);
    for (const auto& row : rep.samples) {
      CHECK(row.ok);
      CHECK(row.verified_up_to >= 3);
    }
  }

  SECTION("laurent-q: non-preperiodic class heads for the Gauss point") {
    auto lq = FieldDescriptor::laurent_q();
    auto sql = RationalMap::of(PolynomialMap::from_rationals(lq, {Rat(0), Rat(0), Rat(1)}));
    auto rep = good_reduction_limit_probe(sql, Rat(2), 3, {Q(lq, 2)});
    CHECK(rep.verdict == GoodReductionCase::TowardsGauss);
    REQUIRE(rep.samples.size() == 1);
    CHECK(rep.samples[0].ok);
  }

  SECTION("bad reduction is rejected") {
    auto bad = RationalMap::of(PolynomialMap::from_rationals(p3, {Rat(0), Rat(0), Rat(3)}));
    CHECK_THROWS_AS(good_reduction_limit_probe(bad, Rat(0), 2, {}), precondition_error);
    auto frac = RationalMap::of(PolynomialMap::from_rationals(p3, {Rat(0), Rat(1, 3)}));
    CHECK_THROWS_AS(good_reduction_limit_probe(frac, Rat(0), 2, {}), precondition_error);
  }
}

TEST_CASE("cantor coding for c = 3/16 over Q_2") {
  auto p2 = FieldDescriptor::padic(2);
  auto c = FieldElement::from_rational(p2, Rat(3, 16));
  auto rep = cantor_coding(c, 8);

  CHECK(equal_points(rep.start, BerkovichPoint::make(Q(p2, 0), LogValue(2))));
  REQUIRE(rep.levels.size() == 8);

  // level 1: the single ball B(1/4, 1) carrying degree 2
  REQUIRE(rep.levels[0].size() == 1);
  CHECK(equal_points(rep.levels[0][0].ball,
                     BerkovichPoint::make(FieldElement::from_rational(p2, Rat(1, 4)), LogValue(1))));
  CHECK(rep.levels[0][0].degree == 2);

  // level 2: B(1/4, 0) and B(-1/4, 0), disjoint
  CHECK(rep.separation_level == 2);
  REQUIRE(rep.levels[1].size() == 2);
  auto b0 = BerkovichPoint::make(FieldElement::from_rational(p2, Rat(1, 4)), LogValue(0));
  auto b1 = BerkovichPoint::make(FieldElement::from_rational(p2, Rat(-1, 4)), LogValue(0));
  CHECK((equal_points(rep.levels[1][0].ball, b0) || equal_points(rep.levels[1][0].ball, b1)));

  CHECK(rep.disjoint_ok);
  CHECK(rep.images_ok);
  CHECK(rep.counts_ok);
  for (std::size_t k = 0; k < rep.levels.size(); ++k)
    CHECK(rep.levels[k].size() == (k == 0 ? 1u : 1u << k));  // 2^{level-1} past separation

  // itineraries of the fixed points and of a 2-cycle point
  auto fixed14 = check_itinerary(rep, c, FieldElement::from_rational(p2, Rat(1, 4)), 8);
  CHECK(fixed14.shift_ok);
  CHECK(fixed14.address_ok);
  for (std::size_t i = 1; i < fixed14.symbols.size(); ++i)
    CHECK(fixed14.symbols[i] == fixed14.symbols[0]);

  auto fixed34 = check_itinerary(rep, c, FieldElement::from_rational(p2, Rat(3, 4)), 8);
  CHECK(fixed34.shift_ok);
  CHECK(fixed34.address_ok);
  CHECK(fixed34.symbols[0] != fixed14.symbols[0]);

  // 2-cycle: roots of z^2 + z + c + 1, available since -3 - 4c = -15/4 and
  // -15 = 1 mod 8
  auto disc = Q(p2, -15, 4);
  auto root = hensel_sqrt(disc, LogValue(90));
  auto z2 = (Q(p2, -1) + root) / Q(p2, 2);
  auto cyc = check_itinerary(rep, c, z2, 8);
  CHECK(cyc.shift_ok);
  CHECK(cyc.address_ok);
  for (std::size_t i = 2; i < cyc.symbols.size(); ++i) CHECK(cyc.symbols[i] == cyc.symbols[i - 2]);
  CHECK(cyc.symbols[0] != cyc.symbols[1]);  // genuine 2-cycle, not fixed

  // square-root obstruction: with v(c) odd the level-1 components have no
  // rational points at all (their elements have half-integral valuation)
  CHECK_THROWS_AS(cantor_coding(FieldElement::from_rational(p2, Rat(1, 8)), 2),
                  precondition_error);

  // |c| < 4 is rejected
  CHECK_THROWS_AS(cantor_coding(FieldElement::from_rational(p2, Rat(1, 2)), 2),
                  precondition_error);
}

TEST_CASE("schwarz identity") {
  auto p3 = FieldDescriptor::padic(3);
  auto cube = PolynomialMap::monomial(p3, 3, FieldElement::one(p3));
  auto rep = schwarz_check(cube, BerkovichPoint::gauss(p3));
  CHECK(rep.via_coefficients == LogValue(-1));
  CHECK(rep.via_derivative_norm == LogValue(-1));
  CHECK(rep.equal);

  auto lin = PolynomialMap::from_rationals(p3, {Rat(0), Rat(1)});
  auto rep2 = schwarz_check(lin, BerkovichPoint::gauss(p3));
  CHECK(rep2.via_coefficients == LogValue(0));

  auto p2 = FieldDescriptor::padic(2);
  auto sq = PolynomialMap::from_rationals(p2, {Rat(0), Rat(0), Rat(1)});
  auto rep3 = schwarz_check(sq, BerkovichPoint::gauss(p2));
  CHECK(rep3.via_coefficients == LogValue(-1));

  // image outside the unit ball is rejected
  auto big = PolynomialMap::from_rationals(p2, {Rat(1, 2), Rat(1)});
  CHECK_THROWS_AS(schwarz_check(big, BerkovichPoint::gauss(p2)), precondition_error);
}

TEST_CASE("probe coherence: inferred balls reproduce every witness value") {
  SplitMix rng(515);
  auto lq = FieldDescriptor::laurent_q();
  int done = 0;
  while (done < 20) {
    long r = rng.range(1, 2), s = r + rng.range(0, 2);
    auto a = FieldElement::laurent(lq, {{rng.range(-2, 2), Rat(rng.range(1, 5))}});
    auto z = Q(lq, rng.range(1, 9));
    if (a.is_zero()) continue;
    ++done;
    auto fam = MapFamily::shifted_monomial(lq, r, s, a);
    std::vector<FieldElement> witnesses;
    for (int i = 0; i < 4; ++i) witnesses.push_back(testutil::random_element(rng, lq));
    witnesses.push_back(z.pow(r));
    auto rep = pointwise_limit_probe(fam, BerkovichPoint::rigid(z), 12, witnesses);
    if (!rep.inferred_ball) continue;
    for (const auto& tr : rep.tracks)
      CHECK(tr.limit == log_distance_to_rigid(*rep.inferred_ball, tr.witness));
  }
}
