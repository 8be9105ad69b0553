#include <berk/tree.hpp>

#include <catch_amalgamated.hpp>

#include "test_util.hpp"

using namespace berk;
using testutil::SplitMix;

namespace {

BerkovichPoint ball(const FieldDescriptor& d, long num, long den, const Rat& tau) {
  return BerkovichPoint::make(FieldElement::from_rational(d, Rat(num, den)), LogValue(tau));
}

BerkovichPoint random_ball(SplitMix& rng, const FieldDescriptor& d) {
  Rat tau(rng.range(-6, 6), rng.range(1, 3));
  return BerkovichPoint::make(testutil::random_element(rng, d), LogValue(tau));
}

}  // namespace

TEST_CASE("point classification and canonical equality") {
  auto p2 = FieldDescriptor::padic(2);
  CHECK(BerkovichPoint::gauss(p2).type() == PointType::TypeII);
  CHECK(ball(p2, 0, 1, Rat(1, 2)).type() == PointType::TypeIII);
  CHECK(BerkovichPoint::rigid(FieldElement::from_int(p2, 3)).type() == PointType::TypeI);
  CHECK(BerkovichPoint::infinity(p2).type() == PointType::Infinity);

  // (9, tau=0) = (0, tau=0) over p=3: v(9-0) = 2 >= -0
  auto p3 = FieldDescriptor::padic(3);
  CHECK(equal_points(ball(p3, 9, 1, Rat(0)), BerkovichPoint::gauss(p3)));
  CHECK(!equal_points(ball(p3, 1, 1, Rat(-1)), ball(p3, 0, 1, Rat(-1))));
}

TEST_CASE("containment order") {
  auto p3 = FieldDescriptor::padic(3);
  CHECK(leq(ball(p3, 0, 1, Rat(-1)), BerkovichPoint::gauss(p3)));
  CHECK(leq(ball(p3, 1, 1, Rat(-1)), BerkovichPoint::gauss(p3)));
  CHECK(!leq(BerkovichPoint::gauss(p3), ball(p3, 0, 1, Rat(-1))));
  CHECK(leq(BerkovichPoint::gauss(p3), BerkovichPoint::infinity(p3)));
}

TEST_CASE("join") {
  auto p3 = FieldDescriptor::padic(3);
  auto one = BerkovichPoint::rigid(FieldElement::from_int(p3, 1));
  auto four = BerkovichPoint::rigid(FieldElement::from_int(p3, 4));
  CHECK(equal_points(join(one, four), ball(p3, 1, 1, Rat(-1))));

  auto g = BerkovichPoint::gauss(p3);
  CHECK(equal_points(join(g, g), g));

  // p=2: join(B(0,-2), B(1,-3)) is the Gauss point; cross-checked by sampling
  // rigid points of both balls and verifying the join contains them all.
  auto p2 = FieldDescriptor::padic(2);
  auto a = ball(p2, 0, 1, Rat(-2));
  auto b = ball(p2, 1, 1, Rat(-3));
  auto j = join(a, b);
  CHECK(equal_points(j, BerkovichPoint::gauss(p2)));
  SplitMix rng(2);
  for (int i = 0; i < 50; ++i) {
    auto za = BerkovichPoint::rigid(FieldElement::from_int(p2, 4 * rng.range(-20, 20)));
    auto zb = BerkovichPoint::rigid(FieldElement::from_int(p2, 1 + 8 * rng.range(-20, 20)));
    CHECK(leq(za, j));
    CHECK(leq(zb, j));
  }
  // minimality: no ball strictly below the join contains both
  auto smaller = ball(p2, 0, 1, Rat(-1));
  CHECK(!(leq(a, smaller) && leq(b, smaller)));
}

TEST_CASE("hyperbolic distance") {
  auto p2 = FieldDescriptor::padic(2);
  CHECK(hyperbolic_distance(BerkovichPoint::gauss(p2), ball(p2, 0, 1, Rat(-1))) == LogValue(1));
  auto x = ball(p2, 7, 1, Rat(1, 2));
  CHECK(hyperbolic_distance(x, x) == LogValue(0));

  // p=3: d(B(1,-2), B(4,-2)) = 2, join at tau = -1
  auto p3 = FieldDescriptor::padic(3);
  auto u = ball(p3, 1, 1, Rat(-2));
  auto v = ball(p3, 4, 1, Rat(-2));
  CHECK(join(u, v).tau() == LogValue(-1));
  CHECK(hyperbolic_distance(u, v) == LogValue(2));

  CHECK_THROWS_AS(hyperbolic_distance(BerkovichPoint::rigid(FieldElement::from_int(p3, 1)),
                                      BerkovichPoint::gauss(p3)),
                  precondition_error);
}

TEST_CASE("directions at type II points") {
  auto p5 = FieldDescriptor::padic(5);
  auto g = BerkovichPoint::gauss(p5);
  CHECK(direction_at(g, BerkovichPoint::rigid(FieldElement::from_int(p5, 2))) ==
        Direction::of_class(Rat(2)));
  CHECK(direction_at(g, BerkovichPoint::infinity(p5)) == Direction::infinity());
  CHECK(direction_at(g, BerkovichPoint::rigid(FieldElement::from_rational(p5, Rat(1, 5)))) ==
        Direction::infinity());
  CHECK_THROWS_AS(direction_at(g, g), precondition_error);

  // offset 12 in the ball B(0, tau=-2) over p=2: 12 * 2^(-2) = 3, class 1 mod 2
  auto p2 = FieldDescriptor::padic(2);
  auto x = ball(p2, 0, 1, Rat(-2));
  CHECK(direction_at(x, BerkovichPoint::rigid(FieldElement::from_int(p2, 12))) ==
        Direction::of_class(Rat(1)));
}

TEST_CASE("order/join coherence on random triples") {
  SplitMix rng(20240812);
  for (const auto& d : testutil::all_backends()) {
    for (int i = 0; i < 300; ++i) {
      auto x = random_ball(rng, d);
      auto y = random_ball(rng, d);
      auto j = join(x, y);
      CHECK(leq(x, j));
      CHECK(leq(y, j));
      // least upper bound: any z above both dominates the join
      auto z = random_ball(rng, d);
      if (leq(x, z) && leq(y, z)) CHECK(leq(j, z));
      CHECK(equal_points(j, join(y, x)));
      CHECK(equal_points(join(x, join(y, z)), join(join(x, y), z)));
    }
  }
}

TEST_CASE("hyperbolic additivity along comparable chains") {
  SplitMix rng(77);
  auto d = FieldDescriptor::padic(3);
  for (int i = 0; i < 200; ++i) {
    auto c = testutil::random_element(rng, d);
    Rat t0(rng.range(-8, 0), rng.range(1, 2));
    Rat t1 = t0 + Rat(rng.range(0, 6), rng.range(1, 2));
    Rat t2 = t1 + Rat(rng.range(0, 6), rng.range(1, 2));
    auto x = BerkovichPoint::make(c, LogValue(t0));
    auto y = BerkovichPoint::make(c, LogValue(t1));
    auto z = BerkovichPoint::make(c, LogValue(t2));
    CHECK(hyperbolic_distance(x, z) == hyperbolic_distance(x, y) + hyperbolic_distance(y, z));
  }
}

TEST_CASE("canonicalization soundness on random pairs") {
  SplitMix rng(31);
  for (const auto& d : testutil::all_backends()) {
    for (int i = 0; i < 1000; ++i) {
      auto a = testutil::random_element(rng, d);
      auto b = testutil::random_element(rng, d);
      Rat tau(rng.range(-4, 4));
      auto x = BerkovichPoint::make(a, LogValue(tau));
      auto y = BerkovichPoint::make(b, LogValue(tau));
      bool same = !(LogValue(tau) < -(a - b).valuation());
      CHECK(equal_points(x, y) == same);
    }
  }
}

TEST_CASE("directions partition rigid points") {
  SplitMix rng(13);
  auto d = FieldDescriptor::padic(5);
  auto g = BerkovichPoint::gauss(d);
  for (int i = 0; i < 300; ++i) {
    auto y = BerkovichPoint::rigid(testutil::random_element(rng, d));
    auto dir = direction_at(g, y);
    if (!dir.towards_infinity) {
      CHECK(leq(y, g));
      CHECK(y.center().residue() == dir.residue_class);
    } else {
      CHECK(!leq(y, g));
    }
  }
}

TEST_CASE("segment sampling stays on the tree path") {
  auto p2 = FieldDescriptor::padic(2);
  auto x = ball(p2, 0, 1, Rat(-2));
  auto y = ball(p2, 1, 1, Rat(-3));
  for (const auto& pt : segment_sample(x, y, 4)) CHECK(leq(pt, join(x, y)));
}
