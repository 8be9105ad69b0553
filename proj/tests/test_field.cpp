#include <berk/field.hpp>

#include <catch_amalgamated.hpp>

#include "test_util.hpp"

using namespace berk;
using testutil::SplitMix;

namespace {

FieldElement Q(const FieldDescriptor& d, long num, long den = 1) {
  return FieldElement::from_rational(d, Rat(num, den));
}

}  // namespace

TEST_CASE("valuation on all backends") {
  auto p3 = FieldDescriptor::padic(3);
  CHECK(Q(p3, 9, 2).valuation() == LogValue(2));

  auto lq = FieldDescriptor::laurent_q();
  auto x = FieldElement::laurent(lq, {{-2, Rat(1)}, {0, Rat(5)}});
  CHECK(x.valuation() == LogValue(-2));

  auto p2 = FieldDescriptor::padic(2);
  CHECK(Q(p2, 0).valuation().is_pos_inf());
  CHECK(FieldElement::uniformizer_pow(p2, 1).valuation() == LogValue(1));
  CHECK(FieldElement::uniformizer_pow(lq, 1).valuation() == LogValue(1));
}

TEST_CASE("field arithmetic") {
  auto p2 = FieldDescriptor::padic(2);
  auto half = Q(p2, 1, 2);
  CHECK(half.valuation() == LogValue(-1));
  CHECK((half + half) == Q(p2, 1));
  CHECK((half + half).valuation() == LogValue(0));

  auto lq = FieldDescriptor::laurent_q();
  auto t = FieldElement::uniformizer_pow(lq, 1);
  auto tinv = FieldElement::uniformizer_pow(lq, -1);
  CHECK(t * tinv == FieldElement::one(lq));

  auto p3 = FieldDescriptor::padic(3);
  auto diff = Q(p3, 4) - Q(p3, 1);
  CHECK(diff == Q(p3, 3));
  CHECK(diff.valuation() == LogValue(1));

  CHECK_THROWS_AS(Q(p3, 1) / Q(p3, 0), precondition_error);
  CHECK_THROWS_AS(Q(p3, 1) + Q(p2, 1), precondition_error);
}

TEST_CASE("laurent exact division") {
  auto lq = FieldDescriptor::laurent_q();
  auto t = FieldElement::uniformizer_pow(lq, 1);
  auto one = FieldElement::one(lq);
  // (t^2 - 1) / (t - 1) = t + 1
  auto num = t * t - one;
  auto den = t - one;
  CHECK(num / den == t + one);
  // 1 / (1 + t) has no finite Laurent expansion
  CHECK_THROWS_AS(one / (one + t), precondition_error);

  auto f2 = FieldDescriptor::laurent_fp(2);
  auto s = FieldElement::uniformizer_pow(f2, 1);
  CHECK((s * s + FieldElement::one(f2)) / (s + FieldElement::one(f2)) ==
        s + FieldElement::one(f2));  // t^2+1 = (t+1)^2 over F_2
}

TEST_CASE("residue map") {
  auto p5 = FieldDescriptor::padic(5);
  CHECK(Q(p5, 7).residue() == 2);

  auto lq = FieldDescriptor::laurent_q();
  auto x = FieldElement::laurent(lq, {{0, Rat(3, 4)}, {1, Rat(2)}});
  CHECK(x.residue() == Rat(3, 4));

  auto p2 = FieldDescriptor::padic(2);
  CHECK(Q(p2, 6).residue() == 0);
  CHECK_THROWS_AS(Q(p2, 1, 2).residue(), precondition_error);
}

TEST_CASE("distinct residue sequences") {
  auto lq = FieldDescriptor::laurent_q();
  auto seq = distinct_residue_sequence(lq, 3);
  REQUIRE(seq.size() == 3);
  CHECK(seq[0] == Q(lq, 1));
  CHECK(seq[2] == Q(lq, 3));

  auto p5 = FieldDescriptor::padic(5);
  auto s5 = distinct_residue_sequence(p5, 4);
  REQUIRE(s5.size() == 4);
  for (std::size_t i = 0; i < s5.size(); ++i)
    for (std::size_t j = i + 1; j < s5.size(); ++j)
      CHECK((s5[i] - s5[j]).valuation() == LogValue(0));

  CHECK_THROWS_AS(distinct_residue_sequence(FieldDescriptor::padic(2), 3), precondition_error);
}

TEST_CASE("hensel square roots") {
  auto p2 = FieldDescriptor::padic(2);

  SECTION("2-adic root of 17, checked against brute force mod 2^6") {
    // Oracle: smallest c in [0, 64) with c^2 = 17 mod 64.
    long expected = -1;
    for (long c = 0; c < 64; ++c)
      if (c * c % 64 == 17) {
        expected = c;
        break;
      }
    REQUIRE(expected == 9);
    auto a = hensel_sqrt(Q(p2, 17), LogValue(6));
    CHECK(a == Q(p2, expected));
    CHECK(!((a * a - Q(p2, 17)).valuation() < LogValue(6)));
  }

  SECTION("rational square stays exact") {
    auto p3 = FieldDescriptor::padic(3);
    CHECK(hensel_sqrt(Q(p3, 4), LogValue(10)) == Q(p3, 2));
  }

  SECTION("non-squares are rejected") {
    // Oracle: odd squares are 1 mod 8, by exhaustion.
    for (long c = 1; c < 8; c += 2) REQUIRE(c * c % 8 == 1);
    CHECK_THROWS_AS(hensel_sqrt(Q(p2, 3), LogValue(4)), precondition_error);
    auto p5 = FieldDescriptor::padic(5);
    CHECK_THROWS_AS(hensel_sqrt(Q(p5, 2), LogValue(4)), precondition_error);  // 2 is not a QR mod 5
    CHECK_THROWS_AS(hensel_sqrt(Q(p5, 5), LogValue(4)), precondition_error);  // odd valuation
  }

  SECTION("laurent square roots") {
    auto lq = FieldDescriptor::laurent_q();
    auto t = FieldElement::uniformizer_pow(lq, 1);
    auto one = FieldElement::one(lq);
    auto sq = (one + t) * (one + t);
    CHECK(hensel_sqrt(sq, LogValue(0)) == one + t);
    CHECK_THROWS_AS(hensel_sqrt(one + t, LogValue(0)), precondition_error);
  }
}

TEST_CASE("valuation properties over random pairs") {
  SplitMix rng(20240811);
  for (const auto& d : testutil::all_backends()) {
    for (int i = 0; i < 1000; ++i) {
      auto x = testutil::random_element(rng, d);
      auto y = testutil::random_element(rng, d);
      // multiplicativity
      CHECK((x * y).valuation() == x.valuation() + y.valuation());
      // ultrametric with equality off the diagonal
      auto vs = (x + y).valuation();
      auto lo = log_min(x.valuation(), y.valuation());
      CHECK(!(vs < lo));
      if (!(x.valuation() == y.valuation())) CHECK(vs == lo);
    }
  }
}

TEST_CASE("residue is a ring homomorphism on the valuation ring") {
  SplitMix rng(7);
  for (const auto& d : testutil::all_backends()) {
    unsigned p = d.residue_char();
    auto canon = [&](const Rat& q) { return p ? Rat(detail::mod_p(q, p)) : q; };
    int done = 0;
    while (done < 200) {
      auto x = testutil::random_element(rng, d);
      auto y = testutil::random_element(rng, d);
      if (x.valuation() < LogValue(0) || y.valuation() < LogValue(0)) continue;
      ++done;
      CHECK((x + y).residue() == canon(x.residue() + y.residue()));
      CHECK((x * y).residue() == canon(x.residue() * y.residue()));
      // residue(x) = 0 iff v(x) > 0
      CHECK((x.residue() == 0) == (LogValue(0) < x.valuation()));
    }
  }
}

TEST_CASE("hensel postcondition on random 2-adic squares") {
  SplitMix rng(99);
  auto p2 = FieldDescriptor::padic(2);
  int done = 0;
  while (done < 100) {
    Rat q = testutil::random_rational(rng);
    if (q == 0) continue;
    auto x = Q(p2, 1) * FieldElement::from_rational(p2, q * q);
    ++done;
    auto a = hensel_sqrt(x, LogValue(24));
    CHECK(!((a * a - x).valuation() < LogValue(24)));
    CHECK(2 * a.valuation() == x.valuation());
  }
}
