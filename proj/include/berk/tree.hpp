#pragma once

// Points of the Berkovich line of types I-III in ball form (center, tau)
// where tau = log of the diameter in the value-group scale: the Gauss point
// has tau = 0, the uniformizer ball tau = -1, rigid points tau = -inf.  The
// point at infinity is a distinguished atom acting as the global maximum of
// the containment order.

#include <berk/errors.hpp>
#include <berk/field.hpp>
#include <berk/rational.hpp>

#include <optional>
#include <string>
#include <vector>

namespace berk {

enum class PointType { TypeI, TypeII, TypeIII, Infinity };

class BerkovichPoint {
public:
  static BerkovichPoint make(FieldElement center, LogValue tau) {
    require(!tau.is_pos_inf(), "make_point: tau = +inf is not a ball");
    return BerkovichPoint(std::move(center), std::move(tau), false);
  }
  static BerkovichPoint rigid(FieldElement center) {
    return make(std::move(center), LogValue::neg_inf());
  }
  static BerkovichPoint gauss(const FieldDescriptor& d) {
    return make(FieldElement::zero(d), LogValue(0));
  }
  static BerkovichPoint infinity(const FieldDescriptor& d) {
    return BerkovichPoint(FieldElement::zero(d), LogValue::pos_inf(), true);
  }

  bool is_infinity() const { return inf_; }
  PointType type() const {
    if (inf_) return PointType::Infinity;
    if (tau_.is_neg_inf()) return PointType::TypeI;
    return rat_is_integer(tau_.finite()) ? PointType::TypeII : PointType::TypeIII;
  }
  bool in_hyperbolic_space() const {
    return type() == PointType::TypeII || type() == PointType::TypeIII;
  }

  const FieldElement& center() const {
    ensure(!inf_, "center of the point at infinity");
    return c_;
  }
  const LogValue& tau() const {
    ensure(!inf_, "tau of the point at infinity");
    return tau_;
  }
  const FieldDescriptor& field() const { return c_.field(); }

  std::string str() const {
    if (inf_) return "inf";
    return "B(" + c_.str() + ", tau=" + tau_.str() + ")";
  }

private:
  BerkovichPoint(FieldElement c, LogValue tau, bool inf)
      : c_(std::move(c)), tau_(std::move(tau)), inf_(inf) {}
  FieldElement c_;
  LogValue tau_;
  bool inf_;
};

// Ball containment: x <= y iff ball(x) is contained in ball(y).  Infinity is
// the maximum of the order.
inline bool leq(const BerkovichPoint& x, const BerkovichPoint& y) {
  if (y.is_infinity()) return true;
  if (x.is_infinity()) return false;
  if (y.tau() < x.tau()) return false;
  return !(y.tau() < -(x.center() - y.center()).valuation());
}

// Two ball points are equal iff each contains the other; concretely
// tau_x = tau_y and -v(a_x - a_y) <= tau_x.
inline bool equal_points(const BerkovichPoint& x, const BerkovichPoint& y) {
  if (x.is_infinity() || y.is_infinity()) return x.is_infinity() == y.is_infinity();
  return x.tau() == y.tau() && !(x.tau() < -(x.center() - y.center()).valuation());
}

// Smallest ball containing both: same center as x, log-radius
// max(tau_x, tau_y, -v(a_x - a_y)).
inline BerkovichPoint join(const BerkovichPoint& x, const BerkovichPoint& y) {
  require(!x.is_infinity() && !y.is_infinity(), "join: infinity input");
  LogValue tau = log_max(log_max(x.tau(), y.tau()), -(x.center() - y.center()).valuation());
  return BerkovichPoint::make(x.center(), tau);
}

// Path metric on H: d(x, y) = 2 tau_join - tau_x - tau_y.
inline LogValue hyperbolic_distance(const BerkovichPoint& x, const BerkovichPoint& y) {
  require(x.in_hyperbolic_space() && y.in_hyperbolic_space(),
          "hyperbolic_distance: points must be of type II or III");
  return 2 * join(x, y).tau() - x.tau() - y.tau();
}

// A direction at a type II point: either the residue class of a sub-ball or
// the direction containing infinity.
struct Direction {
  bool towards_infinity = false;
  Rat residue_class;  // canonical representative when finite

  static Direction infinity() { return {true, Rat(0)}; }
  static Direction of_class(Rat r) { return {false, std::move(r)}; }

  friend bool operator==(const Direction&, const Direction&) = default;
  std::string str() const { return towards_infinity ? "inf" : rat_str(residue_class); }
};

// The direction at x (type II) determined by y != x: the class of the
// normalized offset (a_y - a_x) pi^{tau_x} when y sits inside ball(x), and
// the infinity direction otherwise.
inline Direction direction_at(const BerkovichPoint& x, const BerkovichPoint& y) {
  require(x.type() == PointType::TypeII, "direction_at: base must be type II");
  require(!equal_points(x, y), "direction_at: y equals the base point");
  if (y.is_infinity() || !leq(y, x)) return Direction::infinity();
  const long tau = static_cast<long>(rat_num(x.tau().finite()));
  FieldElement u = (y.center() - x.center()) * FieldElement::uniformizer_pow(x.field(), tau);
  return Direction::of_class(u.residue());
}

// Evenly spread sample of the segment [x, y] through the join (hyperbolic
// parametrization on each leg); used by tests and the sampling oracles.
inline std::vector<BerkovichPoint> segment_sample(const BerkovichPoint& x,
                                                  const BerkovichPoint& y,
                                                  int per_leg) {
  require(x.in_hyperbolic_space() && y.in_hyperbolic_space(), "segment_sample: points must be in H");
  BerkovichPoint top = join(x, y);
  std::vector<BerkovichPoint> out;
  auto leg = [&](const BerkovichPoint& base) {
    const Rat lo = base.tau().finite(), hi = top.tau().finite();
    for (int i = 0; i <= per_leg; ++i) {
      Rat t = lo + (hi - lo) * Rat(i, per_leg == 0 ? 1 : per_leg);
      out.push_back(BerkovichPoint::make(base.center(), LogValue(t)));
    }
  };
  leg(x);
  leg(y);
  return out;
}

}  // namespace berk
