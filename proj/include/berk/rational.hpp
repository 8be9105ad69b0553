#pragma once

#include <berk/errors.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <string>

namespace berk {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int rat_num(const Rat& q) { return boost::multiprecision::numerator(q); }
inline Int rat_den(const Rat& q) { return boost::multiprecision::denominator(q); }

inline std::string rat_str(const Rat& q) {
  if (rat_den(q) == 1) return rat_num(q).str();
  return rat_num(q).str() + "/" + rat_den(q).str();
}

inline Rat rat_parse(const std::string& s) {
  try {
    if (s.empty()) throw std::runtime_error("empty");
    return Rat(s);
  } catch (const std::exception&) {
    throw precondition_error("not a rational: '" + s + "'");
  }
}

inline bool rat_is_integer(const Rat& q) { return rat_den(q) == 1; }

// Exact extended value line: Q together with +inf and -inf.  Valuations live
// here (v(0) = +inf) and so do log-radii of balls (a rigid point has
// log-radius -inf).  Addition absorbs into infinities; +inf + -inf is
// rejected as a logic error.
class LogValue {
public:
  enum class Kind { NegInf, Finite, PosInf };

  LogValue() : kind_(Kind::Finite), q_(0) {}
  LogValue(const Rat& q) : kind_(Kind::Finite), q_(q) {}
  LogValue(long n) : kind_(Kind::Finite), q_(n) {}

  static LogValue pos_inf() { return LogValue(Kind::PosInf); }
  static LogValue neg_inf() { return LogValue(Kind::NegInf); }

  bool is_finite() const { return kind_ == Kind::Finite; }
  bool is_pos_inf() const { return kind_ == Kind::PosInf; }
  bool is_neg_inf() const { return kind_ == Kind::NegInf; }

  const Rat& finite() const {
    ensure(is_finite(), "LogValue: expected a finite value");
    return q_;
  }

  LogValue operator-() const {
    switch (kind_) {
      case Kind::PosInf: return neg_inf();
      case Kind::NegInf: return pos_inf();
      default: return LogValue(Rat(-q_));
    }
  }

  friend LogValue operator+(const LogValue& a, const LogValue& b) {
    if (a.is_finite() && b.is_finite()) return LogValue(Rat(a.q_ + b.q_));
    if (a.is_pos_inf() || b.is_pos_inf()) {
      ensure(!a.is_neg_inf() && !b.is_neg_inf(), "LogValue: +inf + -inf");
      return pos_inf();
    }
    return neg_inf();
  }

  friend LogValue operator-(const LogValue& a, const LogValue& b) { return a + (-b); }

  // Scalar multiple; k == 0 is rejected for infinite values.
  friend LogValue operator*(const Int& k, const LogValue& a) {
    if (a.is_finite()) return LogValue(Rat(Rat(k) * a.q_));
    ensure(k != 0, "LogValue: 0 * inf");
    return (k > 0) == a.is_pos_inf() ? pos_inf() : neg_inf();
  }
  friend LogValue operator*(long k, const LogValue& a) { return Int(k) * a; }

  friend bool operator==(const LogValue& a, const LogValue& b) {
    return a.kind_ == b.kind_ && (a.kind_ != Kind::Finite || a.q_ == b.q_);
  }
  friend std::strong_ordering operator<=>(const LogValue& a, const LogValue& b) {
    auto rank = [](Kind k) { return k == Kind::NegInf ? 0 : k == Kind::Finite ? 1 : 2; };
    if (rank(a.kind_) != rank(b.kind_)) return rank(a.kind_) <=> rank(b.kind_);
    if (a.kind_ != Kind::Finite) return std::strong_ordering::equal;
    return a.q_ < b.q_   ? std::strong_ordering::less
           : a.q_ > b.q_ ? std::strong_ordering::greater
                         : std::strong_ordering::equal;
  }

  std::string str() const {
    switch (kind_) {
      case Kind::PosInf: return "+inf";
      case Kind::NegInf: return "-inf";
      default: return rat_str(q_);
    }
  }

  static LogValue parse(const std::string& s) {
    if (s == "+inf" || s == "inf") return pos_inf();
    if (s == "-inf") return neg_inf();
    return LogValue(rat_parse(s));
  }

private:
  explicit LogValue(Kind k) : kind_(k), q_(0) {}
  Kind kind_;
  Rat q_;
};

inline LogValue log_min(const LogValue& a, const LogValue& b) { return a < b ? a : b; }
inline LogValue log_max(const LogValue& a, const LogValue& b) { return a < b ? b : a; }

}  // namespace berk
