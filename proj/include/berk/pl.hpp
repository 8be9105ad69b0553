#pragma once

// Exact convex piecewise-linear functions on a rational interval, stored as
// breakpoints (including the domain endpoints), values there, and one
// integer slope per piece.  Instances arise as upper envelopes of the lines
// tau -> n*tau - v_n read off valuations, so the slopes are the attaining
// indices.

#include <berk/errors.hpp>
#include <berk/rational.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

namespace berk {

class PiecewiseAffineMap {
public:
  PiecewiseAffineMap(std::vector<Rat> breakpoints, std::vector<Rat> values,
                     std::vector<Int> slopes)
      : bp_(std::move(breakpoints)), val_(std::move(values)), slope_(std::move(slopes)) {
    require(bp_.size() >= 2 && val_.size() == bp_.size() && slope_.size() + 1 == bp_.size(),
            "piecewise map: inconsistent sizes");
    for (std::size_t i = 0; i + 1 < bp_.size(); ++i) {
      require(bp_[i] < bp_[i + 1], "piecewise map: breakpoints not increasing");
      ensure(val_[i + 1] == val_[i] + Rat(slope_[i]) * (bp_[i + 1] - bp_[i]),
             "piecewise map: discontinuity at a breakpoint");
    }
    convex_ = true;
    for (std::size_t i = 0; i + 1 < slope_.size(); ++i)
      if (!(slope_[i] < slope_[i + 1])) convex_ = false;
  }

  const std::vector<Rat>& breakpoints() const { return bp_; }
  const std::vector<Rat>& values() const { return val_; }
  const std::vector<Int>& slopes() const { return slope_; }
  bool convex() const { return convex_; }
  const Rat& domain_lo() const { return bp_.front(); }
  const Rat& domain_hi() const { return bp_.back(); }

  bool contains(const Rat& tau) const { return !(tau < domain_lo()) && !(domain_hi() < tau); }

  Rat eval(const Rat& tau) const {
    require(contains(tau), "piecewise map: argument outside the domain");
    std::size_t i = piece_index(tau);
    return val_[i] + Rat(slope_[i]) * (tau - bp_[i]);
  }

  // Interior breakpoints where the slope actually changes.
  std::vector<Rat> vertices() const {
    std::vector<Rat> v;
    for (std::size_t i = 1; i + 1 < bp_.size(); ++i)
      if (slope_[i - 1] != slope_[i]) v.push_back(bp_[i]);
    return v;
  }

  // Slope of the piece immediately right/left of tau (clamped at the ends).
  Int slope_above(const Rat& tau) const {
    require(contains(tau), "slope_above: outside the domain");
    if (!(tau < domain_hi())) return slope_.back();
    return slope_[piece_index(tau)];
  }
  Int slope_below(const Rat& tau) const {
    require(contains(tau), "slope_below: outside the domain");
    if (!(domain_lo() < tau)) return slope_.front();
    std::size_t i = piece_index(tau);
    if (bp_[i] == tau && i > 0) return slope_[i - 1];
    return slope_[i];
  }

  // Unique tau with eval(tau) = y, for strictly increasing maps.
  std::optional<Rat> invert(const Rat& y) const {
    for (const Int& s : slope_) require(s > 0, "invert: map is not strictly increasing");
    if (y < val_.front() || val_.back() < y) return std::nullopt;
    for (std::size_t i = 0; i < slope_.size(); ++i)
      if (!(y < val_[i]) && !(val_[i + 1] < y))
        return bp_[i] + (y - val_[i]) / Rat(slope_[i]);
    return std::nullopt;
  }

private:
  std::size_t piece_index(const Rat& tau) const {
    std::size_t i = static_cast<std::size_t>(
        std::upper_bound(bp_.begin(), bp_.end(), tau) - bp_.begin());
    if (i > 0) --i;
    if (i + 1 >= bp_.size()) i = bp_.size() - 2;
    return i;
  }

  std::vector<Rat> bp_, val_;
  std::vector<Int> slope_;
  bool convex_;
};

// A line tau -> slope * tau - offset (the offset is a coefficient valuation).
struct EnvelopeLine {
  Int slope;
  Rat offset;
};

// Upper envelope of finitely many lines restricted to [lo, hi].  The result
// is convex with strictly increasing slopes.
inline PiecewiseAffineMap upper_envelope(std::vector<EnvelopeLine> lines, const Rat& lo,
                                         const Rat& hi) {
  require(!lines.empty(), "upper_envelope: no lines");
  require(lo < hi, "upper_envelope: empty window");
  // one line per slope: keep the highest (least offset)
  std::map<Int, Rat> best;
  for (const auto& l : lines) {
    auto it = best.find(l.slope);
    if (it == best.end() || l.offset < it->second) best[l.slope] = l.offset;
  }
  struct Piece {
    Int slope;
    Rat offset;
    std::optional<Rat> start;  // nullopt = -infinity
  };
  std::vector<Piece> hull;
  for (const auto& [m, c] : best) {
    Piece cur{m, c, std::nullopt};
    while (!hull.empty()) {
      const Piece& top = hull.back();
      // crossing point where cur overtakes top (cur has the larger slope)
      Rat x = (cur.offset - top.offset) / Rat(cur.slope - top.slope);
      if (!top.start.has_value() || *top.start < x) {
        cur.start = x;
        break;
      }
      hull.pop_back();
    }
    hull.push_back(cur);
  }

  auto line_val = [](const Piece& p, const Rat& tau) { return Rat(p.slope) * tau - p.offset; };
  std::vector<Rat> bp = {lo};
  std::vector<Int> slopes;
  std::size_t i = 0;
  while (i + 1 < hull.size() && !(lo < *hull[i + 1].start)) ++i;  // pieces spent before lo
  const std::size_t first = i;
  for (;;) {
    slopes.push_back(hull[i].slope);
    if (i + 1 < hull.size() && *hull[i + 1].start < hi) {
      bp.push_back(*hull[i + 1].start);
      ++i;
    } else {
      bp.push_back(hi);
      break;
    }
  }
  // values from the attaining lines directly, to stay exact
  std::vector<Rat> vals = {line_val(hull[first], bp[0])};
  for (std::size_t k = 0; k < slopes.size(); ++k) vals.push_back(line_val(hull[first + k], bp[k + 1]));
  return PiecewiseAffineMap(std::move(bp), std::move(vals), std::move(slopes));
}

}  // namespace berk
