#pragma once

// Small finite fields F_q for prime powers q <= 9, with table arithmetic.
// An element index encodes the digits of a polynomial over F_p in base p,
// so the prime subfield occupies indices 0..p-1.

#include <berk/errors.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace berk {

class GFOps {
public:
  using Elem = std::uint8_t;

  explicit GFOps(unsigned q) : q_(q) {
    unsigned p = 0, k = 0;
    std::vector<unsigned> irred;  // ascending coefficients over F_p
    switch (q) {
      case 2: case 3: case 5: case 7: p = q; k = 1; break;
      case 4: p = 2; k = 2; irred = {1, 1, 1}; break;        // x^2 + x + 1
      case 8: p = 2; k = 3; irred = {1, 1, 0, 1}; break;     // x^3 + x + 1
      case 9: p = 3; k = 2; irred = {1, 0, 1}; break;        // x^2 + 1
      default: throw precondition_error("GF(q): q must be a prime power <= 9");
    }
    p_ = p;
    k_ = k;

    auto digits = [&](unsigned e) {
      std::vector<unsigned> d(k_);
      for (unsigned i = 0; i < k_; ++i) {
        d[i] = e % p_;
        e /= p_;
      }
      return d;
    };
    auto encode = [&](const std::vector<unsigned>& d) {
      unsigned e = 0;
      for (unsigned i = k_; i-- > 0;) e = e * p_ + d[i];
      return static_cast<Elem>(e);
    };

    add_.assign(q_ * q_, 0);
    mul_.assign(q_ * q_, 0);
    neg_.assign(q_, 0);
    for (unsigned a = 0; a < q_; ++a) {
      auto da = digits(a);
      std::vector<unsigned> dn(k_);
      for (unsigned i = 0; i < k_; ++i) dn[i] = (p_ - da[i]) % p_;
      neg_[a] = encode(dn);
      for (unsigned b = 0; b < q_; ++b) {
        auto db = digits(b);
        std::vector<unsigned> ds(k_);
        for (unsigned i = 0; i < k_; ++i) ds[i] = (da[i] + db[i]) % p_;
        add_[a * q_ + b] = encode(ds);
        // polynomial product reduced mod the irreducible
        std::vector<unsigned> prod(2 * k_ - 1, 0);
        for (unsigned i = 0; i < k_; ++i)
          for (unsigned j = 0; j < k_; ++j) prod[i + j] = (prod[i + j] + da[i] * db[j]) % p_;
        for (unsigned deg = 2 * k_ - 2; deg >= k_ && deg < prod.size(); --deg) {
          unsigned c = prod[deg];
          if (c == 0) continue;
          prod[deg] = 0;
          for (unsigned i = 0; i < k_; ++i)
            prod[deg - k_ + i] = (prod[deg - k_ + i] + c * (p_ - irred[i])) % p_;
        }
        std::vector<unsigned> dm(prod.begin(), prod.begin() + k_);
        mul_[a * q_ + b] = encode(dm);
      }
    }
    inv_.assign(q_, 0);
    for (unsigned a = 1; a < q_; ++a)
      for (unsigned b = 1; b < q_; ++b)
        if (mul_[a * q_ + b] == 1) inv_[a] = static_cast<Elem>(b);
  }

  unsigned order() const { return q_; }
  unsigned characteristic() const { return p_; }

  Elem zero() const { return 0; }
  Elem one() const { return 1; }
  Elem add(Elem a, Elem b) const { return add_[a * q_ + b]; }
  Elem sub(Elem a, Elem b) const { return add_[a * q_ + neg_[b]]; }
  Elem mul(Elem a, Elem b) const { return mul_[a * q_ + b]; }
  Elem div(Elem a, Elem b) const {
    require(b != 0, "GF(q): division by zero");
    return mul_[a * q_ + inv_[b]];
  }
  Elem neg(Elem a) const { return neg_[a]; }
  Elem from_int(long n) const {
    long r = n % static_cast<long>(p_);
    if (r < 0) r += p_;
    return static_cast<Elem>(r);
  }
  bool is_zero(Elem a) const { return a == 0; }
  bool eq(Elem a, Elem b) const { return a == b; }

private:
  unsigned q_, p_ = 0, k_ = 0;
  std::vector<Elem> add_, mul_, neg_, inv_;
};

}  // namespace berk
