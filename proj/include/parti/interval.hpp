#pragma once

// Exact rationals and outward-rounded rational intervals, with the few
// transcendental enclosures the certificates need (π, √, exp).

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "parti/errors.hpp"
#include "parti/sequences.hpp"

namespace parti {

// Canonical rational: gcd(num, den) = 1, den > 0 (GMP keeps mpq_class in
// this form after every arithmetic operation).
using Rat = mpq_class;

inline Rat make_rat(const BigInt& num, const BigInt& den) {
  if (den == 0) throw DomainError("rational with zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

inline Rat parse_rat(std::string_view s) {
  Rat r;
  if (r.set_str(std::string(s), 10) != 0) throw UsageError("not a rational number: '" + std::string(s) + "'");
  if (r.get_den() == 0) throw UsageError("rational with zero denominator: '" + std::string(s) + "'");
  r.canonicalize();
  return r;
}

inline std::string rat_str(const Rat& r) {
  return r.get_den() == 1 ? r.get_num().get_str() : r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline BigInt floor_rat(const Rat& r) {
  BigInt q;
  mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

inline BigInt ceil_rat(const Rat& r) {
  BigInt q;
  mpz_cdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

inline Rat pow2(long e) {
  BigInt p;
  mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(std::labs(e)));
  return e >= 0 ? Rat(p) : Rat(BigInt(1), p);
}

// Closed interval [lo, hi] of rationals. The arithmetic operators are exact;
// rounded() widens outward onto the grid 2^-bits to keep sizes bounded.
class RatInterval {
public:
  RatInterval() = default;
  RatInterval(const Rat& x) : lo_(x), hi_(x) {}  // NOLINT: implicit point interval
  RatInterval(Rat lo, Rat hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_ > hi_) throw DomainError("interval with lo > hi");
  }

  const Rat& lo() const { return lo_; }
  const Rat& hi() const { return hi_; }
  Rat width() const { return hi_ - lo_; }
  Rat mid() const { return (lo_ + hi_) / 2; }
  bool contains(const Rat& x) const { return lo_ <= x && x <= hi_; }
  bool contains(const RatInterval& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }
  bool positive() const { return lo_ > 0; }
  bool negative() const { return hi_ < 0; }
  double approx() const { return mid().get_d(); }

  RatInterval rounded(unsigned bits) const {
    Rat scale = pow2(bits);
    return {Rat(floor_rat(lo_ * scale)) / scale, Rat(ceil_rat(hi_ * scale)) / scale};
  }

  friend RatInterval operator+(const RatInterval& a, const RatInterval& b) { return {a.lo_ + b.lo_, a.hi_ + b.hi_}; }
  friend RatInterval operator-(const RatInterval& a, const RatInterval& b) { return {a.lo_ - b.hi_, a.hi_ - b.lo_}; }
  friend RatInterval operator-(const RatInterval& a) { return {-a.hi_, -a.lo_}; }
  friend RatInterval operator*(const RatInterval& a, const RatInterval& b) {
    if (a.lo_ >= 0 && b.lo_ >= 0) return {a.lo_ * b.lo_, a.hi_ * b.hi_};
    Rat p[4] = {a.lo_ * b.lo_, a.lo_ * b.hi_, a.hi_ * b.lo_, a.hi_ * b.hi_};
    return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
  }
  friend RatInterval operator/(const RatInterval& a, const RatInterval& b) {
    if (b.lo_ <= 0 && b.hi_ >= 0) throw DomainError("interval division by an interval containing 0");
    return a * RatInterval(1 / b.hi_, 1 / b.lo_);
  }
  RatInterval& operator+=(const RatInterval& o) { return *this = *this + o; }
  RatInterval& operator-=(const RatInterval& o) { return *this = *this - o; }
  RatInterval& operator*=(const RatInterval& o) { return *this = *this * o; }

  friend bool operator==(const RatInterval&, const RatInterval&) = default;

private:
  Rat lo_ = 0;
  Rat hi_ = 0;
};

inline RatInterval abs(const RatInterval& x) {
  if (x.lo() >= 0) return x;
  if (x.hi() <= 0) return -x;
  Rat neg = -x.lo();
  return {Rat(0), std::max(neg, x.hi())};
}

inline RatInterval pow(const RatInterval& x, unsigned e, unsigned bits) {
  RatInterval base = x, acc(Rat(1));
  if (e % 2 == 0 && x.lo() < 0) base = abs(x);
  while (e) {
    if (e & 1u) acc = (acc * base).rounded(bits);
    e >>= 1u;
    if (e) base = (base * base).rounded(bits);
  }
  return acc;
}

// Integer power of a positive rational interval, negative exponents allowed.
inline RatInterval ipow(const RatInterval& x, int e, unsigned bits) {
  if (e >= 0) return pow(x, static_cast<unsigned>(e), bits);
  if (!x.positive()) throw DomainError("negative power of a non-positive interval");
  RatInterval p = pow(x, static_cast<unsigned>(-e), bits);
  return (RatInterval(Rat(1)) / p).rounded(bits);
}

// Enclosure of √x for rational x ≥ 0, width ≤ 2^-bits.
inline RatInterval sqrt_interval(const Rat& x, unsigned bits) {
  if (x < 0) throw DomainError("square root of a negative number");
  Rat scaled = x * pow2(2L * bits);
  BigInt f = floor_rat(scaled), s;
  mpz_sqrt(s.get_mpz_t(), f.get_mpz_t());
  Rat unit = pow2(-static_cast<long>(bits));
  return {Rat(s) * unit, Rat(s + 1) * unit};
}

inline RatInterval sqrt_interval(const RatInterval& x, unsigned bits) {
  return {sqrt_interval(x.lo(), bits).lo(), sqrt_interval(x.hi(), bits).hi()};
}

// Enclosure of e^x for rational x: halve until |x| ≤ 1/2, sum the Taylor
// series with a rigorous remainder, then square back.
inline RatInterval exp_interval(const Rat& x, unsigned bits) {
  unsigned r = 0;
  Rat y = x;
  while (abs(y) > Rat(1, 2)) {
    y /= 2;
    ++r;
  }
  const unsigned wbits = bits + 2 * r + 16;
  RatInterval sum(Rat(1)), term(Rat(1));
  Rat ay = abs(y);
  Rat tail_bound = 1;  // |y|^k / k!
  for (unsigned k = 1;; ++k) {
    term = (term * RatInterval(y / k)).rounded(wbits);
    sum += term;
    tail_bound *= ay / k;
    // Remainder after degree k is at most 2 |y|^{k+1}/(k+1)! for |y| ≤ 1/2.
    Rat rem = 2 * tail_bound * ay / (k + 1);
    if (rem < pow2(-static_cast<long>(wbits))) {
      sum = RatInterval(sum.lo() - rem, sum.hi() + rem);
      break;
    }
  }
  for (unsigned i = 0; i < r; ++i) sum = (sum * sum).rounded(wbits);
  return sum.rounded(bits);
}

inline RatInterval exp_interval(const RatInterval& x, unsigned bits) {
  return {exp_interval(x.lo(), bits).lo(), exp_interval(x.hi(), bits).hi()};
}

// π to 300 decimals.
struct PiConstant {
  static constexpr std::string_view digits =
      "31415926535897932384626433832795028841971693993751058209749445923078164062862089986280348253421170679821"
      "48086513282306647093844609550582231725359408128481117450284102701938521105559644622948954930381964428810"
      "97566593344612847564823378678316527120190914564856692346034861045432664821339360726024914127372";
  static constexpr int max_digits = 256;

  // Interval from the first `sig` significant digits: [t, t + 10^(1-sig)].
  static RatInterval interval(int sig) {
    if (sig < 1 || sig > max_digits)
      throw UsageError("pi precision must lie in 1.." + std::to_string(max_digits) + " digits");
    BigInt t(std::string(digits.substr(0, static_cast<std::size_t>(sig))), 10);
    BigInt scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(sig - 1));
    return {make_rat(t, scale), make_rat(t + 1, scale)};
  }
};

inline RatInterval pi_interval(int precision_digits) { return PiConstant::interval(precision_digits); }

// Binary working precision matching a decimal digit count.
inline unsigned bits_for_digits(int digits) { return static_cast<unsigned>(std::ceil(digits * 3.3219280948873623)) + 32; }

// μ(n) = π√(24n-1)/6 for p, μ̄(n) = π√n for pbar.
inline RatInterval mu_interval(BaseSequence base, long n, int digits) {
  const unsigned bits = bits_for_digits(digits);
  RatInterval pi = pi_interval(digits);
  if (base == BaseSequence::Partition) {
    if (n < 1) throw DomainError("mu(n) for p needs n >= 1");
    return (pi * sqrt_interval(Rat(24 * n - 1), bits) * RatInterval(Rat(1, 6))).rounded(bits);
  }
  if (n < 0) throw DomainError("mu(n) for pbar needs n >= 0");
  return (pi * sqrt_interval(Rat(n), bits)).rounded(bits);
}

} // namespace parti
