#pragma once

// Polynomials in π with rational coefficients (PiPoly) and Laurent
// polynomials in y whose coefficients are PiPolys (PiLaurent). All algebra
// is exact; π is only ever replaced by an interval inside evaluate().

#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "parti/interval.hpp"

namespace parti {

// Interval powers of π at a fixed precision, extended on demand.
class PiPowers {
public:
  explicit PiPowers(int digits) : bits_(bits_for_digits(digits)), pows_{RatInterval(Rat(1)), pi_interval(digits)} {}

  unsigned bits() const { return bits_; }
  const RatInterval& operator[](int e) const {
    if (e < 0) throw DomainError("negative power of pi");
    while (static_cast<int>(pows_.size()) <= e) pows_.push_back((pows_.back() * pows_[1]).rounded(bits_));
    return pows_[static_cast<std::size_t>(e)];
  }

private:
  unsigned bits_;
  mutable std::vector<RatInterval> pows_;
};

class PiPoly {
public:
  using Map = std::map<int, Rat>;

  PiPoly() = default;
  PiPoly(const Rat& c) { add_term(0, c); }  // NOLINT: constants promote
  PiPoly(long c) : PiPoly(Rat(c)) {}        // NOLINT

  static PiPoly monomial(const Rat& c, int pi_exp) {
    PiPoly p;
    p.add_term(pi_exp, c);
    return p;
  }

  const Map& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  Rat coeff(int e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Rat(0) : it->second;
  }

  void add_term(int e, const Rat& c) {
    if (e < 0) throw DomainError("PiPoly exponents are nonnegative");
    if (c == 0) return;
    auto [it, fresh] = terms_.try_emplace(e, c);
    if (fresh) {
      it->second.canonicalize();
    } else {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  PiPoly& operator+=(const PiPoly& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  PiPoly& operator-=(const PiPoly& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  friend PiPoly operator+(PiPoly a, const PiPoly& b) { return a += b; }
  friend PiPoly operator-(PiPoly a, const PiPoly& b) { return a -= b; }
  friend PiPoly operator-(const PiPoly& a) { return PiPoly() - a; }
  friend PiPoly operator*(const PiPoly& a, const PiPoly& b) {
    PiPoly r;
    for (const auto& [e1, c1] : a.terms_)
      for (const auto& [e2, c2] : b.terms_) r.add_term(e1 + e2, c1 * c2);
    return r;
  }
  PiPoly& operator*=(const PiPoly& o) { return *this = *this * o; }
  friend bool operator==(const PiPoly&, const PiPoly&) = default;

  RatInterval evaluate(const PiPowers& pw) const {
    RatInterval acc(Rat(0));
    for (const auto& [e, c] : terms_) acc += RatInterval(c) * pw[e];
    return acc.rounded(pw.bits());
  }

  // Human-readable form, e.g. "-6*pi^6 + pi^8".
  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
      Rat a = abs(c);
      if (!first) os << (c < 0 ? " - " : " + ");
      else if (c < 0) os << "-";
      first = false;
      bool unit = (a == 1 && e != 0);
      if (!unit) os << rat_str(a);
      if (e > 0) os << (unit ? "" : "*") << "pi" << (e > 1 ? "^" + std::to_string(e) : "");
    }
    return os.str();
  }

  // {"pi_exponent": "num/den"}
  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [e, c] : terms_) j[std::to_string(e)] = rat_str(c);
    return j;
  }

private:
  Map terms_;
};

class PiLaurent {
public:
  using Map = std::map<int, PiPoly>;

  PiLaurent() = default;
  PiLaurent(const PiPoly& c) { add_term(0, c); }  // NOLINT
  PiLaurent(long c) : PiLaurent(PiPoly(c)) {}     // NOLINT

  static PiLaurent monomial(const PiPoly& c, int y_exp) {
    PiLaurent p;
    p.add_term(y_exp, c);
    return p;
  }
  static PiLaurent y(int e = 1) { return monomial(PiPoly(1), e); }

  const Map& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  PiPoly coeff(int e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? PiPoly() : it->second;
  }
  int top_exponent() const {
    if (terms_.empty()) throw DomainError("zero Laurent polynomial has no degree");
    return terms_.rbegin()->first;
  }
  int bottom_exponent() const {
    if (terms_.empty()) throw DomainError("zero Laurent polynomial has no degree");
    return terms_.begin()->first;
  }
  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& [e, c] : terms_) n += c.terms().size();
    return n;
  }

  void add_term(int e, const PiPoly& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = terms_.try_emplace(e, c);
    if (!fresh) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  PiLaurent& operator+=(const PiLaurent& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  PiLaurent& operator-=(const PiLaurent& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  friend PiLaurent operator+(PiLaurent a, const PiLaurent& b) { return a += b; }
  friend PiLaurent operator-(PiLaurent a, const PiLaurent& b) { return a -= b; }
  friend PiLaurent operator-(const PiLaurent& a) { return PiLaurent() - a; }
  friend bool operator==(const PiLaurent&, const PiLaurent&) = default;

  PiLaurent scaled(const Rat& s) const {
    PiLaurent r;
    if (s == 0) return r;
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, c * PiPoly(s));
    return r;
  }
  PiLaurent shifted(int dy) const {
    PiLaurent r;
    for (const auto& [e, c] : terms_) r.terms_.emplace(e + dy, c);
    return r;
  }

  // Products are accumulated over integers: each operand is brought to a
  // common denominator, numerators are multiplied into a hash keyed by
  // (y, π) exponent, and the denominators are divided out once at the end.
  friend PiLaurent operator*(const PiLaurent& a, const PiLaurent& b) {
    if (a.is_zero() || b.is_zero()) return {};
    auto fa = a.flatten(), fb = b.flatten();
    std::unordered_map<std::uint64_t, BigInt> acc;
    acc.reserve(fa.terms.size() * 4);
    BigInt prod;
    for (const auto& ta : fa.terms)
      for (const auto& tb : fb.terms) {
        std::uint64_t key = pack(ta.y + tb.y, ta.pi + tb.pi);
        mpz_mul(prod.get_mpz_t(), ta.num.get_mpz_t(), tb.num.get_mpz_t());
        acc[key] += prod;
      }
    BigInt den = fa.den * fb.den;
    PiLaurent r;
    for (auto& [key, num] : acc) {
      if (num == 0) continue;
      auto [ye, pe] = unpack(key);
      r.terms_[ye].add_term(pe, make_rat(num, den));
    }
    for (auto it = r.terms_.begin(); it != r.terms_.end();)
      it = it->second.is_zero() ? r.terms_.erase(it) : std::next(it);
    return r;
  }
  PiLaurent& operator*=(const PiLaurent& o) { return *this = *this * o; }

  // Lowest common denominator of all rational coefficients.
  BigInt denominator_lcm() const {
    BigInt l = 1;
    for (const auto& [e, c] : terms_)
      for (const auto& [pe, r] : c.terms()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), r.get_den_mpz_t());
    return l;
  }

  RatInterval evaluate(const RatInterval& yv, const PiPowers& pw) const {
    RatInterval acc(Rat(0));
    for (const auto& [e, c] : terms_) acc += c.evaluate(pw) * ipow(yv, e, pw.bits());
    return acc.rounded(pw.bits());
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      if (!first) os << " + ";
      first = false;
      os << "(" << it->second.to_string() << ")";
      if (it->first != 0) os << "*y^" << it->first;
    }
    return os.str();
  }

  // {"y_exponent": {"pi_exponent": "num/den"}}
  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [e, c] : terms_) j[std::to_string(e)] = c.to_json();
    return j;
  }

private:
  struct FlatTerm {
    int y;
    int pi;
    BigInt num;
  };
  struct Flat {
    std::vector<FlatTerm> terms;
    BigInt den;
  };

  Flat flatten() const {
    Flat f;
    f.den = denominator_lcm();
    for (const auto& [e, c] : terms_)
      for (const auto& [pe, r] : c.terms()) {
        BigInt num = r.get_num() * (f.den / r.get_den());
        f.terms.push_back({e, pe, std::move(num)});
      }
    return f;
  }

  static constexpr std::int64_t kBias = 1 << 30;
  static std::uint64_t pack(int y, int pi) {
    return (static_cast<std::uint64_t>(y + kBias) << 32) | static_cast<std::uint32_t>(pi);
  }
  static std::pair<int, int> unpack(std::uint64_t k) {
    return {static_cast<int>(static_cast<std::int64_t>(k >> 32) - kBias), static_cast<int>(k & 0xffffffffu)};
  }

  Map terms_;
};

inline PiLaurent pow(const PiLaurent& x, unsigned e) {
  PiLaurent acc(1), base = x;
  while (e) {
    if (e & 1u) acc *= base;
    e >>= 1u;
    if (e) base *= base;
  }
  return acc;
}

inline PiLaurent from_json_laurent(const nlohmann::ordered_json& j) {
  PiLaurent r;
  for (auto it = j.begin(); it != j.end(); ++it) {
    PiPoly c;
    for (auto jt = it.value().begin(); jt != it.value().end(); ++jt)
      c.add_term(std::stoi(jt.key()), parse_rat(jt.value().get<std::string>()));
    r.add_term(std::stoi(it.key()), c);
  }
  return r;
}

} // namespace parti
