#pragma once

// Asymptotic positivity certificates. An inequality on Δ^k f is expanded
// into a form in f(n+i); each f(n+i) is replaced by its Hardy–Ramanujan
// type upper or lower bound; the result, multiplied by a positive factor,
// becomes a Laurent polynomial in y = μ(n+s) with coefficients in ℚ[π].
// Dominance of its leading term gives y0, hence n0, and a finite scan
// covers everything below.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "parti/forms.hpp"
#include "parti/interval.hpp"
#include "parti/pipoly.hpp"
#include "parti/thresholds.hpp"

namespace parti {

enum class CertMode { Literal, Sound };

inline std::string_view mode_name(CertMode m) { return m == CertMode::Literal ? "literal" : "sound"; }

inline CertMode parse_mode(std::string_view s) {
  if (s == "literal") return CertMode::Literal;
  if (s == "sound") return CertMode::Sound;
  throw UsageError("unknown certificate mode '" + std::string(s) + "' (expected literal or sound)");
}

inline constexpr int kDefaultDigits = 50;
inline constexpr int kMaxDigits = PiConstant::max_digits;

// Raised when an interval sign cannot be decided at the current precision.
class Indeterminate : public VerificationError {
public:
  using VerificationError::VerificationError;
};

// ---------------------------------------------------------------- polynomials

// Coefficients of α = t^l - t^{l-1} + 1 and β = t^l - t^{l-1} - 1, index = power.
struct AlphaBeta {
  std::vector<BigInt> alpha, beta;
};

inline AlphaBeta alpha_beta(int l) {
  if (l < 2) throw UsageError("alpha_beta: l must be >= 2");
  AlphaBeta ab;
  ab.alpha.assign(static_cast<std::size_t>(l) + 1, 0);
  ab.alpha[static_cast<std::size_t>(l)] = 1;
  ab.alpha[static_cast<std::size_t>(l) - 1] = -1;
  ab.beta = ab.alpha;
  ab.alpha[0] = 1;
  ab.beta[0] = -1;
  return ab;
}

// Σ_{j ≤ degree} t^j / j!, index = power. Odd degrees bound e^t from below
// for every real t; even degrees bound it from above for t ≤ 0.
inline std::vector<Rat> exp_partial_sum(int degree) {
  if (degree < 1) throw UsageError("exp_partial_sum: degree must be >= 1");
  std::vector<Rat> c(static_cast<std::size_t>(degree) + 1);
  c[0] = 1;
  for (int j = 1; j <= degree; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j) - 1] / j;
  return c;
}

inline Rat eval_poly(const std::vector<Rat>& c, const Rat& t) {
  Rat acc = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
  return acc;
}

// Σ_{j ≤ degree} E^j / j! for a Laurent argument.
inline PiLaurent exp_partial_sum(const PiLaurent& e, int degree) {
  if (degree < 1) throw UsageError("exp_partial_sum: degree must be >= 1");
  PiLaurent acc(1), term(1);
  for (int j = 1; j <= degree; ++j) {
    term = (term * e).scaled(Rat(1, j));
    acc += term;
  }
  return acc;
}

// ------------------------------------------------------------ √ enclosures

// μ(n+i)^2 - μ(n+s)^2 = (i-s)·c·π² with c = 2/3 for p and 1 for pbar.
inline Rat mu_step(BaseSequence b) { return b == BaseSequence::Partition ? Rat(2, 3) : Rat(1); }

// y² + j·c·π²
inline PiLaurent sqrt_target(BaseSequence b, int j) {
  PiLaurent t = PiLaurent::y(2);
  t.add_term(0, PiPoly::monomial(mu_step(b) * j, 2));
  return t;
}

// C(1/2, k)
inline Rat binom_half(int k) {
  Rat r = 1;
  for (int i = 0; i < k; ++i) r *= Rat(1, 2) - i;
  for (int i = 2; i <= k; ++i) r /= i;
  return r;
}

// k-th Taylor term of √(y² + jcπ²) in 1/y: C(1/2,k) (jc)^k π^{2k} y^{1-2k}.
inline PiLaurent sqrt_taylor_term(BaseSequence b, int j, int k) {
  Rat a = mu_step(b) * j, p = 1;
  for (int i = 0; i < k; ++i) p *= a;
  return PiLaurent::monomial(PiPoly::monomial(binom_half(k) * p, 2 * k), 1 - 2 * k);
}

inline PiLaurent sqrt_taylor(BaseSequence b, int j, int nterms) {
  PiLaurent s;
  for (int k = 0; k < nterms; ++k) s += sqrt_taylor_term(b, j, k);
  return s;
}

struct SqrtEnclosure {
  int j = 0;
  PiLaurent lo, hi;
  std::optional<Rat> verified_from;  // sound mode: lo < √ < hi for y ≥ this
};

struct DominanceCertificate {
  Rat y0;
  int top_exponent = 0;
  RatInterval leading;  // c_D
  Rat tail_bound;       // upper bound of Σ_{k<D} |c_k| y0^{k-D}
  int digits = kDefaultDigits;
};

namespace detail {

struct DominanceData {
  int top = 0;
  RatInterval lead;
  std::vector<Rat> tail;  // tail[m-1] bounds |c_{D-m}|, m ≥ 1
};

inline DominanceData dominance_data(const PiLaurent& p, int digits) {
  if (p.is_zero()) throw VerificationError("dominance: zero polynomial");
  PiPowers pw(digits);
  DominanceData d;
  d.top = p.top_exponent();
  d.lead = p.coeff(d.top).evaluate(pw);
  if (d.lead.negative()) throw VerificationError("dominance: leading coefficient is negative");
  if (!d.lead.positive()) throw Indeterminate("dominance: leading coefficient sign undecided");
  d.tail.assign(static_cast<std::size_t>(d.top - p.bottom_exponent()), Rat(0));
  for (const auto& [e, c] : p.terms())
    if (e < d.top) d.tail[static_cast<std::size_t>(d.top - e - 1)] = abs(c.evaluate(pw)).hi();
  return d;
}

// Upper bound of Σ_m tail[m-1] t^m, all terms nonnegative, rounded upward.
inline Rat tail_sum(const std::vector<Rat>& tail, const Rat& y, unsigned bits) {
  Rat scale = pow2(bits);
  Rat t = Rat(ceil_rat((1 / y) * scale)) / scale;
  Rat acc = 0;
  for (auto it = tail.rbegin(); it != tail.rend(); ++it) acc = Rat(ceil_rat((acc + *it) * t * scale)) / scale;
  return acc;
}

template <class F>
auto with_precision(int digits, F&& f) {
  for (int d = digits;; d *= 2) {
    try {
      return f(std::min(d, kMaxDigits));
    } catch (const Indeterminate&) {
      if (d >= kMaxDigits) throw;
    }
  }
}

} // namespace detail

// Least (up to bisection resolution) y0 ≥ y_min with Σ_{k<D} |c_k| y0^{k-D}
// < c_D, which forces P(y) > 0 for all y ≥ y0.
inline DominanceCertificate dominance_threshold(const PiLaurent& p, const Rat& y_min, int digits = kDefaultDigits) {
  if (y_min <= 0) throw UsageError("dominance: y_min must be positive");
  return detail::with_precision(digits, [&](int dg) {
    auto d = detail::dominance_data(p, dg);
    const unsigned bits = bits_for_digits(dg);
    auto ok = [&](const Rat& y) { return detail::tail_sum(d.tail, y, bits) < d.lead.lo(); };
    DominanceCertificate cert;
    cert.top_exponent = d.top;
    cert.leading = d.lead;
    cert.digits = dg;
    Rat hi = y_min;
    if (!ok(hi)) {
      Rat lo = y_min;
      hi = std::max(y_min, Rat(1));
      int guard = 0;
      while (!ok(hi)) {
        lo = hi;
        hi *= 2;
        if (++guard > 200) throw VerificationError("dominance: no threshold found");
      }
      // Bisect on a dyadic grid down to relative width 2^-30.
      while (hi - lo > hi * pow2(-30)) {
        Rat mid = (lo + hi) / 2;
        Rat scale = pow2(40);
        mid = Rat(ceil_rat(mid * scale)) / scale;
        if (mid >= hi) break;
        (ok(mid) ? hi : lo) = mid;
      }
    }
    cert.y0 = hi;
    cert.tail_bound = detail::tail_sum(d.tail, hi, bits);
    return cert;
  });
}

// Two-step bound on a polynomial with exponents bottom..D: for y ≥ c1 every
// |a_k| y^k (k < D-2) is at most |a_{D-2}| y^{D-2}; for y ≥ c2 the quadratic
// a_D y² + a_{D-1} y - count·|a_{D-2}| is positive.
struct TwoStepBound {
  double c1 = 0, c2 = 0;
  int count = 0;
  std::optional<Rat> y0;  // certified max(c1, c2) rounded up
};

// `grid` is the denominator of the rational point where the bound is
// certified (100: two decimals, as the constants are usually quoted).
inline TwoStepBound two_step_dominance(const PiLaurent& p, int digits = kDefaultDigits, long grid = 10000) {
  TwoStepBound out;
  const int top = p.top_exponent(), bottom = p.bottom_exponent();
  if (top - bottom < 2) return out;
  PiPowers pw(digits);
  const unsigned bits = pw.bits();
  RatInterval aD = p.coeff(top).evaluate(pw), aD1 = p.coeff(top - 1).evaluate(pw), aD2 = p.coeff(top - 2).evaluate(pw);
  RatInterval mag2 = abs(aD2);
  if (!aD.positive() || !mag2.positive()) return out;
  out.count = top - 1 - bottom;
  double l2 = std::log(mag2.approx());
  double c1 = 0;
  for (const auto& [e, c] : p.terms()) {
    if (e >= top - 2) continue;
    double a = std::fabs(c.evaluate(pw).approx());
    if (a == 0) continue;
    c1 = std::max(c1, std::exp((std::log(a) - l2) / (top - 2 - e)));
  }
  double A = aD.approx(), B = aD1.approx(), C = out.count * mag2.approx();
  out.c1 = c1;
  out.c2 = (-B + std::sqrt(B * B + 4 * A * C)) / (2 * A);
  // Certify at a grid point just above max(c1, c2).
  Rat y = Rat(ceil_rat(Rat(std::max(c1, out.c2)) * grid)) / grid;
  for (const auto& [e, c] : p.terms()) {
    if (e >= top - 2) continue;
    RatInterval lhs = abs(c.evaluate(pw));
    RatInterval rhs = (mag2 * ipow(RatInterval(y), top - 2 - e, bits)).rounded(bits);
    if (!(lhs.hi() <= rhs.lo())) return out;
  }
  RatInterval q = aD * RatInterval(y * y) + aD1 * RatInterval(y) - RatInterval(Rat(out.count)) * mag2;
  RatInterval slope = aD * RatInterval(2 * y) + aD1;
  if (q.positive() && slope.positive()) out.y0 = y;
  return out;
}

// Positivity of a Laurent polynomial for y ≥ y0, certified by dominance.
struct PositivityCheck {
  std::string label;
  PiLaurent expr;
  Rat positive_from;
  std::optional<Rat> t_min;  // exponent checks: lower bound of the exponent on y ≥ positive_from
};

inline PositivityCheck check_positive(std::string label, PiLaurent expr, const Rat& y_min, int digits) {
  PositivityCheck c{std::move(label), std::move(expr), Rat(0), std::nullopt};
  try {
    c.positive_from = dominance_threshold(c.expr, y_min, digits).y0;
  } catch (const Indeterminate&) {
    throw;
  } catch (const VerificationError& e) {
    throw VerificationError(c.label + ": " + e.what() + " [" + c.expr.to_string() + "]");
  }
  return c;
}

// Literal: the printed pattern. For j > 0 the truncations after `depth` and
// `depth`+1 terms; for j < 0 the `depth`-term truncation and a copy whose last
// coefficient is shrunk in magnitude. Sound: truncations ordered by the sign
// of the last term for j > 0; for j < 0 the truncation (every dropped term is
// negative) above and truncation plus twice the next term below, both proven
// by dominance on y ≥ y_min.
inline SqrtEnclosure sqrt_enclosure(BaseSequence b, int j, int depth, CertMode mode, const Rat& y_min = Rat(1),
                                    int digits = kDefaultDigits) {
  if (depth < 2) throw UsageError("sqrt_enclosure: depth must be >= 2");
  SqrtEnclosure e;
  e.j = j;
  if (j == 0) {
    e.lo = e.hi = PiLaurent::y();
    e.verified_from = y_min;
    return e;
  }
  if (mode == CertMode::Literal) {
    if (j > 0) {
      e.lo = sqrt_taylor(b, j, depth);
      e.hi = sqrt_taylor(b, j, depth + 1);
    } else {
      e.lo = sqrt_taylor(b, j, depth);
      e.hi = sqrt_taylor(b, j, depth - 1);
      const int k = depth - 1;
      Rat c = sqrt_taylor_term(b, j, k).coeff(1 - 2 * k).coeff(2 * k);
      Rat shrunk = abs(c.get_num()) > 1 ? make_rat(c.get_num() + (c < 0 ? 1 : -1), c.get_den())
                                        : make_rat(c.get_num(), 2 * c.get_den());
      e.hi.add_term(1 - 2 * k, PiPoly::monomial(shrunk, 2 * k));
    }
    return e;
  }
  if (j > 0) {
    PiLaurent a = sqrt_taylor(b, j, depth), c = sqrt_taylor(b, j, depth + 1);
    bool a_is_lower = binom_half(depth - 1) < 0;
    e.lo = a_is_lower ? a : c;
    e.hi = a_is_lower ? c : a;
  } else {
    e.hi = sqrt_taylor(b, j, depth);
    e.lo = e.hi + sqrt_taylor_term(b, j, depth).scaled(Rat(2));
  }
  PiLaurent target = sqrt_target(b, j);
  Rat from = y_min;
  from = std::max(from, check_positive("sqrt upper positive", e.hi, y_min, digits).positive_from);
  from = std::max(from, check_positive("sqrt upper", e.hi * e.hi - target, y_min, digits).positive_from);
  from = std::max(from, check_positive("sqrt lower", target - e.lo * e.lo, y_min, digits).positive_from);
  e.verified_from = from;
  return e;
}

// ------------------------------------------------------------ n ↔ y

// Least n with 6 e^{-u/2} < u^{-l}, u = μ(n). Certified by intervals:
// the criterion fails at n = 1 and n-1, holds at n, and u(n) ≥ 2l. The
// function u/2 - l ln u is convex, so failing at both ends of [u(1), u(n-1)]
// means failing throughout, and it is increasing once u ≥ 2l.
inline long n_of_l(BaseSequence base, int l, int digits = kDefaultDigits) {
  if (l < 1) throw UsageError("n_of_l: l must be >= 1");
  auto mu_d = [&](long n) {
    return base == BaseSequence::Partition ? std::numbers::pi * std::sqrt(24.0 * n - 1) / 6 : std::numbers::pi * std::sqrt(double(n));
  };
  auto holds_d = [&](long n) {
    double u = mu_d(n);
    return std::log(6.0) + l * std::log(u) < u / 2;
  };
  long lo = 1, hi = 2;
  while (mu_d(lo) < 2 * l) lo *= 2;
  lo = std::max(1L, lo / 2);
  hi = lo;
  while (!holds_d(hi) || mu_d(hi) < 2 * l) hi *= 2;
  while (hi - lo > 1) {
    long mid = lo + (hi - lo) / 2;
    (holds_d(mid) && mu_d(mid) >= 2 * l ? hi : lo) = mid;
  }
  long cand = hi;
  return detail::with_precision(digits, [&](int dg) {
    const unsigned bits = bits_for_digits(dg);
    // +1: holds, -1: fails, throws Indeterminate otherwise
    auto decide = [&](long n) {
      RatInterval u = mu_interval(base, n, dg);
      RatInterval lhs = (RatInterval(Rat(6)) * pow(u, static_cast<unsigned>(l), bits)).rounded(bits);
      RatInterval rhs = exp_interval(RatInterval(u.lo() / 2, u.hi() / 2), bits);
      if (lhs.hi() < rhs.lo()) return 1;
      if (lhs.lo() > rhs.hi()) return -1;
      throw Indeterminate("n_of_l: undecided at n=" + std::to_string(n));
    };
    long n = cand;
    while (decide(n) < 0) ++n;
    while (n > 1 && decide(n - 1) > 0) --n;
    if (!(mu_interval(base, n, dg).lo() >= 2 * l)) throw VerificationError("n_of_l: monotone region not reached");
    if (n > 1 && decide(1) > 0) throw VerificationError("n_of_l: criterion holds at n=1");
    return n;
  });
}

// Least n ≥ 1 with μ(n + anchor) > y0.
inline long y_to_n(const Rat& y0, BaseSequence base, int anchor, int digits = kDefaultDigits) {
  if (y0 <= 0) throw UsageError("y_to_n: y0 must be positive");
  const long first = 1 + anchor;
  if (first < (base == BaseSequence::Partition ? 1 : 0)) throw DomainError("y_to_n: anchor below the domain of mu");
  return detail::with_precision(digits, [&](int dg) {
    auto above = [&](long m) {
      RatInterval u = mu_interval(base, m, dg);
      if (u.lo() > y0) return true;
      if (u.hi() <= y0) return false;
      throw Indeterminate("y_to_n: undecided at m=" + std::to_string(m));
    };
    double y = y0.get_d();
    double est = base == BaseSequence::Partition ? (36 * y * y / (std::numbers::pi * std::numbers::pi) + 1) / 24 : y * y / (std::numbers::pi * std::numbers::pi);
    long m = std::max(first, static_cast<long>(est));
    while (!above(m)) ++m;
    while (m > first && above(m - 1)) --m;
    return m - anchor;
  });
}

// ------------------------------------------------------------ certificates

enum class ExpAssignment { ParityCorrect, AsPrinted };

struct CertificateSpec {
  std::string name;
  BaseSequence base = BaseSequence::Partition;
  IneqKind kind;
  int diff_order = 1;
  ShiftForm form;
  int l = 6;
  int anchor = 0;      // shift s with y = μ(n+s)
  int exp_lower = 5;   // odd partial-sum degree
  int exp_upper = 6;   // even partial-sum degree
  int sqrt_depth = 4;  // T
  CertMode mode = CertMode::Sound;
  ExpAssignment exp_assignment = ExpAssignment::ParityCorrect;
  std::optional<Rat> y_min;
  int digits = kDefaultDigits;

  long window_offset() const { return form_window_offset(kind); }

  void validate() const {
    if (l < 2 || l % 2) throw UsageError("certificate: l must be even and >= 2");
    if (sqrt_depth < 3) throw UsageError("certificate: sqrt depth must be >= 3");
    if (digits < 10 || digits > kMaxDigits) throw UsageError("certificate: precision must lie in 10.." + std::to_string(kMaxDigits));
    auto sh = form.shifts();
    if (std::find(sh.begin(), sh.end(), anchor) == sh.end()) throw UsageError("certificate: anchor is not a shift of the form");
    if (exp_lower < 1 || exp_upper < 1) throw UsageError("certificate: exp degrees must be >= 1");
    if (mode == CertMode::Sound) {
      if (exp_lower % 2 == 0 || exp_upper % 2 == 1)
        throw UsageError("certificate: sound mode needs an odd lower and an even upper exp degree");
      if (exp_assignment != ExpAssignment::ParityCorrect)
        throw UsageError("certificate: sound mode needs the parity-correct exp assignment");
    }
  }
};

struct Assembly {
  std::map<int, SqrtEnclosure> enclosures;      // by shift i
  std::vector<PositivityCheck> exponent_checks;  // expr = -E, positive means E < 0
  std::vector<PositivityCheck> factor_checks;    // β lower bounds
  PiLaurent lower_bound;  // Laurent in y
  PiLaurent numerator;    // lower_bound * scale
  BigInt scale_const = 1;
  int scale_y = 0;

  PiLaurent scale() const { return PiLaurent::monomial(PiPoly(Rat(scale_const)), scale_y); }
  int degree() const { return numerator.top_exponent(); }
};

namespace detail {

inline Rat exponent_floor(const PiLaurent& e, const Rat& y, int digits) {
  PiPowers pw(digits);
  Rat acc = 0;
  for (const auto& [k, c] : e.terms()) {
    RatInterval ci = c.evaluate(pw);
    if (k >= 0) throw VerificationError("exponent has a nonnegative power of y");
    if (ci.lo() < 0) acc += (ci * ipow(RatInterval(y), k, pw.bits())).lo();
  }
  return acc;
}

} // namespace detail

// Lower bound, valid for y = μ(n+s) ≥ y_min and all shifted indices at or
// beyond N(l), of  form(n) · y^{L d} Π_{i≠s} μ_i^{L e_i} e^{-d y} / K^d,
// where L = l + 2 and K is the lemma's constant. Positive monomials get
// lower bounds (β, √ bounds chosen to shrink, odd exp partial sums), negative
// ones upper bounds (α, even exp partial sums).
inline Assembly assemble_numerator(const CertificateSpec& spec, const Rat& y_min = Rat(1)) {
  spec.validate();
  const int s = spec.anchor, l = spec.l, L = l + 2, d = spec.form.degree();
  const auto shifts = spec.form.shifts();
  Assembly out;
  for (int i : shifts) {
    if (i == s) continue;
    const int j = i - s;
    out.enclosures.emplace(i, sqrt_enclosure(spec.base, j, j < 0 ? spec.sqrt_depth : spec.sqrt_depth - 1, spec.mode,
                                             y_min, spec.digits));
  }
  const bool parity = spec.exp_assignment == ExpAssignment::ParityCorrect;
  const int deg_for_lower = parity ? spec.exp_lower : spec.exp_upper;
  const int deg_for_upper = parity ? spec.exp_upper : spec.exp_lower;

  std::map<std::pair<int, int>, PiLaurent> even_pow_cache;
  auto mu_even = [&](int i, int e) -> const PiLaurent& {  // μ_i^e, e even
    auto key = std::make_pair(i, e);
    auto it = even_pow_cache.find(key);
    if (it != even_pow_cache.end()) return it->second;
    PiLaurent v = i == s ? PiLaurent::y(e) : pow(sqrt_target(spec.base, i - s), static_cast<unsigned>(e / 2));
    return even_pow_cache.emplace(key, std::move(v)).first->second;
  };
  std::map<std::pair<int, bool>, PiLaurent> gamma_cache;
  auto gamma = [&](int i, bool upper) -> const PiLaurent& {
    auto key = std::make_pair(i, upper);
    auto it = gamma_cache.find(key);
    if (it != gamma_cache.end()) return it->second;
    PiLaurent g;
    if (i == s) {
      g = PiLaurent::y(l) - PiLaurent::y(l - 1);
    } else {
      const auto& enc = out.enclosures.at(i);
      g = mu_even(i, l) - (upper ? enc.lo : enc.hi) * mu_even(i, l - 2);
    }
    g += PiLaurent(upper ? 1 : -1);
    return gamma_cache.emplace(key, std::move(g)).first->second;
  };

  std::map<int, int> emax;
  for (int i : shifts) emax[i] = spec.form.max_multiplicity(i);

  std::map<std::string, std::size_t> seen_exponents;
  std::vector<std::pair<std::string, PiLaurent>> exponents;
  std::map<int, bool> lower_gamma_used;

  PiLaurent total;
  for (const auto& term : spec.form.terms()) {
    const bool upper = term.coeff < 0;
    std::map<int, int> cnt;
    for (int i : term.shifts) ++cnt[i];
    PiLaurent t(PiPoly(Rat(upper ? BigInt(-term.coeff) : term.coeff)));
    for (int i : term.shifts) {
      t *= gamma(i, upper);
      if (!upper) lower_gamma_used[i] = true;
    }
    t = t.shifted(L * (d - cnt[s]));
    for (int i : shifts) {
      if (i == s) continue;
      int e = L * (emax[i] - cnt[i]);
      if (e) t *= mu_even(i, e);
    }
    PiLaurent expo = PiLaurent::y(1).scaled(Rat(-d));
    std::string label = upper ? "upper" : "lower";
    for (int i : term.shifts) {
      expo += i == s ? PiLaurent::y() : (upper ? out.enclosures.at(i).hi : out.enclosures.at(i).lo);
      label += " " + std::to_string(i - s);
    }
    if (!expo.is_zero()) {
      t *= exp_partial_sum(expo, upper ? deg_for_upper : deg_for_lower);
      std::string key = expo.to_string();
      if (!seen_exponents.count(key)) {
        seen_exponents.emplace(key, exponents.size());
        exponents.emplace_back("exponent " + label, expo);
      }
    }
    if (upper)
      total -= t;
    else
      total += t;
  }

  for (auto& [label, expo] : exponents) {
    PositivityCheck c = check_positive(label, -expo, y_min, spec.digits);
    c.expr = expo;
    c.t_min = detail::exponent_floor(expo, c.positive_from, spec.digits);
    out.exponent_checks.push_back(std::move(c));
  }
  if (spec.mode == CertMode::Sound)
    for (const auto& [i, used] : lower_gamma_used)
      out.factor_checks.push_back(
          check_positive("beta lower bound " + std::to_string(i - s), gamma(i, false), y_min, spec.digits));

  if (total.is_zero()) throw VerificationError("assembled numerator is identically zero");
  out.lower_bound = total;
  out.scale_const = total.denominator_lcm();
  out.scale_y = -total.bottom_exponent();
  out.numerator = total.scaled(Rat(out.scale_const)).shifted(out.scale_y);
  return out;
}

struct CertificateResult {
  CertificateSpec spec;
  Assembly assembly;
  Rat y_min;
  DominanceCertificate dominance;
  TwoStepBound two_step;
  Rat y0;
  long n_of_l = 0;
  long n0 = 0;
  ThresholdReport finite_check;
  long theorem_threshold = 0;
  std::optional<long> expected_threshold;
  bool closed = false;
};

// Supplies a cache for `base` holding values at least up to `up_to`.
using CacheProvider = std::function<const SeqCache&(BaseSequence, long)>;

// assemble → dominance → y_to_n → finite scan below n0 → composed threshold.
// Indices are form indices (for Turán forms: the centre of the window).
inline CertificateResult certify_theorem(const CertificateSpec& spec, const CacheProvider& caches,
                                         std::optional<long> expected_threshold = std::nullopt) {
  spec.validate();
  CertificateResult r;
  r.spec = spec;
  r.expected_threshold = expected_threshold;
  r.n_of_l = n_of_l(spec.base, spec.l, spec.digits);
  const long first_valid = r.n_of_l - spec.form.min_shift();  // every f(n+i) inside the lemma's range
  r.y_min = spec.y_min ? *spec.y_min : mu_interval(spec.base, first_valid + spec.anchor, spec.digits).lo();
  r.assembly = assemble_numerator(spec, r.y_min);

  r.dominance = dominance_threshold(r.assembly.numerator, r.y_min, spec.digits);
  r.two_step = two_step_dominance(r.assembly.numerator, spec.digits, spec.mode == CertMode::Literal ? 100 : 10000);
  // Literal replays follow the printed two-step chain when it applies;
  // sound certificates take the smaller of the two certified bounds.
  Rat y0 = r.dominance.y0;
  if (r.two_step.y0 && (spec.mode == CertMode::Literal || *r.two_step.y0 < y0)) y0 = std::max(*r.two_step.y0, r.y_min);
  for (const auto& c : r.assembly.exponent_checks) y0 = std::max(y0, c.positive_from);
  for (const auto& c : r.assembly.factor_checks) y0 = std::max(y0, c.positive_from);
  for (const auto& [i, e] : r.assembly.enclosures)
    if (e.verified_from) y0 = std::max(y0, *e.verified_from);
  r.y0 = y0;
  r.n0 = std::max(y_to_n(y0, spec.base, spec.anchor, spec.digits), first_valid);

  const long offset = spec.window_offset();
  const long n_start = std::max(0L, -static_cast<long>(spec.form.min_shift()));
  ThresholdQuery q;
  q.expr = SeqExpr(spec.base, spec.diff_order);
  q.kind = spec.kind;
  q.n_min = n_start + offset;
  q.n_max = r.n0 + offset;
  q.margin = 1;
  const SeqCache& cache = caches(spec.base, q.base_reach());
  r.finite_check = verify_range(cache, q);
  r.theorem_threshold = r.finite_check.failures.empty() ? n_start : r.finite_check.failures.back() + 1 - offset;
  r.closed = !expected_threshold || r.theorem_threshold == *expected_threshold;
  return r;
}

// ------------------------------------------------------------ presets

struct TheoremPreset {
  std::string_view name;
  BaseSequence base;
  IneqKind kind;
  int l, anchor, exp_lower, exp_upper, sqrt_depth;
  long threshold;  // claimed theorem threshold (form indexing)
  long printed_n0;   // symbolic threshold of the printed derivation
};

inline const std::vector<TheoremPreset>& theorem_presets() {
  using B = BaseSequence;
  static const std::vector<TheoremPreset> presets{
      {"turan-p", B::Partition, IneqKind::turan2(), 6, 1, 5, 6, 4, 71, 2421},
      {"turan-pbar", B::Overpartition, IneqKind::turan2(), 6, 1, 5, 6, 4, 8, 1641},
      {"lag2-p", B::Partition, IneqKind::laguerre(2), 8, 3, 7, 8, 6, 301, 4277},
      {"lag2-pbar", B::Overpartition, IneqKind::laguerre(2), 8, 3, 7, 8, 6, 50, 2868},
      {"det3-p", B::Partition, IneqKind::toeplitz(3), 12, 3, 11, 12, 8, 345, 45284},
      {"det3-pbar", B::Overpartition, IneqKind::toeplitz(3), 12, 3, 11, 12, 8, 62, 22275},
  };
  return presets;
}

inline const TheoremPreset& find_preset(std::string_view name) {
  for (const auto& p : theorem_presets())
    if (p.name == name) return p;
  throw UsageError("unknown theorem '" + std::string(name) +
                   "' (expected turan-p, turan-pbar, lag2-p, lag2-pbar, det3-p or det3-pbar)");
}

inline CertificateSpec make_spec(const TheoremPreset& p, CertMode mode, int digits = kDefaultDigits) {
  CertificateSpec s;
  s.name = std::string(p.name);
  s.base = p.base;
  s.kind = p.kind;
  s.diff_order = 1;
  s.form = expand_difference_form(p.kind, 1);
  s.l = p.l;
  s.anchor = p.anchor;
  s.exp_lower = p.exp_lower;
  s.exp_upper = p.exp_upper;
  s.sqrt_depth = p.sqrt_depth;
  s.mode = mode;
  s.digits = digits;
  return s;
}

// ------------------------------------------------------------ JSON

inline ojson form_to_json(const ShiftForm& f) {
  ojson a = ojson::array();
  for (const auto& t : f.terms()) a.push_back({{"coeff", t.coeff.get_str()}, {"shifts", t.shifts}});
  return a;
}

inline ojson spec_to_json(const CertificateSpec& s) {
  ojson j;
  j["name"] = s.name;
  j["base"] = std::string(base_tag(s.base));
  j["ineq"] = s.kind.name();
  j["diff"] = s.diff_order;
  j["l"] = s.l;
  j["anchor_shift"] = s.anchor;
  j["exp_orders"] = {{"lower", s.exp_lower}, {"upper", s.exp_upper}};
  j["exp_assignment"] = s.exp_assignment == ExpAssignment::ParityCorrect ? "parity" : "as-printed";
  j["sqrt_depth"] = s.sqrt_depth;
  j["mode"] = std::string(mode_name(s.mode));
  j["precision"] = s.digits;
  j["window_offset"] = s.window_offset();
  j["form"] = form_to_json(s.form);
  return j;
}

inline ojson check_to_json(const PositivityCheck& c) {
  ojson j;
  j["label"] = c.label;
  j["expression"] = c.expr.to_json();
  j["holds_from_y"] = rat_str(c.positive_from);
  if (c.t_min) j["t_min"] = rat_str(*c.t_min);
  return j;
}

inline ojson certificate_to_json(const CertificateResult& r) {
  ojson j;
  j["spec"] = spec_to_json(r.spec);
  j["sound"] = r.spec.mode == CertMode::Sound;
  ojson enc = ojson::array();
  for (const auto& [i, e] : r.assembly.enclosures) {
    ojson x;
    x["shift"] = i;
    x["j"] = e.j;
    x["lo"] = e.lo.to_json();
    x["hi"] = e.hi.to_json();
    x["verified_from_y"] = e.verified_from ? ojson(rat_str(*e.verified_from)) : ojson(nullptr);
    enc.push_back(std::move(x));
  }
  j["enclosures"] = std::move(enc);
  ojson ex = ojson::array();
  for (const auto& c : r.assembly.exponent_checks) ex.push_back(check_to_json(c));
  j["exponent_checks"] = std::move(ex);
  ojson fc = ojson::array();
  for (const auto& c : r.assembly.factor_checks) fc.push_back(check_to_json(c));
  j["factor_checks"] = std::move(fc);
  j["numerator"] = r.assembly.numerator.to_json();
  j["scale"] = r.assembly.scale().to_json();
  j["degree"] = r.assembly.degree();
  j["top_y_exponent"] = r.assembly.lower_bound.top_exponent();
  j["y_min"] = rat_str(r.y_min);
  ojson dom;
  dom["y0"] = rat_str(r.dominance.y0);
  dom["top_exponent"] = r.dominance.top_exponent;
  dom["leading_lo"] = rat_str(r.dominance.leading.lo());
  dom["tail_bound"] = rat_str(r.dominance.tail_bound);
  dom["precision"] = r.dominance.digits;
  ojson two;
  two["c1"] = r.two_step.c1;
  two["c2"] = r.two_step.c2;
  two["count"] = r.two_step.count;
  two["y0"] = r.two_step.y0 ? ojson(rat_str(*r.two_step.y0)) : ojson(nullptr);
  dom["two_step"] = std::move(two);
  j["dominance"] = std::move(dom);
  j["y0"] = rat_str(r.y0);
  j["y0_approx"] = r.y0.get_d();
  j["n_of_l"] = r.n_of_l;
  j["n0"] = r.n0;
  j["finite_check"] = report_to_json(r.finite_check);
  j["theorem_threshold"] = r.theorem_threshold;
  j["expected_threshold"] = r.expected_threshold ? ojson(*r.expected_threshold) : ojson(nullptr);
  j["closed"] = r.closed;
  return j;
}

} // namespace parti
