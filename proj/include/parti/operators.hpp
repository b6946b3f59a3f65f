#pragma once

// Inequality operators evaluated exactly on integer windows.
//
// Every operator takes a window (a_n, a_{n+1}, ...) whose first element is the
// reported index n ("window-start convention").

#include <gmpxx.h>

#include <cassert>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "parti/errors.hpp"
#include "parti/sequences.hpp"

namespace parti {

inline constexpr int kMaxOrder = 16;   // Laguerre m and determinant m
inline constexpr int kMaxIterate = 8;  // iterated log-concavity r

struct Window {
  long start = 0;
  std::vector<BigInt> values;
};

struct IneqKind {
  enum class Tag { Turan2, Turan3, Laguerre, ToeplitzDet, LogConcaveIter, InvA, InvB, InvI };

  Tag tag = Tag::Turan2;
  int param = 0;  // m for Laguerre / ToeplitzDet, r for LogConcaveIter
  bool strict = true;

  static IneqKind turan2(bool strict = true) { return {Tag::Turan2, 0, strict}; }
  static IneqKind turan3(bool strict = true) { return {Tag::Turan3, 0, strict}; }
  static IneqKind laguerre(int m, bool strict = true) { return checked({Tag::Laguerre, m, strict}); }
  static IneqKind toeplitz(int m, bool strict = true) { return checked({Tag::ToeplitzDet, m, strict}); }
  static IneqKind logconcave(int r, bool strict = true) {
    return checked({Tag::LogConcaveIter, r, strict});
  }
  static IneqKind inv_a(bool strict = true) { return {Tag::InvA, 0, strict}; }
  static IneqKind inv_b(bool strict = true) { return {Tag::InvB, 0, strict}; }
  static IneqKind inv_i(bool strict = true) { return {Tag::InvI, 0, strict}; }

  int arity() const {
    switch (tag) {
      case Tag::Turan2: return 3;
      case Tag::Turan3: return 4;
      case Tag::Laguerre: return 2 * param + 1;
      case Tag::ToeplitzDet: return 2 * param - 1;
      case Tag::LogConcaveIter: return 2 * param + 1;
      case Tag::InvA:
      case Tag::InvB:
      case Tag::InvI: return 5;
    }
    return 0;
  }

  // CLI spelling: turan2, turan3, laguerre:M, det:M, logc:R, invA, invB, invI
  std::string name() const {
    switch (tag) {
      case Tag::Turan2: return "turan2";
      case Tag::Turan3: return "turan3";
      case Tag::Laguerre: return "laguerre:" + std::to_string(param);
      case Tag::ToeplitzDet: return "det:" + std::to_string(param);
      case Tag::LogConcaveIter: return "logc:" + std::to_string(param);
      case Tag::InvA: return "invA";
      case Tag::InvB: return "invB";
      case Tag::InvI: return "invI";
    }
    return "?";
  }

  static IneqKind parse(std::string_view s, bool strict = true) {
    auto param_of = [&](std::string_view prefix) -> int {
      std::string_view rest = s.substr(prefix.size());
      if (rest.empty() || rest.size() > 3) throw UsageError("bad inequality parameter in '" + std::string(s) + "'");
      int v = 0;
      for (char c : rest) {
        if (c < '0' || c > '9') throw UsageError("bad inequality parameter in '" + std::string(s) + "'");
        v = v * 10 + (c - '0');
      }
      return v;
    };
    if (s == "turan2") return turan2(strict);
    if (s == "turan3") return turan3(strict);
    if (s == "invA") return inv_a(strict);
    if (s == "invB") return inv_b(strict);
    if (s == "invI") return inv_i(strict);
    if (s.starts_with("laguerre:")) return laguerre(param_of("laguerre:"), strict);
    if (s.starts_with("det:")) return toeplitz(param_of("det:"), strict);
    if (s.starts_with("logc:")) return logconcave(param_of("logc:"), strict);
    throw UsageError("unknown inequality '" + std::string(s) + "'");
  }

  bool holds(const BigInt& value) const { return strict ? sgn(value) > 0 : sgn(value) >= 0; }

  friend bool operator==(const IneqKind&, const IneqKind&) = default;

private:
  static IneqKind checked(IneqKind k) {
    int cap = k.tag == Tag::LogConcaveIter ? kMaxIterate : kMaxOrder;
    if (k.param < 1 || k.param > cap)
      throw UsageError("inequality order must lie in 1.." + std::to_string(cap));
    return k;
  }
};

namespace detail {

inline void require_arity(std::span<const BigInt> w, std::size_t n, std::string_view op) {
  if (w.size() != n)
    throw ArityError(std::string(op) + ": window length " + std::to_string(w.size()) + ", expected " +
                     std::to_string(n));
}

inline void require_order(int m, int cap, std::string_view op) {
  if (m < 1 || m > cap) throw UsageError(std::string(op) + ": order out of range 1.." + std::to_string(cap));
}

} // namespace detail

// L_m(a_n) = 1/2 sum_{k=0}^{2m} (-1)^{k+m} C(2m,k) a_{n+k} a_{n+2m-k}.
// Symmetric terms are paired, so the 1/2 only touches the centre term, whose
// binomial C(2m,m) is even.
inline BigInt laguerre_value(std::span<const BigInt> w, int m) {
  detail::require_order(m, kMaxOrder, "laguerre_value");
  detail::require_arity(w, static_cast<std::size_t>(2 * m + 1), "laguerre_value");
  BigInt acc = 0, t;
  for (int k = 0; k < m; ++k) {
    unsigned long c = binomial(2 * m, k).get_ui();
    mpz_mul(t.get_mpz_t(), w[k].get_mpz_t(), w[2 * m - k].get_mpz_t());
    if ((k + m) % 2 == 0)
      mpz_addmul_ui(acc.get_mpz_t(), t.get_mpz_t(), c);
    else
      mpz_submul_ui(acc.get_mpz_t(), t.get_mpz_t(), c);
  }
  BigInt centre = binomial(2 * m, m);
  assert(mpz_even_p(centre.get_mpz_t()));
  mpz_mul(t.get_mpz_t(), w[m].get_mpz_t(), w[m].get_mpz_t());
  mpz_addmul_ui(acc.get_mpz_t(), t.get_mpz_t(), centre.get_ui() / 2);
  return acc;
}

// a_1^2 - a_0 a_2 for the window (a_0, a_1, a_2).
inline BigInt turan2_value(std::span<const BigInt> w) {
  detail::require_arity(w, 3, "turan2_value");
  return BigInt(w[1] * w[1] - w[0] * w[2]);
}

// 4(a_n^2 - a_{n-1}a_{n+1})(a_{n+1}^2 - a_n a_{n+2}) - (a_n a_{n+1} - a_{n-1}a_{n+2})^2
// for the window (a_{n-1}, a_n, a_{n+1}, a_{n+2}).
inline BigInt turan3_value(std::span<const BigInt> w) {
  detail::require_arity(w, 4, "turan3_value");
  BigInt l = w[1] * w[1] - w[0] * w[2];
  BigInt r = w[2] * w[2] - w[1] * w[3];
  BigInt c = w[1] * w[2] - w[0] * w[3];
  return BigInt(4 * l * r - c * c);
}

// Fraction-free (Bareiss) determinant of a dense square matrix, row-major.
// Zero pivots are handled by row exchange.
inline BigInt bareiss_det(std::vector<BigInt> a, int m) {
  if (m == 0) return 1;
  int sign = 1;
  BigInt prev = 1;
  auto at = [&](int i, int j) -> BigInt& { return a[static_cast<std::size_t>(i * m + j)]; };
  for (int k = 0; k < m - 1; ++k) {
    if (at(k, k) == 0) {
      int swap_row = -1;
      for (int i = k + 1; i < m; ++i)
        if (at(i, k) != 0) {
          swap_row = i;
          break;
        }
      if (swap_row < 0) return 0;
      for (int j = 0; j < m; ++j) std::swap(at(k, j), at(swap_row, j));
      sign = -sign;
    }
    for (int i = k + 1; i < m; ++i) {
      for (int j = k + 1; j < m; ++j) {
        BigInt& x = at(i, j);
        x *= at(k, k);
        mpz_submul(x.get_mpz_t(), at(i, k).get_mpz_t(), at(k, j).get_mpz_t());
        mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), prev.get_mpz_t());
      }
    }
    prev = at(k, k);
  }
  BigInt d = at(m - 1, m - 1);
  return sign > 0 ? d : BigInt(-d);
}

// Toeplitz matrix M[i][j] = a_{n+m-i+j-1} (1-based i, j) over the window
// (a_n .. a_{n+2m-2}); the top-left entry is a_{n+m-1}.
inline std::vector<BigInt> toeplitz_matrix(std::span<const BigInt> w, int m) {
  std::vector<BigInt> a(static_cast<std::size_t>(m * m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a[static_cast<std::size_t>(i * m + j)] = w[m - 1 - i + j];
  return a;
}

inline BigInt toeplitz_det(std::span<const BigInt> w, int m) {
  detail::require_order(m, kMaxOrder, "toeplitz_det");
  detail::require_arity(w, static_cast<std::size_t>(2 * m - 1), "toeplitz_det");
  switch (m) {
    case 1: return w[0];
    case 2: return turan2_value(w);
    case 3: {
      // a2^3 + a0 a3^2 + a1^2 a4 - a0 a2 a4 - 2 a1 a2 a3
      const auto &a0 = w[0], &a1 = w[1], &a2 = w[2], &a3 = w[3], &a4 = w[4];
      return BigInt(a2 * a2 * a2 + a0 * a3 * a3 + a1 * a1 * a4 - a0 * a2 * a4 - 2 * a1 * a2 * a3);
    }
    default: return bareiss_det(toeplitz_matrix(w, m), m);
  }
}

struct Invariants {
  BigInt A, B, I;
};

inline Invariants invariants(std::span<const BigInt> w) {
  detail::require_arity(w, 5, "invariants");
  const auto &a0 = w[0], &a1 = w[1], &a2 = w[2], &a3 = w[3], &a4 = w[4];
  Invariants r;
  r.A = a0 * a4 - 4 * a1 * a3 + 3 * a2 * a2;
  r.B = -a0 * a2 * a4 + a2 * a2 * a2 + a0 * a3 * a3 + a1 * a1 * a4 - 2 * a1 * a2 * a3;
  r.I = r.A * r.A * r.A - 27 * r.B * r.B;
  return r;
}

// One application of 𝓛 to a whole series: out[i] = v[i+1]^2 - v[i] v[i+2].
inline std::vector<BigInt> apply_logconcave(std::span<const BigInt> v) {
  std::vector<BigInt> out;
  if (v.size() < 3) return out;
  out.resize(v.size() - 2);
  for (std::size_t i = 0; i + 2 < v.size(); ++i) {
    mpz_mul(out[i].get_mpz_t(), v[i + 1].get_mpz_t(), v[i + 1].get_mpz_t());
    mpz_submul(out[i].get_mpz_t(), v[i].get_mpz_t(), v[i + 2].get_mpz_t());
  }
  return out;
}

// 𝓛^r evaluated at the centre of a window of length 2r+1.
inline BigInt logconcave_value(std::span<const BigInt> w, int r) {
  detail::require_order(r, kMaxIterate, "logconcave_iter");
  detail::require_arity(w, static_cast<std::size_t>(2 * r + 1), "logconcave_iter");
  std::vector<BigInt> cur(w.begin(), w.end());
  for (int i = 0; i < r; ++i) cur = apply_logconcave(cur);
  return cur.front();
}

// 𝓛^r (Δ^k f) at the window starting at n, i.e. centred at n + r.
inline BigInt logconcave_iter(const SeqCache& cache, const SeqExpr& expr, int r, long n) {
  if (cache.base() != expr.base) throw UsageError("logconcave_iter: cache holds the wrong base");
  detail::require_order(r, kMaxIterate, "logconcave_iter");
  auto w = cache.diff_window(expr.diff_order, n, 2 * r + 1);
  return logconcave_value(w, r);
}

// Dispatch on the inequality kind. The window must have the kind's arity.
inline BigInt operator_value(const IneqKind& kind, std::span<const BigInt> w) {
  using T = IneqKind::Tag;
  switch (kind.tag) {
    case T::Turan2: return turan2_value(w);
    case T::Turan3: return turan3_value(w);
    case T::Laguerre: return laguerre_value(w, kind.param);
    case T::ToeplitzDet: return toeplitz_det(w, kind.param);
    case T::LogConcaveIter: return logconcave_value(w, kind.param);
    case T::InvA: return invariants(w).A;
    case T::InvB: return invariants(w).B;
    case T::InvI: return invariants(w).I;
  }
  throw UsageError("operator_value: unknown kind");
}

// Signs of the Toeplitz determinants D_1..D_max_m for every window start of
// a series, computed together.
//
// Reversing the rows of the Toeplitz matrix gives the Hankel matrix
// H_m(n) = det(a_{n+i+j})_{0<=i,j<m}, so D_m(n) = (-1)^{m(m-1)/2} H_m(n).
// Hankel determinants obey the Desnanot-Jacobi condensation
//   H_m(n) H_{m-2}(n+2) = H_{m-1}(n) H_{m-1}(n+2) - H_{m-1}(n+1)^2,
// which costs O(1) big-integer operations per (m, n). Where the divisor
// H_{m-2}(n+2) vanishes the determinant is recomputed directly.
//
// result[m-1][n] is sign(D_m(n)) for n + 2m - 2 < series.size().
inline std::vector<std::vector<int8_t>> toeplitz_sign_sweep(std::span<const BigInt> series, int max_m) {
  detail::require_order(max_m, kMaxOrder, "toeplitz_sign_sweep");
  const long len = static_cast<long>(series.size());
  std::vector<std::vector<int8_t>> signs(static_cast<std::size_t>(max_m));

  std::vector<BigInt> h_prev2;  // H_{m-2}
  std::vector<BigInt> h_prev(series.begin(), series.end());  // H_{m-1}, starts as H_1
  auto emit = [&](int m, const std::vector<BigInt>& h) {
    const bool flip = ((m * (m - 1) / 2) % 2) == 1;
    auto& out = signs[static_cast<std::size_t>(m - 1)];
    out.resize(h.size());
    for (std::size_t n = 0; n < h.size(); ++n) {
      int s = sgn(h[n]);
      out[n] = static_cast<int8_t>(flip ? -s : s);
    }
  };
  emit(1, h_prev);

  BigInt t;
  for (int m = 2; m <= max_m; ++m) {
    long count = len - (2 * m - 2);
    if (count <= 0) break;
    std::vector<BigInt> h(static_cast<std::size_t>(count));
    for (long n = 0; n < count; ++n) {
      const std::size_t i = static_cast<std::size_t>(n);
      BigInt& out = h[i];
      mpz_mul(out.get_mpz_t(), h_prev[i].get_mpz_t(), h_prev[i + 2].get_mpz_t());
      mpz_submul(out.get_mpz_t(), h_prev[i + 1].get_mpz_t(), h_prev[i + 1].get_mpz_t());
      if (m == 2) continue;  // H_0 = 1
      const BigInt& div = h_prev2[i + 2];
      if (sgn(div) != 0) {
        mpz_divexact(out.get_mpz_t(), out.get_mpz_t(), div.get_mpz_t());
      } else {
        std::vector<BigInt> a(static_cast<std::size_t>(m * m));
        for (int r = 0; r < m; ++r)
          for (int c = 0; c < m; ++c) a[static_cast<std::size_t>(r * m + c)] = series[i + r + c];
        out = bareiss_det(std::move(a), m);
      }
    }
    emit(m, h);
    h_prev2 = std::move(h_prev);
    h_prev = std::move(h);
  }
  return signs;
}

} // namespace parti
