#pragma once

// Integer forms in shifted base values: Σ c · Π f(n + i). An inequality on
// Δ^k f is expanded into such a form before the asymptotic bounds for f are
// substituted.

#include <algorithm>
#include <map>
#include <numeric>
#include <span>
#include <vector>

#include "parti/errors.hpp"
#include "parti/operators.hpp"
#include "parti/sequences.hpp"

namespace parti {

struct ShiftTerm {
  BigInt coeff;
  std::vector<int> shifts;  // sorted multiset

  friend bool operator==(const ShiftTerm&, const ShiftTerm&) = default;
};

class ShiftForm {
public:
  ShiftForm() = default;

  // Sorts each multiset, merges equal monomials and drops zero terms. All
  // monomials must share one degree.
  explicit ShiftForm(std::vector<ShiftTerm> raw) {
    std::map<std::vector<int>, BigInt> merged;
    for (auto& t : raw) {
      std::sort(t.shifts.begin(), t.shifts.end());
      merged[t.shifts] += t.coeff;
    }
    for (auto& [sh, c] : merged)
      if (c != 0) terms_.push_back({c, sh});
    if (terms_.empty()) throw DomainError("form is identically zero");
    for (const auto& t : terms_)
      if (t.shifts.size() != terms_.front().shifts.size()) throw DomainError("form is not homogeneous");
  }

  const std::vector<ShiftTerm>& terms() const { return terms_; }
  int degree() const { return static_cast<int>(terms_.front().shifts.size()); }
  int min_shift() const {
    int m = terms_.front().shifts.front();
    for (const auto& t : terms_) m = std::min(m, t.shifts.front());
    return m;
  }
  int max_shift() const {
    int m = terms_.front().shifts.back();
    for (const auto& t : terms_) m = std::max(m, t.shifts.back());
    return m;
  }
  std::vector<int> shifts() const {
    std::vector<int> all;
    for (const auto& t : terms_) all.insert(all.end(), t.shifts.begin(), t.shifts.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    return all;
  }
  // Largest multiplicity of shift i in any monomial.
  int max_multiplicity(int i) const {
    int m = 0;
    for (const auto& t : terms_) m = std::max(m, static_cast<int>(std::count(t.shifts.begin(), t.shifts.end(), i)));
    return m;
  }

  ShiftForm shifted(int d) const {
    ShiftForm r = *this;
    for (auto& t : r.terms_)
      for (auto& s : t.shifts) s += d;
    return r;
  }

  // Σ c Π f(n+i) over cached base values.
  BigInt evaluate(const SeqCache& cache, long n) const {
    BigInt acc = 0;
    for (const auto& t : terms_) {
      BigInt prod = t.coeff;
      for (int s : t.shifts) prod *= cache.value(n + s);
      acc += prod;
    }
    return acc;
  }

  friend bool operator==(const ShiftForm&, const ShiftForm&) = default;

private:
  std::vector<ShiftTerm> terms_;
};

// The operator as a form in the window entries a_0 .. a_{arity-1}.
inline std::vector<ShiftTerm> window_form(const IneqKind& kind) {
  using T = IneqKind::Tag;
  std::vector<ShiftTerm> out;
  switch (kind.tag) {
    case T::Turan2:
      out.push_back({1, {1, 1}});
      out.push_back({-1, {0, 2}});
      return out;
    case T::Laguerre: {
      const int m = kind.param;
      for (int k = 0; k < m; ++k) {
        BigInt c = binomial(2 * m, k);
        if ((k + m) % 2) c = -c;
        out.push_back({c, {k, 2 * m - k}});
      }
      BigInt mid = binomial(2 * m, m) / 2;
      out.push_back({mid, {m, m}});
      return out;
    }
    case T::ToeplitzDet: {
      const int m = kind.param;
      std::vector<int> perm(static_cast<std::size_t>(m));
      std::iota(perm.begin(), perm.end(), 0);
      do {
        int inversions = 0;
        for (int i = 0; i < m; ++i)
          for (int j = i + 1; j < m; ++j)
            if (perm[static_cast<std::size_t>(i)] > perm[static_cast<std::size_t>(j)]) ++inversions;
        ShiftTerm t{inversions % 2 ? -1 : 1, {}};
        for (int i = 0; i < m; ++i) t.shifts.push_back(m - 1 - i + perm[static_cast<std::size_t>(i)]);
        out.push_back(std::move(t));
      } while (std::next_permutation(perm.begin(), perm.end()));
      return out;
    }
    default:
      throw UsageError("no form expansion for inequality " + kind.name());
  }
}

// Window start minus form index. Turán forms are centred on a_n.
inline long form_window_offset(const IneqKind& kind) { return kind.tag == IneqKind::Tag::Turan2 ? -1 : 0; }

// Expand the inequality on Δ^k f into a form in f(n+i). Turán forms are
// recentred so that index 0 is the middle window entry.
inline ShiftForm expand_difference_form(const IneqKind& kind, int k) {
  if (k < 0 || k > kMaxDiffOrder) throw UsageError("difference order must lie in 0.." + std::to_string(kMaxDiffOrder));
  std::vector<BigInt> delta(static_cast<std::size_t>(k) + 1);  // Δ^k f(n) = Σ delta[j] f(n+j)
  for (int j = 0; j <= k; ++j) delta[static_cast<std::size_t>(j)] = (k - j) % 2 ? -binomial(k, j) : binomial(k, j);

  std::vector<ShiftTerm> expanded;
  for (const auto& wt : window_form(kind)) {
    std::vector<ShiftTerm> partial{{wt.coeff, {}}};
    for (int w : wt.shifts) {
      std::vector<ShiftTerm> next;
      next.reserve(partial.size() * delta.size());
      for (const auto& p : partial)
        for (int j = 0; j <= k; ++j) {
          ShiftTerm t = p;
          t.coeff *= delta[static_cast<std::size_t>(j)];
          t.shifts.push_back(w + j);
          next.push_back(std::move(t));
        }
      partial = std::move(next);
    }
    expanded.insert(expanded.end(), partial.begin(), partial.end());
  }
  return ShiftForm(std::move(expanded)).shifted(static_cast<int>(form_window_offset(kind)));
}

} // namespace parti
