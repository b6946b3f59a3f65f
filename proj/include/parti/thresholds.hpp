#pragma once

// Range scans, empirical thresholds and reproduction of the conjectured
// threshold tables.

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "parti/errors.hpp"
#include "parti/operators.hpp"
#include "parti/sequences.hpp"

namespace parti {

using ojson = nlohmann::ordered_json;

inline constexpr long kDefaultNmax = 60000;
inline constexpr long kDefaultMargin = 1000;

struct ThresholdQuery {
  SeqExpr expr;
  IneqKind kind;
  long n_min = 0;
  long n_max = kDefaultNmax;
  long margin = kDefaultMargin;

  void validate() const {
    if (n_min < 0) throw UsageError("threshold query: n_min must be >= 0");
    if (n_min > n_max) throw UsageError("threshold query: n_min must not exceed n_max");
    if (margin < 1) throw UsageError("threshold query: margin must be >= 1");
  }

  // Largest base index touched by the scan.
  long base_reach() const { return n_max + kind.arity() - 1 + expr.diff_order; }
};

enum class ThresholdStatus { Found, NoThresholdUpToNmax, InsufficientMargin };

inline std::string_view status_name(ThresholdStatus s) {
  switch (s) {
    case ThresholdStatus::Found: return "Found";
    case ThresholdStatus::NoThresholdUpToNmax: return "NoThresholdUpToNmax";
    case ThresholdStatus::InsufficientMargin: return "InsufficientMargin";
  }
  return "?";
}

struct ThresholdReport {
  ThresholdQuery query;
  std::vector<long> failures;  // ascending
  std::optional<long> threshold;
  long verified_up_to = 0;
  ThresholdStatus status = ThresholdStatus::Found;
};

struct PredicateValue {
  BigInt value;
  bool holds = false;
};

inline void require_cache(const SeqCache& cache, const SeqExpr& expr) {
  if (cache.base() != expr.base) throw UsageError("cache holds " + std::string(base_tag(cache.base())) +
                                                  " but the expression needs " +
                                                  std::string(base_tag(expr.base)));
}

// Operator value on the window of Δ^k f whose lowest index is n.
inline PredicateValue evaluate_predicate(const SeqCache& cache, const SeqExpr& expr, const IneqKind& kind,
                                         long n) {
  require_cache(cache, expr);
  auto w = cache.diff_window(expr.diff_order, n, kind.arity());
  PredicateValue r;
  r.value = operator_value(kind, w);
  r.holds = kind.holds(r.value);
  return r;
}

// Signs of the operator over every window start of a series that fits.
inline std::vector<int8_t> series_signs(std::span<const BigInt> series, const IneqKind& kind) {
  using T = IneqKind::Tag;
  const long arity = kind.arity();
  const long count = static_cast<long>(series.size()) - arity + 1;
  if (count <= 0) return {};
  if (kind.tag == T::ToeplitzDet) {
    auto all = toeplitz_sign_sweep(series, kind.param);
    return std::move(all[static_cast<std::size_t>(kind.param - 1)]);
  }
  std::vector<int8_t> out(static_cast<std::size_t>(count));
  if (kind.tag == T::LogConcaveIter) {
    std::vector<BigInt> cur(series.begin(), series.end());
    for (int i = 0; i < kind.param; ++i) cur = apply_logconcave(cur);
    for (long n = 0; n < count; ++n) out[static_cast<std::size_t>(n)] = static_cast<int8_t>(sgn(cur[static_cast<std::size_t>(n)]));
    return out;
  }
  for (long n = 0; n < count; ++n) {
    BigInt v = operator_value(kind, series.subspan(static_cast<std::size_t>(n), static_cast<std::size_t>(arity)));
    out[static_cast<std::size_t>(n)] = static_cast<int8_t>(sgn(v));
  }
  return out;
}

inline unsigned worker_count() {
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

// Signs of the predicate's operator value for n in [n_min, n_max]. The range
// is split into disjoint chunks evaluated concurrently; each worker only
// reads the (immutable) cache.
inline std::vector<int8_t> predicate_signs(const SeqCache& cache, const SeqExpr& expr, const IneqKind& kind,
                                           long n_min, long n_max) {
  require_cache(cache, expr);
  if (n_min < 0 || n_min > n_max) throw UsageError("predicate_signs: bad range");
  const long reach = n_max + kind.arity() - 1 + expr.diff_order;
  if (reach > cache.max_n())
    throw CoverageError("scan needs base values up to " + std::to_string(reach) + " but cache max_n=" +
                        std::to_string(cache.max_n()) + "; extend the cache first");
  const long total = n_max - n_min + 1;
  const long arity = kind.arity();
  const unsigned workers = static_cast<unsigned>(std::min<long>(worker_count(), std::max<long>(1, total / 2000)));
  std::vector<int8_t> out(static_cast<std::size_t>(total));
  auto run_chunk = [&](long lo, long hi) {  // [lo, hi]
    auto series = cache.diff_window(expr.diff_order, lo, hi - lo + arity);
    auto s = series_signs(series, kind);
    std::copy(s.begin(), s.begin() + (hi - lo + 1), out.begin() + (lo - n_min));
  };
  if (workers <= 1) {
    run_chunk(n_min, n_max);
    return out;
  }
  std::vector<std::thread> pool;
  const long step = (total + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    long lo = n_min + static_cast<long>(w) * step;
    long hi = std::min(n_max, lo + step - 1);
    if (lo > hi) break;
    pool.emplace_back(run_chunk, lo, hi);
  }
  for (auto& t : pool) t.join();
  return out;
}

inline bool sign_holds(int8_t s, bool strict) { return strict ? s > 0 : s >= 0; }

// Turn a failure list into a report. A threshold is only claimed when it
// leaves at least `margin` verified indices below n_max. Repeated failures
// inside the top margin mean there is no threshold up to n_max; a single
// late failure means a candidate exists but the margin is too thin.
inline ThresholdReport classify(const ThresholdQuery& q, std::vector<long> failures) {
  ThresholdReport r;
  r.query = q;
  r.verified_up_to = q.n_max;
  const long candidate = failures.empty() ? q.n_min : failures.back() + 1;
  if (q.n_max - candidate >= q.margin) {
    r.status = ThresholdStatus::Found;
    r.threshold = candidate;
  } else {
    long late = std::count_if(failures.begin(), failures.end(), [&](long n) { return n > q.n_max - q.margin; });
    if (late >= 2) {
      r.status = ThresholdStatus::NoThresholdUpToNmax;
    } else {
      r.status = ThresholdStatus::InsufficientMargin;
      r.threshold = candidate;
    }
  }
  r.failures = std::move(failures);
  return r;
}

inline std::vector<long> failures_from_signs(std::span<const int8_t> signs, long n_min, bool strict) {
  std::vector<long> f;
  for (std::size_t i = 0; i < signs.size(); ++i)
    if (!sign_holds(signs[i], strict)) f.push_back(n_min + static_cast<long>(i));
  return f;
}

// Every n in [n_min, n_max] where the predicate fails.
inline ThresholdReport verify_range(const SeqCache& cache, const ThresholdQuery& q) {
  q.validate();
  auto signs = predicate_signs(cache, q.expr, q.kind, q.n_min, q.n_max);
  return classify(q, failures_from_signs(signs, q.n_min, q.kind.strict));
}

// Least N with the predicate holding on [N, n_max] (and failing at N-1),
// subject to the margin rule.
inline ThresholdReport find_threshold(const SeqCache& cache, const ThresholdQuery& q) {
  return verify_range(cache, q);
}

inline ojson query_to_json(const ThresholdQuery& q) {
  ojson j;
  j["base"] = std::string(base_tag(q.expr.base));
  j["diff"] = q.expr.diff_order;
  j["ineq"] = q.kind.name();
  j["strict"] = q.kind.strict;
  j["n_min"] = q.n_min;
  j["n_max"] = q.n_max;
  j["margin"] = q.margin;
  j["index_convention"] = "window-start";
  return j;
}

inline ojson report_to_json(const ThresholdReport& r) {
  ojson j;
  j["query"] = query_to_json(r.query);
  j["failures"] = r.failures;
  j["threshold"] = r.threshold ? ojson(*r.threshold) : ojson(nullptr);
  j["status"] = std::string(status_name(r.status));
  j["verified_up_to"] = r.verified_up_to;
  return j;
}

// ---------------------------------------------------------------------------
// Reference tables (0 marks a cell where no threshold is claimed).

enum class TableId { Lp, Lpbar, Dp, Dpbar, TI };

inline TableId parse_table(std::string_view s) {
  if (s == "Lp") return TableId::Lp;
  if (s == "Lpbar") return TableId::Lpbar;
  if (s == "Dp") return TableId::Dp;
  if (s == "Dpbar") return TableId::Dpbar;
  if (s == "TI") return TableId::TI;
  throw UsageError("unknown table '" + std::string(s) + "' (expected Lp, Lpbar, Dp, Dpbar or TI)");
}

inline std::string_view table_name(TableId t) {
  switch (t) {
    case TableId::Lp: return "Lp";
    case TableId::Lpbar: return "Lpbar";
    case TableId::Dp: return "Dp";
    case TableId::Dpbar: return "Dpbar";
    case TableId::TI: return "TI";
  }
  return "?";
}

using Grid = std::array<std::array<long, 11>, 5>;  // [k-1][m-1]

namespace reference {

inline constexpr Grid kLp = {{
    {70, 301, 738, 1413, 2346, 3557, 5062, 6873, 9006, 11467, 14270},
    {138, 451, 986, 1767, 2816, 4151, 5786, 7733, 10006, 12613, 15566},
    {234, 637, 1272, 1767, 3334, 4795, 6562, 8649, 11064, 13819, 16922},
    {362, 859, 1602, 2609, 2346, 5491, 7394, 9619, 12180, 15083, 18340},
    {522, 1121, 1974, 3101, 4518, 6241, 8280, 10649, 13356, 16411, 19822},
}};

inline constexpr Grid kLpbar = {{
    {7, 50, 142, 294, 509, 799, 1167, 1616, 2146, 2778, 3497},
    {21, 89, 208, 390, 641, 967, 1371, 1859, 2440, 3111, 3785},
    {45, 131, 277, 489, 773, 1126, 1575, 2105, 2722, 3435, 4241},
    {69, 179, 352, 588, 908, 1300, 1779, 2345, 3001, 3753, 4601},
    {98, 232, 429, 698, 1045, 1473, 1985, 2587, 3282, 4073, 4963},
}};

inline constexpr Grid kDp = {{
    {1, 69, 345, 879, 1709, 2857, 4347, 6197, 8419, 11029, 14039},
    {7, 137, 503, 1145, 2091, 3369, 4995, 6987, 9359, 12123, 15293},
    {0, 233, 0, 1451, 0, 3929, 0, 7831, 0, 13275, 0},
    {67, 361, 929, 1797, 2997, 4537, 6443, 8729, 11405, 14485, 17979},
    {0, 521, 0, 2189, 0, 5197, 0, 9683, 0, 15755, 0},
}};

inline constexpr Grid kDpbar = {{
    {1, 6, 62, 185, 389, 674, 1055, 1535, 2120, 2813, 3620},
    {1, 20, 104, 257, 494, 821, 1241, 1766, 2396, 3134, 3992},
    {0, 44, 0, 335, 0, 965, 0, 1991, 0, 3449, 0},
    {10, 68, 200, 416, 716, 1115, 1613, 2216, 2930, 3758, 4706},
    {0, 97, 0, 496, 0, 1264, 0, 2440, 0, 4066, 0},
}};

// Rows: T_p, T_pbar, I_p, I_pbar; columns k = 1..5.
inline constexpr std::array<std::array<long, 5>, 4> kTI = {{
    {174, 284, 424, 600, 810},
    {33, 57, 87, 118, 173},
    {329, 483, 675, 903, 1171},
    {64, 98, 143, 194, 255},
}};

inline constexpr std::array<std::string_view, 4> kTIRows = {"Tp", "Tpbar", "Ip", "Ipbar"};

} // namespace reference

// How a computed cell relates to the reference value.
//   Exact   - same index in window-start convention
//   Shifted - same index once translated to the table's own indexing
//   Differs - genuine disagreement
enum class CellMatch { Exact, Shifted, Differs };

inline std::string_view match_name(CellMatch m) {
  switch (m) {
    case CellMatch::Exact: return "yes";
    case CellMatch::Shifted: return "shift";
    case CellMatch::Differs: return "no";
  }
  return "?";
}

struct TableCell {
  int k = 0;
  std::string column;  // m as a number, or the row label for TI
  ThresholdReport report;
  std::optional<long> reference;  // nullopt: no threshold claimed
  long index_offset = 0;      // table index = window start + index_offset
  CellMatch match = CellMatch::Differs;

  bool agrees() const { return match != CellMatch::Differs; }
  std::optional<long> table_index() const {
    if (!report.threshold) return std::nullopt;
    return *report.threshold + index_offset;
  }
};

// The reference tables do not use window-start indexing. Their rows index
// the k-th difference as a_n = Δ^k f(n-k+1); the third-order Turán entry is
// reported at the centre a_n of (a_{n-1}, .., a_{n+2}); and an m x m
// determinant (m >= 2) is reported at n for the matrix (a_{n+2-i+j}), whose
// lowest entry is a_{n+3-m}. Offsets below map a window start onto that
// indexing.
inline long table_index_offset(bool turan3, bool det, int k, int m) {
  long off = k - 1;
  if (turan3) off += 1;
  if (det && m >= 2) off += m - 3;
  return off;
}

struct TableComparison {
  TableId which = TableId::Lp;
  long n_max = kDefaultNmax;
  std::vector<TableCell> cells;

  std::size_t mismatches() const {
    return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const TableCell& c) { return !c.agrees(); }));
  }
};

inline CellMatch cell_match(const ThresholdReport& r, std::optional<long> reference, long offset) {
  if (!reference) return r.status == ThresholdStatus::NoThresholdUpToNmax ? CellMatch::Exact : CellMatch::Differs;
  if (r.status != ThresholdStatus::Found) return CellMatch::Differs;
  if (*r.threshold == *reference) return CellMatch::Exact;
  if (*r.threshold + offset == *reference) return CellMatch::Shifted;
  return CellMatch::Differs;
}

inline std::string computed_text(const ThresholdReport& r) {
  switch (r.status) {
    case ThresholdStatus::Found: return std::to_string(*r.threshold);
    case ThresholdStatus::NoThresholdUpToNmax: return "x";
    case ThresholdStatus::InsufficientMargin: return "?" + std::to_string(*r.threshold);
  }
  return "?";
}

// Failures only matter up to the reported threshold; keep the report small.
inline ThresholdReport trimmed(ThresholdReport r, std::size_t keep = 64) {
  if (r.failures.size() > keep) r.failures.erase(r.failures.begin(), r.failures.end() - static_cast<long>(keep));
  return r;
}

struct TableRange {
  int k_lo = 1, k_hi = 5;
  int m_lo = 1, m_hi = 11;
};

// Recompute every cell of a reference table and compare. `cache_for` must
// return a cache covering n_max + 2*m_hi + k_hi for the requested base.
inline TableComparison reproduce_table(TableId which, const std::function<const SeqCache&(BaseSequence)>& cache_for,
                                       TableRange range = {}, long n_max = kDefaultNmax,
                                       long margin = kDefaultMargin) {
  if (range.k_lo < 1 || range.k_hi > 5 || range.k_lo > range.k_hi) throw UsageError("table: k range must lie in 1..5");
  if (which != TableId::TI && (range.m_lo < 1 || range.m_hi > 11 || range.m_lo > range.m_hi))
    throw UsageError("table: m range must lie in 1..11");
  TableComparison out;
  out.which = which;
  out.n_max = n_max;

  auto add_cell = [&](int k, std::string column, ThresholdQuery q, std::span<const int8_t> signs, long ref_raw) {
    using T = IneqKind::Tag;
    TableCell c;
    c.k = k;
    c.column = std::move(column);
    c.report = trimmed(classify(q, failures_from_signs(signs, q.n_min, q.kind.strict)));
    if (ref_raw > 0) c.reference = ref_raw;
    c.index_offset = table_index_offset(q.kind.tag == T::Turan3, q.kind.tag == T::ToeplitzDet, k, q.kind.param);
    c.match = cell_match(c.report, c.reference, c.index_offset);
    out.cells.push_back(std::move(c));
  };

  if (which == TableId::TI) {
    for (int row = 0; row < 4; ++row) {
      BaseSequence base = (row % 2 == 0) ? BaseSequence::Partition : BaseSequence::Overpartition;
      IneqKind kind = row < 2 ? IneqKind::turan3() : IneqKind::inv_i();
      for (int k = range.k_lo; k <= range.k_hi; ++k) {
        ThresholdQuery q{SeqExpr(base, k), kind, 0, n_max, margin};
        auto signs = predicate_signs(cache_for(base), q.expr, kind, 0, n_max);
        add_cell(k, std::string(reference::kTIRows[static_cast<std::size_t>(row)]), q, signs,
                 reference::kTI[static_cast<std::size_t>(row)][static_cast<std::size_t>(k - 1)]);
      }
    }
    return out;
  }

  const bool is_p = which == TableId::Lp || which == TableId::Dp;
  const bool is_det = which == TableId::Dp || which == TableId::Dpbar;
  const BaseSequence base = is_p ? BaseSequence::Partition : BaseSequence::Overpartition;
  const Grid& grid = which == TableId::Lp     ? reference::kLp
                     : which == TableId::Lpbar ? reference::kLpbar
                     : which == TableId::Dp    ? reference::kDp
                                               : reference::kDpbar;
  const SeqCache& cache = cache_for(base);
  for (int k = range.k_lo; k <= range.k_hi; ++k) {
    const SeqExpr expr(base, k);
    const long row = k - 1;
    if (is_det) {
      // One condensation sweep yields every order at once.
      const long len = n_max + 2 * range.m_hi - 1;
      if (len - 1 + k > cache.max_n()) throw CoverageError("table: cache too short; extend first");
      auto series = cache.diff_window(k, 0, len);
      auto all = toeplitz_sign_sweep(series, range.m_hi);
      for (int m = range.m_lo; m <= range.m_hi; ++m) {
        ThresholdQuery q{expr, IneqKind::toeplitz(m), 0, n_max, margin};
        std::span<const int8_t> s(all[static_cast<std::size_t>(m - 1)].data(), static_cast<std::size_t>(n_max + 1));
        add_cell(k, std::to_string(m), q, s, grid[static_cast<std::size_t>(row)][static_cast<std::size_t>(m - 1)]);
      }
    } else {
      for (int m = range.m_lo; m <= range.m_hi; ++m) {
        ThresholdQuery q{expr, IneqKind::laguerre(m), 0, n_max, margin};
        auto signs = predicate_signs(cache, expr, q.kind, 0, n_max);
        add_cell(k, std::to_string(m), q, signs, grid[static_cast<std::size_t>(row)][static_cast<std::size_t>(m - 1)]);
      }
    }
  }
  return out;
}

// Largest base index a table reproduction touches.
inline long table_reach(TableId which, TableRange range, long n_max) {
  if (which == TableId::TI) return n_max + 4 + range.k_hi;
  return n_max + 2 * range.m_hi + range.k_hi;
}

// Short explanation for a disagreeing cell: a claimed "no threshold" that
// was found after all, or a printed value that repeats another cell of the
// same table (a likely transcription slip).
inline std::string audit_note(const TableComparison& t, const TableCell& c) {
  if (c.agrees()) return "";
  if (!c.reference) return c.report.status == ThresholdStatus::Found ? "no threshold claimed; finite threshold computed" : "";
  for (const auto& o : t.cells)
    if (&o != &c && o.reference == c.reference)
      return "printed value repeats cell (" + std::to_string(o.k) + "," + o.column + ")";
  if (auto ti = c.table_index()) return "differs by " + std::to_string(*ti - *c.reference) + " in table indexing";
  return "";
}

inline std::string table_to_csv(const TableComparison& t) {
  std::ostringstream os;
  // computed: window-start index; match: yes | shift (agrees after index
  // translation) | no
  os << "k,m,computed,reference,match\n";
  for (const auto& c : t.cells)
    os << c.k << ',' << c.column << ',' << computed_text(c.report) << ','
       << (c.reference ? std::to_string(*c.reference) : std::string("x")) << ',' << match_name(c.match) << '\n';
  return os.str();
}

inline ojson table_to_json(const TableComparison& t) {
  ojson j;
  j["table"] = std::string(table_name(t.which));
  j["n_max"] = t.n_max;
  j["mismatches"] = t.mismatches();
  ojson cells = ojson::array();
  for (const auto& c : t.cells) {
    ojson cj;
    cj["k"] = c.k;
    cj["m"] = c.column;
    cj["computed"] = computed_text(c.report);
    cj["reference"] = c.reference ? ojson(*c.reference) : ojson("x");
    cj["match"] = std::string(match_name(c.match));
    cj["status"] = std::string(status_name(c.report.status));
    cj["table_index"] = c.table_index() ? ojson(*c.table_index()) : ojson(nullptr);
    cj["index_offset"] = c.index_offset;
    if (auto note = audit_note(t, c); !note.empty()) cj["note"] = note;
    cells.push_back(std::move(cj));
  }
  j["cells"] = std::move(cells);
  return j;
}

} // namespace parti
