// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "parti/certify.hpp"
#include "parti/thresholds.hpp"

using namespace parti;
using B = BaseSequence;

namespace {

class Stopwatch {
public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

int failed = 0;

bool report(const std::string& id, bool ok, const std::string& what, const std::string& detail = "") {
  std::cout << (ok ? "PASS " : "FAIL ") << "[" << id << "] " << what;
  if (!detail.empty()) std::cout << " -- " << detail;
  std::cout << std::endl;
  if (!ok) ++failed;
  return ok;
}

std::string secs(double s) {
  std::ostringstream os;
  os.precision(3);
  os << s << "s";
  return os.str();
}

class Caches {
public:
  const SeqCache& get(B b, long up_to) {
    auto& c = b == B::Partition ? p_ : pb_;
    if (c.max_n() < up_to) c.extend(up_to);
    return c;
  }

private:
  SeqCache p_{B::Partition}, pb_{B::Overpartition};
};

Caches caches;

// ------------------------------------------------------------------- 1

void oracle_equivalence() {
  Stopwatch w;
  const auto& p = caches.get(B::Partition, 60);
  const auto& pb = caches.get(B::Overpartition, 40);
  long bad = 0;
  for (int n = 0; n <= 60; ++n) bad += p.value(n) != oracle::count_partitions(n);
  for (int n = 0; n <= 40; ++n) bad += pb.value(n) != oracle::count_overpartitions(n);
  double t = w.seconds();
  report("1", bad == 0 && t < 60, "p(n), n<=60 and pbar(n), n<=40 match exhaustive enumeration",
         std::to_string(bad) + " differences, " + secs(t));
}

// ------------------------------------------------------------------- 2

constexpr long kNmax = kDefaultNmax;
constexpr long kMargin = kDefaultMargin;

std::optional<long> threshold_of(B base, int k, IneqKind kind) {
  ThresholdQuery q{SeqExpr(base, k), kind, 0, kNmax, kMargin};
  auto r = find_threshold(caches.get(base, q.base_reach()), q);
  if (r.status != ThresholdStatus::Found) return std::nullopt;
  return r.threshold;
}

void theorem_thresholds() {
  Stopwatch w;
  caches.get(B::Partition, kNmax + 40);
  caches.get(B::Overpartition, kNmax + 40);
  struct Case {
    std::string label;
    B base;
    IneqKind kind;
    long offset;  // reported index = window start + offset
    long expected;
  };
  const long t3 = table_index_offset(true, false, 1, 0);
  const std::vector<Case> cases{
      {"Turan dp", B::Partition, IneqKind::turan2(), 0, 70},
      {"Turan dpbar", B::Overpartition, IneqKind::turan2(), 0, 7},
      {"Laguerre-2 dp", B::Partition, IneqKind::laguerre(2), 0, 301},
      {"Laguerre-2 dpbar", B::Overpartition, IneqKind::laguerre(2), 0, 50},
      {"Det-3 dp", B::Partition, IneqKind::toeplitz(3), 0, 345},
      {"Det-3 dpbar", B::Overpartition, IneqKind::toeplitz(3), 0, 62},
      {"third-order Turan dp (centre)", B::Partition, IneqKind::turan3(), t3, 174},
      {"third-order Turan dpbar (centre)", B::Overpartition, IneqKind::turan3(), t3, 33},
      {"I>0 dp", B::Partition, IneqKind::inv_i(), 0, 329},
      {"I>0 dpbar", B::Overpartition, IneqKind::inv_i(), 0, 64},
  };
  bool all = true;
  std::string detail;
  for (const auto& c : cases) {
    auto t = threshold_of(c.base, 1, c.kind);
    bool ok = t && *t + c.offset == c.expected;
    all = all && ok;
    detail += c.label + "=" + (t ? std::to_string(*t + c.offset) : "none") + (ok ? "" : "(expected " + std::to_string(c.expected) + ")") + "; ";
  }
  double s = w.seconds();
  report("2", all && s < 600, "theorem thresholds at nmax=60000, margin 1000", detail + secs(s));
}

// ------------------------------------------------------------------- 3

const TableCell* find_cell(const TableComparison& t, int k, const std::string& col) {
  for (const auto& c : t.cells)
    if (c.k == k && c.column == col) return &c;
  return nullptr;
}

void table_reproduction() {
  Stopwatch w;
  std::map<TableId, TableComparison> tables;
  for (TableId id : {TableId::Lp, TableId::Lpbar, TableId::Dp, TableId::Dpbar, TableId::TI}) {
    const long reach = table_reach(id, {}, kNmax);
    tables[id] = reproduce_table(
        id, [&](B b) -> const SeqCache& { return caches.get(b, reach); }, {}, kNmax, kMargin);
  }
  double s = w.seconds();

  // Every cell: agreement, or a flagged mismatch carrying its computed value.
  std::size_t cells = 0, exact = 0, shifted = 0, differs = 0;
  bool every_cell_reported = true;
  for (const auto& [id, t] : tables) {
    std::string csv = table_to_csv(t);
    for (const auto& c : t.cells) {
      ++cells;
      if (c.match == CellMatch::Exact) ++exact;
      if (c.match == CellMatch::Shifted) ++shifted;
      if (c.match == CellMatch::Differs) {
        ++differs;
        std::string line = std::to_string(c.k) + "," + c.column + "," + computed_text(c.report) + "," +
                           (c.reference ? std::to_string(*c.reference) : "x") + ",no\n";
        every_cell_reported = every_cell_reported && csv.find(line) != std::string::npos;
      }
    }
  }
  report("3a", every_cell_reported && cells == 4 * 55 + 20,
         "every table cell matches or is emitted as a flagged mismatch with its computed value",
         std::to_string(cells) + " cells: " + std::to_string(exact) + " exact, " + std::to_string(shifted) +
             " agree after index translation, " + std::to_string(differs) + " flagged; " + secs(s));

  // Suspected transcription errors resolved with computed values.
  const auto& lp = tables[TableId::Lp];
  const auto* c34 = find_cell(lp, 3, "4");
  const auto* c45 = find_cell(lp, 4, "5");
  bool typos = c34 && c45 && c34->report.threshold && c45->report.threshold && !c34->agrees() && !c45->agrees() &&
               audit_note(lp, *c34) == "printed value repeats cell (2,4)" &&
               audit_note(lp, *c45) == "printed value repeats cell (1,5)";
  report("3b", typos, "suspected typos L_p(3,4), L_p(4,5) flagged with computed values",
         typos ? "L_p(3,4)=" + computed_text(c34->report) + " vs printed 1767, L_p(4,5)=" +
                     computed_text(c45->report) + " vs printed 2346"
               : "");

  // The marked cells (3,1), (5,1) of both determinant tables: finding reported.
  std::string found;
  bool reported = true;
  for (TableId id : {TableId::Dp, TableId::Dpbar})
    for (int k : {3, 5}) {
      const auto* c = find_cell(tables[id], k, "1");
      reported = reported && c && !c->reference;
      if (c) found += std::string(table_name(id)) + "(" + std::to_string(k) + ",1)=" + computed_text(c->report) + " ";
    }
  report("3c", reported, "marked cells (3,1), (5,1) of the determinant tables reported with computed finding", found);

  // Marked cells with odd m >= 3, k in {3,5}, expected to show no threshold.
  std::size_t total = 0, none = 0;
  std::string sample;
  for (TableId id : {TableId::Dp, TableId::Dpbar})
    for (int k : {3, 5})
      for (int m = 3; m <= 11; m += 2) {
        const auto* c = find_cell(tables[id], k, std::to_string(m));
        ++total;
        if (c && c->report.status == ThresholdStatus::NoThresholdUpToNmax) ++none;
        if (c && m == 3) sample += std::string(table_name(id)) + "(" + std::to_string(k) + ",3)=" + computed_text(c->report) + " ";
      }
  report("3d", none == total, "marked cells with odd m>=3, k in {3,5} reproduce as NoThresholdUpToNmax",
         std::to_string(none) + "/" + std::to_string(total) + " show no threshold; all have finite thresholds, e.g. " +
             sample);

  // The flagged set is exactly the documented one.
  std::set<std::string> expected{"Lp(3,4)", "Lp(4,5)", "Dp(4,5)", "Dpbar(1,1)", "Lpbar(1,9)", "Lpbar(2,8)", "Lpbar(2,11)", "Lpbar(3,6)"};
  for (const char* t : {"Dp", "Dpbar"})
    for (int k : {3, 5})
      for (int m = 1; m <= 11; m += 2) expected.insert(std::string(t) + "(" + std::to_string(k) + "," + std::to_string(m) + ")");
  std::set<std::string> flagged;
  for (const auto& [id, t] : tables)
    for (const auto& c : t.cells)
      if (!c.agrees()) flagged.insert(std::string(table_name(id)) + "(" + std::to_string(c.k) + "," + c.column + ")");
  std::string diff;
  for (const auto& f : flagged)
    if (!expected.count(f)) diff += "+" + f + " ";
  for (const auto& e : expected)
    if (!flagged.count(e)) diff += "-" + e + " ";
  report("3e", diff.empty() && s < 1800, "flagged set equals the documented mismatch set",
         std::to_string(flagged.size()) + " flagged" + (diff.empty() ? "" : ": " + diff));
}

// ------------------------------------------------------------------- 4

void lemma_ranges() {
  Stopwatch w;
  long a = n_of_l(B::Partition, 6), b = n_of_l(B::Partition, 8), c = n_of_l(B::Partition, 12);
  double s = w.seconds();
  report("4", a == 391 && b == 789 && c == 2120 && s < 60, "interval-certified N(l) for l = 6, 8, 12",
         std::to_string(a) + ", " + std::to_string(b) + ", " + std::to_string(c) + "; " + secs(s));
}

// ------------------------------------------------------------------- 5

BigInt factor(unsigned e2, unsigned e3, long rest) {
  BigInt a, b;
  mpz_ui_pow_ui(a.get_mpz_t(), 2, e2);
  mpz_ui_pow_ui(b.get_mpz_t(), 3, e3);
  return a * b * rest;
}

PiPoly pi_poly(const BigInt& c, std::initializer_list<std::pair<int, long>> coeffs) {
  PiPoly p;
  for (auto [e, v] : coeffs) p.add_term(e, Rat(c * v));
  return p;
}

void literal_fidelity() {
  Stopwatch w;
  auto a = assemble_numerator(make_spec(find_preset("turan-p"), CertMode::Literal));
  bool scale = a.scale_const == factor(18, 37, 5) && a.scale_y == 27;
  bool degree = a.degree() == 66;
  bool a66 = a.numerator.coeff(66) == pi_poly(factor(18, 33, 5), {{6, -6}, {8, 1}});
  bool a65 = a.numerator.coeff(65) ==
             pi_poly(-factor(14, 29, 5), {{0, 1259712}, {6, -15552}, {8, 11988}, {10, 432}, {12, 13}});
  bool a64 = a.numerator.coeff(64) ==
             pi_poly(factor(15, 29, 5), {{0, 629856}, {2, 209952}, {6, -7776}, {8, 62856}, {10, -2133}, {12, 55}});
  auto ts = two_step_dominance(a.numerator, kDefaultDigits, 100);
  bool consts = std::fabs(ts.c1 - 7.68) <= 0.01 && std::fabs(ts.c2 - 126.22) <= 0.01 && ts.y0;
  long n = ts.y0 ? y_to_n(*ts.y0, B::Partition, 1) : -1;
  std::ostringstream d;
  d << "scale " << (scale ? "ok" : "differs") << ", degree " << a.degree() << ", a64 " << (a64 ? "ok" : "differs")
    << ", a65 " << (a65 ? "ok" : "differs") << ", a66 " << (a66 ? "ok" : "differs") << ", two-step " << ts.c1 << "/"
    << ts.c2 << ", n=" << n;
  report("5a", scale && degree && a64 && a65 && a66 && consts && n == 2421,
         "literal Turan/p numerator, scale, leading coefficients, dominance constants", d.str());

  struct Deg {
    const char* preset;
    int expected;
  };
  std::string dd;
  bool ok = true;
  for (auto [name, expected] : {Deg{"turan-pbar", 39}, Deg{"lag2-p", 68}, Deg{"det3-p", 150}, Deg{"det3-pbar", 150}}) {
    auto x = assemble_numerator(make_spec(find_preset(name), CertMode::Literal));
    int got = x.lower_bound.top_exponent();
    ok = ok && got == expected;
    dd += std::string(name) + "=" + std::to_string(got) + " ";
  }
  double s = w.seconds();
  report("5b", ok && s < 300, "literal degrees 39, 68, 150", dd + secs(s));
}

// ------------------------------------------------------------------- 6

void sound_certificates() {
  Stopwatch w;
  CacheProvider provider = [](B b, long up_to) -> const SeqCache& { return caches.get(b, up_to); };
  bool all = true, literal_all = true;
  std::string detail, literal_detail;
  for (const auto& p : theorem_presets()) {
    auto lit = certify_theorem(make_spec(p, CertMode::Literal), provider, p.threshold);
    bool lok = lit.n0 == p.printed_n0 && lit.closed;
    literal_all = literal_all && lok;
    literal_detail += std::string(p.name) + "=" + std::to_string(lit.n0) + " ";

    auto r = certify_theorem(make_spec(p, CertMode::Sound), provider, p.threshold);
    // Independent rescan of [threshold, max(n0, N(l))] in window indexing.
    const long offset = r.spec.window_offset();
    ThresholdQuery q{SeqExpr(p.base, 1), p.kind, r.theorem_threshold + offset, std::max(r.n0, r.n_of_l) + offset, 1};
    auto rescan = verify_range(caches.get(p.base, q.base_reach()), q);
    bool ok = r.closed && r.theorem_threshold == p.threshold && rescan.failures.empty() && r.n0 <= 10 * lit.n0;
    all = all && ok;
    detail += std::string(p.name) + ": n0=" + std::to_string(r.n0) + " threshold=" + std::to_string(r.theorem_threshold) +
              (ok ? "" : " (FAILED)") + "; ";
  }
  double s = w.seconds();
  report("6a", all && s < 1800, "sound certificates close all six theorems, n0 within 10x of literal", detail + secs(s));
  report("6b", literal_all, "literal pipeline reproduces n0 = 2421, 1641, 4277, 2868, 45284, 22275", literal_detail);
}

// ------------------------------------------------------------------- 7

void property_suites() {
  Stopwatch w;
  std::mt19937_64 rng(2024);
  long cases = 0, bad = 0;
  auto expect = [&](bool ok) {
    ++cases;
    bad += !ok;
  };

  for (int i = 0; i < 1000; ++i) {
    auto w5 = oracle::random_window(rng, 5);
    auto inv = invariants(w5);
    BigInt a = laguerre_value(w5, 2), b = oracle::toeplitz_cofactor(w5, 3);
    expect(inv.A == a);
    expect(inv.B == b);
    expect(inv.I == BigInt(a * a * a - 27 * b * b));
    auto w3 = oracle::random_window(rng, 3);
    expect(toeplitz_det(w3, 2) == laguerre_value(w3, 1));
  }

  std::uniform_int_distribution<long> ld(-30, 30);
  for (int i = 0; i < 1000; ++i) {
    auto w5 = oracle::random_window(rng, 5, -1000, 1000);
    BigInt lam = ld(rng);
    std::vector<BigInt> s(w5);
    for (auto& x : s) x *= lam;
    auto pw = [&](unsigned e) {
      BigInt r;
      mpz_pow_ui(r.get_mpz_t(), lam.get_mpz_t(), e);
      return r;
    };
    expect(invariants(s).A == BigInt(pw(2) * invariants(w5).A));
    expect(invariants(s).B == BigInt(pw(3) * invariants(w5).B));
    expect(invariants(s).I == BigInt(pw(6) * invariants(w5).I));
    std::vector<BigInt> s4(s.begin(), s.begin() + 4), w4(w5.begin(), w5.begin() + 4);
    expect(turan3_value(s4) == BigInt(pw(4) * turan3_value(w4)));
  }

  const auto& p = caches.get(B::Partition, 700);
  std::vector<mpz_class> f(p.values().begin(), p.values().begin() + 701);
  std::uniform_int_distribution<int> kd(0, 6);
  std::uniform_int_distribution<long> nd(0, 600);
  for (int i = 0; i < 1000; ++i) {
    int k = kd(rng);
    long n = nd(rng);
    expect(p.diff_value(k, n) == oracle::delta(f, k, n));
  }

  std::uniform_int_distribution<long> den(1, 1000);
  std::uniform_int_distribution<int> half(0, 5);
  for (int i = 0; i < 10000; ++i) {
    long d = den(rng);
    std::uniform_int_distribution<long> num(-10 * d, -1);
    Rat t = make_rat(num(rng), d);
    int h = half(rng);
    auto [lo, hi] = oracle::exp_reference(t);
    expect(eval_poly(exp_partial_sum(2 * h + 1), t) <= hi && eval_poly(exp_partial_sum(2 * h + 2), t) >= lo);
    if (i % 10 == 0) {
      auto e = exp_interval(t, 100);
      expect(e.lo() <= hi && lo <= e.hi());
    }
  }

  for (int i = 0; i < 1000; ++i) {
    Rat a = oracle::random_rat(rng, -1000, 1000, 97), b = oracle::random_rat(rng, -1000, 1000, 97);
    Rat c = oracle::random_rat(rng, -1000, 1000, 89), d = oracle::random_rat(rng, -1000, 1000, 89);
    RatInterval x(std::min(a, b), std::max(a, b)), y(std::min(c, d), std::max(c, d));
    Rat px = x.mid(), py = y.lo();
    expect((x + y).contains(Rat(px + py)) && (x - y).contains(Rat(px - py)) && (x * y).rounded(16).contains(Rat(px * py)));
  }

  PiPowers pw(60);
  for (B b : {B::Partition, B::Overpartition})
    for (int j : {-2, -1, 1, 2})
      for (int depth : {4, 8}) {
        auto e = sqrt_enclosure(b, j, depth, CertMode::Sound, Rat(10));
        if (!e.verified_from) {
          expect(false);
          continue;
        }
        for (int i = 0; i < 100; ++i) {
          Rat y = *e.verified_from + make_rat(i * i, 3);
          RatInterval target = sqrt_interval(RatInterval(y * y) + RatInterval(mu_step(b) * j) * pw[2], pw.bits());
          expect(e.lo.evaluate(RatInterval(y), pw).hi() < target.lo() && e.hi.evaluate(RatInterval(y), pw).lo() > target.hi());
        }
      }

  double s = w.seconds();
  report("7", bad == 0 && s < 60, "property suites (identities, homogeneity, differences, exp parity, intervals, sqrt)",
         std::to_string(cases) + " cases, " + std::to_string(bad) + " failures, " + secs(s));
}

} // namespace

int main() {
  try {
    oracle_equivalence();
    theorem_thresholds();
    table_reproduction();
    lemma_ranges();
    literal_fidelity();
    sound_certificates();
    property_suites();
  } catch (const std::exception& e) {
    std::cout << "FAIL [run] aborted: " << e.what() << std::endl;
    return 1;
  }
  std::cout << (failed ? "FAILED " + std::to_string(failed) + " criteria line(s)" : std::string("ALL PASS")) << std::endl;
  return failed ? 1 : 0;
}
