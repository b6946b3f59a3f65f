#include <gtest/gtest.h>

#include "parti/thresholds.hpp"

using namespace parti;

namespace {

using B = BaseSequence;

const SeqCache& cache(B base, long up_to) {
  static SeqCache p(B::Partition), pb(B::Overpartition);
  SeqCache& c = base == B::Partition ? p : pb;
  if (c.max_n() < up_to) c.extend(up_to);
  return c;
}

ThresholdReport scan(B base, int k, IneqKind kind, long n_min, long n_max, long margin = kDefaultMargin) {
  ThresholdQuery q{SeqExpr(base, k), kind, n_min, n_max, margin};
  return verify_range(cache(base, q.base_reach()), q);
}

ThresholdQuery query(long n_min, long n_max, long margin) {
  return {SeqExpr(B::Partition, 1), IneqKind::turan2(), n_min, n_max, margin};
}

} // namespace

TEST(Classify, EmptyFailuresGiveNMin) {
  auto r = classify(query(5, 2000, 1000), {});
  EXPECT_EQ(r.status, ThresholdStatus::Found);
  EXPECT_EQ(r.threshold, 5);
}

TEST(Classify, ThresholdIsOnePastLastFailure) {
  auto r = classify(query(0, 2000, 1000), {3, 8, 999});
  EXPECT_EQ(r.status, ThresholdStatus::Found);
  EXPECT_EQ(r.threshold, 1000);
}

TEST(Classify, RepeatedLateFailuresMeanNoThreshold) {
  auto r = classify(query(0, 2000, 1000), {1500, 1990});
  EXPECT_EQ(r.status, ThresholdStatus::NoThresholdUpToNmax);
  EXPECT_FALSE(r.threshold);
}

TEST(Classify, SingleLateFailureIsInsufficientMargin) {
  auto r = classify(query(0, 2000, 1000), {10, 1500});
  EXPECT_EQ(r.status, ThresholdStatus::InsufficientMargin);
  EXPECT_EQ(r.threshold, 1501);
}

TEST(Classify, QueryValidation) {
  EXPECT_THROW(query(-1, 10, 1).validate(), UsageError);
  EXPECT_THROW(query(11, 10, 1).validate(), UsageError);
  EXPECT_THROW(query(0, 10, 0).validate(), UsageError);
}

TEST(Predicate, SinglePoints) {
  const auto& p = cache(B::Partition, 100);
  EXPECT_TRUE(evaluate_predicate(p, SeqExpr(B::Partition, 1), IneqKind::laguerre(1), 70).holds);
  auto z = evaluate_predicate(p, SeqExpr(B::Partition, 1), IneqKind::toeplitz(1), 0);
  EXPECT_EQ(z.value, 0);
  EXPECT_FALSE(z.holds);
  EXPECT_TRUE(evaluate_predicate(p, SeqExpr(B::Partition, 2), IneqKind::toeplitz(1), 7).holds);
  EXPECT_THROW(evaluate_predicate(p, SeqExpr(B::Overpartition, 1), IneqKind::turan2(), 0), UsageError);
  EXPECT_THROW(evaluate_predicate(p, SeqExpr(B::Partition, 1), IneqKind::turan2(), 99), CoverageError);
}

TEST(Thresholds, TheoremWindowStarts) {
  EXPECT_EQ(scan(B::Partition, 1, IneqKind::laguerre(2), 0, 5000).threshold, 301);
  EXPECT_EQ(scan(B::Overpartition, 1, IneqKind::laguerre(1), 0, 5000).threshold, 7);
  EXPECT_EQ(scan(B::Partition, 1, IneqKind::turan2(), 0, 5000).threshold, 70);
  EXPECT_EQ(scan(B::Overpartition, 1, IneqKind::laguerre(2), 0, 5000).threshold, 50);
  EXPECT_EQ(scan(B::Partition, 1, IneqKind::toeplitz(3), 0, 5000).threshold, 345);
  EXPECT_EQ(scan(B::Overpartition, 1, IneqKind::toeplitz(3), 0, 5000).threshold, 62);
  EXPECT_EQ(scan(B::Partition, 2, IneqKind::toeplitz(1), 0, 5000).threshold, 6);  // table index 7
}

TEST(Thresholds, FiniteRangesBelowSymbolicBounds) {
  EXPECT_TRUE(scan(B::Partition, 1, IneqKind::turan2(), 70, 2420, 1).failures.empty());
  EXPECT_TRUE(scan(B::Overpartition, 1, IneqKind::toeplitz(3), 62, 22274, 1).failures.empty());
}

TEST(Thresholds, OscillatingCellHasLateFailures) {
  auto r = scan(B::Partition, 3, IneqKind::toeplitz(3), 0, 1000);
  EXPECT_EQ(r.status, ThresholdStatus::NoThresholdUpToNmax);
  EXPECT_GT(r.failures.back(), 0);
}

TEST(Thresholds, ThirdDifferenceFailsOnlyAtEvenIndices) {
  auto r = scan(B::Partition, 3, IneqKind::toeplitz(1), 0, 3000);
  ASSERT_EQ(r.status, ThresholdStatus::Found);
  EXPECT_EQ(r.threshold, 23);
  ASSERT_FALSE(r.failures.empty());
  for (long n : r.failures) EXPECT_EQ(n % 2, 0) << n;
}

TEST(Thresholds, FifthDifferenceRecordedEitherWay) {
  auto r = scan(B::Partition, 5, IneqKind::toeplitz(1), 0, 5000);
  EXPECT_EQ(r.status, ThresholdStatus::Found);
  EXPECT_EQ(r.threshold, 129);
}

TEST(Thresholds, CheckAndThresholdAgree) {
  ThresholdQuery q{SeqExpr(B::Overpartition, 2), IneqKind::laguerre(3), 0, 3000, 500};
  const auto& c = cache(B::Overpartition, q.base_reach());
  auto a = verify_range(c, q), b = find_threshold(c, q);
  EXPECT_EQ(a.failures, b.failures);
  EXPECT_EQ(a.threshold, b.threshold);
  EXPECT_EQ(report_to_json(a).dump(), report_to_json(b).dump());
}

TEST(Thresholds, EnlargingRangeKeepsFailures) {
  auto small = scan(B::Partition, 2, IneqKind::turan3(), 0, 800, 1);
  auto large = scan(B::Partition, 2, IneqKind::turan3(), 0, 4000, 1);
  for (long n : small.failures)
    EXPECT_NE(std::find(large.failures.begin(), large.failures.end(), n), large.failures.end()) << n;
}

TEST(Thresholds, ParallelScanMatchesSerialEvaluation) {
  ThresholdQuery q{SeqExpr(B::Partition, 3), IneqKind::inv_i(), 0, 6000, 1};
  const auto& c = cache(B::Partition, q.base_reach());
  auto signs = predicate_signs(c, q.expr, q.kind, 0, q.n_max);
  for (long n = 0; n <= q.n_max; n += 37)
    ASSERT_EQ(signs[static_cast<std::size_t>(n)], sgn(evaluate_predicate(c, q.expr, q.kind, n).value)) << n;
}

TEST(Thresholds, ReportJsonFields) {
  auto r = scan(B::Overpartition, 1, IneqKind::laguerre(1), 0, 2000);
  auto j = report_to_json(r);
  EXPECT_EQ(j["threshold"], 7);
  EXPECT_EQ(j["status"], "Found");
  EXPECT_EQ(j["query"]["ineq"], "laguerre:1");
  EXPECT_EQ(j["query"]["index_convention"], "window-start");
  EXPECT_EQ(j["verified_up_to"], 2000);
}

TEST(Tables, IndexOffsets) {
  EXPECT_EQ(table_index_offset(false, false, 1, 2), 0);
  EXPECT_EQ(table_index_offset(false, false, 3, 2), 2);
  EXPECT_EQ(table_index_offset(true, false, 1, 0), 1);
  EXPECT_EQ(table_index_offset(false, true, 1, 1), 0);
  EXPECT_EQ(table_index_offset(false, true, 1, 3), 0);
  EXPECT_EQ(table_index_offset(false, true, 2, 5), 3);
}

TEST(Tables, CellMatchStates) {
  ThresholdReport found;
  found.status = ThresholdStatus::Found;
  found.threshold = 100;
  EXPECT_EQ(cell_match(found, 100, 2), CellMatch::Exact);
  EXPECT_EQ(cell_match(found, 102, 2), CellMatch::Shifted);
  EXPECT_EQ(cell_match(found, 101, 2), CellMatch::Differs);
  EXPECT_EQ(cell_match(found, std::nullopt, 0), CellMatch::Differs);
  ThresholdReport none;
  none.status = ThresholdStatus::NoThresholdUpToNmax;
  EXPECT_EQ(cell_match(none, std::nullopt, 0), CellMatch::Exact);
  EXPECT_EQ(cell_match(none, 5, 0), CellMatch::Differs);
}

TEST(Tables, LaguerreCellsAndSuspectedTypo) {
  TableRange range{1, 4, 2, 5};
  auto t = reproduce_table(TableId::Lp, [](B b) -> const SeqCache& { return cache(b, table_reach(TableId::Lp, {1, 4, 2, 5}, 5000)); },
                           range, 5000, 1000);
  auto cell = [&](int k, int m) -> const TableCell& {
    for (const auto& c : t.cells)
      if (c.k == k && c.column == std::to_string(m)) return c;
    throw std::runtime_error("cell not found");
  };
  EXPECT_EQ(cell(1, 2).report.threshold, 301);
  EXPECT_EQ(cell(1, 2).match, CellMatch::Exact);
  const auto& typo = cell(4, 5);
  EXPECT_EQ(typo.reference, 2346);
  EXPECT_EQ(typo.report.threshold, 3899);
  EXPECT_EQ(typo.match, CellMatch::Differs);
  EXPECT_EQ(audit_note(t, typo), "printed value repeats cell (1,5)");
  EXPECT_NE(table_to_csv(t).find("4,5,3899,2346,no\n"), std::string::npos);
}

TEST(Tables, DeterminantCellsFromSweep) {
  TableRange range{1, 3, 1, 3};
  auto t = reproduce_table(TableId::Dpbar, [](B b) -> const SeqCache& { return cache(b, table_reach(TableId::Dpbar, {1, 3, 1, 3}, 5000)); },
                           range, 5000, 1000);
  auto j = table_to_json(t);
  EXPECT_EQ(j["table"], "Dpbar");
  for (const auto& c : t.cells) {
    ThresholdQuery q{SeqExpr(B::Overpartition, c.k), IneqKind::toeplitz(std::stoi(c.column)), 0, 5000, 1000};
    auto direct = verify_range(cache(B::Overpartition, q.base_reach()), q);
    EXPECT_EQ(c.report.threshold, direct.threshold) << c.k << "," << c.column;
    if (c.k == 1 && c.column == "3") {
      EXPECT_EQ(c.report.threshold, 62);
      EXPECT_EQ(c.match, CellMatch::Exact);
    }
    if (c.k == 3 && c.column == "2") {
      EXPECT_EQ(c.reference, 44);
    }
    if (c.k == 3 && c.column == "1") {
      EXPECT_FALSE(c.reference);
      EXPECT_EQ(c.report.threshold, 2);
      EXPECT_EQ(audit_note(t, c), "no threshold claimed; finite threshold computed");
    }
  }
}

TEST(Tables, ParseNames) {
  EXPECT_EQ(parse_table("Lpbar"), TableId::Lpbar);
  EXPECT_EQ(table_name(TableId::TI), "TI");
  EXPECT_THROW(parse_table("Tp"), UsageError);
}
