#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "chromoseg/error.hpp"
#include "chromoseg/metrics.hpp"
#include "oracles.hpp"

using namespace chromoseg;
using namespace chromoseg::metrics;

namespace {

LabelMap map2x2(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d) {
  LabelMap m(2, 2);
  m(0, 0) = a;
  m(0, 1) = b;
  m(1, 0) = c;
  m(1, 1) = d;
  return m;
}

}  // namespace

TEST(Confusion, HandCount) {
  const auto gt = map2x2(0, 0, 1, 1);
  const auto pred = map2x2(0, 1, 1, 1);
  const auto cm = confusion_matrix(pred, gt, 4);
  EXPECT_EQ(cm.at(0, 0), 1);
  EXPECT_EQ(cm.at(0, 1), 1);
  EXPECT_EQ(cm.at(1, 1), 2);
  EXPECT_EQ(cm.total(), 4);
  EXPECT_DOUBLE_EQ(pixel_accuracy(cm), 0.75);
  const auto m = per_class_metrics(cm)[0];
  EXPECT_DOUBLE_EQ(m.dice.value, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.iou.value, 0.5);
  EXPECT_DOUBLE_EQ(m.precision.value, 1.0);
  EXPECT_DOUBLE_EQ(m.recall.value, 0.5);
  EXPECT_DOUBLE_EQ(m.fnr.value, 0.5);
  EXPECT_DOUBLE_EQ(m.fpr.value, 0.0);
}

TEST(Confusion, IdentityIsDiagonal) {
  const auto gt = map2x2(0, 3, 2, 1);
  const auto cm = confusion_matrix(gt, gt, 4);
  for (int t = 0; t < 4; ++t)
    for (int p = 0; p < 4; ++p) EXPECT_EQ(cm.at(t, p), t == p ? 1 : 0);
  EXPECT_DOUBLE_EQ(pixel_accuracy(cm), 1.0);
  const auto norm = cm.row_normalized();
  EXPECT_DOUBLE_EQ(norm[5], 1.0);
}

TEST(Confusion, Errors) {
  EXPECT_THROW(confusion_matrix(LabelMap(2, 2), LabelMap(2, 3), 4), InvalidInput);
  EXPECT_THROW(confusion_matrix(map2x2(0, 0, 0, 5), map2x2(0, 0, 0, 0), 4), InvalidInput);
  EXPECT_THROW(pixel_accuracy(ConfusionMatrix(4)), InvalidInput);
}

TEST(PerClass, AbsentClassScoresPerfect) {
  const auto gt = map2x2(0, 0, 1, 1);
  const auto m = per_class_metrics(confusion_matrix(gt, gt, 4));
  EXPECT_TRUE(m[3].dice.absent);
  EXPECT_EQ(m[3].dice.value, 1.0);
  EXPECT_EQ(m[3].fnr.value, 0.0);
  EXPECT_TRUE(m[3].fpr.defined);
}

TEST(PerClass, MissedClassLeavesPrecisionUndefined) {
  const auto gt = map2x2(0, 0, 1, 1);
  const auto pred = map2x2(0, 0, 0, 0);
  const auto m = per_class_metrics(confusion_matrix(pred, gt, 4))[1];
  EXPECT_FALSE(m.precision.defined);
  EXPECT_TRUE(m.recall.defined);
  EXPECT_EQ(m.recall.value, 0.0);
  EXPECT_EQ(m.dice.value, 0.0);
}

TEST(Hausdorff, Examples) {
  const std::vector<Point> a{{0, 0}}, b{{3, 4}}, c{{0, 0}, {0, 2}};
  EXPECT_DOUBLE_EQ(*hausdorff(a, a), 0.0);
  EXPECT_DOUBLE_EQ(*hausdorff(a, b), 5.0);
  EXPECT_DOUBLE_EQ(*hausdorff(c, a), 2.0);
  EXPECT_FALSE(hausdorff(a, {}).has_value());
}

TEST(Hausdorff, MatchesBruteForceOnLargerMaps) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    LabelMap a(40, 37), b(40, 37);
    const double pa = 0.02 + 0.3 * (trial % 5) / 4.0;
    std::bernoulli_distribution da(pa), db(0.1);
    for (auto& v : a.values()) v = da(rng);
    for (auto& v : b.values()) v = db(rng);
    const auto brute = oracle::brute_metrics(a, b, 2);
    for (int c = 0; c < 2; ++c) {
      const auto h = hausdorff(class_points(b, c), class_points(a, c));
      if (std::isnan(brute.hausdorff[c])) {
        EXPECT_FALSE(h.has_value());
      } else {
        ASSERT_TRUE(h.has_value());
        EXPECT_DOUBLE_EQ(*h, brute.hausdorff[c]);
      }
    }
  }
}

TEST(Aggregate, SingleSamplePerfect) {
  LabelMap gt(4, 4, 0);
  gt(1, 1) = 1;
  gt(2, 2) = 2;
  gt(3, 3) = 3;
  const std::vector<SampleMetrics> s{evaluate_sample(gt, gt)};
  const auto r = aggregate_report(s);
  EXPECT_EQ(r.accuracy, 1.0);
  for (const auto m : {Metric::kDice, Metric::kIoU, Metric::kPrecision, Metric::kRecall})
    EXPECT_EQ(r.mean(m, ClassScope::kAll), 1.0);
  for (const auto m : {Metric::kFnr, Metric::kFpr, Metric::kHausdorff}) EXPECT_EQ(r.mean(m, ClassScope::kAll), 0.0);
}

TEST(Aggregate, MeanOverSamplesThenClasses) {
  // Class 1 Dice 2/3 in the first sample, 1 in the second.
  LabelMap gt(1, 3, 0), pred(1, 3, 0);
  gt(0, 0) = 1;
  pred(0, 0) = 1;
  pred(0, 1) = 1;
  const std::vector<SampleMetrics> s{evaluate_sample(pred, gt, 2), evaluate_sample(gt, gt, 2)};
  const auto r = aggregate_report(s);
  EXPECT_DOUBLE_EQ(r.class_value(Metric::kDice, 1), (2.0 / 3.0 + 1.0) / 2.0);
  EXPECT_DOUBLE_EQ(r.mean(Metric::kDice, ClassScope::kForeground), r.class_value(Metric::kDice, 1));
  const double c0 = r.class_value(Metric::kDice, 0);
  EXPECT_DOUBLE_EQ(r.mean(Metric::kDice, ClassScope::kAll), (c0 + r.class_value(Metric::kDice, 1)) / 2.0);
  EXPECT_EQ(r.confusion.total(), 6);
}

TEST(Aggregate, UndefinedEntriesAreExcludedAndCounted) {
  LabelMap gt(1, 2, 1), pred(1, 2, 0);
  const std::vector<SampleMetrics> s{evaluate_sample(pred, gt, 2), evaluate_sample(gt, gt, 2)};
  const auto r = aggregate_report(s);
  // Precision of class 1 is undefined in the first sample only.
  EXPECT_EQ(r.excluded[static_cast<std::size_t>(Metric::kPrecision)][1], 1u);
  EXPECT_DOUBLE_EQ(r.class_value(Metric::kPrecision, 1), 1.0);
  EXPECT_THROW(aggregate_report({}), InvalidInput);
}

TEST(MetricNames, TableOrder) {
  EXPECT_EQ(metric_name(Metric::kAccuracy), "Acc");
  EXPECT_EQ(metric_name(Metric::kHausdorff), "Hausdorff");
}
