#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "chromoseg/error.hpp"
#include "chromoseg/loss_reference.hpp"
#include "oracles.hpp"

using namespace chromoseg;
using namespace chromoseg::losses;

namespace {

std::vector<double> random_simplex(std::mt19937_64& rng, int classes, int pixels) {
  std::gamma_distribution<double> g(1.0, 1.0);
  std::vector<double> p(static_cast<std::size_t>(classes * pixels));
  for (int i = 0; i < pixels; ++i) {
    double s = 0.0;
    for (int c = 0; c < classes; ++c) s += p[c * pixels + i] = g(rng) + 1e-3;
    for (int c = 0; c < classes; ++c) p[c * pixels + i] /= s;
  }
  return p;
}

}  // namespace

TEST(LovaszGrad, Examples) {
  const std::vector<std::uint8_t> a{1}, b{1, 0}, c{0, 1};
  EXPECT_EQ(reference::lovasz_grad(a), (std::vector<double>{1.0}));
  EXPECT_EQ(reference::lovasz_grad(b), (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(reference::lovasz_grad(c), (std::vector<double>{0.5, 0.5}));
}

TEST(LovaszSoftmax, OneHotIsZero) {
  const std::vector<std::uint8_t> labels{0, 2, 1, 3};
  std::vector<double> probs(16, 0.0);
  for (int i = 0; i < 4; ++i) probs[labels[i] * 4 + i] = 1.0;
  EXPECT_DOUBLE_EQ(reference::lovasz_softmax(probs, labels, 4).value, 0.0);
}

TEST(LovaszSoftmax, SinglePixelWrong) {
  const std::vector<std::uint8_t> labels{0};
  const std::vector<double> probs{0.0, 1.0};
  EXPECT_DOUBLE_EQ(reference::lovasz_softmax(probs, labels, 2).value, 1.0);
}

TEST(LovaszSoftmax, VertexMatchesSetCounting) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> cls(0, 3);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + trial % 8;
    std::vector<std::uint8_t> gt(n), pred(n);
    for (int i = 0; i < n; ++i) {
      gt[i] = static_cast<std::uint8_t>(cls(rng));
      pred[i] = static_cast<std::uint8_t>(cls(rng));
    }
    std::vector<double> probs(4 * n, 0.0);
    for (int i = 0; i < n; ++i) probs[pred[i] * n + i] = 1.0;
    ASSERT_NEAR(reference::lovasz_softmax(probs, gt, 4).value, oracle::mean_jaccard_loss(pred, gt, 4), 1e-12);
  }
}

TEST(LovaszSoftmax, PresentClassesOnlyAveragesFewerTerms) {
  // Two pixels of class 0, both predicted (0.6, 0.3, 0.1): per-class
  // losses 0.4, 0.3, 0.1.
  const std::vector<std::uint8_t> labels{0, 0};
  const std::vector<double> probs{0.6, 0.6, 0.3, 0.3, 0.1, 0.1};
  EXPECT_NEAR(reference::lovasz_softmax(probs, labels, 3, false).value, 0.8 / 3.0, 1e-12);
  EXPECT_NEAR(reference::lovasz_softmax(probs, labels, 3, true).value, 0.4, 1e-12);
}

TEST(CrossEntropy, Examples) {
  const std::vector<std::uint8_t> labels{0};
  const std::vector<double> half{0.5, 0.5};
  EXPECT_NEAR(reference::cross_entropy(half, labels, 2).value, std::log(2.0), 1e-15);
  const std::vector<double> right{1.0, 0.0};
  EXPECT_DOUBLE_EQ(reference::cross_entropy(right, labels, 2).value, 0.0);
}

TEST(SoftDice, OneHotIsZero) {
  const std::vector<std::uint8_t> labels{1, 0};
  const std::vector<double> probs{0.0, 1.0, 1.0, 0.0};
  EXPECT_NEAR(reference::soft_dice_loss(probs, labels, 2).value, 0.0, 1e-12);
}

TEST(WeightedLosses, UniformWeightsEqualUnweighted) {
  std::mt19937_64 rng(11);
  const auto probs = random_simplex(rng, 4, 9);
  std::vector<std::uint8_t> labels{0, 1, 2, 3, 0, 1, 2, 3, 3};
  const std::vector<double> w(4, 2.5);
  EXPECT_NEAR(reference::cross_entropy(probs, labels, 4, w).value, reference::cross_entropy(probs, labels, 4).value,
              1e-14);
  EXPECT_NEAR(reference::soft_dice_loss(probs, labels, 4, w).value,
              reference::soft_dice_loss(probs, labels, 4).value, 1e-14);
}

TEST(Gradients, MatchFiniteDifferences) {
  std::mt19937_64 rng(17);
  const int n = 6;
  for (int trial = 0; trial < 10; ++trial) {
    const auto probs = random_simplex(rng, 4, n);
    std::vector<std::uint8_t> labels(n);
    for (auto& l : labels) l = static_cast<std::uint8_t>(rng() % 4);
    const std::vector<double> w{0.5, 1.0, 1.5, 1.0};
    using Fn = std::function<reference::ValueAndGrad(std::span<const double>)>;
    const std::vector<Fn> fns{
        [&](std::span<const double> p) { return reference::cross_entropy(p, labels, 4, w); },
        [&](std::span<const double> p) { return reference::soft_dice_loss(p, labels, 4, w); },
        [&](std::span<const double> p) { return reference::lovasz_softmax(p, labels, 4); }};
    for (const auto& fn : fns) {
      const auto analytic = fn(probs).grad;
      const auto numeric =
          oracle::finite_difference([&](std::span<const double> p) { return fn(p).value; }, probs, 1e-6);
      EXPECT_LT(oracle::relative_error(analytic, numeric), 1e-4);
    }
  }
}

TEST(Lsgan, Examples) {
  const std::vector<double> ones(4, 1.0), zeros(4, 0.0), halves(4, 0.5);
  EXPECT_DOUBLE_EQ(reference::lsgan_discriminator_loss(ones, zeros), 0.0);
  EXPECT_DOUBLE_EQ(reference::lsgan_discriminator_loss(halves, halves), 0.5);
  EXPECT_DOUBLE_EQ(reference::lsgan_discriminator_loss(zeros, ones), 2.0);
  EXPECT_DOUBLE_EQ(reference::lsgan_generator_loss(ones), 0.0);
  EXPECT_DOUBLE_EQ(reference::lsgan_generator_loss(zeros), 1.0);
  EXPECT_DOUBLE_EQ(reference::lsgan_generator_loss(halves), 0.25);
}

TEST(LossKind, Names) {
  for (const auto k : kAllLossKinds) EXPECT_EQ(parse_loss_kind(to_string(k)), k);
  EXPECT_THROW(parse_loss_kind("focal"), InvalidInput);
}

TEST(LossConfig, Validation) {
  LossConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.lambda = -1.0;
  EXPECT_THROW(cfg.validate(), InvalidInput);
  cfg = {};
  cfg.class_weights[2] = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidInput);
}
