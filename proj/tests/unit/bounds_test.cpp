#include <gtest/gtest.h>

#include <cmath>

#include "causalfair/bounds.hpp"
#include "causalfair/error.hpp"

using namespace causalfair;

// Reference values from 50-digit evaluation of the closed forms.
namespace ref {
constexpr double kSampling5000 = 0.99227818345508916;       // n±=5000, t=0.05
constexpr double kSampling500 = 0.98557374745593708;        // n±=500, t=0.15
constexpr double kFinite16 = 1.4221254517723157e-08;        // n±=5000, t=0.1
constexpr double kVc3 = 2.2158739988253386e-12;             // n±=5000, t=0.15
constexpr double kFinite1 = 5.5551775459856082e-11;         // n±=5000, t=0.1
constexpr double kInvertFinite16 = 0.063014931815097425;    // confidence 0.95
}  // namespace ref

TEST(SamplingBound, ReferenceValues) {
  EXPECT_NEAR(sampling_bound(5000, 5000, 0.05).raw_confidence, ref::kSampling5000, 1e-12);
  EXPECT_NEAR(sampling_bound(500, 500, 0.15).raw_confidence, ref::kSampling500, 1e-12);
}

TEST(SamplingBound, TinyThresholdIsVacuous) {
  const auto b = sampling_bound(100, 200, 1e-9);
  EXPECT_NEAR(b.raw_confidence, -3.0, 1e-9);
  EXPECT_EQ(b.confidence, 0.0);
  EXPECT_TRUE(b.vacuous);
}

TEST(SamplingBound, RejectsBadInputs) {
  EXPECT_THROW(sampling_bound(10, 10, 0.0), DomainError);
  EXPECT_THROW(sampling_bound(10, 10, -1.0), DomainError);
  EXPECT_THROW(sampling_bound(0, 10, 0.1), DomainError);
}

TEST(Delta, ReferenceValues) {
  EXPECT_NEAR(delta(HypothesisComplexity::finite(16), 5000, 5000, 0.1) / ref::kFinite16, 1.0, 1e-12);
  EXPECT_NEAR(delta(HypothesisComplexity::vc(3), 5000, 5000, 0.15) / ref::kVc3, 1.0, 1e-12);
  EXPECT_NEAR(delta(HypothesisComplexity::finite(1), 5000, 5000, 0.1) / ref::kFinite1, 1.0, 1e-12);
}

TEST(Delta, FiniteOneIsTheSamplingComplement) {
  for (double t : {0.01, 0.05, 0.1, 0.3}) {
    EXPECT_NEAR(delta(HypothesisComplexity::finite(1), 700, 1300, t),
                1.0 - sampling_bound(700, 1300, t).raw_confidence, 1e-12);
  }
}

TEST(Delta, LargeVcDimensionDoesNotOverflow) {
  const double log_d = log_delta(HypothesisComplexity::vc(5000), 100000, 100000, 0.1);
  EXPECT_TRUE(std::isfinite(log_d));
  EXPECT_GT(log_d, 700.0);
  EXPECT_TRUE(std::isinf(delta(HypothesisComplexity::vc(5000), 100000, 100000, 0.1)));
  // Finite classes with astronomically many members stay representable as log2|H|.
  EXPECT_TRUE(std::isfinite(log_delta(HypothesisComplexity::finite_log2(4096), 10, 10, 0.1)));
}

TEST(Delta, StrictlyDecreasingInT) {
  for (const auto& h : {HypothesisComplexity::finite(16), HypothesisComplexity::vc(4)}) {
    double prev = delta(h, 800, 1200, 0.01);
    for (double t = 0.02; t <= 1.0; t += 0.01) {
      const double cur = delta(h, 800, 1200, t);
      EXPECT_LT(cur, prev);
      prev = cur;
    }
  }
}

TEST(InvertDelta, MatchesClosedForm) {
  EXPECT_NEAR(invert_delta(HypothesisComplexity::finite(16), 5000, 5000, 0.95),
              ref::kInvertFinite16, 1e-9);
}

TEST(InvertDelta, RoundTripAndScaling) {
  for (const auto& h : {HypothesisComplexity::finite(16), HypothesisComplexity::vc(3)}) {
    for (double gamma : {0.5, 0.9, 0.99}) {
      const double t = invert_delta(h, 3000, 5000, gamma);
      EXPECT_NEAR(delta(h, 3000, 5000, t), 1.0 - gamma, 1e-6);
    }
  }
  const auto h = HypothesisComplexity::finite(64);
  const double t1 = invert_delta(h, 1000, 3000, 0.9);
  const double t2 = invert_delta(h, 2000, 6000, 0.9);
  EXPECT_NEAR(t2 / t1, 1.0 / std::sqrt(2.0), 1e-6);
}

TEST(InvertDelta, UnreachableTargetIsInfeasible) {
  EXPECT_THROW(invert_delta(HypothesisComplexity::finite(1000000), 2, 2, 0.99), InfeasibleError);
  EXPECT_THROW(invert_delta(HypothesisComplexity::finite(4), 100, 100, 1.0), DomainError);
}

TEST(UniformBound, UsesDelta) {
  const auto b = uniform_bound(HypothesisComplexity::finite(16), 5000, 5000, 0.1);
  EXPECT_EQ(b.source, BoundSource::kUniform);
  EXPECT_EQ(b.half_width, 0.1);
  EXPECT_NEAR(b.delta / ref::kFinite16, 1.0, 1e-12);
}

TEST(PredictionBound, Examples) {
  const auto b = prediction_bound(0.004, 0.011, HypothesisComplexity::finite(16), 5000, 5000, 0.1);
  EXPECT_NEAR(b.half_width, 0.115, 1e-12);
  EXPECT_NEAR((1.0 - b.confidence) / ref::kFinite16, 1.0, 1e-6);
  EXPECT_FALSE(b.vacuous);

  const auto cancel = prediction_bound(0.03, -0.03, HypothesisComplexity::vc(2), 400, 600, 0.2);
  EXPECT_EQ(cancel.half_width, 0.2);

  const auto vacuous = prediction_bound(0.1, 0.0, HypothesisComplexity::finite(1024), 5, 5, 0.1);
  EXPECT_EQ(vacuous.confidence, 0.0);
  EXPECT_TRUE(vacuous.vacuous);
  EXPECT_GT(vacuous.delta, 1.0);
}

TEST(BoundResult, JsonCarriesInputs) {
  const auto j = prediction_bound(0.0, 0.0, HypothesisComplexity::vc(3), 10, 20, 0.5).to_json();
  EXPECT_EQ(j["source"], "prediction");
  EXPECT_EQ(j["n_pos"], 10);
  EXPECT_EQ(j["complexity"]["kind"], "vc");
}
