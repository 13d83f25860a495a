#include <gtest/gtest.h>

#include <cmath>

#include "causalfair/error.hpp"
#include "causalfair/io.hpp"
#include "causalfair/removal.hpp"
#include "fixtures.hpp"

using namespace causalfair;
using cftest::d_toy;

namespace {

GroupConfusion confusion(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
  GroupConfusion g;
  g.tp = tp;
  g.fp = fp;
  g.fn = fn;
  g.tn = tn;
  return g;
}

// c⁺: 100 rows, z < 5 predicted positive (40 l⁺, 10 l⁻), z ≥ 5 predicted
// negative (2 l⁺, 48 l⁻). c⁻: 100 rows classified without error.
struct FlipFixture {
  std::shared_ptr<const Schema> schema = std::make_shared<const Schema>(std::vector<AttributeSchema>{
      {"C", {"c-", "c+"}, Role::kProtected},
      {"Z", {"0", "1", "2", "3", "4", "5", "6", "7", "8", "9"}, Role::kNonProtected},
      {"L", {"l-", "l+"}, Role::kLabel}});
  Dataset data = build();
  ClassifierPtr h = std::make_shared<FunctionClassifier>(
      schema, [](std::span<const int> r) { return r[1] < 5 ? 1 : 0; },
      HypothesisComplexity::finite(1024), "z < 5");

  Dataset build() const {
    std::vector<std::vector<int>> rows;
    for (int z = 0; z < 10; ++z) {
      for (int k = 0; k < 10; ++k) {
        const int l_pos = z < 5 ? (k < 8 ? 1 : 0) : (z == 5 && k < 2 ? 1 : 0);
        rows.push_back({1, z, l_pos});
        rows.push_back({0, z, z < 5 ? 1 : 0});
      }
    }
    return Dataset::from_rows(schema, rows);
  }
};

}  // namespace

TEST(Massage, AlreadyCompliant) {
  const auto m = massage(d_toy(), 0.5);
  EXPECT_TRUE(m.flips.empty());
  EXPECT_TRUE(m.reached);
  EXPECT_EQ(m.data, d_toy());
}

TEST(Massage, OnePromotionReachesPointTwo) {
  const auto m = massage(d_toy(), 0.2);
  ASSERT_EQ(m.flips.size(), 1u);
  EXPECT_EQ(m.flips[0].row_index, 6u);
  EXPECT_EQ(m.flips[0].kind, FlipKind::kPromotion);
  EXPECT_DOUBLE_EQ(m.flips[0].score, 0.5);
  EXPECT_NEAR(m.de_after, 1.0 / 6.0, 1e-15);
  EXPECT_TRUE(m.reached);
  EXPECT_EQ(m.data.label(6), kPositive);
}

TEST(Massage, UnreachableKeepsBestConfiguration) {
  const auto m = massage(d_toy(), 0.1);
  EXPECT_FALSE(m.reached);
  ASSERT_EQ(m.flips.size(), 1u);
  EXPECT_NEAR(m.de_after, 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(empirical_discrimination(m.data), 1.0 / 6.0, 1e-15);
}

TEST(Massage, NegativeDiscriminationSwapsGroups) {
  // Mirror image of D_toy: c⁻ is favored.
  std::vector<std::vector<int>> rows;
  const auto toy = d_toy();
  for (std::size_t i = 0; i < toy.n(); ++i) rows.push_back({1 - toy.at(i, 0), toy.at(i, 1), toy.at(i, 2)});
  const auto d = Dataset::from_rows(toy.schema_ptr(), rows);
  const auto m = massage(d, 0.2);
  ASSERT_EQ(m.flips.size(), 1u);
  EXPECT_EQ(d.protected_value(m.flips[0].row_index), kPositive);
  EXPECT_NEAR(m.de_after, -1.0 / 6.0, 1e-15);
}

TEST(DiRepair, ToyMarginalsWithinGranularity) {
  for (std::uint64_t seed : {0ULL, 1ULL, 99ULL}) {
    const auto r = di_repair(d_toy(), seed);
    double z_pos[2] = {0, 0};
    for (std::size_t i = 0; i < r.n(); ++i) z_pos[r.protected_value(i)] += r.at(i, 1);
    EXPECT_LE(std::abs(z_pos[1] / 3.0 - z_pos[0] / 4.0), 1.0 / 3.0);
    EXPECT_EQ(r.column(2), d_toy().column(2));
    EXPECT_EQ(r.column(0), d_toy().column(0));
  }
}

TEST(DiRepair, EqualMarginalsAreUnchanged) {
  const auto d = Dataset::from_rows(cftest::czl_schema(),
                                    {{1, 1, 1}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {0, 1, 1}});
  EXPECT_EQ(di_repair(d, 5), d);
}

TEST(FlipPolicy, WorkedExample) {
  ConfusionByGroup c;
  c.positive = confusion(40, 10, 2, 48);
  c.negative = confusion(30, 5, 5, 60);
  const auto p = compute_flip_policy(c, 0.01, 0.05);
  EXPECT_NEAR(p.sigma, 0.04, 1e-15);
  EXPECT_EQ(p.positive_group.target, FlipTarget::kPositiveToNegative);
  EXPECT_NEAR(p.positive_group.interval_low, 0.12, 1e-12);
  EXPECT_NEAR(p.positive_group.interval_high, 0.16, 1e-12);
  EXPECT_NEAR(p.positive_group.probability, 0.12, 1e-12);
  EXPECT_EQ(p.negative_group.probability, 0.0);
  EXPECT_EQ(p.negative_group.target, FlipTarget::kNone);
}

TEST(FlipPolicy, MirrorCase) {
  ConfusionByGroup c;
  c.positive = confusion(40, 2, 10, 48);  // ε₁ − ε₂ = −0.08
  c.negative = confusion(10, 0, 0, 10);
  const auto p = compute_flip_policy(c, 0.01, 0.05);
  EXPECT_EQ(p.positive_group.target, FlipTarget::kNegativeToPositive);
  EXPECT_NEAR(p.positive_group.probability, 0.06 * 100 / 58.0, 1e-12);
}

TEST(FlipPolicy, PerfectClassifierIsIdentity) {
  ConfusionByGroup c;
  c.positive = confusion(5, 0, 0, 5);
  c.negative = confusion(3, 0, 0, 7);
  EXPECT_TRUE(compute_flip_policy(c, 0.0, 0.05).is_identity());
}

TEST(FlipPolicy, TauBelowResidualDiscrimination) {
  ConfusionByGroup c;
  c.positive = confusion(5, 0, 0, 5);
  c.negative = confusion(5, 0, 0, 5);
  EXPECT_THROW(compute_flip_policy(c, 0.2, 0.05), PhaseOrderError);
  EXPECT_THROW(compute_flip_policy(c, -0.2, 0.05), PhaseOrderError);
  EXPECT_NO_THROW(compute_flip_policy(c, 0.05, 0.05));
}

TEST(FlipPolicy, EmptyGroupIsUndefined) {
  ConfusionByGroup c;
  c.negative = confusion(5, 0, 0, 5);
  EXPECT_THROW(compute_flip_policy(c, 0.0, 0.05), UndefinedConditionalError);
}

TEST(FlipPolicy, ProbabilityClampedToOne) {
  ConfusionByGroup c;
  c.positive = confusion(1, 9, 0, 0);  // ε₁ = 0.9, only 10 predicted positives
  c.negative = confusion(5, 0, 0, 5);
  const auto p = compute_flip_policy(c, 0.0, 0.0);
  EXPECT_EQ(p.positive_group.probability, 0.9);
  EXPECT_EQ(p.positive_group.interval_high, 0.9);
  c.positive = confusion(0, 10, 0, 0);
  EXPECT_EQ(compute_flip_policy(c, 0.0, 0.0).positive_group.probability, 1.0);
}

TEST(RandomFlip, IdentityPolicyLeavesPredictionsAlone) {
  FlipFixture f;
  const auto wrapped = apply_random_flip(f.h, RandomFlipPolicy{}, 42);
  for (std::size_t i = 0; i < f.data.n(); ++i) {
    EXPECT_EQ(wrapped->predict(f.data.row(i)), f.h->predict(f.data.row(i)));
  }
}

TEST(RandomFlip, DeterministicPerSeed) {
  FlipFixture f;
  const auto policy = compute_flip_policy(f.data, *f.h, std::abs(empirical_discrimination(f.data)) + 0.04);
  const auto a = apply_random_flip(f.h, policy, 7);
  const auto b = apply_random_flip(f.h, policy, 7);
  for (std::size_t i = 0; i < f.data.n(); ++i) {
    EXPECT_EQ(a->predict(f.data.row(i)), b->predict(f.data.row(i)));
  }
}

TEST(RandomFlip, ExpectedImbalanceHitsHalfSigma) {
  FlipFixture f;
  const double de = empirical_discrimination(f.data);
  const auto conf = confusion_by_group(f.data, *f.h);
  EXPECT_EQ(conf.positive.tp, 40u);
  EXPECT_EQ(conf.positive.fp, 10u);
  EXPECT_EQ(conf.positive.fn, 2u);
  const auto policy = compute_flip_policy(conf, de, std::abs(de) + 0.04);
  EXPECT_NEAR(policy.positive_group.probability, 0.12, 1e-12);
  const double expected = conf.positive.imbalance() -
                          policy.positive_group.probability * 50.0 / 100.0;
  EXPECT_NEAR(expected, 0.02, 1e-12);

  const int passes = 10000;
  double sum = 0.0, sum_sq = 0.0;
  for (int s = 0; s < passes; ++s) {
    const auto wrapped = apply_random_flip(f.h, policy, static_cast<std::uint64_t>(s));
    const double a = confusion_by_group(f.data, *wrapped).positive.imbalance();
    sum += a;
    sum_sq += a * a;
  }
  const double mean = sum / passes;
  const double var = (sum_sq - passes * mean * mean) / (passes - 1);
  EXPECT_LE(std::abs(mean - expected), 3.0 * std::sqrt(var / passes));
}

TEST(RandomFlip, JsonRoundTrip) {
  const auto d = d_toy();
  ClassifierPtr h = train_tabular(d);
  RandomFlipPolicy policy;
  policy.positive_group = {0.3, FlipTarget::kPositiveToNegative, 0.3, 0.5};
  const auto wrapped = apply_random_flip(h, policy, 11);
  const auto back = classifier_from_json(wrapped->to_json());
  EXPECT_EQ(back->to_json(), wrapped->to_json());
  for (std::size_t i = 0; i < d.n(); ++i) EXPECT_EQ(back->predict(d.row(i)), wrapped->predict(d.row(i)));
}

TEST(TwoPhase, FairDataWithPerfectTrainer) {
  const auto d = Dataset::from_rows(cftest::czl_schema(), {{1, 1, 1}, {1, 0, 0}, {0, 1, 1}, {0, 0, 0}});
  const Trainer trainer = [](const Dataset& x) -> ClassifierPtr { return train_tabular(x); };
  const auto r = two_phase(d, trainer, {});
  EXPECT_TRUE(r.report.satisfied);
  EXPECT_EQ(r.report.outcome, Outcome::kAlreadyFair);
  EXPECT_TRUE(r.report.flips.empty());
  EXPECT_FALSE(r.report.tweaked);
  EXPECT_EQ(r.data, d);
}

TEST(TwoPhase, AdultLikeSampleIsRepaired) {
  const auto model = load_model(cftest::source_path("models/adult_like.json"));
  const auto d = sample(model, 2000, 7);
  const Trainer trainer = [](const Dataset& x) -> ClassifierPtr { return train_tabular(x); };
  TwoPhaseOptions options;
  options.tau = 0.05;
  options.seed = 7;
  const auto r = two_phase(d, trainer, options);
  EXPECT_TRUE(r.report.satisfied);
  EXPECT_TRUE(r.report.labels_only);
  const double crit = std::abs(empirical_discrimination(r.data) + error_bias(r.data, *r.classifier).epsilon);
  EXPECT_LE(crit, 0.05);
  EXPECT_NEAR(crit, r.report.criterion_value, 1e-12);
  for (std::size_t i = 0; i < d.n(); ++i) {
    for (std::size_t j = 0; j + 1 < d.width(); ++j) ASSERT_EQ(r.data.at(i, j), d.at(i, j));
  }
}

TEST(TwoPhase, WithoutTweakReportsUnsatisfiedCriterion) {
  const auto model = load_model(cftest::source_path("models/adult_like.json"));
  const auto d = sample(model, 2000, 7);
  const Trainer trainer = [](const Dataset& x) -> ClassifierPtr { return train_tabular(x); };
  TwoPhaseOptions options;
  options.tweak = false;
  const auto r = two_phase(d, trainer, options);
  EXPECT_FALSE(r.report.tweaked);
  EXPECT_EQ(r.report.satisfied, r.report.criterion_value <= options.tau + 1e-12);
}

TEST(TwoPhase, DiPipelineChangesFeatures) {
  const auto model = load_model(cftest::source_path("models/adult_like.json"));
  const auto d = sample(model, 1000, 3);
  const Trainer trainer = [](const Dataset& x) -> ClassifierPtr { return train_tabular(x); };
  const auto r = di_pipeline(d, trainer, {});
  EXPECT_EQ(r.report.pipeline, "di");
  EXPECT_FALSE(r.report.labels_only);
}

TEST(FlipsCsv, HeaderAndRows) {
  const auto m = massage(d_toy(), 0.2);
  const auto csv = flips_to_csv(d_toy(), m.flips);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "row_index,kind,group,old_label,new_label,score,de_after");
  EXPECT_NE(csv.find("6,promotion,c-,l-,l+,0.5,"), std::string::npos);
}
