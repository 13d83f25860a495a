#include <gtest/gtest.h>

#include <cmath>

#include "causalfair/classifier.hpp"
#include "causalfair/error.hpp"
#include "causalfair/io.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace causalfair;
using cftest::d_toy;

namespace {

int predict(const Classifier& h, int c, int z) {
  const std::vector<int> row{c, z, 0};
  return h.predict(row);
}

}  // namespace

TEST(Tabular, ToyCellLabels) {
  const auto h = train_tabular(d_toy());
  EXPECT_EQ(predict(*h, 1, 1), 1);
  EXPECT_EQ(predict(*h, 1, 0), 0);
  EXPECT_EQ(predict(*h, 0, 1), 0);  // 1-1 tie
  EXPECT_EQ(predict(*h, 0, 0), 0);
  EXPECT_EQ(h->complexity(), HypothesisComplexity::finite(16));
}

TEST(Tabular, PositiveTieRuleChangesOnlyTheTiedCell) {
  const auto h = train_tabular(d_toy(), TieRule::kPositive);
  EXPECT_EQ(predict(*h, 1, 1), 1);
  EXPECT_EQ(predict(*h, 1, 0), 0);
  EXPECT_EQ(predict(*h, 0, 1), 1);
  EXPECT_EQ(predict(*h, 0, 0), 0);
}

TEST(Tabular, UnseenCellsFollowTieRule) {
  const auto d = Dataset::from_rows(cftest::czl_schema(), {{1, 1, 1}, {0, 1, 0}});
  EXPECT_EQ(predict(*train_tabular(d), 0, 0), 0);
  EXPECT_EQ(predict(*train_tabular(d, TieRule::kPositive), 0, 0), 1);
  EXPECT_TRUE(std::isnan(train_tabular(d)->score(std::vector<int>{0, 0, 0})));
}

TEST(Tree, ToyDepthOneSplitsOnZ) {
  const auto d = d_toy();
  const double gain_c = cftest::oracle::information_gain(d, 0);
  const double gain_z = cftest::oracle::information_gain(d, 1);
  EXPECT_NEAR(gain_z, 0.5216406363433185, 1e-12);
  EXPECT_NEAR(gain_c, 0.12808527889139443, 1e-12);

  const auto h = train_tree(d, 1);
  ASSERT_EQ(h->nodes().size(), 3u);
  EXPECT_EQ(h->nodes()[0].column, 1u);
  EXPECT_EQ(h->num_leaves(), 2u);
  for (int c : {0, 1}) {
    EXPECT_EQ(predict(*h, c, 1), 1);
    EXPECT_EQ(predict(*h, c, 0), 0);
  }
  EXPECT_EQ(h->complexity(), HypothesisComplexity::vc(2));
  EXPECT_EQ(train_tree(d, 1, TieRule::kNegative, HypothesisComplexity::vc(7))->complexity(),
            HypothesisComplexity::vc(7));
}

TEST(Tree, PureDataGivesSingleLeaf) {
  const auto d = Dataset::from_rows(cftest::czl_schema(), {{1, 1, 1}, {0, 0, 1}});
  EXPECT_EQ(train_tree(d, 3)->nodes().size(), 1u);
}

TEST(Tree, FindsXorBelowZeroGainRoot) {
  // L = C xor Z: no single split has gain, depth 2 still fits exactly.
  std::vector<std::vector<int>> rows;
  for (int c : {0, 1}) {
    for (int z : {0, 1}) {
      for (int k = 0; k < 3; ++k) rows.push_back({c, z, c ^ z});
    }
  }
  const auto d = Dataset::from_rows(cftest::czl_schema(), rows);
  const auto h = train_tree(d, 2);
  for (std::size_t i = 0; i < d.n(); ++i) EXPECT_EQ(h->predict(d.row(i)), d.label(i));
}

TEST(Confusion, ToyCases) {
  const auto d = d_toy();
  const auto c1 = confusion_by_group(d, *constant_classifier(d.schema_ptr(), 1));
  EXPECT_EQ(c1.positive.tp, 2u);
  EXPECT_EQ(c1.positive.fp, 1u);
  EXPECT_EQ(c1.positive.fn, 0u);
  EXPECT_EQ(c1.positive.tn, 0u);
  EXPECT_EQ(c1.negative.tp, 1u);
  EXPECT_EQ(c1.negative.fp, 3u);

  const auto c2 = confusion_by_group(d, *train_tabular(d));
  EXPECT_EQ(c2.positive.tp, 2u);
  EXPECT_EQ(c2.positive.fp, 0u);
  EXPECT_EQ(c2.positive.fn, 0u);
  EXPECT_EQ(c2.positive.tn, 1u);
  EXPECT_EQ(c2.negative.tp, 0u);
  EXPECT_EQ(c2.negative.fp, 0u);
  EXPECT_EQ(c2.negative.fn, 1u);
  EXPECT_EQ(c2.negative.tn, 3u);
}

TEST(ErrorBias, ToyCases) {
  const auto d = d_toy();
  const auto e1 = error_bias(d, *constant_classifier(d.schema_ptr(), 1));
  EXPECT_NEAR(e1.epsilon, -5.0 / 12.0, 1e-15);
  EXPECT_NEAR(e1.recompute(), e1.epsilon, 1e-15);
  const auto e2 = error_bias(d, *train_tabular(d));
  EXPECT_NEAR(e2.epsilon, 0.25, 1e-15);
}

TEST(ErrorBias, PerfectClassifierHasNone) {
  const auto d = d_toy();
  const auto h = std::make_shared<FunctionClassifier>(
      d.schema_ptr(),
      [&d](std::span<const int> r) {
        for (std::size_t i = 0; i < d.n(); ++i) {
          if (d.row(i)[0] == r[0] && d.row(i)[1] == r[1]) return d.label(i);
        }
        return 0;
      },
      HypothesisComplexity::finite(16), "lookup");
  // D_toy has conflicting rows in (c-, z+); restrict to a consistent subset.
  const auto consistent = Dataset::from_rows(d.schema_ptr(), {{1, 1, 1}, {1, 0, 0}, {0, 0, 0}});
  EXPECT_EQ(error_bias(consistent, *h).epsilon, 0.0);
}

TEST(ErrorBias, MatchesCountingOracle) {
  const auto d = d_toy();
  const auto h = train_tree(d, 1);
  const auto o = cftest::oracle::count_rows(d, [&](std::span<const int> r) { return h->predict(r); });
  EXPECT_NEAR(error_bias(d, *h).epsilon, o.epsilon, 1e-15);
  EXPECT_NEAR(empirical_predicted_discrimination(d, *h), o.de_dh, 1e-15);
}

TEST(Complexity, JsonAndLogSize) {
  const auto f = HypothesisComplexity::finite(16);
  EXPECT_NEAR(f.log_size(), std::log(16.0), 1e-15);
  EXPECT_EQ(HypothesisComplexity::from_json(f.to_json()), f);
  EXPECT_EQ(HypothesisComplexity::from_json(nlohmann::json{{"kind", "finite"}, {"size", 16}}), f);
  const auto v = HypothesisComplexity::vc(5);
  EXPECT_EQ(HypothesisComplexity::from_json(v.to_json()), v);
  EXPECT_EQ(f.describe(), "Finite(16)");
  EXPECT_EQ(v.describe(), "VC(5)");
}

TEST(Serialization, TabularAndTreeRoundTrip) {
  const auto d = d_toy();
  for (ClassifierPtr h : {ClassifierPtr(train_tabular(d)), ClassifierPtr(train_tree(d, 2))}) {
    const auto back = classifier_from_json(h->to_json());
    EXPECT_EQ(back->complexity(), h->complexity());
    for (int c : {0, 1}) {
      for (int z : {0, 1}) EXPECT_EQ(predict(*back, c, z), predict(*h, c, z));
    }
    EXPECT_EQ(back->to_json(), h->to_json());
  }
}

TEST(Serialization, FunctionClassifierIsNotSerializable) {
  EXPECT_THROW(constant_classifier(cftest::czl_schema(), 1)->to_json(), DomainError);
}

TEST(Compatibility, SchemaMismatchIsRejected) {
  const auto h = train_tabular(d_toy());
  const auto other = cftest::plain_schema(4);
  EXPECT_THROW(h->check_compatible(*other), DomainError);
  EXPECT_NO_THROW(h->check_compatible(*cftest::czl_schema()));
}
