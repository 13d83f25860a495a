#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "causalfair/classifier.hpp"
#include "causalfair/dataset.hpp"

namespace causalfair {

// Positive-class score of a row, used to rank massaging candidates.
using Scorer = std::function<double(std::span<const int>)>;

// P̂(l⁺ | c, z) of the row's cell in `data`, frozen at construction.
Scorer cell_frequency_scorer(const Dataset& data);

enum class FlipKind { kPromotion, kDemotion };
std::string_view flip_kind_name(FlipKind kind);

// Promotions turn l⁻ into l⁺ in the deprived group, demotions turn l⁺ into l⁻
// in the favored group. With DE_D > 0 these are c⁻ and c⁺ respectively.
struct FlipRecord {
  std::size_t row_index = 0;
  int old_label = 0;
  int new_label = 0;
  FlipKind kind = FlipKind::kPromotion;
  double score = 0.0;
  double de_after = 0.0;  // DE_D once this flip is applied

  nlohmann::json to_json() const;
};

struct MassageResult {
  Dataset data;
  std::vector<FlipRecord> flips;
  double de_before = 0.0;
  double de_after = 0.0;
  bool reached = true;  // false: |DE_D| ≤ tau not attainable, best configuration kept

  nlohmann::json to_json() const;  // everything but the dataset
};

// Greedy label massaging. Alternates promotion (highest-scoring candidate) and
// demotion (lowest-scoring candidate), promotion first, and stops once
// |DE_D| ≤ tau. The walk also stops when DE_D changes sign or no candidate is
// left; the configuration with the smallest |DE_D| seen is returned. Score ties
// go to the lower row index.
MassageResult massage(const Dataset& data, const Scorer& scorer, double tau);
MassageResult massage(const Dataset& data, double tau);  // cell-frequency scorer

// Categorical disparate-impact repair: every non-protected, non-label attribute
// is moved, per group, to the pooled marginal P̂(z_i) by reassigning randomly
// chosen rows from over- to under-represented values.
Dataset di_repair(const Dataset& data, std::uint64_t seed);

enum class FlipTarget { kNone, kPositiveToNegative, kNegativeToPositive };
std::string_view flip_target_name(FlipTarget target);

struct GroupFlip {
  double probability = 0.0;
  FlipTarget target = FlipTarget::kNone;
  // Admissible probability interval; the lower end is what gets applied.
  double interval_low = 0.0;
  double interval_high = 0.0;
};

struct RandomFlipPolicy {
  GroupFlip positive_group;  // c⁺
  GroupFlip negative_group;  // c⁻
  double sigma = 0.0;        // tau − |DE_D*|

  const GroupFlip& group(int c) const { return c == kPositive ? positive_group : negative_group; }
  bool is_identity() const {
    return positive_group.probability == 0.0 && negative_group.probability == 0.0;
  }
  nlohmann::json to_json() const;
  static RandomFlipPolicy from_json(const nlohmann::json& j);
};

// Flip probabilities that drive |ε₁ᵍ − ε₂ᵍ| to σ/2 per group in expectation.
RandomFlipPolicy compute_flip_policy(const ConfusionByGroup& confusion, double de_d_star,
                                     double tau);
RandomFlipPolicy compute_flip_policy(const Dataset& data_star, const Classifier& h_star,
                                     double tau);

// Wraps a classifier and flips its prediction for a (c, z) cell when the
// uniform draw of stream (seed, cell) falls below the group's probability.
class RandomFlipClassifier final : public Classifier {
 public:
  RandomFlipClassifier(ClassifierPtr inner, RandomFlipPolicy policy, std::uint64_t seed);

  int predict(std::span<const int> row) const override;
  nlohmann::json to_json() const override;

  const Classifier& inner() const { return *inner_; }
  const RandomFlipPolicy& policy() const { return policy_; }
  std::uint64_t seed() const { return seed_; }

 private:
  ClassifierPtr inner_;
  RandomFlipPolicy policy_;
  std::uint64_t seed_;
  CellIndexer indexer_;
};

ClassifierPtr apply_random_flip(ClassifierPtr h, const RandomFlipPolicy& policy,
                                std::uint64_t seed);

using Trainer = std::function<ClassifierPtr(const Dataset&)>;

struct TwoPhaseOptions {
  double tau = 0.05;
  std::uint64_t seed = 0;
  bool tweak = true;
  // Massaging target for phase 1. Zero removes the discrimination in the
  // training data as far as the label granularity allows.
  double repair_target = 0.0;
  // Seeded realizations of the RandomFlip wrapper tried before giving up.
  int max_flip_attempts = 64;
};

enum class Outcome { kAlreadyFair, kFairAfterTraining, kFairAfterTweak, kUnsatisfied };
std::string_view outcome_name(Outcome outcome);

struct TwoPhaseReport {
  std::string pipeline;
  double tau = 0.0;
  double de_d_before = 0.0;
  double epsilon_before = 0.0;  // ε of the classifier trained on the input data
  double de_d_after = 0.0;      // DE_D*
  double epsilon_after_training = 0.0;
  double epsilon_after_tweak = 0.0;
  double criterion_value = 0.0;  // |DE_D* + ε| of the returned classifier
  std::vector<FlipRecord> flips;
  RandomFlipPolicy policy;
  bool tweaked = false;
  int flip_attempts = 0;
  std::uint64_t flip_seed = 0;
  bool massage_reached = true;
  bool labels_only = true;  // (c, z) columns of D* equal those of D
  Outcome outcome = Outcome::kUnsatisfied;
  bool satisfied = false;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
};

struct PipelineResult {
  Dataset data;
  ClassifierPtr classifier;
  TwoPhaseReport report;
};

// Label repair followed by classifier tweaking, with the non-discrimination
// criterion |DE_D* + ε| ≤ tau checked on realized quantities.
PipelineResult two_phase(const Dataset& data, const Trainer& trainer,
                         const TwoPhaseOptions& options);

// Same as two_phase, but the non-label attributes are first repaired with
// di_repair. The criterion still holds on D*, but D* no longer shares the
// population's (c, z) distribution.
PipelineResult di_pipeline(const Dataset& data, const Trainer& trainer,
                           const TwoPhaseOptions& options);

// Flip records as CSV: row_index,kind,group,old_label,new_label,score,de_after
std::string flips_to_csv(const Dataset& data, std::span<const FlipRecord> flips);

}  // namespace causalfair
