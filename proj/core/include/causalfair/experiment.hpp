#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "causalfair/causal_model.hpp"
#include "causalfair/removal.hpp"

namespace causalfair {

enum class PipelineKind { kNone, kTwoPhase, kTwoPhaseNoTweak, kDi };
std::string_view pipeline_name(PipelineKind kind);
PipelineKind parse_pipeline(std::string_view text);

struct TrainerConfig {
  enum class Kind { kTabular, kTree };
  Kind kind = Kind::kTabular;
  std::size_t depth = 4;
  TieRule tie_rule = TieRule::kNegative;

  Trainer make() const;
  std::string describe() const;
};

struct ExperimentConfig {
  std::string model_path;
  std::vector<std::size_t> sample_sizes{500, 2000, 10000};
  std::size_t repetitions = 20;
  std::uint64_t base_seed = 0;
  TrainerConfig trainer;
  double tau = 0.05;
  double bound_t = 0.1;
  std::vector<PipelineKind> pipelines{PipelineKind::kNone};
  std::size_t threads = 1;

  void check() const;  // throws DomainError
  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
};

// Quantities measured in one repetition. For repairing pipelines the data,
// classifier and measures are the starred (post-repair) variants.
struct RepetitionResult {
  std::size_t repetition = 0;
  std::uint64_t seed = 0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  double de_d = 0.0;
  double de_dh = 0.0;
  double de_mh = 0.0;  // exact, on the ground-truth population
  double epsilon = 0.0;
  double de_d_original = 0.0;  // before any repair
  double bound_half_width = 0.0;
  double bound_confidence = 0.0;
  bool satisfied = true;
  std::size_t flips = 0;

  nlohmann::json to_json() const;
};

struct Summary {
  double mean = 0.0;
  double sample_variance = 0.0;  // n − 1 denominator; 0 for a single repetition
  double std_error = 0.0;        // sqrt(sample_variance / n)
  double mean_abs = 0.0;

  static Summary of(const std::vector<double>& values);
  nlohmann::json to_json() const;
};

struct CellReport {
  std::size_t size = 0;
  PipelineKind pipeline = PipelineKind::kNone;
  std::vector<RepetitionResult> repetitions;
  Summary de_d, de_dh, de_mh, epsilon;
  double satisfied_fraction = 0.0;
  double de_mh_above_tau_fraction = 0.0;
  // Prediction bound |DE_Mh| ≤ |DE_D + ε| + t per repetition.
  double bound_mean_half_width = 0.0;
  double bound_min_confidence = 0.0;
  double bound_coverage = 0.0;  // fraction of reps with exact |DE_Mh| inside
};

struct ExperimentReport {
  ExperimentConfig config;
  double de_m = 0.0;
  std::vector<CellReport> cells;

  const CellReport& cell(std::size_t size, PipelineKind pipeline) const;
  nlohmann::json to_json(bool include_raw) const;
  std::string to_table() const;
};

ExperimentReport run_experiment(const ExperimentConfig& config);
// Same, with the ground-truth model supplied directly (config.model_path unused).
ExperimentReport run_experiment(const ExperimentConfig& config, const CausalModel& model);

}  // namespace causalfair
