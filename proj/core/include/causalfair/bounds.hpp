#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "causalfair/classifier.hpp"

namespace causalfair {

enum class BoundSource { kSampling, kUniform, kPrediction };
std::string_view bound_source_name(BoundSource source);

// A threshold t together with a lower bound on the probability that the
// relevant discrimination gap stays within it.
struct BoundResult {
  BoundSource source = BoundSource::kSampling;
  double t = 0.0;
  double half_width = 0.0;      // t, or |DE_D + ε| + t for prediction bounds
  double delta = 0.0;           // raw failure term, may exceed 1
  double raw_confidence = 0.0;  // 1 − delta, may be negative
  double confidence = 0.0;      // max(raw_confidence, 0)
  bool vacuous = false;         // raw_confidence <= 0
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  std::optional<HypothesisComplexity> complexity;

  nlohmann::json to_json() const;
};

// P(|DE_M − DE_D| ≤ t) > 1 − 4 exp(−(n⁺n⁻/n) t²).
BoundResult sampling_bound(std::size_t n_pos, std::size_t n_neg, double t);

// ln δ(t); finite: ln 4|H|² − k t², VC: ln 4((2en⁺)^d + (2en⁻)^d)/d^d − k t²,
// with k = n⁺n⁻/n.
double log_delta(const HypothesisComplexity& complexity, std::size_t n_pos,
                 std::size_t n_neg, double t);
double delta(const HypothesisComplexity& complexity, std::size_t n_pos, std::size_t n_neg,
             double t);

// Smallest t in (0, 2] with 1 − δ(t) ≥ target_confidence, by bisection to 1e−12.
// Gaps between two discrimination values never exceed 2, so a target that
// needs t > 2 throws InfeasibleError reporting the confidence reached at t = 2.
double invert_delta(const HypothesisComplexity& complexity, std::size_t n_pos,
                    std::size_t n_neg, double target_confidence);

// P(sup_h |DE_Mh − DE_Dh| ≤ t) ≥ 1 − δ(t).
BoundResult uniform_bound(const HypothesisComplexity& complexity, std::size_t n_pos,
                          std::size_t n_neg, double t);

// P(|DE_Mh| ≤ |DE_D + ε| + t) ≥ 1 − δ(t).
BoundResult prediction_bound(double de_d, double eps, const HypothesisComplexity& complexity,
                             std::size_t n_pos, std::size_t n_neg, double t);

}  // namespace causalfair
