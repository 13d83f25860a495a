#include "causalfair/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "causalfair/error.hpp"

namespace causalfair {

std::string_view bound_source_name(BoundSource source) {
  switch (source) {
    case BoundSource::kSampling:
      return "sampling";
    case BoundSource::kUniform:
      return "uniform";
    case BoundSource::kPrediction:
      return "prediction";
  }
  return "sampling";
}

nlohmann::json BoundResult::to_json() const {
  nlohmann::json j;
  j["source"] = bound_source_name(source);
  j["t"] = t;
  j["half_width"] = half_width;
  j["delta"] = delta;
  j["raw_confidence"] = raw_confidence;
  j["confidence"] = confidence;
  j["vacuous"] = vacuous;
  j["n_pos"] = n_pos;
  j["n_neg"] = n_neg;
  if (complexity) j["complexity"] = complexity->to_json();
  return j;
}

namespace {

void check_inputs(std::size_t n_pos, std::size_t n_neg, double t) {
  if (n_pos < 1 || n_neg < 1) throw DomainError("both groups need at least one individual");
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("threshold t must be > 0");
}

// n⁺n⁻/n
double effective_size(std::size_t n_pos, std::size_t n_neg) {
  const double p = static_cast<double>(n_pos);
  const double m = static_cast<double>(n_neg);
  return p * m / (p + m);
}

// log(e^a + e^b) without overflow.
double log_add(double a, double b) {
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

void fill_confidence(BoundResult& r) {
  r.raw_confidence = 1.0 - r.delta;
  r.confidence = std::max(r.raw_confidence, 0.0);
  r.vacuous = r.raw_confidence <= 0.0;
}

}  // namespace

BoundResult sampling_bound(std::size_t n_pos, std::size_t n_neg, double t) {
  check_inputs(n_pos, n_neg, t);
  BoundResult r;
  r.source = BoundSource::kSampling;
  r.t = t;
  r.half_width = t;
  r.n_pos = n_pos;
  r.n_neg = n_neg;
  r.delta = 4.0 * std::exp(-effective_size(n_pos, n_neg) * t * t);
  fill_confidence(r);
  return r;
}

double log_delta(const HypothesisComplexity& complexity, std::size_t n_pos, std::size_t n_neg,
                 double t) {
  check_inputs(n_pos, n_neg, t);
  const double exponent = -effective_size(n_pos, n_neg) * t * t;
  if (complexity.kind() == HypothesisComplexity::Kind::kFinite) {
    return std::log(4.0) + 2.0 * complexity.log_size() + exponent;
  }
  const double d = static_cast<double>(complexity.vc_dimension());
  const double two_e = 2.0 * std::exp(1.0);
  const double growth = log_add(d * std::log(two_e * static_cast<double>(n_pos)),
                                d * std::log(two_e * static_cast<double>(n_neg)));
  return std::log(4.0) + growth - d * std::log(d) + exponent;
}

double delta(const HypothesisComplexity& complexity, std::size_t n_pos, std::size_t n_neg,
             double t) {
  const double log_d = log_delta(complexity, n_pos, n_neg, t);
  // exp overflows past ~709; such a delta is vacuous either way.
  if (log_d > 700.0) return std::numeric_limits<double>::infinity();
  return std::exp(log_d);
}

double invert_delta(const HypothesisComplexity& complexity, std::size_t n_pos, std::size_t n_neg,
                    double target_confidence) {
  if (!(target_confidence > 0.0 && target_confidence < 1.0)) {
    throw DomainError("target confidence must lie in (0, 1)");
  }
  constexpr double kMaxT = 2.0;
  const double log_target = std::log1p(-target_confidence);  // ln(1 − γ)
  if (log_delta(complexity, n_pos, n_neg, kMaxT) > log_target) {
    const double limit = std::max(0.0, 1.0 - delta(complexity, n_pos, n_neg, kMaxT));
    std::ostringstream msg;
    msg << "confidence " << target_confidence << " is unreachable for t <= " << kMaxT
        << "; the bound reaches at most " << limit;
    throw InfeasibleError(msg.str());
  }
  double lo = 0.0;  // δ(lo) too large (or lo = 0)
  double hi = kMaxT;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (log_delta(complexity, n_pos, n_neg, mid) <= log_target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

BoundResult uniform_bound(const HypothesisComplexity& complexity, std::size_t n_pos,
                          std::size_t n_neg, double t) {
  BoundResult r;
  r.source = BoundSource::kUniform;
  r.t = t;
  r.half_width = t;
  r.n_pos = n_pos;
  r.n_neg = n_neg;
  r.complexity = complexity;
  r.delta = delta(complexity, n_pos, n_neg, t);
  fill_confidence(r);
  return r;
}

BoundResult prediction_bound(double de_d, double eps, const HypothesisComplexity& complexity,
                             std::size_t n_pos, std::size_t n_neg, double t) {
  BoundResult r;
  r.source = BoundSource::kPrediction;
  r.t = t;
  r.n_pos = n_pos;
  r.n_neg = n_neg;
  r.complexity = complexity;
  r.delta = delta(complexity, n_pos, n_neg, t);
  r.half_width = std::abs(de_d + eps) + t;
  fill_confidence(r);
  return r;
}

}  // namespace causalfair
