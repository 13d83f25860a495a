#include "causalfair/removal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "causalfair/error.hpp"
#include "causalfair/rng.hpp"

namespace causalfair {

Scorer cell_frequency_scorer(const Dataset& data) {
  std::shared_ptr<const TabularClassifier> table = train_tabular(data);
  return [table](std::span<const int> row) {
    const double s = table->score(row);
    return std::isnan(s) ? 0.5 : s;
  };
}

std::string_view flip_kind_name(FlipKind kind) {
  return kind == FlipKind::kPromotion ? "promotion" : "demotion";
}

namespace {

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

struct Candidate {
  std::size_t row;
  double score;
};

}  // namespace

MassageResult massage(const Dataset& data, double tau) {
  return massage(data, cell_frequency_scorer(data), tau);
}

MassageResult massage(const Dataset& data, const Scorer& scorer, double tau) {
  if (!(tau >= 0.0)) throw DomainError("tau must be >= 0");
  require_both_groups(data);

  std::vector<int> labels = data.column(data.schema().label_index());
  std::size_t positives[2] = {0, 0};
  const double size[2] = {static_cast<double>(data.n_neg()), static_cast<double>(data.n_pos())};
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (labels[i] == kPositive) ++positives[data.protected_value(i)];
  }
  auto current_de = [&] {
    return static_cast<double>(positives[kPositive]) / size[kPositive] -
           static_cast<double>(positives[kNegative]) / size[kNegative];
  };

  MassageResult result{data, {}, current_de(), current_de(), true};
  if (std::abs(result.de_before) <= tau) return result;

  const int start_sign = sign_of(result.de_before);
  const int deprived = start_sign > 0 ? kNegative : kPositive;
  const int favored = 1 - deprived;

  std::vector<Candidate> promote, demote;
  for (std::size_t i = 0; i < data.n(); ++i) {
    const int c = data.protected_value(i);
    if (c == deprived && labels[i] == kNegative) promote.push_back({i, scorer(data.row(i))});
    if (c == favored && labels[i] == kPositive) demote.push_back({i, scorer(data.row(i))});
  }
  std::stable_sort(promote.begin(), promote.end(),
                   [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
  std::stable_sort(demote.begin(), demote.end(),
                   [](const Candidate& a, const Candidate& b) { return a.score < b.score; });

  std::size_t next_promote = 0;
  std::size_t next_demote = 0;
  double best = std::abs(result.de_before);
  std::size_t best_count = 0;
  bool promotion_turn = true;
  bool reached = false;

  while (true) {
    const bool can_promote = next_promote < promote.size();
    const bool can_demote = next_demote < demote.size();
    if (!can_promote && !can_demote) break;
    const bool do_promote = promotion_turn ? can_promote : !can_demote;
    const Candidate cand = do_promote ? promote[next_promote++] : demote[next_demote++];

    FlipRecord rec;
    rec.row_index = cand.row;
    rec.old_label = labels[cand.row];
    rec.new_label = 1 - rec.old_label;
    rec.kind = do_promote ? FlipKind::kPromotion : FlipKind::kDemotion;
    rec.score = cand.score;
    labels[cand.row] = rec.new_label;
    const int c = data.protected_value(cand.row);
    if (rec.new_label == kPositive) {
      ++positives[c];
    } else {
      --positives[c];
    }
    const double de = current_de();
    rec.de_after = de;
    result.flips.push_back(rec);
    promotion_turn = !promotion_turn;

    if (std::abs(de) < best) {
      best = std::abs(de);
      best_count = result.flips.size();
    }
    if (std::abs(de) <= tau) {
      reached = true;
      best_count = result.flips.size();
      break;
    }
    // Past zero every further flip moves DE_D away from it.
    if (sign_of(de) != start_sign) break;
  }

  result.flips.resize(best_count);
  std::vector<int> final_labels = data.column(data.schema().label_index());
  for (const auto& f : result.flips) final_labels[f.row_index] = f.new_label;
  result.data = data.with_labels(final_labels);
  result.de_after = result.flips.empty() ? result.de_before : result.flips.back().de_after;
  result.reached = reached;
  return result;
}

namespace {

// Fisher–Yates with the library generator (std::shuffle is not portable).
template <typename T>
void shuffle(std::vector<T>& items, SplitMix64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[rng.below(i)]);
  }
}

// Integer counts summing to `total` closest to total * weights (largest remainder).
std::vector<std::size_t> apportion(std::size_t total, const std::vector<double>& weights) {
  std::vector<std::size_t> out(weights.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t v = 0; v < weights.size(); ++v) {
    const double exact = static_cast<double>(total) * weights[v];
    out[v] = static_cast<std::size_t>(std::floor(exact));
    assigned += out[v];
    remainders.emplace_back(exact - std::floor(exact), v);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++out[remainders[k].second];
  return out;
}

}  // namespace

Dataset di_repair(const Dataset& data, std::uint64_t seed) {
  require_both_groups(data);
  const Schema& schema = data.schema();
  const std::size_t c_col = schema.protected_index();
  const std::size_t l_col = schema.label_index();
  Dataset current = data;

  for (std::size_t col = 0; col < schema.size(); ++col) {
    if (col == c_col || col == l_col) continue;
    const std::size_t d = schema.domain_size(col);
    std::vector<int> values = data.column(col);
    std::vector<double> pooled(d, 0.0);
    for (int v : values) pooled[static_cast<std::size_t>(v)] += 1.0;
    for (auto& p : pooled) p /= static_cast<double>(data.n());

    for (int g : {kNegative, kPositive}) {
      std::vector<std::vector<std::size_t>> rows_by_value(d);
      for (std::size_t i = 0; i < data.n(); ++i) {
        if (data.protected_value(i) == g) {
          rows_by_value[static_cast<std::size_t>(values[i])].push_back(i);
        }
      }
      const auto target = apportion(data.group_size(g), pooled);
      auto rng = SplitMix64::stream(seed, col, static_cast<std::uint64_t>(g));
      std::vector<std::size_t> freed;
      for (std::size_t v = 0; v < d; ++v) {
        auto& rows = rows_by_value[v];
        if (rows.size() <= target[v]) continue;
        shuffle(rows, rng);
        freed.insert(freed.end(), rows.begin() + static_cast<std::ptrdiff_t>(target[v]), rows.end());
      }
      shuffle(freed, rng);
      std::size_t next = 0;
      for (std::size_t v = 0; v < d; ++v) {
        for (std::size_t k = rows_by_value[v].size(); k < target[v]; ++k) {
          values[freed[next++]] = static_cast<int>(v);
        }
      }
    }
    current = current.with_column(col, values);
  }
  return current;
}

std::string_view flip_target_name(FlipTarget target) {
  switch (target) {
    case FlipTarget::kNone:
      return "none";
    case FlipTarget::kPositiveToNegative:
      return "positive_to_negative";
    case FlipTarget::kNegativeToPositive:
      return "negative_to_positive";
  }
  return "none";
}

namespace {

FlipTarget parse_flip_target(std::string_view text) {
  if (text == "none") return FlipTarget::kNone;
  if (text == "positive_to_negative") return FlipTarget::kPositiveToNegative;
  if (text == "negative_to_positive") return FlipTarget::kNegativeToPositive;
  throw DomainError("unknown flip target '" + std::string(text) + "'");
}

nlohmann::json group_flip_json(const GroupFlip& g) {
  return {{"probability", g.probability},
          {"target", flip_target_name(g.target)},
          {"interval_low", g.interval_low},
          {"interval_high", g.interval_high}};
}

GroupFlip group_flip_from_json(const nlohmann::json& j) {
  GroupFlip g;
  g.probability = j.at("probability").get<double>();
  g.target = parse_flip_target(j.at("target").get<std::string>());
  g.interval_low = j.value("interval_low", g.probability);
  g.interval_high = j.value("interval_high", g.probability);
  if (!(g.probability >= 0.0 && g.probability <= 1.0)) {
    throw DomainError("flip probability outside [0, 1]");
  }
  return g;
}

GroupFlip group_policy(const GroupConfusion& g, double sigma) {
  GroupFlip out;
  const double a = g.imbalance();
  const double half = sigma / 2.0;
  const double n = static_cast<double>(g.n());
  if (std::abs(a) <= half) return out;
  if (a > half) {
    const std::size_t denom = g.fp + g.tp;
    if (denom == 0) throw InfeasibleError("no predicted positives to flip in a group with ε₁ − ε₂ > σ/2");
    out.target = FlipTarget::kPositiveToNegative;
    out.interval_low = (a - half) * n / static_cast<double>(denom);
    out.interval_high = a * n / static_cast<double>(denom);
  } else {
    const std::size_t denom = g.fn + g.tn;
    if (denom == 0) throw InfeasibleError("no predicted negatives to flip in a group with ε₁ − ε₂ < −σ/2");
    out.target = FlipTarget::kNegativeToPositive;
    out.interval_low = (-a - half) * n / static_cast<double>(denom);
    out.interval_high = -a * n / static_cast<double>(denom);
  }
  out.interval_low = std::clamp(out.interval_low, 0.0, 1.0);
  out.interval_high = std::clamp(out.interval_high, 0.0, 1.0);
  out.probability = out.interval_low;
  return out;
}

}  // namespace

nlohmann::json RandomFlipPolicy::to_json() const {
  return {{"positive_group", group_flip_json(positive_group)},
          {"negative_group", group_flip_json(negative_group)},
          {"sigma", sigma}};
}

RandomFlipPolicy RandomFlipPolicy::from_json(const nlohmann::json& j) {
  RandomFlipPolicy p;
  p.positive_group = group_flip_from_json(j.at("positive_group"));
  p.negative_group = group_flip_from_json(j.at("negative_group"));
  p.sigma = j.value("sigma", 0.0);
  return p;
}

RandomFlipPolicy compute_flip_policy(const ConfusionByGroup& confusion, double de_d_star,
                                     double tau) {
  double sigma = tau - std::abs(de_d_star);
  if (sigma < -1e-12) {
    std::ostringstream msg;
    msg << "|DE_D*| = " << std::abs(de_d_star) << " exceeds tau = " << tau
        << "; repair the training data before tweaking the classifier";
    throw PhaseOrderError(msg.str());
  }
  sigma = std::max(sigma, 0.0);
  RandomFlipPolicy policy;
  policy.sigma = sigma;
  policy.positive_group = group_policy(confusion.positive, sigma);
  policy.negative_group = group_policy(confusion.negative, sigma);
  return policy;
}

RandomFlipPolicy compute_flip_policy(const Dataset& data_star, const Classifier& h_star,
                                     double tau) {
  return compute_flip_policy(confusion_by_group(data_star, h_star),
                             empirical_discrimination(data_star), tau);
}

RandomFlipClassifier::RandomFlipClassifier(ClassifierPtr inner, RandomFlipPolicy policy,
                                           std::uint64_t seed)
    : Classifier(inner ? inner->schema_ptr() : nullptr,
                 inner ? inner->complexity() : HypothesisComplexity::finite(1),
                 inner ? "random flip over " + inner->description() : ""),
      inner_(std::move(inner)),
      policy_(policy),
      seed_(seed),
      indexer_(schema()) {}

int RandomFlipClassifier::predict(std::span<const int> row) const {
  const int y = inner_->predict(row);
  const GroupFlip& g = policy_.group(row[schema().protected_index()]);
  if (g.probability <= 0.0) return y;
  if (g.target == FlipTarget::kPositiveToNegative && y != kPositive) return y;
  if (g.target == FlipTarget::kNegativeToPositive && y != kNegative) return y;
  if (g.target == FlipTarget::kNone) return y;
  auto rng = SplitMix64::stream(seed_, indexer_.index(row));
  return rng.uniform() < g.probability ? 1 - y : y;
}

nlohmann::json RandomFlipClassifier::to_json() const {
  auto j = base_json("random_flip");
  j["seed"] = seed_;
  j["policy"] = policy_.to_json();
  j["inner"] = inner_->to_json();
  return j;
}

ClassifierPtr apply_random_flip(ClassifierPtr h, const RandomFlipPolicy& policy,
                                std::uint64_t seed) {
  if (!h) throw DomainError("null classifier");
  return std::make_shared<const RandomFlipClassifier>(std::move(h), policy, seed);
}

std::string_view outcome_name(Outcome outcome) {
  switch (outcome) {
    case Outcome::kAlreadyFair:
      return "already_fair";
    case Outcome::kFairAfterTraining:
      return "fair_after_training";
    case Outcome::kFairAfterTweak:
      return "fair_after_tweak";
    case Outcome::kUnsatisfied:
      return "unsatisfied";
  }
  return "unsatisfied";
}

nlohmann::json FlipRecord::to_json() const {
  return {{"row_index", row_index},
          {"kind", flip_kind_name(kind)},
          {"old_label", old_label},
          {"new_label", new_label},
          {"score", score},
          {"de_after", de_after}};
}

namespace {

nlohmann::json flips_json(const std::vector<FlipRecord>& flips) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& f : flips) out.push_back(f.to_json());
  return out;
}

}  // namespace

nlohmann::json MassageResult::to_json() const {
  return {{"de_d_before", de_before},
          {"de_d_after", de_after},
          {"reached", reached},
          {"num_flips", flips.size()},
          {"flips", flips_json(flips)}};
}

nlohmann::json TwoPhaseReport::to_json() const {
  nlohmann::json j;
  j["pipeline"] = pipeline;
  j["tau"] = tau;
  j["de_d_before"] = de_d_before;
  j["epsilon_before"] = epsilon_before;
  j["de_d_after"] = de_d_after;
  j["epsilon_after_training"] = epsilon_after_training;
  j["epsilon_after_tweak"] = epsilon_after_tweak;
  j["criterion_value"] = criterion_value;
  j["satisfied"] = satisfied;
  j["outcome"] = outcome_name(outcome);
  j["tweaked"] = tweaked;
  j["flip_attempts"] = flip_attempts;
  j["flip_seed"] = flip_seed;
  j["massage_reached"] = massage_reached;
  j["labels_only"] = labels_only;
  j["policy"] = policy.to_json();
  j["num_flips"] = flips.size();
  j["flips"] = flips_json(flips);
  j["warnings"] = warnings;
  return j;
}

namespace {

bool same_non_label_columns(const Dataset& a, const Dataset& b) {
  if (a.n() != b.n() || !(a.schema() == b.schema())) return false;
  const std::size_t l = a.schema().label_index();
  for (std::size_t i = 0; i < a.n(); ++i) {
    for (std::size_t j = 0; j < a.width(); ++j) {
      if (j != l && a.at(i, j) != b.at(i, j)) return false;
    }
  }
  return true;
}

std::string fmt(double x) {
  std::ostringstream out;
  out << x;
  return out.str();
}

}  // namespace

PipelineResult two_phase(const Dataset& data, const Trainer& trainer,
                         const TwoPhaseOptions& options) {
  if (!(options.tau >= 0.0)) throw DomainError("tau must be >= 0");
  require_both_groups(data);
  TwoPhaseReport report;
  report.pipeline = "two_phase";
  report.tau = options.tau;

  ClassifierPtr h = trainer(data);
  report.de_d_before = empirical_discrimination(data);
  report.epsilon_before = error_bias(data, *h).epsilon;
  const double initial = std::abs(report.de_d_before + report.epsilon_before);
  if (initial <= options.tau) {
    report.de_d_after = report.de_d_before;
    report.epsilon_after_training = report.epsilon_after_tweak = report.epsilon_before;
    report.criterion_value = initial;
    report.outcome = Outcome::kAlreadyFair;
    report.satisfied = true;
    return {data, h, report};
  }

  // Phase 1: labels-only repair.
  MassageResult m = massage(data, std::min(options.repair_target, options.tau));
  report.flips = m.flips;
  report.de_d_after = m.de_after;
  report.massage_reached = std::abs(m.de_after) <= options.tau;
  if (!report.massage_reached) {
    report.warnings.push_back("massaging could not reach |DE_D*| <= tau; best |DE_D*| = " +
                              fmt(std::abs(m.de_after)));
  }
  if (!same_non_label_columns(data, m.data)) {
    throw std::logic_error("massaging modified a non-label column");
  }
  const Dataset& d_star = m.data;

  // Phase 2: train on D*, tweak if needed.
  ClassifierPtr h_star = trainer(d_star);
  const ConfusionByGroup confusion = confusion_by_group(d_star, *h_star);
  report.epsilon_after_training = error_bias(confusion).epsilon;
  report.epsilon_after_tweak = report.epsilon_after_training;
  report.criterion_value = std::abs(report.de_d_after + report.epsilon_after_training);
  ClassifierPtr final_h = h_star;

  if (report.criterion_value <= options.tau) {
    report.outcome = Outcome::kFairAfterTraining;
  } else if (!options.tweak) {
    report.outcome = Outcome::kUnsatisfied;
  } else if (!report.massage_reached) {
    report.outcome = Outcome::kUnsatisfied;
    report.warnings.push_back("classifier tweaking skipped: training data still exceeds tau");
  } else {
    report.policy = compute_flip_policy(confusion, report.de_d_after, options.tau);
    report.tweaked = true;
    double best = std::numeric_limits<double>::infinity();
    const int attempts = std::max(options.max_flip_attempts, 1);
    for (int k = 0; k < attempts; ++k) {
      const std::uint64_t flip_seed =
          k == 0 ? options.seed : SplitMix64::stream(options.seed, static_cast<std::uint64_t>(k)).next();
      ClassifierPtr wrapped = apply_random_flip(h_star, report.policy, flip_seed);
      const double eps = error_bias(d_star, *wrapped).epsilon;
      const double crit = std::abs(report.de_d_after + eps);
      report.flip_attempts = k + 1;
      if (crit < best) {
        best = crit;
        final_h = wrapped;
        report.flip_seed = flip_seed;
        report.epsilon_after_tweak = eps;
        report.criterion_value = crit;
      }
      if (crit <= options.tau) break;
    }
    report.outcome =
        report.criterion_value <= options.tau ? Outcome::kFairAfterTweak : Outcome::kUnsatisfied;
    if (report.outcome == Outcome::kUnsatisfied) {
      report.warnings.push_back("no RandomFlip realization met the criterion in " +
                                std::to_string(report.flip_attempts) + " attempts");
    }
  }
  report.satisfied = report.criterion_value <= options.tau + 1e-12;
  return {d_star, final_h, report};
}

PipelineResult di_pipeline(const Dataset& data, const Trainer& trainer,
                           const TwoPhaseOptions& options) {
  Dataset repaired = di_repair(data, options.seed);
  PipelineResult result = two_phase(repaired, trainer, options);
  result.report.pipeline = "di";
  result.report.labels_only = same_non_label_columns(data, result.data);
  return result;
}

std::string flips_to_csv(const Dataset& data, std::span<const FlipRecord> flips) {
  const Schema& schema = data.schema();
  const auto& label = schema[schema.label_index()];
  std::ostringstream out;
  out.precision(17);
  out << "row_index,kind,group,old_label,new_label,score,de_after\n";
  for (const auto& f : flips) {
    out << f.row_index << ',' << flip_kind_name(f.kind) << ','
        << schema[schema.protected_index()].domain[static_cast<std::size_t>(
               data.protected_value(f.row_index))]
        << ',' << label.domain[static_cast<std::size_t>(f.old_label)] << ','
        << label.domain[static_cast<std::size_t>(f.new_label)] << ',' << f.score << ','
        << f.de_after << '\n';
  }
  return out.str();
}

}  // namespace causalfair
