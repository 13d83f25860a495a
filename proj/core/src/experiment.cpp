#include "causalfair/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "causalfair/bounds.hpp"
#include "causalfair/error.hpp"
#include "causalfair/io.hpp"

namespace causalfair {

using nlohmann::json;

std::string_view pipeline_name(PipelineKind kind) {
  switch (kind) {
    case PipelineKind::kNone:
      return "none";
    case PipelineKind::kTwoPhase:
      return "two_phase";
    case PipelineKind::kTwoPhaseNoTweak:
      return "two_phase_no_tweak";
    case PipelineKind::kDi:
      return "di";
  }
  return "none";
}

PipelineKind parse_pipeline(std::string_view text) {
  if (text == "none") return PipelineKind::kNone;
  if (text == "two_phase") return PipelineKind::kTwoPhase;
  if (text == "two_phase_no_tweak") return PipelineKind::kTwoPhaseNoTweak;
  if (text == "di") return PipelineKind::kDi;
  throw DomainError("unknown pipeline '" + std::string(text) + "'");
}

Trainer TrainerConfig::make() const {
  if (kind == Kind::kTree) {
    const std::size_t d = depth;
    const TieRule tie = tie_rule;
    return [d, tie](const Dataset& data) -> ClassifierPtr { return train_tree(data, d, tie); };
  }
  const TieRule tie = tie_rule;
  return [tie](const Dataset& data) -> ClassifierPtr { return train_tabular(data, tie); };
}

std::string TrainerConfig::describe() const {
  if (kind == Kind::kTree) return "tree(depth=" + std::to_string(depth) + ")";
  return "tabular";
}

void ExperimentConfig::check() const {
  if (sample_sizes.empty()) throw DomainError("no sample sizes configured");
  for (auto n : sample_sizes) {
    if (n < 10) throw DomainError("sample sizes must be >= 10");
  }
  if (repetitions < 1) throw DomainError("repetitions must be >= 1");
  if (!(tau >= 0.0)) throw DomainError("tau must be >= 0");
  if (!(bound_t > 0.0)) throw DomainError("bound_t must be > 0");
  if (pipelines.empty()) throw DomainError("no pipelines configured");
  if (trainer.kind == TrainerConfig::Kind::kTree && trainer.depth < 1) {
    throw DomainError("tree depth must be >= 1");
  }
}

json ExperimentConfig::to_json() const {
  json j;
  j["model_path"] = model_path;
  j["sample_sizes"] = sample_sizes;
  j["repetitions"] = repetitions;
  j["base_seed"] = base_seed;
  json t;
  t["kind"] = trainer.kind == TrainerConfig::Kind::kTree ? "tree" : "tabular";
  if (trainer.kind == TrainerConfig::Kind::kTree) t["depth"] = trainer.depth;
  t["tie_rule"] = tie_rule_name(trainer.tie_rule);
  j["trainer"] = t;
  j["tau"] = tau;
  j["bound_t"] = bound_t;
  json p = json::array();
  for (auto k : pipelines) p.push_back(pipeline_name(k));
  j["pipelines"] = p;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  try {
    c.model_path = j.value("model_path", std::string{});
    if (j.contains("sample_sizes")) c.sample_sizes = j.at("sample_sizes").get<std::vector<std::size_t>>();
    c.repetitions = j.value("repetitions", c.repetitions);
    c.base_seed = j.value("base_seed", c.base_seed);
    c.tau = j.value("tau", c.tau);
    c.bound_t = j.value("bound_t", c.bound_t);
    c.threads = j.value("threads", c.threads);
    if (j.contains("trainer")) {
      const json& t = j.at("trainer");
      const std::string kind = t.is_string() ? t.get<std::string>() : t.at("kind").get<std::string>();
      if (kind == "tree") {
        c.trainer.kind = TrainerConfig::Kind::kTree;
      } else if (kind != "tabular") {
        throw DomainError("unknown trainer '" + kind + "'");
      }
      if (t.is_object()) {
        c.trainer.depth = t.value("depth", c.trainer.depth);
        c.trainer.tie_rule = parse_tie_rule(t.value("tie_rule", std::string("negative")));
      }
    }
    for (const char* key : {"pipelines", "pipeline"}) {
      if (!j.contains(key)) continue;
      c.pipelines.clear();
      const json& p = j.at(key);
      if (p.is_string()) {
        c.pipelines.push_back(parse_pipeline(p.get<std::string>()));
      } else {
        for (const auto& e : p) c.pipelines.push_back(parse_pipeline(e.get<std::string>()));
      }
    }
  } catch (const json::exception& e) {
    throw DomainError(std::string("bad experiment config: ") + e.what());
  }
  c.check();
  return c;
}

json RepetitionResult::to_json() const {
  return {{"repetition", repetition},
          {"seed", seed},
          {"n_pos", n_pos},
          {"n_neg", n_neg},
          {"de_d", de_d},
          {"de_dh", de_dh},
          {"de_mh", de_mh},
          {"epsilon", epsilon},
          {"de_d_original", de_d_original},
          {"bound_half_width", bound_half_width},
          {"bound_confidence", bound_confidence},
          {"satisfied", satisfied},
          {"flips", flips}};
}

Summary Summary::of(const std::vector<double>& values) {
  Summary s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  for (double v : values) {
    s.mean += v;
    s.mean_abs += std::abs(v);
  }
  s.mean /= n;
  s.mean_abs /= n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sample_variance = ss / (n - 1.0);
  }
  s.std_error = std::sqrt(s.sample_variance / n);
  return s;
}

json Summary::to_json() const {
  return {{"mean", mean},
          {"sample_variance", sample_variance},
          {"std_error", std_error},
          {"mean_abs", mean_abs}};
}

const CellReport& ExperimentReport::cell(std::size_t size, PipelineKind pipeline) const {
  for (const auto& c : cells) {
    if (c.size == size && c.pipeline == pipeline) return c;
  }
  throw DomainError("no report cell for size " + std::to_string(size) + " and pipeline " +
                    std::string(pipeline_name(pipeline)));
}

json ExperimentReport::to_json(bool include_raw) const {
  json j;
  j["config"] = config.to_json();
  j["de_m"] = de_m;
  j["variance"] = "sample variance (n - 1 denominator); std_error = sqrt(variance / repetitions)";
  json cs = json::array();
  for (const auto& c : cells) {
    json cj;
    cj["size"] = c.size;
    cj["pipeline"] = pipeline_name(c.pipeline);
    cj["repetitions"] = c.repetitions.size();
    cj["de_d"] = c.de_d.to_json();
    cj["de_dh"] = c.de_dh.to_json();
    cj["de_mh"] = c.de_mh.to_json();
    cj["epsilon"] = c.epsilon.to_json();
    cj["satisfied_fraction"] = c.satisfied_fraction;
    cj["de_mh_above_tau_fraction"] = c.de_mh_above_tau_fraction;
    cj["bound"] = {{"t", config.bound_t},
                   {"mean_half_width", c.bound_mean_half_width},
                   {"min_confidence", c.bound_min_confidence},
                   {"coverage", c.bound_coverage}};
    if (include_raw) {
      json raw = json::array();
      for (const auto& r : c.repetitions) raw.push_back(r.to_json());
      cj["raw"] = std::move(raw);
    }
    cs.push_back(std::move(cj));
  }
  j["cells"] = std::move(cs);
  return j;
}

std::string ExperimentReport::to_table() const {
  std::ostringstream out;
  out << "DE_M = " << std::fixed << std::setprecision(4) << de_m << "   trainer "
      << config.trainer.describe() << "   tau " << config.tau << "   repetitions "
      << config.repetitions << "\n";
  out << "(mean ± sample variance over repetitions)\n\n";
  out << std::left << std::setw(7) << "size" << std::setw(20) << "pipeline" << std::setw(22)
      << "DE_D" << std::setw(22) << "DE_Dh" << std::setw(22) << "DE_Mh" << std::setw(22)
      << "eps" << std::setw(7) << "sat" << "bound(t=" << config.bound_t << ")\n";
  auto cell_text = [](const Summary& s) {
    std::ostringstream c;
    c << std::fixed << std::setprecision(4) << s.mean << " ± " << std::scientific
      << std::setprecision(1) << s.sample_variance;
    return c.str();
  };
  for (const auto& c : cells) {
    out << std::left << std::setw(7) << c.size << std::setw(20) << pipeline_name(c.pipeline);
    // "±" is two bytes in UTF-8; pad by display width.
    for (const Summary* s : {&c.de_d, &c.de_dh, &c.de_mh, &c.epsilon}) {
      const std::string t = cell_text(*s);
      out << t << std::string(t.size() < 23 ? 23 - t.size() : 1, ' ');
    }
    std::ostringstream sat;
    sat << std::fixed << std::setprecision(2) << c.satisfied_fraction;
    out << std::setw(7) << sat.str();
    out << std::fixed << std::setprecision(4) << "|DE_Mh| <= " << c.bound_mean_half_width;
    if (c.bound_min_confidence > 0.0) {
      out << " @ " << std::setprecision(3) << c.bound_min_confidence;
    } else {
      out << " (vacuous)";
    }
    out << ", coverage " << std::setprecision(2) << c.bound_coverage << "\n";
  }
  return out.str();
}

namespace {

struct Task {
  std::size_t size;
  PipelineKind pipeline;
  std::size_t repetition;
};

RepetitionResult run_one(const ExperimentConfig& config, const CausalModel& model,
                         const Trainer& trainer, const Task& task) {
  RepetitionResult r;
  r.repetition = task.repetition;
  r.seed = config.base_seed + task.repetition;
  const Dataset data = sample(model, task.size, r.seed);
  r.de_d_original = empirical_discrimination(data);

  Dataset used = data;
  ClassifierPtr h;
  if (task.pipeline == PipelineKind::kNone) {
    h = trainer(data);
  } else {
    TwoPhaseOptions options;
    options.tau = config.tau;
    options.seed = r.seed;
    options.tweak = task.pipeline != PipelineKind::kTwoPhaseNoTweak;
    PipelineResult result = task.pipeline == PipelineKind::kDi
                                ? di_pipeline(data, trainer, options)
                                : two_phase(data, trainer, options);
    used = std::move(result.data);
    h = result.classifier;
    r.satisfied = result.report.satisfied;
    r.flips = result.report.flips.size();
  }
  r.n_pos = used.n_pos();
  r.n_neg = used.n_neg();
  r.de_d = empirical_discrimination(used);
  r.epsilon = error_bias(used, *h).epsilon;
  r.de_dh = empirical_predicted_discrimination(used, *h);
  r.de_mh = true_discrimination(with_classifier(model, h));
  if (task.pipeline == PipelineKind::kNone) r.satisfied = std::abs(r.de_d + r.epsilon) <= config.tau;
  const auto bound =
      prediction_bound(r.de_d, r.epsilon, h->complexity(), r.n_pos, r.n_neg, config.bound_t);
  r.bound_half_width = bound.half_width;
  r.bound_confidence = bound.confidence;
  return r;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.check();
  return run_experiment(config, load_model(config.model_path));
}

ExperimentReport run_experiment(const ExperimentConfig& config, const CausalModel& model) {
  config.check();
  require_valid(model);
  ExperimentReport report;
  report.config = config;
  report.de_m = true_discrimination(model);
  const Trainer trainer = config.trainer.make();

  std::vector<Task> tasks;
  for (auto size : config.sample_sizes) {
    for (auto p : config.pipelines) {
      for (std::size_t r = 0; r < config.repetitions; ++r) tasks.push_back({size, p, r});
    }
  }
  std::vector<RepetitionResult> results(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < tasks.size(); k = next++) {
      try {
        results[k] = run_one(config, model, trainer, tasks[k]);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(config.threads, 1, tasks.size());
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    if (!errors[k]) continue;
    try {
      std::rethrow_exception(errors[k]);
    } catch (const std::exception& e) {
      throw DomainError("experiment failed at size " + std::to_string(tasks[k].size) +
                        ", repetition " + std::to_string(tasks[k].repetition) + " (" +
                        std::string(pipeline_name(tasks[k].pipeline)) + "): " + e.what());
    }
  }

  std::size_t k = 0;
  for (auto size : config.sample_sizes) {
    for (auto p : config.pipelines) {
      CellReport cell;
      cell.size = size;
      cell.pipeline = p;
      std::vector<double> de_d, de_dh, de_mh, eps;
      double satisfied = 0, above = 0, half = 0, covered = 0;
      double min_conf = 1.0;
      for (std::size_t r = 0; r < config.repetitions; ++r, ++k) {
        const auto& res = results[k];
        cell.repetitions.push_back(res);
        de_d.push_back(res.de_d);
        de_dh.push_back(res.de_dh);
        de_mh.push_back(res.de_mh);
        eps.push_back(res.epsilon);
        satisfied += res.satisfied ? 1 : 0;
        above += std::abs(res.de_mh) > config.tau ? 1 : 0;
        half += res.bound_half_width;
        covered += std::abs(res.de_mh) <= res.bound_half_width ? 1 : 0;
        min_conf = std::min(min_conf, res.bound_confidence);
      }
      const double reps = static_cast<double>(config.repetitions);
      cell.de_d = Summary::of(de_d);
      cell.de_dh = Summary::of(de_dh);
      cell.de_mh = Summary::of(de_mh);
      cell.epsilon = Summary::of(eps);
      cell.satisfied_fraction = satisfied / reps;
      cell.de_mh_above_tau_fraction = above / reps;
      cell.bound_mean_half_width = half / reps;
      cell.bound_min_confidence = min_conf;
      cell.bound_coverage = covered / reps;
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

}  // namespace causalfair
