#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include "causalfair/bounds.hpp"
#include "causalfair/causal_model.hpp"
#include "causalfair/classifier.hpp"
#include "causalfair/dataset.hpp"
#include "causalfair/error.hpp"
#include "causalfair/experiment.hpp"
#include "causalfair/io.hpp"
#include "causalfair/removal.hpp"

namespace cf = causalfair;
using nlohmann::json;

namespace {

void emit(const json& j) { std::cout << cf::dump_json(j); }

void save_or_print(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    cf::write_file(path, text);
  }
}

std::string group_label(const cf::Schema& schema, int c) {
  return schema.describe_value(schema.protected_index(), c);
}

struct DataArgs {
  std::string data;
  std::string schema;

  void attach(CLI::App* cmd) {
    cmd->add_option("data", data, "dataset CSV")->required()->check(CLI::ExistingFile);
    cmd->add_option("--schema", schema, "model or schema JSON describing the columns")
        ->required()
        ->check(CLI::ExistingFile);
  }
  cf::Dataset load() const { return cf::load_dataset(data, cf::load_schema(schema)); }
};

struct TrainerArgs {
  std::string kind = "tabular";
  std::size_t depth = 4;
  std::string tie = "negative";

  void attach(CLI::App* cmd) {
    cmd->add_option("--trainer", kind, "classifier family")
        ->check(CLI::IsMember({"tabular", "tree"}));
    cmd->add_option("--depth", depth, "maximum tree depth")->check(CLI::Range(1, 64));
    cmd->add_option("--tie-rule", tie, "label for tied or empty cells")
        ->check(CLI::IsMember({"negative", "positive"}));
  }
  cf::TrainerConfig config() const {
    cf::TrainerConfig c;
    c.kind = kind == "tree" ? cf::TrainerConfig::Kind::kTree : cf::TrainerConfig::Kind::kTabular;
    c.depth = depth;
    c.tie_rule = cf::parse_tie_rule(tie);
    return c;
  }
};

void print_report_summary(const cf::TwoPhaseReport& r) {
  fmt::print("pipeline          {}\n", r.pipeline);
  fmt::print("tau               {:.6g}\n", r.tau);
  fmt::print("DE_D before       {:+.6f}\n", r.de_d_before);
  fmt::print("DE_D after        {:+.6f}\n", r.de_d_after);
  fmt::print("eps (trained)     {:+.6f}\n", r.epsilon_after_training);
  if (r.tweaked) {
    fmt::print("eps (tweaked)     {:+.6f}\n", r.epsilon_after_tweak);
    fmt::print("flip policy       c+: p={:.6f} ({})   c-: p={:.6f} ({})   sigma={:.6f}\n",
               r.policy.positive_group.probability,
               cf::flip_target_name(r.policy.positive_group.target),
               r.policy.negative_group.probability,
               cf::flip_target_name(r.policy.negative_group.target), r.policy.sigma);
  }
  fmt::print("label flips       {}\n", r.flips.size());
  fmt::print("|DE_D* + eps|     {:.6f}\n", r.criterion_value);
  fmt::print("outcome           {}{}\n", cf::outcome_name(r.outcome),
             r.satisfied ? "" : " (criterion NOT met)");
  for (const auto& w : r.warnings) fmt::print("warning: {}\n", w);
}

void print_massage(const cf::Dataset& data, const cf::MassageResult& m, double tau) {
  const cf::Schema& schema = data.schema();
  const auto& label = schema[schema.label_index()];
  fmt::print("tau               {:.6g}\n", tau);
  fmt::print("DE_D before       {:+.6f}\n", m.de_before);
  fmt::print("DE_D after        {:+.6f}\n", m.de_after);
  fmt::print("reached           {}\n", m.reached ? "yes" : "no");
  fmt::print("label flips       {}\n", m.flips.size());
  for (const auto& f : m.flips) {
    fmt::print("  row {:<6} {:<9} {:<6} {} -> {}  score {:.6g}  DE_D {:+.6f}\n", f.row_index,
               cf::flip_kind_name(f.kind), group_label(schema, data.protected_value(f.row_index)),
               label.domain[static_cast<std::size_t>(f.old_label)],
               label.domain[static_cast<std::size_t>(f.new_label)], f.score, f.de_after);
  }
}

// max over values v of |P̂(v | c⁺) − P̂(v | c⁻)| for one attribute.
double marginal_gap(const cf::Dataset& data, std::size_t column) {
  std::vector<double> diff(data.schema().domain_size(column), 0.0);
  for (std::size_t i = 0; i < data.n(); ++i) {
    const int c = data.protected_value(i);
    const double w = 1.0 / static_cast<double>(data.group_size(c));
    diff[static_cast<std::size_t>(data.at(i, column))] += c == cf::kPositive ? w : -w;
  }
  double worst = 0.0;
  for (double d : diff) worst = std::max(worst, std::abs(d));
  return worst;
}

void print_bound(const cf::BoundResult& b) {
  fmt::print("source        {}\n", cf::bound_source_name(b.source));
  if (b.complexity) fmt::print("complexity    {}\n", b.complexity->describe());
  fmt::print("n+ / n-       {} / {}\n", b.n_pos, b.n_neg);
  fmt::print("t             {:.6g}\n", b.t);
  if (b.source == cf::BoundSource::kPrediction) {
    fmt::print("statement     |DE_Mh| <= {:.6g}\n", b.half_width);
  }
  fmt::print("delta         {:.6e}\n", b.delta);
  fmt::print("confidence    {:.12g}{}\n", b.confidence, b.vacuous ? "  (vacuous)" : "");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Audit and remove discrimination under a discrete causal model"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "show help for every subcommand");
  bool as_json = false;
  app.add_flag("--json", as_json, "machine-readable JSON output");

  // model validate | effect
  auto* model_cmd = app.add_subcommand("model", "inspect a causal model file");
  model_cmd->require_subcommand(1);
  std::string model_path;
  auto* validate_cmd = model_cmd->add_subcommand("validate", "check admissibility");
  validate_cmd->add_option("model", model_path, "model JSON")->required()->check(CLI::ExistingFile);
  validate_cmd->add_flag("--json", as_json);
  auto* effect_cmd = model_cmd->add_subcommand("effect", "exact DE_M by enumeration");
  effect_cmd->add_option("model", model_path, "model JSON")->required()->check(CLI::ExistingFile);
  effect_cmd->add_flag("--json", as_json);

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "draw a dataset from a model");
  std::size_t sample_n = 0;
  std::uint64_t seed = 0;
  std::string out_path;
  sample_cmd->add_option("model", model_path, "model JSON")->required()->check(CLI::ExistingFile);
  sample_cmd->add_option("-n,--n", sample_n, "number of rows")->required();
  sample_cmd->add_option("--seed", seed, "RNG seed");
  sample_cmd->add_option("-o,--out", out_path, "output CSV (default stdout)");

  // audit
  auto* audit_cmd = app.add_subcommand("audit", "dataset discrimination DE_D");
  DataArgs audit_args;
  audit_args.attach(audit_cmd);
  std::optional<double> audit_t;
  audit_cmd->add_option("--t", audit_t, "also report the sampling bound at this threshold")
      ->check(CLI::PositiveNumber);
  audit_cmd->add_flag("--json", as_json);

  // train
  auto* train_cmd = app.add_subcommand("train", "train a classifier on a dataset");
  DataArgs train_args;
  TrainerArgs trainer_args;
  train_args.attach(train_cmd);
  trainer_args.attach(train_cmd);
  train_cmd->add_option("-o,--out", out_path, "classifier JSON (default stdout)");

  // bias
  auto* bias_cmd = app.add_subcommand("bias", "per-group confusion, error bias and DE_Dh");
  DataArgs bias_args;
  std::string classifier_path;
  bias_args.attach(bias_cmd);
  bias_cmd->add_option("--classifier", classifier_path, "classifier JSON")
      ->required()
      ->check(CLI::ExistingFile);
  bias_cmd->add_flag("--json", as_json);

  // bound
  auto* bound_cmd = app.add_subcommand("bound", "evaluate or invert the probabilistic bounds");
  std::optional<std::uint64_t> finite_size, vc_dim;
  std::optional<double> finite_bits, bound_t, target_conf, de_d_arg, eps_arg;
  std::size_t n_pos = 0, n_neg = 0;
  auto* finite_opt = bound_cmd->add_option("--finite", finite_size, "finite class size |H|")
                         ->check(CLI::PositiveNumber);
  auto* bits_opt =
      bound_cmd->add_option("--finite-log2", finite_bits, "finite class size as log2|H|")
          ->check(CLI::NonNegativeNumber);
  auto* vc_opt = bound_cmd->add_option("--vc", vc_dim, "VC dimension")->check(CLI::PositiveNumber);
  finite_opt->excludes(bits_opt)->excludes(vc_opt);
  bits_opt->excludes(vc_opt);
  bound_cmd->add_option("--npos", n_pos, "size of c+ group")->required()->check(CLI::PositiveNumber);
  bound_cmd->add_option("--nneg", n_neg, "size of c- group")->required()->check(CLI::PositiveNumber);
  auto* t_opt = bound_cmd->add_option("--t", bound_t, "threshold")->check(CLI::PositiveNumber);
  auto* conf_opt =
      bound_cmd->add_option("--confidence", target_conf, "solve for the t reaching this confidence")
          ->check(CLI::Range(0.0, 1.0));
  t_opt->excludes(conf_opt);
  auto* de_d_opt = bound_cmd->add_option("--de-d", de_d_arg, "DE_D for the prediction bound");
  auto* eps_opt = bound_cmd->add_option("--eps", eps_arg, "error bias for the prediction bound");
  de_d_opt->needs(eps_opt);
  eps_opt->needs(de_d_opt);
  bound_cmd->add_flag("--json", as_json);

  // remove massaging | di
  auto* remove_cmd = app.add_subcommand("remove", "repair a training dataset");
  remove_cmd->require_subcommand(1);
  DataArgs remove_args;
  double tau = 0.05;
  std::string flips_csv;
  auto* massage_cmd = remove_cmd->add_subcommand("massaging", "labels-only massaging");
  remove_args.attach(massage_cmd);
  massage_cmd->add_option("--tau", tau, "target |DE_D|")->required()->check(CLI::NonNegativeNumber);
  massage_cmd->add_option("-o,--out", out_path, "repaired dataset CSV");
  massage_cmd->add_option("--flips-csv", flips_csv, "write flip records as CSV");
  massage_cmd->add_flag("--json", as_json);
  auto* di_cmd = remove_cmd->add_subcommand("di", "disparate-impact repair of non-label attributes");
  remove_args.attach(di_cmd);
  di_cmd->add_option("--seed", seed, "RNG seed");
  di_cmd->add_option("-o,--out", out_path, "repaired dataset CSV");
  di_cmd->add_flag("--json", as_json);

  // tweak randomflip
  auto* tweak_cmd = app.add_subcommand("tweak", "post-process a classifier");
  tweak_cmd->require_subcommand(1);
  auto* randomflip_cmd = tweak_cmd->add_subcommand("randomflip", "RandomFlip towards |DE_D + eps| <= tau");
  DataArgs tweak_args;
  tweak_args.attach(randomflip_cmd);
  randomflip_cmd->add_option("--classifier", classifier_path, "classifier JSON trained on the data")
      ->required()
      ->check(CLI::ExistingFile);
  randomflip_cmd->add_option("--tau", tau, "threshold")->required()->check(CLI::NonNegativeNumber);
  randomflip_cmd->add_option("--seed", seed, "RNG seed");
  randomflip_cmd->add_option("-o,--out", out_path, "wrapped classifier JSON");
  randomflip_cmd->add_flag("--json", as_json);

  // pipeline two-phase | di
  auto* pipeline_cmd = app.add_subcommand("pipeline", "end-to-end discrimination removal");
  pipeline_cmd->require_subcommand(1);
  DataArgs pipe_args;
  TrainerArgs pipe_trainer;
  bool no_tweak = false;
  std::string out_classifier;
  std::vector<CLI::App*> pipeline_cmds{
      pipeline_cmd->add_subcommand("two-phase", "massaging, training and RandomFlip"),
      pipeline_cmd->add_subcommand("di", "disparate-impact repair, massaging, training, RandomFlip")};
  for (auto* cmd : pipeline_cmds) {
    pipe_args.attach(cmd);
    pipe_trainer.attach(cmd);
    cmd->add_option("--tau", tau, "threshold")->check(CLI::NonNegativeNumber);
    cmd->add_option("--seed", seed, "RNG seed");
    cmd->add_flag("--no-tweak", no_tweak, "skip the classifier tweaking phase");
    cmd->add_option("--out-data", out_path, "write D* as CSV");
    cmd->add_option("--out-classifier", out_classifier, "write the final classifier as JSON");
    cmd->add_option("--flips-csv", flips_csv, "write label flips as CSV");
    cmd->add_flag("--json", as_json);
  }

  // experiment
  auto* experiment_cmd = app.add_subcommand("experiment", "seeded repetitions over sample sizes");
  std::string config_path;
  bool raw = false;
  std::optional<std::size_t> threads;
  experiment_cmd->add_option("config", config_path, "experiment config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  experiment_cmd->add_option("--model", model_path, "override the config's model path");
  experiment_cmd->add_flag("--raw", raw, "include per-repetition values in JSON");
  experiment_cmd->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  experiment_cmd->add_option("-o,--out", out_path, "write the JSON report to a file");
  experiment_cmd->add_flag("--json", as_json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code == 0) return 0;
    std::cerr << "\n" << app.help();
    return 2;
  }

  try {
    if (validate_cmd->parsed()) {
      const cf::CausalModel model = cf::load_model(model_path);
      const cf::ValidationReport report = cf::validate(model);
      if (as_json) {
        json v = json::array();
        for (const auto& x : report.violations) {
          v.push_back({{"attribute", x.attribute}, {"message", x.message}});
        }
        emit({{"ok", report.ok()}, {"violations", v}});
      } else {
        std::cout << (report.ok() ? "model is admissible\n" : report.summary());
      }
      return report.ok() ? 0 : 1;
    }

    if (effect_cmd->parsed()) {
      const cf::CausalModel model = cf::load_model(model_path);
      cf::require_valid(model);
      const double pos = cf::interventional_probability(model, cf::kPositive, cf::kPositive);
      const double neg = cf::interventional_probability(model, cf::kNegative, cf::kPositive);
      const double de = cf::true_discrimination(model);
      if (as_json) {
        emit({{"de_m", de}, {"p_pos_do_c_pos", pos}, {"p_pos_do_c_neg", neg}});
      } else {
        const auto& s = model.schema();
        fmt::print("P(l+ | do({})) = {:.6f}\n", group_label(s, cf::kPositive), pos);
        fmt::print("P(l+ | do({})) = {:.6f}\n", group_label(s, cf::kNegative), neg);
        fmt::print("DE_M = {:.3f}  ({:.10f})\n", de, de);
      }
      return 0;
    }

    if (sample_cmd->parsed()) {
      const cf::CausalModel model = cf::load_model(model_path);
      cf::require_valid(model);
      save_or_print(out_path, cf::dataset_to_csv(cf::sample(model, sample_n, seed)));
      return 0;
    }

    if (audit_cmd->parsed()) {
      const cf::Dataset data = audit_args.load();
      const double de = cf::empirical_discrimination(data);
      const double p_pos = cf::positive_rate(data, cf::kPositive);
      const double p_neg = cf::positive_rate(data, cf::kNegative);
      std::optional<cf::BoundResult> b;
      if (audit_t) b = cf::sampling_bound(data.n_pos(), data.n_neg(), *audit_t);
      if (as_json) {
        json j{{"n", data.n()},       {"n_pos", data.n_pos()}, {"n_neg", data.n_neg()},
               {"p_pos_c_pos", p_pos}, {"p_pos_c_neg", p_neg},  {"de_d", de}};
        if (b) j["sampling_bound"] = b->to_json();
        emit(j);
      } else {
        const auto& s = data.schema();
        fmt::print("rows            {} ({}: {}, {}: {})\n", data.n(), group_label(s, cf::kPositive),
                   data.n_pos(), group_label(s, cf::kNegative), data.n_neg());
        fmt::print("P(l+ | c+)      {:.6f}\n", p_pos);
        fmt::print("P(l+ | c-)      {:.6f}\n", p_neg);
        fmt::print("DE_D            {:+.6f}\n", de);
        if (b) {
          fmt::print("P(|DE_M - DE_D| <= {:.6g}) > {:.6g}{}\n", b->t, b->confidence,
                     b->vacuous ? "  (vacuous)" : "");
        }
      }
      return 0;
    }

    if (train_cmd->parsed()) {
      const cf::Dataset data = train_args.load();
      const cf::ClassifierPtr h = trainer_args.config().make()(data);
      save_or_print(out_path, cf::dump_json(h->to_json()));
      return 0;
    }

    if (bias_cmd->parsed()) {
      const cf::Dataset data = bias_args.load();
      const cf::ClassifierPtr h = cf::load_classifier(classifier_path);
      h->check_compatible(data.schema());
      const auto confusion = cf::confusion_by_group(data, *h);
      const auto eb = cf::error_bias(confusion);
      const double de_d = cf::empirical_discrimination(data);
      const double de_dh = cf::empirical_predicted_discrimination(data, *h);
      if (as_json) {
        auto group_json = [](const cf::GroupConfusion& g) {
          return json{{"tp", g.tp}, {"fp", g.fp}, {"fn", g.fn}, {"tn", g.tn}};
        };
        emit({{"confusion", {{"c_pos", group_json(confusion.positive)},
                             {"c_neg", group_json(confusion.negative)}}},
              {"fp_rate_pos", eb.fp_rate_pos},
              {"fn_rate_pos", eb.fn_rate_pos},
              {"fp_rate_neg", eb.fp_rate_neg},
              {"fn_rate_neg", eb.fn_rate_neg},
              {"epsilon", eb.epsilon},
              {"de_d", de_d},
              {"de_dh", de_dh}});
      } else {
        for (int c : {cf::kPositive, cf::kNegative}) {
          const auto& g = confusion.group(c);
          fmt::print("{:<20} tp={} fp={} fn={} tn={}\n", group_label(data.schema(), c), g.tp, g.fp,
                     g.fn, g.tn);
        }
        fmt::print("eps               {:+.6f}\n", eb.epsilon);
        fmt::print("DE_D              {:+.6f}\n", de_d);
        fmt::print("DE_Dh             {:+.6f}\n", de_dh);
      }
      return 0;
    }

    if (bound_cmd->parsed()) {
      std::optional<cf::HypothesisComplexity> complexity;
      if (finite_size) complexity = cf::HypothesisComplexity::finite(*finite_size);
      if (finite_bits) complexity = cf::HypothesisComplexity::finite_log2(*finite_bits);
      if (vc_dim) complexity = cf::HypothesisComplexity::vc(*vc_dim);
      if (de_d_arg && !complexity) {
        throw cf::DomainError("the prediction bound needs --finite, --finite-log2 or --vc");
      }
      double t = 0.0;
      if (target_conf) {
        t = cf::invert_delta(complexity.value_or(cf::HypothesisComplexity::finite(1)), n_pos,
                             n_neg, *target_conf);
      } else if (bound_t) {
        t = *bound_t;
      } else {
        throw CLI::RequiredError("--t or --confidence");
      }
      cf::BoundResult b;
      if (de_d_arg) {
        b = cf::prediction_bound(*de_d_arg, *eps_arg, *complexity, n_pos, n_neg, t);
      } else if (complexity) {
        b = cf::uniform_bound(*complexity, n_pos, n_neg, t);
      } else {
        b = cf::sampling_bound(n_pos, n_neg, t);
      }
      if (as_json) {
        emit(b.to_json());
      } else {
        print_bound(b);
      }
      return 0;
    }

    if (massage_cmd->parsed()) {
      const cf::Dataset data = remove_args.load();
      const cf::MassageResult m = cf::massage(data, tau);
      if (!out_path.empty()) cf::write_file(out_path, cf::dataset_to_csv(m.data));
      if (!flips_csv.empty()) cf::write_file(flips_csv, cf::flips_to_csv(data, m.flips));
      if (as_json) {
        json j = m.to_json();
        j["tau"] = tau;
        emit(j);
      } else {
        print_massage(data, m, tau);
      }
      if (!m.reached) {
        std::cerr << "warning: |DE_D| <= " << tau
                  << " is unreachable; kept the configuration with minimal |DE_D|\n";
      }
      return 0;
    }

    if (di_cmd->parsed()) {
      const cf::Dataset data = remove_args.load();
      const cf::Dataset repaired = cf::di_repair(data, seed);
      if (!out_path.empty()) cf::write_file(out_path, cf::dataset_to_csv(repaired));
      json gaps = json::object();
      for (std::size_t j = 0; j < data.width(); ++j) {
        if (data.schema()[j].role != cf::Role::kNonProtected) continue;
        gaps[data.schema()[j].name] = {{"before", marginal_gap(data, j)},
                                       {"after", marginal_gap(repaired, j)}};
      }
      std::size_t changed = 0;
      for (std::size_t i = 0; i < data.n(); ++i) {
        changed += !std::equal(data.row(i).begin(), data.row(i).end(), repaired.row(i).begin());
      }
      if (as_json) {
        emit({{"seed", seed},
              {"n", data.n()},
              {"de_d", cf::empirical_discrimination(data)},
              {"changed_rows", changed},
              {"max_marginal_gap", gaps}});
      } else {
        fmt::print("DE_D (unchanged)  {:+.6f}\n", cf::empirical_discrimination(data));
        fmt::print("rows changed      {} of {}\n", changed, data.n());
        fmt::print("max |P(z|c+) - P(z|c-)|, before -> after\n");
        for (const auto& [name, g] : gaps.items()) {
          fmt::print("  {:<16} {:.6f} -> {:.6f}\n", name, g["before"].get<double>(),
                     g["after"].get<double>());
        }
      }
      return 0;
    }

    if (randomflip_cmd->parsed()) {
      const cf::Dataset data = tweak_args.load();
      const cf::ClassifierPtr h = cf::load_classifier(classifier_path);
      h->check_compatible(data.schema());
      cf::TwoPhaseReport r;
      r.pipeline = "randomflip";
      r.tau = tau;
      r.de_d_before = r.de_d_after = cf::empirical_discrimination(data);
      r.epsilon_before = r.epsilon_after_training = cf::error_bias(data, *h).epsilon;
      r.policy = cf::compute_flip_policy(data, *h, tau);
      const cf::ClassifierPtr wrapped = cf::apply_random_flip(h, r.policy, seed);
      r.tweaked = true;
      r.flip_attempts = 1;
      r.flip_seed = seed;
      r.epsilon_after_tweak = cf::error_bias(data, *wrapped).epsilon;
      r.criterion_value = std::abs(r.de_d_after + r.epsilon_after_tweak);
      r.satisfied = r.criterion_value <= tau + 1e-12;
      r.outcome = r.satisfied ? cf::Outcome::kFairAfterTweak : cf::Outcome::kUnsatisfied;
      if (!out_path.empty()) cf::write_file(out_path, cf::dump_json(wrapped->to_json()));
      as_json ? emit(r.to_json()) : print_report_summary(r);
      return 0;
    }

    for (auto* cmd : pipeline_cmds) {
      if (!cmd->parsed()) continue;
      const cf::Dataset data = pipe_args.load();
      cf::TwoPhaseOptions options;
      options.tau = tau;
      options.seed = seed;
      options.tweak = !no_tweak;
      const cf::Trainer trainer = pipe_trainer.config().make();
      const cf::PipelineResult result = cmd == pipeline_cmds[0]
                                            ? cf::two_phase(data, trainer, options)
                                            : cf::di_pipeline(data, trainer, options);
      if (!out_path.empty()) cf::write_file(out_path, cf::dataset_to_csv(result.data));
      if (!out_classifier.empty()) {
        cf::write_file(out_classifier, cf::dump_json(result.classifier->to_json()));
      }
      if (!flips_csv.empty()) {
        cf::write_file(flips_csv, cf::flips_to_csv(data, result.report.flips));
      }
      as_json ? emit(result.report.to_json()) : print_report_summary(result.report);
      return 0;
    }

    if (experiment_cmd->parsed()) {
      cf::ExperimentConfig config = cf::ExperimentConfig::from_json(cf::read_json(config_path));
      if (!model_path.empty()) config.model_path = model_path;
      if (threads) config.threads = *threads;
      if (config.model_path.empty()) throw cf::DomainError("no model path in config or --model");
      const cf::ExperimentReport report = cf::run_experiment(config);
      const std::string text = cf::dump_json(report.to_json(raw));
      if (!out_path.empty()) cf::write_file(out_path, text);
      if (as_json) {
        std::cout << text;
      } else {
        std::cout << report.to_table();
      }
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const cf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
