#include "causalfair/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "causalfair/error.hpp"
#include "causalfair/io.hpp"

namespace causalfair {

HypothesisComplexity HypothesisComplexity::finite(std::uint64_t size) {
  if (size < 1) throw DomainError("finite hypothesis space must have at least one member");
  HypothesisComplexity c;
  c.kind_ = Kind::kFinite;
  c.log_size_ = std::log(static_cast<double>(size));
  return c;
}

HypothesisComplexity HypothesisComplexity::finite_log2(double bits) {
  if (!(bits >= 0.0) || !std::isfinite(bits)) {
    throw DomainError("log2 hypothesis-space size must be a finite value >= 0");
  }
  HypothesisComplexity c;
  c.kind_ = Kind::kFinite;
  c.log_size_ = bits * std::log(2.0);
  return c;
}

HypothesisComplexity HypothesisComplexity::vc(std::uint64_t dimension) {
  if (dimension < 1) throw DomainError("VC dimension must be at least 1");
  HypothesisComplexity c;
  c.kind_ = Kind::kVc;
  c.vc_dimension_ = dimension;
  return c;
}

nlohmann::json HypothesisComplexity::to_json() const {
  if (kind_ == Kind::kVc) return {{"kind", "vc"}, {"dimension", vc_dimension_}};
  return {{"kind", "finite"}, {"log2_size", log_size_ / std::log(2.0)}};
}

HypothesisComplexity HypothesisComplexity::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "vc") return vc(j.at("dimension").get<std::uint64_t>());
  if (kind == "finite") {
    if (j.contains("size")) return finite(j.at("size").get<std::uint64_t>());
    return finite_log2(j.at("log2_size").get<double>());
  }
  throw DomainError("unknown complexity kind '" + kind + "'");
}

std::string HypothesisComplexity::describe() const {
  if (kind_ == Kind::kVc) return "VC(" + std::to_string(vc_dimension_) + ")";
  const double bits = log_size_ / std::log(2.0);
  if (bits <= 62.0) {
    return "Finite(" + std::to_string(static_cast<std::uint64_t>(std::llround(std::exp2(bits)))) + ")";
  }
  return "Finite(2^" + std::to_string(bits) + ")";
}

std::string_view tie_rule_name(TieRule rule) {
  return rule == TieRule::kPositive ? "positive" : "negative";
}

TieRule parse_tie_rule(std::string_view text) {
  if (text == "negative") return TieRule::kNegative;
  if (text == "positive") return TieRule::kPositive;
  throw DomainError("unknown tie rule '" + std::string(text) + "'");
}

namespace {

int tie_label(TieRule rule) { return rule == TieRule::kPositive ? kPositive : kNegative; }

int majority(std::size_t positives, std::size_t negatives, TieRule rule) {
  if (positives > negatives) return kPositive;
  if (negatives > positives) return kNegative;
  return tie_label(rule);
}

}  // namespace

Classifier::Classifier(std::shared_ptr<const Schema> schema, HypothesisComplexity complexity,
                       std::string description)
    : schema_(std::move(schema)),
      complexity_(complexity),
      description_(std::move(description)) {
  if (!schema_) throw DomainError("classifier without schema");
  schema_->protected_index();
  schema_->label_index();
}

void Classifier::check_compatible(const Schema& other) const {
  if (other == *schema_) return;
  throw DomainError("classifier attribute space does not match the data/model schema");
}

nlohmann::json Classifier::base_json(std::string_view kind) const {
  nlohmann::json j;
  j["kind"] = kind;
  j["schema"] = schema_to_json(*schema_);
  j["complexity"] = complexity_.to_json();
  j["description"] = description_;
  return j;
}

CellIndexer::CellIndexer(const Schema& schema) : columns_(schema.feature_columns()) {
  radix_.resize(columns_.size());
  // Last feature varies fastest.
  for (std::size_t k = columns_.size(); k-- > 0;) {
    radix_[k] = num_cells_;
    const std::uint64_t d = schema.domain_size(columns_[k]);
    if (num_cells_ > std::numeric_limits<std::uint64_t>::max() / d) {
      throw DomainError("(c, z) space too large to index");
    }
    num_cells_ *= d;
  }
}

std::uint64_t CellIndexer::index(std::span<const int> row) const {
  std::uint64_t idx = 0;
  for (std::size_t k = 0; k < columns_.size(); ++k) {
    idx += radix_[k] * static_cast<std::uint64_t>(row[columns_[k]]);
  }
  return idx;
}

void CellIndexer::decode(std::uint64_t cell, std::span<int> row) const {
  for (std::size_t k = 0; k < columns_.size(); ++k) {
    row[columns_[k]] = static_cast<int>(cell / radix_[k]);
    cell %= radix_[k];
  }
}

// --- tabular ---------------------------------------------------------------

TabularClassifier::TabularClassifier(std::shared_ptr<const Schema> schema,
                                     std::vector<int> cell_labels, std::vector<double> cell_scores,
                                     TieRule tie_rule, std::string description)
    : Classifier(schema,
                 HypothesisComplexity::finite_log2(
                     static_cast<double>(CellIndexer(*schema).num_cells())),
                 std::move(description)),
      indexer_(*schema),
      labels_(std::move(cell_labels)),
      scores_(std::move(cell_scores)),
      tie_rule_(tie_rule) {
  if (labels_.size() != indexer_.num_cells()) {
    throw DomainError("tabular classifier needs one label per (c, z) cell");
  }
  if (scores_.empty()) scores_.assign(labels_.size(), std::numeric_limits<double>::quiet_NaN());
  if (scores_.size() != labels_.size()) throw DomainError("tabular scores have the wrong length");
  for (int l : labels_) {
    if (l != kNegative && l != kPositive) throw DomainError("tabular label must be 0 or 1");
  }
}

int TabularClassifier::predict(std::span<const int> row) const {
  return labels_[indexer_.index(row)];
}

double TabularClassifier::score(std::span<const int> row) const {
  return scores_[indexer_.index(row)];
}

nlohmann::json TabularClassifier::to_json() const {
  auto j = base_json("tabular");
  j["tie_rule"] = tie_rule_name(tie_rule_);
  j["cell_labels"] = labels_;
  nlohmann::json scores = nlohmann::json::array();
  for (double s : scores_) {
    if (std::isnan(s)) {
      scores.push_back(nullptr);
    } else {
      scores.push_back(s);
    }
  }
  j["cell_scores"] = std::move(scores);
  return j;
}

std::shared_ptr<const TabularClassifier> train_tabular(const Dataset& data, TieRule tie_rule) {
  if (data.n() == 0) throw DomainError("cannot train on an empty dataset");
  CellIndexer indexer(data.schema());
  constexpr std::uint64_t kMaxCells = std::uint64_t{1} << 24;
  if (indexer.num_cells() > kMaxCells) {
    throw ResourceError("tabular classifier would need " + std::to_string(indexer.num_cells()) +
                        " cells (cap " + std::to_string(kMaxCells) + ")");
  }
  const std::size_t cells = indexer.num_cells();
  std::vector<std::size_t> pos(cells, 0), neg(cells, 0);
  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto cell = indexer.index(data.row(i));
    (data.label(i) == kPositive ? pos : neg)[cell]++;
  }
  std::vector<int> labels(cells);
  std::vector<double> scores(cells, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 0; k < cells; ++k) {
    labels[k] = majority(pos[k], neg[k], tie_rule);
    if (pos[k] + neg[k] > 0) {
      scores[k] = static_cast<double>(pos[k]) / static_cast<double>(pos[k] + neg[k]);
    }
  }
  return std::make_shared<const TabularClassifier>(
      data.schema_ptr(), std::move(labels), std::move(scores), tie_rule,
      "tabular majority over " + std::to_string(cells) + " cells, ties " +
          std::string(tie_rule_name(tie_rule)));
}

// --- tree ------------------------------------------------------------------

TreeClassifier::TreeClassifier(std::shared_ptr<const Schema> schema, std::vector<Node> nodes,
                               HypothesisComplexity complexity, TieRule tie_rule,
                               std::size_t max_depth)
    : Classifier(std::move(schema), complexity, "information-gain tree"),
      nodes_(std::move(nodes)),
      tie_rule_(tie_rule),
      max_depth_(max_depth) {
  if (nodes_.empty()) throw DomainError("tree without nodes");
  for (const auto& n : nodes_) {
    if (n.is_leaf()) continue;
    if (n.right < 0 || static_cast<std::size_t>(n.left) >= nodes_.size() ||
        static_cast<std::size_t>(n.right) >= nodes_.size() || n.column >= this->schema().size()) {
      throw DomainError("malformed tree node");
    }
  }
}

int TreeClassifier::predict(std::span<const int> row) const {
  const Node* node = &nodes_[0];
  while (!node->is_leaf()) {
    node = &nodes_[static_cast<std::size_t>(row[node->column] == node->value ? node->left
                                                                             : node->right)];
  }
  return node->label;
}

std::size_t TreeClassifier::num_leaves() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf(); }));
}

nlohmann::json TreeClassifier::to_json() const {
  auto j = base_json("tree");
  j["tie_rule"] = tie_rule_name(tie_rule_);
  j["max_depth"] = max_depth_;
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : nodes_) {
    if (n.is_leaf()) {
      nodes.push_back({{"label", n.label}});
    } else {
      nodes.push_back({{"attribute", schema()[n.column].name},
                       {"value", n.value},
                       {"left", n.left},
                       {"right", n.right}});
    }
  }
  j["nodes"] = std::move(nodes);
  return j;
}

namespace {

double entropy_bits(std::size_t pos, std::size_t neg) {
  const double n = static_cast<double>(pos + neg);
  double h = 0.0;
  for (std::size_t k : {pos, neg}) {
    if (k == 0) continue;
    const double p = static_cast<double>(k) / n;
    h -= p * std::log2(p);
  }
  return h;
}

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, std::size_t max_depth, TieRule tie_rule)
      : data_(data), max_depth_(max_depth), tie_rule_(tie_rule) {}

  std::vector<TreeClassifier::Node> build() {
    std::vector<std::size_t> rows(data_.n());
    std::iota(rows.begin(), rows.end(), 0);
    grow(rows, 0);
    return std::move(nodes_);
  }

 private:
  int grow(const std::vector<std::size_t>& rows, std::size_t depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    std::size_t pos = 0;
    for (auto r : rows) pos += data_.label(r) == kPositive ? 1 : 0;
    const std::size_t neg = rows.size() - pos;

    auto make_leaf = [&] {
      nodes_[static_cast<std::size_t>(id)].label = majority(pos, neg, tie_rule_);
      return id;
    };
    if (depth >= max_depth_ || pos == 0 || neg == 0) return make_leaf();

    // Splits with zero gain are still taken when they separate rows: a zero-gain
    // split can expose structure below it (XOR-like labels).
    const double parent_h = entropy_bits(pos, neg);
    double best_gain = -1.0;
    std::size_t best_col = 0;
    int best_value = 0;
    for (std::size_t col : data_.schema().feature_columns()) {
      const std::size_t dom = data_.schema().domain_size(col);
      // On a binary attribute both one-vs-rest splits give the same partition.
      const std::size_t values = dom == 2 ? 1 : dom;
      for (std::size_t v = 0; v < values; ++v) {
        std::size_t lp = 0, ln = 0;
        for (auto r : rows) {
          if (data_.at(r, col) != static_cast<int>(v)) continue;
          (data_.label(r) == kPositive ? lp : ln)++;
        }
        const std::size_t left = lp + ln;
        if (left == 0 || left == rows.size()) continue;
        const std::size_t rp = pos - lp, rn = neg - ln;
        const double n = static_cast<double>(rows.size());
        const double gain = parent_h - (static_cast<double>(left) / n) * entropy_bits(lp, ln) -
                            (static_cast<double>(rows.size() - left) / n) * entropy_bits(rp, rn);
        if (gain > best_gain + 1e-12) {
          best_gain = gain;
          best_col = col;
          best_value = static_cast<int>(v);
        }
      }
    }
    if (best_gain < 0.0) return make_leaf();

    std::vector<std::size_t> left_rows, right_rows;
    for (auto r : rows) {
      (data_.at(r, best_col) == best_value ? left_rows : right_rows).push_back(r);
    }
    nodes_[static_cast<std::size_t>(id)].column = best_col;
    nodes_[static_cast<std::size_t>(id)].value = best_value;
    const int l = grow(left_rows, depth + 1);
    const int r = grow(right_rows, depth + 1);
    nodes_[static_cast<std::size_t>(id)].left = l;
    nodes_[static_cast<std::size_t>(id)].right = r;
    return id;
  }

  const Dataset& data_;
  std::size_t max_depth_;
  TieRule tie_rule_;
  std::vector<TreeClassifier::Node> nodes_;
};

}  // namespace

std::shared_ptr<const TreeClassifier> train_tree(
    const Dataset& data, std::size_t max_depth, TieRule tie_rule,
    std::optional<HypothesisComplexity> complexity_override) {
  if (data.n() == 0) throw DomainError("cannot train on an empty dataset");
  if (max_depth < 1) throw DomainError("tree depth must be at least 1");
  auto nodes = TreeBuilder(data, max_depth, tie_rule).build();
  const auto leaves = static_cast<std::uint64_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const auto& n) { return n.is_leaf(); }));
  const auto complexity = complexity_override.value_or(HypothesisComplexity::vc(leaves));
  return std::make_shared<const TreeClassifier>(data.schema_ptr(), std::move(nodes), complexity,
                                                tie_rule, max_depth);
}

// --- function --------------------------------------------------------------

FunctionClassifier::FunctionClassifier(std::shared_ptr<const Schema> schema, Fn fn,
                                       HypothesisComplexity complexity, std::string description)
    : Classifier(std::move(schema), complexity, std::move(description)), fn_(std::move(fn)) {}

nlohmann::json FunctionClassifier::to_json() const {
  throw DomainError("classifier '" + description() + "' is not serializable");
}

ClassifierPtr constant_classifier(std::shared_ptr<const Schema> schema, int label) {
  return std::make_shared<const FunctionClassifier>(
      std::move(schema), [label](std::span<const int>) { return label; },
      HypothesisComplexity::finite(1), label == kPositive ? "constant l⁺" : "constant l⁻");
}

// --- confusion -------------------------------------------------------------

double GroupConfusion::false_positive_rate() const {
  if (n() == 0) throw UndefinedConditionalError("empty group in confusion table");
  return static_cast<double>(fp) / static_cast<double>(n());
}

double GroupConfusion::false_negative_rate() const {
  if (n() == 0) throw UndefinedConditionalError("empty group in confusion table");
  return static_cast<double>(fn) / static_cast<double>(n());
}

ConfusionByGroup confusion_by_group(const Dataset& data, const Classifier& h) {
  h.check_compatible(data.schema());
  require_both_groups(data);
  ConfusionByGroup out;
  for (std::size_t i = 0; i < data.n(); ++i) {
    auto& g = data.protected_value(i) == kPositive ? out.positive : out.negative;
    const bool predicted = h.predict(data.row(i)) == kPositive;
    const bool actual = data.label(i) == kPositive;
    if (predicted && actual) ++g.tp;
    if (predicted && !actual) ++g.fp;
    if (!predicted && actual) ++g.fn;
    if (!predicted && !actual) ++g.tn;
  }
  return out;
}

ErrorBias error_bias(const ConfusionByGroup& confusion) {
  ErrorBias e;
  e.fp_rate_pos = confusion.positive.false_positive_rate();
  e.fn_rate_pos = confusion.positive.false_negative_rate();
  e.fp_rate_neg = confusion.negative.false_positive_rate();
  e.fn_rate_neg = confusion.negative.false_negative_rate();
  e.epsilon = e.recompute();
  return e;
}

ErrorBias error_bias(const Dataset& data, const Classifier& h) {
  return error_bias(confusion_by_group(data, h));
}

}  // namespace causalfair
