#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "causalfair/dataset.hpp"
#include "causalfair/schema.hpp"

namespace causalfair {

// Size of the hypothesis space a classifier was drawn from: either a finite
// class (stored as ln|H| so that 2^512 is representable) or a VC dimension.
class HypothesisComplexity {
 public:
  enum class Kind { kFinite, kVc };

  static HypothesisComplexity finite(std::uint64_t size);
  static HypothesisComplexity finite_log2(double bits);
  static HypothesisComplexity vc(std::uint64_t dimension);

  Kind kind() const { return kind_; }
  double log_size() const { return log_size_; }  // ln|H|, finite only
  std::uint64_t vc_dimension() const { return vc_dimension_; }

  nlohmann::json to_json() const;
  static HypothesisComplexity from_json(const nlohmann::json& j);
  std::string describe() const;

  bool operator==(const HypothesisComplexity&) const = default;

 private:
  Kind kind_ = Kind::kFinite;
  double log_size_ = 0.0;
  std::uint64_t vc_dimension_ = 0;
};

enum class TieRule { kNegative, kPositive };
std::string_view tie_rule_name(TieRule rule);
TieRule parse_tie_rule(std::string_view text);

// A deterministic map (c, z) -> label. Predictions read a full schema row and
// ignore the label slot, so rows from datasets and enumerated model states can
// be passed directly.
class Classifier {
 public:
  Classifier(std::shared_ptr<const Schema> schema, HypothesisComplexity complexity,
             std::string description);
  virtual ~Classifier() = default;

  virtual int predict(std::span<const int> row) const = 0;
  virtual nlohmann::json to_json() const = 0;

  const Schema& schema() const { return *schema_; }
  const std::shared_ptr<const Schema>& schema_ptr() const { return schema_; }
  const HypothesisComplexity& complexity() const { return complexity_; }
  const std::string& description() const { return description_; }

  // Throws DomainError unless `other` has the same (C, Z, L) attribute space.
  void check_compatible(const Schema& other) const;

 protected:
  nlohmann::json base_json(std::string_view kind) const;

 private:
  std::shared_ptr<const Schema> schema_;
  HypothesisComplexity complexity_;
  std::string description_;
};

using ClassifierPtr = std::shared_ptr<const Classifier>;

// Mixed-radix index of a row's (c, z) values over the schema's feature columns.
class CellIndexer {
 public:
  explicit CellIndexer(const Schema& schema);
  std::uint64_t index(std::span<const int> row) const;
  std::uint64_t num_cells() const { return num_cells_; }
  // Writes the feature values of `cell` into `row` (label slot untouched).
  void decode(std::uint64_t cell, std::span<int> row) const;

 private:
  std::vector<std::size_t> columns_;
  std::vector<std::uint64_t> radix_;
  std::uint64_t num_cells_ = 1;
};

// One label per (c, z) cell, plus the training frequency P̂(l⁺ | c, z) where the
// cell was observed (NaN otherwise).
class TabularClassifier final : public Classifier {
 public:
  TabularClassifier(std::shared_ptr<const Schema> schema, std::vector<int> cell_labels,
                    std::vector<double> cell_scores, TieRule tie_rule,
                    std::string description);

  int predict(std::span<const int> row) const override;
  double score(std::span<const int> row) const;
  nlohmann::json to_json() const override;

  const std::vector<int>& cell_labels() const { return labels_; }
  const CellIndexer& indexer() const { return indexer_; }
  TieRule tie_rule() const { return tie_rule_; }

 private:
  CellIndexer indexer_;
  std::vector<int> labels_;
  std::vector<double> scores_;
  TieRule tie_rule_;
};

// Greedy information-gain tree with one-vs-rest splits (attribute == value).
class TreeClassifier final : public Classifier {
 public:
  struct Node {
    // Internal nodes: column and value tested; rows equal to value go left.
    std::size_t column = 0;
    int value = 0;
    int left = -1;
    int right = -1;
    int label = kNegative;  // leaves only
    bool is_leaf() const { return left < 0; }
  };

  TreeClassifier(std::shared_ptr<const Schema> schema, std::vector<Node> nodes,
                 HypothesisComplexity complexity, TieRule tie_rule, std::size_t max_depth);

  int predict(std::span<const int> row) const override;
  nlohmann::json to_json() const override;

  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t num_leaves() const;

 private:
  std::vector<Node> nodes_;
  TieRule tie_rule_;
  std::size_t max_depth_;
};

// Arbitrary callable. Not serializable; used for hand-built and test classifiers.
class FunctionClassifier final : public Classifier {
 public:
  using Fn = std::function<int(std::span<const int>)>;
  FunctionClassifier(std::shared_ptr<const Schema> schema, Fn fn,
                     HypothesisComplexity complexity, std::string description);

  int predict(std::span<const int> row) const override { return fn_(row); }
  nlohmann::json to_json() const override;

 private:
  Fn fn_;
};

ClassifierPtr constant_classifier(std::shared_ptr<const Schema> schema, int label);

// Majority label per observed (c, z) cell; ties and unseen cells follow tie_rule.
// Complexity is Finite(2^#cells).
std::shared_ptr<const TabularClassifier> train_tabular(const Dataset& data,
                                                        TieRule tie_rule = TieRule::kNegative);

// Complexity defaults to Vc(#leaves); pass an override to replace it.
std::shared_ptr<const TreeClassifier> train_tree(
    const Dataset& data, std::size_t max_depth, TieRule tie_rule = TieRule::kNegative,
    std::optional<HypothesisComplexity> complexity_override = std::nullopt);

struct GroupConfusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t n() const { return tp + fp + fn + tn; }
  double false_positive_rate() const;  // ε₁ = fp / n
  double false_negative_rate() const;  // ε₂ = fn / n
  // ε₁ − ε₂
  double imbalance() const { return false_positive_rate() - false_negative_rate(); }
};

struct ConfusionByGroup {
  GroupConfusion positive;  // c⁺
  GroupConfusion negative;  // c⁻
  const GroupConfusion& group(int c) const { return c == kPositive ? positive : negative; }
};

struct ErrorBias {
  double fp_rate_pos = 0.0;  // ε₁⁺
  double fn_rate_pos = 0.0;  // ε₂⁺
  double fp_rate_neg = 0.0;  // ε₁⁻
  double fn_rate_neg = 0.0;  // ε₂⁻
  double epsilon = 0.0;      // ε₁⁺ − ε₂⁺ − (ε₁⁻ − ε₂⁻)

  double recompute() const { return fp_rate_pos - fn_rate_pos - (fp_rate_neg - fn_rate_neg); }
};

ConfusionByGroup confusion_by_group(const Dataset& data, const Classifier& h);
ErrorBias error_bias(const ConfusionByGroup& confusion);
ErrorBias error_bias(const Dataset& data, const Classifier& h);

}  // namespace causalfair
