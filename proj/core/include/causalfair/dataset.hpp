#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "causalfair/schema.hpp"

namespace causalfair {

class Classifier;

// Ordered rows over a schema with one protected and one label attribute.
// Values are stored row-major as domain indices. Immutable once built.
class Dataset {
 public:
  Dataset(std::shared_ptr<const Schema> schema, std::vector<int> values);
  static Dataset from_rows(std::shared_ptr<const Schema> schema,
                           const std::vector<std::vector<int>>& rows);

  const Schema& schema() const { return *schema_; }
  const std::shared_ptr<const Schema>& schema_ptr() const { return schema_; }

  std::size_t n() const { return n_; }
  std::size_t n_pos() const { return n_pos_; }
  std::size_t n_neg() const { return n_ - n_pos_; }
  std::size_t group_size(int c) const { return c == kPositive ? n_pos() : n_neg(); }
  std::size_t width() const { return schema_->size(); }

  std::span<const int> row(std::size_t i) const {
    return {values_.data() + i * width(), width()};
  }
  int at(std::size_t i, std::size_t column) const { return values_[i * width() + column]; }
  int protected_value(std::size_t i) const { return at(i, protected_); }
  int label(std::size_t i) const { return at(i, label_); }

  std::vector<int> column(std::size_t column) const;
  // Copy with one column replaced; other columns are shared byte-for-byte.
  Dataset with_column(std::size_t column, std::span<const int> values) const;
  Dataset with_labels(std::span<const int> labels) const {
    return with_column(label_, labels);
  }

  const std::vector<int>& raw() const { return values_; }
  bool operator==(const Dataset& other) const {
    return *schema_ == *other.schema_ && values_ == other.values_;
  }

 private:
  std::shared_ptr<const Schema> schema_;
  std::vector<int> values_;
  std::size_t n_ = 0;
  std::size_t n_pos_ = 0;
  std::size_t protected_ = 0;
  std::size_t label_ = 0;
};

// P̂(event | given) over partial assignments. Slots set in both are rejected.
struct FrequencyQuery {
  Assignment event;
  Assignment given;
};

double conditional_frequency(const Dataset& data, const FrequencyQuery& query);

// Per-group tallies of rows sharing the same non-label values.
struct CellTally {
  std::size_t rows = 0;
  std::size_t positives = 0;
};
// Keyed by the (c, z) values in schema feature-column order.
using CellTallies = std::map<std::vector<int>, CellTally>;
CellTallies tally_cells(const Dataset& data);

// P̂(l⁺ | c) as a plain frequency.
double positive_rate(const Dataset& data, int c);
// P̂(l⁺ | c) = Σ_z P̂(l⁺ | c, z) P̂(z | c); identical to positive_rate up to rounding.
double positive_rate_by_decomposition(const Dataset& data, int c);

// DE_D = P̂(l⁺|c⁺) − P̂(l⁺|c⁻).
double empirical_discrimination(const Dataset& data);

// D_h: same rows, labels replaced by h(c, z).
Dataset predicted_dataset(const Dataset& data, const Classifier& h);

// DE_Dh via Σ_z 1[h(c, z) = l⁺] P̂(z | c) per group.
double empirical_predicted_discrimination(const Dataset& data, const Classifier& h);

// Throws UndefinedConditionalError naming the empty group, if any.
void require_both_groups(const Dataset& data);

}  // namespace causalfair
