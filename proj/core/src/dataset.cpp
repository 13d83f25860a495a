#include "causalfair/dataset.hpp"

#include <string>

#include "causalfair/classifier.hpp"
#include "causalfair/error.hpp"

namespace causalfair {

Dataset::Dataset(std::shared_ptr<const Schema> schema, std::vector<int> values)
    : schema_(std::move(schema)), values_(std::move(values)) {
  if (!schema_) throw DomainError("dataset without schema");
  const std::size_t w = schema_->size();
  if (w == 0) throw DomainError("dataset schema has no attributes");
  if (values_.size() % w != 0) {
    throw DomainError("dataset value count is not a multiple of the schema width");
  }
  protected_ = schema_->protected_index();
  label_ = schema_->label_index();
  if (schema_->domain_size(protected_) != 2 || schema_->domain_size(label_) != 2) {
    throw DomainError("protected and label attributes must be binary");
  }
  n_ = values_.size() / w;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      int v = values_[i * w + j];
      if (v < 0 || static_cast<std::size_t>(v) >= schema_->domain_size(j)) {
        throw DomainError("row " + std::to_string(i) + ": value index " + std::to_string(v) +
                          " outside the domain of " + (*schema_)[j].name);
      }
    }
    if (values_[i * w + protected_] == kPositive) ++n_pos_;
  }
}

Dataset Dataset::from_rows(std::shared_ptr<const Schema> schema,
                           const std::vector<std::vector<int>>& rows) {
  std::vector<int> values;
  const std::size_t w = schema ? schema->size() : 0;
  values.reserve(rows.size() * w);
  for (const auto& r : rows) {
    if (r.size() != w) throw DomainError("row width does not match schema");
    values.insert(values.end(), r.begin(), r.end());
  }
  return Dataset(std::move(schema), std::move(values));
}

std::vector<int> Dataset::column(std::size_t column) const {
  std::vector<int> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = at(i, column);
  return out;
}

Dataset Dataset::with_column(std::size_t column, std::span<const int> values) const {
  if (values.size() != n_) throw DomainError("replacement column has the wrong length");
  std::vector<int> copy = values_;
  for (std::size_t i = 0; i < n_; ++i) copy[i * width() + column] = values[i];
  return Dataset(schema_, std::move(copy));
}

namespace {

bool matches(std::span<const int> row, const Assignment& a) {
  for (std::size_t j = 0; j < a.width(); ++j) {
    if (a.is_set(j) && row[j] != a[j]) return false;
  }
  return true;
}

std::string group_name(const Schema& schema, int c) {
  return std::string(c == kPositive ? "c⁺" : "c⁻") + " (" +
         schema.describe_value(schema.protected_index(), c) + ")";
}

}  // namespace

void require_both_groups(const Dataset& data) {
  if (data.n_neg() == 0) {
    throw UndefinedConditionalError("no rows with " + group_name(data.schema(), kNegative));
  }
  if (data.n_pos() == 0) {
    throw UndefinedConditionalError("no rows with " + group_name(data.schema(), kPositive));
  }
}

double conditional_frequency(const Dataset& data, const FrequencyQuery& query) {
  query.event.check_against(data.schema());
  query.given.check_against(data.schema());
  for (std::size_t j = 0; j < data.width(); ++j) {
    if (query.event.is_set(j) && query.given.is_set(j)) {
      throw DomainError("event and given both fix " + data.schema()[j].name);
    }
  }
  std::size_t given = 0;
  std::size_t both = 0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    auto r = data.row(i);
    if (!matches(r, query.given)) continue;
    ++given;
    if (matches(r, query.event)) ++both;
  }
  if (given == 0) throw UndefinedConditionalError("conditioning event has no rows");
  return static_cast<double>(both) / static_cast<double>(given);
}

CellTallies tally_cells(const Dataset& data) {
  CellTallies out;
  const auto& features = data.schema().feature_columns();
  std::vector<int> key(features.size());
  for (std::size_t i = 0; i < data.n(); ++i) {
    for (std::size_t k = 0; k < features.size(); ++k) key[k] = data.at(i, features[k]);
    auto& t = out[key];
    ++t.rows;
    if (data.label(i) == kPositive) ++t.positives;
  }
  return out;
}

double positive_rate(const Dataset& data, int c) {
  std::size_t group = 0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (data.protected_value(i) != c) continue;
    ++group;
    if (data.label(i) == kPositive) ++positives;
  }
  if (group == 0) throw UndefinedConditionalError("no rows with " + group_name(data.schema(), c));
  return static_cast<double>(positives) / static_cast<double>(group);
}

double positive_rate_by_decomposition(const Dataset& data, int c) {
  const std::size_t group = data.group_size(c);
  if (group == 0) throw UndefinedConditionalError("no rows with " + group_name(data.schema(), c));
  // The protected attribute is the feature at the position it holds among the
  // feature columns.
  const auto& features = data.schema().feature_columns();
  std::size_t c_slot = 0;
  while (features[c_slot] != data.schema().protected_index()) ++c_slot;
  double total = 0.0;
  for (const auto& [key, tally] : tally_cells(data)) {
    if (key[c_slot] != c) continue;
    const double p_z = static_cast<double>(tally.rows) / static_cast<double>(group);
    const double p_l = static_cast<double>(tally.positives) / static_cast<double>(tally.rows);
    total += p_l * p_z;
  }
  return total;
}

double empirical_discrimination(const Dataset& data) {
  require_both_groups(data);
  return positive_rate(data, kPositive) - positive_rate(data, kNegative);
}

Dataset predicted_dataset(const Dataset& data, const Classifier& h) {
  h.check_compatible(data.schema());
  std::vector<int> labels(data.n());
  for (std::size_t i = 0; i < data.n(); ++i) labels[i] = h.predict(data.row(i));
  return data.with_labels(labels);
}

double empirical_predicted_discrimination(const Dataset& data, const Classifier& h) {
  h.check_compatible(data.schema());
  require_both_groups(data);
  const auto& schema = data.schema();
  const auto& features = schema.feature_columns();
  const std::size_t c_col = schema.protected_index();
  std::vector<int> row(schema.size(), 0);
  double rate[2] = {0.0, 0.0};
  for (const auto& [key, tally] : tally_cells(data)) {
    for (std::size_t k = 0; k < features.size(); ++k) row[features[k]] = key[k];
    const int c = row[c_col];
    if (h.predict(row) != kPositive) continue;
    rate[c] += static_cast<double>(tally.rows) / static_cast<double>(data.group_size(c));
  }
  return rate[kPositive] - rate[kNegative];
}

}  // namespace causalfair
