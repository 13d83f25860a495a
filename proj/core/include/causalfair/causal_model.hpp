#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "causalfair/classifier.hpp"
#include "causalfair/dataset.hpp"
#include "causalfair/schema.hpp"

namespace causalfair {

// Conditional probability table P(child | parents). Rows are laid out in
// mixed-radix order over the parents (first parent most significant); a row of
// NaN marks a parent combination with no entry.
struct Cpt {
  std::size_t child = 0;
  std::vector<std::size_t> parents;
  std::vector<double> table;

  std::size_t num_rows(const Schema& schema) const;
  std::size_t row_of(const Schema& schema, std::span<const int> state) const;
  double probability(const Schema& schema, std::span<const int> state) const;
  std::span<const double> row(const Schema& schema, std::size_t r) const;
  // Parent values of row r, in `parents` order.
  std::vector<int> parent_values(const Schema& schema, std::size_t r) const;
};

// Parents of every attribute, indexed by schema column.
using ParentStructure = std::vector<std::vector<std::size_t>>;

// A discrete Markovian causal model: one CPT per attribute. The label CPT can
// be overridden by a classifier, which turns M into M_h. Models may be
// constructed in an inadmissible state; validate() reports what is wrong and
// every query rejects such models.
class CausalModel {
 public:
  CausalModel(std::shared_ptr<const Schema> schema, std::vector<Cpt> cpts);

  const Schema& schema() const { return *schema_; }
  const std::shared_ptr<const Schema>& schema_ptr() const { return schema_; }
  const std::vector<Cpt>& cpts() const { return cpts_; }
  const Cpt& cpt(std::size_t attribute) const { return cpts_[attribute]; }
  ParentStructure parents() const;

  const ClassifierPtr& label_override() const { return label_override_; }
  bool has_label_override() const { return label_override_ != nullptr; }

  // P(v_i | pa_i) for one factor, honoring the label override.
  double factor(std::size_t attribute, std::span<const int> state) const;

  // Deterministic topological order; ties among ready nodes go to the
  // lexicographically smallest attribute name. Throws DomainError on a cycle.
  std::vector<std::size_t> topological_order() const;

 private:
  friend CausalModel with_classifier(const CausalModel&, ClassifierPtr);

  std::shared_ptr<const Schema> schema_;
  std::vector<Cpt> cpts_;
  ClassifierPtr label_override_;
};

enum class ViolationKind {
  kSchema,
  kCycle,
  kNotNormalized,
  kOutOfRange,
  kMissingRow,
  kProtectedHasParent,
  kLabelHasChild,
  kNonBinary,
  kOverrideMismatch,
};

struct Violation {
  ViolationKind kind;
  std::string attribute;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

// Lists every violated invariant; never throws.
ValidationReport validate(const CausalModel& model);
// Throws DomainError carrying the report summary unless the model is admissible.
void require_valid(const CausalModel& model);

struct InferenceOptions {
  std::uint64_t max_states = std::uint64_t{1} << 20;
};

// ∏ P(v_i | pa_i) for a full assignment of a model without label override.
double joint_probability(const CausalModel& model, const Assignment& full);

// P(L = label | do(C = c)) by the truncated factorization, summing over every
// combination of the remaining attributes.
double interventional_probability(const CausalModel& model, int c, int label,
                                  const InferenceOptions& options = {});

// P(L = label | C = c) = P(label, c) / P(c) from the full joint.
double conditional_label_probability(const CausalModel& model, int c, int label,
                                     const InferenceOptions& options = {});

// DE_M (or DE_Mh when the label is overridden) = P(l⁺|c⁺) − P(l⁺|c⁻).
double true_discrimination(const CausalModel& model, const InferenceOptions& options = {});

// n i.i.d. rows by ancestral sampling; row i draws from stream (seed, i).
Dataset sample(const CausalModel& model, std::size_t n, std::uint64_t seed);

// Laplace-smoothed maximum-likelihood CPTs for a given structure.
CausalModel fit_cpts(const ParentStructure& dag, const Dataset& data, double alpha = 0.0);

// M_h: copy of `model` whose label mechanism is `h`.
CausalModel with_classifier(const CausalModel& model, ClassifierPtr h);

}  // namespace causalfair
