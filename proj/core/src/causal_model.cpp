#include "causalfair/causal_model.hpp"

#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include "causalfair/error.hpp"
#include "causalfair/rng.hpp"

namespace causalfair {

std::size_t Cpt::num_rows(const Schema& schema) const {
  std::size_t rows = 1;
  for (auto p : parents) rows *= schema.domain_size(p);
  return rows;
}

std::size_t Cpt::row_of(const Schema& schema, std::span<const int> state) const {
  std::size_t r = 0;
  for (auto p : parents) r = r * schema.domain_size(p) + static_cast<std::size_t>(state[p]);
  return r;
}

double Cpt::probability(const Schema& schema, std::span<const int> state) const {
  const std::size_t d = schema.domain_size(child);
  return table[row_of(schema, state) * d + static_cast<std::size_t>(state[child])];
}

std::span<const double> Cpt::row(const Schema& schema, std::size_t r) const {
  const std::size_t d = schema.domain_size(child);
  return {table.data() + r * d, d};
}

std::vector<int> Cpt::parent_values(const Schema& schema, std::size_t r) const {
  std::vector<int> values(parents.size());
  for (std::size_t k = parents.size(); k-- > 0;) {
    const std::size_t d = schema.domain_size(parents[k]);
    values[k] = static_cast<int>(r % d);
    r /= d;
  }
  return values;
}

CausalModel::CausalModel(std::shared_ptr<const Schema> schema, std::vector<Cpt> cpts)
    : schema_(std::move(schema)), cpts_(std::move(cpts)) {
  if (!schema_) throw DomainError("causal model without schema");
  if (cpts_.size() != schema_->size()) {
    throw DomainError("causal model needs exactly one CPT per attribute");
  }
  for (std::size_t i = 0; i < cpts_.size(); ++i) {
    const auto& cpt = cpts_[i];
    if (cpt.child != i) throw DomainError("CPTs must be ordered by child attribute");
    std::set<std::size_t> seen;
    for (auto p : cpt.parents) {
      if (p >= schema_->size()) throw DomainError("CPT parent index out of range");
      if (p == i) throw DomainError("attribute " + (*schema_)[i].name + " is its own parent");
      if (!seen.insert(p).second) {
        throw DomainError("duplicate parent in the CPT of " + (*schema_)[i].name);
      }
    }
    if (cpt.table.size() != cpt.num_rows(*schema_) * schema_->domain_size(i)) {
      throw DomainError("CPT of " + (*schema_)[i].name + " has the wrong table size");
    }
  }
}

ParentStructure CausalModel::parents() const {
  ParentStructure out;
  for (const auto& c : cpts_) out.push_back(c.parents);
  return out;
}

double CausalModel::factor(std::size_t attribute, std::span<const int> state) const {
  if (label_override_ && attribute == schema_->label_index()) {
    return label_override_->predict(state) == state[attribute] ? 1.0 : 0.0;
  }
  return cpts_[attribute].probability(*schema_, state);
}

namespace {

// Kahn's algorithm over the parent relation, smallest name first. Nodes left
// unvisited lie on or downstream of a cycle.
std::vector<std::size_t> kahn_order(const Schema& schema, const std::vector<Cpt>& cpts) {
  const std::size_t n = schema.size();
  std::vector<std::size_t> pending(n, 0);
  std::vector<std::vector<std::size_t>> children(n);
  for (std::size_t i = 0; i < n; ++i) {
    pending[i] = cpts[i].parents.size();
    for (auto p : cpts[i].parents) children[p].push_back(i);
  }
  std::set<std::pair<std::string, std::size_t>> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (pending[i] == 0) ready.emplace(schema[i].name, i);
  }
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    auto [name, i] = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(i);
    for (auto c : children[i]) {
      if (--pending[c] == 0) ready.emplace(schema[c].name, c);
    }
  }
  return order;
}

std::string combination(const Schema& schema, const Cpt& cpt, std::size_t r) {
  if (cpt.parents.empty()) return "()";
  const auto values = cpt.parent_values(schema, r);
  std::string out = "(";
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k > 0) out += ", ";
    out += schema.describe_value(cpt.parents[k], values[k]);
  }
  return out + ")";
}

}  // namespace

std::vector<std::size_t> CausalModel::topological_order() const {
  auto order = kahn_order(*schema_, cpts_);
  if (order.size() != schema_->size()) throw DomainError("causal graph has a cycle");
  return order;
}

std::string ValidationReport::summary() const {
  if (ok()) return "model is admissible";
  std::ostringstream out;
  out << violations.size() << " violation(s):";
  for (const auto& v : violations) out << "\n  - " << v.message;
  return out.str();
}

ValidationReport validate(const CausalModel& model) {
  ValidationReport report;
  const Schema& schema = model.schema();
  auto add = [&](ViolationKind kind, const std::string& attribute, std::string message) {
    report.violations.push_back({kind, attribute, std::move(message)});
  };

  for (const auto& problem : schema.problems()) {
    const bool binary = problem.find("not binary") != std::string::npos;
    add(binary ? ViolationKind::kNonBinary : ViolationKind::kSchema, "", problem);
  }

  const auto order = kahn_order(schema, model.cpts());
  if (order.size() != schema.size()) {
    std::vector<bool> visited(schema.size(), false);
    for (auto i : order) visited[i] = true;
    std::string names;
    for (std::size_t i = 0; i < schema.size(); ++i) {
      if (visited[i]) continue;
      names += (names.empty() ? "" : ", ") + schema[i].name;
    }
    add(ViolationKind::kCycle, "", "causal graph has a cycle through {" + names + "}");
  }

  for (std::size_t i = 0; i < schema.size(); ++i) {
    const auto& cpt = model.cpt(i);
    const auto& name = schema[i].name;
    if (schema[i].role == Role::kProtected && !cpt.parents.empty()) {
      add(ViolationKind::kProtectedHasParent, name, "protected attribute " + name + " has parents");
    }
    for (auto p : cpt.parents) {
      if (schema[p].role == Role::kLabel) {
        add(ViolationKind::kLabelHasChild, schema[p].name, "label has child " + name);
      }
    }
    for (std::size_t r = 0; r < cpt.num_rows(schema); ++r) {
      const auto row = cpt.row(schema, r);
      bool missing = false;
      bool out_of_range = false;
      double sum = 0.0;
      for (double p : row) {
        if (std::isnan(p)) missing = true;
        if (!(p >= 0.0 && p <= 1.0)) out_of_range = true;
        sum += p;
      }
      const std::string where = "CPT row for " + name + " given " + combination(schema, cpt, r);
      if (missing) {
        add(ViolationKind::kMissingRow, name, "missing " + where);
        continue;
      }
      if (out_of_range) add(ViolationKind::kOutOfRange, name, where + " has an entry outside [0, 1]");
      if (std::abs(sum - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg.precision(17);
        msg << where << " sums to " << sum;
        add(ViolationKind::kNotNormalized, name, msg.str());
      }
    }
  }

  if (model.has_label_override() && !(model.label_override()->schema() == schema)) {
    add(ViolationKind::kOverrideMismatch, "", "label override classifier has a different schema");
  }
  return report;
}

void require_valid(const CausalModel& model) {
  auto report = validate(model);
  if (!report.ok()) throw DomainError("inadmissible causal model: " + report.summary());
}

namespace {

// Calls fn for every completion of `fixed` (unset slots range over their
// domains). Throws ResourceError if the number of completions exceeds the cap.
void for_each_state(const Schema& schema, std::vector<int> state, std::uint64_t cap,
                    const std::function<void(std::span<const int>)>& fn) {
  std::vector<std::size_t> free;
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (state[i] != Assignment::kUnset) continue;
    free.push_back(i);
    total *= schema.domain_size(i);
    if (total > cap) {
      throw ResourceError("exhaustive enumeration exceeds the cap of " + std::to_string(cap) +
                          " states (max_states)");
    }
  }
  for (auto i : free) state[i] = 0;
  while (true) {
    fn(state);
    std::size_t k = free.size();
    while (k > 0) {
      const std::size_t i = free[k - 1];
      if (++state[i] < static_cast<int>(schema.domain_size(i))) break;
      state[i] = 0;
      --k;
    }
    if (k == 0) return;
  }
}

void check_binary_value(int v, const char* what) {
  if (v != kNegative && v != kPositive) {
    throw DomainError(std::string(what) + " value must be 0 (negative) or 1 (positive)");
  }
}

}  // namespace

double joint_probability(const CausalModel& model, const Assignment& full) {
  require_valid(model);
  if (model.has_label_override()) {
    throw DomainError("joint_probability is defined for models without a label override");
  }
  full.check_against(model.schema());
  if (!full.is_full()) throw DomainError("joint_probability needs a full assignment");
  double p = 1.0;
  for (std::size_t i = 0; i < model.schema().size(); ++i) p *= model.factor(i, full.values());
  return p;
}

double interventional_probability(const CausalModel& model, int c, int label,
                                  const InferenceOptions& options) {
  require_valid(model);
  check_binary_value(c, "intervention");
  check_binary_value(label, "label");
  const Schema& schema = model.schema();
  const std::size_t c_col = schema.protected_index();
  const std::size_t l_col = schema.label_index();
  std::vector<int> state(schema.size(), Assignment::kUnset);
  state[c_col] = c;
  state[l_col] = label;
  double total = 0.0;
  for_each_state(schema, state, options.max_states, [&](std::span<const int> s) {
    double p = 1.0;
    for (std::size_t i = 0; i < schema.size(); ++i) {
      if (i == c_col) continue;  // truncated: the intervened mechanism drops out
      p *= model.factor(i, s);
    }
    total += p;
  });
  return total;
}

double conditional_label_probability(const CausalModel& model, int c, int label,
                                     const InferenceOptions& options) {
  require_valid(model);
  check_binary_value(c, "protected");
  check_binary_value(label, "label");
  const Schema& schema = model.schema();
  const std::size_t c_col = schema.protected_index();
  const std::size_t l_col = schema.label_index();
  std::vector<int> state(schema.size(), Assignment::kUnset);
  state[c_col] = c;
  double joint = 0.0;
  double marginal = 0.0;
  for_each_state(schema, state, options.max_states, [&](std::span<const int> s) {
    double p = 1.0;
    for (std::size_t i = 0; i < schema.size(); ++i) p *= model.factor(i, s);
    marginal += p;
    if (s[l_col] == label) joint += p;
  });
  if (marginal <= 0.0) {
    throw UndefinedConditionalError(std::string("P(") + (c == kPositive ? "c⁺" : "c⁻") +
                                    ") = 0 (" + schema.describe_value(c_col, c) + ")");
  }
  return joint / marginal;
}

double true_discrimination(const CausalModel& model, const InferenceOptions& options) {
  return conditional_label_probability(model, kPositive, kPositive, options) -
         conditional_label_probability(model, kNegative, kPositive, options);
}

Dataset sample(const CausalModel& model, std::size_t n, std::uint64_t seed) {
  require_valid(model);
  if (model.has_label_override()) {
    throw DomainError("sampling is defined for models without a label override");
  }
  if (n < 1) throw DomainError("sample size must be at least 1");
  const Schema& schema = model.schema();
  const auto order = model.topological_order();
  const std::size_t w = schema.size();
  std::vector<int> values(n * w, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto rng = SplitMix64::stream(seed, i);
    std::span<int> row(values.data() + i * w, w);
    for (auto a : order) {
      const auto& cpt = model.cpt(a);
      row[a] = rng.categorical(cpt.row(schema, cpt.row_of(schema, row)));
    }
  }
  return Dataset(model.schema_ptr(), std::move(values));
}

CausalModel fit_cpts(const ParentStructure& dag, const Dataset& data, double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("smoothing must be >= 0");
  const Schema& schema = data.schema();
  if (dag.size() != schema.size()) {
    throw DomainError("parent structure does not cover the dataset attributes");
  }
  std::vector<Cpt> cpts(schema.size());
  for (std::size_t i = 0; i < schema.size(); ++i) {
    cpts[i].child = i;
    cpts[i].parents = dag[i];
    for (auto p : dag[i]) {
      if (p >= schema.size()) throw DomainError("parent index out of range");
    }
    cpts[i].table.assign(cpts[i].num_rows(schema) * schema.domain_size(i), 0.0);
  }
  {
    // Structural checks only; the zero tables are not meaningful yet.
    CausalModel skeleton(data.schema_ptr(), cpts);
    for (const auto& v : validate(skeleton).violations) {
      if (v.kind == ViolationKind::kCycle || v.kind == ViolationKind::kProtectedHasParent ||
          v.kind == ViolationKind::kLabelHasChild || v.kind == ViolationKind::kSchema ||
          v.kind == ViolationKind::kNonBinary) {
        throw DomainError("parent structure is inadmissible: " + v.message);
      }
    }
  }
  for (std::size_t r = 0; r < data.n(); ++r) {
    const auto row = data.row(r);
    for (auto& cpt : cpts) {
      cpt.table[cpt.row_of(schema, row) * schema.domain_size(cpt.child) +
                static_cast<std::size_t>(row[cpt.child])] += 1.0;
    }
  }
  for (auto& cpt : cpts) {
    const std::size_t d = schema.domain_size(cpt.child);
    for (std::size_t r = 0; r < cpt.num_rows(schema); ++r) {
      double total = 0.0;
      for (std::size_t v = 0; v < d; ++v) total += cpt.table[r * d + v];
      if (total == 0.0 && alpha == 0.0) {
        throw UndefinedConditionalError("no rows for the CPT of " + schema[cpt.child].name +
                                        " given " + combination(schema, cpt, r) +
                                        " and smoothing is 0");
      }
      const double denom = total + alpha * static_cast<double>(d);
      for (std::size_t v = 0; v < d; ++v) {
        cpt.table[r * d + v] = (cpt.table[r * d + v] + alpha) / denom;
      }
    }
  }
  return CausalModel(data.schema_ptr(), std::move(cpts));
}

CausalModel with_classifier(const CausalModel& model, ClassifierPtr h) {
  if (!h) throw DomainError("null classifier");
  h->check_compatible(model.schema());
  CausalModel out = model;
  out.label_override_ = std::move(h);
  return out;
}

}  // namespace causalfair
