#include "causalfair/schema.hpp"

#include <algorithm>
#include <set>

#include "causalfair/error.hpp"

namespace causalfair {

std::string_view role_name(Role role) {
  switch (role) {
    case Role::kProtected:
      return "protected";
    case Role::kLabel:
      return "label";
    case Role::kNonProtected:
      return "nonprotected";
  }
  return "nonprotected";
}

Role parse_role(std::string_view text) {
  if (text == "protected") return Role::kProtected;
  if (text == "label") return Role::kLabel;
  if (text == "nonprotected") return Role::kNonProtected;
  throw DomainError("unknown attribute role '" + std::string(text) + "'");
}

int AttributeSchema::value_index(std::string_view value) const {
  auto it = std::find(domain.begin(), domain.end(), value);
  if (it == domain.end()) {
    throw DomainError("value '" + std::string(value) + "' is not in the domain of " + name);
  }
  return static_cast<int>(it - domain.begin());
}

Schema::Schema(std::vector<AttributeSchema> attributes) : attributes_(std::move(attributes)) {
  std::set<std::string_view> names;
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    const auto& a = attributes_[i];
    if (a.name.empty()) throw DomainError("attribute with empty name");
    if (!names.insert(a.name).second) throw DomainError("duplicate attribute " + a.name);
    std::set<std::string_view> values(a.domain.begin(), a.domain.end());
    if (values.size() != a.domain.size()) {
      throw DomainError("duplicate value in the domain of " + a.name);
    }
    if (a.role == Role::kProtected && !protected_) protected_ = i;
    if (a.role == Role::kLabel && !label_) label_ = i;
    if (a.role != Role::kLabel) features_.push_back(i);
  }
}

std::optional<std::size_t> Schema::find(std::string_view name) const {
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (attributes_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t Schema::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw DomainError("unknown attribute '" + std::string(name) + "'");
}

std::size_t Schema::protected_index() const {
  if (!protected_) throw DomainError("schema has no protected attribute");
  return *protected_;
}

std::size_t Schema::label_index() const {
  if (!label_) throw DomainError("schema has no label attribute");
  return *label_;
}

std::vector<std::string> Schema::problems() const {
  std::vector<std::string> out;
  std::size_t n_protected = 0;
  std::size_t n_label = 0;
  for (const auto& a : attributes_) {
    if (a.domain.size() < 2) out.push_back(a.name + " has fewer than two domain values");
    if (a.role == Role::kProtected) {
      ++n_protected;
      if (a.domain.size() != 2) out.push_back("protected attribute " + a.name + " is not binary");
    }
    if (a.role == Role::kLabel) {
      ++n_label;
      if (a.domain.size() != 2) out.push_back("label attribute " + a.name + " is not binary");
    }
  }
  if (n_protected != 1) {
    out.push_back("expected exactly one protected attribute, found " + std::to_string(n_protected));
  }
  if (n_label != 1) {
    out.push_back("expected exactly one label attribute, found " + std::to_string(n_label));
  }
  return out;
}

std::string Schema::describe_value(std::size_t attribute, int value) const {
  const auto& a = attributes_[attribute];
  if (value < 0 || static_cast<std::size_t>(value) >= a.domain.size()) {
    return a.name + "=<" + std::to_string(value) + ">";
  }
  return a.name + "=" + a.domain[static_cast<std::size_t>(value)];
}

Assignment Assignment::from_names(const Schema& schema,
                                  std::span<const std::pair<std::string, std::string>> entries) {
  Assignment out(schema.size());
  for (const auto& [name, value] : entries) {
    std::size_t i = schema.index_of(name);
    out.set(i, schema[i].value_index(value));
  }
  return out;
}

bool Assignment::is_full() const {
  return std::none_of(values_.begin(), values_.end(), [](int v) { return v == kUnset; });
}

void Assignment::check_against(const Schema& schema) const {
  if (values_.size() != schema.size()) {
    throw DomainError("assignment width " + std::to_string(values_.size()) +
                      " does not match schema width " + std::to_string(schema.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    int v = values_[i];
    if (v == kUnset) continue;
    if (v < 0 || static_cast<std::size_t>(v) >= schema.domain_size(i)) {
      throw DomainError("value index " + std::to_string(v) + " outside the domain of " +
                        schema[i].name);
    }
  }
}

}  // namespace causalfair
