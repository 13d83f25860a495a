#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace causalfair {

enum class Role { kProtected, kLabel, kNonProtected };

std::string_view role_name(Role role);
Role parse_role(std::string_view text);

// Binary attributes (protected and label) store the negative value at index 0
// and the positive value at index 1.
inline constexpr int kNegative = 0;
inline constexpr int kPositive = 1;

struct AttributeSchema {
  std::string name;
  std::vector<std::string> domain;
  Role role = Role::kNonProtected;

  int value_index(std::string_view value) const;  // throws DomainError
  bool operator==(const AttributeSchema&) const = default;
};

// Ordered attribute list. A schema may be inadmissible (no protected attribute,
// non-binary label, ...); such problems surface through problems() and through
// the accessors that need the missing piece.
class Schema {
 public:
  Schema() = default;
  explicit Schema(std::vector<AttributeSchema> attributes);

  std::size_t size() const { return attributes_.size(); }
  const AttributeSchema& operator[](std::size_t i) const { return attributes_[i]; }
  const std::vector<AttributeSchema>& attributes() const { return attributes_; }

  std::optional<std::size_t> find(std::string_view name) const;
  std::size_t index_of(std::string_view name) const;  // throws DomainError

  std::size_t protected_index() const;  // throws DomainError if absent
  std::size_t label_index() const;      // throws DomainError if absent
  // Every column except the label, in schema order: the (c, z) space.
  const std::vector<std::size_t>& feature_columns() const { return features_; }

  std::size_t domain_size(std::size_t i) const { return attributes_[i].domain.size(); }

  // Human-readable admissibility problems of the role assignment.
  std::vector<std::string> problems() const;

  // "name=value" for diagnostics.
  std::string describe_value(std::size_t attribute, int value) const;

  bool operator==(const Schema& other) const { return attributes_ == other.attributes_; }

 private:
  std::vector<AttributeSchema> attributes_;
  std::optional<std::size_t> protected_;
  std::optional<std::size_t> label_;
  std::vector<std::size_t> features_;
};

// A full or partial assignment of domain indices, one slot per schema column.
// Unassigned slots hold kUnset.
class Assignment {
 public:
  static constexpr int kUnset = -1;

  Assignment() = default;
  explicit Assignment(std::size_t width) : values_(width, kUnset) {}

  // Builds from (attribute name, value name) pairs; throws DomainError.
  static Assignment from_names(
      const Schema& schema,
      std::span<const std::pair<std::string, std::string>> entries);

  int operator[](std::size_t i) const { return values_[i]; }
  void set(std::size_t i, int value) { values_[i] = value; }
  bool is_set(std::size_t i) const { return values_[i] != kUnset; }
  bool is_full() const;
  std::size_t width() const { return values_.size(); }
  std::span<const int> values() const { return values_; }

  void check_against(const Schema& schema) const;  // throws DomainError

 private:
  std::vector<int> values_;
};

}  // namespace causalfair
