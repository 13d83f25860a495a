#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "causalfair/causal_model.hpp"
#include "causalfair/dataset.hpp"
#include "causalfair/rng.hpp"
#include "causalfair/schema.hpp"

namespace cftest {

using namespace causalfair;

inline std::filesystem::path source_path(const std::string& relative) {
  return std::filesystem::path(CAUSALFAIR_SOURCE_DIR) / relative;
}

// C, Z, L with domains {c-, c+}, {z-, z+}, {l-, l+}.
inline std::shared_ptr<const Schema> czl_schema() {
  return std::make_shared<const Schema>(std::vector<AttributeSchema>{
      {"C", {"c-", "c+"}, Role::kProtected},
      {"Z", {"z-", "z+"}, Role::kNonProtected},
      {"L", {"l-", "l+"}, Role::kLabel},
  });
}

// (c+,z+,l+), (c+,z+,l+), (c+,z-,l-), (c-,z+,l+), (c-,z-,l-), (c-,z-,l-), (c-,z+,l-)
inline Dataset d_toy() {
  return Dataset::from_rows(czl_schema(), {{1, 1, 1},
                                           {1, 1, 1},
                                           {1, 0, 0},
                                           {0, 1, 1},
                                           {0, 0, 0},
                                           {0, 0, 0},
                                           {0, 1, 0}});
}

// C -> Z -> L; P(c+)=0.5, P(z+|c+)=0.8, P(z+|c-)=0.2, P(l+|z+)=0.9, P(l+|z-)=0.1.
// z_row overrides the (z-, z+) probabilities given c+.
inline CausalModel chain_model(std::vector<double> z_row_given_pos = {0.2, 0.8}) {
  std::vector<Cpt> cpts(3);
  cpts[0] = {0, {}, {0.5, 0.5}};
  cpts[1] = {1, {0}, {0.8, 0.2, z_row_given_pos[0], z_row_given_pos[1]}};
  cpts[2] = {2, {1}, {0.9, 0.1, 0.1, 0.9}};
  return CausalModel(czl_schema(), std::move(cpts));
}

// A Markovian model over binary attributes kept in a plain form so that
// oracles can evaluate it without the library's inference code.
// Column 0 is C (parentless), the last column is L (childless).
struct PlainModel {
  std::size_t width = 0;
  std::vector<std::vector<std::size_t>> parents;
  std::vector<std::vector<double>> p_one;  // P(v = 1 | parent row), first parent most significant

  std::size_t row_of(std::size_t i, const std::vector<int>& state) const {
    std::size_t r = 0;
    for (auto p : parents[i]) r = r * 2 + static_cast<std::size_t>(state[p]);
    return r;
  }
  double factor(std::size_t i, const std::vector<int>& state) const {
    const double q = p_one[i][row_of(i, state)];
    return state[i] == 1 ? q : 1.0 - q;
  }
};

inline PlainModel random_plain_model(SplitMix64& rng, std::size_t width) {
  PlainModel m;
  m.width = width;
  m.parents.resize(width);
  m.p_one.resize(width);
  for (std::size_t i = 1; i < width; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (rng.uniform() < 0.5) m.parents[i].push_back(j);
    }
  }
  for (std::size_t i = 0; i < width; ++i) {
    const std::size_t rows = std::size_t{1} << m.parents[i].size();
    for (std::size_t r = 0; r < rows; ++r) m.p_one[i].push_back(0.05 + 0.9 * rng.uniform());
  }
  return m;
}

inline std::shared_ptr<const Schema> plain_schema(std::size_t width) {
  std::vector<AttributeSchema> attrs;
  attrs.push_back({"C", {"c-", "c+"}, Role::kProtected});
  for (std::size_t i = 1; i + 1 < width; ++i) {
    attrs.push_back({"Z" + std::to_string(i), {"0", "1"}, Role::kNonProtected});
  }
  attrs.push_back({"L", {"l-", "l+"}, Role::kLabel});
  return std::make_shared<const Schema>(std::move(attrs));
}

inline CausalModel to_library(const PlainModel& m) {
  std::vector<Cpt> cpts;
  for (std::size_t i = 0; i < m.width; ++i) {
    Cpt cpt{i, m.parents[i], {}};
    for (double q : m.p_one[i]) {
      cpt.table.push_back(1.0 - q);
      cpt.table.push_back(q);
    }
    cpts.push_back(std::move(cpt));
  }
  return CausalModel(plain_schema(m.width), std::move(cpts));
}

// Random dataset over a schema with binary protected/label and the given
// non-label domains; both groups are guaranteed non-empty.
inline Dataset random_dataset(SplitMix64& rng, std::shared_ptr<const Schema> schema,
                              std::size_t n) {
  std::vector<std::vector<int>> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < schema->size(); ++j) {
      rows[i].push_back(static_cast<int>(rng.below(schema->domain_size(j))));
    }
  }
  const std::size_t c = schema->protected_index();
  rows[0][c] = kPositive;
  rows[n - 1][c] = kNegative;
  return Dataset::from_rows(std::move(schema), rows);
}

}  // namespace cftest
