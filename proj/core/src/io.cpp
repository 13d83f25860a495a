#include "causalfair/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "causalfair/error.hpp"
#include "causalfair/removal.hpp"

namespace causalfair {

using nlohmann::json;

namespace {

template <typename F>
auto rethrow_as_domain(F&& parse) {
  try {
    return parse();
  } catch (const json::exception& e) {
    throw DomainError(e.what());
  }
}

template <typename T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw DomainError(std::string("bad or missing field '") + key + "': " + e.what());
  }
}

}  // namespace

json schema_to_json(const Schema& schema) {
  json attrs = json::array();
  for (const auto& a : schema.attributes()) {
    attrs.push_back({{"name", a.name}, {"domain", a.domain}, {"role", role_name(a.role)}});
  }
  return attrs;
}

static std::shared_ptr<const Schema> parse_schema(const json& j) {
  const json& attrs = j.is_object() ? j.at("attributes") : j;
  if (!attrs.is_array()) throw DomainError("'attributes' must be an array");
  std::vector<AttributeSchema> out;
  for (const auto& a : attrs) {
    AttributeSchema s;
    s.name = get<std::string>(a, "name");
    s.domain = get<std::vector<std::string>>(a, "domain");
    s.role = parse_role(get<std::string>(a, "role"));
    out.push_back(std::move(s));
  }
  return std::make_shared<const Schema>(std::move(out));
}

json model_to_json(const CausalModel& model) {
  const Schema& schema = model.schema();
  json edges = json::array();
  json cpts = json::array();
  for (const auto& cpt : model.cpts()) {
    for (auto p : cpt.parents) edges.push_back({schema[p].name, schema[cpt.child].name});
    json parents = json::array();
    for (auto p : cpt.parents) parents.push_back(schema[p].name);
    json rows = json::array();
    for (std::size_t r = 0; r < cpt.num_rows(schema); ++r) {
      const auto row = cpt.row(schema, r);
      if (std::isnan(row[0])) continue;
      json given = json::array();
      const auto values = cpt.parent_values(schema, r);
      for (std::size_t k = 0; k < values.size(); ++k) {
        given.push_back(schema[cpt.parents[k]].domain[static_cast<std::size_t>(values[k])]);
      }
      rows.push_back({{"given", given}, {"probs", std::vector<double>(row.begin(), row.end())}});
    }
    cpts.push_back({{"child", schema[cpt.child].name}, {"parents", parents}, {"rows", rows}});
  }
  json j;
  j["attributes"] = schema_to_json(schema);
  j["edges"] = edges;
  j["cpts"] = cpts;
  return j;
}

static CausalModel parse_model(const json& j) {
  auto schema = schema_from_json(j);
  std::vector<Cpt> cpts(schema->size());
  std::vector<bool> seen(schema->size(), false);
  const json& cpt_docs = j.at("cpts");
  for (const auto& doc : cpt_docs) {
    const std::size_t child = schema->index_of(get<std::string>(doc, "child"));
    if (seen[child]) throw DomainError("two CPTs for " + (*schema)[child].name);
    seen[child] = true;
    Cpt& cpt = cpts[child];
    cpt.child = child;
    for (const auto& p : get<std::vector<std::string>>(doc, "parents")) {
      cpt.parents.push_back(schema->index_of(p));
    }
    const std::size_t d = schema->domain_size(child);
    std::set<std::size_t> parent_set(cpt.parents.begin(), cpt.parents.end());
    if (parent_set.size() != cpt.parents.size() || parent_set.count(child)) {
      throw DomainError("bad parent list for " + (*schema)[child].name);
    }
    cpt.table.assign(cpt.num_rows(*schema) * d, std::numeric_limits<double>::quiet_NaN());
    std::vector<bool> filled(cpt.num_rows(*schema), false);
    for (const auto& row : doc.at("rows")) {
      const auto given = get<std::vector<std::string>>(row, "given");
      const auto probs = get<std::vector<double>>(row, "probs");
      if (given.size() != cpt.parents.size()) {
        throw DomainError("CPT row for " + (*schema)[child].name + " has the wrong arity");
      }
      if (probs.size() != d) {
        throw DomainError("CPT row for " + (*schema)[child].name + " has the wrong length");
      }
      std::size_t r = 0;
      for (std::size_t k = 0; k < given.size(); ++k) {
        const auto& parent = (*schema)[cpt.parents[k]];
        r = r * parent.domain.size() + static_cast<std::size_t>(parent.value_index(given[k]));
      }
      if (filled[r]) throw DomainError("duplicate CPT row for " + (*schema)[child].name);
      filled[r] = true;
      std::copy(probs.begin(), probs.end(), cpt.table.begin() + static_cast<std::ptrdiff_t>(r * d));
    }
  }
  for (std::size_t i = 0; i < schema->size(); ++i) {
    if (!seen[i]) throw DomainError("no CPT for " + (*schema)[i].name);
  }
  if (j.contains("edges")) {
    std::set<std::pair<std::string, std::string>> declared, implied;
    for (const auto& e : j.at("edges")) {
      const auto pair = e.get<std::vector<std::string>>();
      if (pair.size() != 2) throw DomainError("edges must be [parent, child] pairs");
      declared.emplace(pair[0], pair[1]);
    }
    for (const auto& cpt : cpts) {
      for (auto p : cpt.parents) implied.emplace((*schema)[p].name, (*schema)[cpt.child].name);
    }
    if (declared != implied) throw DomainError("'edges' disagree with the CPT parent lists");
  }
  return CausalModel(std::move(schema), std::move(cpts));
}

static ClassifierPtr parse_classifier(const json& j) {
  const std::string kind = get<std::string>(j, "kind");
  auto schema = schema_from_json(j.at("schema"));
  if (kind == "tabular") {
    auto labels = get<std::vector<int>>(j, "cell_labels");
    std::vector<double> scores;
    for (const auto& s : j.at("cell_scores")) {
      scores.push_back(s.is_null() ? std::numeric_limits<double>::quiet_NaN() : s.get<double>());
    }
    return std::make_shared<const TabularClassifier>(
        schema, std::move(labels), std::move(scores),
        parse_tie_rule(get<std::string>(j, "tie_rule")), get<std::string>(j, "description"));
  }
  if (kind == "tree") {
    std::vector<TreeClassifier::Node> nodes;
    for (const auto& n : j.at("nodes")) {
      TreeClassifier::Node node;
      if (n.contains("label")) {
        node.label = n.at("label").get<int>();
      } else {
        node.column = schema->index_of(get<std::string>(n, "attribute"));
        node.value = get<int>(n, "value");
        node.left = get<int>(n, "left");
        node.right = get<int>(n, "right");
      }
      nodes.push_back(node);
    }
    return std::make_shared<const TreeClassifier>(
        schema, std::move(nodes), HypothesisComplexity::from_json(j.at("complexity")),
        parse_tie_rule(get<std::string>(j, "tie_rule")), get<std::size_t>(j, "max_depth"));
  }
  if (kind == "random_flip") {
    auto inner = classifier_from_json(j.at("inner"));
    inner->check_compatible(*schema);
    return std::make_shared<const RandomFlipClassifier>(
        std::move(inner), RandomFlipPolicy::from_json(j.at("policy")),
        get<std::uint64_t>(j, "seed"));
  }
  throw DomainError("unknown classifier kind '" + kind + "'");
}

std::shared_ptr<const Schema> schema_from_json(const json& j) {
  return rethrow_as_domain([&] { return parse_schema(j); });
}

CausalModel model_from_json(const json& j) {
  return rethrow_as_domain([&] { return parse_model(j); });
}

ClassifierPtr classifier_from_json(const json& j) {
  return rethrow_as_domain([&] { return parse_classifier(j); });
}

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string field;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(field);
      field.clear();
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  out.push_back(field);
  return out;
}

}  // namespace

Dataset dataset_from_csv(std::string_view text, std::shared_ptr<const Schema> schema) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line != "\r") lines.push_back(line);
    start = end + 1;
  }
  if (lines.empty()) throw DomainError("CSV has no header row");
  const auto header = split_csv_line(lines[0]);
  if (header.size() != schema->size()) {
    throw DomainError("CSV header has " + std::to_string(header.size()) +
                      " columns, schema has " + std::to_string(schema->size()));
  }
  std::vector<std::size_t> column_of(header.size());
  std::set<std::size_t> used;
  for (std::size_t k = 0; k < header.size(); ++k) {
    column_of[k] = schema->index_of(header[k]);
    if (!used.insert(column_of[k]).second) throw DomainError("duplicate CSV column " + header[k]);
  }
  std::vector<int> values((lines.size() - 1) * schema->size());
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto fields = split_csv_line(lines[r]);
    if (fields.size() != header.size()) {
      throw DomainError("CSV line " + std::to_string(r + 1) + " has " +
                        std::to_string(fields.size()) + " fields");
    }
    for (std::size_t k = 0; k < fields.size(); ++k) {
      const std::size_t col = column_of[k];
      values[(r - 1) * schema->size() + col] = (*schema)[col].value_index(fields[k]);
    }
  }
  return Dataset(std::move(schema), std::move(values));
}

std::string dataset_to_csv(const Dataset& data) {
  const Schema& schema = data.schema();
  std::string out;
  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (j > 0) out += ',';
    out += schema[j].name;
  }
  out += '\n';
  for (std::size_t i = 0; i < data.n(); ++i) {
    for (std::size_t j = 0; j < schema.size(); ++j) {
      if (j > 0) out += ',';
      out += schema[j].domain[static_cast<std::size_t>(data.at(i, j))];
    }
    out += '\n';
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write " + path.string());
  out << contents;
}

json read_json(const std::filesystem::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw DomainError(path.string() + ": " + e.what());
  }
}

CausalModel load_model(const std::filesystem::path& path) {
  try {
    return model_from_json(read_json(path));
  } catch (const json::exception& e) {
    throw DomainError(path.string() + ": " + e.what());
  }
}

std::shared_ptr<const Schema> load_schema(const std::filesystem::path& path) {
  try {
    return schema_from_json(read_json(path));
  } catch (const json::exception& e) {
    throw DomainError(path.string() + ": " + e.what());
  }
}

Dataset load_dataset(const std::filesystem::path& path, std::shared_ptr<const Schema> schema) {
  return dataset_from_csv(read_file(path), std::move(schema));
}

ClassifierPtr load_classifier(const std::filesystem::path& path) {
  try {
    return classifier_from_json(read_json(path));
  } catch (const json::exception& e) {
    throw DomainError(path.string() + ": " + e.what());
  }
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

}  // namespace causalfair
