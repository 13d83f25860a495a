#include <gtest/gtest.h>

#include "causalfair/error.hpp"
#include "causalfair/io.hpp"
#include "fixtures.hpp"

using namespace causalfair;
using cftest::chain_model;
using nlohmann::json;

namespace {

json chain_doc() { return model_to_json(chain_model()); }

}  // namespace

TEST(ModelJson, RoundTrip) {
  const auto doc = chain_doc();
  const auto back = model_from_json(doc);
  EXPECT_EQ(model_to_json(back), doc);
  EXPECT_DOUBLE_EQ(true_discrimination(back), 0.48);
}

TEST(ModelJson, DumpIsStable) {
  const auto text = dump_json(chain_doc());
  EXPECT_EQ(text.back(), '\n');
  EXPECT_EQ(dump_json(json::parse(text)), text);
}

TEST(ModelJson, MissingRowSurvivesForValidation) {
  auto doc = chain_doc();
  for (auto& cpt : doc["cpts"]) {
    if (cpt["child"] == "L") cpt["rows"].erase(0);
  }
  const auto m = model_from_json(doc);
  const auto report = validate(m);
  ASSERT_FALSE(report.ok());
  EXPECT_EQ(report.violations[0].kind, ViolationKind::kMissingRow);
}

TEST(ModelJson, RejectsMalformedDocuments) {
  auto no_attrs = chain_doc();
  no_attrs.erase("attributes");
  EXPECT_THROW(model_from_json(no_attrs), DomainError);

  auto bad_edges = chain_doc();
  bad_edges["edges"] = json::array({json::array({"C", "L"})});
  EXPECT_THROW(model_from_json(bad_edges), DomainError);

  auto dup = chain_doc();
  dup["cpts"].push_back(dup["cpts"][0]);
  EXPECT_THROW(model_from_json(dup), DomainError);

  auto arity = chain_doc();
  arity["cpts"][2]["rows"][0]["probs"] = json::array({1.0});
  EXPECT_THROW(model_from_json(arity), DomainError);

  auto unknown_value = chain_doc();
  unknown_value["cpts"][2]["rows"][0]["given"] = json::array({"z?"});
  EXPECT_THROW(model_from_json(unknown_value), DomainError);
}

TEST(ModelJson, UnnormalizedRowIsReportedNotThrown) {
  auto doc = chain_doc();
  doc["cpts"][0]["rows"][0]["probs"] = json::array({0.7, 0.7});
  const auto m = model_from_json(doc);
  EXPECT_FALSE(validate(m).ok());
  EXPECT_THROW(require_valid(m), DomainError);
}

TEST(SchemaJson, LoadsFromModelOrBareSchema) {
  const auto from_model = load_schema(cftest::source_path("models/chain.json"));
  EXPECT_EQ(*from_model, *cftest::czl_schema());
  const auto bare = schema_from_json(schema_to_json(*cftest::czl_schema()));
  EXPECT_EQ(*bare, *cftest::czl_schema());
}

TEST(Csv, Errors) {
  const auto s = cftest::czl_schema();
  EXPECT_THROW(dataset_from_csv("", s), DomainError);
  EXPECT_THROW(dataset_from_csv("C,Z\nc+,z+\n", s), DomainError);
  EXPECT_THROW(dataset_from_csv("C,Z,Z\nc+,z+,z+\n", s), DomainError);
  EXPECT_THROW(dataset_from_csv("C,Z,L\nc+,z+\n", s), DomainError);
  EXPECT_THROW(dataset_from_csv("C,Z,L\nc+,z+,yes\n", s), DomainError);
}

TEST(Files, MissingFileIsDomainError) {
  EXPECT_THROW(read_file("/nonexistent/causalfair.json"), DomainError);
  EXPECT_THROW(load_model("/nonexistent/causalfair.json"), DomainError);
}

TEST(ClassifierJson, UnknownKind) {
  EXPECT_THROW(classifier_from_json(json{{"kind", "forest"}}), DomainError);
}
