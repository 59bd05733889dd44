#include <gtest/gtest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "divlab/report.hpp"

namespace {

using namespace divlab;
using nlohmann::json;

MomentReport sample_report() {
  MomentReport r;
  r.kind = "cross:Delta_2*Delta_3";
  r.reference_exponent = 19.0 / 12.0;
  r.guide_exponents = {13.0 / 9.0, 19.0 / 12.0};
  for (double X : {1e3, 2e3, 4e3, 8e3, 1e4}) {
    const double v = 0.3 * std::pow(X, 1.55);
    r.samples.push_back({X, v, v / std::pow(X, r.reference_exponent), 2 * v, 0.5});
  }
  r.samples[2].value = -r.samples[2].value;
  r.fitted_exponent = 1.5500000000000003;
  r.fit_stderr = 1.0 / 3.0;
  return r;
}

// Just enough of draft-07 for the shipped schema: type, required,
// properties, additionalProperties, items, minItems, minimum, minLength.
void validate(const json& schema, const json& v, const std::string& at, std::vector<std::string>& errs) {
  if (schema.contains("type")) {
    const std::string t = schema["type"];
    const bool ok = (t == "object" && v.is_object()) || (t == "array" && v.is_array()) ||
                    (t == "string" && v.is_string()) || (t == "number" && v.is_number()) ||
                    (t == "integer" && v.is_number_integer()) || (t == "boolean" && v.is_boolean());
    if (!ok) {
      errs.push_back(at + ": expected " + t);
      return;
    }
  }
  if (schema.contains("minimum") && v.is_number() && v.get<double>() < schema["minimum"].get<double>()) {
    errs.push_back(at + ": below minimum");
  }
  if (schema.contains("minLength") && v.is_string() && v.get<std::string>().size() < schema["minLength"].get<std::size_t>()) {
    errs.push_back(at + ": too short");
  }
  if (v.is_object()) {
    if (schema.contains("required")) {
      for (const auto& k : schema["required"]) {
        if (!v.contains(k.get<std::string>())) errs.push_back(at + ": missing " + k.get<std::string>());
      }
    }
    const json props = schema.value("properties", json::object());
    for (const auto& [k, sub] : v.items()) {
      if (props.contains(k)) {
        validate(props[k], sub, at + "/" + k, errs);
      } else if (schema.contains("additionalProperties") && schema["additionalProperties"] == false) {
        errs.push_back(at + ": unexpected " + k);
      }
    }
  }
  if (v.is_array()) {
    if (schema.contains("minItems") && v.size() < schema["minItems"].get<std::size_t>()) errs.push_back(at + ": too few items");
    if (schema.contains("items")) {
      for (std::size_t i = 0; i < v.size(); ++i) validate(schema["items"], v[i], at + "/" + std::to_string(i), errs);
    }
  }
}

json load_schema() {
  std::ifstream in(std::string(DIVLAB_SOURCE_DIR) + "/schema/moment_report.schema.json");
  return json::parse(in);
}

std::vector<std::string> schema_errors(const json& doc) {
  std::vector<std::string> errs;
  validate(load_schema(), doc, "", errs);
  return errs;
}

TEST(Csv, RoundtripIsExact) {
  const auto r = sample_report();
  std::stringstream ss;
  write_csv(r, ss);
  EXPECT_EQ(parse_csv(ss), r);
}

TEST(Csv, HeaderAndFooter) {
  std::stringstream ss;
  write_csv(sample_report(), ss);
  std::string first;
  std::getline(ss, first);
  EXPECT_EQ(first, "X,value,normalized,bound,ratio");
  EXPECT_NE(ss.str().find("# guide_exponents="), std::string::npos);
}

TEST(Csv, NoGuides) {
  auto r = sample_report();
  r.guide_exponents.clear();
  std::stringstream ss;
  write_csv(r, ss);
  EXPECT_EQ(parse_csv(ss), r);
}

TEST(Csv, BadInput) {
  std::stringstream a("X,value\n1,2\n");
  EXPECT_THROW((void)parse_csv(a), FormatError);
  std::stringstream b("X,value,normalized,bound,ratio\n1,2,3,4\n");
  EXPECT_THROW((void)parse_csv(b), FormatError);
  std::stringstream c("X,value,normalized,bound,ratio\n1,2,3,4,x5\n");
  EXPECT_THROW((void)parse_csv(c), FormatError);
}

TEST(Json, RoundtripIsExact) {
  const auto r = sample_report();
  const auto text = to_json(r).dump(2);
  EXPECT_EQ(from_json(json::parse(text)), r);
}

TEST(Json, ConformsToSchema) {
  const auto errs = schema_errors(to_json(sample_report()));
  EXPECT_TRUE(errs.empty()) << errs.front();
}

TEST(Json, ValidatorRejectsBrokenDocuments) {
  auto j = to_json(sample_report());
  j.erase("kind");
  EXPECT_FALSE(schema_errors(j).empty());
  j = to_json(sample_report());
  j["samples"][0]["extra"] = 1;
  EXPECT_FALSE(schema_errors(j).empty());
  j = to_json(sample_report());
  j["samples"] = json::array();
  EXPECT_FALSE(schema_errors(j).empty());
  j = to_json(sample_report());
  j["samples"][1]["bound"] = -1.0;
  EXPECT_FALSE(schema_errors(j).empty());
}

TEST(Json, MissingFieldIsFormatError) {
  auto j = to_json(sample_report());
  j["samples"][0].erase("ratio");
  EXPECT_THROW((void)from_json(j), FormatError);
}

TEST(Svg, OneGuidePerExponentAndOnePointPerSample) {
  const auto r = sample_report();
  std::stringstream ss;
  write_svg(r, ss);
  const std::string s = ss.str();
  const std::regex guide("<line class=\"guide\"");
  const std::regex point("<circle class=\"sample\"");
  EXPECT_EQ(std::distance(std::sregex_iterator(s.begin(), s.end(), guide), std::sregex_iterator()), 2);
  EXPECT_EQ(std::distance(std::sregex_iterator(s.begin(), s.end(), point), std::sregex_iterator()), 5);
  EXPECT_NE(s.find("data-exponent=\"1.5833333333333333\""), std::string::npos);
  EXPECT_EQ(s.rfind("</svg>\n"), s.size() - 7);
}

TEST(Emit, FilesAndErrors) {
  const auto dir = std::filesystem::temp_directory_path() / "divlab_report_test";
  std::filesystem::create_directories(dir);
  const auto r = sample_report();
  emit_report(r, ReportFormat::Csv, dir / "r.csv");
  emit_report(r, ReportFormat::Json, dir / "r.json");
  EXPECT_EQ(load_report(dir / "r.csv"), r);
  EXPECT_EQ(load_report(dir / "r.json"), r);
  EXPECT_THROW(emit_report(r, ReportFormat::Csv, dir / "missing" / "r.csv"), IoError);
  EXPECT_THROW((void)load_report(dir / "nope.json"), IoError);
  {
    std::ofstream bad(dir / "bad.json");
    bad << "{ not json";
  }
  EXPECT_THROW((void)load_report(dir / "bad.json"), FormatError);
  EXPECT_THROW(emit_report(MomentReport{}, ReportFormat::Json, dir / "e.json"), ArgumentError);
  std::filesystem::remove_all(dir);
}

TEST(Format, Parse) {
  EXPECT_EQ(parse_format("svg"), ReportFormat::Svg);
  EXPECT_THROW((void)parse_format("xml"), ArgumentError);
}

}  // namespace
