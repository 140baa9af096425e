#include <catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "optosat/config.hpp"
#include "optosat/emit.hpp"

using namespace optosat;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinRel;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  REQUIRE(f);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string config_file(const char* name) { return slurp(std::string(OPTOSAT_CONFIG_DIR) + "/" + name); }

// A small explicit document used as the base for the error cases below.
constexpr const char* kMinimal = R"({
  "schema_version": 1,
  "system": {"kappa1": 0.1},
  "axes": [{"parameter": "fs", "min": 0, "max": 0.1, "points": 3}]
})";

}  // namespace

TEST_CASE("a preset document resolves to the preset spec") {
  const RunConfig cfg = parse_config(R"({"schema_version": 1, "preset": "fig2"})");
  CHECK(cfg.spec == figure_preset("fig2"));
  CHECK(cfg.preset == "fig2");
  CHECK(cfg.format == OutputFormat::csv);
  CHECK(cfg.precision == 9);
  CHECK_FALSE(cfg.output_path);

  const RunConfig coarse = parse_config(R"({"schema_version": 1, "preset": "fig6", "resolution": 7})");
  CHECK(coarse.spec == figure_preset("fig6", 7));
}

TEST_CASE("explicit parameters override the preset") {
  const RunConfig cfg = parse_config(R"({
    "schema_version": 1, "preset": "fig3",
    "system": {"nbar": 5},
    "operating_point": {"fs": 0.05},
    "workers": 4
  })");
  SweepSpec expected = figure_preset("fig3");
  expected.system.nbar = 5;
  expected.point.sat_loss = 0.05;
  expected.workers = 4;
  CHECK(cfg.spec == expected);
}

TEST_CASE("sample configs parse") {
  SECTION("explicit fig3 equals the preset") {
    const RunConfig cfg = parse_config(config_file("fig3_explicit.json"));
    CHECK(cfg.spec == figure_preset("fig3"));
    CHECK_FALSE(cfg.preset);
  }
  SECTION("the others are valid") {
    for (const char* name : {"fig2.json", "hopping_1d.json", "thermal_from_temperature.json", "meanfield.json"}) {
      INFO(name);
      CHECK_NOTHROW(parse_config(config_file(name)));
    }
  }
  SECTION("thermal occupation from temperature") {
    const RunConfig cfg = parse_config(config_file("thermal_from_temperature.json"));
    CHECK_THAT(cfg.spec.system.nbar, WithinRel(thermal_occupation({0.02, 1e7}), 1e-15));
    CHECK(cfg.format == OutputFormat::json_lines);
    CHECK(cfg.precision == 12);
  }
}

TEST_CASE("physical constraints are reported with the offending field") {
  CHECK_THROWS_WITH(parse_config(R"({"schema_version": 1, "system": {"kappa1": -0.1},
                                     "axes": [{"parameter": "fs", "min": 0, "max": 0.1}]})"),
                    ContainsSubstring("kappa1 must be >= 0"));
  CHECK_THROWS_WITH(parse_config(R"({"schema_version": 1,
                                     "axes": [{"parameter": "fs", "min": 0, "max": 0.1, "points": 0}]})"),
                    ContainsSubstring("points"));
  CHECK_THROWS_AS(parse_config(R"({"schema_version": 1,
                                   "axes": [{"parameter": "bogus", "min": 0, "max": 1}]})"),
                  ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"schema_version": 1, "preset": "fig3", "outputs": ["E_xyz"]})"),
                  ValidationError);
}

TEST_CASE("unknown keys are rejected with their dotted path") {
  CHECK_THROWS_WITH(parse_config(R"({"schema_version": 1, "preset": "fig2", "sytem": {}})"),
                    ContainsSubstring("'sytem'"));
  CHECK_THROWS_WITH(parse_config(R"({"schema_version": 1, "preset": "fig2", "system": {"kapa1": 1}})"),
                    ContainsSubstring("'system.kapa1'"));
  CHECK_THROWS_WITH(parse_config(R"({"schema_version": 1,
                                     "axes": [{"parameter": "fs", "min": 0, "max": 1, "step": 2}]})"),
                    ContainsSubstring("'axes[0].step'"));
  CHECK_THROWS_WITH(parse_config(R"({"schema_version": 1, "preset": "fig2", "output": {"fmt": "csv"}})"),
                    ContainsSubstring("'output.fmt'"));
}

TEST_CASE("structural errors") {
  CHECK_THROWS_WITH(parse_config(R"({"preset": "fig2"})"), ContainsSubstring("schema_version"));
  CHECK_THROWS_WITH(parse_config(R"({"schema_version": 2, "preset": "fig2"})"), ContainsSubstring("schema_version"));
  CHECK_THROWS_WITH(parse_config(R"({"schema_version": 1})"), ContainsSubstring("no axes"));
  CHECK_THROWS_WITH(parse_config(R"({"schema_version": 1, "preset": "fig9"})"), ContainsSubstring("fig9"));
  CHECK_THROWS_AS(parse_config(R"({"schema_version": 1, "preset": "fig2", "workers": 0})"), ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"schema_version": 1, "preset": "fig2", "seed": -1})"), ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"schema_version": 1, "preset": "fig2", "mode": "exact"})"), ValidationError);
  CHECK_THROWS_WITH(parse_config(R"({"schema_version": 1, "resolution": 5,
                                     "axes": [{"parameter": "fs", "min": 0, "max": 0.1}]})"),
                    ContainsSubstring("resolution"));
  CHECK_THROWS_AS(parse_config(R"({"schema_version": 1, "mode": "meanfield",
                                   "axes": [{"parameter": "fs", "min": 0, "max": 0.1}]})"),
                  ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"schema_version": 1, "preset": "fig2", "system": {"kappa1": "big"}})"),
                  ValidationError);
}

TEST_CASE("syntax errors carry line and column") {
  const std::string text = "{\n  \"schema_version\": 1,\n  \"preset\": fig2\n}\n";
  try {
    parse_config(text);
    FAIL("no exception");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    // "fig2" reads as a malformed "false": the lexer stops at the i.
    CHECK(e.column() == 14);
    CHECK_THAT(std::string(e.what()), ContainsSubstring("line 3"));
  }
  CHECK_NOTHROW(parse_config("// comment\n" + std::string(kMinimal)));
}

TEST_CASE("temperature and nbar") {
  std::vector<std::string> warnings;
  const RunConfig both = parse_config(R"({"schema_version": 1, "preset": "fig6",
      "system": {"nbar": 42, "temperature_K": 0.02, "mech_frequency_hz": 1e7}})",
                                      &warnings);
  CHECK(both.spec.system.nbar == 42.0);
  REQUIRE(warnings.size() == 1);
  CHECK_THAT(warnings[0], ContainsSubstring("nbar"));

  CHECK_THROWS_WITH(parse_config(R"({"schema_version": 1, "preset": "fig6", "system": {"temperature_K": 0.02}})"),
                    ContainsSubstring("together"));
}

TEST_CASE("output block") {
  const RunConfig cfg = parse_config(R"({"schema_version": 1, "preset": "fig2",
      "output": {"path": "x.jsonl", "format": "jsonl", "precision": 17}})");
  CHECK(cfg.output_path == "x.jsonl");
  CHECK(cfg.format == OutputFormat::json_lines);
  CHECK(cfg.precision == 17);
  CHECK_THROWS_AS(parse_config(R"({"schema_version": 1, "preset": "fig2", "output": {"precision": 5}})"),
                  ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"schema_version": 1, "preset": "fig2", "output": {"precision": 18}})"),
                  ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"schema_version": 1, "preset": "fig2", "output": {"format": "xml"}})"),
                  ValidationError);
  CHECK(parse_format("json-lines") == OutputFormat::json_lines);
  CHECK(to_string(OutputFormat::csv) == "csv");
  CHECK_NOTHROW(validate_precision(6));
  CHECK_THROWS_AS(validate_precision(0), ValidationError);
}

TEST_CASE("resolved documents round-trip exactly") {
  SECTION("direct") {
    for (const char* name : {"fig3_explicit.json", "hopping_1d.json", "thermal_from_temperature.json",
                             "meanfield.json"}) {
      INFO(name);
      const RunConfig cfg = parse_config(config_file(name));
      CHECK(parse_config(config_to_json(cfg).dump()) == cfg);
    }
  }
  SECTION("odd values survive") {
    RunConfig cfg;
    cfg.spec = figure_preset("fig7", 11);
    cfg.spec.system.kappa1 = 0.1 + 0.2;
    cfg.spec.point.phase1 = 1.0 / 3.0;
    cfg.spec.workers = 3;
    cfg.seed = 18446744073709551615ull;
    cfg.output_path = "out.csv";
    cfg.precision = 15;
    CHECK(parse_config(config_to_json(cfg).dump()) == cfg);
  }
  SECTION("through the sidecar") {
    RunConfig cfg;
    cfg.spec = figure_preset("fig4", 4);
    cfg.preset = "fig4";
    const RunConfig back = parse_config(metadata(cfg, 16).dump(2));
    CHECK(back == cfg);
  }
}
