#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "stlab/app.hpp"
#include "stlab/config.hpp"

using namespace stlab;

#ifndef STLAB_SOURCE_DIR
#define STLAB_SOURCE_DIR "."
#endif

namespace {

std::filesystem::path source_dir() { return STLAB_SOURCE_DIR; }

RunConfig test_config(const char* tag) {
  RunConfig cfg = default_config();
  auto dir = std::filesystem::temp_directory_path() / (std::string("stlab-app-") + tag);
  std::filesystem::create_directories(dir);
  cfg.cache_dir = dir.string();
  cfg.cache_dir_forced = true;
  cfg.threads = 2;
  return cfg;
}

}  // namespace

TEST_CASE("shipped configuration file matches the builtin curves", "[config]") {
  auto cfg = load_config(source_dir() / "data" / "curves.toml");
  auto builtins = builtin_curves();
  REQUIRE(cfg.curves.size() == builtins.size());
  for (std::size_t i = 0; i < builtins.size(); ++i) {
    REQUIRE(cfg.curves[i].label == builtins[i].label);
    REQUIRE(cfg.curves[i].a1 == builtins[i].a1);
    REQUIRE(cfg.curves[i].a2 == builtins[i].a2);
    REQUIRE(cfg.curves[i].a3 == builtins[i].a3);
    REQUIRE(cfg.curves[i].a4 == builtins[i].a4);
    REQUIRE(cfg.curves[i].a6 == builtins[i].a6);
    REQUIRE(cfg.curves[i].conductor == builtins[i].conductor);
    REQUIRE(cfg.curves[i].rank == builtins[i].rank);
  }
  REQUIRE(cfg.trace.naive_threshold == 4096);
  REQUIRE(cfg.budgets.budget_s3 == 5000);
}

TEST_CASE("config parsing details", "[config]") {
  std::istringstream in(R"(
# comment
threads = 4
format = "json"
[[curve]]
label = "big"
a = [123456789012345678901234567890, 0, 1, -2, 3]
conductor = 997
rank = 0
)");
  auto cfg = parse_config(in);
  REQUIRE(cfg.threads == 4);
  REQUIRE(cfg.format == OutputFormat::json);
  REQUIRE(cfg.curves.size() == 1);
  REQUIRE(cfg.curves[0].a1 == bigint("123456789012345678901234567890"));
}

TEST_CASE("config validation errors", "[config]") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
  };
  REQUIRE_THROWS_AS(parse("[[curve]]\nlabel = \"X\"\na = [0,0,0,0,0]\nconductor = 5\n"),
                    std::invalid_argument);  // singular
  REQUIRE_THROWS_AS(parse("[[curve]]\nlabel = \"X\"\na = [0,-1,1,0,0]\nconductor = 11\n"
                          "[[curve]]\nlabel = \"X\"\na = [0,0,1,-1,0]\nconductor = 37\n"),
                    std::invalid_argument);  // duplicate label
  REQUIRE_THROWS_AS(parse("nonsense = 3\n"), std::invalid_argument);
  REQUIRE_THROWS_AS(parse("format = \"xml\"\n"), std::invalid_argument);
  REQUIRE_THROWS_AS(parse("threads\n"), std::invalid_argument);
}

TEST_CASE("cache dir resolution order", "[config]") {
  RunConfig cfg;
  cfg.cache_dir = "from-config";
  unsetenv("STLAB_CACHE_DIR");
  REQUIRE(effective_cache_dir(cfg) == "from-config");
  setenv("STLAB_CACHE_DIR", "from-env", 1);
  REQUIRE(effective_cache_dir(cfg) == "from-env");
  cfg.cache_dir_forced = true;  // command line beats the environment
  REQUIRE(effective_cache_dir(cfg) == "from-config");
  unsetenv("STLAB_CACHE_DIR");
}

TEST_CASE("angles subcommand output", "[app]") {
  auto cfg = test_config("angles");
  std::ostringstream out;
  cli_angles(cfg, "E1", 5, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  REQUIRE(line == "k,p,a,flag,x");
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  REQUIRE(rows.size() == 5);
  REQUIRE(rows[4] == "5,11,0,bad,0.5");

  std::ostringstream out2;
  cli_angles(cfg, "E2", 1, out2);
  REQUIRE(out2.str().find("1,2,-2,good,0.75") != std::string::npos);

  REQUIRE_THROWS_AS(cli_angles(cfg, "EX", 1, out), std::invalid_argument);
}

TEST_CASE("average and discrepancy row round trips", "[app]") {
  auto cfg = test_config("rows");
  auto rep = cli_average(cfg, "E1", "g", 5, 200);
  REQUIRE(rep.s == 5);
  REQUIRE(rep.K == 200);

  // CSV round trip at 17 significant digits recovers identical doubles
  auto row = to_csv_row(rep);
  std::stringstream ss(row);
  std::string cell;
  std::vector<std::string> cells;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  REQUIRE(cells.size() == 8);
  REQUIRE(std::stod(cells[4]) == rep.empirical);
  REQUIRE(std::stod(cells[5]) == rep.reference);
  REQUIRE(std::stod(cells[6]) == rep.rel_err);
  REQUIRE(std::stod(cells[7]) == rep.log_slope);

  auto j = to_json(rep);
  REQUIRE(j["empirical"].get<double>() == rep.empirical);
  REQUIRE(j["rel_err"].get<double>() == rep.rel_err);

  auto disc = cli_discrepancy(cfg, "E1", 2, 100);
  auto drow = to_csv_row("E1", disc);
  REQUIRE(drow.find("E1,2,100,exact,") == 0);
  std::stringstream ds(drow);
  cells.clear();
  while (std::getline(ds, cell, ',')) cells.push_back(cell);
  REQUIRE(std::stod(cells[4]) == disc.star_disc);

  REQUIRE_THROWS_AS(cli_discrepancy(cfg, "E1", 2, 1000000), budget_error);
}

TEST_CASE("figure metadata and gating", "[app]") {
  REQUIRE_THROWS_AS(figure_spec(19), std::invalid_argument);
  REQUIRE_THROWS_AS(figure_spec(0), std::invalid_argument);
  REQUIRE(figure_spec(1).function == "f10");
  REQUIRE(figure_spec(16).s == 2000);
  REQUIRE(figure_spec(17).s == 2);

  REQUIRE_FALSE(figure_cell_is_long(figure_spec(1), 100000));
  REQUIRE(figure_cell_is_long(figure_spec(9), 1000000));
  REQUIRE_FALSE(figure_cell_is_long(figure_spec(9), 500000));
  REQUIRE(figure_cell_is_long(figure_spec(17), 100000));
  REQUIRE_FALSE(figure_cell_is_long(figure_spec(17), 50000));
  REQUIRE(figure_cell_is_long(figure_spec(18), 5000));
}

TEST_CASE("published reference constants", "[app]") {
  REQUIRE(std::string(published_integral_string("f10", 10)) == "114.076");
  REQUIRE(std::string(published_integral_string("g", 2000)) == "1.72086");
  REQUIRE(std::string(published_integral_string("h", 500)) == "8.814");
  REQUIRE(published_integral_string("g", 123) == nullptr);
  REQUIRE(published_integral_string("nope", 500) == nullptr);

  // printed constants agree with the exact integrals to their last digit
  for (const auto& fig : figure_specs()) {
    if (fig.function.empty()) continue;
    const char* printed = published_integral_string(fig.function, fig.s);
    REQUIRE(printed != nullptr);
    double exact = builtin_test_function(fig.function, fig.s).reference_integral();
    std::string str(printed);
    int decimals = static_cast<int>(str.size() - str.find('.') - 1);
    REQUIRE(std::abs(exact - std::atof(printed)) <= 0.5 * std::pow(10.0, -decimals));
  }

  // the published statistic differs from the exact-reference one only through
  // the rounded denominator
  AngleSequence seq;
  seq.curve_label = "synthetic";
  SplitMix64 rng(8);
  seq.records.resize(700);
  seq.angles.resize(700);
  for (auto& a : seq.angles) a = rng.uniform01();
  auto f = builtin_test_function("g", 500);
  double avg = window_average(seq, f, 200);
  double printed_ref = std::atof(published_integral_string("g", 500));
  double want = -std::log(std::abs((avg - printed_ref) / printed_ref)) / std::log(200.0);
  REQUIRE(published_relerr_logslope(seq, f, 200, 1) == Catch::Approx(want).margin(1e-15));
}

TEST_CASE("expected tables load", "[app]") {
  auto table = load_expected_table(source_dir() / "data" / "figures", 1);
  REQUIRE(table.has_value());
  REQUIRE((*table)["E1"][5000] == Catch::Approx(113.87));
  REQUIRE((*table)["E6"][100000] == Catch::Approx(114.519));
  REQUIRE_FALSE(load_expected_table(source_dir() / "data" / "figures", 99).has_value());
}

TEST_CASE("reproduce skips long cells without --long", "[app]") {
  auto cfg = test_config("repro");
  auto table = reproduce_figure(cfg, 18, {"E1"}, {}, source_dir() / "data" / "figures");
  REQUIRE(table.cells.size() == 1);
  REQUIRE_FALSE(table.cells[0].computed);
  REQUIRE(table.cells[0].expected.has_value());
  REQUIRE(*table.cells[0].expected == Catch::Approx(0.495306));

  std::ostringstream out;
  render_figure_table(table, OutputFormat::json, out);
  REQUIRE(out.str().find("skipped") != std::string::npos);

  REQUIRE_THROWS_AS(reproduce_figure(cfg, 1, {"EX"}, {}, source_dir()), std::invalid_argument);
  REQUIRE_THROWS_AS(reproduce_figure(cfg, 1, {}, {123}, source_dir()), std::invalid_argument);
}

TEST_CASE("reproduce computes small tables with diffs", "[app]") {
  auto cfg = test_config("repro2");
  auto table = reproduce_figure(cfg, 17, {"E1", "E2"}, {5000}, source_dir() / "data" / "figures");
  REQUIRE(table.cells.size() == 2);
  for (const auto& c : table.cells) {
    REQUIRE(c.computed);
    REQUIRE(c.expected.has_value());
    REQUIRE(std::abs(c.value - *c.expected) < 1e-4);
  }
  std::ostringstream out;
  render_figure_table(table, OutputFormat::csv, out);
  REQUIRE(out.str().find(figure_csv_header()) == 0);
}
