#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "stlab/app.hpp"

#ifndef STLAB_DATA_DIR
#define STLAB_DATA_DIR "data/figures"
#endif

namespace {

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("STLAB_DATA_DIR"); env && *env) return env;
  return STLAB_DATA_DIR;
}

void emit_average(const stlab::RunConfig& cfg, const stlab::AverageReport& rep, std::ostream& out) {
  if (cfg.format == stlab::OutputFormat::csv)
    out << stlab::average_csv_header() << '\n' << stlab::to_csv_row(rep) << '\n';
  else
    out << stlab::to_json(rep).dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frobenius-angle statistics of rational elliptic curves: sliding-window averages,"
               " relative-error log-slopes and exact star discrepancies against the Sato-Tate"
               " product measure"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, cache_dir, format = "csv";
  unsigned threads = 0;
  bool long_runs = false;
  app.add_option("--config", config_path, "TOML configuration file (defaults to the built-in curves)");
  app.add_option("--cache-dir", cache_dir, "trace cache directory (beats STLAB_CACHE_DIR)");
  app.add_option("--threads", threads, "worker threads (0 = hardware)");
  app.add_option("--format", format, "output format: csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--long", long_runs, "allow long-running cells (hours for the largest K)");

  auto* cmd_angles = app.add_subcommand("angles", "export k,p,a,flag,x rows for one curve");
  std::string label;
  std::size_t count = 0;
  std::string out_path;
  cmd_angles->add_option("curve", label, "curve label")->required();
  cmd_angles->add_option("-K,--count", count, "number of angles")->required();
  cmd_angles->add_option("-o,--out", out_path, "output file (default stdout)");

  auto* cmd_average = app.add_subcommand("average", "sliding-window average of a product test function");
  std::string function_name;
  std::size_t dim = 0, K = 0;
  cmd_average->add_option("curve", label, "curve label")->required();
  cmd_average->add_option("-f,--function", function_name, "f10, g or h")->required();
  cmd_average->add_option("-s,--dimension", dim, "window dimension (f10 is fixed at 10)");
  cmd_average->add_option("-K,--windows", K, "number of windows")->required();

  auto* cmd_relerr = app.add_subcommand("relerr", "relative error and log-slope of a window average");
  cmd_relerr->add_option("curve", label, "curve label")->required();
  cmd_relerr->add_option("-f,--function", function_name, "f10, g or h")->required();
  cmd_relerr->add_option("-s,--dimension", dim, "window dimension (f10 is fixed at 10)");
  cmd_relerr->add_option("-K,--windows", K, "number of windows")->required();

  auto* cmd_disc = app.add_subcommand("discrepancy", "star discrepancy of the window point set");
  bool exact = false, estimate = false;
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  cmd_disc->add_option("curve", label, "curve label")->required();
  cmd_disc->add_option("-s,--dimension", dim, "window dimension (1, 2 or 3 for --exact)")->required();
  cmd_disc->add_option("-K,--windows", K, "number of windows")->required();
  cmd_disc->add_flag("--exact", exact, "exact grid evaluation (default)");
  cmd_disc->add_flag("--estimate", estimate, "randomized lower-bound estimate");
  cmd_disc->add_option("--samples", samples, "sample count for --estimate");
  cmd_disc->add_option("--seed", seed, "seed for --estimate");

  auto* cmd_repro = app.add_subcommand("reproduce", "recompute a published table, with reference values");
  int figure = 0;
  std::vector<std::string> rows;
  std::vector<std::size_t> cols;
  std::string data_dir;
  cmd_repro->add_option("figure", figure, "figure number (1..18)")->required();
  cmd_repro->add_option("--rows", rows, "curve labels to include")->delimiter(',');
  cmd_repro->add_option("--cols", cols, "K columns to include")->delimiter(',');
  cmd_repro->add_option("--data-dir", data_dir, "directory with the reference tables");

  CLI11_PARSE(app, argc, argv);

  try {
    stlab::RunConfig cfg = config_path.empty() ? stlab::default_config() : stlab::load_config(config_path);
    if (!cache_dir.empty()) {
      cfg.cache_dir = cache_dir;
      cfg.cache_dir_forced = true;
    }
    if (threads > 0) cfg.threads = threads;
    cfg.format = format == "json" ? stlab::OutputFormat::json : stlab::OutputFormat::csv;
    cfg.long_runs = long_runs;

    std::ofstream file_out;
    std::ostream* out = &std::cout;
    if (!out_path.empty()) {
      file_out.open(out_path);
      if (!file_out) throw std::runtime_error("cannot open output file " + out_path);
      out = &file_out;
    }

    if (cmd_angles->parsed()) {
      stlab::cli_angles(cfg, label, count, *out);
    } else if (cmd_average->parsed() || cmd_relerr->parsed()) {
      emit_average(cfg, stlab::cli_average(cfg, label, function_name, dim, K), *out);
    } else if (cmd_disc->parsed()) {
      if (exact && estimate) throw std::invalid_argument("choose one of --exact / --estimate");
      if (estimate) {
        double v = stlab::cli_discrepancy_estimate(cfg, label, dim, K, samples, seed);
        if (cfg.format == stlab::OutputFormat::csv) {
          *out << stlab::discrepancy_csv_header() << '\n'
               << label << ',' << dim << ',' << K << ",estimate," << stlab::format_double(v) << ','
               << stlab::format_double(-std::log(v) / std::log(static_cast<double>(K))) << ",,\n";
        } else {
          nlohmann::json j{{"curve", label}, {"s", dim},        {"K", K},
                           {"method", "estimate"}, {"value", v}, {"samples", samples}};
          *out << j.dump(2) << '\n';
        }
      } else {
        auto res = stlab::cli_discrepancy(cfg, label, dim, K);
        if (cfg.format == stlab::OutputFormat::csv)
          *out << stlab::discrepancy_csv_header() << '\n' << stlab::to_csv_row(label, res) << '\n';
        else
          *out << stlab::to_json(label, res).dump(2) << '\n';
      }
    } else if (cmd_repro->parsed()) {
      auto dir = data_dir.empty() ? default_data_dir() : std::filesystem::path(data_dir);
      auto table = stlab::reproduce_figure(cfg, figure, rows, cols, dir);
      stlab::render_figure_table(table, cfg.format, *out);
      bool skipped = false;
      for (const auto& c : table.cells) skipped |= !c.computed;
      if (skipped) std::cerr << "note: some cells were skipped; rerun with --long to compute them\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
