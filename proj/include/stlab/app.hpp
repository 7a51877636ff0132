#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stlab/config.hpp"
#include "stlab/discrepancy.hpp"
#include "stlab/window_stats.hpp"

namespace stlab {

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline const RationalCurve& find_curve(const RunConfig& cfg, const std::string& label) {
  for (const auto& c : cfg.curves)
    if (c.label == label) return c;
  throw std::invalid_argument("unknown curve label '" + label + "'");
}

// STLAB_CACHE_DIR overrides the configured cache path unless the path came
// from the command line.
inline std::filesystem::path effective_cache_dir(const RunConfig& cfg) {
  if (!cfg.cache_dir_forced)
    if (const char* env = std::getenv("STLAB_CACHE_DIR"); env && *env) return env;
  return cfg.cache_dir;
}

inline AngleSequence sequence_for(const RunConfig& cfg, const RationalCurve& curve, std::size_t length) {
  BuildOptions opts;
  opts.trace = cfg.trace;
  opts.cache_dir = effective_cache_dir(cfg);
  opts.threads = cfg.threads;
  opts.max_primes = cfg.max_primes;
  return build_sequence(curve, length, opts);
}

inline void cli_angles(const RunConfig& cfg, const std::string& label, std::size_t K, std::ostream& out) {
  const auto& curve = find_curve(cfg, label);
  AngleSequence seq = sequence_for(cfg, curve, K);
  write_angles_csv(seq, out);
}

inline AverageReport cli_average(const RunConfig& cfg, const std::string& label, const std::string& function_name,
                                 std::size_t s, std::size_t K) {
  const auto& curve = find_curve(cfg, label);
  ProductTestFunction f = builtin_test_function(function_name, s);
  AngleSequence seq = sequence_for(cfg, curve, K + f.s - 1);
  return relerr_logslope(seq, f, K, cfg.threads);
}

inline DiscrepancyResult cli_discrepancy(const RunConfig& cfg, const std::string& label, std::size_t s,
                                         std::size_t K) {
  const auto& curve = find_curve(cfg, label);
  AngleSequence seq = sequence_for(cfg, curve, K + s - 1);
  return star_discrepancy(WindowPointSet::from_sequence(seq, s, K), cfg.budgets);
}

inline double cli_discrepancy_estimate(const RunConfig& cfg, const std::string& label, std::size_t s, std::size_t K,
                                       std::size_t samples, std::uint64_t seed) {
  const auto& curve = find_curve(cfg, label);
  AngleSequence seq = sequence_for(cfg, curve, K + s - 1);
  return estimate_star_discrepancy(WindowPointSet::from_sequence(seq, s, K), samples, seed);
}

// ---------------------------------------------------------------------------
// Row rendering (CSV / JSON, 17 significant digits).
// ---------------------------------------------------------------------------

inline std::string average_csv_header() { return "curve,function,s,K,empirical,reference,rel_err,log_slope"; }

inline std::string to_csv_row(const AverageReport& r) {
  std::ostringstream os;
  os << r.curve_label << ',' << r.function_name << ',' << r.s << ',' << r.K << ',' << format_double(r.empirical)
     << ',' << format_double(r.reference) << ',' << format_double(r.rel_err) << ',' << format_double(r.log_slope);
  return os.str();
}

inline nlohmann::json to_json(const AverageReport& r) {
  nlohmann::json j{{"curve", r.curve_label}, {"function", r.function_name}, {"s", r.s},
                   {"K", r.K},               {"empirical", r.empirical},    {"reference", r.reference},
                   {"rel_err", r.rel_err}};
  if (std::isinf(r.log_slope))
    j["log_slope"] = "exact";
  else
    j["log_slope"] = r.log_slope;
  return j;
}

inline std::string discrepancy_csv_header() {
  return "curve,s,K,method,value,log_slope,grid_sizes,elapsed_seconds";
}

inline std::string to_csv_row(const std::string& label, const DiscrepancyResult& r) {
  std::ostringstream os;
  os << label << ',' << r.s << ',' << r.K << ",exact," << format_double(r.star_disc) << ','
     << format_double(r.log_slope) << ',';
  for (std::size_t i = 0; i < r.grid_sizes.size(); ++i) os << (i ? ";" : "") << r.grid_sizes[i];
  os << ',' << format_double(r.elapsed_seconds);
  return os.str();
}

inline nlohmann::json to_json(const std::string& label, const DiscrepancyResult& r) {
  return nlohmann::json{{"curve", label},           {"s", r.s},
                        {"K", r.K},                 {"method", "exact"},
                        {"value", r.star_disc},     {"log_slope", r.log_slope},
                        {"grid_sizes", r.grid_sizes}, {"elapsed_seconds", r.elapsed_seconds}};
}

// ---------------------------------------------------------------------------
// Figure reproduction.
// ---------------------------------------------------------------------------

enum class FigureKind { window_average, relerr_slope, star_disc_slope };

struct FigureSpec {
  int number;
  FigureKind kind;
  std::string function;  // empty for discrepancy figures
  std::size_t s;
  std::vector<std::size_t> Ks;
};

inline const std::vector<FigureSpec>& figure_specs() {
  static const std::vector<std::size_t> avg_ks{5000, 10000, 20000, 50000, 100000};
  static const std::vector<std::size_t> slope_ks{500000, 1000000, 2000000, 5000000, 10000000};
  static const std::vector<FigureSpec> specs = {
      {1, FigureKind::window_average, "f10", 10, avg_ks},
      {2, FigureKind::window_average, "g", 500, avg_ks},
      {3, FigureKind::window_average, "g", 1000, avg_ks},
      {4, FigureKind::window_average, "g", 2000, avg_ks},
      {5, FigureKind::window_average, "h", 500, avg_ks},
      {6, FigureKind::window_average, "h", 1000, avg_ks},
      {7, FigureKind::window_average, "h", 1500, avg_ks},
      {8, FigureKind::window_average, "h", 2000, avg_ks},
      {9, FigureKind::relerr_slope, "f10", 10, slope_ks},
      {10, FigureKind::relerr_slope, "g", 500, slope_ks},
      {11, FigureKind::relerr_slope, "g", 1000, slope_ks},
      {12, FigureKind::relerr_slope, "g", 2000, slope_ks},
      {13, FigureKind::relerr_slope, "h", 500, slope_ks},
      {14, FigureKind::relerr_slope, "h", 1000, slope_ks},
      {15, FigureKind::relerr_slope, "h", 1500, slope_ks},
      {16, FigureKind::relerr_slope, "h", 2000, slope_ks},
      {17, FigureKind::star_disc_slope, "", 2, avg_ks},
      {18, FigureKind::star_disc_slope, "", 3, {5000}},
  };
  return specs;
}

inline const FigureSpec& figure_spec(int number) {
  for (const auto& f : figure_specs())
    if (f.number == number) return f;
  throw std::invalid_argument("invalid figure number " + std::to_string(number) + " (expected 1..18)");
}

// Reference integrals at the precision used for the published log-slope
// tables. The tabulated relative errors were taken against these rounded
// constants, not the full-precision integrals; at K >= 5e5 the difference is
// visible in the slopes, so table reproduction has to mirror it.
inline const char* published_integral_string(const std::string& function, std::size_t s) {
  if (function == "f10") return "114.076";
  if (function == "g") {
    if (s == 500) return "3.44034";
    if (s == 1000) return "2.43333";
    if (s == 2000) return "1.72086";
  }
  if (function == "h") {
    if (s == 500) return "8.814";
    if (s == 1000) return "6.92239";
    if (s == 1500) return "6.0099";
    if (s == 2000) return "5.43635";
  }
  return nullptr;
}

// The statistic tabulated in the published log-slope tables: relative error
// against the published (rounded) reference.
inline double published_relerr_logslope(const AngleSequence& seq, const ProductTestFunction& f, std::size_t K,
                                        unsigned threads) {
  const char* printed = published_integral_string(f.name, f.s);
  double ref = printed ? std::atof(printed) : f.reference_integral();
  double avg = window_average(seq, f, K, threads);
  double rel = (avg - ref) / ref;
  return rel == 0.0 ? std::numeric_limits<double>::infinity()
                    : -std::log(std::abs(rel)) / std::log(static_cast<double>(K));
}

// Cells that take hours (or many minutes) at desk scale require --long.
inline bool figure_cell_is_long(const FigureSpec& fig, std::size_t K) {
  if (fig.kind == FigureKind::relerr_slope) return K > 500000;
  if (fig.kind == FigureKind::star_disc_slope) return fig.s >= 3 || K > 50000;
  return false;
}

struct FigureCell {
  std::string label;
  std::size_t K = 0;
  bool computed = false;  // false: skipped (needs --long)
  double value = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> expected;
};

struct FigureTable {
  int figure = 0;
  std::string statistic;
  std::vector<FigureCell> cells;
};

// Bundled reference tables: data/figures/figNN.csv with a header row of K
// values and one row per curve label.
inline std::optional<std::map<std::string, std::map<std::size_t, double>>> load_expected_table(
    const std::filesystem::path& data_dir, int figure) {
  char name[32];
  std::snprintf(name, sizeof(name), "fig%02d.csv", figure);
  std::ifstream in(data_dir / name);
  if (!in) return std::nullopt;
  std::map<std::string, std::map<std::size_t, double>> table;
  std::string line;
  std::vector<std::size_t> ks;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.empty()) continue;
    if (ks.empty()) {
      for (std::size_t i = 1; i < cells.size(); ++i) ks.push_back(std::stoull(cells[i]));
      continue;
    }
    for (std::size_t i = 1; i < cells.size() && i <= ks.size(); ++i)
      table[cells[0]][ks[i - 1]] = std::stod(cells[i]);
  }
  if (table.empty()) return std::nullopt;
  return table;
}

inline std::string figure_statistic_name(const FigureSpec& fig) {
  switch (fig.kind) {
    case FigureKind::window_average: return "window_average[" + fig.function + "," + std::to_string(fig.s) + "]";
    case FigureKind::relerr_slope: return "relerr_log_slope[" + fig.function + "," + std::to_string(fig.s) + "]";
    case FigureKind::star_disc_slope: return "star_disc_log_slope[s=" + std::to_string(fig.s) + "]";
  }
  return "";
}

inline FigureTable reproduce_figure(const RunConfig& cfg, int number, const std::vector<std::string>& row_filter,
                                    const std::vector<std::size_t>& col_filter,
                                    const std::filesystem::path& data_dir) {
  const FigureSpec& fig = figure_spec(number);
  FigureTable table;
  table.figure = number;
  table.statistic = figure_statistic_name(fig);

  std::vector<const RationalCurve*> rows;
  for (const auto& c : cfg.curves) {
    if (!row_filter.empty() && std::find(row_filter.begin(), row_filter.end(), c.label) == row_filter.end())
      continue;
    rows.push_back(&c);
  }
  if (!row_filter.empty() && rows.size() != row_filter.size())
    throw std::invalid_argument("reproduce: a requested row label is not in the configuration");
  std::vector<std::size_t> ks;
  for (std::size_t K : fig.Ks)
    if (col_filter.empty() || std::find(col_filter.begin(), col_filter.end(), K) != col_filter.end())
      ks.push_back(K);
  if (ks.empty()) throw std::invalid_argument("reproduce: no matching K columns");

  auto expected = load_expected_table(data_dir, number);

  std::optional<ProductTestFunction> func;
  if (fig.kind != FigureKind::star_disc_slope) func = builtin_test_function(fig.function, fig.s);

  for (const auto* curve : rows) {
    std::size_t max_live_k = 0;
    for (std::size_t K : ks)
      if (cfg.long_runs || !figure_cell_is_long(fig, K)) max_live_k = std::max(max_live_k, K);
    std::optional<AngleSequence> seq;
    if (max_live_k > 0) seq = sequence_for(cfg, *curve, max_live_k + fig.s - 1);

    for (std::size_t K : ks) {
      FigureCell cell;
      cell.label = curve->label;
      cell.K = K;
      if (expected) {
        auto itr = expected->find(curve->label);
        if (itr != expected->end()) {
          auto itk = itr->second.find(K);
          if (itk != itr->second.end()) cell.expected = itk->second;
        }
      }
      if (cfg.long_runs || !figure_cell_is_long(fig, K)) {
        cell.computed = true;
        switch (fig.kind) {
          case FigureKind::window_average:
            cell.value = window_average(*seq, *func, K, cfg.threads);
            break;
          case FigureKind::relerr_slope:
            cell.value = published_relerr_logslope(*seq, *func, K, cfg.threads);
            break;
          case FigureKind::star_disc_slope:
            cell.value = star_discrepancy(WindowPointSet::from_sequence(*seq, fig.s, K), cfg.budgets).log_slope;
            break;
        }
      }
      table.cells.push_back(std::move(cell));
    }
  }
  return table;
}

inline std::string figure_csv_header() { return "figure,statistic,curve,K,computed,expected,abs_diff"; }

inline std::string to_csv_row(const FigureTable& t, const FigureCell& c) {
  std::ostringstream os;
  os << t.figure << ',' << t.statistic << ',' << c.label << ',' << c.K << ',';
  if (c.computed) os << format_double(c.value);
  os << ',';
  if (c.expected) os << format_double(*c.expected);
  os << ',';
  if (c.computed && c.expected) os << format_double(std::abs(c.value - *c.expected));
  return os.str();
}

inline nlohmann::json to_json(const FigureTable& t, const FigureCell& c) {
  nlohmann::json j{{"figure", t.figure}, {"statistic", t.statistic}, {"curve", c.label}, {"K", c.K}};
  if (c.computed)
    j["computed"] = c.value;
  else
    j["status"] = "skipped (needs --long)";
  if (c.expected) {
    j["expected"] = *c.expected;
    if (c.computed) j["abs_diff"] = std::abs(c.value - *c.expected);
  }
  return j;
}

inline void render_figure_table(const FigureTable& t, OutputFormat fmt, std::ostream& out) {
  if (fmt == OutputFormat::csv) {
    out << figure_csv_header() << '\n';
    for (const auto& c : t.cells) out << to_csv_row(t, c) << '\n';
  } else {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : t.cells) arr.push_back(to_json(t, c));
    out << arr.dump(2) << '\n';
  }
}

}  // namespace stlab
