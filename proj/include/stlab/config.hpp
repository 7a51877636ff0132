#pragma once

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "stlab/curve.hpp"
#include "stlab/discrepancy.hpp"
#include "stlab/trace.hpp"

namespace stlab {

enum class OutputFormat { csv, json };

struct RunConfig {
  std::vector<RationalCurve> curves;
  std::string cache_dir = "stlab-cache";
  TraceOptions trace;
  DiscrepancyOptions budgets;
  std::size_t max_primes = 20000000;
  OutputFormat format = OutputFormat::csv;
  unsigned threads = 0;  // 0 = auto
  bool long_runs = false;
  bool cache_dir_forced = false;  // CLI flag beats the environment override

  void validate() const {
    if (trace.naive_threshold == 0 || trace.charsum_threshold == 0 || trace.bsgs_min_prime == 0)
      throw std::invalid_argument("config: thresholds must be positive");
    if (budgets.budget_s1 == 0 || budgets.budget_s2 == 0 || budgets.budget_s3 == 0)
      throw std::invalid_argument("config: budgets must be positive");
    std::set<std::string> labels;
    for (const auto& c : curves) {
      if (c.conductor == 0) throw std::invalid_argument("config: curve " + c.label + " needs a positive conductor");
      if (discriminant(c) == 0) throw std::invalid_argument("config: curve " + c.label + " is singular");
      if (!labels.insert(c.label).second)
        throw std::invalid_argument("config: duplicate curve label " + c.label);
    }
  }
};

// The six stock curves, shipped as default configuration.
inline std::vector<RationalCurve> builtin_curves() {
  return {
      {"E1", 0, -1, 1, 0, 0, 11, 0},       {"E2", 0, 0, 1, -1, 0, 37, 1},
      {"E3", 1, 0, 0, 0, 1, 433, 2},       {"E4", 0, 0, 1, -7, 6, 5077, 3},
      {"E5", 0, 0, 1, -7, 36, 545723, 4},  {"E6", 0, 0, 1, -79, 342, 19047851, 5},
  };
}

inline RunConfig default_config() {
  RunConfig cfg;
  cfg.curves = builtin_curves();
  return cfg;
}

// ---------------------------------------------------------------------------
// Minimal TOML subset: top-level key = value, [[curve]] array tables, string /
// integer / integer-array values, # comments.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string toml_strip(const std::string& line) {
  std::string out;
  bool in_string = false;
  for (char ch : line) {
    if (ch == '"') in_string = !in_string;
    if (ch == '#' && !in_string) break;
    out.push_back(ch);
  }
  std::size_t b = out.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = out.find_last_not_of(" \t\r");
  return out.substr(b, e - b + 1);
}

inline bigint parse_bigint(const std::string& s, int lineno) {
  std::string t;
  for (char ch : s)
    if (ch != '_' && !std::isspace(static_cast<unsigned char>(ch))) t.push_back(ch);
  if (t.empty() || (t.size() == 1 && (t[0] == '+' || t[0] == '-')))
    throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected integer, got '" + s + "'");
  for (std::size_t i = (t[0] == '+' || t[0] == '-') ? 1 : 0; i < t.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(t[i])))
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected integer, got '" + s + "'");
  return bigint(t);
}

inline std::vector<bigint> parse_int_array(const std::string& s, int lineno) {
  if (s.size() < 2 || s.front() != '[' || s.back() != ']')
    throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected [a1, a2, a3, a4, a6]");
  std::vector<bigint> out;
  std::string body = s.substr(1, s.size() - 2);
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_bigint(item, lineno));
  return out;
}

inline std::string parse_string(const std::string& s, int lineno) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected quoted string");
}

}  // namespace detail

inline RunConfig parse_config(std::istream& in) {
  RunConfig cfg = default_config();
  cfg.curves.clear();
  bool saw_curve_table = false;
  RationalCurve* current = nullptr;

  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = detail::toml_strip(raw);
    if (line.empty()) continue;
    if (line == "[[curve]]") {
      cfg.curves.emplace_back();
      current = &cfg.curves.back();
      saw_curve_table = true;
      continue;
    }
    if (line.front() == '[')
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown table " + line);
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = detail::toml_strip(line.substr(0, eq));
    std::string val = detail::toml_strip(line.substr(eq + 1));

    auto as_u64 = [&]() { return static_cast<std::uint64_t>(detail::parse_bigint(val, lineno)); };
    if (current) {
      if (key == "label")
        current->label = detail::parse_string(val, lineno);
      else if (key == "a") {
        auto a = detail::parse_int_array(val, lineno);
        if (a.size() != 5)
          throw std::invalid_argument("config line " + std::to_string(lineno) + ": a must be [a1,a2,a3,a4,a6]");
        current->a1 = a[0];
        current->a2 = a[1];
        current->a3 = a[2];
        current->a4 = a[3];
        current->a6 = a[4];
      } else if (key == "conductor")
        current->conductor = as_u64();
      else if (key == "rank")
        current->rank = static_cast<std::uint32_t>(as_u64());
      else
        throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown curve key " + key);
      continue;
    }
    if (key == "cache_dir")
      cfg.cache_dir = detail::parse_string(val, lineno);
    else if (key == "naive_threshold")
      cfg.trace.naive_threshold = as_u64();
    else if (key == "charsum_threshold")
      cfg.trace.charsum_threshold = as_u64();
    else if (key == "bsgs_min_prime")
      cfg.trace.bsgs_min_prime = as_u64();
    else if (key == "max_primes")
      cfg.max_primes = static_cast<std::size_t>(as_u64());
    else if (key == "budget_s1")
      cfg.budgets.budget_s1 = as_u64();
    else if (key == "budget_s2")
      cfg.budgets.budget_s2 = as_u64();
    else if (key == "budget_s3")
      cfg.budgets.budget_s3 = as_u64();
    else if (key == "threads")
      cfg.threads = static_cast<unsigned>(as_u64());
    else if (key == "format") {
      std::string f = detail::parse_string(val, lineno);
      if (f == "csv")
        cfg.format = OutputFormat::csv;
      else if (f == "json")
        cfg.format = OutputFormat::json;
      else
        throw std::invalid_argument("config line " + std::to_string(lineno) + ": format must be csv or json");
    } else
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key " + key);
  }
  if (!saw_curve_table) cfg.curves = builtin_curves();
  cfg.validate();
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  return parse_config(in);
}

}  // namespace stlab
