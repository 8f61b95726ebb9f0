#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "frgs/error.hpp"
#include "frgs/grid.hpp"
#include "frgs/nonlinearity.hpp"
#include "frgs/orlicz.hpp"
#include "frgs/rearrange.hpp"
#include "frgs/solver.hpp"

namespace frgs {

/// Malformed input file; `line` is 1-based, 0 when not line-specific.
class parse_error : public domain_error
{
public:
  parse_error(const std::string& what, std::size_t line)
    : domain_error(line ? what + " (line " + std::to_string(line) + ")" : what)
    , line_(line)
  {
  }
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

/// 17 significant digits, enough for binary64 to round-trip.
inline std::string format_double(double x)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_field_csv(std::ostream& os, const GridField& u)
{
  const Grid& grid = u.grid();
  os << "index";
  for (int a = 1; a <= grid.dim(); ++a)
    os << ",x" << a;
  os << ",value\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto idx = grid.unravel(i);
    os << i;
    for (int a = 0; a < grid.dim(); ++a)
      os << ',' << format_double(grid.coordinate(idx[a]));
    os << ',' << format_double(u[i]) << '\n';
  }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line)
{
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ','))
    out.push_back(cell);
  if (!line.empty() && line.back() == ',')
    out.emplace_back();
  return out;
}

inline double parse_number(const std::string& text, std::size_t line)
{
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size())
      throw parse_error("field csv: trailing characters in number '" + text + "'", line);
    return v;
  } catch (const std::logic_error&) {
    throw parse_error("field csv: cannot parse number '" + text + "'", line);
  }
}

} // namespace detail

/// Reads the `index,x1,...,xN,value` dump and rebuilds its grid.
inline GridField read_field_csv(std::istream& is)
{
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(is, line))
    throw parse_error("field csv: empty input", 1);
  ++lineno;
  if (!line.empty() && line.back() == '\r')
    line.pop_back();
  const auto header = detail::split_csv_line(line);
  const int dim = static_cast<int>(header.size()) - 2;
  if (dim != 2 && dim != 3)
    throw parse_error("field csv: header must be index,x1,...,xN,value with N in {2,3}", lineno);
  if (header.front() != "index" || header.back() != "value")
    throw parse_error("field csv: header must start with 'index' and end with 'value'", lineno);
  for (int a = 1; a <= dim; ++a)
    if (header[a] != "x" + std::to_string(a))
      throw parse_error("field csv: expected column x" + std::to_string(a), lineno);

  std::vector<std::vector<double>> coords;
  std::vector<double> values;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size())
      throw parse_error("field csv: expected " + std::to_string(header.size()) + " columns", lineno);
    const double index = detail::parse_number(cells[0], lineno);
    if (index != static_cast<double>(values.size()))
      throw parse_error("field csv: rows must be in index order starting at 0", lineno);
    std::vector<double> x(dim);
    for (int a = 0; a < dim; ++a)
      x[a] = detail::parse_number(cells[a + 1], lineno);
    const double v = detail::parse_number(cells.back(), lineno);
    if (!std::isfinite(v))
      throw parse_error("field csv: non-finite value", lineno);
    coords.push_back(std::move(x));
    values.push_back(v);
  }

  const double root = std::round(std::pow(static_cast<double>(values.size()), 1.0 / dim));
  const auto n = static_cast<std::size_t>(root);
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a)
    total *= n;
  if (n < 2 || total != values.size())
    throw parse_error("field csv: row count is not n^N for an integer n >= 2", lineno);
  const double h = coords[1][dim - 1];
  if (!(h > 0.0))
    throw parse_error("field csv: cannot infer a positive grid spacing", 3);
  const Grid grid(dim, h * static_cast<double>(n), n);
  for (std::size_t i = 0; i < total; ++i) {
    const auto idx = grid.unravel(i);
    for (int a = 0; a < dim; ++a)
      if (std::abs(coords[i][a] - grid.coordinate(idx[a])) > 1e-9 * grid.length())
        throw parse_error("field csv: coordinates do not form a uniform grid", i + 2);
  }
  return GridField(grid, std::move(values));
}

inline GridField read_field_csv(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw parse_error("field csv: cannot open '" + path + "'", 0);
  return read_field_csv(in);
}

inline void write_profile_csv(std::ostream& os, const GridField& u)
{
  const RadialProfile prof = radial_profile(u);
  os << "r,u\n";
  for (std::size_t k = 0; k < prof.r.size(); ++k)
    os << format_double(prof.r[k]) << ',' << format_double(prof.u[k]) << '\n';
}

inline const std::vector<std::string>& config_keys()
{
  static const std::vector<std::string> keys{"N",         "s",    "p",        "q",         "L",
                                             "n",         "max_iters", "tol_residual", "tol_nehari", "step0",
                                             "backtrack", "seed", "init_width"};
  return keys;
}

/// Flat JSON object with exactly the keys of config_keys().
inline SolverConfig parse_config(const nlohmann::json& j)
{
  if (!j.is_object())
    throw parse_error("config: top level must be a JSON object", 0);
  const auto& keys = config_keys();
  for (const auto& [key, value] : j.items())
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw parse_error("config: unknown key '" + key + "'", 0);
  for (const auto& key : keys)
    if (!j.contains(key))
      throw parse_error("config: missing field '" + key + "'", 0);

  auto number = [&](const char* key) {
    if (!j[key].is_number())
      throw parse_error(std::string("config: field '") + key + "' must be a number", 0);
    return j[key].get<double>();
  };
  auto integer = [&](const char* key) {
    if (!j[key].is_number_integer())
      throw parse_error(std::string("config: field '") + key + "' must be an integer", 0);
    return j[key].get<long long>();
  };

  const long long dim = integer("N");
  const long long n = integer("n");
  const long long seed = integer("seed");
  if (n < 2)
    throw parse_error("config: field 'n' must be >= 2", 0);
  if (seed < 0)
    throw parse_error("config: field 'seed' must be nonnegative", 0);
  if (dim != 2 && dim != 3)
    throw parse_error("config: field 'N' must be 2 or 3", 0);
  SolverConfig cfg;
  cfg.exps = Exponents::make(static_cast<int>(dim), number("s"), number("p"), number("q"));
  cfg.grid = Grid(static_cast<int>(dim), number("L"), static_cast<std::size_t>(n));
  cfg.max_iters = static_cast<int>(integer("max_iters"));
  cfg.tol_residual = number("tol_residual");
  cfg.tol_nehari = number("tol_nehari");
  cfg.step0 = number("step0");
  cfg.backtrack = number("backtrack");
  cfg.seed = static_cast<std::uint64_t>(seed);
  cfg.init_width = number("init_width");
  cfg.validate();
  return cfg;
}

inline SolverConfig parse_config(const std::string& text)
{
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw parse_error(std::string("config: invalid JSON: ") + e.what(), 0);
  }
  return parse_config(j);
}

inline SolverConfig read_config(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw parse_error("config: cannot open '" + path + "'", 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

inline nlohmann::json config_to_json(const SolverConfig& cfg)
{
  return nlohmann::json{{"N", cfg.exps.dim},
                        {"s", cfg.exps.s},
                        {"p", cfg.exps.p},
                        {"q", cfg.exps.q},
                        {"L", cfg.grid.length()},
                        {"n", cfg.grid.points_per_dim()},
                        {"max_iters", cfg.max_iters},
                        {"tol_residual", cfg.tol_residual},
                        {"tol_nehari", cfg.tol_nehari},
                        {"step0", cfg.step0},
                        {"backtrack", cfg.backtrack},
                        {"seed", cfg.seed},
                        {"init_width", cfg.init_width}};
}

inline nlohmann::json report_to_json(const SolutionReport& r)
{
  return nlohmann::json{{"energy", r.energy},
                        {"m_estimate", r.m_estimate},
                        {"nehari_residual", r.nehari_residual},
                        {"pde_residual", r.pde_residual},
                        {"pde_residual_nonzero_modes", r.pde_residual_nonzero_modes},
                        {"pohozaev_defect", r.pohozaev_defect},
                        {"lambda_estimate", r.lambda_estimate},
                        {"min_value", r.min_value},
                        {"monotone", r.monotone},
                        {"decay_margin", r.decay_margin},
                        {"decay_margin_l2", r.decay_margin_l2},
                        {"boundary_ratio", r.boundary_ratio},
                        {"symmetrization_increase", r.symmetrization_increase},
                        {"iterations", r.iterations},
                        {"backtracks", r.backtracks},
                        {"converged", r.converged},
                        {"energy_trace", r.energy_trace}};
}

inline nlohmann::json hypothesis_to_json(const HypothesisReport& r)
{
  return nlohmann::json{{"mu_hat", r.mu_hat},
                        {"ratio2_min", r.ratio2_min},
                        {"c0_hat", r.c0_hat},
                        {"c1_hat", r.c1_hat},
                        {"c2_hat", r.c2_hat},
                        {"c3_hat", r.c3_hat},
                        {"t_min", r.t_min},
                        {"t_max", r.t_max},
                        {"sample_count", r.sample_count},
                        {"violations", r.violations},
                        {"ok", r.ok()}};
}

inline nlohmann::json orlicz_to_json(const OrliczReport& r)
{
  return nlohmann::json{{"gamma_measure", r.gamma_measure},   {"r", r.r},
                        {"luxemburg", r.luxemburg},           {"inf_decomp", r.inf_decomp},
                        {"lower_bound", r.lower_bound},       {"upper_bound", r.upper_bound},
                        {"q_norm_outside", r.q_norm_outside}, {"p_norm_inside", r.p_norm_inside}};
}

} // namespace frgs
