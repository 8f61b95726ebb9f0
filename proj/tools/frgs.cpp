#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "frgs/io.hpp"
#include "frgs/propsuite.hpp"

namespace fs = std::filesystem;
using namespace frgs;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_input = 1;
constexpr int exit_stagnation = 2;
constexpr int exit_violation = 3;

void write_text(const fs::path& path, const std::string& text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

std::string utc_timestamp()
{
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int cmd_solve(const std::string& config_path, const fs::path& out_dir)
{
  const SolverConfig cfg = read_config(config_path);
  SolutionReport rep;
  bool stagnated = false;
  try {
    rep = minimize(cfg);
  } catch (const stagnation_error& e) {
    std::cerr << "frgs solve: " << e.what() << '\n';
    rep = e.report();
    stagnated = true;
  }
  if (rep.boundary_ratio > 1e-4)
    std::cerr << "frgs solve: warning: solution reaches the box boundary (ratio "
              << format_double(rep.boundary_ratio) << "), enlarge L\n";

  fs::create_directories(out_dir);
  nlohmann::json summary = report_to_json(rep);
  summary["stagnated"] = stagnated;
  write_text(out_dir / "summary.json", summary.dump(2) + "\n");
  {
    std::ofstream prof(out_dir / "profile.csv", std::ios::binary);
    write_profile_csv(prof, rep.u);
  }
  {
    std::ofstream field(out_dir / "field.csv", std::ios::binary);
    write_field_csv(field, rep.u);
  }
  const nlohmann::json manifest{{"artifact_version", "1.0.0"},
                                {"timestamp", utc_timestamp()},
                                {"config_echo", config_to_json(cfg)},
                                {"outputs", {"summary.json", "profile.csv", "field.csv"}}};
  write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");

  std::cout << nlohmann::json{{"converged", rep.converged},
                              {"iterations", rep.iterations},
                              {"m_estimate", rep.m_estimate},
                              {"pde_residual", rep.pde_residual},
                              {"out", out_dir.string()}}
                 .dump()
            << '\n';
  if (!rep.converged)
    std::cerr << "frgs solve: not converged (pde_residual " << format_double(rep.pde_residual) << ")\n";
  return rep.converged ? exit_ok : exit_stagnation;
}

int cmd_check(double p, double q, int dim, double s)
{
  const Nonlinearity nl = make_nonlinearity(Exponents::make(dim, s, p, q));
  const HypothesisReport r = check_hypotheses(nl, 1e-3, 1e3, 1000000);
  nlohmann::json j = hypothesis_to_json(r);
  j["c2_matching_defect"] = c2_matching_defect(nl);
  std::cout << j.dump() << '\n';
  return r.ok() ? exit_ok : exit_violation;
}

int cmd_norms(const std::string& path, double p, double q)
{
  if (!(p > 1.0 && p < q) || !std::isfinite(q))
    throw domain_error("norms: need 1 < p < q");
  const GridField u = read_field_csv(path);
  std::cout << orlicz_to_json(orlicz_norm(u, p, q)).dump() << '\n';
  return exit_ok;
}

int cmd_rearrange(const std::string& path, const std::string& out_path, double s)
{
  const GridField u = read_field_csv(path);
  const GridField star = symm_decr_rearrange(u);
  if (out_path.empty()) {
    write_field_csv(std::cout, star);
    return exit_ok;
  }
  {
    std::ofstream out(out_path, std::ios::binary);
    if (!out)
      throw std::runtime_error("cannot write '" + out_path + "'");
    write_field_csv(out, star);
  }
  nlohmann::json j{{"out", out_path}, {"monotone", is_radially_nonincreasing(star)}};
  if (u.grid().spectral()) {
    const FracParams fp = FracParams::make(s, u.grid().dim());
    j["s"] = s;
    j["seminorm_sq"] = seminorm_sq_fourier(u, fp);
    j["rearranged_seminorm_sq"] = seminorm_sq_fourier(star, fp);
  }
  std::cout << j.dump() << '\n';
  return exit_ok;
}

int cmd_propsuite(std::uint64_t seed, bool keep_going)
{
  const int failures = run_propsuite(seed, std::cout, keep_going);
  return failures == 0 ? exit_ok : exit_input;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Fractional ground states: solver, norms and property checks"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "frgs_out";
  auto* solve = app.add_subcommand("solve", "Minimize the energy on the Nehari manifold");
  solve->add_option("config", config_path, "JSON configuration")->required();
  solve->add_option("--out", out_dir, "Output directory");

  double p = 0, q = 0, s = 0.5;
  int dim = 2;
  auto* check = app.add_subcommand("check", "Sample the growth constants of g");
  check->add_option("p", p)->required();
  check->add_option("q", q)->required();
  check->add_option("N", dim)->required();
  check->add_option("s", s)->required();

  std::string field_path;
  auto* norms = app.add_subcommand("norms", "Orlicz norms and bounds of a field");
  norms->add_option("field", field_path, "Field CSV")->required();
  norms->add_option("p", p)->required();
  norms->add_option("q", q)->required();

  std::string rearranged_path;
  double rs = 0.5;
  auto* rearrange = app.add_subcommand("rearrange", "Symmetric decreasing rearrangement");
  rearrange->add_option("field", field_path, "Field CSV")->required();
  rearrange->add_option("-o,--out", rearranged_path, "Output CSV (default: stdout)");
  rearrange->add_option("--s", rs, "Order for the reported seminorms");

  std::uint64_t seed = 0;
  bool keep_going = false;
  auto* props = app.add_subcommand("propsuite", "Randomized invariant suite");
  props->add_option("seed", seed)->required();
  props->add_flag("--keep-going", keep_going, "Run every property even after a failure");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_input;
  }

  try {
    if (*solve)
      return cmd_solve(config_path, out_dir);
    if (*check)
      return cmd_check(p, q, dim, s);
    if (*norms)
      return cmd_norms(field_path, p, q);
    if (*rearrange)
      return cmd_rearrange(field_path, rearranged_path, rs);
    if (*props)
      return cmd_propsuite(seed, keep_going);
  } catch (const std::invalid_argument& e) {
    std::cerr << "frgs: " << e.what() << '\n';
    return exit_input;
  } catch (const std::exception& e) {
    std::cerr << "frgs: " << e.what() << '\n';
    return exit_input;
  }
  return exit_input;
}
