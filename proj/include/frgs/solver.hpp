#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "frgs/error.hpp"
#include "frgs/fracop.hpp"
#include "frgs/grid.hpp"
#include "frgs/nehari.hpp"
#include "frgs/nonlinearity.hpp"
#include "frgs/random_fields.hpp"
#include "frgs/rearrange.hpp"

namespace frgs {

struct SolverConfig
{
  Exponents exps;
  Grid grid;
  int max_iters = 2000;
  double tol_residual = 1e-3;
  double tol_nehari = 1e-10;
  double step0 = 0.5;
  double backtrack = 0.5;
  std::uint64_t seed = 0;
  double init_width = 1.0;
  SignMode sign_mode = SignMode::positive_part;

  void validate() const
  {
    if (grid.dim() != exps.dim)
      throw domain_error("solver config: grid dimension differs from N");
    grid.require_spectral("solver config");
    if (max_iters < 1)
      throw domain_error("solver config: max_iters must be >= 1");
    if (!(tol_residual > 0.0 && tol_residual < 1.0))
      throw domain_error("solver config: tol_residual must lie in (0,1)");
    if (!(tol_nehari > 0.0 && tol_nehari < 1.0))
      throw domain_error("solver config: tol_nehari must lie in (0,1)");
    if (!(step0 > 0.0) || !std::isfinite(step0))
      throw domain_error("solver config: step0 must be positive");
    if (!(backtrack > 0.0 && backtrack < 1.0))
      throw domain_error("solver config: backtrack must lie in (0,1)");
    if (!(init_width > 0.0) || !std::isfinite(init_width))
      throw domain_error("solver config: init_width must be positive");
  }
};

struct SolutionReport
{
  GridField u;
  double energy = 0.0;
  double m_estimate = 0.0;
  double nehari_residual = 0.0;
  double pde_residual = 0.0;
  /// Same residual with the mean of (-Delta)^s u - g'(u) removed; the
  /// periodic operator cannot balance a nonzero mean of g'(u).
  double pde_residual_nonzero_modes = 0.0;
  double pohozaev_defect = 0.0;
  double lambda_estimate = 0.0;
  double min_value = 0.0;
  bool monotone = false;
  double decay_margin = 0.0;    ///< decay bound margin for t = 2*_s
  double decay_margin_l2 = 0.0; ///< decay bound margin for t = 2
  double boundary_ratio = 0.0;  ///< max |u| on the box faces over max |u|
  double symmetrization_increase = 0.0; ///< largest rise of I caused by rearranging
  int iterations = 0;
  int backtracks = 0;
  bool converged = false;
  std::vector<double> energy_trace;
};

/// Thrown after 50 consecutive rejected steps; carries the state reached.
class stagnation_error : public numerical_error
{
public:
  stagnation_error(const std::string& what, SolutionReport partial)
    : numerical_error(what)
    , report_(std::move(partial))
  {
  }
  const SolutionReport& report() const { return report_; }

private:
  SolutionReport report_;
};

/// |(N-2s)/2 [u]^2 - N integral g(u)| / ((N-2s)/2 [u]^2).
inline double pohozaev_defect(const GridField& u, const FracParams& fp, const Nonlinearity& nl)
{
  const double S = seminorm_sq_fourier(u, fp);
  if (!(S > 0.0))
    throw domain_error("pohozaev_defect: [u] = 0");
  const double pot = integrate_map(u, [&nl](double x) { return nl.g(x); });
  const double lhs = 0.5 * (fp.dim - 2.0 * fp.s) * S;
  return std::abs(lhs - fp.dim * pot) / lhs;
}

namespace detail {

inline double boundary_ratio(const GridField& u)
{
  const Grid& grid = u.grid();
  const std::size_t last = grid.points_per_dim() - 1;
  double edge = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto idx = grid.unravel(i);
    for (int a = 0; a < grid.dim(); ++a)
      if (idx[a] == 0 || idx[a] == last) {
        edge = std::max(edge, std::abs(u[i]));
        break;
      }
  }
  const double top = u.max_abs();
  return top > 0.0 ? edge / top : 0.0;
}

struct Residuals
{
  double full = 0.0;
  double nonzero_modes = 0.0;
};

inline Residuals pde_residuals(const Model& m, const GridField& u)
{
  const GridField lap = frac_laplacian(u, m.fp);
  const GridField gp = map(u, [&m](double x) { return m.nl.g_prime(x); });
  const GridField res = lincomb(1.0, lap, -1.0, gp);
  const double denom = std::max(lp_norm(gp, 2.0), 1e-300);
  const double mean = integrate(res) / u.grid().volume();
  const GridField centered = map(res, [mean](double x) { return x - mean; });
  return {lp_norm(res, 2.0) / denom, lp_norm(centered, 2.0) / denom};
}

inline void fill_diagnostics(const Model& m, const Exponents& exps, SolutionReport& rep)
{
  const GridField& u = rep.u;
  const double S = seminorm_sq_fourier(u, m.fp);
  rep.energy = energy(m, u);
  rep.m_estimate = rep.energy;
  const double J = nehari_residual(m, u);
  rep.nehari_residual = std::abs(J) / S;
  const Residuals r = pde_residuals(m, u);
  rep.pde_residual = r.full;
  rep.pde_residual_nonzero_modes = r.nonzero_modes;
  rep.pohozaev_defect = pohozaev_defect(u, m.fp, m.nl);
  rep.lambda_estimate = J / manifold_tangency(m, u);
  rep.min_value = u.min();
  rep.monotone = is_radially_nonincreasing(u);
  rep.decay_margin = rep.monotone ? decay_bound_check(u, exps.two_star) : std::numeric_limits<double>::infinity();
  rep.decay_margin_l2 = rep.monotone ? decay_bound_check(u, 2.0) : std::numeric_limits<double>::infinity();
  rep.boundary_ratio = boundary_ratio(u);
}

} // namespace detail

/// Centered Gaussian of width init_width, offset from the center grid point
/// by a seed-dependent fraction of a cell, rearranged and projected.
inline GridField initial_guess(const SolverConfig& cfg)
{
  cfg.validate();
  const Model m = Model::make(cfg.exps, cfg.sign_mode);
  const Grid& grid = cfg.grid;
  Rng rng(derive_seed(cfg.seed, 0));
  double center[3];
  for (int a = 0; a < grid.dim(); ++a)
    center[a] = grid.coordinate(grid.center_index()) + uniform(rng, -0.5, 0.5) * grid.spacing();
  const double w2 = cfg.init_width * cfg.init_width;
  const GridField bump = GridField::from_function(grid, [&](std::span<const double> x) {
    double r2 = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a)
      r2 += (x[a] - center[a]) * (x[a] - center[a]);
    return std::exp(-r2 / w2);
  });
  const GridField guess = nehari_project(m, symm_decr_rearrange(bump));
  const double S = seminorm_sq_fourier(guess, m.fp);
  if (std::abs(nehari_residual(m, guess)) > cfg.tol_nehari * S)
    throw numerical_error("initial_guess: projection misses the Nehari tolerance");
  return guess;
}

/// Descend in the D^{s,2} metric, clip, rearrange, reproject; a step is kept
/// only if it lowers I, otherwise the step size shrinks by `backtrack`.
inline SolutionReport minimize(const SolverConfig& cfg, std::optional<GridField> start = std::nullopt)
{
  cfg.validate();
  const Model m = Model::make(cfg.exps, cfg.sign_mode);
  GridField u = start ? *start : initial_guess(cfg);
  if (start) {
    if (!(start->grid() == cfg.grid))
      throw domain_error("minimize: start field lives on a different grid");
    u = nehari_project(m, symm_decr_rearrange(map(u, [](double x) { return std::max(x, 0.0); })));
  }

  SolutionReport rep;
  double E = energy(m, u);
  rep.energy_trace.push_back(E);
  double eta = cfg.step0;
  int streak = 0;
  auto finish = [&](bool converged) {
    rep.u = u;
    rep.converged = converged;
    detail::fill_diagnostics(m, cfg.exps, rep);
    return rep;
  };

  for (rep.iterations = 0; rep.iterations < cfg.max_iters; ++rep.iterations) {
    if (detail::pde_residuals(m, u).full <= cfg.tol_residual)
      return finish(true);

    const GridField drive = inv_frac_laplacian(map(u, [&m](double x) { return m.nl.g_prime(x); }), m.fp);
    const GridField direction = lincomb(1.0, u, -1.0, drive);
    for (;;) {
      const GridField clipped = map(lincomb(1.0, u, -eta, direction), [](double x) { return std::max(x, 0.0); });
      std::optional<GridField> trial;
      if (clipped.max() > 0.0) {
        const GridField sym = symm_decr_rearrange(clipped);
        rep.symmetrization_increase = std::max(rep.symmetrization_increase, energy(m, sym) - energy(m, clipped));
        trial = nehari_project(m, sym);
      }
      const double Et = trial ? energy(m, *trial) : std::numeric_limits<double>::infinity();
      if (Et < E) {
        u = *trial;
        E = Et;
        rep.energy_trace.push_back(E);
        eta = std::min(cfg.step0, eta / cfg.backtrack);
        streak = 0;
        break;
      }
      eta *= cfg.backtrack;
      ++rep.backtracks;
      if (++streak >= 50) {
        finish(false);
        throw stagnation_error("minimize: 50 consecutive backtracks without energy decrease", rep);
      }
    }
  }
  return finish(detail::pde_residuals(m, u).full <= cfg.tol_residual);
}

struct GapReport
{
  std::vector<double> m_estimates;
  double spread = 0.0;
};

/// Runs minimize from several configurations and reports the spread of the
/// energy estimates. Every estimate must be positive; a failed run rethrows.
inline GapReport ground_state_gap(std::span<const SolverConfig> configs)
{
  if (configs.size() < 2)
    throw domain_error("ground_state_gap: need at least 2 restarts");
  std::vector<double> m(configs.size());
  parallel_for(
    configs.size(),
    [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        m[i] = minimize(configs[i]).m_estimate;
      }
    },
    1);
  for (double v : m)
    if (!(v > 0.0))
      throw numerical_error("ground_state_gap: non-positive energy estimate");
  const auto [lo, hi] = std::minmax_element(m.begin(), m.end());
  return GapReport{m, *hi - *lo};
}

/// Restart i uses seed + i and width init_width * (1 + 0.25 i).
inline GapReport ground_state_gap(const SolverConfig& cfg, int restarts)
{
  if (restarts < 2)
    throw domain_error("ground_state_gap: need at least 2 restarts");
  std::vector<SolverConfig> configs;
  for (int i = 0; i < restarts; ++i) {
    SolverConfig c = cfg;
    c.seed = cfg.seed + static_cast<std::uint64_t>(i);
    c.init_width = cfg.init_width * (1.0 + 0.25 * i);
    configs.push_back(c);
  }
  return ground_state_gap(configs);
}

} // namespace frgs
