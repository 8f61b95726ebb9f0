#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "frgs/error.hpp"
#include "frgs/grid.hpp"
#include "frgs/nonlinearity.hpp"
#include "frgs/parallel.hpp"
#include "frgs/summation.hpp"

namespace frgs {

/// Norms of a field in L^p + L^q together with the set Gamma = {|u| > 1}.
struct OrliczReport
{
  double gamma_measure = 0.0;
  double r = 0.0; ///< pq/(q-p)
  double luxemburg = 0.0;
  double inf_decomp = 0.0;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  double q_norm_outside = 0.0;
  double p_norm_inside = 0.0;
  std::size_t sweeps = 0; ///< outer steps spent on inf_decomp
  double inf_decomp_dual = 0.0; ///< certified lower bound on inf_decomp by duality
};

namespace detail {

inline double weighted_power_sum(const Grid& grid, std::span<const double> a, double t)
{
  return integrate_terms(grid, [a, t](std::size_t i) { return std::pow(std::abs(a[i]), t); });
}

/// Root of theta^{p-1} a = (1-theta)^{q-1} b on [0, 1] for a, b > 0. The
/// left side minus the right is increasing in theta, so a bracketed Newton
/// iteration converges from any start.
inline double split_root(double a, double b, double p, double q, double theta)
{
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 100; ++it) {
    const double f = std::pow(theta, p - 1.0) * a - std::pow(1.0 - theta, q - 1.0) * b;
    if (f == 0.0)
      return theta;
    if (f < 0.0)
      lo = theta;
    else
      hi = theta;
    const double df = (p - 1.0) * std::pow(theta, p - 2.0) * a + (q - 1.0) * std::pow(1.0 - theta, q - 2.0) * b;
    double next = theta - f / df;
    if (!(next > lo && next < hi))
      next = 0.5 * (lo + hi);
    if (std::abs(next - theta) <= 1e-15)
      return next;
    theta = next;
  }
  return theta;
}

} // namespace detail

inline double luxemburg_modular(const GridField& u, double p, double q, double lambda)
{
  const auto v = u.values();
  return integrate_terms(u.grid(), [&](std::size_t i) {
    const double x = std::abs(v[i]) / lambda;
    return x >= 1.0 ? std::pow(x, q) : std::pow(x, p);
  });
}

/// Luxemburg norm of A(t) = max{|t|^p, |t|^q}: the lambda with
/// integral A(u/lambda) = 1, found by geometric bisection.
inline double luxemburg_norm(const GridField& u, double p, double q)
{
  const double top = u.max_abs();
  if (top == 0.0)
    return 0.0;
  const auto v = u.values();
  const double support =
    integrate_terms(u.grid(), [v](std::size_t i) { return v[i] != 0.0 ? 1.0 : 0.0; });
  double lo = top / std::pow(2.0, 40);
  double hi = top * std::max(1.0, std::pow(support, 1.0 / p));
  if (luxemburg_modular(u, p, q, lo) < 1.0)
    throw numerical_error("luxemburg_norm: lower bracket does not enclose the root");
  for (int it = 0; it < 200 && hi > lo * (1.0 + 1e-15); ++it) {
    const double mid = std::sqrt(lo * hi);
    if (luxemburg_modular(u, p, q, mid) > 1.0)
      lo = mid;
    else
      hi = mid;
  }
  return std::sqrt(lo * hi);
}

/// ||theta u||_p + ||(1-theta) u||_q for a pointwise split theta.
inline double split_cost(const GridField& u, std::span<const double> theta, double p, double q)
{
  const auto v = u.values();
  const Grid& grid = u.grid();
  const double a = integrate_terms(grid, [&](std::size_t i) { return std::pow(std::abs(theta[i] * v[i]), p); });
  const double b =
    integrate_terms(grid, [&](std::size_t i) { return std::pow(std::abs((1.0 - theta[i]) * v[i]), q); });
  return std::pow(a, 1.0 / p) + std::pow(b, 1.0 / q);
}

struct InfDecomposition
{
  double value = 0.0;
  std::size_t sweeps = 0;
  /// integral(u w) / max(||w||_{p'}, ||w||_{q'}) for the test function w
  /// read off the final split; never exceeds the true norm.
  double dual_bound = 0.0;
};

/// Lower bound integral(u w) / max(||w||_{p'}, ||w||_{q'}) from duality of
/// L^p + L^q with L^{p'} cap L^{q'}.
inline double dual_lower_bound(const GridField& u, const GridField& w, double p, double q)
{
  const double pair = inner(u, w);
  const double denom = std::max(lp_norm(w, p / (p - 1.0)), lp_norm(w, q / (q - 1.0)));
  return denom > 0.0 ? pair / denom : 0.0;
}

namespace detail {

/// For fixed scales (alpha, beta), the pointwise minimizer theta of the
/// convex majorant
///
///     sum_x (theta|u|)^p / (p alpha^{p-1}) + ((1-theta)|u|)^q / (q beta^{q-1})
///         + (1 - 1/p) alpha + (1 - 1/q) beta,
///
/// whose minimum over (theta, alpha, beta) is the inf-decomposition norm.
/// Returns the majorant value and the norms of the two parts.
struct SplitState
{
  std::vector<double> theta;
  double majorant = 0.0;
  double head_norm = 0.0; ///< ||theta u||_p
  double rest_norm = 0.0; ///< ||(1-theta) u||_q
};

inline void solve_split(const GridField& u, double p, double q, double alpha, double beta, SplitState& st)
{
  const auto v = u.values();
  const double ap = std::pow(alpha, p - 1.0);
  const double bq = std::pow(beta, q - 1.0);
  parallel_for(v.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const double m = std::abs(v[i]);
      if (m != 0.0)
        st.theta[i] = split_root(std::pow(m, p) / ap, std::pow(m, q) / bq, p, q, st.theta[i]);
    }
  });
  const Grid& grid = u.grid();
  const double hp = integrate_terms(grid, [&](std::size_t i) { return std::pow(st.theta[i] * std::abs(v[i]), p); });
  const double rq =
    integrate_terms(grid, [&](std::size_t i) { return std::pow((1.0 - st.theta[i]) * std::abs(v[i]), q); });
  st.head_norm = std::pow(hp, 1.0 / p);
  st.rest_norm = std::pow(rq, 1.0 / q);
  st.majorant = hp / (p * ap) + rq / (q * bq) + (1.0 - 1.0 / p) * alpha + (1.0 - 1.0 / q) * beta;
}

} // namespace detail

namespace detail {

/// Cost ||theta u||_p + ||(1-theta)u||_q of a split together with the dual
/// lower bound from the test functions (theta|u|/alpha)^{p-1} and
/// ((1-theta)|u|/beta)^{q-1}, which coincide at the optimum.
inline std::pair<double, double> split_bounds(const GridField& u, std::span<const double> theta, double p, double q)
{
  const auto v = u.values();
  const std::size_t size = v.size();
  const Grid& grid = u.grid();
  const double alpha =
    std::pow(integrate_terms(grid, [&](std::size_t i) { return std::pow(theta[i] * std::abs(v[i]), p); }), 1.0 / p);
  const double beta = std::pow(
    integrate_terms(grid, [&](std::size_t i) { return std::pow((1.0 - theta[i]) * std::abs(v[i]), q); }), 1.0 / q);
  double dual = 0.0;
  if (alpha > 0.0) {
    std::vector<double> w(size);
    for (std::size_t i = 0; i < size; ++i)
      w[i] = std::copysign(std::pow(theta[i] * std::abs(v[i]) / alpha, p - 1.0), v[i]);
    dual = std::max(dual, dual_lower_bound(u, GridField(grid, std::move(w)), p, q));
  }
  if (beta > 0.0) {
    std::vector<double> w(size);
    for (std::size_t i = 0; i < size; ++i)
      w[i] = std::copysign(std::pow((1.0 - theta[i]) * std::abs(v[i]) / beta, q - 1.0), v[i]);
    dual = std::max(dual, dual_lower_bound(u, GridField(grid, std::move(w)), p, q));
  }
  return {alpha + beta, dual};
}

} // namespace detail

/// inf{||u1||_p + ||u2||_q : u = u1 + u2} over aligned splits u1 = theta u.
///
/// The majorant of detail::SplitState is jointly convex in (theta, alpha,
/// beta); its minimum over theta is solved point by point, leaving a smooth
/// convex problem in (log alpha, log beta) whose stationary points are the
/// fixed points alpha = ||theta u||_p, beta = ||(1-theta) u||_q. Newton steps
/// on that fixed-point equation are taken when they lower the majorant,
/// otherwise the plain fixed-point (majorize-minimize) step is used.
///
/// The pure L^p, pure L^q and {|u| > 1} splits are candidates too. Every
/// split also yields a dual lower bound, and the iteration stops once the
/// best cost and the best bound agree to rel_tol, so the returned value is
/// certified to that relative accuracy (or max_steps was hit).
inline InfDecomposition inf_decomposition_norm(const GridField& u, double p, double q, double rel_tol = 1e-8,
                                               std::size_t max_steps = 500)
{
  const std::size_t size = u.size();
  const auto v = u.values();
  if (u.max_abs() == 0.0)
    return {};

  double best = std::numeric_limits<double>::infinity();
  double dual = 0.0;
  auto consider = [&](std::span<const double> theta) {
    const auto [cost, lower] = detail::split_bounds(u, theta, p, q);
    best = std::min(best, cost);
    dual = std::max(dual, lower);
  };
  auto closed = [&] { return best - dual <= rel_tol * best; };

  {
    std::vector<double> pure_p(size, 1.0), pure_q(size, 0.0), gamma(size);
    for (std::size_t i = 0; i < size; ++i)
      gamma[i] = std::abs(v[i]) > 1.0 ? 1.0 : 0.0;
    consider(pure_p);
    consider(pure_q);
    consider(gamma);
  }
  if (closed())
    return {best, 0, std::min(dual, best)};

  detail::SplitState st;
  st.theta.assign(size, 0.5);
  const Grid& grid = u.grid();
  double la = std::log(0.5) + std::log(integrate_terms(grid, [&](std::size_t i) { return std::pow(std::abs(v[i]), p); })) / p;
  double lb = std::log(0.5) + std::log(integrate_terms(grid, [&](std::size_t i) { return std::pow(std::abs(v[i]), q); })) / q;
  detail::solve_split(u, p, q, std::exp(la), std::exp(lb), st);

  auto residual = [](const detail::SplitState& s, double x, double y) {
    return std::array<double, 2>{std::log(s.head_norm) - x, std::log(s.rest_norm) - y};
  };

  std::size_t step = 0;
  for (; step < max_steps; ++step) {
    consider(st.theta);
    if (closed())
      break;
    if (!(st.head_norm > 1e-300) || !(st.rest_norm > 1e-300))
      break;
    const auto r = residual(st, la, lb);

    const double d = 1e-6;
    detail::SplitState sa = st, sb = st;
    detail::solve_split(u, p, q, std::exp(la + d), std::exp(lb), sa);
    detail::solve_split(u, p, q, std::exp(la), std::exp(lb + d), sb);
    if (sa.head_norm > 0.0 && sa.rest_norm > 0.0 && sb.head_norm > 0.0 && sb.rest_norm > 0.0) {
      const auto ra = residual(sa, la + d, lb);
      const auto rb = residual(sb, la, lb + d);
      const double j00 = (ra[0] - r[0]) / d, j10 = (ra[1] - r[1]) / d;
      const double j01 = (rb[0] - r[0]) / d, j11 = (rb[1] - r[1]) / d;
      const double det = j00 * j11 - j01 * j10;
      if (std::abs(det) > 1e-14) {
        double dx = -(j11 * r[0] - j01 * r[1]) / det;
        double dy = -(-j10 * r[0] + j00 * r[1]) / det;
        const double len = std::max(std::abs(dx), std::abs(dy));
        if (len > 2.0) {
          dx *= 2.0 / len;
          dy *= 2.0 / len;
        }
        bool moved = false;
        for (double frac = 1.0; frac >= 1.0 / 64.0 && !moved; frac *= 0.5) {
          detail::SplitState trial = st;
          detail::solve_split(u, p, q, std::exp(la + frac * dx), std::exp(lb + frac * dy), trial);
          if (trial.majorant < st.majorant) {
            la += frac * dx;
            lb += frac * dy;
            st = std::move(trial);
            moved = true;
          }
        }
        if (moved)
          continue;
      }
    }
    la = std::log(st.head_norm);
    lb = std::log(st.rest_norm);
    detail::solve_split(u, p, q, std::exp(la), std::exp(lb), st);
  }
  return {best, step, std::min(dual, best)};
}

inline OrliczReport orlicz_norm(const GridField& u, double p, double q)
{
  if (!(p >= 1.0 && q > p) || !std::isfinite(q))
    throw domain_error("orlicz_norm: need 1 <= p < q < infinity");
  OrliczReport rep;
  rep.r = p * q / (q - p);
  if (u.max_abs() == 0.0)
    return rep;

  const auto v = u.values();
  const Grid& grid = u.grid();
  rep.gamma_measure = integrate_terms(grid, [v](std::size_t i) { return std::abs(v[i]) > 1.0 ? 1.0 : 0.0; });
  rep.p_norm_inside = std::pow(
    integrate_terms(grid, [&](std::size_t i) { return std::abs(v[i]) > 1.0 ? std::pow(std::abs(v[i]), p) : 0.0; }),
    1.0 / p);
  rep.q_norm_outside = std::pow(
    integrate_terms(grid, [&](std::size_t i) { return std::abs(v[i]) > 1.0 ? 0.0 : std::pow(std::abs(v[i]), q); }),
    1.0 / q);

  rep.luxemburg = luxemburg_norm(u, p, q);
  const InfDecomposition inf = inf_decomposition_norm(u, p, q);
  rep.inf_decomp = inf.value;
  rep.sweeps = inf.sweeps;
  rep.inf_decomp_dual = inf.dual_bound;
  rep.lower_bound =
    std::max(rep.q_norm_outside - 1.0, rep.p_norm_inside / (1.0 + std::pow(rep.gamma_measure, 1.0 / rep.r)));
  rep.upper_bound = std::max(rep.q_norm_outside, rep.p_norm_inside);
  return rep;
}

inline OrliczReport orlicz_norm(const GridField& u, const Exponents& exps)
{
  return orlicz_norm(u, exps.p, exps.q);
}

/// (||g'(u)||_{p'}, ||g'(u)||_{q'}) with p' = p/(p-1), q' = q/(q-1).
inline std::pair<double, double> dual_pair_norms(const GridField& u, const Nonlinearity& nl)
{
  const double pp = nl.p() / (nl.p() - 1.0);
  const double qp = nl.q() / (nl.q() - 1.0);
  const GridField d = map(u, [&nl](double t) { return nl.g_prime(t); });
  return {lp_norm(d, pp), lp_norm(d, qp)};
}

inline std::pair<double, double> dual_pair_norms(const GridField& u, const Exponents& exps)
{
  return dual_pair_norms(u, make_nonlinearity(exps));
}

/// (||g''(u)||_{p/(p-2)}, ||g''(u)||_{q/(q-2)}).
inline std::pair<double, double> gpp_dual_norms(const GridField& u, const Nonlinearity& nl)
{
  if (!(nl.p() > 2.0))
    throw domain_error("gpp_dual_norms: need p > 2");
  const double a = nl.p() / (nl.p() - 2.0);
  const double b = nl.q() / (nl.q() - 2.0);
  const GridField d = map(u, [&nl](double t) { return nl.g_second(t); });
  return {lp_norm(d, a), lp_norm(d, b)};
}

inline std::pair<double, double> gpp_dual_norms(const GridField& u, const Exponents& exps)
{
  return gpp_dual_norms(u, make_nonlinearity(exps));
}

/// Same norms of g''(u + eps v) - g''(u); tends to zero with eps.
inline std::pair<double, double> gpp_perturbation_norms(const GridField& u, const GridField& v, double eps,
                                                        const Nonlinearity& nl)
{
  const double a = nl.p() / (nl.p() - 2.0);
  const double b = nl.q() / (nl.q() - 2.0);
  const GridField d = zip(u, v, [&nl, eps](double x, double y) { return nl.g_second(x + eps * y) - nl.g_second(x); });
  return {lp_norm(d, a), lp_norm(d, b)};
}

struct PotentialDerivatives
{
  double value = 0.0;  ///< H(u) = integral g(u)
  double first = 0.0;  ///< integral g'(u) v
  double second = 0.0; ///< integral g''(u) v w
};

inline PotentialDerivatives potential_and_derivatives(const GridField& u, const GridField& v, const GridField& w,
                                                      const Nonlinearity& nl)
{
  require_same_grid(u, v, "potential_and_derivatives");
  require_same_grid(u, w, "potential_and_derivatives");
  const auto a = u.values();
  const auto b = v.values();
  const auto c = w.values();
  const Grid& grid = u.grid();
  PotentialDerivatives out;
  out.value = integrate_terms(grid, [&](std::size_t i) { return nl.g(a[i]); });
  out.first = integrate_terms(grid, [&](std::size_t i) { return nl.g_prime(a[i]) * b[i]; });
  out.second = integrate_terms(grid, [&](std::size_t i) { return nl.g_second(a[i]) * b[i] * c[i]; });
  return out;
}

} // namespace frgs
