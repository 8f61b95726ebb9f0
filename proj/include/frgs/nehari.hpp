#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "frgs/error.hpp"
#include "frgs/fracop.hpp"
#include "frgs/grid.hpp"
#include "frgs/nonlinearity.hpp"
#include "frgs/parallel.hpp"
#include "frgs/random_fields.hpp"
#include "frgs/rearrange.hpp"

namespace frgs {

/// The functional I(u) = [u]^2/2 - integral g(u) is fixed by the pair.
struct Model
{
  Nonlinearity nl;
  FracParams fp;

  static Model make(const Exponents& exps, SignMode mode)
  {
    return Model{make_nonlinearity(exps, mode), FracParams::make(exps.s, exps.dim)};
  }
};

inline double energy(const Model& m, const GridField& u)
{
  const auto v = u.values();
  const double pot = integrate_terms(u.grid(), [&](std::size_t i) { return m.nl.g(v[i]); });
  return 0.5 * seminorm_sq_fourier(u, m.fp) - pot;
}

/// J(u) = [u]^2 - integral g'(u) u.
inline double nehari_residual(const Model& m, const GridField& u)
{
  const auto v = u.values();
  const double pot = integrate_terms(u.grid(), [&](std::size_t i) { return m.nl.g_prime(v[i]) * v[i]; });
  return seminorm_sq_fourier(u, m.fp) - pot;
}

/// 2[u]^2 - integral (g'(u)u + g''(u)u^2); negative on the Nehari set.
inline double manifold_tangency(const Model& m, const GridField& u)
{
  const auto v = u.values();
  const double pot = integrate_terms(u.grid(), [&](std::size_t i) {
    return m.nl.g_prime(v[i]) * v[i] + m.nl.g_second(v[i]) * v[i] * v[i];
  });
  return 2.0 * seminorm_sq_fourier(u, m.fp) - pot;
}

namespace detail {

/// h(t), h'(t), h''(t) along the ray t -> I(tu), with [u]^2 precomputed.
class Ray
{
public:
  Ray(const Model& m, const GridField& u)
    : nl_(m.nl)
    , grid_(u.grid())
    , seminorm_sq_(seminorm_sq_fourier(u, m.fp))
  {
    for (double x : u.values())
      if (x != 0.0)
        values_.push_back(x);
  }

  double seminorm_sq() const { return seminorm_sq_; }

  double h(double t) const
  {
    return 0.5 * t * t * seminorm_sq_ - sum([&](double x) { return nl_.g(t * x); });
  }
  double dh(double t) const
  {
    return t * seminorm_sq_ - sum([&](double x) { return nl_.g_prime(t * x) * x; });
  }
  double d2h(double t) const
  {
    return seminorm_sq_ - sum([&](double x) { return nl_.g_second(t * x) * x * x; });
  }
  /// integral of g'(tu)tu/2 - g(tu)
  double psi(double t) const
  {
    return sum([&](double x) { return 0.5 * nl_.g_prime(t * x) * t * x - nl_.g(t * x); });
  }

private:
  template<class Fn>
  double sum(const Fn& f) const
  {
    return grid_.cell_volume() * pairwise_reduce(values_.size(), [&](std::size_t i) { return f(values_[i]); });
  }

  const Nonlinearity& nl_;
  Grid grid_;
  double seminorm_sq_;
  std::vector<double> values_;
};

inline void require_projectable(const Model& m, const GridField& u, const char* what)
{
  const bool positive_only = m.nl.sign_mode() == SignMode::positive_part;
  const double top = positive_only ? u.max() : u.max_abs();
  if (!(top > 0.0))
    throw domain_error(std::string(what) + (positive_only ? ": u+ vanishes" : ": u vanishes"));
}

} // namespace detail

struct NehariScale
{
  double t_star = 0.0;
  int iterations = 0;
  double residual = 0.0; ///< |h'(t_star)| / (t_star [u]^2)
};

/// The unique t > 0 with t u on the Nehari set: bracket the sign change of
/// h' by doubling from 1e-6, then Newton safeguarded by bisection.
inline NehariScale nehari_scale(const Model& m, const GridField& u)
{
  detail::require_projectable(m, u, "nehari_scale");
  const detail::Ray ray(m, u);
  const double S = ray.seminorm_sq();
  if (!(S > 0.0))
    throw domain_error("nehari_scale: [u]^2 vanishes (constant field)");

  int iters = 0;
  double lo = 1e-6;
  if (!(ray.dh(lo) > 0.0))
    throw numerical_error("nehari_scale: h' not positive near t = 0");
  double hi = lo;
  while (ray.dh(hi) >= 0.0) {
    lo = hi;
    hi *= 2.0;
    ++iters;
    if (hi > 1e12)
      throw numerical_error("nehari_scale: no sign change of h' below t = 1e12");
  }

  double t = 0.5 * (lo + hi);
  for (; iters < 500; ++iters) {
    const double f = ray.dh(t);
    if (std::abs(f) <= 1e-12 * std::max(1.0, t * S))
      break;
    if (f > 0.0)
      lo = t;
    else
      hi = t;
    const double df = ray.d2h(t);
    double next = df < 0.0 ? t - f / df : 0.5 * (lo + hi);
    if (!(next > lo && next < hi))
      next = 0.5 * (lo + hi);
    if (next == t)
      break;
    t = next;
  }
  if (!(ray.d2h(t) < 0.0))
    throw numerical_error("nehari_scale: h''(t*) >= 0, the root is not a ray maximum");
  return NehariScale{t, iters, std::abs(ray.dh(t)) / (t * S)};
}

inline GridField nehari_project(const Model& m, const GridField& u)
{
  return scale(nehari_scale(m, u).t_star, u);
}

struct RayScan
{
  std::vector<double> t;
  std::vector<double> h;
  std::vector<double> dh;
  std::vector<double> d2h;
  std::vector<double> psi;

  /// Number of sign changes of h' across consecutive samples.
  int sign_changes() const
  {
    int count = 0;
    for (std::size_t i = 1; i < dh.size(); ++i)
      if ((dh[i - 1] > 0.0) != (dh[i] > 0.0))
        ++count;
    return count;
  }
};

/// Tabulates the ray on t_k = k t_max / samples, k = 1..samples.
inline RayScan ray_scan(const Model& m, const GridField& u, double t_max, int samples)
{
  detail::require_projectable(m, u, "ray_scan");
  if (!(t_max > 0.0) || samples < 2)
    throw domain_error("ray_scan: need t_max > 0 and at least 2 samples");
  const detail::Ray ray(m, u);
  RayScan scan;
  for (int k = 1; k <= samples; ++k) {
    const double t = t_max * k / samples;
    scan.t.push_back(t);
    scan.h.push_back(ray.h(t));
    scan.dh.push_back(ray.dh(t));
    scan.d2h.push_back(ray.d2h(t));
    scan.psi.push_back(ray.psi(t));
  }
  return scan;
}

/// <t'(u0), v> by implicit differentiation of L(t,u) = t[u]^2 - integral g'(tu)u.
inline double nehari_scale_derivative(const Model& m, const GridField& u0, const GridField& v)
{
  require_same_grid(u0, v, "nehari_scale_derivative");
  const double t0 = nehari_scale(m, u0).t_star;
  const auto a = u0.values();
  const auto b = v.values();
  const Grid& grid = u0.grid();
  const double S = seminorm_sq_fourier(u0, m.fp);
  const double dLdt = S - integrate_terms(grid, [&](std::size_t i) { return m.nl.g_second(t0 * a[i]) * a[i] * a[i]; });
  if (!(dLdt < 0.0))
    throw numerical_error("nehari_scale_derivative: dL/dt >= 0");
  const double dLdu = 2.0 * t0 * sobolev_inner(u0, v, m.fp) - integrate_terms(grid, [&](std::size_t i) {
                        return m.nl.g_prime(t0 * a[i]) * b[i] + m.nl.g_second(t0 * a[i]) * t0 * a[i] * b[i];
                      });
  return -dLdu / dLdt;
}

/// Smallest [t(u)u]^2 over `trials` random nonnegative bump fields.
inline double manifold_gap_probe(const Model& m, const Grid& grid, std::uint64_t seed, int trials)
{
  if (trials < 10)
    throw domain_error("manifold_gap_probe: need at least 10 trials");
  std::vector<double> gaps(static_cast<std::size_t>(trials));
  parallel_for(
    gaps.size(),
    [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        Rng rng(derive_seed(seed, i));
        const int bumps = std::uniform_int_distribution<int>(1, 3)(rng);
        const GridField u = random_bump_field(grid, rng, bumps, uniform(rng, 0.1, 2.0), true);
        gaps[i] = seminorm_sq_fourier(nehari_project(m, u), m.fp);
      }
    },
    1);
  return *std::min_element(gaps.begin(), gaps.end());
}

} // namespace frgs
