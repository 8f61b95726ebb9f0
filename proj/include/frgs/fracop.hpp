#pragma once

#include <cmath>
#include <vector>

#include "frgs/error.hpp"
#include "frgs/fft.hpp"
#include "frgs/grid.hpp"
#include "frgs/parallel.hpp"
#include "frgs/summation.hpp"

namespace frgs {

/// Order s, dimension N and the kernel normalization
/// C(N,s) = 4^s Gamma(N/2+s) / (pi^{N/2} |Gamma(-s)|).
struct FracParams
{
  double s = 0.5;
  int dim = 2;
  double c_ns = 0.0;

  static FracParams make(double s, int dim)
  {
    if (!(s > 0.0 && s < 1.0))
      throw domain_error("frac params: s must lie in (0,1)");
    if (dim < 1)
      throw domain_error("frac params: dimension must be positive");
    const double c = std::pow(4.0, s) * std::tgamma(0.5 * dim + s) /
                     (std::pow(M_PI, 0.5 * dim) * std::abs(std::tgamma(-s)));
    if (!(c > 0.0) || !std::isfinite(c))
      throw numerical_error("frac params: normalization constant not finite");
    return FracParams{s, dim, c};
  }
};

inline void require_dim(const GridField& u, const FracParams& fp, const char* what)
{
  if (u.grid().dim() != fp.dim)
    throw domain_error(std::string(what) + ": field dimension differs from FracParams");
}

/// Multiplier |k|^{2 sigma}; the zero mode is sent to zero for every sigma.
inline GridField frac_power(const GridField& u, double sigma)
{
  return apply_symbol(u, [sigma](double k2) { return k2 > 0.0 ? std::pow(k2, sigma) : 0.0; });
}

inline GridField frac_laplacian(const GridField& u, const FracParams& fp)
{
  require_dim(u, fp, "frac_laplacian");
  return frac_power(u, fp.s);
}

/// (-Delta)^{-s} with the mean projected out.
inline GridField inv_frac_laplacian(const GridField& f, const FracParams& fp)
{
  require_dim(f, fp, "inv_frac_laplacian");
  return frac_power(f, -fp.s);
}

/// [u]^2 = sum_k |k|^{2s} |u_hat_k|^2, Parseval-weighted.
inline double seminorm_sq_fourier(const GridField& u, const FracParams& fp)
{
  require_dim(u, fp, "seminorm_sq_fourier");
  const double s = fp.s;
  return spectral_quadratic_form(u, [s](double k2) { return k2 > 0.0 ? std::pow(k2, s) : 0.0; });
}

/// The bilinear form behind [.]^2.
inline double sobolev_inner(const GridField& u, const GridField& v, const FracParams& fp)
{
  require_dim(u, fp, "sobolev_inner");
  const double s = fp.s;
  return spectral_bilinear_form(u, v, [s](double k2) { return k2 > 0.0 ? std::pow(k2, s) : 0.0; });
}

namespace detail {

inline double gauss_legendre_cube_integral(int dims, double alpha)
{
  // 32-point Gauss-Legendre rule on [-1,1] for (1+|eta|^2)^{alpha/2}.
  constexpr int m = 32;
  std::vector<double> x(m), w(m);
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16)
        break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  if (dims == 0)
    return 1.0;
  double total = 0.0;
  if (dims == 1) {
    for (int i = 0; i < m; ++i)
      total += w[i] * std::pow(1.0 + x[i] * x[i], 0.5 * alpha);
  } else {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        total += w[i] * w[j] * std::pow(1.0 + x[i] * x[i] + x[j] * x[j], 0.5 * alpha);
  }
  return total;
}

/// Integral of |z|^{2-N-2s} over the cube [-h/2, h/2]^N, by splitting the
/// cube into 2N pyramids with apex at the origin.
inline double self_cell_integral(int dim, double s, double h)
{
  const double alpha = 2.0 - dim - 2.0 * s;
  const double radial = std::pow(0.5 * h, alpha + dim) / (alpha + dim);
  return 2.0 * dim * radial * gauss_legendre_cube_integral(dim - 1, alpha);
}

inline double sphere_area(int dim)
{
  return 2.0 * std::pow(M_PI, 0.5 * dim) / std::tgamma(0.5 * dim);
}

} // namespace detail

/// Largest grid accepted by seminorm_sq_direct (cost is quadratic).
inline constexpr std::size_t direct_seminorm_max_points = std::size_t{1} << 16;

/// Gagliardo double sum (C(N,s)/2) * sum_{x != y} |u(x)-u(y)|^2 K(x-y) h^{2N}.
///
/// K is the periodized kernel sum_m |x-y+mL|^{-N-2s}: images with
/// max|m_i| <= M are summed exactly and the rest replaced by the integral
/// over the exterior of the equal-volume ball. The excluded diagonal cell is
/// restored to leading order by h^N |grad u|^2/N * integral_cell |z|^{2-N-2s}
/// with a centered-difference gradient.
inline double seminorm_sq_direct(const GridField& u, const FracParams& fp)
{
  require_dim(u, fp, "seminorm_sq_direct");
  const Grid& grid = u.grid();
  if (grid.size() > direct_seminorm_max_points)
    throw domain_error("seminorm_sq_direct: grid exceeds 2^16 points");
  if (grid.points_per_dim() < 4)
    throw domain_error("seminorm_sq_direct: need at least 4 points per dimension");

  const int dim = grid.dim();
  const std::size_t n = grid.points_per_dim();
  const double h = grid.spacing();
  const double length = grid.length();
  const double expo = -0.5 * (dim + 2.0 * fp.s);
  const int images = dim == 2 ? 20 : 8;

  const double side = (2.0 * images + 1.0) * length;
  const double radius = side * std::pow(dim / detail::sphere_area(dim), 1.0 / dim);
  const double tail = detail::sphere_area(dim) * std::pow(radius, -2.0 * fp.s) / (2.0 * fp.s * grid.volume());

  std::vector<double> kernel(grid.size(), 0.0);
  parallel_for(
    grid.size(),
    [&](std::size_t b, std::size_t e) {
      for (std::size_t off = b; off < e; ++off) {
        if (off == 0)
          continue;
        const auto idx = grid.unravel(off);
        double d[3] = {0.0, 0.0, 0.0};
        for (int a = 0; a < dim; ++a)
          d[a] = static_cast<double>(grid.frequency(idx[a])) * h;
        double acc = 0.0;
        for (int m0 = -images; m0 <= images; ++m0) {
          const double x0 = d[0] + m0 * length;
          for (int m1 = -images; m1 <= images; ++m1) {
            const double x1 = d[1] + m1 * length;
            if (dim == 2) {
              acc += std::pow(x0 * x0 + x1 * x1, expo);
            } else {
              for (int m2 = -images; m2 <= images; ++m2) {
                const double x2 = d[2] + m2 * length;
                acc += std::pow(x0 * x0 + x1 * x1 + x2 * x2, expo);
              }
            }
          }
        }
        kernel[off] = acc + tail;
      }
    },
    64);

  const auto v = u.values();
  auto shifted = [&](const std::array<std::size_t, 3>& base, const std::array<std::size_t, 3>& off) {
    std::array<std::size_t, 3> y{};
    for (int a = 0; a < dim; ++a)
      y[a] = (base[a] + off[a]) % n;
    return grid.ravel(y);
  };

  std::vector<double> per_point(grid.size(), 0.0);
  parallel_for(
    grid.size(),
    [&](std::size_t b, std::size_t e) {
      for (std::size_t x = b; x < e; ++x) {
        const auto xi = grid.unravel(x);
        per_point[x] = pairwise_reduce(grid.size(), [&](std::size_t off) {
          if (off == 0)
            return 0.0;
          const double diff = v[x] - v[shifted(xi, grid.unravel(off))];
          return kernel[off] * diff * diff;
        });
      }
    },
    16);
  const double far = std::pow(h, 2 * dim) * pairwise_sum(per_point);

  std::vector<double> grad_sq(grid.size(), 0.0);
  for (std::size_t x = 0; x < grid.size(); ++x) {
    const auto xi = grid.unravel(x);
    double acc = 0.0;
    for (int a = 0; a < dim; ++a) {
      std::array<std::size_t, 3> fwd{}, bwd{};
      fwd[a] = 1;
      bwd[a] = n - 1;
      const double g = (v[shifted(xi, fwd)] - v[shifted(xi, bwd)]) / (2.0 * h);
      acc += g * g;
    }
    grad_sq[x] = acc;
  }
  const double near =
    std::pow(h, dim) * pairwise_sum(grad_sq) * detail::self_cell_integral(dim, fp.s, h) / dim;

  return 0.5 * fp.c_ns * (far + near);
}

} // namespace frgs
