#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "frgs/error.hpp"
#include "frgs/parallel.hpp"
#include "frgs/summation.hpp"

namespace frgs {

/// Uniform periodic grid on the box [0, L)^N, N in {2, 3}, n points per
/// dimension, flattened in row-major (last index fastest) order.
///
/// Transform-based operations additionally require n to be a power of two
/// with n >= 8 (see spectral()); plain quadrature and rearrangement accept
/// any n >= 2.
class Grid
{
public:
  Grid() = default;

  Grid(int dim, double length, std::size_t points)
    : dim_(dim)
    , length_(length)
    , n_(points)
  {
    if (dim != 2 && dim != 3)
      throw domain_error("grid: dimension must be 2 or 3");
    if (!(length > 0.0) || !std::isfinite(length))
      throw domain_error("grid: box length must be positive and finite");
    if (points < 2)
      throw domain_error("grid: need at least 2 points per dimension");
    h_ = length / static_cast<double>(points);
    size_ = 1;
    for (int d = 0; d < dim; ++d)
      size_ *= points;
  }

  int dim() const { return dim_; }
  double length() const { return length_; }
  std::size_t points_per_dim() const { return n_; }
  double spacing() const { return h_; }
  double cell_volume() const { return std::pow(h_, dim_); }
  double volume() const { return std::pow(length_, dim_); }
  std::size_t size() const { return size_; }

  bool spectral() const { return n_ >= 8 && (n_ & (n_ - 1)) == 0; }

  void require_spectral(const char* what) const
  {
    if (!spectral())
      throw domain_error(std::string(what) + ": needs n a power of two, n >= 8");
  }

  std::array<std::size_t, 3> unravel(std::size_t flat) const
  {
    std::array<std::size_t, 3> idx{0, 0, 0};
    for (int d = dim_ - 1; d >= 0; --d) {
      idx[d] = flat % n_;
      flat /= n_;
    }
    return idx;
  }

  std::size_t ravel(const std::array<std::size_t, 3>& idx) const
  {
    std::size_t flat = 0;
    for (int d = 0; d < dim_; ++d)
      flat = flat * n_ + idx[d];
    return flat;
  }

  double coordinate(std::size_t i) const { return static_cast<double>(i) * h_; }

  /// Index (per dimension) of the grid point at the box center.
  std::size_t center_index() const { return n_ / 2; }

  /// Signed integer frequency of FFT bin i, in [-n/2, n/2).
  long frequency(std::size_t i) const
  {
    const long m = static_cast<long>(i);
    const long half = static_cast<long>(n_ / 2);
    return m < half ? m : m - static_cast<long>(n_);
  }

  double wavenumber(std::size_t i) const
  {
    return 2.0 * M_PI / length_ * static_cast<double>(frequency(i));
  }

  /// Calls fn(flat, |k|^2) for every Fourier bin, in flat order.
  template<class Fn>
  void for_each_wavenumber_sq(Fn&& fn) const
  {
    std::vector<double> k2(n_);
    for (std::size_t i = 0; i < n_; ++i)
      k2[i] = wavenumber(i) * wavenumber(i);
    std::size_t flat = 0;
    if (dim_ == 2) {
      for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
          fn(flat++, k2[i] + k2[j]);
    } else {
      for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
          for (std::size_t l = 0; l < n_; ++l)
            fn(flat++, k2[i] + k2[j] + k2[l]);
    }
  }

  bool operator==(const Grid&) const = default;

private:
  int dim_ = 2;
  double length_ = 1.0;
  std::size_t n_ = 2;
  double h_ = 0.5;
  std::size_t size_ = 4;
};

/// A real field sampled on a Grid. Immutable once built; all values finite.
class GridField
{
public:
  GridField() = default;

  GridField(Grid grid, std::vector<double> values)
    : grid_(grid)
    , values_(std::move(values))
  {
    if (values_.size() != grid_.size())
      throw domain_error("grid field: value count does not match the grid");
    for (double v : values_)
      if (!std::isfinite(v))
        throw domain_error("grid field: non-finite value");
  }

  static GridField zeros(const Grid& grid) { return GridField(grid, std::vector<double>(grid.size(), 0.0)); }
  static GridField constant(const Grid& grid, double value)
  {
    return GridField(grid, std::vector<double>(grid.size(), value));
  }

  /// Samples f(x) with x the grid-point coordinates (span of length N).
  template<class Fn>
  static GridField from_function(const Grid& grid, Fn&& f)
  {
    std::vector<double> v(grid.size());
    std::array<double, 3> x{};
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto idx = grid.unravel(i);
      for (int d = 0; d < grid.dim(); ++d)
        x[d] = grid.coordinate(idx[d]);
      v[i] = f(std::span<const double>(x.data(), static_cast<std::size_t>(grid.dim())));
    }
    return GridField(grid, std::move(v));
  }

  const Grid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  double max_abs() const
  {
    double m = 0.0;
    for (double v : values_)
      m = std::max(m, std::abs(v));
    return m;
  }
  double min() const
  {
    double m = values_.empty() ? 0.0 : values_[0];
    for (double v : values_)
      m = std::min(m, v);
    return m;
  }
  double max() const
  {
    double m = values_.empty() ? 0.0 : values_[0];
    for (double v : values_)
      m = std::max(m, v);
    return m;
  }

private:
  Grid grid_{};
  std::vector<double> values_;
};

inline void require_same_grid(const GridField& a, const GridField& b, const char* what)
{
  if (!(a.grid() == b.grid()))
    throw domain_error(std::string(what) + ": fields live on different grids");
}

/// Pointwise map u -> f(u).
template<class Fn>
GridField map(const GridField& u, Fn&& f)
{
  std::vector<double> out(u.size());
  const auto in = u.values();
  parallel_for(u.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i)
      out[i] = f(in[i]);
  });
  return GridField(u.grid(), std::move(out));
}

/// Pointwise map (u, v) -> f(u, v).
template<class Fn>
GridField zip(const GridField& u, const GridField& v, Fn&& f)
{
  require_same_grid(u, v, "zip");
  std::vector<double> out(u.size());
  const auto a = u.values();
  const auto b = v.values();
  parallel_for(u.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i)
      out[i] = f(a[i], b[i]);
  });
  return GridField(u.grid(), std::move(out));
}

/// alpha*u + beta*v
inline GridField lincomb(double alpha, const GridField& u, double beta, const GridField& v)
{
  return zip(u, v, [alpha, beta](double a, double b) { return alpha * a + beta * b; });
}

inline GridField scale(double alpha, const GridField& u)
{
  return map(u, [alpha](double a) { return alpha * a; });
}

/// Rectangle rule: cell_volume * pairwise sum of term(i).
template<class Term>
double integrate_terms(const Grid& grid, const Term& term)
{
  return grid.cell_volume() * pairwise_reduce(grid.size(), term);
}

inline double integrate(const GridField& f)
{
  const auto v = f.values();
  return integrate_terms(f.grid(), [v](std::size_t i) { return v[i]; });
}

/// Integral of f(u(x)) without materializing f(u).
template<class Fn>
double integrate_map(const GridField& u, Fn&& f)
{
  const auto v = u.values();
  return integrate_terms(u.grid(), [&](std::size_t i) { return f(v[i]); });
}

/// L^2 inner product, integral of u*v.
inline double inner(const GridField& u, const GridField& v)
{
  require_same_grid(u, v, "inner");
  const auto a = u.values();
  const auto b = v.values();
  return integrate_terms(u.grid(), [a, b](std::size_t i) { return a[i] * b[i]; });
}

inline double lp_norm(const GridField& f, double t)
{
  if (!(t >= 1.0) || !std::isfinite(t))
    throw domain_error("lp_norm: exponent must be >= 1");
  const double s = integrate_map(f, [t](double v) { return std::pow(std::abs(v), t); });
  return std::pow(s, 1.0 / t);
}

/// Discrete Fourier coefficients of a real GridField.
///
/// Coefficients are unnormalized, u_hat(k) = sum_x u(x) exp(-i k.x), so that
/// the rectangle-rule Parseval identity reads
///
///     integral |u|^2 dx = (L^N / n^{2N}) * sum_k |u_hat(k)|^2.
class SpectrumField
{
public:
  SpectrumField() = default;
  SpectrumField(Grid grid, std::vector<std::complex<double>> coeffs)
    : grid_(grid)
    , coeffs_(std::move(coeffs))
  {
    if (coeffs_.size() != grid_.size())
      throw domain_error("spectrum field: coefficient count does not match the grid");
  }

  const Grid& grid() const { return grid_; }
  std::span<const std::complex<double>> coeffs() const { return coeffs_; }
  std::size_t size() const { return coeffs_.size(); }
  std::complex<double> operator[](std::size_t i) const { return coeffs_[i]; }

  /// Weight turning sum_k |c_k|^2 into an L^2 integral.
  double parseval_weight() const
  {
    const double n_total = static_cast<double>(grid_.size());
    return grid_.volume() / (n_total * n_total);
  }

private:
  Grid grid_{};
  std::vector<std::complex<double>> coeffs_;
};

} // namespace frgs
