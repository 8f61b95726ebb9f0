#pragma once

#include <complex>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include <fftw3.h>

#include "frgs/grid.hpp"

namespace frgs {

namespace detail {

/// Process-wide cache of in-place complex FFTW plans. Planning is not
/// thread-safe in FFTW, executing a finished plan on new arrays is.
class PlanCache
{
public:
  static fftw_plan get(int dim, std::size_t n, int sign)
  {
    static PlanCache cache;
    std::lock_guard lock(cache.mutex_);
    const auto key = std::make_tuple(dim, n, sign);
    if (auto it = cache.plans_.find(key); it != cache.plans_.end())
      return it->second;

    std::size_t total = 1;
    int dims[3];
    for (int d = 0; d < dim; ++d) {
      dims[d] = static_cast<int>(n);
      total *= n;
    }
    auto* buffer = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * total));
    // UNALIGNED keeps the chosen codelets independent of buffer alignment,
    // so repeated runs are bit-identical.
    fftw_plan plan = fftw_plan_dft(dim, dims, buffer, buffer, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buffer);
    if (plan == nullptr)
      throw numerical_error("fft: FFTW planning failed");
    cache.plans_.emplace(key, plan);
    return plan;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

private:
  PlanCache() = default;
  ~PlanCache()
  {
    for (auto& [key, plan] : plans_)
      fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::tuple<int, std::size_t, int>, fftw_plan> plans_;
};

inline void transform_inplace(const Grid& grid, std::vector<std::complex<double>>& data, int sign)
{
  fftw_plan plan = PlanCache::get(grid.dim(), grid.points_per_dim(), sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, ptr, ptr);
}

} // namespace detail

inline SpectrumField fft(const GridField& f)
{
  const Grid& grid = f.grid();
  grid.require_spectral("fft");
  std::vector<std::complex<double>> data(f.values().begin(), f.values().end());
  detail::transform_inplace(grid, data, FFTW_FORWARD);
  return SpectrumField(grid, std::move(data));
}

/// Inverse transform; the imaginary part (round-off for a conjugate
/// symmetric spectrum) is dropped.
inline GridField ifft(const SpectrumField& spectrum)
{
  const Grid& grid = spectrum.grid();
  grid.require_spectral("ifft");
  std::vector<std::complex<double>> data(spectrum.coeffs().begin(), spectrum.coeffs().end());
  detail::transform_inplace(grid, data, FFTW_BACKWARD);
  const double norm = 1.0 / static_cast<double>(grid.size());
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = data[i].real() * norm;
  return GridField(grid, std::move(out));
}

/// Applies the real, radial Fourier multiplier symbol(|k|^2) to f.
template<class Symbol>
GridField apply_symbol(const GridField& f, Symbol&& symbol)
{
  const Grid& grid = f.grid();
  grid.require_spectral("apply_symbol");
  std::vector<std::complex<double>> data(f.values().begin(), f.values().end());
  detail::transform_inplace(grid, data, FFTW_FORWARD);
  grid.for_each_wavenumber_sq([&](std::size_t i, double k2) { data[i] *= symbol(k2); });
  detail::transform_inplace(grid, data, FFTW_BACKWARD);
  const double norm = 1.0 / static_cast<double>(grid.size());
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = data[i].real() * norm;
  return GridField(grid, std::move(out));
}

/// sum_k symbol(|k|^2) |f_hat(k)|^2 with the Parseval weight, i.e. the
/// quadratic form of the multiplier as an L^2 integral.
template<class Symbol>
double spectral_quadratic_form(const GridField& f, Symbol&& symbol)
{
  const SpectrumField coeffs = fft(f);
  std::vector<double> terms(coeffs.size());
  coeffs.grid().for_each_wavenumber_sq(
    [&](std::size_t i, double k2) { terms[i] = symbol(k2) * std::norm(coeffs[i]); });
  return coeffs.parseval_weight() * pairwise_sum(terms);
}

/// Bilinear form of the multiplier, integral of u * M v.
template<class Symbol>
double spectral_bilinear_form(const GridField& u, const GridField& v, Symbol&& symbol)
{
  require_same_grid(u, v, "spectral_bilinear_form");
  const SpectrumField a = fft(u);
  const SpectrumField b = fft(v);
  std::vector<double> terms(a.size());
  a.grid().for_each_wavenumber_sq(
    [&](std::size_t i, double k2) { terms[i] = symbol(k2) * (a[i] * std::conj(b[i])).real(); });
  return a.parseval_weight() * pairwise_sum(terms);
}

} // namespace frgs
