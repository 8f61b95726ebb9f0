#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <utility>
#include <vector>

#include "frgs/error.hpp"
#include "frgs/fracop.hpp"
#include "frgs/grid.hpp"

namespace frgs {

/// Grid indices ranked by squared distance to the center point (in units of
/// h^2, so ties are exact), ties broken by flat index.
struct RearrangeOrder
{
  std::array<std::size_t, 3> center{};
  std::vector<std::size_t> order;
  std::vector<long> dist_sq;          ///< dist_sq[k] belongs to order[k]
  std::vector<std::size_t> shell_begin; ///< start of each equal-distance run, plus end

  static std::shared_ptr<const RearrangeOrder> for_grid(const Grid& grid)
  {
    static std::mutex mutex;
    static std::map<std::pair<int, std::size_t>, std::shared_ptr<const RearrangeOrder>> cache;
    const auto key = std::make_pair(grid.dim(), grid.points_per_dim());
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end())
      return it->second;
    auto built = std::make_shared<const RearrangeOrder>(build(grid));
    cache.emplace(key, built);
    return built;
  }

  std::size_t shell_count() const { return shell_begin.size() - 1; }

private:
  static RearrangeOrder build(const Grid& grid)
  {
    RearrangeOrder ro;
    const long c = static_cast<long>(grid.center_index());
    for (int a = 0; a < grid.dim(); ++a)
      ro.center[a] = grid.center_index();
    std::vector<long> d2(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto idx = grid.unravel(i);
      long acc = 0;
      for (int a = 0; a < grid.dim(); ++a) {
        const long off = static_cast<long>(idx[a]) - c;
        acc += off * off;
      }
      d2[i] = acc;
    }
    ro.order.resize(grid.size());
    std::iota(ro.order.begin(), ro.order.end(), std::size_t{0});
    std::stable_sort(ro.order.begin(), ro.order.end(), [&](std::size_t a, std::size_t b) { return d2[a] < d2[b]; });
    ro.dist_sq.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
      ro.dist_sq[k] = d2[ro.order[k]];
      if (k == 0 || ro.dist_sq[k] != ro.dist_sq[k - 1])
        ro.shell_begin.push_back(k);
    }
    ro.shell_begin.push_back(grid.size());
    return ro;
  }
};

/// Lebesgue measure of the unit sphere in R^N.
inline double sphere_measure(int dim)
{
  return detail::sphere_area(dim);
}

/// Sorted |u| assigned along the distance ranking: nonnegative, radially
/// non-increasing, and equimeasurable with |u|.
inline GridField symm_decr_rearrange(const GridField& u)
{
  const auto ro = RearrangeOrder::for_grid(u.grid());
  std::vector<double> sorted(u.size());
  const auto v = u.values();
  for (std::size_t i = 0; i < sorted.size(); ++i)
    sorted[i] = std::abs(v[i]);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  std::vector<double> out(u.size());
  for (std::size_t k = 0; k < sorted.size(); ++k)
    out[ro->order[k]] = sorted[k];
  return GridField(u.grid(), std::move(out));
}

/// True if u >= 0 and u never increases along the distance ranking.
inline bool is_radially_nonincreasing(const GridField& u)
{
  const auto ro = RearrangeOrder::for_grid(u.grid());
  const auto v = u.values();
  for (std::size_t k = 0; k < ro->order.size(); ++k) {
    const double cur = v[ro->order[k]];
    if (cur < 0.0)
      return false;
    if (k > 0 && cur > v[ro->order[k - 1]])
      return false;
  }
  return true;
}

/// ([u*]^2, [u]^2), both from the Fourier seminorm.
inline std::pair<double, double> polya_szego_check(const GridField& u, const FracParams& fp)
{
  return {seminorm_sq_fourier(symm_decr_rearrange(u), fp), seminorm_sq_fourier(u, fp)};
}

/// u_c = min{max{u - c, 0}, 1/c}.
inline GridField truncate(const GridField& u, double c)
{
  if (!(c > 0.0 && c < 1.0))
    throw domain_error("truncate: c must lie in (0,1)");
  const double cap = 1.0 / c;
  return map(u, [c, cap](double x) { return std::min(std::max(x - c, 0.0), cap); });
}

/// max over grid points with |x - center| >= 2h of
/// u(x) - (N/omega_{N-1})^{1/t} |x - center|^{-N/t} ||u||_t.
inline double decay_bound_check(const GridField& u, double t)
{
  if (!(t >= 1.0) || !std::isfinite(t))
    throw domain_error("decay_bound_check: need t >= 1");
  if (!is_radially_nonincreasing(u))
    throw domain_error("decay_bound_check: field is not nonnegative radially non-increasing");
  const Grid& grid = u.grid();
  const auto ro = RearrangeOrder::for_grid(grid);
  const int dim = grid.dim();
  const double h = grid.spacing();
  const double factor = std::pow(dim / sphere_measure(dim), 1.0 / t) * lp_norm(u, t);
  const auto v = u.values();
  double margin = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < ro->order.size(); ++k) {
    if (ro->dist_sq[k] < 4)
      continue;
    const double r = h * std::sqrt(static_cast<double>(ro->dist_sq[k]));
    margin = std::max(margin, v[ro->order[k]] - factor * std::pow(r, -dim / t));
  }
  return margin;
}

struct RadialProfile
{
  std::vector<double> r;
  std::vector<double> u;
};

/// One row per distance shell: shell radius and the mean value on it.
inline RadialProfile radial_profile(const GridField& u)
{
  const auto ro = RearrangeOrder::for_grid(u.grid());
  const auto v = u.values();
  RadialProfile prof;
  for (std::size_t s = 0; s < ro->shell_count(); ++s) {
    const std::size_t b = ro->shell_begin[s];
    const std::size_t e = ro->shell_begin[s + 1];
    double acc = 0.0;
    for (std::size_t k = b; k < e; ++k)
      acc += v[ro->order[k]];
    prof.r.push_back(u.grid().spacing() * std::sqrt(static_cast<double>(ro->dist_sq[b])));
    prof.u.push_back(acc / static_cast<double>(e - b));
  }
  return prof;
}

} // namespace frgs
