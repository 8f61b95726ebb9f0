#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "frgs/fracop.hpp"
#include "frgs/grid.hpp"
#include "frgs/nehari.hpp"
#include "frgs/nonlinearity.hpp"
#include "frgs/orlicz.hpp"
#include "frgs/random_fields.hpp"
#include "frgs/rearrange.hpp"

namespace frgs {

struct PropertyOutcome
{
  bool pass = false;
  std::string detail;
};

struct Property
{
  std::string name;
  std::function<PropertyOutcome(Rng&)> run;
};

namespace detail {

inline std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0)
{
  char buf[160];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

inline double rel_diff(double a, double b)
{
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

inline std::vector<Property> properties()
{
  const Exponents exps = Exponents::make(2, 0.5, 2.5, 4.0);
  const Nonlinearity odd = make_nonlinearity(exps, SignMode::odd);
  const Grid grid(2, 8.0, 32);
  const FracParams fp = FracParams::make(0.5, 2);
  std::vector<Property> props;

  props.push_back({"nonlinearity.oddness", [odd](Rng& rng) {
                     double worst = 0.0;
                     for (int i = 0; i < 10000; ++i) {
                       const double t = uniform(rng, -50.0, 50.0);
                       worst = std::max({worst, std::abs(odd.g(-t) - odd.g(t)),
                                         std::abs(odd.g_prime(-t) + odd.g_prime(t))});
                     }
                     return PropertyOutcome{worst == 0.0, fmt("max asymmetry %.3g", worst)};
                   }});
  props.push_back({"nonlinearity.c2_matching", [](Rng& rng) {
                     double worst = 0.0;
                     for (int i = 0; i < 5; ++i) {
                       const double p = uniform(rng, 2.1, 3.5);
                       const double q = std::max(uniform(rng, p + 0.2, 8.0), 4.0);
                       const Nonlinearity nl = make_nonlinearity(Exponents::make(2, 0.5, std::min(p, 3.9), q));
                       worst = std::max(worst, c2_matching_defect(nl));
                     }
                     return PropertyOutcome{worst <= 1e-8, fmt("max relative jump %.3g", worst)};
                   }});
  props.push_back({"nonlinearity.growth_chain", [odd](Rng&) {
                     const HypothesisReport r = check_hypotheses(odd, 1e-3, 1e3, 100000);
                     return PropertyOutcome{r.ok() && r.mu_hat > 2.1 && r.ratio2_min >= 1.0,
                                            fmt("mu_hat %.6g ratio2_min %.6g c3_hat %.6g", r.mu_hat, r.ratio2_min,
                                                r.c3_hat)};
                   }});

  props.push_back({"field.round_trip", [grid](Rng& rng) {
                     double worst = 0.0;
                     for (int i = 0; i < 100; ++i) {
                       const GridField f = random_mixed_field(grid, rng);
                       const GridField back = ifft(fft(f));
                       for (std::size_t k = 0; k < f.size(); ++k)
                         worst = std::max(worst, std::abs(back[k] - f[k]) / f.max_abs());
                     }
                     return PropertyOutcome{worst <= 1e-12, fmt("max relative error %.3g", worst)};
                   }});
  props.push_back({"field.integral_monotone_linear", [grid](Rng& rng) {
                     bool ok = true;
                     double worst = 0.0;
                     for (int i = 0; i < 50; ++i) {
                       const GridField f = random_mixed_field(grid, rng);
                       const GridField g = map(f, [](double x) { return x + std::abs(x) * 0.5 + 0.1; });
                       ok = ok && integrate(f) <= integrate(g);
                       const double a = uniform(rng, -3.0, 3.0);
                       const double lin = integrate(lincomb(a, f, 1.0, g));
                       const double sep = a * integrate(f) + integrate(g);
                       worst = std::max(worst, std::abs(lin - sep) / std::max(1.0, std::abs(sep)));
                     }
                     return PropertyOutcome{ok && worst <= 1e-12, fmt("linearity defect %.3g", worst)};
                   }});
  props.push_back({"field.lp_triangle", [grid](Rng& rng) {
                     bool ok = true;
                     for (int i = 0; i < 50; ++i) {
                       const GridField f = random_mixed_field(grid, rng);
                       const GridField g = random_mixed_field(grid, rng);
                       const double t = uniform(rng, 1.0, 6.0);
                       ok = ok && lp_norm(lincomb(1.0, f, 1.0, g), t) <= (lp_norm(f, t) + lp_norm(g, t)) * (1 + 1e-12);
                     }
                     return PropertyOutcome{ok, ok ? "50 pairs" : "triangle inequality violated"};
                   }});

  props.push_back({"fracop.identities", [grid, fp](Rng& rng) {
                     double adj = 0.0, en = 0.0, comp = 0.0;
                     for (int i = 0; i < 20; ++i) {
                       const GridField u = random_mixed_field(grid, rng);
                       const GridField v = random_mixed_field(grid, rng);
                       const GridField lu = frac_laplacian(u, fp);
                       const GridField lv = frac_laplacian(v, fp);
                       adj = std::max(adj, rel_diff(inner(v, lu), inner(u, lv)));
                       en = std::max(en, rel_diff(inner(u, lu), seminorm_sq_fourier(u, fp)));
                       const GridField half = frac_power(frac_power(u, 0.5 * fp.s), 0.5 * fp.s);
                       double d = 0.0;
                       for (std::size_t k = 0; k < u.size(); ++k)
                         d = std::max(d, std::abs(half[k] - lu[k]));
                       comp = std::max(comp, d / lu.max_abs());
                     }
                     return PropertyOutcome{adj <= 1e-10 && en <= 1e-10 && comp <= 1e-10,
                                            fmt("adjoint %.3g energy %.3g composition %.3g", adj, en, comp)};
                   }});

  props.push_back({"orlicz.sandwich", [grid](Rng& rng) {
                     int bad = 0;
                     for (int i = 0; i < 50; ++i) {
                       const OrliczReport r = orlicz_norm(random_mixed_field(grid, rng), 2.5, 4.0);
                       if (!(r.lower_bound <= r.inf_decomp * (1 + 1e-8) && r.inf_decomp <= r.upper_bound * (1 + 1e-8)))
                         ++bad;
                     }
                     return PropertyOutcome{bad == 0, fmt("%.0f of 50 fields outside the bounds", bad)};
                   }});
  props.push_back({"orlicz.norm_axioms", [grid](Rng& rng) {
                     double hom = 0.0;
                     bool tri = true;
                     for (int i = 0; i < 10; ++i) {
                       const GridField u = random_mixed_field(grid, rng);
                       const GridField v = random_mixed_field(grid, rng);
                       const double a = uniform(rng, -4.0, 4.0);
                       const double nu = inf_decomposition_norm(u, 2.5, 4.0).value;
                       const double nv = inf_decomposition_norm(v, 2.5, 4.0).value;
                       hom = std::max(hom, rel_diff(inf_decomposition_norm(scale(a, u), 2.5, 4.0).value, std::abs(a) * nu));
                       tri = tri && inf_decomposition_norm(lincomb(1.0, u, 1.0, v), 2.5, 4.0).value <= (nu + nv) * (1 + 1e-6);
                     }
                     return PropertyOutcome{hom <= 1e-6 && tri, fmt("homogeneity defect %.3g", hom)};
                   }});
  props.push_back({"orlicz.equivalence_ratio", [grid](Rng& rng) {
                     double lo = 1e300, hi = 0.0;
                     for (int i = 0; i < 50; ++i) {
                       const OrliczReport r = orlicz_norm(random_mixed_field(grid, rng), 2.5, 4.0);
                       lo = std::min(lo, r.luxemburg / r.inf_decomp);
                       hi = std::max(hi, r.luxemburg / r.inf_decomp);
                     }
                     return PropertyOutcome{lo >= 0.5 && hi <= 2.0, fmt("luxemburg/inf ratio in [%.4g, %.4g]", lo, hi)};
                   }});

  props.push_back({"rearrange.equimeasurable_idempotent", [grid](Rng& rng) {
                     bool ok = true;
                     for (int i = 0; i < 50; ++i) {
                       const GridField u = random_mixed_field(grid, rng);
                       const GridField s = symm_decr_rearrange(u);
                       std::vector<double> a(u.size()), b(s.values().begin(), s.values().end());
                       for (std::size_t k = 0; k < u.size(); ++k)
                         a[k] = std::abs(u[k]);
                       std::sort(a.begin(), a.end());
                       std::sort(b.begin(), b.end());
                       const GridField twice = symm_decr_rearrange(s);
                       ok = ok && a == b && std::equal(twice.values().begin(), twice.values().end(), s.values().begin());
                     }
                     return PropertyOutcome{ok, ok ? "50 fields" : "multiset or idempotence mismatch"};
                   }});
  props.push_back({"rearrange.order_preserving", [grid](Rng& rng) {
                     bool ok = true;
                     for (int i = 0; i < 50; ++i) {
                       const GridField u = random_mixed_field(grid, rng);
                       const GridField v = map(u, [&rng](double x) { return std::abs(x) + uniform(rng, 0.0, 1.0); });
                       const GridField a = symm_decr_rearrange(u);
                       const GridField b = symm_decr_rearrange(v);
                       for (std::size_t k = 0; k < a.size(); ++k)
                         ok = ok && a[k] <= b[k];
                     }
                     return PropertyOutcome{ok, ok ? "50 pairs" : "pointwise order broken"};
                   }});
  props.push_back({"rearrange.polya_szego", [grid](Rng& rng) {
                     int bad = 0;
                     double worst = 0.0;
                     for (double s : {0.3, 0.5, 0.8}) {
                       const FracParams f = FracParams::make(s, 2);
                       for (int i = 0; i < 20; ++i) {
                         const auto [star, orig] = polya_szego_check(random_mixed_field(grid, rng), f);
                         worst = std::max(worst, star / orig - 1.0);
                         if (star > orig * (1 + 1e-10))
                           ++bad;
                       }
                     }
                     return PropertyOutcome{bad == 0, fmt("%.0f of 60 violations, worst excess %.3g", bad, worst)};
                   }});
  props.push_back({"rearrange.truncation", [grid, fp](Rng& rng) {
                     bool ok = true;
                     for (int i = 0; i < 10; ++i) {
                       const GridField u = random_mixed_field(grid, rng);
                       const double base = seminorm_sq_fourier(u, fp);
                       double prev = 0.0;
                       for (double c : {0.2, 0.1, 0.05}) {
                         const double cur = seminorm_sq_fourier(truncate(u, c), fp);
                         ok = ok && cur <= base * (1 + 1e-10) && cur >= prev;
                         prev = cur;
                       }
                     }
                     return PropertyOutcome{ok, ok ? "10 fields" : "truncation raised the seminorm"};
                   }});

  props.push_back({"nehari.ray_structure", [grid, exps](Rng& rng) {
                     const Model m = Model::make(exps, SignMode::positive_part);
                     bool ok = true;
                     for (int i = 0; i < 10; ++i) {
                       const GridField u = random_bump_field(grid, rng, 2, uniform(rng, 0.2, 2.0), true);
                       const NehariScale ns = nehari_scale(m, u);
                       const RayScan scan = ray_scan(m, u, 4.0 * ns.t_star, 400);
                       ok = ok && scan.sign_changes() == 1 && ns.residual <= 1e-10;
                       ok = ok && manifold_tangency(m, scale(ns.t_star, u)) < 0.0;
                       for (std::size_t k = 1; k < scan.psi.size(); ++k)
                         ok = ok && scan.psi[k] > scan.psi[k - 1];
                     }
                     return PropertyOutcome{ok, ok ? "10 fields" : "ray structure broken"};
                   }});
  props.push_back({"nehari.derivative", [grid, exps](Rng& rng) {
                     const Model m = Model::make(exps, SignMode::positive_part);
                     double worst = 0.0;
                     for (int i = 0; i < 5; ++i) {
                       const GridField u = random_bump_field(grid, rng, 2, 1.0, true);
                       const GridField v = random_bump_field(grid, rng, 2, 0.3);
                       const double eps = 1e-5;
                       const double fd = (nehari_scale(m, lincomb(1.0, u, eps, v)).t_star -
                                          nehari_scale(m, lincomb(1.0, u, -eps, v)).t_star) /
                                         (2 * eps);
                       worst = std::max(worst, rel_diff(nehari_scale_derivative(m, u, v), fd));
                     }
                     return PropertyOutcome{worst <= 1e-4, fmt("max relative error %.3g", worst)};
                   }});
  return props;
}

} // namespace detail

/// Runs every property with a generator seeded from `seed`, printing one
/// line per property. Stops at the first failure unless keep_going is set.
/// Returns the number of failed properties.
inline int run_propsuite(std::uint64_t seed, std::ostream& os, bool keep_going = false)
{
  const auto props = detail::properties();
  int failures = 0;
  for (std::size_t i = 0; i < props.size(); ++i) {
    Rng rng(derive_seed(seed, i));
    PropertyOutcome out;
    try {
      out = props[i].run(rng);
    } catch (const std::exception& e) {
      out = PropertyOutcome{false, std::string("exception: ") + e.what()};
    }
    os << (out.pass ? "PASS " : "FAIL ") << props[i].name << ": " << out.detail << '\n';
    if (!out.pass) {
      ++failures;
      if (!keep_going)
        break;
    }
  }
  return failures;
}

} // namespace frgs
