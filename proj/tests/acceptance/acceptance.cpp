// Acceptance run: one PASS/FAIL line per criterion, exit status = failure count.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "frgs/io.hpp"
#include "frgs/propsuite.hpp"

using namespace frgs;

namespace {

struct Outcome
{
  bool pass = false;
  std::string detail;
};

struct Criterion
{
  int id;
  std::string name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* format, auto... args)
{
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double rel_diff(double a, double b)
{
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

SolverConfig default_config()
{
  return read_config(FRGS_CONFIG_DIR "/default.json");
}

SolutionReport solve_or_partial(const SolverConfig& cfg)
{
  try {
    return minimize(cfg);
  } catch (const stagnation_error& e) {
    return e.report();
  }
}

std::string solve_artifacts(const SolverConfig& cfg)
{
  const SolutionReport r = solve_or_partial(cfg);
  std::ostringstream os;
  os << report_to_json(r).dump() << '\n';
  write_profile_csv(os, r.u);
  write_field_csv(os, r.u);
  return os.str();
}

Outcome hypothesis_suite()
{
  struct Tuple
  {
    double p, q;
    int dim;
    double s;
  };
  bool ok = true;
  std::string detail;
  for (const Tuple t : {Tuple{2.5, 4, 2, 0.5}, Tuple{3, 6, 3, 0.75}}) {
    const HypothesisReport r = check_hypotheses(make_nonlinearity(Exponents::make(t.dim, t.s, t.p, t.q)), 1e-3, 1e3, 1000000);
    ok = ok && r.ok() && r.mu_hat > 2.1;
    detail += fmt("(p=%g,q=%g,N=%d,s=%g) mu_hat %.6g violations %zu; ", t.p, t.q, t.dim, t.s, r.mu_hat, r.violations.size());
  }
  return {ok, detail};
}

Outcome c2_matching()
{
  Rng rng(derive_seed(2, 0));
  double worst = 0.0;
  for (int i = 0; i < 5; ++i) {
    const int dim = i % 2 == 0 ? 2 : 3;
    const double s = uniform(rng, 0.2, 0.9);
    const double ts = Exponents::sobolev_exponent(dim, s);
    const double p = uniform(rng, 2.0 + 0.05 * (ts - 2.0), ts - 0.05 * (ts - 2.0));
    const double q = uniform(rng, ts, 2.0 * ts);
    worst = std::max(worst, c2_matching_defect(make_nonlinearity(Exponents::make(dim, s, p, q))));
  }
  return {worst <= 1e-8, fmt("max relative one-sided mismatch %.3g over 5 pairs", worst)};
}

Outcome operator_identities()
{
  const Grid grid(2, 16.0, 64);
  const FracParams fp = FracParams::make(0.5, 2);
  Rng rng(derive_seed(3, 0));
  double adj = 0.0, en = 0.0, comp = 0.0;
  for (int i = 0; i < 100; ++i) {
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
  return {adj <= 1e-10 && en <= 1e-10 && comp <= 1e-10,
          fmt("self-adjointness %.3g energy %.3g composition %.3g over 100 fields", adj, en, comp)};
}

Outcome seminorm_cross_validation()
{
  const FracParams fp = FracParams::make(0.5, 2);
  std::vector<double> err;
  std::string detail;
  for (std::size_t n : {16u, 32u, 64u}) {
    const Grid g(2, 16.0, n);
    const double c = g.coordinate(g.center_index());
    const GridField u = GridField::from_function(g, [c](auto x) {
      return std::exp(-((x[0] - c) * (x[0] - c) + (x[1] - c) * (x[1] - c)));
    });
    const double ratio = seminorm_sq_direct(u, fp) / seminorm_sq_fourier(u, fp);
    err.push_back(std::abs(ratio - 1.0));
    detail += fmt("n=%zu ratio %.5f; ", n, ratio);
  }
  const bool monotone = err[1] < err[0] && err[2] < err[1];
  return {err[2] <= 0.05 && monotone, detail + (monotone ? "improving" : "not improving")};
}

Outcome polya_szego()
{
  const Grid grid(2, 16.0, 64);
  Rng rng(derive_seed(5, 0));
  int bad = 0, total = 0;
  double worst = -1.0;
  bool equi = true;
  for (double s : {0.3, 0.5, 0.8}) {
    const FracParams fp = FracParams::make(s, 2);
    for (int i = 0; i < 100; ++i) {
      const GridField u = random_mixed_field(grid, rng);
      const GridField star = symm_decr_rearrange(u);
      std::vector<double> a(u.size()), b(star.values().begin(), star.values().end());
      for (std::size_t k = 0; k < u.size(); ++k)
        a[k] = std::abs(u[k]);
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      equi = equi && a == b;
      const double ss = seminorm_sq_fourier(star, fp);
      const double su = seminorm_sq_fourier(u, fp);
      worst = std::max(worst, ss / su - 1.0);
      bad += ss > su * (1 + 1e-10);
      ++total;
    }
  }
  return {bad == 0 && equi,
          fmt("%d of %d fields with [u*]^2 > [u]^2, worst relative excess %.4g; equimeasurable %s", bad, total, worst,
              equi ? "yes" : "no")};
}

Outcome truncation()
{
  const Grid grid(2, 16.0, 64);
  const FracParams fp = FracParams::make(0.5, 2);
  Rng rng(derive_seed(6, 0));
  int bad = 0;
  for (int i = 0; i < 20; ++i) {
    const GridField u = random_mixed_field(grid, rng);
    const double base = seminorm_sq_fourier(u, fp);
    double prev = 0.0;
    bool ok = true;
    for (double c : {0.2, 0.1, 0.05}) {
      const double cur = seminorm_sq_fourier(truncate(u, c), fp);
      ok = ok && cur <= base && cur >= prev;
      prev = cur;
    }
    bad += !ok;
  }
  return {bad == 0, fmt("%d of 20 fields break the truncation ordering", bad)};
}

Outcome orlicz_sandwich()
{
  const Grid grid(2, 8.0, 32);
  const std::size_t count = 1000;
  std::vector<OrliczReport> reports(count);
  parallel_for(
    count,
    [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        Rng rng(derive_seed(7, i));
        reports[i] = orlicz_norm(random_mixed_field(grid, rng), 2.5, 4.0);
      }
    },
    8);
  int below = 0, above = 0, both_branches = 0;
  double worst_above = 0.0, lo = 1e300, hi = 0.0;
  for (const OrliczReport& r : reports) {
    below += r.lower_bound > r.inf_decomp * (1 + 1e-8);
    if (r.inf_decomp > r.upper_bound * (1 + 1e-8)) {
      ++above;
      worst_above = std::max(worst_above, r.inf_decomp / r.upper_bound - 1.0);
    }
    both_branches += r.q_norm_outside > 0.0 && r.p_norm_inside > 0.0;
    lo = std::min(lo, r.luxemburg / r.inf_decomp);
    hi = std::max(hi, r.luxemburg / r.inf_decomp);
  }
  return {below == 0 && above == 0 && lo >= 0.5 && hi <= 2.0,
          fmt("lower bound violated %d, upper bound violated %d (worst excess %.4g), %d fields span both branches; "
              "luxemburg/inf in [%.4g, %.4g]",
              below, above, worst_above, both_branches, lo, hi)};
}

Outcome potential_derivatives()
{
  const Nonlinearity nl = make_nonlinearity(Exponents::make(2, 0.5, 2.5, 4.0));
  const Grid g(2, 16.0, 64);
  Rng rng(derive_seed(8, 0));
  const double eps = 1e-4;
  double e1 = 0.0, e2 = 0.0;
  for (int i = 0; i < 20; ++i) {
    const GridField u = random_bump_field(g, rng, 3, uniform(rng, 0.3, 3.0));
    const GridField v = random_bump_field(g, rng, 2, 1.0);
    const GridField w = random_bump_field(g, rng, 2, 1.0);
    const auto d = potential_and_derivatives(u, v, w, nl);
    // fourth-order centered stencil
    auto centered = [&](const GridField& dir, auto pick) {
      auto at = [&](double t) { return pick(potential_and_derivatives(lincomb(1, u, t, dir), v, w, nl)); };
      return (-at(2 * eps) + 8 * at(eps) - 8 * at(-eps) + at(-2 * eps)) / (12 * eps);
    };
    e1 = std::max(e1, rel_diff(centered(v, [](const auto& r) { return r.value; }), d.first));
    e2 = std::max(e2, rel_diff(centered(w, [](const auto& r) { return r.first; }), d.second));
  }
  return {e1 <= 1e-5 && e2 <= 1e-5, fmt("first %.3g second %.3g max relative error over 20 triples", e1, e2)};
}

Outcome nehari_suite()
{
  const Exponents exps = Exponents::make(2, 0.5, 2.5, 4.0);
  const Model pos = Model::make(exps, SignMode::positive_part);
  const Model odd = Model::make(exps, SignMode::odd);
  const Grid g(2, 8.0, 32);
  Rng rng(derive_seed(9, 0));
  std::string detail;
  bool ok = true;

  int ray_bad = 0, tangency_bad = 0, bound_bad = 0;
  for (int i = 0; i < 50; ++i) {
    const GridField u = random_bump_field(g, rng, 1 + i % 3, uniform(rng, 0.1, 10.0), true);
    const NehariScale ns = nehari_scale(pos, u);
    const RayScan scan = ray_scan(pos, u, 4.0 * ns.t_star, 400);
    const RayScan at = ray_scan(pos, u, ns.t_star, 2);
    ray_bad += !(scan.sign_changes() == 1 && at.d2h.back() < 0.0);
    const GridField w = scale(ns.t_star, u);
    tangency_bad += !(manifold_tangency(pos, w) < 0.0);
    // the sampled range covers every value of w, since g'(t)t/g(t) falls toward p as t grows
    const double mu = check_hypotheses(pos.nl, 1e-3, std::max(1e3, 2.0 * w.max_abs()), 100000).mu_hat;
    bound_bad += !(energy(pos, w) >= (0.5 - 1.0 / mu) * seminorm_sq_fourier(w, pos.fp));
  }
  ok = ok && ray_bad == 0 && tangency_bad == 0 && bound_bad == 0;
  detail += fmt("ray %d/50 bad, tangency %d/50 bad, energy bound %d/50 bad; ", ray_bad, tangency_bad, bound_bad);

  const Grid t(2, 2.0 * M_PI, 64);
  // g is even in odd mode, so g(0.1cos) = g(0.1|cos|); the closed form uses the smooth field's seminorm
  const GridField c = GridField::from_function(t, [](auto x) { return 0.1 * std::cos(x[0]); });
  const double ts = nehari_scale(odd, c).t_star;
  const double closed = std::sqrt(100.0 / 3.0);
  ok = ok && std::abs(ts - closed) <= 1e-8 * closed;
  detail += fmt("t_star %.12f vs %.12f; ", ts, closed);

  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const GridField u = random_bump_field(g, rng, 2, uniform(rng, 0.2, 3.0), true);
    const GridField v = random_bump_field(g, rng, 2, 0.3);
    const double eps = 1e-5;
    const double fd = (nehari_scale(pos, lincomb(1.0, u, eps, v)).t_star - nehari_scale(pos, lincomb(1.0, u, -eps, v)).t_star) /
                      (2 * eps);
    worst = std::max(worst, rel_diff(nehari_scale_derivative(pos, u, v), fd));
  }
  ok = ok && worst <= 1e-4;
  detail += fmt("derivative max relative error %.3g; ", worst);

  const double gap = manifold_gap_probe(pos, g, 9, 50);
  ok = ok && gap > 0.0;
  detail += fmt("gap probe %.6g", gap);
  return {ok, detail};
}

Outcome ground_state()
{
  const SolverConfig cfg = default_config();
  const SolutionReport r = solve_or_partial(cfg);
  bool trace_ok = true;
  for (std::size_t k = 1; k < r.energy_trace.size(); ++k)
    trace_ok = trace_ok && r.energy_trace[k] <= r.energy_trace[k - 1];

  SolverConfig fine = cfg;
  fine.grid = Grid(2, cfg.grid.length(), 2 * cfg.grid.points_per_dim());
  const SolutionReport rf = solve_or_partial(fine);

  std::vector<double> m;
  for (int i = 0; i < 3; ++i) {
    SolverConfig c = cfg;
    c.seed = cfg.seed + static_cast<std::uint64_t>(i);
    c.init_width = cfg.init_width * (1.0 + 0.25 * i);
    m.push_back(solve_or_partial(c).m_estimate);
  }
  const auto [lo, hi] = std::minmax_element(m.begin(), m.end());
  const double spread = (*hi - *lo) / *hi;

  const auto t0 = std::chrono::steady_clock::now();
  const SolutionReport r3 = solve_or_partial(read_config(FRGS_CONFIG_DIR "/smoke3d.json"));
  const double t3 = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const bool ok = r.converged && r.pde_residual <= 1e-3 && r.pohozaev_defect <= 1e-2 &&
                  rf.pohozaev_defect < r.pohozaev_defect && std::abs(r.lambda_estimate) <= 1e-3 && r.min_value >= 0.0 &&
                  r.monotone && r.decay_margin <= 1e-8 && r.decay_margin_l2 <= 1e-8 && trace_ok && spread <= 1e-3 &&
                  r3.pde_residual <= 5e-3 && t3 < 600.0;
  return {ok, fmt("n=128 converged %s after %d iterations, pde_residual %.4g, pohozaev %.4g (n=256: %.4g), lambda %.3g, "
                  "min %.3g, monotone %s, decay margins %.3g/%.3g, trace non-increasing %s, restart spread %.3g; "
                  "3D n=64 pde_residual %.4g in %.0f s",
                  r.converged ? "yes" : "no", r.iterations, r.pde_residual, r.pohozaev_defect, rf.pohozaev_defect,
                  r.lambda_estimate, r.min_value, r.monotone ? "yes" : "no", r.decay_margin_l2, r.decay_margin,
                  trace_ok ? "yes" : "no", spread, r3.pde_residual, t3)};
}

Outcome determinism()
{
  std::ostringstream a, b;
  run_propsuite(42, a);
  run_propsuite(42, b);
  const SolverConfig cfg = default_config();
  const std::string s1 = solve_artifacts(cfg);
  const std::string s2 = solve_artifacts(cfg);
  const bool props_same = a.str() == b.str();
  const bool solve_same = s1 == s2;
  return {props_same && solve_same && !s1.empty(), fmt("propsuite transcripts identical %s, solve outputs identical %s (%zu bytes)",
                                                      props_same ? "yes" : "no", solve_same ? "yes" : "no", s1.size())};
}

} // namespace

int main()
{
  const std::vector<Criterion> criteria{
    {1, "hypothesis_suite", 5, hypothesis_suite},
    {2, "c2_matching", 1, c2_matching},
    {3, "operator_identities", 10, operator_identities},
    {4, "seminorm_cross_validation", 60, seminorm_cross_validation},
    {5, "polya_szego", 30, polya_szego},
    {6, "truncation", 10, truncation},
    {7, "orlicz_sandwich", 60, orlicz_sandwich},
    {8, "potential_derivatives", 10, potential_derivatives},
    {9, "nehari_suite", 60, nehari_suite},
    {10, "ground_state_solve", 900, ground_state},
    {11, "determinism", 600, determinism},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = out.pass && in_time;
    failures += !pass;
    std::cout << (pass ? "PASS " : "FAIL ") << c.id << ' ' << c.name << ": " << out.detail
              << fmt(" [%.2f s of %.0f s budget%s]", secs, c.budget_s, in_time ? "" : ", over budget") << std::endl;
  }
  std::cout << (criteria.size() - failures) << " of " << criteria.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
