#include <gtest/gtest.h>

#include <cmath>

#include "frgs/nehari.hpp"
#include "frgs/random_fields.hpp"

using namespace frgs;

namespace {

const Exponents exps = Exponents::make(2, 0.5, 2.5, 4.0);
const double two_pi = 2.0 * M_PI;

// flips u when it has no positive values, so positive_part rays exist
GridField with_positive_part(const GridField& u)
{
  return u.max() > 0.0 ? u : scale(-1.0, u);
}

GridField cosine_field(const Grid& g, double amp)
{
  return GridField::from_function(g, [amp](auto x) { return amp * std::cos(x[0]); });
}

// Pure-power ray maximizer ([u]^2 / (q ||u||_q^q))^{1/(q-2)}.
double closed_form_scale(const Model& m, const GridField& u)
{
  const double q = m.nl.q();
  const double S = seminorm_sq_fourier(u, m.fp);
  const double Q = integrate_map(u, [q](double x) { return std::pow(std::abs(x), q); });
  return std::pow(S / (q * Q), 1.0 / (q - 2.0));
}

} // namespace

TEST(NehariResidual, Examples)
{
  const Model m = Model::make(exps, SignMode::odd);
  const Grid g(2, two_pi, 32);
  EXPECT_EQ(nehari_residual(m, GridField::zeros(g)), 0.0);
  const GridField w = cosine_field(g, 0.3);
  const double S = seminorm_sq_fourier(w, m.fp);
  const double Q = integrate_map(w, [](double x) { return std::pow(std::abs(x), 4.0); });
  EXPECT_NEAR(nehari_residual(m, w), S - 4.0 * Q, 1e-14);
}

TEST(NehariScale, ClosedFormSubunitField)
{
  const Model m = Model::make(exps, SignMode::odd);
  const Grid g(2, two_pi, 32);
  const GridField u = cosine_field(g, 0.1);
  const NehariScale ns = nehari_scale(m, u);
  EXPECT_NEAR(ns.t_star, std::sqrt(100.0 / 3.0), 1e-8);
  EXPECT_NEAR(ns.t_star, closed_form_scale(m, u), 1e-10);
  EXPECT_LE(ns.t_star * u.max_abs(), 1.0);
  EXPECT_LE(ns.residual, 1e-10);
  const GridField on = scale(ns.t_star, u);
  EXPECT_LE(std::abs(nehari_residual(m, on)), 1e-10 * seminorm_sq_fourier(on, m.fp));
  EXPECT_NEAR(nehari_scale(m, on).t_star, 1.0, 1e-10);
}

TEST(NehariScale, ScalingLaw)
{
  const Model m = Model::make(exps, SignMode::odd);
  const Grid g(2, two_pi, 32);
  const GridField u = cosine_field(g, 0.05);
  const double t1 = nehari_scale(m, u).t_star;
  const double t2 = nehari_scale(m, scale(2.0, u)).t_star;
  EXPECT_NEAR(t2, closed_form_scale(m, scale(2.0, u)), 1e-10);
  EXPECT_NEAR(t2, t1 / 2.0, 1e-10);
}

TEST(NehariScale, Errors)
{
  const Model pos = Model::make(exps, SignMode::positive_part);
  const Model odd = Model::make(exps, SignMode::odd);
  const Grid g(2, two_pi, 16);
  EXPECT_THROW(nehari_scale(odd, GridField::zeros(g)), domain_error);
  EXPECT_THROW(nehari_scale(pos, GridField::constant(g, -1.0)), domain_error);
  EXPECT_THROW(nehari_scale(odd, GridField::constant(g, 1.0)), domain_error);
}

TEST(RayScan, PurePowerRay)
{
  const Model m = Model::make(exps, SignMode::odd);
  const Grid g(2, two_pi, 32);
  const GridField u = cosine_field(g, 0.1);
  const double S = seminorm_sq_fourier(u, m.fp);
  const double Q = integrate_map(u, [](double x) { return std::pow(std::abs(x), 4.0); });
  const double ts = std::sqrt(100.0 / 3.0);
  const RayScan scan = ray_scan(m, u, 9.0, 90);
  for (std::size_t k = 0; k < scan.t.size(); ++k) {
    const double t = scan.t[k];
    EXPECT_NEAR(scan.h[k], 0.5 * t * t * S - std::pow(t, 4) * Q, 1e-12);
  }
  EXPECT_EQ(scan.sign_changes(), 1);
  const auto imax = std::max_element(scan.h.begin(), scan.h.end()) - scan.h.begin();
  EXPECT_NEAR(scan.t[imax], ts, 0.1);
  // near t = 0: h' = o(t) and h'' -> [u]^2 > 0
  const RayScan near0 = ray_scan(m, u, 1e-4, 2);
  EXPECT_NEAR(near0.d2h.back(), S, 1e-8 * S);
  EXPECT_NEAR(near0.h.back(), 0.0, 1e-8);
}

TEST(RayScan, UniqueSignChangeAndMonotonePsi)
{
  const Model m = Model::make(exps, SignMode::positive_part);
  const Grid g(2, 8.0, 32);
  Rng rng(30);
  for (int i = 0; i < 100; ++i) {
    const GridField u = with_positive_part(random_mixed_field(g, rng));
    const NehariScale ns = nehari_scale(m, u);
    const RayScan scan = ray_scan(m, u, 4.0 * ns.t_star, 200);
    ASSERT_EQ(scan.sign_changes(), 1);
    EXPECT_LT(scan.h.back(), 0.0);
    for (std::size_t k = 1; k < scan.psi.size(); ++k)
      ASSERT_GT(scan.psi[k], scan.psi[k - 1]);
    const RayScan at = ray_scan(m, u, ns.t_star, 2);
    EXPECT_LT(at.d2h.back(), 0.0);
  }
}

TEST(NehariScaleDerivative, AlongTheRay)
{
  const Model m = Model::make(exps, SignMode::odd);
  const Grid g(2, two_pi, 32);
  const GridField u = cosine_field(g, 0.1);
  const double t0 = nehari_scale(m, u).t_star;
  EXPECT_NEAR(nehari_scale_derivative(m, u, u), -t0, 1e-8 * t0);
  EXPECT_EQ(nehari_scale_derivative(m, u, GridField::zeros(g)), 0.0);
}

TEST(NehariScaleDerivative, FiniteDifferences)
{
  const Model m = Model::make(exps, SignMode::positive_part);
  const Grid g(2, 8.0, 32);
  Rng rng(31);
  const double eps = 1e-5;
  for (int i = 0; i < 20; ++i) {
    const GridField u = random_bump_field(g, rng, 2, uniform(rng, 0.3, 3.0), true);
    const GridField v = random_bump_field(g, rng, 2, 0.5);
    const double fd = (nehari_scale(m, lincomb(1, u, eps, v)).t_star - nehari_scale(m, lincomb(1, u, -eps, v)).t_star) /
                      (2 * eps);
    const double an = nehari_scale_derivative(m, u, v);
    EXPECT_NEAR(an, fd, 1e-4 * std::max(std::abs(fd), 1e-6));
  }
}

TEST(NehariManifold, TangencyAndEnergyBound)
{
  const Model m = Model::make(exps, SignMode::positive_part);
  // g'(t)t/g(t) keeps falling toward p for large t, so the sampled range
  // must cover every value the projected fields reach
  const double mu = check_hypotheses(m.nl, 1e-3, 1e9, 100000).mu_hat;
  const Grid g(2, 8.0, 32);
  Rng rng(32);
  for (int i = 0; i < 50; ++i) {
    const GridField u = nehari_project(m, with_positive_part(random_mixed_field(g, rng)));
    ASSERT_LT(u.max_abs(), 1e9);
    EXPECT_LT(manifold_tangency(m, u), 0.0);
    EXPECT_GE(energy(m, u), (0.5 - 1.0 / mu) * seminorm_sq_fourier(u, m.fp));
  }
}

TEST(ManifoldGapProbe, PositiveAndDeterministic)
{
  const Model m = Model::make(exps, SignMode::positive_part);
  const Grid g(2, 8.0, 32);
  const double a = manifold_gap_probe(m, g, 5, 12);
  EXPECT_GT(a, 0.0);
  EXPECT_EQ(a, manifold_gap_probe(m, g, 5, 12));
  EXPECT_THROW(manifold_gap_probe(m, g, 5, 3), domain_error);
}
