#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "frgs/error.hpp"

namespace frgs {

/// Dimension, fractional order and the two growth exponents of g.
///
/// `two_star` is the fractional Sobolev exponent 2N/(N-2s). The exponents
/// must satisfy 2 < p < two_star <= q; the borderline q == two_star is
/// accepted and flagged by critical_at_zero().
struct Exponents
{
  int dim = 2;
  double s = 0.5;
  double p = 2.5;
  double q = 4.0;
  double two_star = 4.0;

  static double sobolev_exponent(int dim, double s) { return 2.0 * dim / (dim - 2.0 * s); }

  static Exponents make(int dim, double s, double p, double q)
  {
    if (!std::isfinite(s) || !std::isfinite(p) || !std::isfinite(q))
      throw domain_error("exponents: non-finite input");
    if (dim < 2)
      throw domain_error("exponents: dimension N must be >= 2");
    if (!(s > 0.0 && s < 1.0))
      throw domain_error("exponents: s must lie in (0,1)");
    if (!(dim > 2.0 * s))
      throw domain_error("exponents: need N > 2s");
    const double ts = sobolev_exponent(dim, s);
    if (p >= q)
      throw domain_error("exponents: need p < q");
    if (p <= 2.0)
      throw domain_error("exponents: need p > 2");
    if (p >= ts)
      throw domain_error("exponents: need p < 2N/(N-2s)");
    if (q < ts * (1.0 - 1e-12))
      throw domain_error("exponents: need q >= 2N/(N-2s)");
    return Exponents{dim, s, p, q, ts};
  }

  bool critical_at_zero() const { return std::abs(q - two_star) <= 1e-12 * two_star; }
};

/// How g is continued to t <= 0.
enum class SignMode
{
  odd,          ///< g(-t) = g(t), so g' is odd
  positive_part ///< g(t) = 0 for t <= 0 (positive solutions)
};

inline const char* to_string(SignMode mode)
{
  return mode == SignMode::odd ? "odd" : "positive_part";
}

/// The model nonlinearity
///
///     g(t) = |t|^q                  for |t| <= 1
///     g(t) = a + b|t| + c|t|^p      for |t| >= 1
///
/// with (a, b, c) fixed by C^2 matching at |t| = 1. The boundary |t| = 1 is
/// evaluated on the power branch.
class Nonlinearity
{
public:
  static Nonlinearity make(const Exponents& exps, SignMode mode = SignMode::odd)
  {
    const double p = exps.p;
    const double q = exps.q;
    if (!std::isfinite(p) || !std::isfinite(q))
      throw domain_error("nonlinearity: non-finite exponent");
    if (p >= q || p <= 2.0 || q < exps.two_star * (1.0 - 1e-12))
      throw domain_error("nonlinearity: exponents violate 2 < p < 2*_s <= q");
    Nonlinearity nl;
    nl.exps_ = exps;
    nl.mode_ = mode;
    nl.c_ = q * (q - 1.0) / (p * (p - 1.0));
    nl.b_ = q - p * nl.c_;
    nl.a_ = 1.0 - nl.b_ - nl.c_;
    return nl;
  }

  const Exponents& exponents() const { return exps_; }
  SignMode sign_mode() const { return mode_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double p() const { return exps_.p; }
  double q() const { return exps_.q; }

  Nonlinearity with_sign_mode(SignMode mode) const
  {
    Nonlinearity copy = *this;
    copy.mode_ = mode;
    return copy;
  }

  double g(double t) const
  {
    if (t <= 0.0 && (mode_ == SignMode::positive_part || t == 0.0))
      return 0.0;
    return magnitude_g(std::abs(t));
  }

  double g_prime(double t) const
  {
    if (t <= 0.0 && (mode_ == SignMode::positive_part || t == 0.0))
      return 0.0;
    const double v = magnitude_g_prime(std::abs(t));
    return t < 0.0 ? -v : v;
  }

  double g_second(double t) const
  {
    if (t <= 0.0 && (mode_ == SignMode::positive_part || t == 0.0))
      return 0.0;
    return magnitude_g_second(std::abs(t));
  }

  // Branch formulas on m = |t| >= 0, without the sign convention.
  double magnitude_g(double m) const
  {
    return m <= 1.0 ? std::pow(m, exps_.q) : a_ + b_ * m + c_ * std::pow(m, exps_.p);
  }
  double magnitude_g_prime(double m) const
  {
    return m <= 1.0 ? exps_.q * std::pow(m, exps_.q - 1.0)
                    : b_ + exps_.p * c_ * std::pow(m, exps_.p - 1.0);
  }
  double magnitude_g_second(double m) const
  {
    return m <= 1.0 ? exps_.q * (exps_.q - 1.0) * std::pow(m, exps_.q - 2.0)
                    : exps_.p * (exps_.p - 1.0) * c_ * std::pow(m, exps_.p - 2.0);
  }

private:
  Exponents exps_{};
  SignMode mode_ = SignMode::odd;
  double a_ = 0.0;
  double b_ = 0.0;
  double c_ = 0.0;
};

inline Nonlinearity make_nonlinearity(const Exponents& exps, SignMode mode = SignMode::odd)
{
  return Nonlinearity::make(exps, mode);
}

/// Largest relative disagreement between the one-sided limits at t = 1 of
/// g, g', g'' (second-order extrapolation from each side) and of the
/// one-sided difference quotients of g and g'.
inline double c2_matching_defect(const Nonlinearity& nl, double delta = 1e-5)
{
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); };
  auto limit = [&](auto f, double dir) { return 2.0 * f(1.0 + dir * delta) - f(1.0 + 2.0 * dir * delta); };
  auto slope = [&](auto f, double dir) {
    return dir * (-3.0 * f(1.0) + 4.0 * f(1.0 + dir * delta) - f(1.0 + 2.0 * dir * delta)) / (2.0 * delta);
  };
  const auto g0 = [&](double t) { return nl.g(t); };
  const auto g1 = [&](double t) { return nl.g_prime(t); };
  const auto g2 = [&](double t) { return nl.g_second(t); };
  double worst = 0.0;
  worst = std::max(worst, rel(limit(g0, -1.0), limit(g0, 1.0)));
  worst = std::max(worst, rel(limit(g1, -1.0), limit(g1, 1.0)));
  worst = std::max(worst, rel(limit(g2, -1.0), limit(g2, 1.0)));
  worst = std::max(worst, rel(slope(g0, -1.0), slope(g0, 1.0)));
  worst = std::max(worst, rel(slope(g1, -1.0), slope(g1, 1.0)));
  return worst;
}

/// Empirical constants of the growth hypotheses, from dense sampling.
struct HypothesisReport
{
  double mu_hat = 0.0;     ///< inf g'(t)t / g(t)
  double ratio2_min = 0.0; ///< inf g''(t)t^2 / (g'(t)t)
  double c0_hat = 0.0;     ///< largest c0 with c0|t|^{p or q} <= g(t)
  double c1_hat = 0.0;     ///< smallest c1 with |g'(t)| <= c1|t|^{p-1 or q-1}
  double c2_hat = 0.0;     ///< smallest c2 with |g''(t)| <= c2|t|^{p-2 or q-2}
  double c3_hat = 0.0;     ///< smallest c3 with g(t) <= c3|t|^{p or q}
  double t_min = 0.0;
  double t_max = 0.0;
  std::size_t sample_count = 0;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

/// Samples |t| on a log grid over [t_min, t_max] (both signs, odd extension)
/// and records the tightest growth constants.
inline HypothesisReport
check_hypotheses(const Nonlinearity& nonlinearity, double t_min, double t_max, std::size_t samples)
{
  if (!(t_min > 0.0 && t_min < 1.0 && t_max > 1.0) || !std::isfinite(t_max))
    throw domain_error("check_hypotheses: need 0 < t_min < 1 < t_max");
  if (samples < 1000)
    throw domain_error("check_hypotheses: need at least 1000 samples");

  const Nonlinearity nl = nonlinearity.with_sign_mode(SignMode::odd);
  const double p = nl.p();
  const double q = nl.q();
  constexpr double inf = std::numeric_limits<double>::infinity();

  HypothesisReport r;
  r.t_min = t_min;
  r.t_max = t_max;
  r.sample_count = samples;
  r.mu_hat = inf;
  r.ratio2_min = inf;
  r.c0_hat = inf;

  bool positive = true;
  bool finite = true;
  bool convex = true;
  const double log_span = std::log(t_max / t_min);
  for (std::size_t i = 0; i < samples; ++i) {
    const double m = t_min * std::exp(log_span * static_cast<double>(i) / static_cast<double>(samples - 1));
    for (double t : {m, -m}) {
      const double g = nl.g(t);
      const double g1 = nl.g_prime(t);
      const double g2 = nl.g_second(t);
      const double gt = g1 * t;
      if (!(g > 0.0))
        positive = false;
      if (!(g2 > 0.0))
        convex = false;
      const double ratio1 = gt / g;
      const double ratio2 = g2 * t * t / gt;
      if (!std::isfinite(ratio1) || !std::isfinite(ratio2)) {
        finite = false;
        continue;
      }
      r.mu_hat = std::min(r.mu_hat, ratio1);
      r.ratio2_min = std::min(r.ratio2_min, ratio2);

      const double e = m >= 1.0 ? p : q;
      const double pw = std::pow(m, e);
      r.c0_hat = std::min(r.c0_hat, g / pw);
      r.c3_hat = std::max(r.c3_hat, g / pw);
      r.c1_hat = std::max(r.c1_hat, std::abs(g1) / std::pow(m, e - 1.0));
      r.c2_hat = std::max(r.c2_hat, std::abs(g2) / std::pow(m, e - 2.0));
    }
  }

  if (nl.g(0.0) != 0.0 || nl.g_prime(0.0) != 0.0 || nl.g_second(0.0) != 0.0)
    r.violations.emplace_back("g(0), g'(0), g''(0) must vanish");
  if (!finite)
    r.violations.emplace_back("non-finite growth ratio");
  if (!positive)
    r.violations.emplace_back("g(t) <= 0 at some t != 0");
  if (!(r.mu_hat > 2.0))
    r.violations.emplace_back("mu_hat <= 2");
  if (!(r.ratio2_min >= 1.0))
    r.violations.emplace_back("g'(t)t > g''(t)t^2 at some t");
  if (!(r.c0_hat > 0.0) || !std::isfinite(r.c0_hat))
    r.violations.emplace_back("lower growth constant c0 not positive");
  if (!std::isfinite(r.c2_hat) || !std::isfinite(r.c1_hat) || !std::isfinite(r.c3_hat))
    r.violations.emplace_back("upper growth constants not finite");
  if (!convex)
    r.violations.emplace_back("g''(t) <= 0 at some t != 0");
  return r;
}

} // namespace frgs
