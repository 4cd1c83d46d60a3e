#include "msol/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "msol/error.hpp"
#include "msol/geometry.hpp"

namespace msol {

namespace {

constexpr double kP = 7.0 / 3.0;

/// sign(1+u)|1+u|^p - 1 - p u, accurate for small u.
double binomial_tail(double u, double p, bool odd) {
  if (std::abs(u) < 1e-2) {
    // sum_{j>=2} binom(p, j) u^j
    double term = p * u, s = 0.0;
    for (int j = 2; j < 12; ++j) {
      term *= (p - j + 1) * u / j;
      s += term;
    }
    return s;
  }
  const double base = 1.0 + u;
  double v;
  if (base > 0.0)
    v = std::expm1(p * std::log1p(u));
  else
    v = (odd ? -1.0 : 1.0) * std::pow(-base, p) - 1.0;
  return v - p * u;
}

double sgn(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

}  // namespace

InteractionField::InteractionField(const SolitonFamily& family,
                                   const InteractionConstants& constants, bool zero_coefficients)
    : family_(family), frames_(asymptotic_frames(family)) {
  const std::size_t K = family.size();
  c_.assign(K, 0.0);
  far_.assign(K, 0.0);
  if (!zero_coefficients) {
    for (std::size_t k = 0; k < K; ++k) {
      c_[k] = constants.c[k];
      far_[k] = constants.c[k] / kP;
    }
  }
}

double InteractionField::q(double t, const Vec5& x) const {
  double s = 0.0;
  for (std::size_t k = 0; k < family_.size(); ++k)
    s += 1.0 / std::sqrt(1.0 + norm2(x - family_.center(k, t)));
  return s;
}

double InteractionField::remainder_naive(double t, const Vec5& x) const {
  const double t3 = 1.0 / (t * t * t);
  double sum = 0.0, rest = 0.0;
  for (std::size_t k = 0; k < frames_.size(); ++k) {
    const double w = frames_[k].value(t, x);
    sum += w;
    rest += nonlinearity(w).f + t3 * c_[k] * std::pow(std::abs(w), 4.0 / 3.0);
  }
  return nonlinearity(sum).f - rest;
}

double InteractionField::remainder(double t, const Vec5& x) const {
  const std::size_t K = frames_.size();
  const double t3 = 1.0 / (t * t * t);
  std::vector<double> w(K);
  std::size_t k = 0;
  for (std::size_t j = 0; j < K; ++j) {
    w[j] = frames_[j].value(t, x);
    if (std::abs(w[j]) > std::abs(w[k])) k = j;
  }
  if (w[k] == 0.0) return 0.0;
  double delta = 0.0, others = 0.0;
  for (std::size_t m = 0; m < K; ++m) {
    if (m == k) continue;
    delta += w[m];
    others += nonlinearity(w[m]).f + t3 * c_[m] * std::pow(std::abs(w[m]), 4.0 / 3.0);
  }
  // f(w+d) - f(w) = (7/3)|w|^{4/3} d + f(w) tail(d/w)
  const double wk43 = std::pow(std::abs(w[k]), 4.0 / 3.0);
  const double fw = nonlinearity(w[k]).f;
  return fw * binomial_tail(delta / w[k], kP, true) + kP * wk43 * (delta - t3 * far_[k]) -
         others;
}

Vec5 InteractionField::remainder_grad(double t, const Vec5& x) const {
  const std::size_t K = frames_.size();
  const double t3 = 1.0 / (t * t * t);
  std::vector<double> w(K);
  std::vector<Vec5> g(K);
  std::size_t k = 0;
  for (std::size_t j = 0; j < K; ++j) {
    w[j] = frames_[j].value(t, x);
    g[j] = frames_[j].grad(t, x);
    if (std::abs(w[j]) > std::abs(w[k])) k = j;
  }
  if (w[k] == 0.0) return {};
  double delta = 0.0;
  Vec5 gdelta, others;
  for (std::size_t m = 0; m < K; ++m) {
    if (m == k) continue;
    delta += w[m];
    gdelta += g[m];
    const double a = std::abs(w[m]);
    others += g[m] * (nonlinearity(w[m]).df +
                      t3 * c_[m] * (4.0 / 3.0) * std::cbrt(a) * sgn(w[m]));
  }
  const double wk = w[k], a = std::abs(wk);
  const double wk43 = std::pow(a, 4.0 / 3.0);
  const double f2 = kP * (4.0 / 3.0) * std::cbrt(a) * sgn(wk);
  // f'(w+d) - f'(w) - f''(w) d = (7/3)|w|^{4/3} tail_{4/3}(d/w)
  const double bracket = kP * wk43 * binomial_tail(delta / wk, 4.0 / 3.0, false);
  const double df_sum = nonlinearity(wk + delta).df;
  return g[k] * (bracket + f2 * (delta - t3 * far_[k])) + gdelta * df_sum - others;
}

double interaction_remainder(const SolitonFamily& family, const InteractionConstants& constants,
                             double t, const Vec5& x) {
  return InteractionField(family, constants).remainder(t, x);
}

ExponentFit fit_remainder_exponent(const SolitonFamily& family,
                                   const InteractionConstants& constants,
                                   const std::vector<double>& t_grid, std::size_t per_region,
                                   std::uint64_t seed, RemainderNorm which,
                                   bool zero_coefficients) {
  const InteractionField field(family, constants, zero_coefficients);
  std::vector<double> sups;
  for (double t : t_grid) {
    auto pts = geometry_sample_points(family, t, per_region, seed);
    for (std::size_t k = 0; k < family.size(); ++k) pts.push_back(family.center(k, t));
    const double s = parallel_max(pts.size(), [&](std::size_t i) {
      const Vec5& x = pts[i];
      const double q = field.q(t, x);
      if (which == RemainderNorm::value) return std::abs(field.remainder(t, x)) / (q * q * q);
      return norm(field.remainder_grad(t, x)) / (q * q * q * q);
    });
    if (!(s > 0.0) || !std::isfinite(s))
      fail(ErrorKind::numerical, "degenerate-fit",
           "sup of the remainder is zero or not finite at t = " + std::to_string(t));
    sups.push_back(s);
  }
  return fit_loglog(t_grid, sups);
}

namespace {

nlohmann::ordered_json fit_json(const ExponentFit& f) {
  nlohmann::ordered_json j;
  j["t"] = f.x;
  j["sup"] = f.y;
  j["slope"] = f.slope;
  j["intercept"] = f.intercept;
  j["r_squared"] = f.r_squared;
  return j;
}

}  // namespace

VerificationReport verify_interaction(const SolitonFamily& family,
                                      const InteractionConstants& constants,
                                      const std::vector<double>& t_grid, std::size_t per_region,
                                      std::uint64_t seed) {
  VerificationReport r;
  r.suite = "interaction";
  const auto v = fit_remainder_exponent(family, constants, t_grid, per_region, seed);
  const auto g = fit_remainder_exponent(family, constants, t_grid, per_region, seed,
                                        RemainderNorm::gradient);
  const auto z = fit_remainder_exponent(family, constants, t_grid, per_region, seed,
                                        RemainderNorm::value, true);
  r.add_abs("remainder-slope", v.slope, -4.0, 0.3, "sup |R|/q^3");
  r.add_abs("gradient-slope", g.slope, -4.0, 0.3, "sup |grad R|/q^4");
  r.add_abs("control-slope", z.slope, -3.0, 0.2, "c_k forced to 0");
  r.data["remainder"] = fit_json(v);
  r.data["gradient"] = fit_json(g);
  r.data["control"] = fit_json(z);
  r.data["c"] = constants.c;
  r.flags.push_back("parameters frozen at their asymptotic values");
  return r;
}

double far_field_deviation(const SolitonFamily& family, std::size_t k, std::size_t m, double t) {
  if (k == m || k >= family.size() || m >= family.size())
    fail(ErrorKind::precondition, "bad-pair", "need distinct soliton indices");
  const auto& sm = family.solitons[m];
  const SolitonFrame frame(sm);
  const double limit = kFarFieldConstant * sm.sign * std::pow(sm.scale, 1.5) *
                       std::pow(norm(sigma_pair(family.solitons[k].speed, sm.speed)), -3.0);
  return t * t * t * frame.value(t, family.center(k, t)) / limit - 1.0;
}

VerificationReport far_field_check(const SolitonFamily& family, std::size_t k, std::size_t m,
                                   const std::vector<double>& t_grid, double tolerance_at_100) {
  VerificationReport r;
  r.suite = "far-field";
  std::vector<double> dev;
  for (double t : t_grid) {
    dev.push_back(std::abs(far_field_deviation(family, k, m, t)));
    if (t == 100.0) r.add_le("deviation.t=100", dev.back(), tolerance_at_100);
  }
  const auto fit = fit_loglog(t_grid, dev);
  r.add_abs("decay-slope", fit.slope, -2.0, 0.3);
  r.data["k"] = k;
  r.data["m"] = m;
  r.data["fit"] = fit_json(fit);
  bool centred = true;
  for (const auto& s : family.solitons) centred = centred && norm(s.center) == 0.0;
  if (!centred) r.flags.push_back("nonzero asymptotic centres add an O(1/t) relative term");
  return r;
}

}  // namespace msol
