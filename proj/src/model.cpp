#include "msol/model.hpp"

#include <algorithm>
#include <cmath>

#include "msol/error.hpp"
#include "msol/fields.hpp"

namespace msol {

SolitonFamily validate_config(SolitonFamily family) {
  if (family.solitons.empty())
    fail(ErrorKind::config, "empty-family", "at least one soliton is required");
  for (std::size_t k = 0; k < family.size(); ++k) {
    const auto& s = family.solitons[k];
    const std::string where = "solitons[" + std::to_string(k) + "]";
    if (!all_finite(s.speed) || !all_finite(s.center) || !std::isfinite(s.scale))
      fail(ErrorKind::config, "non-finite", where + " has a non-finite entry");
    if (!(norm(s.speed) < 1.0))
      fail(ErrorKind::config, "speed-out-of-range",
           where + ".speed has |l| = " + std::to_string(norm(s.speed)) + " >= 1");
    if (!(s.scale > 0.0))
      fail(ErrorKind::config, "nonpositive-scale", where + ".scale must be > 0");
    if (s.sign != 1 && s.sign != -1)
      fail(ErrorKind::config, "bad-sign", where + ".sign must be +1 or -1");
    for (std::size_t m = 0; m < k; ++m)
      if (family.solitons[m].speed == s.speed)
        fail(ErrorKind::config, "duplicate-speeds",
             "solitons[" + std::to_string(m) + "] and " + where + " share a speed");
  }
  if (!(family.alpha > 0.0 && family.alpha < 1.0))
    fail(ErrorKind::config, "bad-alpha", "alpha must lie in (0, 1)");
  if (std::isnan(family.delta)) family.delta = family.alpha / 4.0;
  if (!(family.delta > 0.0))
    fail(ErrorKind::config, "bad-delta", "delta must be positive");
  family.sigma_geo = separation_sigma(family);
  family.cone_speed = 1.0 - family.sigma_geo;
  return family;
}

double separation_sigma(const SolitonFamily& family) {
  double lbar = 0.0;
  for (const auto& s : family.solitons) lbar = std::max(lbar, norm(s.speed));
  double m = 1.0 - lbar;
  for (std::size_t k = 0; k < family.size(); ++k)
    for (std::size_t j = k + 1; j < family.size(); ++j)
      m = std::min(m, norm(family.solitons[k].speed - family.solitons[j].speed));
  return m / 100.0;
}

Vec5 sigma_pair(const Vec5& lk, const Vec5& lm) {
  const Vec5 d = lk - lm;
  return d + boost_coeff(lm) * dot(lm, d) * lm;
}

std::vector<double> interaction_coeff(const SolitonFamily& family,
                                      const std::vector<std::vector<Vec5>>& sigma) {
  const std::size_t K = family.size();
  std::vector<double> c(K, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    CompensatedSum s;
    for (std::size_t m = 0; m < K; ++m) {
      if (m == k) continue;
      const auto& sm = family.solitons[m];
      s.add(sm.sign * std::pow(sm.scale, 1.5) * std::pow(norm(sigma[k][m]), -3.0));
    }
    c[k] = (7.0 / 3.0) * kFarFieldConstant * s.value();
  }
  return c;
}

QuadResult kappa0(double rel_tol) {
  RadialQuadOptions o;
  o.rel_tol = rel_tol;
  auto lw = [](double r) {
    const double s = 1.0 + r * r / 15.0;
    return std::pow(s, -2.5) * (1.5 - r * r / 10.0);
  };
  const auto num = radial_quad(
      [&](double r) { return std::pow(1.0 + r * r / 15.0, -2.0) * lw(r) * std::pow(r, 4); },
      0.0, INFINITY, o);
  const auto den =
      radial_quad([&](double r) { return lw(r) * lw(r) * std::pow(r, 4); }, 0.0, INFINITY, o);
  const double k0 = -num.value / den.value;
  const double err =
      std::abs(k0) * (num.error_estimate / std::abs(num.value) + den.error_estimate / den.value);
  return {k0, err, num.evaluations + den.evaluations};
}

double kappa(const Vec5& l) {
  static const double k0 = kappa0().value;
  return (1.0 - norm2(l)) * k0;
}

PsiResult psi(const SolitonFamily& family, double rel_threshold) {
  PsiResult r;
  CompensatedSum total;
  for (std::size_t k = 0; k < family.size(); ++k) {
    const auto& sk = family.solitons[k];
    const double pre = std::pow(1.0 - norm2(sk.speed), 1.5) * sk.scale;
    for (std::size_t m = 0; m < family.size(); ++m) {
      if (m == k) continue;
      const auto& sm = family.solitons[m];
      const double term = pre * sm.sign * std::pow(sm.scale, 1.5) *
                          std::pow(norm(sigma_pair(sk.speed, sm.speed)), -3.0);
      total.add(term);
      r.max_summand = std::max(r.max_summand, std::abs(term));
    }
  }
  r.value = total.value();
  r.threshold = rel_threshold * r.max_summand;
  r.nonvanishing = r.max_summand > 0.0 && std::abs(r.value) > r.threshold;
  return r;
}

InteractionConstants compute_constants(const SolitonFamily& family) {
  InteractionConstants ic;
  const std::size_t K = family.size();
  ic.sigma_pairs.assign(K, std::vector<Vec5>(K));
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t m = 0; m < K; ++m)
      if (m != k)
        ic.sigma_pairs[k][m] =
            sigma_pair(family.solitons[k].speed, family.solitons[m].speed);
  ic.c = interaction_coeff(family, ic.sigma_pairs);
  ic.kappa0 = kappa0();
  for (std::size_t k = 0; k < K; ++k) {
    const double kap = (1.0 - norm2(family.solitons[k].speed)) * ic.kappa0.value;
    ic.kappa.push_back(kap);
    ic.a.push_back(-ic.c[k] * family.solitons[k].sign * kap / 2.0);
  }
  ic.psi = psi(family);
  return ic;
}

}  // namespace msol
