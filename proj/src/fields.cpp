#include "msol/fields.hpp"

#include <cmath>

#include "msol/error.hpp"

namespace msol {

double ground_state(const Vec5& x) { return std::pow(1.0 + norm2(x) / 15.0, -1.5); }

Vec5 ground_state_grad(const Vec5& x) {
  return x * (-0.2 * std::pow(1.0 + norm2(x) / 15.0, -2.5));
}

Mat5 ground_state_hessian(const Vec5& x) {
  const double s = 1.0 + norm2(x) / 15.0;
  const double a = -0.2 * std::pow(s, -2.5), b = std::pow(s, -3.5) / 15.0;
  Mat5 h;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) h(i, j) = b * x[i] * x[j] + (i == j ? a : 0.0);
  return h;
}

double lambda_w(const Vec5& x) {
  const double r2 = norm2(x);
  return std::pow(1.0 + r2 / 15.0, -2.5) * (1.5 - r2 / 10.0);
}

Vec5 lambda_w_grad(const Vec5& x) {
  const double r2 = norm2(x);
  return x * (-std::pow(1.0 + r2 / 15.0, -3.5) * (0.7 - r2 / 50.0));
}

double boost_coeff(const Vec5& l) {
  const double s = std::sqrt(1.0 - norm2(l));
  return 1.0 / (s * (1.0 + s));
}

Vec5 apply_boost(const Vec5& l, const Vec5& z) { return z + (boost_coeff(l) * dot(l, z)) * l; }

Mat5 boost_matrix(const Vec5& l) {
  const double c = boost_coeff(l);
  Mat5 b;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) b(i, j) = c * l[i] * l[j] + (i == j ? 1.0 : 0.0);
  return b;
}

Vec5 lorentz_coord(const Vec5& l, double t, const Vec5& x) { return apply_boost(l, x - t * l); }

double boosted_soliton(const Vec5& l, double t, const Vec5& x) {
  return ground_state(lorentz_coord(l, t, x));
}

Nonlinearity nonlinearity(double u) {
  const double a = std::abs(u);
  const double a43 = std::pow(a, 4.0 / 3.0);
  return {a43 * u, (7.0 / 3.0) * a43, 0.3 * a43 * a * a};
}

SolitonFrame::SolitonFrame(const SolitonParams& p) : SolitonFrame(p, p.scale, p.center) {}

SolitonFrame::SolitonFrame(const SolitonParams& p, double lambda, const Vec5& y)
    : p_(p), lambda_(lambda), y_(y), boost_(boost_matrix(p.speed)) {
  if (!(lambda > 0.0)) fail(ErrorKind::precondition, "nonpositive-scale", "frame scale <= 0");
  amp_ = p.sign * std::pow(lambda, -1.5);
}

Vec5 SolitonFrame::zeta(double t, const Vec5& x) const {
  return boost_ * ((x - p_.speed * t - y_) / lambda_);
}

double SolitonFrame::value(double t, const Vec5& x) const {
  return amp_ * ground_state(zeta(t, x));
}

Vec5 SolitonFrame::grad(double t, const Vec5& x) const {
  return boost_ * ground_state_grad(zeta(t, x)) * (amp_ / lambda_);
}

Mat5 SolitonFrame::hessian(double t, const Vec5& x) const {
  const Mat5 h = ground_state_hessian(zeta(t, x));
  Mat5 bh, out;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      double s = 0.0;
      for (int k = 0; k < 5; ++k) s += boost_(i, k) * h(k, j);
      bh(i, j) = s;
    }
  const double f = amp_ / (lambda_ * lambda_);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      double s = 0.0;
      for (int k = 0; k < 5; ++k) s += bh(i, k) * boost_(k, j);
      out(i, j) = f * s;
    }
  return out;
}

double SolitonFrame::lambda_value(double t, const Vec5& x) const {
  return amp_ * lambda_w(zeta(t, x));
}

Vec5 SolitonFrame::lambda_grad(double t, const Vec5& x) const {
  return boost_ * lambda_w_grad(zeta(t, x)) * (amp_ / lambda_);
}

double SolitonFrame::x_value(double t, const Vec5& x) const { return -dot(p_.speed, grad(t, x)); }

std::vector<SolitonFrame> asymptotic_frames(const SolitonFamily& family) {
  std::vector<SolitonFrame> out;
  for (const auto& s : family.solitons) out.emplace_back(s);
  return out;
}

double wave_linearization(const ScalarField& u, const Vec5& x, const Vec5& l, double w,
                          const FdOptions& fd) {
  return fd_laplacian(u, x, fd) - fd_directional_second(u, x, l, fd) +
         nonlinearity(w).df * u(x);
}

double apply_linearized(const ScalarField& u, const Vec5& x, const std::optional<Vec5>& boost,
                        const FdOptions& fd) {
  const Vec5 l = boost.value_or(Vec5{});
  return -wave_linearization(u, x, l, ground_state(apply_boost(l, x)), fd);
}

ModulationTerms modulation_vector(const SolitonFrame& frame, double a_k, double lambda_dot,
                                  const Vec5& y_dot, double t, const Vec5& x) {
  const double lam = frame.lambda();
  const double coeff = lambda_dot / lam - a_k / (std::sqrt(lam) * t * t);
  const Vec5& l = frame.params().speed;
  ModulationTerms m;
  m.mw = coeff * frame.lambda_value(t, x) + dot(y_dot, frame.grad(t, x));
  m.mx = -coeff * dot(l, frame.lambda_grad(t, x)) - dot(y_dot, frame.hessian(t, x) * l);
  return m;
}

CorrectionProfiles correction_profiles(const Vec5& l, double kappa_l, double t, const Vec5& x) {
  const Vec5 z = lorentz_coord(l, t, x);
  const double F = std::pow(ground_state(z), 4.0 / 3.0) + kappa_l * lambda_w(z);
  const double G = kappa_l / std::sqrt(1.0 - norm2(l)) * dot(l, lambda_w_grad(z));
  return {F / (t * t * t), G / (t * t)};
}

}  // namespace msol
