#include "msol/modulation.hpp"

#include <algorithm>
#include <boost/math/special_functions/expint.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "msol/error.hpp"
#include "msol/numerics.hpp"

namespace msol {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::vector<double>;

struct Stop {};

/// Dense-output Dormand-Prince from t0 to t1 (either direction); obs sees
/// every accepted step and may throw Stop.
template <class Sys, class Obs>
void integrate(Sys sys, State& y, double t0, double t1, const OdeTolerance& tol, Obs obs) {
  auto stepper = odeint::make_dense_output(tol.abs, tol.rel, odeint::runge_kutta_dopri5<State>());
  const double dt = (t1 > t0 ? 1.0 : -1.0) * 1e-3 * std::max(1.0, std::abs(t0));
  try {
    odeint::integrate_adaptive(stepper, sys, y, t0, t1, dt,
                               [&](const State& s, double t) { obs(s, t); });
  } catch (const Stop&) {
  } catch (const odeint::step_adjustment_error& e) {
    fail(ErrorKind::numerical, "step-failure", e.what());
  } catch (const odeint::no_progress_error& e) {
    fail(ErrorKind::numerical, "step-failure", e.what());
  }
}

}  // namespace

double lambda_closed_form(double a, double lambda_T, double T, double t) {
  const double s = std::sqrt(lambda_T) + 0.5 * a * (1.0 / T - 1.0 / t);
  return s * s;
}

ParamTrajectory integrate_params(const SolitonFamily& family,
                                 const InteractionConstants& constants,
                                 const std::vector<double>& lambda_T, double T, double t_end,
                                 const OdeTolerance& tol) {
  const std::size_t K = family.size();
  if (lambda_T.size() != K || constants.a.size() != K)
    fail(ErrorKind::precondition, "size-mismatch", "one scale and one a_k per soliton");
  if (!(T > 0.0 && t_end > T)) fail(ErrorKind::precondition, "bad-interval", "need 0 < T < t_end");
  for (double l : lambda_T)
    if (!(l > 0.0)) fail(ErrorKind::precondition, "bad-scale", "lambda(T) must be positive");
  const auto& a = constants.a;
  ParamTrajectory out;
  for (const auto& s : family.solitons) out.y.push_back(s.center);
  State y = lambda_T;
  auto sys = [&](const State& l, State& dl, double t) {
    for (std::size_t k = 0; k < K; ++k) dl[k] = a[k] * std::sqrt(std::max(l[k], 0.0)) / (t * t);
  };
  integrate(sys, y, T, t_end, tol, [&](const State& l, double t) {
    for (double v : l)
      if (!(v > 0.0)) fail(ErrorKind::numerical, "step-failure", "lambda reached zero");
    out.t.push_back(t);
    out.lambda.push_back(l);
  });
  const double tl = out.t.back();
  out.lambda_inf.resize(K);
  out.deviation_bound.assign(K, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    const double s = std::sqrt(out.lambda.back()[k]) + 0.5 * a[k] / tl;
    out.lambda_inf[k] = s * s;
    for (std::size_t i = 0; i < out.t.size(); ++i)
      out.deviation_bound[k] = std::max(out.deviation_bound[k],
                                        out.t[i] * std::abs(out.lambda[i][k] - out.lambda_inf[k]));
  }
  return out;
}

Forcing envelope_forcing(double c, double delta) {
  return [c, delta](double t) { return c * std::pow(t, -4.0 + 2.0 * delta); };
}

double ShootingProblem::beta_min() const {
  return beta.empty() ? 0.0 : *std::min_element(beta.begin(), beta.end());
}

std::vector<double> unstable_rates(const SolitonFamily& family,
                                   const std::vector<double>& lambda_inf, double lambda0) {
  if (lambda_inf.size() != family.size())
    fail(ErrorKind::precondition, "size-mismatch", "one lambda_inf per soliton");
  if (!(lambda0 > 0.0)) fail(ErrorKind::config, "bad-lambda0", "lambda_0 must be positive");
  std::vector<double> beta;
  for (std::size_t k = 0; k < family.size(); ++k)
    beta.push_back(std::sqrt(lambda0) / lambda_inf[k] *
                   std::sqrt(1.0 - norm2(family.solitons[k].speed)));
  return beta;
}

ModeTrajectory evolve_mode(double beta, int sign, const Forcing& g, double z_T, double T,
                           double S, const OdeTolerance& tol) {
  if (!(beta > 0.0)) fail(ErrorKind::precondition, "bad-rate", "beta must be positive");
  const double sb = sign >= 0 ? beta : -beta;
  ModeTrajectory out;
  State y{z_T};
  integrate([&](const State& z, State& dz, double t) { dz[0] = sb * z[0] + g(t); }, y, T, S, tol,
            [&](const State& z, double t) {
              out.t.push_back(t);
              out.z.push_back(z[0]);
            });
  return out;
}

double bounded_solution(double beta, const Forcing& g, double t) {
  RadialQuadOptions o;
  o.rel_tol = 1e-13;
  o.abs_tol = 1e-300;
  return -radial_quad([&](double u) { return std::exp(-beta * u) * g(t + u); }, 0.0, INFINITY, o)
              .value;
}

namespace {

struct Shot {
  int side = 0;
  bool left = false;
};

/// Sign of z when it leaves the tube moving away from it, or at S.
Shot classify(double beta, const Forcing& g, double xi, double T, double S) {
  State y{xi};
  OdeTolerance tol;
  tol.abs = 1e-20;
  Shot shot;
  integrate([&](const State& z, State& dz, double t) { dz[0] = beta * z[0] + g(t); }, y, T, S, tol,
            [&](const State& z, double t) {
              const double v = z[0];
              shot.side = (v > 0) - (v < 0);
              if (std::abs(v) > std::pow(t, -3.5) && beta * std::abs(v) > 2.0 * std::abs(g(t))) {
                shot.left = true;
                throw Stop{};
              }
            });
  return shot;
}

}  // namespace

double tube_exit_time(double beta, const Forcing& g, double xi, double T, double S) {
  State y{xi};
  OdeTolerance tol;
  tol.abs = 1e-20;
  double exit = INFINITY;
  integrate([&](const State& z, State& dz, double t) { dz[0] = beta * z[0] + g(t); }, y, T, S, tol,
            [&](const State& z, double t) {
              if (std::abs(z[0]) > std::pow(t, -3.5)) {
                exit = t;
                throw Stop{};
              }
            });
  return exit;
}

ShootingResult shoot_stable(double beta, const Forcing& g, double T, double S, double xi_tol) {
  if (!(beta > 0.0)) fail(ErrorKind::precondition, "bad-rate", "beta must be positive");
  double B = std::pow(T, -3.5) + std::abs(g(T)) / beta;
  double lo = -B, hi = B;
  Shot slo = classify(beta, g, lo, T, S), shi = classify(beta, g, hi, T, S);
  auto bracketed = [&] { return slo.left && shi.left && slo.side < 0 && shi.side > 0; };
  for (int i = 0; i < 60 && !bracketed(); ++i) {
    B *= 2.0;
    lo = -B;
    hi = B;
    slo = classify(beta, g, lo, T, S);
    shi = classify(beta, g, hi, T, S);
  }
  if (!bracketed())
    fail(ErrorKind::numerical, "no-bracketing", "horizon too short to separate the branches");
  ShootingResult r;
  while (hi - lo > xi_tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    ++r.iterations;
    const Shot s = classify(beta, g, mid, T, S);
    if (s.side == 0) {
      lo = hi = mid;
      break;
    }
    if (!s.left)
      fail(ErrorKind::numerical, "no-bracketing", "horizon too short to separate the branches");
    (s.side > 0 ? hi : lo) = mid;
  }
  r.xi = 0.5 * (lo + hi);
  r.width = hi - lo;
  return r;
}

TransversalityResult transversality(const std::vector<double>& beta, const Forcing& forcing,
                                    double T0, std::size_t samples, std::uint64_t seed) {
  if (beta.empty()) fail(ErrorKind::precondition, "empty-family", "need K >= 1");
  const unsigned K = static_cast<unsigned>(beta.size());
  TransversalityResult out;
  out.beta_min = *std::min_element(beta.begin(), beta.end());
  out.T0 = T0;
  out.max_derivative = -INFINITY;
  const auto dirs = sphere_points_nd(K, samples, seed);
  for (double t : {T0, 2.0 * T0, 10.0 * T0}) {
    const double g = std::abs(forcing(t)), r = std::pow(t, -3.5);
    for (const auto& u : dirs) {
      double s2 = 0.0, cross = 0.0;
      for (unsigned k = 0; k < K; ++k) {
        const double z = r * u[k];
        s2 += z * z;
        cross += z * (-beta[k] * z + (z >= 0 ? g : -g));
      }
      const double d = 7.0 * std::pow(t, 6) * s2 + 2.0 * std::pow(t, 7) * cross;
      out.max_derivative = std::max(out.max_derivative, d);
    }
  }
  return out;
}

VerificationReport modulation_suite(const SolitonFamily& family,
                                    const InteractionConstants& constants,
                                    const ModulationSettings& st) {
  VerificationReport r;
  r.suite = "modulation";
  r.flags.push_back("lambda_0 = " + std::to_string(st.lambda0) + " (configurable)");
  r.flags.push_back("forcing envelope c t^(-4+2 delta); field coupling dropped");
  const std::size_t K = family.size();

  std::vector<double> lambda_T;
  for (const auto& s : family.solitons) lambda_T.push_back(s.scale);
  const auto traj = integrate_params(family, constants, lambda_T, st.t_begin, st.t_end);
  nlohmann::ordered_json params = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < K; ++k) {
    const double a = constants.a[k];
    double err = 0.0;
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
      const double exact = lambda_closed_form(a, lambda_T[k], st.t_begin, traj.t[i]);
      err = std::max(err, std::abs(traj.lambda[i][k] - exact) / exact);
    }
    const std::string id = std::to_string(k);
    r.add_le("closed-form." + id, err, 1e-8, "max relative error of lambda on the t-grid");
    const double li = traj.lambda_inf[k];
    r.add_le("deviation." + id, traj.deviation_bound[k],
             (std::abs(a) * std::sqrt(li) + a * a / (4.0 * st.t_begin)) * (1.0 + 1e-8),
             "sup t|lambda - lambda_inf| against |a| sqrt(lambda_inf) + a^2/(4T)");
    params.push_back({{"a", a},
                      {"lambda_T", lambda_T[k]},
                      {"lambda_inf", li},
                      {"C0", traj.deviation_bound[k]},
                      {"C0_leading", std::abs(a) * std::sqrt(li)}});
  }
  r.data["params"] = params;
  r.data["steps"] = traj.t.size();

  // g = t^{-4}, beta = 1, T = 10: xi* = -e^T T^{-3} E_4(T)
  const double T = 10.0, S = 1e3 * T;
  const Forcing g4 = [](double t) { return std::pow(t, -4.0); };
  const double oracle = -std::exp(T) * std::pow(T, -3.0) * boost::math::expint(4, T);
  const auto shot = shoot_stable(1.0, g4, T, S);
  r.add_rel("shooting-oracle", shot.xi, oracle, 1e-8);
  r.add_rel("backward-integral", bounded_solution(1.0, g4, T), oracle, 1e-10);
  const auto zero = shoot_stable(1.0, [](double) { return 0.0; }, T, S);
  r.add_abs("shooting-zero-forcing", zero.xi, 0.0, 1e-12);
  const double exit = tube_exit_time(1.0, g4, shot.xi + 1e-6, T, S);
  r.add_flag("perturbed-leaves-tube", std::isfinite(exit) && exit < S);
  const Forcing g8 = [](double t) { return 2.0 * std::pow(t, -4.0); };
  const auto doubled = shoot_stable(1.0, g8, T, S);
  r.add_rel("shooting-linearity", doubled.xi, 2.0 * shot.xi, 1e-7);
  r.data["shooting"] = {{"xi", shot.xi},
                        {"oracle", oracle},
                        {"iterations", shot.iterations},
                        {"perturbed_exit_time", exit}};

  const auto beta = unstable_rates(family, lambda_T, st.lambda0);
  const double bmin = *std::min_element(beta.begin(), beta.end());
  const double T0 = 100.0 / bmin;
  const auto free = transversality(beta, [](double) { return 0.0; }, T0, st.sphere_samples,
                                   st.seed);
  const auto forced = transversality(beta, envelope_forcing(st.forcing_c, family.delta), T0,
                                     st.sphere_samples, st.seed);
  r.add_le("transversality-free", free.max_derivative, -0.5 * bmin);
  r.add_le("transversality-forced", forced.max_derivative, -0.5 * bmin);
  r.data["beta"] = beta;
  r.data["T0"] = T0;
  r.data["transversality"] = {{"free", free.max_derivative}, {"forced", forced.max_derivative},
                              {"beta_min", bmin}};
  return r;
}

}  // namespace msol
