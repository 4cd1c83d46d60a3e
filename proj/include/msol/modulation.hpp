#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "msol/model.hpp"
#include "msol/report.hpp"

namespace msol {

struct OdeTolerance {
  double rel = 1e-13;
  double abs = 1e-16;
};

/// t, lambda_k(t), y_k(t) and the unstable amplitudes z_k^{+-}(t).
struct ModulationState {
  double t = 0.0;
  std::vector<double> lambda;
  std::vector<Vec5> y;
  std::vector<double> z_minus, z_plus;
};

struct ParamTrajectory {
  std::vector<double> t;
  /// lambda[i][k] at t[i].
  std::vector<std::vector<double>> lambda;
  std::vector<Vec5> y;
  /// From the conserved quantity sqrt(lambda) + a/(2t) at the last step.
  std::vector<double> lambda_inf;
  /// sup_t t |lambda_k(t) - lambda_inf_k|.
  std::vector<double> deviation_bound;
};

/// lambda_k' = a_k lambda_k^{1/2} t^{-2}, y_k' = 0 from T to t_end by
/// adaptive Dormand-Prince. Throws "step-failure" when lambda reaches 0.
ParamTrajectory integrate_params(const SolitonFamily& family,
                                 const InteractionConstants& constants,
                                 const std::vector<double>& lambda_T, double T, double t_end,
                                 const OdeTolerance& tol = {});

/// Closed form sqrt(lambda(t)) = sqrt(lambda(T)) + (a/2)(1/T - 1/t).
double lambda_closed_form(double a, double lambda_T, double T, double t);

using Forcing = std::function<double(double)>;

/// c t^{-4 + 2 delta}.
Forcing envelope_forcing(double c, double delta);

struct ShootingProblem {
  std::vector<double> beta;
  Forcing forcing = [](double) { return 0.0; };
  double T = 10.0;
  /// Horizon; 0 means 10^3 T.
  double S = 0.0;

  double horizon() const { return S > 0.0 ? S : 1e3 * T; }
  double beta_min() const;
};

/// beta_k = (sqrt(lambda_0)/lambda_k^inf) sqrt(1 - |l_k|^2).
std::vector<double> unstable_rates(const SolitonFamily& family,
                                   const std::vector<double>& lambda_inf,
                                   double lambda0 = 1.0);

struct ModeTrajectory {
  std::vector<double> t, z;
};

/// z' = sign beta z + g(t) from (T, z_T) to S; S < T integrates backwards.
ModeTrajectory evolve_mode(double beta, int sign, const Forcing& g, double z_T, double T,
                           double S, const OdeTolerance& tol = {});

/// Value at t of the bounded solution -int_t^inf e^{beta (t - s)} g(s) ds.
double bounded_solution(double beta, const Forcing& g, double t);

struct ShootingResult {
  double xi = 0.0;
  int iterations = 0;
  /// Bracket width at exit.
  double width = 0.0;
};

/// Bisection on z(T) = xi for z' = beta z + g until the bracket is below
/// xi_tol; a shot is classified by the sign of z where it leaves the tube
/// |z| <= t^{-7/2}. Throws "no-bracketing" when a shot stays undecided up
/// to the horizon S.
ShootingResult shoot_stable(double beta, const Forcing& g, double T, double S,
                            double xi_tol = 1e-12);

/// First time the forward solution from xi leaves the tube, or +inf.
double tube_exit_time(double beta, const Forcing& g, double xi, double T, double S);

struct TransversalityResult {
  /// max over sampled sphere states and times of d/dt(t^7 sum (z^-)^2).
  double max_derivative = 0.0;
  double beta_min = 0.0;
  double T0 = 0.0;
};

/// States with sum (z_k^-)^2 = t^{-7} at t in {T0, 2T0, 10T0}; each z_k^-
/// moves by -beta_k z_k^- + g_k with |g_k| = forcing(t) signed against the
/// decay.
TransversalityResult transversality(const std::vector<double>& beta, const Forcing& forcing,
                                    double T0, std::size_t samples = 1000,
                                    std::uint64_t seed = 0);

struct ModulationSettings {
  double lambda0 = 1.0;
  double t_begin = 10.0, t_end = 1e4;
  double forcing_c = 1.0;
  std::size_t sphere_samples = 1000;
  std::uint64_t seed = 0;
};

/// Integrator against the closed form, shooting against the exponential
/// integral oracle, and the transversality margin.
VerificationReport modulation_suite(const SolitonFamily& family,
                                    const InteractionConstants& constants,
                                    const ModulationSettings& settings = {});

}  // namespace msol
