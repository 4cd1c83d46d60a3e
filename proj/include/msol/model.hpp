#pragma once

#include <limits>
#include <string>
#include <vector>

#include "msol/numerics.hpp"
#include "msol/vec5.hpp"

namespace msol {

/// One soliton: speed l (|l| < 1), asymptotic scale, asymptotic centre and
/// sign.
struct SolitonParams {
  Vec5 speed;
  double scale = 1.0;
  Vec5 center;
  int sign = 1;
};

/// A K-tuple of solitons plus the derived geometric constants.
struct SolitonFamily {
  std::vector<SolitonParams> solitons;
  double alpha = 0.1;
  /// NaN means "derive as alpha/4".
  double delta = std::numeric_limits<double>::quiet_NaN();
  /// Filled by validate_config.
  double sigma_geo = 0.0;
  double cone_speed = 0.0;

  std::size_t size() const { return solitons.size(); }
  /// Centre of soliton k at time t: l_k t + y_k.
  Vec5 center(std::size_t k, double t) const {
    return solitons[k].speed * t + solitons[k].center;
  }
};

/// Checks the hypotheses and fills sigma_geo, cone_speed and delta.
SolitonFamily validate_config(SolitonFamily family);

/// Speed-separation constant (1/100) min(1 - max|l_k|, min |l_k - l_m|).
double separation_sigma(const SolitonFamily& family);

/// sigma_{k,m} = (l_k - l_m) + (gamma_m - 1) l_m (l_m.(l_k - l_m)) / |l_m|^2.
Vec5 sigma_pair(const Vec5& lk, const Vec5& lm);

/// 15^{3/2}.
inline const double kFarFieldConstant = 15.0 * std::sqrt(15.0);

/// c_k = (7/3) 15^{3/2} sum_{m != k} eps_m lambda_m^{3/2} |sigma_{k,m}|^{-3}.
std::vector<double> interaction_coeff(const SolitonFamily& family,
                                      const std::vector<std::vector<Vec5>>& sigma);

/// kappa_0 = -(W^{4/3}, Lambda W) / ||Lambda W||^2 at the given relative
/// quadrature tolerance, with the propagated error estimate.
QuadResult kappa0(double rel_tol = 1e-12);

/// kappa_l = (1 - |l|^2) kappa_0.
double kappa(const Vec5& l);

struct PsiResult {
  double value = 0.0;
  double max_summand = 0.0;
  double threshold = 0.0;
  bool nonvanishing = false;
};

/// Psi = sum_k (1-|l_k|^2)^{3/2} lambda_k sum_{m != k} eps_m lambda_m^{3/2}
/// |sigma_{k,m}|^{-3}; nonvanishing iff |Psi| exceeds rel_threshold times the
/// largest (k,m) summand.
PsiResult psi(const SolitonFamily& family, double rel_threshold = 1e-10);

struct InteractionConstants {
  std::vector<std::vector<Vec5>> sigma_pairs;
  std::vector<double> c;
  std::vector<double> kappa;
  std::vector<double> a;
  PsiResult psi;
  QuadResult kappa0;
};

InteractionConstants compute_constants(const SolitonFamily& family);

}  // namespace msol
