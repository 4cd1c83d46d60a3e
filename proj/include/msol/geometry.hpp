#pragma once

#include <vector>

#include "msol/model.hpp"
#include "msol/numerics.hpp"
#include "msol/report.hpp"
#include "msol/vec5.hpp"

namespace msol {

/// Radial C-infinity cutoff: 1 on [0,1], 0 on [2,inf), built from the
/// exp(-1/s) glue.
struct Mollifier {
  static double value(double r);
  static double derivative(double r);
};

struct ThetaRho {
  double theta = 1.0;
  double rho = 0.0;
};

/// Values and first derivatives of the weights at one point (t, x).
struct WeightSample {
  double theta = 1.0, rho = 0.0;
  Vec5 grad_theta;
  double dt_theta = 0.0;
  std::vector<double> q;   // q_k
  std::vector<double> qa;  // q_k^alpha
  double q_sum = 0.0;
  double psi = 1.0;
  Vec5 grad_psi;
  double dt_psi = 0.0;
  double phi = 0.0;  // Phi = Theta psi
  Vec5 grad_phi;
  double dt_phi = 0.0;
};

/// chi and its derivatives; jacobian(i, j) = d_i chi_j.
struct ChiSample {
  Vec5 value;
  Mat5 jacobian;
  Vec5 dt;
};

class WeightBundle {
 public:
  /// Uses family.alpha and family.cone_speed (family must be validated).
  explicit WeightBundle(const SolitonFamily& family);

  const SolitonFamily& family() const { return family_; }
  double alpha() const { return alpha_; }
  double cone_speed() const { return L_; }

  ThetaRho theta_rho(double t, const Vec5& x) const;
  double q(std::size_t k, double t, const Vec5& x) const;
  WeightSample eval(double t, const Vec5& x) const;

  /// phi_k(t, x) = mollifier(t^{-1+alpha/2} (x - l_k t - y_k)).
  double phi_k(std::size_t k, double t, const Vec5& x) const;
  Vec5 grad_phi_k(std::size_t k, double t, const Vec5& x) const;
  double dt_phi_k(std::size_t k, double t, const Vec5& x) const;

  Vec5 f_k(std::size_t k, double t) const;
  Vec5 df_k(std::size_t k, double t) const;

  /// True when some centre lies in the support of another soliton's phi_m.
  bool supports_overlap(double t) const;

  /// chi(t, x); throws support-overlap when supports_overlap(t).
  Vec5 chi(double t, const Vec5& x) const;
  /// chi with closed-form derivatives, no horizon check.
  ChiSample chi_full(double t, const Vec5& x) const;

 private:
  SolitonFamily family_;
  double alpha_;
  double L_;
};

/// Sample points for sup estimates at time t: log-radial points in each
/// B_k, the annulus Lt/2 < |x| < 4Lt, the inner cone |x| < Lt and a far
/// shell 4Lt < |x| < 40Lt. per_region points per region.
std::vector<Vec5> geometry_sample_points(const SolitonFamily& family, double t,
                                         std::size_t per_region, std::uint64_t seed);

/// Per-time sup ratios of the bounds on q_k^alpha, Phi and chi.
struct BoundRatios {
  double t = 0.0;
  bool overlap = false;
  double pk_grad = 0, pk_time = 0, pk_second = 0;
  double ph_grad = 0, ph_time = 0;
  double gg_diag = 0, gg_offdiag = 0, gg_time = 0;
  double cl = 0;
  double chi_anchor = 0;  // max_k |chi(c_k) - l_k t| / t
};

BoundRatios geometry_ratios(const WeightBundle& bundle, double t, std::size_t per_region,
                            std::uint64_t seed);

/// All bounds across a t-grid. Passes iff no support overlap, every ratio
/// is finite and max/min over the grid is at most `stability` for each
/// bound, and the chi anchor holds to anchor_tol.
VerificationReport verify_geometry_bounds(const SolitonFamily& family,
                                          const std::vector<double>& t_grid,
                                          std::size_t per_region, std::uint64_t seed,
                                          double stability = 2.0, double anchor_tol = 1e-12);

/// int rho q^{2p} dx at time t (p = 3 or 3 - delta), by polar integration
/// around each centre with a smooth partition of unity.
QuadResult weighted_q_norm2(const SolitonFamily& family, double t, double p,
                            std::size_t directions = 512);

}  // namespace msol
