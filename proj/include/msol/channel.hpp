#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "msol/model.hpp"
#include "msol/numerics.hpp"
#include "msol/report.hpp"

namespace msol {

/// Radial profile with its closed-form derivative. The bounds majorise
/// |value| and |deriv| summed over the pieces a profile was combined from;
/// they set the rounding floor of the quadrature.
struct RadialProfile {
  std::function<double(double)> value;
  std::function<double(double)> deriv;
  std::function<double(double)> value_bound;
  std::function<double(double)> deriv_bound;
};

/// c r^{-p}.
RadialProfile power_profile(double p, double c = 1.0);
RadialProfile zero_profile();
/// a f + b g.
RadialProfile combine(double a, const RadialProfile& f, double b, const RadialProfile& g);

/// (U0, U1) on r > R.
struct RadialPair {
  RadialProfile u0, u1;
  double R = 1.0;
};

/// |S^4| int_R^inf (U0a' U0b' + U1a U1b) r^4 dr, integrated in log r.
QuadResult exterior_inner(const RadialPair& a, const RadialPair& b, double R);
double exterior_norm(const RadialPair& a);

/// Unit-normalised (r^{-3}, 0) and (0, r^{-3}) on r > R with their Gram
/// matrix by quadrature.
class ChannelPlane {
 public:
  explicit ChannelPlane(double R);

  double R() const { return R_; }
  const RadialPair& basis(int i) const { return basis_[i]; }
  const std::array<std::array<double, 2>, 2>& gram() const { return gram_; }
  double condition_number() const;

 private:
  double R_;
  std::array<RadialPair, 2> basis_;
  std::array<std::array<double, 2>, 2> gram_{};
};

struct Projection {
  RadialPair residual;
  /// Coefficients on the normalised basis.
  std::array<double, 2> coefficients{};
  double input_norm = 0.0, projection_norm = 0.0, norm = 0.0;
};

/// pair minus its orthogonal projection onto the plane at pair.R.
Projection project_perp(const RadialPair& pair);
Projection project_perp(const RadialPair& pair, const ChannelPlane& plane);

/// ||pi_R^perp (r^{-p}, 0)|| = sqrt(|S^4| (p^2/(2p-3) - 3)) R^{(3-2p)/2}.
double perp_norm_analytic(double p, double R);

struct TailFit {
  ExponentFit fit;
  std::vector<double> norms;
  /// The tail lies in the plane: norms vanish and no fit is made.
  bool plane_element = false;
};

/// log-log slope of ||pi_R^perp (r^{-p}, 0)|| over the R-grid.
TailFit tail_scaling_fit(const std::vector<double>& R_grid, double p = 4.0);

/// Mixtures of three powers r^{-p}, p in [2.6, 6], in each slot.
RadialPair random_radial_pair(std::uint64_t seed, double R);

/// Mean of field(t, r u) over count quasi-uniform sphere directions, with
/// |full mean - first-half mean| as the error.
QuadResult radialize(const std::function<double(double, const Vec5&)>& field, double t,
                     double r, std::size_t count = std::size_t{1} << 14,
                     std::uint64_t seed = 0);

/// Spherical mean of (1 + (gamma^2 - 1) cos^2)^{-3/2}, the angular factor
/// of W_l at large radius.
double boosted_angular_mean(const Vec5& l);

/// Projection law at R_grid, annihilation of (r^{-3}, 0), idempotence,
/// Pythagoras and the Gram conditioning.
VerificationReport verify_channel(const std::vector<double>& R_grid, std::size_t corpus = 20,
                                  std::uint64_t seed = 0);

/// Lower-bound curve |Psi| C_v sqrt(|S^4|/5) R^{-5/2}; no information when
/// Psi vanishes.
VerificationReport inelastic_scale(const SolitonFamily& family,
                                   const InteractionConstants& constants,
                                   const std::vector<double>& R_grid, double c_v = 1.0);

}  // namespace msol
