#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "msol/model.hpp"
#include "msol/numerics.hpp"
#include "msol/vec5.hpp"

namespace msol {

// ---------------------------------------------------------------------------
// Ground state W(x) = (1 + |x|^2/15)^{-3/2}, solution of Delta W + W^{7/3} = 0.

double ground_state(const Vec5& x);
Vec5 ground_state_grad(const Vec5& x);
Mat5 ground_state_hessian(const Vec5& x);
/// Lambda W = (3/2) W + x.grad W.
double lambda_w(const Vec5& x);
Vec5 lambda_w_grad(const Vec5& x);

// ---------------------------------------------------------------------------
// Lorentz boosts

/// (gamma - 1)/|l|^2 written as 1/(s(1+s)), s = sqrt(1-|l|^2); finite at l = 0.
double boost_coeff(const Vec5& l);
/// z + (gamma - 1) l (l.z)/|l|^2.
Vec5 apply_boost(const Vec5& l, const Vec5& z);
Mat5 boost_matrix(const Vec5& l);
/// zeta_l(t, x) = boost of x - l t.
Vec5 lorentz_coord(const Vec5& l, double t, const Vec5& x);
/// w_l(t, x) = W(zeta_l(t, x)).
double boosted_soliton(const Vec5& l, double t, const Vec5& x);

// ---------------------------------------------------------------------------
// Nonlinearity f(u) = |u|^{4/3} u

struct Nonlinearity {
  double f, df, F;
};
Nonlinearity nonlinearity(double u);

// ---------------------------------------------------------------------------
// Soliton frames: W_k = eps lambda^{-3/2} W_l((x - l t - y)/lambda).

class SolitonFrame {
 public:
  explicit SolitonFrame(const SolitonParams& p);
  SolitonFrame(const SolitonParams& p, double lambda, const Vec5& y);

  const SolitonParams& params() const { return p_; }
  double lambda() const { return lambda_; }
  const Vec5& y() const { return y_; }
  Vec5 center(double t) const { return p_.speed * t + y_; }

  /// Boosted, rescaled coordinate zeta at which W is evaluated.
  Vec5 zeta(double t, const Vec5& x) const;

  double value(double t, const Vec5& x) const;
  Vec5 grad(double t, const Vec5& x) const;
  Mat5 hessian(double t, const Vec5& x) const;
  /// Lambda_k W_k with Lambda_k = 3/2 + (x - l t - y).grad.
  double lambda_value(double t, const Vec5& x) const;
  Vec5 lambda_grad(double t, const Vec5& x) const;
  /// X_k = -l.grad W_k.
  double x_value(double t, const Vec5& x) const;

 private:
  SolitonParams p_;
  double lambda_;
  Vec5 y_;
  Mat5 boost_;
  double amp_;  // eps lambda^{-3/2}
};

std::vector<SolitonFrame> asymptotic_frames(const SolitonFamily& family);

// ---------------------------------------------------------------------------
// Linearised operators

/// L u = -Delta u - (7/3) W^{4/3} u, or with a boost l,
/// L_l u = -Delta u + (l.grad)^2 u - (7/3) W_l^{4/3} u, by finite differences.
double apply_linearized(const ScalarField& u, const Vec5& x,
                        const std::optional<Vec5>& boost = std::nullopt,
                        const FdOptions& fd = {});

/// Delta u - (l.grad)^2 u + f'(w) u for a prescribed background value w.
double wave_linearization(const ScalarField& u, const Vec5& x, const Vec5& l, double w,
                          const FdOptions& fd = {});

// ---------------------------------------------------------------------------
// Modulation vectors and correction profiles

struct ModulationTerms {
  double mw = 0.0;
  double mx = 0.0;
};

/// Contribution of one soliton to (M_W, M_X) for the drift (lambda_dot, y_dot).
ModulationTerms modulation_vector(const SolitonFrame& frame, double a_k, double lambda_dot,
                                  const Vec5& y_dot, double t, const Vec5& x);

struct CorrectionProfiles {
  double f = 0.0;
  double g = 0.0;
};

/// f_l = t^{-3} F(zeta_l), g_l = t^{-2} G(zeta_l) with F = W^{4/3} +
/// kappa Lambda W and G = (1-|l|^2)^{-1/2} kappa (l.grad Lambda W).
CorrectionProfiles correction_profiles(const Vec5& l, double kappa_l, double t,
                                       const Vec5& x);

// ---------------------------------------------------------------------------
// Field pairs (u, v) at a fixed time, with the gradient of u.

struct FieldSample {
  double u = 0.0;
  double v = 0.0;
  Vec5 grad_u;
};

struct FieldPair {
  std::function<FieldSample(const Vec5&)> eval;
};

}  // namespace msol
