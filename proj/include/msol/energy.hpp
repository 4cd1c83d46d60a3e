#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "msol/fields.hpp"
#include "msol/geometry.hpp"
#include "msol/model.hpp"
#include "msol/numerics.hpp"
#include "msol/report.hpp"

namespace msol {

/// a (1 + s.(x - c)) exp(-sum_j ((x - c)_j / w_j)^2)
struct GaussComponent {
  double amplitude = 1.0;
  Vec5 center;
  Vec5 width{{1, 1, 1, 1, 1}};
  Vec5 slope;

  double value(const Vec5& x) const;
  Vec5 grad(const Vec5& x) const;
};

/// Synthetic perturbation (eps, eta) built from a few Gaussian components
/// sharing one anisotropic envelope, each with its own offset, slope and
/// amplitude. Integrals use the tensor Gauss-Hermite rule of the squared
/// envelope.
class TestField {
 public:
  TestField() = default;
  /// envelope: per-axis widths the quadrature is fitted to.
  TestField(const Vec5& center, const Vec5& envelope, std::vector<GaussComponent> eps,
            std::vector<GaussComponent> eta, std::uint64_t seed = 0);

  /// Envelope widths in [0.7, 1] scale per axis; three eps and two eta
  /// components with offsets up to 0.4 width, slopes and signed amplitudes
  /// in [0.5, 1].
  static TestField random(std::uint64_t seed, const Vec5& center, double scale = 1.0);

  double eps(const Vec5& x) const;
  Vec5 grad_eps(const Vec5& x) const;
  double eta(const Vec5& x) const;
  FieldSample sample(const Vec5& x) const;
  FieldPair pair() const;

  /// (mu_eps eps, mu_eta eta).
  TestField scaled(double mu_eps, double mu_eta) const;
  /// Same shape moved to a new centre.
  TestField moved(const Vec5& center) const;

  const Vec5& center() const { return center_; }
  const Vec5& envelope() const { return envelope_; }
  std::uint64_t seed() const { return seed_; }
  /// |eps|, |eta| and |grad eps| stay below 1e-14 outside this ball.
  double support_radius() const { return support_radius_; }

  /// n^5 Gauss-Hermite nodes, scale envelope/sqrt(2) per axis.
  Cubature rule(int n) const;

 private:
  Vec5 center_;
  Vec5 envelope_{{1, 1, 1, 1, 1}};
  std::vector<GaussComponent> eps_, eta_;
  std::uint64_t seed_ = 0;
  double support_radius_ = 0.0;
};

/// Fields of the corpus placed at time t: centres alternate between the
/// inner cone and the shell Lt < |x| < 3Lt, each at least support radius
/// plus one away from the origin, the soliton centres and |x| = Lt.
std::vector<TestField> test_corpus(const SolitonFamily& family, double t, std::size_t count,
                                   std::uint64_t seed);

/// Sum of a cubature over two orders with |Q_fine - Q_coarse| as estimate.
struct RulePair {
  Cubature fine, coarse;
};
RulePair field_rules(const TestField& field, int n = 10);

// ---------------------------------------------------------------------------
// Conserved quantities

struct Conserved {
  double energy = 0.0;
  Vec5 momentum;
  double energy_error = 0.0;
};

/// E = 1/2 int v^2 + 1/2 int |grad u|^2 - 3/10 int |u|^{10/3} and
/// M = int v grad u over the fine rule, error from the coarse one.
Conserved conserved_functionals(const FieldPair& pair, const RulePair& rules);
Conserved conserved_functionals(const TestField& field);

/// E(W, 0) by radial quadrature.
QuadResult ground_state_energy();

// ---------------------------------------------------------------------------
// Energy functional

/// Frozen background: the asymptotic solitons and weights at time t.
class EnergyContext {
 public:
  EnergyContext(const SolitonFamily& family, double t);

  double t() const { return t_; }
  const SolitonFamily& family() const { return bundle_.family(); }
  const WeightBundle& bundle() const { return bundle_; }
  const std::vector<SolitonFrame>& frames() const { return frames_; }
  /// Sum of W_k at (t, x).
  double background(const Vec5& x) const;

 private:
  double t_;
  WeightBundle bundle_;
  std::vector<SolitonFrame> frames_;
};

struct EnergyBreakdown {
  double h1 = 0.0, h1_quadratic = 0.0, h1_potential = 0.0;
  double h2 = 0.0, h3 = 0.0, h = 0.0;
  /// N^2 from one pass and from separately integrated pieces.
  double n2 = 0.0, n2_separate = 0.0, n = 0.0;
  double h_error = 0.0, n2_error = 0.0;
};

/// H1 = int rho (|grad eps|^2 + eta^2 - 2 (F(W + eps) - F(W) - f(W) eps)),
/// H2 = 2 int (chi . grad eps) eta, H3 = 4 int Phi eps eta, with W the sum
/// of the frozen solitons.
EnergyBreakdown functional_H(const TestField& field, const EnergyContext& ctx);

struct SquareIdentity {
  double lhs = 0.0, rhs = 0.0;
  /// |lhs - rhs| / max(|lhs|, |rhs|).
  double residual = 0.0;
  /// Relative quadrature error estimate of the two sides.
  double estimate = 0.0;
};

/// int Phi |x| (xhat.grad eps + eta)^2 + 8 int Phi eps eta against
/// int Phi |x| (xhat.grad eps + eta + 4 eps/|x|)^2 + 4 int (grad Phi . xhat) eps^2.
SquareIdentity square_identity(const TestField& field, const EnergyContext& ctx);

/// Fields seeds seed..seed+count-1 of the corpus; each passes iff the
/// residual is at most 3 times the estimate (floored at 64 ulp) and the
/// estimate is at most max_estimate.
VerificationReport check_square_identity(const SolitonFamily& family, double t,
                                         std::size_t count, std::uint64_t seed,
                                         double max_estimate = 1e-6);

inline constexpr std::array<const char*, 6> kHardyTerms = {
    "rho/|x|^2", "t q^2", "t^alpha q^(1+alpha)", "rho q^2", "Theta/|x|", "Theta q"};

struct HardyRatios {
  /// Each weighted int eps^2 over int rho |grad eps|^2, in kHardyTerms order.
  std::array<double, 6> ratio{};
  /// int eps^2/|x|^2 over int |grad eps|^2.
  double classical = 0.0;
};

HardyRatios hardy_ratios(const TestField& field, const EnergyContext& ctx);

/// Hardy quotient of r^{-3/2} min(r^s, r^{-s}) by radial quadrature; equals
/// 1/(9/4 + s^2) and tends to 4/9.
double hardy_radial_ratio(double s);

/// All six ratios finite, classical ratio at most classical_bound, and the
/// ratios unchanged to 1e-12 under eps -> 3 eps.
VerificationReport hardy_suite(const SolitonFamily& family, double t, std::size_t count,
                               std::uint64_t seed, double classical_bound = 0.45);

// ---------------------------------------------------------------------------
// Coercivity

struct CoercivityProbe {
  /// H / N^2 per field after projection.
  std::vector<double> quotient;
  double mu_hat = 0.0;
  /// H / N^2 for the near-kernel pair m (Lambda W_1, -l_1 . grad Lambda W_1),
  /// not projected.
  double control = 0.0;
  /// Largest relative size of the projection coefficients.
  double max_projection = 0.0;
};

/// Corpus fields projected in the plain H^1 product against Lambda W_k and
/// d_j W_k, then H / N^2. A smoke test, not a proof.
CoercivityProbe probe_coercivity(const SolitonFamily& family, double t, std::size_t count,
                                 std::uint64_t seed);

/// mu_hat > 0, stable within 50 % when the corpus doubles, and the control
/// quotient below a tenth of mu_hat.
VerificationReport coercivity_probe(const SolitonFamily& family, double t, std::size_t count,
                                    std::uint64_t seed);

}  // namespace msol
