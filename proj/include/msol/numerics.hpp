#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <variant>
#include <vector>

#include "msol/vec5.hpp"

namespace msol {

/// Surface area of the unit sphere S^4 in R^5.
inline constexpr double kSphereArea4 = 8.0 * std::numbers::pi * std::numbers::pi / 3.0;

// ---------------------------------------------------------------------------
// Summation

/// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Number of worker threads used by the chunked reductions (>= 1).
unsigned worker_count();
/// Override the worker count; 0 restores the hardware default.
void set_worker_count(unsigned n);

/// Sum of fn(i) for i in [0, n). Chunk boundaries are fixed and partial sums
/// are combined in chunk order, so the result does not depend on the number
/// of threads.
double parallel_sum(std::size_t n, const std::function<double(std::size_t)>& fn);

/// Several sums sharing one pass; fn writes `width` values for index i.
std::vector<double> parallel_sums(
    std::size_t n, std::size_t width,
    const std::function<void(std::size_t, double*)>& fn);

/// Calls fn(i) for every i in [0, n) on the worker pool.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Max of fn(i) over [0, n), deterministic. Returns -inf for n == 0.
double parallel_max(std::size_t n, const std::function<double(std::size_t)>& fn);

// ---------------------------------------------------------------------------
// One-dimensional quadrature

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long evaluations = 0;
};

struct RadialQuadOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int max_panels = 4000;
};

/// Adaptive Gauss-Kronrod (7/15) quadrature of f over [a, b]. b may be
/// +infinity; then [a, inf) is mapped by r = a/(1-s) (a > 0) or split at 1
/// when a == 0. Panels are refined worst-first until the summed estimate is
/// below max(abs_tol, rel_tol*|value|).
QuadResult radial_quad(const std::function<double(double)>& f, double a, double b,
                       const RadialQuadOptions& opt = {});

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);
/// Nodes and weights of the n-point Gauss-Hermite rule (weight exp(-x^2)).
void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights);

// ---------------------------------------------------------------------------
// Point sets

enum class SamplerKind { halton, lattice, sphere_fibonacci, stratified_regional };

struct Sampler {
  SamplerKind kind = SamplerKind::halton;
  std::uint64_t seed = 0;
  std::size_t count = std::size_t{1} << 17;
};

/// Radical inverse of i in the given base.
double radical_inverse(std::uint64_t i, unsigned base);

/// Halton points in [0,1)^dim (dim <= 16) with bases the first primes. Seed 0
/// gives the plain sequence starting at index 1; other seeds apply a
/// Cranley-Patterson rotation drawn from the seed.
class HaltonSequence {
 public:
  HaltonSequence(unsigned dim, std::uint64_t seed);
  void point(std::uint64_t index, double* out) const;
  unsigned dim() const { return dim_; }

 private:
  unsigned dim_;
  std::vector<double> shift_;
};

/// Rank-1 Korobov lattice with a tabulated generator, N a power of two in
/// [2^8, 2^18]. The even-index points form the N/2 lattice.
class KorobovLattice {
 public:
  KorobovLattice(std::size_t n, unsigned dim, std::uint64_t seed);
  void point(std::uint64_t index, double* out) const;
  std::size_t size() const { return n_; }
  static bool supported(std::size_t n);

 private:
  std::size_t n_;
  unsigned dim_;
  std::vector<std::uint64_t> gen_;
  std::vector<double> shift_;
};

/// Equal-area map of [0,1)^4 onto S^4.
Vec5 sphere_map(const double* u);

/// Quasi-uniform unit vectors of S^4: a Kronecker sequence with the
/// generalised golden-ratio increments in [0,1)^4 pushed through the
/// equal-area map, emitted as antipodal pairs. count must be even.
std::vector<Vec5> sphere_points(std::size_t count, std::uint64_t seed);

/// Quasi-uniform points on S^{dim-1} (antipodal pairs), any dim >= 1.
std::vector<std::vector<double>> sphere_points_nd(unsigned dim, std::size_t count,
                                                  std::uint64_t seed);

/// Deterministic 64-bit stream (splitmix64) and its unit-interval view.
std::uint64_t splitmix64(std::uint64_t& state);
double unit_double(std::uint64_t bits);

// ---------------------------------------------------------------------------
// Integration over regions of R^5

struct Box {
  Vec5 lo, hi;
  /// Per-axis scale of a truncated-normal axis map centred at the box
  /// midpoint; empty means the affine map.
  std::vector<double> normal_scale;
};
struct Ball {
  Vec5 center;
  double radius = 1.0;
};
struct Shell {
  Vec5 center;
  double r_in = 0.0, r_out = 1.0;
};
using Region = std::variant<Box, Ball, Shell>;

struct QmcOptions {
  Sampler sampler{};
  /// Pair every point with its reflection (box centre or antipode).
  bool antithetic = true;
  /// When set, the integrand must stay below this value on the boundary.
  std::optional<double> boundary_tolerance;
};

/// Volume-weighted QMC mean over the region. The error estimate is
/// |Q_N - Q_{N/2}| from the leading half of the sequence.
QuadResult qmc_integrate(const std::function<double(const Vec5&)>& f,
                         const Region& region, const QmcOptions& opt = {});

/// Generated sample points (for sup estimates) inside a region.
std::vector<Vec5> region_points(const Region& region, const Sampler& sampler);

/// Points of a ball with log-uniform radius in [r_min, radius], so that
/// near-centre structure is resolved.
std::vector<Vec5> log_radial_points(const Vec5& center, double r_min,
                                    double radius, const Sampler& sampler);

// ---------------------------------------------------------------------------
// Weighted node sets

/// Nodes with weights so that sum w_i f(x_i) approximates an integral.
struct Cubature {
  std::vector<Vec5> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

/// Tensor Gauss-Hermite rule adapted to exp(-sum((x-c)_j/s_j)^2); the
/// Gaussian weight is folded into the weights.
Cubature gauss_hermite_rule(const Vec5& center, const Vec5& scales, int n);

/// Polar rule around a centre: radial Gauss-Legendre panels on
/// [0, r_max] (graded towards the origin) times sphere directions.
Cubature polar_rule(const Vec5& center, double r_max, int radial_panels,
                    int nodes_per_panel, std::size_t directions,
                    std::uint64_t seed = 0);

/// sum_i w_i f(x_i) with deterministic chunked reduction.
double apply_rule(const Cubature& rule, const std::function<double(const Vec5&)>& f);
std::vector<double> apply_rule(const Cubature& rule, std::size_t width,
                               const std::function<void(const Vec5&, double*)>& f);

// ---------------------------------------------------------------------------
// Finite differences

struct FdOptions {
  double h = 1e-3;
  /// Scale the step as h*max(1, |x|).
  bool relative = true;
};

using ScalarField = std::function<double(const Vec5&)>;

double fd_step(const Vec5& x, const FdOptions& opt);
/// 4th-order central first derivative along axis i.
double fd_first(const ScalarField& f, const Vec5& x, int i, const FdOptions& opt = {});
/// 4th-order central second derivative; i == j gives the pure stencil.
double fd_second(const ScalarField& f, const Vec5& x, int i, int j,
                 const FdOptions& opt = {});
/// order 1 (axis_i) or 2 (axis_i, axis_j).
double fd_derivative(const ScalarField& f, const Vec5& x, int order, int axis_i,
                     int axis_j = -1, const FdOptions& opt = {});
double fd_laplacian(const ScalarField& f, const Vec5& x, const FdOptions& opt = {});
/// (d . grad)^2 f by the 1D stencil along d.
double fd_directional_second(const ScalarField& f, const Vec5& x, const Vec5& d,
                             const FdOptions& opt = {});
/// 4th-order derivative of a scalar function of one variable.
double fd_first_1d(const std::function<double(double)>& f, double x, double h);

// ---------------------------------------------------------------------------
// Regression

struct ExponentFit {
  std::vector<double> x, y;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Least-squares fit of log y = intercept + slope log x. Needs >= 4 points,
/// x strictly increasing, all values positive.
ExponentFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

/// n points geometric between a and b inclusive.
std::vector<double> geometric_grid(double a, double b, int n);

}  // namespace msol
