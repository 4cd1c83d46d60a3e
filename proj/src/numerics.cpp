#include "msol/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <atomic>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <map>
#include <mutex>
#include <thread>

#include "msol/error.hpp"

namespace msol {

namespace {

std::atomic<unsigned> g_workers{0};

constexpr std::size_t kChunk = 2048;

}  // namespace

unsigned worker_count() {
  const unsigned w = g_workers.load();
  if (w > 0) return w;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : std::min(hw, 32u);
}

void set_worker_count(unsigned n) { g_workers.store(n); }

namespace {

// Runs body(chunk) for every chunk index; each chunk is handled by exactly
// one thread and writes only its own slot.
void for_each_chunk(std::size_t chunks, const std::function<void(std::size_t)>& body) {
  const unsigned threads =
      static_cast<unsigned>(std::min<std::size_t>(worker_count(), chunks));
  if (threads <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) body(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= chunks) return;
      try {
        body(c);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!err) err = std::current_exception();
        next.store(chunks);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  for_each_chunk(chunks, [&](std::size_t c) {
    const std::size_t end = std::min(n, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) fn(i);
  });
}

double parallel_sum(std::size_t n, const std::function<double(std::size_t)>& fn) {
  return parallel_sums(n, 1, [&](std::size_t i, double* out) { out[0] = fn(i); })[0];
}

std::vector<double> parallel_sums(
    std::size_t n, std::size_t width,
    const std::function<void(std::size_t, double*)>& fn) {
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<double> partial(chunks * width, 0.0);
  for_each_chunk(chunks, [&](std::size_t c) {
    std::vector<CompensatedSum> acc(width);
    std::vector<double> buf(width);
    const std::size_t end = std::min(n, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      fn(i, buf.data());
      for (std::size_t k = 0; k < width; ++k) acc[k].add(buf[k]);
    }
    for (std::size_t k = 0; k < width; ++k) partial[c * width + k] = acc[k].value();
  });
  std::vector<double> out(width);
  for (std::size_t k = 0; k < width; ++k) {
    CompensatedSum s;
    for (std::size_t c = 0; c < chunks; ++c) s.add(partial[c * width + k]);
    out[k] = s.value();
  }
  return out;
}

double parallel_max(std::size_t n, const std::function<double(std::size_t)>& fn) {
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<double> partial(chunks, -std::numeric_limits<double>::infinity());
  for_each_chunk(chunks, [&](std::size_t c) {
    double m = -std::numeric_limits<double>::infinity();
    const std::size_t end = std::min(n, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      const double v = fn(i);
      if (std::isnan(v)) {
        m = v;
        break;
      }
      m = std::max(m, v);
    }
    partial[c] = m;
  });
  double m = -std::numeric_limits<double>::infinity();
  for (double v : partial) {
    if (std::isnan(v)) return v;
    m = std::max(m, v);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Gauss-Kronrod

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = kWgk[7] * fc, gauss = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double fsum = f(c - dx) + f(c + dx);
    kron += kWgk[j] * fsum;
    if (j % 2 == 1) gauss += kWg[j / 2] * fsum;
  }
  return {a, b, kron * h, std::abs((kron - gauss) * h)};
}

QuadResult adaptive(const std::function<double(double)>& f, double a, double b,
                    const RadialQuadOptions& opt) {
  std::vector<Panel> panels;
  constexpr int kInitial = 4;
  for (int i = 0; i < kInitial; ++i) {
    const double pa = a + (b - a) * i / kInitial;
    const double pb = i + 1 == kInitial ? b : a + (b - a) * (i + 1) / kInitial;
    panels.push_back(gk15(f, pa, pb));
  }
  long evals = 15L * kInitial;
  for (;;) {
    CompensatedSum v, e;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < panels.size(); ++i) {
      v.add(panels[i].value);
      e.add(panels[i].error);
      if (panels[i].error > panels[worst].error) worst = i;
    }
    const double value = v.value(), err = e.value();
    if (!std::isfinite(value) || !std::isfinite(err))
      fail(ErrorKind::numerical, "quadrature-failure", "non-finite integrand value");
    if (err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(value)))
      return {value, err, evals};
    if (static_cast<int>(panels.size()) >= opt.max_panels)
      fail(ErrorKind::numerical, "max-depth-exceeded",
           "panel budget exhausted with error estimate " + std::to_string(err));
    const Panel p = panels[worst];
    const double mid = 0.5 * (p.a + p.b);
    if (!(mid > p.a && mid < p.b))
      fail(ErrorKind::numerical, "max-depth-exceeded", "panel width underflow");
    panels[worst] = gk15(f, p.a, mid);
    panels.push_back(gk15(f, mid, p.b));
    evals += 30;
  }
}

}  // namespace

QuadResult radial_quad(const std::function<double(double)>& f, double a, double b,
                       const RadialQuadOptions& opt) {
  if (!(b >= a)) fail(ErrorKind::precondition, "bad-interval", "need a <= b");
  if (a == b) return {};
  if (std::isinf(b)) {
    if (a > 0.0) {
      auto g = [&](double s) {
        const double om = 1.0 - s;
        if (!(om > 0.0)) return 0.0;  // the point at infinity
        return f(a / om) * a / (om * om);
      };
      return adaptive(g, 0.0, 1.0, opt);
    }
    if (a < 0.0) fail(ErrorKind::precondition, "bad-interval", "semi-infinite range needs a >= 0");
    RadialQuadOptions half = opt;
    half.abs_tol = 0.5 * opt.abs_tol;
    const QuadResult head = adaptive(f, 0.0, 1.0, half);
    const QuadResult tail = radial_quad(f, 1.0, b, half);
    return {head.value + tail.value, head.error_estimate + tail.error_estimate,
            head.evaluations + tail.evaluations};
  }
  return adaptive(f, a, b, opt);
}

namespace {

// Golub-Welsch: eigen-decomposition of the symmetric Jacobi matrix.
void golub_welsch(int n, const std::function<double(int)>& offdiag, double mu0,
                  std::vector<double>& nodes, std::vector<double>& weights) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) j(i, i + 1) = j(i + 1, i) = offdiag(i + 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = es.eigenvalues()(i);
    const double v = es.eigenvectors()(0, i);
    weights[i] = mu0 * v * v;
  }
  // Enforce exact symmetry of the rule.
  for (int i = 0; i < n / 2; ++i) {
    const double x = 0.5 * (nodes[n - 1 - i] - nodes[i]);
    const double w = 0.5 * (weights[i] + weights[n - 1 - i]);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;
}

}  // namespace

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  golub_welsch(
      n, [](int k) { return k / std::sqrt(4.0 * k * k - 1.0); }, 2.0, nodes, weights);
}

void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  golub_welsch(
      n, [](int k) { return std::sqrt(0.5 * k); }, std::sqrt(std::numbers::pi), nodes,
      weights);
}

// ---------------------------------------------------------------------------
// Point sets

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double unit_double(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

double radical_inverse(std::uint64_t i, unsigned base) {
  const double inv = 1.0 / base;
  double f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

namespace {

constexpr std::array<unsigned, 16> kPrimes = {2,  3,  5,  7,  11, 13, 17, 19,
                                              23, 29, 31, 37, 41, 43, 47, 53};

std::vector<double> rotation(unsigned dim, std::uint64_t seed, double plain) {
  std::vector<double> s(dim, plain);
  if (seed == 0) return s;
  std::uint64_t state = seed;
  for (auto& v : s) v = unit_double(splitmix64(state));
  return s;
}

double wrap(double u) { return u - std::floor(u); }

}  // namespace

HaltonSequence::HaltonSequence(unsigned dim, std::uint64_t seed)
    : dim_(dim), shift_(rotation(dim, seed, 0.0)) {
  if (dim == 0 || dim > kPrimes.size())
    fail(ErrorKind::precondition, "bad-dimension", "Halton dimension out of range");
}

void HaltonSequence::point(std::uint64_t index, double* out) const {
  for (unsigned j = 0; j < dim_; ++j)
    out[j] = wrap(radical_inverse(index + 1, kPrimes[j]) + shift_[j]);
}

namespace {

// Korobov generators selected by minimising the P_2 figure of merit in five
// dimensions over random odd candidates.
const std::map<std::size_t, std::uint64_t>& korobov_table() {
  static const std::map<std::size_t, std::uint64_t> t = {
      {1u << 8, 61},     {1u << 9, 151},    {1u << 10, 189},   {1u << 11, 755},
      {1u << 12, 755},   {1u << 13, 1577},  {1u << 14, 2535},  {1u << 15, 11497},
      {1u << 16, 30639}, {1u << 17, 13135}, {1u << 18, 7895}};
  return t;
}

}  // namespace

bool KorobovLattice::supported(std::size_t n) { return korobov_table().count(n) > 0; }

KorobovLattice::KorobovLattice(std::size_t n, unsigned dim, std::uint64_t seed)
    : n_(n), dim_(dim), shift_(rotation(dim, seed, 0.5)) {
  const auto it = korobov_table().find(n);
  if (it == korobov_table().end())
    fail(ErrorKind::precondition, "bad-count",
         "lattice size must be a power of two in [2^8, 2^18]");
  std::uint64_t g = 1;
  for (unsigned j = 0; j < dim; ++j) {
    gen_.push_back(g);
    g = (g * it->second) % n;
  }
}

void KorobovLattice::point(std::uint64_t index, double* out) const {
  for (unsigned j = 0; j < dim_; ++j) {
    const std::uint64_t k = (index % n_) * gen_[j] % n_;
    out[j] = wrap(static_cast<double>(k) / static_cast<double>(n_) + shift_[j]);
  }
}

Vec5 sphere_map(const double* u) {
  // Last coordinate has density proportional to 1 - z^2 on S^4; its CDF
  // inverts through the trigonometric solution of the depressed cubic.
  const double z = 2.0 * std::sin(std::asin(std::clamp(2.0 * u[0] - 1.0, -1.0, 1.0)) / 3.0);
  const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
  const double s = u[1];
  const double a = 2.0 * std::numbers::pi * u[2];
  const double b = 2.0 * std::numbers::pi * u[3];
  const double p = rho * std::sqrt(s), q = rho * std::sqrt(1.0 - s);
  return Vec5{{p * std::cos(a), p * std::sin(a), q * std::cos(b), q * std::sin(b), z}};
}

namespace {

// Real root of x^(d+1) = x + 1.
double harmonious(unsigned d) {
  double x = 2.0;
  for (int it = 0; it < 200; ++it) x = std::pow(1.0 + x, 1.0 / (d + 1.0));
  return x;
}

std::vector<double> kronecker_alpha(unsigned d) {
  const double g = harmonious(d);
  std::vector<double> a(d);
  for (unsigned j = 0; j < d; ++j) a[j] = wrap(std::pow(1.0 / g, j + 1.0));
  return a;
}

double normal_quantile(double u) {
  u = std::clamp(u, 1e-300, 1.0 - 1e-16);
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
}

}  // namespace

std::vector<Vec5> sphere_points(std::size_t count, std::uint64_t seed) {
  if (count < 2 || count % 2 != 0)
    fail(ErrorKind::precondition, "bad-count", "sphere sample count must be even");
  const auto alpha = kronecker_alpha(4);
  const auto s0 = rotation(4, seed, 0.5);
  std::vector<Vec5> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count / 2; ++i) {
    double u[4];
    for (int j = 0; j < 4; ++j) u[j] = wrap(s0[j] + static_cast<double>(i) * alpha[j]);
    const Vec5 w = sphere_map(u);
    out.push_back(w);
    out.push_back(-w);
  }
  return out;
}

std::vector<std::vector<double>> sphere_points_nd(unsigned dim, std::size_t count,
                                                  std::uint64_t seed) {
  if (dim == 0 || count < 2 || count % 2 != 0)
    fail(ErrorKind::precondition, "bad-count", "need dim >= 1 and an even count");
  std::vector<std::vector<double>> out;
  out.reserve(count);
  if (dim == 1) {
    for (std::size_t i = 0; i < count / 2; ++i) {
      out.push_back({1.0});
      out.push_back({-1.0});
    }
    return out;
  }
  const auto alpha = kronecker_alpha(dim);
  const auto s0 = rotation(dim, seed, 0.5);
  for (std::size_t i = 0; i < count / 2; ++i) {
    std::vector<double> g(dim);
    double n2 = 0.0;
    for (unsigned j = 0; j < dim; ++j) {
      g[j] = normal_quantile(wrap(s0[j] + static_cast<double>(i + 1) * alpha[j]));
      n2 += g[j] * g[j];
    }
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& v : g) v *= inv;
    std::vector<double> m(g);
    for (auto& v : m) v = -v;
    out.push_back(std::move(g));
    out.push_back(std::move(m));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Region maps

namespace {

class PointSource {
 public:
  PointSource(const Sampler& s, std::size_t n) : kind_(s.kind) {
    if (kind_ == SamplerKind::lattice)
      lattice_.emplace(n, 5, s.seed);
    else
      halton_.emplace(5, s.seed);
  }
  void point(std::uint64_t i, double* u) const {
    if (lattice_)
      lattice_->point(i, u);
    else
      halton_->point(i, u);
  }

 private:
  SamplerKind kind_;
  std::optional<HaltonSequence> halton_;
  std::optional<KorobovLattice> lattice_;
};

// Truncated-normal axis map: returns x - mid and the Jacobian dx/du.
struct AxisNormal {
  double lo, hi, scale, plo, width;
  AxisNormal(double lo_, double hi_, double s) : lo(lo_), hi(hi_), scale(s) {
    plo = 0.5 * std::erfc(-lo / (s * std::numbers::sqrt2));
    const double phi = 0.5 * std::erfc(-hi / (s * std::numbers::sqrt2));
    width = phi - plo;
  }
  // Lower and upper halves are evaluated from their own tails, so a box
  // symmetric about its midpoint maps u and 1 - u to exact negatives.
  std::pair<double, double> map(double u) const {
    double z;
    if (u <= 0.5) {
      const double p = plo + width * u;
      z = -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
    } else {
      const double pu = 0.5 * std::erfc(hi / (scale * std::numbers::sqrt2));
      const double p = pu + width * (1.0 - u);
      z = std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
    }
    z = std::clamp(z, lo / scale, hi / scale);
    const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    return {scale * z, width * scale / pdf};
  }
};

struct MappedPoint {
  Vec5 x, mirror;
  double jac = 1.0;
};

class RegionMap {
 public:
  explicit RegionMap(const Region& r) : region_(r) {
    if (const auto* b = std::get_if<Box>(&r)) {
      for (int j = 0; j < 5; ++j) {
        if (!(b->hi[j] > b->lo[j]))
          fail(ErrorKind::precondition, "bad-region", "empty box");
        mid_[j] = 0.5 * (b->lo[j] + b->hi[j]);
      }
      if (!b->normal_scale.empty()) {
        if (b->normal_scale.size() != 5)
          fail(ErrorKind::precondition, "bad-region", "normal_scale needs 5 entries");
        for (int j = 0; j < 5; ++j)
          axes_.emplace_back(b->lo[j] - mid_[j], b->hi[j] - mid_[j], b->normal_scale[j]);
      }
    } else if (const auto* b = std::get_if<Ball>(&r)) {
      if (!(b->radius > 0.0)) fail(ErrorKind::precondition, "bad-region", "radius <= 0");
    } else {
      const auto& s = std::get<Shell>(r);
      if (!(s.r_out > s.r_in && s.r_in >= 0.0))
        fail(ErrorKind::precondition, "bad-region", "need 0 <= r_in < r_out");
    }
  }

  MappedPoint map(const double* u) const {
    MappedPoint p;
    if (const auto* b = std::get_if<Box>(&region_)) {
      for (int j = 0; j < 5; ++j) {
        if (axes_.empty()) {
          const double h = b->hi[j] - b->lo[j];
          p.x[j] = b->lo[j] + h * u[j];
          p.mirror[j] = b->hi[j] - h * u[j];
          p.jac *= h;
        } else {
          const auto [dx, jac] = axes_[j].map(u[j]);
          const auto [mx, mjac] = axes_[j].map(1.0 - u[j]);
          p.x[j] = mid_[j] + dx;
          p.mirror[j] = mid_[j] + mx;
          p.jac *= jac;
          (void)mjac;
        }
      }
      return p;
    }
    Vec5 c;
    double r0, r1;
    if (const auto* b = std::get_if<Ball>(&region_)) {
      c = b->center;
      r0 = 0.0;
      r1 = b->radius;
    } else {
      const auto& s = std::get<Shell>(region_);
      c = s.center;
      r0 = s.r_in;
      r1 = s.r_out;
    }
    const double r0_5 = std::pow(r0, 5), r1_5 = std::pow(r1, 5);
    const double r = std::pow(r0_5 + u[0] * (r1_5 - r0_5), 0.2);
    const Vec5 w = sphere_map(u + 1);
    p.x = c + r * w;
    p.mirror = c - r * w;
    p.jac = kSphereArea4 / 5.0 * (r1_5 - r0_5);
    return p;
  }

  // Jacobian at the mirrored point (equal for all supported maps except the
  // asymmetric truncated normal).
  double mirror_jac(const double* u) const {
    if (axes_.empty()) return map(u).jac;
    double j = 1.0;
    for (int k = 0; k < 5; ++k) j *= axes_[k].map(1.0 - u[k]).second;
    return j;
  }

  std::vector<Vec5> boundary_points(std::size_t n) const {
    std::vector<Vec5> out;
    HaltonSequence h(5, 0);
    for (std::size_t i = 0; i < n; ++i) {
      double u[5];
      h.point(i, u);
      if (const auto* b = std::get_if<Box>(&region_)) {
        Vec5 x;
        for (int j = 0; j < 5; ++j) x[j] = b->lo[j] + (b->hi[j] - b->lo[j]) * u[j];
        const int face = static_cast<int>(i % 10);
        x[face / 2] = face % 2 == 0 ? b->lo[face / 2] : b->hi[face / 2];
        out.push_back(x);
      } else {
        Vec5 c;
        double r;
        if (const auto* b = std::get_if<Ball>(&region_)) {
          c = b->center;
          r = b->radius;
        } else {
          c = std::get<Shell>(region_).center;
          r = std::get<Shell>(region_).r_out;
        }
        out.push_back(c + r * sphere_map(u + 1));
      }
    }
    return out;
  }

 private:
  Region region_;
  Vec5 mid_;
  std::vector<AxisNormal> axes_;
};

}  // namespace

QuadResult qmc_integrate(const std::function<double(const Vec5&)>& f,
                         const Region& region, const QmcOptions& opt) {
  const std::size_t n = opt.sampler.count;
  if (n < 16) fail(ErrorKind::precondition, "bad-count", "sample count must be >= 16");
  const RegionMap rm(region);
  if (opt.boundary_tolerance) {
    double worst = 0.0;
    for (const auto& x : rm.boundary_points(512)) worst = std::max(worst, std::abs(f(x)));
    if (worst > *opt.boundary_tolerance)
      fail(ErrorKind::numerical, "boundary-mass-detected",
           "integrand reaches " + std::to_string(worst) + " on the region boundary");
  }
  const bool lattice = opt.sampler.kind == SamplerKind::lattice;
  const bool anti = opt.antithetic && !lattice;
  const std::size_t base = anti ? n / 2 : n;
  const PointSource src(opt.sampler, lattice ? n : base);

  // Lattice: the even-index points are the embedded half rule. Otherwise the
  // leading half of the sequence is.
  auto in_half = [&](std::size_t i) { return lattice ? i % 2 == 0 : i < base / 2; };
  const auto sums = parallel_sums(base, 2, [&](std::size_t i, double* out) {
    double u[5];
    src.point(i, u);
    const MappedPoint p = rm.map(u);
    double v = f(p.x) * p.jac;
    if (anti) v = 0.5 * (v + f(p.mirror) * rm.mirror_jac(u));
    out[0] = v;
    out[1] = in_half(i) ? v : 0.0;
  });
  const double half_n = lattice ? static_cast<double>((base + 1) / 2)
                                : static_cast<double>(base / 2);
  const double q = sums[0] / static_cast<double>(base);
  const double qh = sums[1] / half_n;
  if (!std::isfinite(q))
    fail(ErrorKind::numerical, "quadrature-failure", "non-finite QMC mean");
  return {q, std::abs(q - qh), static_cast<long>(anti ? 2 * base : base)};
}

std::vector<Vec5> region_points(const Region& region, const Sampler& sampler) {
  const RegionMap rm(region);
  const PointSource src(sampler, sampler.count);
  std::vector<Vec5> out(sampler.count);
  for (std::size_t i = 0; i < sampler.count; ++i) {
    double u[5];
    src.point(i, u);
    out[i] = rm.map(u).x;
  }
  return out;
}

std::vector<Vec5> log_radial_points(const Vec5& center, double r_min, double radius,
                                    const Sampler& sampler) {
  if (!(radius > r_min && r_min > 0.0))
    fail(ErrorKind::precondition, "bad-region", "need 0 < r_min < radius");
  const PointSource src(sampler, sampler.count);
  std::vector<Vec5> out(sampler.count);
  const double lr = std::log(radius / r_min);
  for (std::size_t i = 0; i < sampler.count; ++i) {
    double u[5];
    src.point(i, u);
    out[i] = center + r_min * std::exp(lr * u[0]) * sphere_map(u + 1);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cubature

Cubature gauss_hermite_rule(const Vec5& center, const Vec5& scales, int n) {
  std::vector<double> t, w;
  gauss_hermite(n, t, w);
  std::vector<double> wt(n);
  for (int i = 0; i < n; ++i) wt[i] = w[i] * std::exp(t[i] * t[i]);
  Cubature c;
  std::size_t total = 1;
  for (int j = 0; j < 5; ++j) total *= static_cast<std::size_t>(n);
  c.nodes.resize(total);
  c.weights.resize(total);
  double vol = 1.0;
  for (int j = 0; j < 5; ++j) vol *= scales[j];
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t r = k;
    double weight = vol;
    Vec5 x;
    for (int j = 0; j < 5; ++j) {
      const std::size_t idx = r % n;
      r /= n;
      x[j] = center[j] + scales[j] * t[idx];
      weight *= wt[idx];
    }
    c.nodes[k] = x;
    c.weights[k] = weight;
  }
  return c;
}

Cubature polar_rule(const Vec5& center, double r_max, int radial_panels,
                    int nodes_per_panel, std::size_t directions, std::uint64_t seed) {
  std::vector<double> t, w;
  gauss_legendre(nodes_per_panel, t, w);
  // Panel edges: [0, e_1], then geometric up to r_max.
  std::vector<double> edges{0.0};
  const double first = std::min(1.0, r_max / 4.0);
  if (radial_panels <= 1) {
    edges.push_back(r_max);
  } else {
    const double ratio = std::pow(r_max / first, 1.0 / (radial_panels - 1));
    for (int p = 0; p < radial_panels; ++p) edges.push_back(first * std::pow(ratio, p));
    edges.back() = r_max;
  }
  const auto dirs = sphere_points(directions, seed);
  const double dw = kSphereArea4 / static_cast<double>(dirs.size());
  Cubature c;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double a = edges[p], b = edges[p + 1];
    for (int i = 0; i < nodes_per_panel; ++i) {
      const double r = 0.5 * (a + b) + 0.5 * (b - a) * t[i];
      const double rw = 0.5 * (b - a) * w[i] * std::pow(r, 4) * dw;
      for (const auto& d : dirs) {
        c.nodes.push_back(center + r * d);
        c.weights.push_back(rw);
      }
    }
  }
  return c;
}

double apply_rule(const Cubature& rule, const std::function<double(const Vec5&)>& f) {
  return parallel_sum(rule.size(),
                      [&](std::size_t i) { return rule.weights[i] * f(rule.nodes[i]); });
}

std::vector<double> apply_rule(const Cubature& rule, std::size_t width,
                               const std::function<void(const Vec5&, double*)>& f) {
  return parallel_sums(rule.size(), width, [&](std::size_t i, double* out) {
    f(rule.nodes[i], out);
    for (std::size_t k = 0; k < width; ++k) out[k] *= rule.weights[i];
  });
}

// ---------------------------------------------------------------------------
// Finite differences

double fd_step(const Vec5& x, const FdOptions& opt) {
  const double scale = opt.relative ? std::max(1.0, norm(x)) : 1.0;
  const double h = opt.h * scale;
  if (!(h > 0.0) || h < 1e-7 * std::max(1.0, norm(x)))
    fail(ErrorKind::precondition, "step-underflow",
         "finite-difference step too small relative to |x|");
  return h;
}

double fd_first_1d(const std::function<double(double)>& f, double x, double h) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

double fd_first(const ScalarField& f, const Vec5& x, int i, const FdOptions& opt) {
  const double h = fd_step(x, opt);
  const Vec5 e = Vec5::unit(i, h);
  return (-f(x + 2.0 * e) + 8 * f(x + e) - 8 * f(x - e) + f(x - 2.0 * e)) / (12 * h);
}

double fd_second(const ScalarField& f, const Vec5& x, int i, int j, const FdOptions& opt) {
  const double h = fd_step(x, opt);
  if (i == j) {
    const Vec5 e = Vec5::unit(i, h);
    return (-f(x + 2.0 * e) + 16 * f(x + e) - 30 * f(x) + 16 * f(x - e) - f(x - 2.0 * e)) /
           (12 * h * h);
  }
  static constexpr std::array<std::pair<int, double>, 4> c = {
      {{-2, 1.0}, {-1, -8.0}, {1, 8.0}, {2, -1.0}}};
  CompensatedSum s;
  for (const auto& [a, ca] : c)
    for (const auto& [b, cb] : c)
      s.add(ca * cb * f(x + Vec5::unit(i, a * h) + Vec5::unit(j, b * h)));
  return s.value() / (144 * h * h);
}

double fd_derivative(const ScalarField& f, const Vec5& x, int order, int axis_i, int axis_j,
                     const FdOptions& opt) {
  if (order == 1) return fd_first(f, x, axis_i, opt);
  if (order == 2) return fd_second(f, x, axis_i, axis_j < 0 ? axis_i : axis_j, opt);
  fail(ErrorKind::precondition, "bad-order", "order must be 1 or 2");
}

double fd_laplacian(const ScalarField& f, const Vec5& x, const FdOptions& opt) {
  const double h = fd_step(x, opt);
  const double f0 = f(x);
  CompensatedSum s;
  for (int i = 0; i < 5; ++i) {
    const Vec5 e = Vec5::unit(i, h);
    s.add(-f(x + 2.0 * e) + 16 * f(x + e) - 30 * f0 + 16 * f(x - e) - f(x - 2.0 * e));
  }
  return s.value() / (12 * h * h);
}

double fd_directional_second(const ScalarField& f, const Vec5& x, const Vec5& d,
                             const FdOptions& opt) {
  const double nd = norm(d);
  if (nd == 0.0) return 0.0;
  const double h = fd_step(x, opt);
  const Vec5 e = d * (h / nd);
  const double v =
      (-f(x + 2.0 * e) + 16 * f(x + e) - 30 * f(x) + 16 * f(x - e) - f(x - 2.0 * e)) /
      (12 * h * h);
  return v * nd * nd;
}

// ---------------------------------------------------------------------------
// Regression

ExponentFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 4)
    fail(ErrorKind::precondition, "too-few-points", "fit needs at least 4 points");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(x[i]) || !std::isfinite(y[i]))
      fail(ErrorKind::precondition, "nonpositive-data", "log-log fit needs positive data");
    if (i > 0 && !(x[i] > x[i - 1]))
      fail(ErrorKind::precondition, "unsorted", "x must be strictly increasing");
  }
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx, dy = std::log(y[i]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  ExponentFit fit;
  fit.x = x;
  fit.y = y;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

std::vector<double> geometric_grid(double a, double b, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i)
    g[i] = i + 1 == n ? b : a * std::pow(b / a, static_cast<double>(i) / (n - 1));
  return g;
}

}  // namespace msol
