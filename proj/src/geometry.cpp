#include "msol/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "msol/error.hpp"

namespace msol {

namespace {

double glue(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }
double glue_prime(double s) { return s > 0.0 ? std::exp(-1.0 / s) / (s * s) : 0.0; }

}  // namespace

double Mollifier::value(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  const double a = glue(2.0 - r), b = glue(r - 1.0);
  return a / (a + b);
}

double Mollifier::derivative(double r) {
  if (r <= 1.0 || r >= 2.0) return 0.0;
  const double a = glue(2.0 - r), b = glue(r - 1.0);
  const double da = -glue_prime(2.0 - r), db = glue_prime(r - 1.0);
  return (da * b - a * db) / ((a + b) * (a + b));
}

WeightBundle::WeightBundle(const SolitonFamily& family)
    : family_(family), alpha_(family.alpha), L_(family.cone_speed) {
  if (!(L_ > 0.0 && L_ < 1.0))
    fail(ErrorKind::precondition, "unvalidated-family", "cone speed not set");
}

ThetaRho WeightBundle::theta_rho(double t, const Vec5& x) const {
  const double r = norm(x);
  if (r < L_ * t) return {1.0, t};
  return {std::pow(L_ * t / r, alpha_), std::pow(t, alpha_) * std::pow(r / L_, 1.0 - alpha_)};
}

double WeightBundle::q(std::size_t k, double t, const Vec5& x) const {
  return 1.0 / std::sqrt(1.0 + norm2(x - family_.center(k, t)));
}

WeightSample WeightBundle::eval(double t, const Vec5& x) const {
  const std::size_t K = family_.size();
  WeightSample w;
  const double r = norm(x);
  const auto tr = theta_rho(t, x);
  w.theta = tr.theta;
  w.rho = tr.rho;
  if (r >= L_ * t) {
    w.grad_theta = x * (-alpha_ * w.theta / (r * r));
    w.dt_theta = alpha_ * w.theta / t;
  }
  w.q.resize(K);
  w.qa.resize(K);
  std::vector<Vec5> gqa(K);
  std::vector<double> dqa(K);
  for (std::size_t k = 0; k < K; ++k) {
    const Vec5 d = x - family_.center(k, t);
    w.q[k] = 1.0 / std::sqrt(1.0 + norm2(d));
    w.qa[k] = std::pow(w.q[k], alpha_);
    gqa[k] = d * (-alpha_ * std::pow(w.q[k], alpha_ + 2.0));
    dqa[k] = -dot(family_.solitons[k].speed, gqa[k]);
    w.q_sum += w.q[k];
  }
  w.psi = 1.0;
  for (std::size_t k = 0; k < K; ++k) w.psi *= 1.0 - w.qa[k];
  for (std::size_t k = 0; k < K; ++k) {
    double others = 1.0;
    for (std::size_t m = 0; m < K; ++m)
      if (m != k) others *= 1.0 - w.qa[m];
    w.grad_psi -= gqa[k] * others;
    w.dt_psi -= dqa[k] * others;
  }
  w.phi = w.theta * w.psi;
  w.grad_phi = w.grad_theta * w.psi + w.grad_psi * w.theta;
  w.dt_phi = w.dt_theta * w.psi + w.dt_psi * w.theta;
  return w;
}

double WeightBundle::phi_k(std::size_t k, double t, const Vec5& x) const {
  const double s = std::pow(t, -1.0 + alpha_ / 2.0);
  return Mollifier::value(s * norm(x - family_.center(k, t)));
}

Vec5 WeightBundle::grad_phi_k(std::size_t k, double t, const Vec5& x) const {
  const double s = std::pow(t, -1.0 + alpha_ / 2.0);
  const Vec5 z = (x - family_.center(k, t)) * s;
  const double rz = norm(z);
  if (rz <= 1.0 || rz >= 2.0) return {};
  return z * (s * Mollifier::derivative(rz) / rz);
}

double WeightBundle::dt_phi_k(std::size_t k, double t, const Vec5& x) const {
  const double s = std::pow(t, -1.0 + alpha_ / 2.0);
  const double ds = (-1.0 + alpha_ / 2.0) * s / t;
  const Vec5 d = x - family_.center(k, t);
  const Vec5 z = d * s;
  const double rz = norm(z);
  if (rz <= 1.0 || rz >= 2.0) return 0.0;
  const Vec5 grad = z * (Mollifier::derivative(rz) / rz);
  return dot(grad, d * ds - family_.solitons[k].speed * s);
}

Vec5 WeightBundle::f_k(std::size_t k, double t) const {
  const auto& sk = family_.solitons[k];
  Vec5 f = sk.center;
  for (std::size_t m = 0; m < family_.size(); ++m) {
    if (m == k) continue;
    const auto& sm = family_.solitons[m];
    const Vec5 D = (sk.speed - sm.speed) * t + (sk.center - sm.center);
    f -= D * std::pow(1.0 + norm2(D), -alpha_ / 2.0);
  }
  return f;
}

Vec5 WeightBundle::df_k(std::size_t k, double t) const {
  const auto& sk = family_.solitons[k];
  Vec5 df;
  for (std::size_t m = 0; m < family_.size(); ++m) {
    if (m == k) continue;
    const auto& sm = family_.solitons[m];
    const Vec5 dl = sk.speed - sm.speed;
    const Vec5 D = dl * t + (sk.center - sm.center);
    const double q = 1.0 / std::sqrt(1.0 + norm2(D));
    const double qa = std::pow(q, alpha_);
    const double dqa = -alpha_ * std::pow(q, alpha_ + 2.0) * dot(D, dl);
    df -= dl * qa + D * dqa;
  }
  return df;
}

bool WeightBundle::supports_overlap(double t) const {
  const double s = std::pow(t, -1.0 + alpha_ / 2.0);
  for (std::size_t k = 0; k < family_.size(); ++k)
    for (std::size_t m = 0; m < family_.size(); ++m)
      if (m != k && s * norm(family_.center(k, t) - family_.center(m, t)) < 2.0) return true;
  return false;
}

Vec5 WeightBundle::chi(double t, const Vec5& x) const {
  if (supports_overlap(t))
    fail(ErrorKind::precondition, "support-overlap",
         "a soliton centre lies in another cutoff support at t = " + std::to_string(t));
  return chi_full(t, x).value;
}

ChiSample WeightBundle::chi_full(double t, const Vec5& x) const {
  const std::size_t K = family_.size();
  const double r = norm(x);
  const auto tr = theta_rho(t, x);
  Vec5 grad_theta;
  double dt_theta = 0.0;
  if (r >= L_ * t) {
    grad_theta = x * (-alpha_ * tr.theta / (r * r));
    dt_theta = alpha_ * tr.theta / t;
  }
  // V = x - sum_k (d_k q_k^alpha + f_k phi_k), chi = V Theta.
  Vec5 V = x;
  Mat5 dV;  // dV(i, j) = d_i V_j
  for (int i = 0; i < 5; ++i) dV(i, i) = 1.0;
  Vec5 dtV;
  for (std::size_t k = 0; k < K; ++k) {
    const Vec5& l = family_.solitons[k].speed;
    const Vec5 d = x - family_.center(k, t);
    const double q = 1.0 / std::sqrt(1.0 + norm2(d));
    const double qa = std::pow(q, alpha_);
    const Vec5 gqa = d * (-alpha_ * std::pow(q, alpha_ + 2.0));
    const double dtqa = -dot(l, gqa);
    const Vec5 f = f_k(k, t);
    const double ph = phi_k(k, t, x);
    const Vec5 gph = grad_phi_k(k, t, x);
    const double dtph = dt_phi_k(k, t, x);
    V -= d * qa + f * ph;
    for (int i = 0; i < 5; ++i) {
      dV(i, i) -= qa;
      for (int j = 0; j < 5; ++j) dV(i, j) -= d[j] * gqa[i] + f[j] * gph[i];
    }
    dtV -= l * (-qa) + d * dtqa + df_k(k, t) * ph + f * dtph;
  }
  ChiSample c;
  c.value = V * tr.theta;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) c.jacobian(i, j) = dV(i, j) * tr.theta + V[j] * grad_theta[i];
  c.dt = dtV * tr.theta + V * dt_theta;
  return c;
}

std::vector<Vec5> geometry_sample_points(const SolitonFamily& family, double t,
                                         std::size_t per_region, std::uint64_t seed) {
  const double L = family.cone_speed;
  std::vector<Vec5> pts;
  std::uint64_t region = 0;
  auto sampler = [&] {
    Sampler s;
    s.count = per_region;
    s.seed = seed * 1000 + (++region);
    return s;
  };
  auto append = [&](const std::vector<Vec5>& v) { pts.insert(pts.end(), v.begin(), v.end()); };
  for (std::size_t k = 0; k < family.size(); ++k) {
    const Vec5 c = family.center(k, t);
    const double rb = family.sigma_geo * t;
    if (rb > 2e-3) append(log_radial_points(c, 1e-3, rb, sampler()));
    append(log_radial_points(c, 1e-3, std::max(t / 4.0, 2e-3), sampler()));
  }
  append(region_points(Ball{{}, L * t}, sampler()));
  append(region_points(Shell{{}, L * t / 2.0, 4.0 * L * t}, sampler()));
  append(region_points(Shell{{}, 4.0 * L * t, 40.0 * L * t}, sampler()));
  return pts;
}

namespace {

enum RatioSlot {
  kPkGrad, kPkTime, kPkSecond, kPhGrad, kPhTime, kGgDiag, kGgOff, kGgTime, kCl, kSlots
};

constexpr std::array<const char*, kSlots> kSlotNames = {
    "pk_grad", "pk_time", "pk_second", "ph_grad", "ph_time",
    "gg_diag", "gg_offdiag", "gg_time", "cl"};

double slot(const BoundRatios& b, int s) {
  switch (s) {
    case kPkGrad: return b.pk_grad;
    case kPkTime: return b.pk_time;
    case kPkSecond: return b.pk_second;
    case kPhGrad: return b.ph_grad;
    case kPhTime: return b.ph_time;
    case kGgDiag: return b.gg_diag;
    case kGgOff: return b.gg_offdiag;
    case kGgTime: return b.gg_time;
    default: return b.cl;
  }
}

}  // namespace

BoundRatios geometry_ratios(const WeightBundle& bundle, double t, std::size_t per_region,
                            std::uint64_t seed) {
  const auto& fam = bundle.family();
  const std::size_t K = fam.size();
  const double a = bundle.alpha();
  const auto pts = geometry_sample_points(fam, t, per_region, seed);
  std::vector<std::array<double, kSlots>> vals(pts.size());
  parallel_for(pts.size(), [&](std::size_t n) {
    const Vec5& x = pts[n];
    auto& v = vals[n];
    v.fill(0.0);
    const WeightSample w = bundle.eval(t, x);
    for (std::size_t k = 0; k < K; ++k) {
      const Vec5 d = x - fam.center(k, t);
      const double q = w.q[k];
      const double qa1 = std::pow(q, 1.0 + a), qa2 = std::pow(q, 2.0 + a);
      const Vec5 g = d * (-a * qa2);
      v[kPkTime] = std::max(v[kPkTime], std::abs(dot(fam.solitons[k].speed, g)) / (a * qa1));
      for (int j = 0; j < 5; ++j) {
        v[kPkGrad] = std::max(v[kPkGrad], std::abs(g[j]) / (a * qa1));
        const double d2 = -a * qa2 + a * (2.0 + a) * d[j] * d[j] * std::pow(q, 4.0 + a);
        v[kPkSecond] = std::max(v[kPkSecond], std::abs(d2) / (a * qa2));
      }
    }
    for (int j = 0; j < 5; ++j)
      v[kPhGrad] = std::max(v[kPhGrad], std::abs(w.grad_phi[j]) / (a * w.theta * w.q_sum));
    v[kPhTime] = std::abs(w.dt_phi) / (a * w.theta * (1.0 / t + w.q_sum));

    const ChiSample c = bundle.chi_full(t, x);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        if (i == j)
          v[kGgDiag] = std::max(v[kGgDiag], std::abs(c.jacobian(j, j) - w.phi) / (a * w.theta));
        else
          v[kGgOff] = std::max(v[kGgOff], std::abs(c.jacobian(i, j)) / (a * w.theta));
      }
    Vec5 drift;
    for (std::size_t k = 0; k < K; ++k) drift += fam.solitons[k].speed * w.qa[k];
    v[kGgTime] = norm(c.dt - drift) / (a * w.rho / t);
    for (std::size_t k = 0; k < K; ++k) {
      const Vec5 d = x - fam.center(k, t);
      if (norm(d) >= fam.sigma_geo * t) continue;
      const double q = w.q[k];
      const double rhs = std::min(a / (q * q), 1.0) / q;
      v[kCl] = std::max(v[kCl], norm(c.value - fam.solitons[k].speed * t) / rhs);
    }
  });
  std::array<double, kSlots> sup{};
  for (const auto& v : vals)
    for (int s = 0; s < kSlots; ++s) sup[s] = std::max(sup[s], std::isfinite(v[s]) ? v[s] : INFINITY);
  BoundRatios b;
  b.t = t;
  b.overlap = bundle.supports_overlap(t);
  b.pk_grad = sup[kPkGrad];
  b.pk_time = sup[kPkTime];
  b.pk_second = sup[kPkSecond];
  b.ph_grad = sup[kPhGrad];
  b.ph_time = sup[kPhTime];
  b.gg_diag = sup[kGgDiag];
  b.gg_offdiag = sup[kGgOff];
  b.gg_time = sup[kGgTime];
  b.cl = sup[kCl];
  for (std::size_t k = 0; k < K; ++k) {
    const Vec5 c = bundle.chi_full(t, fam.center(k, t)).value;
    b.chi_anchor = std::max(b.chi_anchor, norm(c - fam.solitons[k].speed * t) / t);
  }
  return b;
}

VerificationReport verify_geometry_bounds(const SolitonFamily& family,
                                          const std::vector<double>& t_grid,
                                          std::size_t per_region, std::uint64_t seed,
                                          double stability, double anchor_tol) {
  VerificationReport rep;
  rep.suite = "geometry";
  const WeightBundle bundle(family);
  std::vector<BoundRatios> rows;
  for (double t : t_grid) rows.push_back(geometry_ratios(bundle, t, per_region, seed));

  auto& series = rep.data["ratios"];
  series = nlohmann::ordered_json::array();
  double anchor = 0.0;
  for (const auto& b : rows) {
    nlohmann::ordered_json row;
    row["t"] = b.t;
    row["support_overlap"] = b.overlap;
    for (int s = 0; s < kSlots; ++s) row[kSlotNames[s]] = slot(b, s);
    row["chi_anchor"] = b.chi_anchor;
    series.push_back(row);
    anchor = std::max(anchor, b.chi_anchor);
    rep.add_flag("supports-disjoint.t=" + std::to_string(static_cast<long long>(b.t)),
                 !b.overlap, "cutoff supports must not reach other centres");
  }
  rep.add_le("chi-anchor", anchor, anchor_tol, "max_k |chi(c_k) - l_k t| / t");
  for (int s = 0; s < kSlots; ++s) {
    double lo = INFINITY, hi = 0.0;
    for (const auto& b : rows) {
      lo = std::min(lo, slot(b, s));
      hi = std::max(hi, slot(b, s));
    }
    const double spread = (hi == 0.0) ? 1.0 : hi / lo;
    rep.add_le(std::string("stability.") + kSlotNames[s], spread, stability,
               "max/min over the t-grid of the sup ratio");
  }
  rep.flags.push_back("sup over sampled points per region");
  rep.flags.push_back("derivative of Theta one-sided at |x| = Lt");
  return rep;
}

namespace {

// Positive roots of |c + r w|^2 = R^2.
std::vector<double> sphere_crossings(const Vec5& c, const Vec5& w, double R) {
  const double b = dot(c, w), cc = norm2(c) - R * R;
  const double disc = b * b - cc;
  std::vector<double> out;
  if (disc <= 0.0) return out;
  const double s = std::sqrt(disc);
  for (double r : {-b - s, -b + s})
    if (r > 0.0) out.push_back(r);
  return out;
}

}  // namespace

QuadResult weighted_q_norm2(const SolitonFamily& family, double t, double p,
                            std::size_t directions) {
  const WeightBundle bundle(family);
  const std::size_t K = family.size();
  const double L = family.cone_speed;
  const auto dirs = sphere_points(directions, 7);
  std::vector<Vec5> centers(K);
  for (std::size_t k = 0; k < K; ++k) centers[k] = family.center(k, t);

  const double beta = family.alpha - (6.0 - 2.0 * p);
  if (!(beta > 0.0))
    fail(ErrorKind::precondition, "divergent-norm", "rho q^{2p} is not integrable");

  // Partition-of-unity weight of soliton k, rho, and r q where r = |x - c_k|.
  struct Parts {
    double wk, rho, qr;
  };
  auto parts = [&](std::size_t k, const Vec5& x, double r) {
    double qs = 0.0, wsum = 0.0;
    const double dk2 = 1.0 + norm2(x - centers[k]);
    for (std::size_t m = 0; m < K; ++m) {
      const double dm2 = 1.0 + norm2(x - centers[m]);
      qs += r / std::sqrt(dm2);
      wsum += std::pow(dk2 / dm2, 4);
    }
    return Parts{1.0 / wsum, bundle.theta_rho(t, x).rho, qs};
  };

  RadialQuadOptions opt;
  opt.rel_tol = 1e-9;
  const std::size_t half = directions / 2;
  const auto sums = parallel_sums(K * directions, 2, [&](std::size_t n, double* out) {
    const std::size_t k = n / directions, i = n % directions;
    const Vec5& c = centers[k];
    const Vec5& w = dirs[i];
    auto g = [&](double r) {
      const auto pr = parts(k, c + r * w, 1.0);
      return std::pow(r, 4) * pr.wk * pr.rho * std::pow(pr.qr, 2.0 * p);
    };
    std::vector<double> br = sphere_crossings(c, w, L * t);
    const double tail = 2.0 * (L * t + norm(c));
    double acc = 0.0, a = 0.0;
    br.push_back(tail);
    for (double b : br) {
      acc += radial_quad(g, a, b, opt).value;
      a = b;
    }
    // Beyond `tail` the ray lies outside the cone; with u = r^{-beta} the
    // integrand tends to a constant as u -> 0.
    acc += radial_quad(
               [&](double u) {
                 const double r = std::min(std::pow(u, -1.0 / beta), 1e100);
                 const auto pr = parts(k, c + r * w, r);
                 return pr.wk * pr.rho * std::pow(r, family.alpha - 1.0) *
                        std::pow(pr.qr, 2.0 * p) / beta;
               },
               0.0, std::pow(tail, -beta), opt)
               .value;
    out[0] = acc;
    out[1] = i < half ? acc : 0.0;
  });
  const double full = kSphereArea4 * sums[0] / static_cast<double>(directions);
  const double coarse = kSphereArea4 * sums[1] / static_cast<double>(half);
  return {full, std::abs(full - coarse), static_cast<long>(K * directions)};
}

}  // namespace msol
