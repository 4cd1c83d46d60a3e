#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "msol/error.hpp"
#include "msol/geometry.hpp"

using namespace msol;

namespace {

SolitonFamily three(double alpha) {
  const double s = std::sin(75 * std::numbers::pi / 180), c = std::cos(75 * std::numbers::pi / 180);
  SolitonFamily f;
  const Vec5 ys[3] = {Vec5{{0, 0, 0, 0.5, -0.3}}, Vec5{{0, 0, 0, -0.4, 0.6}},
                      Vec5{{0, 0, 0, 0.2, 0.4}}};
  for (int k = 0; k < 3; ++k) {
    const double a = 2 * std::numbers::pi * k / 3;
    f.solitons.push_back({Vec5{{0.95 * s * std::cos(a), 0.95 * s * std::sin(a), 0.95 * c, 0, 0}},
                          1.0, ys[k], k == 1 ? -1 : 1});
  }
  f.alpha = alpha;
  return validate_config(f);
}

SolitonFamily two() {
  SolitonFamily f;
  f.solitons = {{Vec5{{0.6, 0.4, 0, 0, 0}}, 0.8, {}, 1}, {Vec5{{-0.55, 0, 0.45, 0, 0}}, 0.7, {}, 1}};
  return validate_config(f);
}

std::vector<Vec5> shell(double r0, double r1, std::size_t n, std::uint64_t seed) {
  Sampler s;
  s.count = n;
  s.seed = seed;
  return region_points(Shell{{}, r0, r1}, s);
}

}  // namespace

TEST_CASE("mollifier") {
  CHECK(Mollifier::value(0.0) == 1.0);
  CHECK(Mollifier::value(1.0) == 1.0);
  CHECK(Mollifier::value(2.0) == 0.0);
  CHECK(Mollifier::value(7.0) == 0.0);
  double prev = 1.0;
  for (double r = 1.0; r <= 2.0; r += 1e-3) {
    const double v = Mollifier::value(r);
    CHECK(v <= prev);
    CHECK(v >= 0.0);
    prev = v;
  }
  for (double r : {1.1, 1.37, 1.5, 1.81, 1.95})
    CHECK(std::abs(fd_first_1d(Mollifier::value, r, 1e-4) - Mollifier::derivative(r)) < 1e-7);
  CHECK(std::abs(Mollifier::derivative(1.0 + 1e-3)) < 1e-100);
}

TEST_CASE("Theta and rho") {
  const auto f = two();
  const WeightBundle b(f);
  const double L = f.cone_speed, t = 50.0;
  const auto in = b.theta_rho(t, Vec5::unit(2, 0.5 * L * t));
  CHECK(in.theta == 1.0);
  CHECK(in.rho == t);
  const auto out = b.theta_rho(t, Vec5::unit(1, 2 * L * t));
  CHECK(out.theta == doctest::Approx(0.9330329915368074).epsilon(1e-13));
  CHECK(out.rho == doctest::Approx(1.8660659830736148 * t).epsilon(1e-13));
  const Vec5 e = Vec5{{1, 2, -1, 0.5, 0}} / norm(Vec5{{1, 2, -1, 0.5, 0}});
  const auto lo = b.theta_rho(t, e * (L * t - 1e-8)), hi = b.theta_rho(t, e * (L * t + 1e-8));
  CHECK(std::abs(lo.theta - hi.theta) < 1e-9);
  CHECK(std::abs(lo.rho - hi.rho) < 1e-9 * t);
  for (const auto& x : shell(0.0, 20 * L * t, 4000, 1)) {
    const auto tr = b.theta_rho(t, x);
    CHECK(tr.rho >= t);
    CHECK(tr.theta <= 1.0);
    CHECK(tr.theta >= 0.0);
    CHECK(std::abs(tr.rho - tr.theta * std::max(t, norm(x) / L)) <= 1e-12 * tr.rho);
  }
}

TEST_CASE("soliton weights") {
  const auto f = three(0.1);
  const WeightBundle b(f);
  const double t = 100.0;
  for (std::size_t k = 0; k < 3; ++k) {
    const auto w = b.eval(t, f.center(k, t));
    CHECK(w.q[k] == 1.0);
    CHECK(w.psi == 0.0);
    CHECK(w.phi == 0.0);
  }
  const Vec5 x = f.center(1, t) + Vec5{{1, 1, 1, 0, 0}};
  CHECK(b.q(1, t, x) == doctest::Approx(0.5).epsilon(1e-15));
  for (const auto& y : shell(0.0, 3 * t, 4000, 2)) {
    const auto w = b.eval(t, y);
    CHECK(w.phi >= 0.0);
    CHECK(w.phi <= 1.0);
    double sum = 0.0;
    for (std::size_t k = 0; k < 3; ++k) sum += w.qa[k];
    CHECK(std::abs(1.0 - w.psi - sum) <= 3.0 * std::pow(t, -f.alpha));
  }
  // psi <= 1 - q_k^alpha <= (alpha/2) |x - c_k|^2
  for (double r : {1e-3, 0.1, 0.5, 2.0}) {
    const Vec5 y = f.center(0, t) + Vec5::unit(3, r);
    const auto w = b.eval(t, y);
    CHECK(w.psi <= 1.0 - w.qa[0]);
    CHECK(1.0 - w.qa[0] <= 0.5 * f.alpha * r * r);
  }
}

TEST_CASE("closed-form weight derivatives match finite differences") {
  const auto f = three(0.1);
  const WeightBundle b(f);
  const double t = 100.0;
  FdOptions fd;
  fd.h = 1e-4;
  std::vector<Vec5> pts;
  for (std::size_t k = 0; k < 3; ++k)
    for (double r : {0.5, 3.0, 40.0, 90.0})
      pts.push_back(f.center(k, t) + r * Vec5{{0.3, -0.5, 0.1, 0.7, 0.4}} / norm(Vec5{{0.3, -0.5, 0.1, 0.7, 0.4}}));
  pts.push_back(Vec5::unit(4, 2.0 * t));
  pts.push_back(Vec5{{10, -20, 30, 300, 5}});
  for (const auto& x : pts) {
    const auto w = b.eval(t, x);
    auto Phi = [&](const Vec5& y) { return b.eval(t, y).phi; };
    for (int j = 0; j < 5; ++j) CHECK(std::abs(fd_first(Phi, x, j, fd) - w.grad_phi[j]) < 1e-7);
    const double dtP = fd_first_1d([&](double s) { return b.eval(s, x).phi; }, t, 1e-3);
    CHECK(std::abs(dtP - w.dt_phi) < 1e-7);

    const auto c = b.chi_full(t, x);
    for (int j = 0; j < 5; ++j) {
      auto cj = [&](const Vec5& y) { return b.chi_full(t, y).value[j]; };
      for (int i = 0; i < 5; ++i)
        CHECK(std::abs(fd_first(cj, x, i, fd) - c.jacobian(i, j)) < 1e-6);
      const double dtc = fd_first_1d([&](double s) { return b.chi_full(s, x).value[j]; }, t, 1e-3);
      CHECK(std::abs(dtc - c.dt[j]) < 1e-6);
    }
    for (std::size_t k = 0; k < 3; ++k) {
      auto pk = [&](const Vec5& y) { return b.phi_k(k, t, y); };
      const Vec5 g = b.grad_phi_k(k, t, x);
      for (int j = 0; j < 5; ++j) CHECK(std::abs(fd_first(pk, x, j, fd) - g[j]) < 1e-9);
      const double dtp = fd_first_1d([&](double s) { return b.phi_k(k, s, x); }, t, 1e-3);
      CHECK(std::abs(dtp - b.dt_phi_k(k, t, x)) < 1e-9);
      const Vec5 df = b.df_k(k, t);
      for (int j = 0; j < 5; ++j) {
        const double d = fd_first_1d([&](double s) { return b.f_k(k, s)[j]; }, t, 1e-2);
        CHECK(std::abs(d - df[j]) < 1e-8);
      }
    }
  }
}

TEST_CASE("chi anchor and growth of f_k") {
  const auto f = three(0.1);
  const WeightBundle b(f);
  std::vector<double> ratio;
  for (double t : {1e2, 1e3, 1e4}) {
    CHECK_FALSE(b.supports_overlap(t));
    for (std::size_t k = 0; k < 3; ++k) {
      const Vec5 c = b.chi(t, f.center(k, t));
      CHECK(norm(c - f.solitons[k].speed * t) <= 1e-12 * t);
      ratio.push_back(norm(b.f_k(k, t)) / std::pow(t, 1 - f.alpha));
    }
  }
  for (double r : ratio) CHECK(r <= 4.0);
  CHECK(*std::max_element(ratio.begin(), ratio.end()) / *std::min_element(ratio.begin(), ratio.end()) < 1.01);
  CHECK_THROWS_AS(WeightBundle(three(0.05)).chi(100.0, {}), Error);
}

TEST_CASE("chi is close to x Theta far away") {
  const auto f = three(0.1);
  const WeightBundle b(f);
  std::vector<double> sup;
  for (double t : {1e2, 1e3, 1e4}) {
    double m = 0.0;
    const double L = f.cone_speed;
    for (const auto& x : shell(2 * L * t, 20 * L * t, 2000, 3)) {
      const Vec5 c = b.chi(t, x);
      m = std::max(m, norm(c - x * b.theta_rho(t, x).theta) / std::pow(t, 1 - f.alpha));
    }
    sup.push_back(m);
  }
  // leading order: K (L t)^alpha |x|^{1-2 alpha} at |x| = 20 L t
  const double bound = 1.2 * 3.0 * std::pow(20.0, 1 - 2 * f.alpha);
  for (double s : sup) CHECK(s <= bound);
  CHECK(*std::max_element(sup.begin(), sup.end()) / *std::min_element(sup.begin(), sup.end()) <
        1.5);
}

TEST_CASE("sup ratios of the q_k^alpha bounds") {
  const auto f = three(0.1);
  const WeightBundle b(f);
  const auto r = geometry_ratios(b, 1e3, 1 << 12, 0);
  // |d_i q_k^alpha| / (alpha q_k^{1+alpha}) = |x_i - c_i| q_k <= 1
  CHECK(r.pk_grad <= 1.0);
  CHECK(r.pk_grad > 0.99);
  CHECK(r.pk_time <= 0.95 + 1e-12);
  CHECK(r.pk_second <= 1.0 + f.alpha + 1e-12);
  CHECK(r.chi_anchor <= 1e-12);
}

TEST_CASE("weighted norms of q^3 grow linearly") {
  const auto f = two();
  std::vector<double> ts, y3, yd;
  for (double t : geometric_grid(1e4, 1e6, 5)) {
    ts.push_back(t);
    const auto q = weighted_q_norm2(f, t, 3.0, 256);
    CHECK(q.error_estimate < 1e-3 * q.value);
    y3.push_back(q.value);
    yd.push_back(weighted_q_norm2(f, t, 3.0 - f.delta, 256).value);
  }
  CHECK(std::abs(fit_loglog(ts, y3).slope - 1.0) <= 0.1);
  CHECK(std::abs(fit_loglog(ts, yd).slope - 1.0) <= 0.1);
  // inside the cone rho = t and each centre contributes |S^4| int (1+r^2)^{-3} r^4 dr
  const double limit = 2 * kSphereArea4 * 3 * std::numbers::pi / 16;
  CHECK(y3.back() / ts.back() == doctest::Approx(limit).epsilon(2e-3));
}
