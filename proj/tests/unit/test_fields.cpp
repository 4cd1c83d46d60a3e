#include <cmath>

#include "doctest.h"
#include "msol/fields.hpp"

using namespace msol;

namespace {

std::vector<Vec5> ball_points(std::size_t n, double radius, std::uint64_t seed) {
  Sampler s;
  s.count = n;
  s.seed = seed;
  return region_points(Ball{{}, radius}, s);
}

}  // namespace

TEST_CASE("ground state closed forms") {
  CHECK(ground_state({}) == 1.0);
  CHECK(ground_state(Vec5::unit(2, std::sqrt(15.0))) ==
        doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-15));
  CHECK(lambda_w({}) == 1.5);
  for (const auto& x : ball_points(200, 50.0, 1)) {
    const Vec5 g = ground_state_grad(x);
    const Vec5 gl = lambda_w_grad(x);
    const Mat5 h = ground_state_hessian(x);
    CHECK(std::abs(lambda_w(x) - (1.5 * ground_state(x) + dot(x, g))) < 1e-15);
    for (int j = 0; j < 5; ++j) {
      CHECK(std::abs(fd_first(ground_state, x, j) - g[j]) < 1e-8);
      CHECK(std::abs(fd_first(lambda_w, x, j) - gl[j]) < 1e-8);
      for (int i = 0; i < 5; ++i)
        CHECK(std::abs(fd_second(ground_state, x, i, j) - h(i, j)) < 1e-7);
    }
    // Delta W + W^{7/3} = 0
    const double lap = fd_laplacian(ground_state, x);
    const double w73 = std::pow(ground_state(x), 7.0 / 3.0);
    CHECK(std::abs(lap + w73) <= 1e-6 * std::max(w73, std::abs(lap)));
  }
}

TEST_CASE("Lorentz coordinates and boosted solitons") {
  const Vec5 x{{1.0, 2.0, -1.0, 0.5, 3.0}};
  CHECK(lorentz_coord({}, 7.0, x) == x);
  const Vec5 z = lorentz_coord(Vec5::unit(0, 0.6), 0.0, x);
  CHECK(z[0] == doctest::Approx(1.25).epsilon(1e-15));
  for (int j = 1; j < 5; ++j) CHECK(z[j] == x[j]);
  const Vec5 l{{0.3, -0.2, 0.5, 0.1, 0.0}};
  CHECK(norm(lorentz_coord(l, 3.0, 3.0 * l)) < 1e-15);
  CHECK(boosted_soliton(l, 11.0, 11.0 * l) == 1.0);
  CHECK(boost_coeff({}) == 0.5);

  SolitonFrame f({{}, 4.0, {}, -1});
  CHECK(f.value(0.0, {}) == doctest::Approx(-0.125).epsilon(1e-15));
  SolitonFrame g({{}, 1.0, {}, 1});
  for (const auto& p : ball_points(20, 10.0, 2)) CHECK(g.value(0.0, p) == ground_state(p));
}

TEST_CASE("frame derivatives match finite differences") {
  const SolitonParams p{Vec5{{0.4, -0.3, 0.2, 0.0, 0.5}}, 0.8, Vec5{{1, 0, -2, 0, 0.5}}, -1};
  const SolitonFrame f(p, 1.3, Vec5{{0.5, 0.5, 0, 0, -1}});
  const double t = 2.5;
  auto val = [&](const Vec5& x) { return f.value(t, x); };
  auto lam = [&](const Vec5& x) { return f.lambda_value(t, x); };
  for (const auto& q : ball_points(50, 6.0, 3)) {
    const Vec5 x = q + f.center(t);
    const Vec5 g = f.grad(t, x), gl = f.lambda_grad(t, x);
    const Mat5 h = f.hessian(t, x);
    const double lam_fd = 1.5 * val(x) + dot(x - f.center(t), g);
    CHECK(std::abs(lam(x) - lam_fd) < 1e-13);
    for (int j = 0; j < 5; ++j) {
      CHECK(std::abs(fd_first(val, x, j) - g[j]) < 1e-8);
      CHECK(std::abs(fd_first(lam, x, j) - gl[j]) < 1e-8);
      for (int i = 0; i < 5; ++i) CHECK(std::abs(fd_second(val, x, i, j) - h(i, j)) < 1e-7);
    }
    CHECK(f.x_value(t, x) == doctest::Approx(-dot(p.speed, g)).epsilon(1e-15));
  }
}

TEST_CASE("nonlinearity") {
  CHECK(nonlinearity(1.0).f == 1.0);
  CHECK(nonlinearity(-1.0).f == -1.0);
  CHECK(nonlinearity(1.0).F == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(nonlinearity(2.0).f == doctest::Approx(5.039684199579493).epsilon(1e-14));
  for (double u : {-3.1, -0.7, 0.01, 0.5, 2.2}) {
    const auto a = nonlinearity(u), b = nonlinearity(-u);
    CHECK(a.f == -b.f);
    CHECK(a.df == b.df);
    CHECK(a.F == b.F);
    CHECK(std::abs(a.df * u - (7.0 / 3.0) * a.f) < 1e-13 * std::abs(a.f));
    const double dF = fd_first_1d([](double s) { return nonlinearity(s).F; }, u, 1e-3);
    CHECK(std::abs(dF - a.f) < 1e-8 * std::max(1.0, std::abs(a.f)));
  }
}

TEST_CASE("kernel of the linearised operator") {
  const auto pts = ball_points(1000, 20.0, 0);
  double worst = 0.0;
  for (const auto& x : pts) {
    const double scale = std::pow(ground_state(x), 4.0 / 3.0);
    for (int j = 0; j < 5; ++j) {
      auto dj = [j](const Vec5& y) { return ground_state_grad(y)[j]; };
      worst = std::max(worst, std::abs(apply_linearized(dj, x)) / std::max(scale, 1e-30));
    }
    worst = std::max(worst, std::abs(apply_linearized(lambda_w, x)) / std::max(scale, 1e-30));
    // L W = -(4/3) W^{7/3}
    const double lw = apply_linearized(ground_state, x);
    const double ex = -(4.0 / 3.0) * std::pow(ground_state(x), 7.0 / 3.0);
    CHECK(std::abs(lw - ex) <= 1e-6 * std::abs(ex));
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("boosted kernel") {
  const Vec5 l{{0.5, 0.3, 0.0, -0.2, 0.1}};
  const Mat5 b = boost_matrix(l);
  for (const auto& x : ball_points(200, 15.0, 5)) {
    for (int j = 0; j < 5; ++j) {
      auto dj = [&](const Vec5& y) { return (b * ground_state_grad(apply_boost(l, y)))[j]; };
      const double scale = std::pow(ground_state(apply_boost(l, x)), 4.0 / 3.0);
      CHECK(std::abs(apply_linearized(dj, x, l)) <= 1e-4 * scale);
    }
  }
}

TEST_CASE("modulation vectors") {
  const SolitonParams p{Vec5{{0.3, 0.0, -0.4, 0.1, 0.0}}, 1.2, Vec5{{0, 1, 0, 0, 0}}, 1};
  const SolitonFrame f(p, 1.1, p.center);
  const double t = 30.0, a = 0.7;
  const double cancel = a * std::sqrt(f.lambda()) / (t * t);
  for (const auto& q : ball_points(30, 5.0, 6)) {
    const Vec5 x = q + f.center(t);
    const auto m0 = modulation_vector(f, a, cancel, {}, t, x);
    CHECK(std::abs(m0.mw) < 1e-15);
    CHECK(std::abs(m0.mx) < 1e-15);
    const auto m1 = modulation_vector(f, a, cancel, Vec5::unit(0), t, x);
    CHECK(m1.mw == doctest::Approx(f.grad(t, x)[0]).epsilon(1e-14));
  }
  // Delta M_W + f'(W_k) M_W - (l.grad)^2 M_W = 0, and M_X = -l.grad M_W
  const Vec5 ydot{{0.2, -0.1, 0.05, 0.0, 0.3}};
  for (const auto& q : ball_points(30, 8.0, 7)) {
    const Vec5 x = q + f.center(t);
    auto mw = [&](const Vec5& y) { return modulation_vector(f, a, 0.01, ydot, t, y).mw; };
    auto mx = [&](const Vec5& y) { return modulation_vector(f, a, 0.01, ydot, t, y).mx; };
    const double w = f.value(t, x);
    const double scale = std::pow(std::abs(w), 4.0 / 3.0) * 0.05;
    CHECK(std::abs(wave_linearization(mw, x, p.speed, w)) <= 1e-4 * scale);
    double dmw = 0.0;
    for (int j = 0; j < 5; ++j) dmw += p.speed[j] * fd_first(mw, x, j);
    CHECK(std::abs(mx(x) + dmw) <= 1e-8 * std::max(1e-3, std::abs(dmw)));
  }
}

TEST_CASE("correction profiles") {
  const Vec5 l = Vec5::unit(1, 0.6);
  const double k = kappa(l), t = 5.0;
  const auto c = correction_profiles(l, k, t, t * l);
  CHECK(c.f == doctest::Approx((1 + 1.5 * k) / (t * t * t)).epsilon(1e-14));
  CHECK(correction_profiles({}, kappa({}), t, Vec5::unit(0, 2.0)).g == 0.0);
  const Vec5 x{{1, 2, 3, 0, -1}};
  const auto c1 = correction_profiles(l, k, t, x);
  const auto c2 = correction_profiles(l, k, 2 * t, x + t * l);
  CHECK(c2.f == doctest::Approx(c1.f / 8).epsilon(1e-14));
  CHECK(c2.g == doctest::Approx(c1.g / 4).epsilon(1e-14));
}
