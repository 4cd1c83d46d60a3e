#include <cmath>
#include <numbers>

#include "doctest.h"
#include "msol/energy.hpp"
#include "msol/error.hpp"

using namespace msol;

namespace {

SolitonFamily three() {
  const double s = std::sin(75 * std::numbers::pi / 180), c = std::cos(75 * std::numbers::pi / 180);
  const Vec5 ys[3] = {Vec5{{0, 0, 0, 0.5, -0.3}}, Vec5{{0, 0, 0, -0.4, 0.6}},
                      Vec5{{0, 0, 0, 0.2, 0.4}}};
  const double lam[3] = {1.0, 0.8, 1.2};
  SolitonFamily f;
  for (int k = 0; k < 3; ++k) {
    const double a = 2 * std::numbers::pi * k / 3;
    f.solitons.push_back({Vec5{{0.95 * s * std::cos(a), 0.95 * s * std::sin(a), 0.95 * c, 0, 0}},
                          lam[k], ys[k], k == 1 ? -1 : 1});
  }
  return validate_config(f);
}

const Vec5 kOnes{{1, 1, 1, 1, 1}};

}  // namespace

TEST_CASE("test fields") {
  const auto f = TestField::random(3, Vec5{{10, 0, 0, 0, 0}});
  FdOptions fd;
  fd.h = 1e-4;
  fd.relative = false;
  for (const Vec5& d : {Vec5{}, Vec5{{0.3, -0.2, 0.5, 0.1, 0}}, Vec5{{-1, 0.4, 0, 0.8, -0.6}}}) {
    const Vec5 x = f.center() + d;
    const Vec5 g = f.grad_eps(x);
    for (int j = 0; j < 5; ++j)
      CHECK(std::abs(fd_first([&](const Vec5& y) { return f.eps(y); }, x, j, fd) - g[j]) < 1e-9);
  }
  const double R = f.support_radius();
  CHECK(R > 3.0);
  CHECK(R < 12.0);
  for (const auto& u : sphere_points(200, 1)) {
    const Vec5 x = f.center() + u * R;
    CHECK(std::abs(f.eps(x)) < 1e-14);
    CHECK(std::abs(f.eta(x)) < 1e-14);
    CHECK(norm(f.grad_eps(x)) < 1e-14);
  }
  const auto g = f.scaled(2.0, -1.0);
  const Vec5 x = f.center() + Vec5{{0.2, 0.1, 0, 0, 0}};
  CHECK(g.eps(x) == doctest::Approx(2 * f.eps(x)).epsilon(1e-15));
  CHECK(g.eta(x) == doctest::Approx(-f.eta(x)).epsilon(1e-15));
  const auto m = f.moved(Vec5{{0, 20, 0, 0, 0}});
  CHECK(m.eps(x - f.center() + m.center()) == doctest::Approx(f.eps(x)).epsilon(1e-14));
}

TEST_CASE("corpus placement") {
  const auto fam = three();
  const double t = 100.0, Lt = fam.cone_speed * t;
  const auto corpus = test_corpus(fam, t, 30, 4);
  CHECK(corpus.size() == 30);
  int inside = 0;
  for (const auto& f : corpus) {
    const double r = norm(f.center()), clear = f.support_radius();
    CHECK(r > clear);
    CHECK(std::abs(r - Lt) > clear);
    for (std::size_t k = 0; k < fam.size(); ++k) CHECK(norm(f.center() - fam.center(k, t)) > clear);
    if (r < Lt) ++inside;
  }
  CHECK(inside == 15);
  const auto again = test_corpus(fam, t, 30, 4);
  for (std::size_t i = 0; i < corpus.size(); ++i) CHECK(again[i].center() == corpus[i].center());
}

TEST_CASE("conserved functionals") {
  const TestField zero(Vec5{}, kOnes, {}, {});
  const auto z = conserved_functionals(zero);
  CHECK(z.energy == 0.0);
  CHECK(norm(z.momentum) == 0.0);

  // u = exp(-|x|^2): E = (5/2)(pi/2)^{5/2} - (3/10)(3 pi/10)^{5/2}
  const TestField gauss(Vec5{}, kOnes, {GaussComponent{}}, {});
  const auto g = conserved_functionals(gauss);
  CHECK(g.energy == doctest::Approx(7.472370128198169).epsilon(1e-6));
  CHECK(norm(g.momentum) == 0.0);

  // v = d_1 u gives M_1 = int (d_1 u)^2 = (pi/2)^{5/2}
  FieldPair p{[](const Vec5& x) {
    const double u = std::exp(-norm2(x));
    Vec5 gu = x * (-2.0 * u);
    return FieldSample{u, gu[0], gu};
  }};
  const auto m = conserved_functionals(p, field_rules(gauss));
  CHECK(m.momentum[0] == doctest::Approx(std::pow(std::numbers::pi / 2, 2.5)).epsilon(1e-10));
  CHECK(std::abs(m.momentum[1]) < 1e-14);

  const auto w = ground_state_energy();
  CHECK(w.value == doctest::Approx(168.872052952547712).epsilon(1e-10));
}

TEST_CASE("energy functional parts") {
  const auto fam = three();
  const EnergyContext ctx(fam, 100.0);
  const auto corpus = test_corpus(fam, 100.0, 4, 0);

  const TestField zero(corpus[0].center(), kOnes, {}, {});
  const auto z = functional_H(zero, ctx);
  CHECK(z.h == 0.0);
  CHECK(z.n2 == 0.0);

  for (const auto& f : corpus) {
    const auto b = functional_H(f, ctx);
    CHECK(b.h1 == doctest::Approx(b.h1_quadratic + b.h1_potential).epsilon(1e-14));
    CHECK(b.h == doctest::Approx(b.h1 + b.h2 + b.h3).epsilon(1e-14));
    CHECK(std::abs(b.n2 - b.n2_separate) <= 1e-12 * b.n2);
    // |eps|^{10/3} is only C^3 at sign changes, so the potential converges slowly
    CHECK(b.h_error < 0.1 * std::abs(b.h));
    const auto again = functional_H(f, ctx);
    CHECK(again.h == b.h);

    const auto still = functional_H(f.scaled(1.0, 0.0), ctx);
    CHECK(still.h2 == 0.0);
    CHECK(still.h3 == 0.0);

    // H2, H3 bilinear; the quadratic part of H1 is homogeneous of degree 2
    const auto d = functional_H(f.scaled(2.0, 1.0), ctx);
    CHECK(d.h2 == doctest::Approx(2 * b.h2).epsilon(1e-12));
    CHECK(d.h3 == doctest::Approx(2 * b.h3).epsilon(1e-12));
    const auto s = functional_H(f.scaled(3.0, 3.0), ctx);
    CHECK(s.h1_quadratic == doctest::Approx(9 * b.h1_quadratic).epsilon(1e-12));
    // far from the solitons the potential is nearly F(eps), degree 10/3
    CHECK(s.h1_potential / b.h1_potential == doctest::Approx(std::pow(3.0, 10.0 / 3.0)).epsilon(1e-3));
  }
}

TEST_CASE("square identity") {
  const auto fam = three();
  const EnergyContext ctx(fam, 100.0);
  const TestField zero(Vec5{{20, 0, 0, 0, 0}}, kOnes, {}, {});
  const auto z = square_identity(zero, ctx);
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == 0.0);
  const auto rep = check_square_identity(fam, 100.0, 20, 0);
  CHECK(rep.passed());
  CHECK(rep.checks.size() == 40);
  for (const auto& f : test_corpus(fam, 100.0, 3, 1)) {
    const auto si = square_identity(f.scaled(1.0, 0.0), ctx);
    CHECK(si.residual <= 3 * std::max(si.estimate, 1e-14));
  }
}

TEST_CASE("Hardy ratios") {
  for (double s : {0.5, 0.1, 0.01})
    CHECK(hardy_radial_ratio(s) == doctest::Approx(1.0 / (2.25 + s * s)).epsilon(1e-9));
  CHECK_THROWS_AS(hardy_radial_ratio(0.0), Error);

  const auto fam = three();
  const auto rep = hardy_suite(fam, 100.0, 10, 0);
  CHECK(rep.passed());
  const EnergyContext ctx(fam, 100.0);
  const auto f = test_corpus(fam, 100.0, 1, 2)[0];
  const auto a = hardy_ratios(f, ctx), b = hardy_ratios(f.scaled(0.25, 7.0), ctx);
  for (int i = 0; i < 6; ++i) CHECK(b.ratio[i] == doctest::Approx(a.ratio[i]).epsilon(1e-12));
}

TEST_CASE("coercivity smoke test") {
  const auto fam = three();
  const auto p = probe_coercivity(fam, 100.0, 4, 0);
  CHECK(p.quotient.size() == 4);
  CHECK(p.mu_hat > 0.0);
  CHECK(p.control < 0.1 * p.mu_hat);
  CHECK(p.max_projection < 1e-3);
}
