#include <boost/math/special_functions/expint.hpp>
#include <cmath>

#include "doctest.h"
#include "msol/error.hpp"
#include "msol/modulation.hpp"

using namespace msol;

namespace {

SolitonFamily pair(int sign) {
  SolitonFamily f;
  f.solitons = {{Vec5{{0.5, 0, 0, 0, 0}}, 1.0, Vec5{}, 1},
                {Vec5{{-0.5, 0, 0, 0, 0}}, 1.3, Vec5{}, sign}};
  return validate_config(f);
}

const Forcing kT4 = [](double t) { return std::pow(t, -4.0); };

}  // namespace

TEST_CASE("parameter ODE") {
  const auto fam = pair(1);
  auto k = compute_constants(fam);
  const std::vector<double> lT{1.0, 1.3};
  const auto tr = integrate_params(fam, k, lT, 10.0, 1e4);
  double err = 0.0;
  for (std::size_t i = 0; i < tr.t.size(); ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      const double e = lambda_closed_form(k.a[j], lT[j], 10.0, tr.t[i]);
      err = std::max(err, std::abs(tr.lambda[i][j] - e) / e);
    }
  CHECK(err < 1e-8);
  CHECK(tr.t.back() == 1e4);
  for (std::size_t j = 0; j < 2; ++j) {
    // sqrt(lambda) = sqrt(lambda_inf) - a/(2t)
    const double s = std::sqrt(lT[j]) + k.a[j] / 20.0;
    CHECK(tr.lambda_inf[j] == doctest::Approx(s * s).epsilon(1e-10));
    const double lead = std::abs(k.a[j]) * std::sqrt(tr.lambda_inf[j]);
    CHECK(tr.deviation_bound[j] == doctest::Approx(lead).epsilon(std::abs(k.a[j]) / 20 + 1e-6));
  }

  k.a = {0.0, 0.0};
  const auto flat = integrate_params(fam, k, lT, 10.0, 1e4);
  for (const auto& l : flat.lambda) {
    CHECK(l[0] == 1.0);
    CHECK(l[1] == 1.3);
  }

  k.a = {-30.0, 0.0};
  try {
    integrate_params(fam, k, lT, 10.0, 1e4);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == "step-failure");
  }
}

TEST_CASE("linear modes") {
  const auto zero = evolve_mode(1.0, 1, [](double) { return 0.0; }, 0.0, 10.0, 40.0);
  for (double z : zero.z) CHECK(z == 0.0);
  const auto grow = evolve_mode(0.7, 1, [](double) { return 0.0; }, 1e-3, 10.0, 40.0);
  for (std::size_t i = 0; i < grow.t.size(); ++i) {
    const double exact = 1e-3 * std::exp(0.7 * (grow.t[i] - 10.0));
    CHECK(std::abs(grow.z[i] - exact) <= 1e-10 * exact);
  }
  // minus sign, g = t^-4: z tends to the bounded regime |z| <= t^-4/beta
  const auto decay = evolve_mode(2.0, -1, kT4, 0.0, 10.0, 1e3);
  for (std::size_t i = 0; i < decay.t.size(); ++i)
    CHECK(std::abs(decay.z[i]) <= 0.5 * std::pow(decay.t[i], -4.0) * (1 + 10.0 / decay.t[i]));
  CHECK(decay.z.back() == doctest::Approx(0.5 * 1e-12).epsilon(5e-3));
}

TEST_CASE("shooting") {
  const double T = 10, S = 1e4;
  const double oracle = -std::exp(T) * std::pow(T, -3.0) * boost::math::expint(4, T);
  CHECK(oracle == doctest::Approx(-7.27776767019863e-5).epsilon(1e-12));
  CHECK(bounded_solution(1.0, kT4, T) == doctest::Approx(oracle).epsilon(1e-12));

  const auto shot = shoot_stable(1.0, kT4, T, S);
  CHECK(std::abs(shot.xi - oracle) <= 1e-8 * std::abs(oracle));
  CHECK(shot.width <= 1e-12);
  CHECK(shoot_stable(1.0, [](double) { return 0.0; }, T, S).xi == 0.0);

  CHECK(tube_exit_time(1.0, kT4, shot.xi + 1e-6, T, S) < 40.0);
  CHECK(tube_exit_time(1.0, kT4, shot.xi - 1e-6, T, S) < 40.0);
  CHECK(std::isinf(tube_exit_time(1.0, kT4, oracle, T, 30.0)));

  const auto two = shoot_stable(1.0, [](double t) { return 2 * std::pow(t, -4.0); }, T, S);
  CHECK(two.xi == doctest::Approx(2 * shot.xi).epsilon(1e-7));

  // Lipschitz in the forcing: |xi(g) - xi(h)| <= sup|g - h| / beta
  const auto h = shoot_stable(
      1.5, [](double t) { return std::pow(t, -4.0) * (1 + 0.1 * std::sin(t)); }, T, S);
  const auto g = shoot_stable(1.5, kT4, T, S);
  CHECK(std::abs(h.xi - g.xi) <= 0.1 * std::pow(T, -4.0) / 1.5);

  // backward ODE from S against the integral representation
  const double beta = 1.0, zS = bounded_solution(beta, kT4, 200.0);
  OdeTolerance fine;
  fine.abs = 1e-24;
  const auto back = evolve_mode(beta, 1, kT4, zS, 200.0, T, fine);
  for (std::size_t i = 0; i < back.t.size(); i += 7) {
    const double b = bounded_solution(beta, kT4, back.t[i]);
    CHECK(std::abs(back.z[i] - b) <= 1e-8 * std::abs(b));
  }

  CHECK_THROWS_AS(shoot_stable(1.0, kT4, T, T + 1e-3), Error);
}

TEST_CASE("transversality") {
  const std::vector<double> beta{0.4, 0.9, 1.7};
  const double T0 = 100.0 / 0.4;
  const auto free = transversality(beta, [](double) { return 0.0; }, T0, 1000, 0);
  // unit sphere direction along the slowest mode: -2 beta_min + 7/T0
  CHECK(free.max_derivative <= -2 * 0.4 + 7 / T0 + 1e-12);
  CHECK(free.max_derivative >= -2 * 0.4 + 7 / T0 - 0.1);
  CHECK(free.max_derivative <= -0.2);
  const auto forced = transversality(beta, envelope_forcing(1.0, 0.025), T0, 1000, 0);
  CHECK(forced.max_derivative > free.max_derivative);
  CHECK(forced.max_derivative <= -0.2);

  const auto one = transversality({2.0}, [](double) { return 0.0; }, 50.0, 2, 0);
  CHECK(one.max_derivative == doctest::Approx(-4.0 + 7.0 / 50.0).epsilon(1e-12));
}

TEST_CASE("modulation suite") {
  const auto fam = pair(1);
  const auto rep = modulation_suite(fam, compute_constants(fam));
  for (const auto& c : rep.checks) {
    INFO(c.id << " " << c.measured << " " << c.expected);
    CHECK(c.pass);
  }
  const auto again = modulation_suite(fam, compute_constants(fam));
  CHECK(to_json(again).dump() == to_json(rep).dump());
}
