#include "msol/suites.hpp"

#include <cmath>
#include <limits>

#include "msol/asymptotics.hpp"
#include "msol/channel.hpp"
#include "msol/energy.hpp"
#include "msol/error.hpp"
#include "msol/fields.hpp"
#include "msol/geometry.hpp"
#include "msol/modulation.hpp"

namespace msol {

namespace {

using json = nlohmann::ordered_json;

json quad_json(const QuadResult& q) {
  return {{"value", q.value}, {"error_estimate", q.error_estimate}};
}

}  // namespace

VerificationReport constants_report(const RunConfig& config) {
  const auto& f = config.family;
  const auto k = compute_constants(f);
  VerificationReport r;
  r.suite = "constants";
  json sig = json::array();
  for (std::size_t a = 0; a < f.size(); ++a)
    for (std::size_t b = 0; b < f.size(); ++b)
      if (a != b)
        sig.push_back({{"k", a}, {"m", b}, {"sigma", k.sigma_pairs[a][b].c},
                       {"norm", norm(k.sigma_pairs[a][b])}});
  r.data["sigma_geo"] = f.sigma_geo;
  r.data["cone_speed"] = f.cone_speed;
  r.data["alpha"] = f.alpha;
  r.data["delta"] = f.delta;
  r.data["sigma_pairs"] = sig;
  r.data["kappa0"] = quad_json(k.kappa0);
  r.data["kappa"] = k.kappa;
  r.data["c"] = k.c;
  r.data["a"] = k.a;
  r.data["psi"] = {{"value", k.psi.value}, {"nonvanishing", k.psi.nonvanishing}};
  r.add_le("kappa0-error", k.kappa0.error_estimate / k.kappa0.value, 1e-10,
           "relative quadrature error of kappa_0");
  for (std::size_t i = 0; i < f.size(); ++i)
    r.add_flag("kappa-positive." + std::to_string(i), k.kappa[i] > 0.0);
  return r;
}

VerificationReport psi_report(const RunConfig& config) {
  const auto p = psi(config.family, config.psi.rel_threshold);
  VerificationReport r;
  r.suite = "psi-check";
  r.data["psi"] = p.value;
  r.data["max_summand"] = p.max_summand;
  r.data["threshold"] = p.threshold;
  r.data["nonvanishing"] = p.nonvanishing;
  if (!p.nonvanishing) r.flags.push_back("vanishing");
  r.add_flag("psi-finite", std::isfinite(p.value));
  return r;
}

VerificationReport kernel_report(const RunConfig& config) {
  const auto& s = config.kernel;
  VerificationReport r;
  r.suite = "verify-kernel";
  r.flags.push_back("4th-order central differences");
  FdOptions fd;
  fd.h = s.h;
  Sampler smp;
  smp.count = s.points;
  smp.seed = config.seed;
  const auto pts = region_points(Ball{{}, s.radius}, smp);
  double worst = 0.0, lw_identity = 0.0;
  for (const auto& x : pts) {
    const double w43 = std::pow(ground_state(x), 4.0 / 3.0);
    for (int j = 0; j <= 5; ++j) {
      const ScalarField phi =
          j < 5 ? ScalarField([j](const Vec5& y) { return ground_state_grad(y)[j]; })
                : ScalarField(lambda_w);
      const double res = std::abs(apply_linearized(phi, x, std::nullopt, fd));
      worst = std::max(worst, res / std::max(std::abs(w43 * phi(x)), 1e-30));
    }
    const double ex = -(4.0 / 3.0) * std::pow(ground_state(x), 7.0 / 3.0);
    lw_identity =
        std::max(lw_identity, std::abs(apply_linearized(ground_state, x, std::nullopt, fd) - ex) /
                                  std::abs(ex));
  }
  r.add_le("kernel-residual", worst, 1e-5,
           "max |L phi| / max(|W^{4/3} phi|, 1e-30) over d_j W and Lambda W");
  r.add_le("LW-identity", lw_identity, 1e-6, "L W = -(4/3) W^{7/3}");

  const Vec5 l{{0.5, 0.3, 0.0, -0.2, 0.1}};
  const Mat5 b = boost_matrix(l);
  smp.count = 200;
  double boosted = 0.0;
  for (const auto& x : region_points(Ball{{}, 15.0}, smp)) {
    const double scale = std::pow(ground_state(apply_boost(l, x)), 4.0 / 3.0);
    for (int j = 0; j < 5; ++j) {
      auto dj = [&](const Vec5& y) { return (b * ground_state_grad(apply_boost(l, y)))[j]; };
      boosted = std::max(boosted, std::abs(apply_linearized(dj, x, l, fd)) / scale);
    }
  }
  r.add_le("boosted-kernel", boosted, 1e-4, "L_l d_j(W_l) / W_l^{4/3}");

  const auto fine = kappa0(1e-13), coarse = kappa0(1e-10);
  r.add_le("kappa-refinement", std::abs(fine.value - coarse.value) / fine.value, 1e-10);
  double spread = 0.0;
  bool positive = true;
  json kap = json::array();
  for (double v : {0.0, 0.3, 0.6, 0.9}) {
    const Vec5 lv = Vec5::unit(0, v);
    const double kv = kappa(lv);
    positive = positive && kv > 0.0;
    spread = std::max(spread, std::abs(kv / (1.0 - v * v) - fine.value) / fine.value);
    kap.push_back({{"speed", v}, {"kappa", kv}});
  }
  r.add_flag("kappa-positive", positive, "l in {0, 0.3, 0.6, 0.9} e_1");
  r.add_le("kappa-scaling", spread, 1e-12, "kappa_l / (1 - |l|^2) against kappa_0");
  r.data["points"] = pts.size();
  r.data["kernel_residual"] = worst;
  r.data["kappa0"] = quad_json(fine);
  r.data["kappa"] = kap;
  return r;
}

VerificationReport interaction_report(const RunConfig& config) {
  const auto& f = config.family;
  const auto& s = config.interaction;
  const auto k = compute_constants(f);
  VerificationReport r = verify_interaction(f, k, s.t_grid, s.per_region, config.seed);
  r.suite = "verify-interaction";
  if (f.size() >= 2)
    r.append(far_field_check(f, s.far_k, s.far_m, s.far_t_grid, s.far_tolerance), "far-field.");
  else
    r.flags.push_back("single soliton: far-field check skipped");
  return r;
}

VerificationReport geometry_report(const RunConfig& config) {
  const auto& s = config.geometry;
  VerificationReport r;
  r.suite = "verify-geometry";
  r.flags.push_back("delta re-derived as alpha/4 for each alpha");
  for (double alpha : s.alphas) {
    SolitonFamily f = config.family;
    f.alpha = alpha;
    f.delta = std::numeric_limits<double>::quiet_NaN();
    f = validate_config(f);
    char buf[32];
    std::snprintf(buf, sizeof buf, "alpha=%g.", alpha);
    r.append(verify_geometry_bounds(f, s.t_grid, s.per_region, config.seed, s.stability,
                                    s.anchor_tolerance),
             buf);
  }
  return r;
}

VerificationReport energy_report(const RunConfig& config) {
  const auto& f = config.family;
  const auto& s = config.energy;
  VerificationReport r;
  r.suite = "verify-energy";
  const auto ew = ground_state_energy();
  r.data["ground_state_energy"] = quad_json(ew);
  r.add_le("ground-state-energy-error", ew.error_estimate / ew.value, 1e-9);
  r.append(check_square_identity(f, s.t, s.square_fields, config.seed, s.max_estimate), "square.");
  r.append(hardy_suite(f, s.t, s.hardy_fields, config.seed, s.classical_bound), "hardy.");
  if (s.coercivity_fields > 0)
    r.append(coercivity_probe(f, s.t, s.coercivity_fields, config.seed), "coercivity.");
  return r;
}

VerificationReport channel_report(const RunConfig& config) {
  const auto& s = config.channel;
  VerificationReport r = verify_channel(s.R_grid, s.corpus, config.seed);
  r.suite = "verify-channel";
  r.append(inelastic_scale(config.family, compute_constants(config.family), s.R_grid, s.c_v),
           "inelastic.");
  return r;
}

VerificationReport modulation_report(const RunConfig& config) {
  ModulationSettings s = config.modulation;
  s.seed = config.seed;
  return modulation_suite(config.family, compute_constants(config.family), s);
}

VerificationReport run_suite(const std::string& name, const RunConfig& config) {
  if (name == "constants") return constants_report(config);
  if (name == "psi-check") return psi_report(config);
  if (name == "verify-kernel") return kernel_report(config);
  if (name == "verify-interaction") return interaction_report(config);
  if (name == "verify-geometry") return geometry_report(config);
  if (name == "verify-energy") return energy_report(config);
  if (name == "verify-channel") return channel_report(config);
  if (name == "modulation") return modulation_report(config);
  fail(ErrorKind::config, "unknown-suite", "no suite named " + name);
}

}  // namespace msol
