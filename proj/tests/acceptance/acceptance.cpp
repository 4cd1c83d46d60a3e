#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "msol/config.hpp"
#include "msol/error.hpp"
#include "msol/model.hpp"
#include "msol/suites.hpp"

using namespace msol;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> lines;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    lines.push_back(std::string(ok ? "  ok   " : "  FAIL ") + what);
  }
};

std::string fmt_check(const Check& c) {
  char buf[256];
  if (c.relation == "le")
    std::snprintf(buf, sizeof buf, "%s = %.6g <= %.6g", c.id.c_str(), c.measured, c.expected);
  else if (c.relation == "flag")
    std::snprintf(buf, sizeof buf, "%s", c.id.c_str());
  else
    std::snprintf(buf, sizeof buf, "%s = %.10g, expected %.10g +- %.3g%s", c.id.c_str(),
                  c.measured, c.expected, c.tolerance, c.relation == "rel" ? " (rel)" : "");
  return buf;
}

bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

void require_checks(Outcome& o, const VerificationReport& r,
                    const std::function<bool(const std::string&)>& select) {
  int n = 0;
  for (const auto& c : r.checks)
    if (select(c.id)) {
      o.require(c.pass, fmt_check(c));
      ++n;
    }
  o.require(n > 0, "report contains the selected checks");
}

void require_id(Outcome& o, const VerificationReport& r, const std::string& id) {
  const Check* c = r.find(id);
  if (!c) {
    o.require(false, id + " missing from report");
    return;
  }
  o.require(c->pass, fmt_check(*c));
}

struct Timed {
  VerificationReport report;
  double seconds = 0.0;
};

Timed timed(const std::string& suite, const RunConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  Timed t{run_suite(suite, c), 0.0};
  t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return t;
}

void require_runtime(Outcome& o, double seconds, double limit) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "runtime %.2f s < %.0f s", seconds, limit);
  o.require(seconds < limit, buf);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria 1-11"};
  std::vector<int> expect_fail;
  bool verbose = false;
  app.add_option("--expect-fail", expect_fail,
                 "criteria known to fail; exit status is 0 iff exactly these fail");
  app.add_flag("-v,--verbose", verbose, "print every sub-check");
  CLI11_PARSE(app, argc, argv);

  std::map<std::string, RunConfig> cat;
  for (const auto& e : catalog_list()) cat.emplace(e.name, e.config);
  const auto& g2 = cat.at("generic-2");
  const auto& g3 = cat.at("generic-3");

  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria;

  Timed kernel;
  criteria.emplace_back("kernel identities", [&] {
    Outcome o;
    kernel = timed("verify-kernel", g2);
    require_id(o, kernel.report, "kernel-residual");
    require_runtime(o, kernel.seconds, 10);
    return o;
  });
  Timed inter;
  criteria.emplace_back("interaction expansion", [&] {
    Outcome o;
    inter = timed("verify-interaction", g2);
    require_id(o, inter.report, "remainder-slope");
    require_id(o, inter.report, "control-slope");
    require_runtime(o, inter.seconds, 120);
    return o;
  });
  criteria.emplace_back("far-field constant", [&] {
    Outcome o;
    require_id(o, inter.report, "far-field.deviation.t=100");
    require_id(o, inter.report, "far-field.decay-slope");
    return o;
  });
  criteria.emplace_back("kappa_l", [&] {
    Outcome o;
    for (const char* id : {"kappa-positive", "kappa-refinement", "kappa-scaling"})
      require_id(o, kernel.report, id);
    return o;
  });
  criteria.emplace_back("Psi", [&] {
    Outcome o;
    const double anti = psi(cat.at("antisymmetric-pair").family).value;
    const double sym = psi(cat.at("symmetric-pair").family).value;
    char buf[128];
    std::snprintf(buf, sizeof buf, "antisymmetric |Psi| = %.3g <= 1e-12", std::abs(anti));
    o.require(std::abs(anti) <= 1e-12, buf);
    std::snprintf(buf, sizeof buf, "symmetric Psi = %.10g, expected 0.8438 +- 1e-3", sym);
    o.require(std::abs(sym - 0.8438) <= 1e-3, buf);
    return o;
  });
  criteria.emplace_back("chi anchor and geometry bound stability", [&] {
    Outcome o;
    const auto r = run_suite("verify-geometry", g3).checks;
    VerificationReport rep;
    rep.checks = r;
    require_checks(o, rep, [](const std::string& id) {
      return id.find(".chi-anchor") != std::string::npos ||
             id.find(".stability.") != std::string::npos;
    });
    return o;
  });
  Timed energy;
  criteria.emplace_back("square identity", [&] {
    Outcome o;
    energy = timed("verify-energy", g3);
    require_checks(o, energy.report, [](const std::string& id) { return starts_with(id, "square."); });
    return o;
  });
  criteria.emplace_back("channel law", [&] {
    Outcome o;
    const auto r = run_suite("verify-channel", g3);
    require_checks(o, r, [](const std::string& id) {
      return starts_with(id, "tail-norm.") || id == "tail-slope" || id == "annihilates-plane";
    });
    return o;
  });
  criteria.emplace_back("Hardy suite", [&] {
    Outcome o;
    for (const char* id : {"hardy.finite", "hardy.classical", "hardy.scale-invariance"})
      require_id(o, energy.report, id);
    return o;
  });
  criteria.emplace_back("modulation", [&] {
    Outcome o;
    const auto r = run_suite("modulation", g3);
    require_checks(o, r, [](const std::string& id) {
      return starts_with(id, "closed-form.") || id == "shooting-oracle" ||
             id == "backward-integral" || id == "transversality-forced";
    });
    return o;
  });
  criteria.emplace_back("determinism", [&] {
    Outcome o;
    for (const char* suite : {"constants", "psi-check", "verify-kernel", "verify-interaction",
                              "verify-channel", "modulation"}) {
      const auto a = to_json(run_suite(suite, g2)).dump();
      const auto b = to_json(run_suite(suite, g2)).dump();
      o.require(a == b, std::string(suite) + " rerun byte-identical (" +
                            std::to_string(a.size()) + " bytes)");
    }
    const auto e = to_json(run_suite("verify-energy", g3)).dump();
    o.require(e == to_json(energy.report).dump(), "verify-energy rerun byte-identical");
    return o;
  });

  std::set<int> failed;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const Error& e) {
      o.require(false, std::string("error: ") + e.what());
    }
    std::printf("criterion %2d: %s  %s\n", n, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str());
    for (const auto& l : o.lines)
      if (verbose || !o.pass) std::printf("%s\n", l.c_str());
    std::fflush(stdout);
    if (!o.pass) failed.insert(n);
  }
  const std::set<int> expected(expect_fail.begin(), expect_fail.end());
  std::printf("%zu of %zu criteria pass\n", criteria.size() - failed.size(), criteria.size());
  if (failed != expected) {
    std::printf("failing set differs from the expected-failure list\n");
    return 1;
  }
  return 0;
}
