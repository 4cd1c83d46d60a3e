#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "msol/config.hpp"
#include "msol/error.hpp"
#include "msol/modulation.hpp"
#include "msol/suites.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace msol;

namespace {

enum Exit { kPass = 0, kCheckFail = 1, kConfigError = 2, kNumerical = 3 };

struct Outcome {
  std::string suite;
  std::optional<VerificationReport> report;
  std::optional<Error> error;
  double seconds = 0.0;
};

Outcome run_one(const std::string& name, const RunConfig& config) {
  Outcome o;
  o.suite = name;
  const auto start = std::chrono::steady_clock::now();
  try {
    o.report = run_suite(name, config);
  } catch (const Error& e) {
    o.error = e;
  }
  o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return o;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_text(const std::string& s) {
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorKind::config, "unwritable", "cannot write " + p.string());
  out << text;
}

json provenance(const RunConfig& config, const Outcome& o, bool timestamps) {
  json p;
  p["config_name"] = config.name;
  p["config_hash"] = hex64(config_hash(config));
  p["seed"] = config.seed;
  p["version"] = MSOL_VERSION;
  p["timestamp"] = timestamps ? json(utc_now()) : json("masked");
  if (timestamps) p["wall_time_s"] = o.seconds;
  return p;
}

void write_report(const fs::path& dir, const RunConfig& config, const Outcome& o,
                  bool timestamps) {
  json j;
  if (o.report) {
    j = to_json(*o.report);
  } else {
    j["suite"] = o.suite;
    j["pass"] = false;
    j["error"] = {{"code", o.error->code()}, {"message", o.error->what()}};
  }
  j["provenance"] = provenance(config, o, timestamps);
  if (config.output.format == "json") {
    write_file(dir / (o.suite + ".json"), j.dump(2) + "\n");
    return;
  }
  std::string csv = "id,measured,expected,tolerance,relation,pass,note\n";
  if (o.report)
    for (const auto& c : o.report->checks)
      csv += csv_text(c.id) + "," + csv_number(c.measured) + "," + csv_number(c.expected) + "," +
             csv_number(c.tolerance) + "," + c.relation + "," + (c.pass ? "1" : "0") + "," +
             csv_text(c.note) + "\n";
  else
    csv += csv_text("error") + ",nan,nan,nan,flag,0," + csv_text(o.error->what()) + "\n";
  write_file(dir / (o.suite + ".csv"), csv);
}

/// Trajectory dumps for external plotting.
void write_modulation_series(const fs::path& dir, const RunConfig& config) {
  const auto& f = config.family;
  std::vector<double> lambda_T;
  for (const auto& s : f.solitons) lambda_T.push_back(s.scale);
  const auto tr = integrate_params(f, compute_constants(f), lambda_T, config.modulation.t_begin,
                                   config.modulation.t_end);
  std::string csv = "t";
  for (std::size_t k = 0; k < f.size(); ++k) csv += ",lambda_" + std::to_string(k);
  csv += "\n";
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    csv += csv_number(tr.t[i]);
    for (double l : tr.lambda[i]) csv += "," + csv_number(l);
    csv += "\n";
  }
  write_file(dir / "modulation_lambda.csv", csv);

  const Forcing g = [](double t) { return std::pow(t, -4.0); };
  const double T = 10.0;
  const auto shot = shoot_stable(1.0, g, T, 1e3 * T);
  const auto z = evolve_mode(1.0, 1, g, shot.xi, T, 60.0);
  csv = "t,z,bounded\n";
  for (std::size_t i = 0; i < z.t.size(); ++i)
    csv += csv_number(z.t[i]) + "," + csv_number(z.z[i]) + "," +
           csv_number(bounded_solution(1.0, g, z.t[i])) + "\n";
  write_file(dir / "modulation_shooting.csv", csv);
}

int exit_for(const Error& e) {
  return e.kind() == ErrorKind::numerical ? kNumerical : kConfigError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks for multi-soliton interaction estimates of the 5D energy-critical "
               "wave equation"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::string config_path, out_dir = "reports";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::vector<std::string> suite_filter;
  bool strict_timestamps = false, parallel = false, quiet = false;
  app.add_option("--config", config_path, "Run configuration (JSON)")->required();
  app.add_option("--out", out_dir, "Directory for reports")->capture_default_str();
  app.add_option("--seed", seed, "Override the configured seed");
  app.add_option("--samples", samples,
                 "Override the sample counts (kernel points, per-region points, sphere samples)");
  app.add_option("--suite", suite_filter, "Suite(s) to run; repeatable")
      ->check(CLI::IsMember(kSuiteNames));
  app.add_flag("--strict-timestamps", strict_timestamps,
               "Mask timestamps and wall times even if the config enables them");
  app.add_flag("--parallel", parallel, "Run the selected suites concurrently");
  app.add_flag("--quiet", quiet, "Only print the overall status");

  std::vector<std::string> commands = kSuiteNames;
  commands.push_back("all");
  for (const auto& c : commands) app.add_subcommand(c, c == "all" ? "Every suite" : "Run " + c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return e.get_exit_code() == 0 ? code : kConfigError;
  }

  std::vector<std::string> selected;
  for (const auto* sub : app.get_subcommands()) {
    if (sub->get_name() == "all")
      selected = kSuiteNames;
    else
      selected.push_back(sub->get_name());
  }
  for (const auto& s : suite_filter)
    if (std::find(selected.begin(), selected.end(), s) == selected.end()) selected.push_back(s);
  if (selected.empty()) {
    std::cerr << "no suite selected: give a subcommand or --suite\n";
    return kConfigError;
  }

  RunConfig config;
  try {
    config = load_config(config_path);
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  if (seed) config.seed = *seed;
  if (samples) {
    config.kernel.points = *samples;
    config.interaction.per_region = *samples;
    config.geometry.per_region = *samples;
    config.modulation.sphere_samples = *samples;
  }
  const bool timestamps = config.output.timestamps && !strict_timestamps;

  std::vector<Outcome> outcomes;
  if (parallel && selected.size() > 1) {
    std::vector<std::future<Outcome>> jobs;
    for (const auto& s : selected)
      jobs.push_back(std::async(std::launch::async, run_one, s, std::cref(config)));
    for (auto& j : jobs) outcomes.push_back(j.get());
  } else {
    for (const auto& s : selected) outcomes.push_back(run_one(s, config));
  }

  bool any_config = false, any_numerical = false, any_fail = false;
  json summary;
  summary["config_name"] = config.name;
  summary["config_hash"] = hex64(config_hash(config));
  summary["suites"] = json::array();
  try {
    fs::create_directories(out_dir);
    for (const auto& o : outcomes) {
      write_report(out_dir, config, o, timestamps);
      if (o.suite == "modulation" && o.report) write_modulation_series(out_dir, config);
      const bool pass = o.report && o.report->passed();
      json row = {{"suite", o.suite}, {"pass", pass}};
      if (o.error) {
        (exit_for(*o.error) == kConfigError ? any_config : any_numerical) = true;
        row["error"] = o.error->code();
        if (!quiet) std::cout << o.suite << ": ERROR " << o.error->what() << "\n";
      } else if (!pass) {
        any_fail = true;
        if (!quiet) {
          std::cout << o.suite << ": FAIL\n";
          for (const auto& c : o.report->checks)
            if (!c.pass) std::cout << "  " << c.id << " measured " << c.measured << "\n";
        }
      } else if (!quiet) {
        std::cout << o.suite << ": PASS (" << o.report->checks.size() << " checks)";
        for (const auto& f : o.report->flags)
          if (f == "vanishing") std::cout << " [vanishing]";
        std::cout << "\n";
      }
      summary["suites"].push_back(row);
    }
    write_file(fs::path(out_dir) / "summary.json", summary.dump(2) + "\n");
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return exit_for(e);
  }
  const int status = any_config      ? kConfigError
                     : any_numerical ? kNumerical
                     : any_fail      ? kCheckFail
                                     : kPass;
  std::cout << (status == kPass ? "PASS" : "FAIL") << "\n";
  return status;
}
