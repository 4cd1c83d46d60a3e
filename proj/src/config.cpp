#include "msol/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "msol/error.hpp"

namespace msol {

namespace {

using json = nlohmann::ordered_json;

/// Reads the keys of one object and rejects the rest.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(ErrorKind::config, "bad-type", where() + " must be an object");
  }

  bool has(const char* key) const { return j_.contains(key); }
  const json& raw(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }
  std::string child(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void number(const char* key, double& out) {
    if (!has(key)) return;
    const json& v = raw(key);
    if (!v.is_number()) type_error(key, "a number");
    out = v.get<double>();
    if (!std::isfinite(out)) type_error(key, "finite");
  }
  void positive(const char* key, double& out) {
    number(key, out);
    if (has(key) && !(out > 0.0)) fail(ErrorKind::config, "out-of-range", child(key) + " must be > 0");
  }
  void count(const char* key, std::size_t& out) {
    if (!has(key)) return;
    const json& v = raw(key);
    if (!v.is_number_unsigned()) type_error(key, "a nonnegative integer");
    out = v.get<std::size_t>();
  }
  void u64(const char* key, std::uint64_t& out) {
    if (!has(key)) return;
    const json& v = raw(key);
    if (!v.is_number_unsigned()) type_error(key, "a nonnegative integer");
    out = v.get<std::uint64_t>();
  }
  void text(const char* key, std::string& out) {
    if (!has(key)) return;
    const json& v = raw(key);
    if (!v.is_string()) type_error(key, "a string");
    out = v.get<std::string>();
  }
  void flag(const char* key, bool& out) {
    if (!has(key)) return;
    const json& v = raw(key);
    if (!v.is_boolean()) type_error(key, "a boolean");
    out = v.get<bool>();
  }
  void grid(const char* key, std::vector<double>& out, std::size_t min_size = 1) {
    if (!has(key)) return;
    const json& v = raw(key);
    if (!v.is_array() || v.size() < min_size)
      type_error(key, "an array of at least " + std::to_string(min_size) + " numbers");
    out.clear();
    for (const auto& e : v) {
      if (!e.is_number() || !(e.get<double>() > 0.0)) type_error(key, "positive numbers");
      out.push_back(e.get<double>());
    }
    if (!std::is_sorted(out.begin(), out.end()) ||
        std::adjacent_find(out.begin(), out.end()) != out.end())
      fail(ErrorKind::config, "out-of-range", child(key) + " must be strictly increasing");
  }
  void vec5(const char* key, Vec5& out) {
    if (!has(key)) return;
    const json& v = raw(key);
    if (!v.is_array() || v.size() != 5) type_error(key, "an array of 5 numbers");
    for (int i = 0; i < 5; ++i) {
      if (!v[i].is_number()) type_error(key, "an array of 5 numbers");
      out[i] = v[i].get<double>();
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key()))
        fail(ErrorKind::config, "unknown-key", child(it.key().c_str()) + " is not a known key");
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }
  [[noreturn]] void type_error(const char* key, const std::string& what) const {
    fail(ErrorKind::config, "bad-type", child(key) + " must be " + what);
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

SolitonFamily parse_family(const json& j) {
  Reader r(j, "family");
  SolitonFamily f;
  r.number("alpha", f.alpha);
  r.positive("delta", f.delta);
  if (!r.has("solitons")) fail(ErrorKind::config, "missing-key", "family.solitons is required");
  const json& list = r.raw("solitons");
  if (!list.is_array() || list.empty())
    fail(ErrorKind::config, "bad-type", "family.solitons must be a nonempty array");
  for (std::size_t k = 0; k < list.size(); ++k) {
    const std::string path = "family.solitons[" + std::to_string(k) + "]";
    Reader s(list[k], path);
    SolitonParams p;
    if (!s.has("speed")) fail(ErrorKind::config, "missing-key", path + ".speed is required");
    s.vec5("speed", p.speed);
    s.number("scale", p.scale);
    s.vec5("center", p.center);
    double sign = 1.0;
    s.number("sign", sign);
    if (sign != 1.0 && sign != -1.0)
      fail(ErrorKind::config, "bad-sign", path + ".sign must be +1 or -1");
    p.sign = static_cast<int>(sign);
    s.finish();
    const double speed = norm(p.speed);
    if (!(speed < 1.0)) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.6g", speed);
      fail(ErrorKind::config, "speed-out-of-range",
           path + ".speed has |speed| = " + buf + ", must be < 1");
    }
    f.solitons.push_back(p);
  }
  r.finish();
  try {
    return validate_config(f);
  } catch (const Error& e) {
    fail(ErrorKind::config, e.code(), std::string("family: ") + e.what());
  }
}

json family_json(const SolitonFamily& f) {
  json j;
  j["alpha"] = f.alpha;
  j["delta"] = f.delta;
  j["solitons"] = json::array();
  for (const auto& s : f.solitons)
    j["solitons"].push_back({{"speed", s.speed.c}, {"scale", s.scale}, {"center", s.center.c},
                             {"sign", s.sign}});
  return j;
}

}  // namespace

RunConfig parse_config(const json& j) {
  Reader r(j, "");
  RunConfig c;
  if (!r.has("schema_version"))
    fail(ErrorKind::config, "missing-key", "schema_version is required");
  const json& v = r.raw("schema_version");
  if (!v.is_number_integer() || v.get<int>() != kSchemaVersion)
    fail(ErrorKind::config, "schema-version",
         "schema_version must be " + std::to_string(kSchemaVersion));
  r.text("name", c.name);
  r.text("description", c.description);
  r.u64("seed", c.seed);
  if (!r.has("family")) fail(ErrorKind::config, "missing-key", "family is required");
  c.family = parse_family(r.raw("family"));

  if (r.has("suites")) {
    Reader s(r.raw("suites"), "suites");
    if (s.has("constants")) Reader(s.raw("constants"), "suites.constants").finish();
    if (s.has("psi-check")) {
      Reader p(s.raw("psi-check"), "suites.psi-check");
      p.positive("rel_threshold", c.psi.rel_threshold);
      p.finish();
    }
    if (s.has("verify-kernel")) {
      Reader p(s.raw("verify-kernel"), "suites.verify-kernel");
      p.count("points", c.kernel.points);
      p.positive("radius", c.kernel.radius);
      p.positive("h", c.kernel.h);
      p.finish();
    }
    if (s.has("verify-interaction")) {
      Reader p(s.raw("verify-interaction"), "suites.verify-interaction");
      p.grid("t_grid", c.interaction.t_grid, 4);
      p.count("per_region", c.interaction.per_region);
      if (p.has("far_field_pair")) {
        const json& pr = p.raw("far_field_pair");
        if (!pr.is_array() || pr.size() != 2 || !pr[0].is_number_unsigned() ||
            !pr[1].is_number_unsigned())
          fail(ErrorKind::config, "bad-type",
               "suites.verify-interaction.far_field_pair must be two soliton indices");
        c.interaction.far_k = pr[0].get<std::size_t>();
        c.interaction.far_m = pr[1].get<std::size_t>();
      }
      p.grid("far_field_t_grid", c.interaction.far_t_grid, 4);
      p.positive("far_field_tolerance", c.interaction.far_tolerance);
      p.finish();
    }
    if (s.has("verify-geometry")) {
      Reader p(s.raw("verify-geometry"), "suites.verify-geometry");
      p.grid("t_grid", c.geometry.t_grid);
      p.grid("alphas", c.geometry.alphas);
      p.count("per_region", c.geometry.per_region);
      p.positive("stability", c.geometry.stability);
      p.positive("anchor_tolerance", c.geometry.anchor_tolerance);
      p.finish();
    }
    if (s.has("verify-energy")) {
      Reader p(s.raw("verify-energy"), "suites.verify-energy");
      p.positive("t", c.energy.t);
      p.count("square_fields", c.energy.square_fields);
      p.count("hardy_fields", c.energy.hardy_fields);
      p.count("coercivity_fields", c.energy.coercivity_fields);
      p.positive("max_estimate", c.energy.max_estimate);
      p.positive("classical_bound", c.energy.classical_bound);
      p.finish();
    }
    if (s.has("verify-channel")) {
      Reader p(s.raw("verify-channel"), "suites.verify-channel");
      p.grid("R_grid", c.channel.R_grid, 4);
      p.count("corpus", c.channel.corpus);
      p.positive("c_v", c.channel.c_v);
      p.finish();
    }
    if (s.has("modulation")) {
      Reader p(s.raw("modulation"), "suites.modulation");
      p.positive("lambda0", c.modulation.lambda0);
      p.positive("t_begin", c.modulation.t_begin);
      p.positive("t_end", c.modulation.t_end);
      p.positive("forcing_c", c.modulation.forcing_c);
      p.count("sphere_samples", c.modulation.sphere_samples);
      p.finish();
      if (!(c.modulation.t_end > c.modulation.t_begin))
        fail(ErrorKind::config, "out-of-range", "suites.modulation.t_end must exceed t_begin");
    }
    s.finish();
  }
  const std::size_t K = c.family.size();
  if (K >= 2 && (c.interaction.far_k >= K || c.interaction.far_m >= K ||
                 c.interaction.far_k == c.interaction.far_m))
    fail(ErrorKind::config, "out-of-range",
         "suites.verify-interaction.far_field_pair must name two distinct solitons");

  if (r.has("output")) {
    Reader o(r.raw("output"), "output");
    o.text("format", c.output.format);
    o.flag("timestamps", c.output.timestamps);
    o.finish();
    if (c.output.format != "json" && c.output.format != "csv")
      fail(ErrorKind::config, "out-of-range", "output.format must be \"json\" or \"csv\"");
  }
  r.finish();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::config, "unreadable", "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::config, "parse-error", path.string() + ": " + e.what());
  }
  return parse_config(j);
}

json to_json(const RunConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["name"] = c.name;
  j["description"] = c.description;
  j["seed"] = c.seed;
  j["family"] = family_json(c.family);
  json s;
  s["constants"] = json::object();
  s["psi-check"] = {{"rel_threshold", c.psi.rel_threshold}};
  s["verify-kernel"] = {
      {"points", c.kernel.points}, {"radius", c.kernel.radius}, {"h", c.kernel.h}};
  s["verify-interaction"] = {{"t_grid", c.interaction.t_grid},
                             {"per_region", c.interaction.per_region},
                             {"far_field_pair", {c.interaction.far_k, c.interaction.far_m}},
                             {"far_field_t_grid", c.interaction.far_t_grid},
                             {"far_field_tolerance", c.interaction.far_tolerance}};
  s["verify-geometry"] = {{"t_grid", c.geometry.t_grid},
                          {"alphas", c.geometry.alphas},
                          {"per_region", c.geometry.per_region},
                          {"stability", c.geometry.stability},
                          {"anchor_tolerance", c.geometry.anchor_tolerance}};
  s["verify-energy"] = {{"t", c.energy.t},
                        {"square_fields", c.energy.square_fields},
                        {"hardy_fields", c.energy.hardy_fields},
                        {"coercivity_fields", c.energy.coercivity_fields},
                        {"max_estimate", c.energy.max_estimate},
                        {"classical_bound", c.energy.classical_bound}};
  s["verify-channel"] = {
      {"R_grid", c.channel.R_grid}, {"corpus", c.channel.corpus}, {"c_v", c.channel.c_v}};
  s["modulation"] = {{"lambda0", c.modulation.lambda0},
                     {"t_begin", c.modulation.t_begin},
                     {"t_end", c.modulation.t_end},
                     {"forcing_c", c.modulation.forcing_c},
                     {"sphere_samples", c.modulation.sphere_samples}};
  j["suites"] = s;
  j["output"] = {{"format", c.output.format}, {"timestamps", c.output.timestamps}};
  return j;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t config_hash(const RunConfig& c) { return fnv1a64(to_json(c).dump()); }

std::vector<CatalogEntry> catalog_list(const std::filesystem::path& dir) {
  std::vector<CatalogEntry> out;
  if (!std::filesystem::is_directory(dir))
    fail(ErrorKind::config, "unreadable", "no catalog directory " + dir.string());
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() != ".json") continue;
    out.push_back({e.path().stem().string(), e.path(), load_config(e.path())});
  }
  std::sort(out.begin(), out.end(),
            [](const CatalogEntry& a, const CatalogEntry& b) { return a.name < b.name; });
  return out;
}

double small_speed_measure(const SolitonFamily& family) {
  double s = 0.0;
  for (int j = 0; j < 5; ++j) {
    double m = 0.0;
    for (const auto& p : family.solitons) m = std::max(m, p.speed[j] * p.speed[j]);
    s += m;
  }
  return s;
}

}  // namespace msol
