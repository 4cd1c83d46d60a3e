#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "msol/model.hpp"
#include "msol/modulation.hpp"

namespace msol {

inline constexpr int kSchemaVersion = 1;

struct KernelSettings {
  std::size_t points = 1000;
  double radius = 20.0;
  double h = 1e-3;
};

struct PsiSettings {
  double rel_threshold = 1e-10;
};

struct InteractionSettings {
  std::vector<double> t_grid{1e2, 316.22776601683796, 1e3, 3162.2776601683795, 1e4};
  std::size_t per_region = 1024;
  std::size_t far_k = 0, far_m = 1;
  std::vector<double> far_t_grid{1e2, 316.22776601683796, 1e3, 3162.2776601683795, 1e4};
  double far_tolerance = 1e-3;
};

struct GeometrySettings {
  std::vector<double> t_grid{1e2, 1e3, 1e4};
  std::vector<double> alphas{0.05, 0.1, 0.2};
  std::size_t per_region = 256;
  double stability = 2.0;
  double anchor_tolerance = 1e-12;
};

struct EnergySettings {
  double t = 100.0;
  std::size_t square_fields = 20;
  std::size_t hardy_fields = 50;
  std::size_t coercivity_fields = 10;
  double max_estimate = 1e-6;
  double classical_bound = 0.45;
};

struct ChannelSettings {
  std::vector<double> R_grid{1, 2, 4, 8};
  std::size_t corpus = 20;
  double c_v = 1.0;
};

struct OutputSettings {
  /// "json" or "csv".
  std::string format = "json";
  /// Embed wall-clock timestamps and wall time; off keeps reports
  /// byte-identical across reruns.
  bool timestamps = false;
};

struct RunConfig {
  int schema_version = kSchemaVersion;
  std::string name;
  std::string description;
  std::uint64_t seed = 0;
  SolitonFamily family;
  KernelSettings kernel;
  PsiSettings psi;
  InteractionSettings interaction;
  GeometrySettings geometry;
  EnergySettings energy;
  ChannelSettings channel;
  ModulationSettings modulation;
  OutputSettings output;
};

/// Suite names in run order; also the CLI subcommands besides "all".
inline const std::vector<std::string> kSuiteNames = {
    "constants",       "psi-check",     "verify-kernel",   "verify-interaction",
    "verify-geometry", "verify-energy", "verify-channel",  "modulation"};

/// Strict parse: unknown keys, wrong types and a mismatched schema_version
/// are config errors naming the offending path. The family is validated.
RunConfig parse_config(const nlohmann::ordered_json& j);
RunConfig load_config(const std::filesystem::path& path);

/// Every field, defaults included.
nlohmann::ordered_json to_json(const RunConfig& c);

/// FNV-1a 64 of the canonical dump of to_json(c).
std::uint64_t config_hash(const RunConfig& c);
std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

struct CatalogEntry {
  std::string name;
  std::filesystem::path path;
  RunConfig config;
};

/// The bundled scenarios, sorted by name.
std::vector<CatalogEntry> catalog_list(const std::filesystem::path& dir = MSOL_SOURCE_DIR
                                       "/configs");

/// sum_j max_k l_{k,j}^2.
double small_speed_measure(const SolitonFamily& family);

}  // namespace msol
