#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace msol {

/// One named comparison inside a report.
struct Check {
  std::string id;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  /// "le": measured <= expected + tolerance; "abs": |measured - expected| <=
  /// tolerance; "rel": same, relative to |expected|; "flag": measured != 0.
  std::string relation = "abs";
  bool pass = false;
  std::string note;
};

struct VerificationReport {
  std::string suite;
  std::vector<Check> checks;
  /// Design decisions that affected the numbers.
  std::vector<std::string> flags;
  /// Measured series and auxiliary values.
  nlohmann::ordered_json data = nlohmann::ordered_json::object();

  bool passed() const;
  const Check* find(const std::string& id) const;

  Check& add_le(const std::string& id, double measured, double bound, std::string note = {});
  Check& add_abs(const std::string& id, double measured, double expected, double tol,
                 std::string note = {});
  Check& add_rel(const std::string& id, double measured, double expected, double rel_tol,
                 std::string note = {});
  Check& add_flag(const std::string& id, bool ok, std::string note = {});

  void append(const VerificationReport& other, const std::string& prefix = {});
};

nlohmann::ordered_json to_json(const Check& c);
nlohmann::ordered_json to_json(const VerificationReport& r);

}  // namespace msol
