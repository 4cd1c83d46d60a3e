#include "msol/report.hpp"

#include <algorithm>
#include <cmath>

namespace msol {

bool VerificationReport::passed() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

const Check* VerificationReport::find(const std::string& id) const {
  for (const auto& c : checks)
    if (c.id == id) return &c;
  return nullptr;
}

Check& VerificationReport::add_le(const std::string& id, double measured, double bound,
                                  std::string note) {
  checks.push_back({id, measured, bound, 0.0, "le",
                    std::isfinite(measured) && measured <= bound, std::move(note)});
  return checks.back();
}

Check& VerificationReport::add_abs(const std::string& id, double measured, double expected,
                                   double tol, std::string note) {
  checks.push_back({id, measured, expected, tol, "abs",
                    std::isfinite(measured) && std::abs(measured - expected) <= tol,
                    std::move(note)});
  return checks.back();
}

Check& VerificationReport::add_rel(const std::string& id, double measured, double expected,
                                   double rel_tol, std::string note) {
  const bool ok = std::isfinite(measured) &&
                  std::abs(measured - expected) <= rel_tol * std::abs(expected);
  checks.push_back({id, measured, expected, rel_tol, "rel", ok, std::move(note)});
  return checks.back();
}

Check& VerificationReport::add_flag(const std::string& id, bool ok, std::string note) {
  checks.push_back({id, ok ? 1.0 : 0.0, 1.0, 0.0, "flag", ok, std::move(note)});
  return checks.back();
}

void VerificationReport::append(const VerificationReport& other, const std::string& prefix) {
  for (auto c : other.checks) {
    c.id = prefix + c.id;
    checks.push_back(std::move(c));
  }
  for (const auto& f : other.flags)
    if (std::find(flags.begin(), flags.end(), f) == flags.end()) flags.push_back(f);
  if (!other.data.empty()) data[prefix.empty() ? other.suite : prefix] = other.data;
}

namespace {
nlohmann::ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}
}  // namespace

nlohmann::ordered_json to_json(const Check& c) {
  nlohmann::ordered_json j;
  j["id"] = c.id;
  j["measured"] = number(c.measured);
  j["expected"] = number(c.expected);
  j["tolerance"] = number(c.tolerance);
  j["relation"] = c.relation;
  j["pass"] = c.pass;
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

nlohmann::ordered_json to_json(const VerificationReport& r) {
  nlohmann::ordered_json j;
  j["suite"] = r.suite;
  j["pass"] = r.passed();
  j["flags"] = r.flags;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) j["checks"].push_back(to_json(c));
  j["data"] = r.data;
  return j;
}

}  // namespace msol
