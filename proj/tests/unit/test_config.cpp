#include <cmath>
#include <string>

#include "doctest.h"
#include "msol/config.hpp"
#include "msol/error.hpp"
#include "msol/suites.hpp"

using namespace msol;
using json = nlohmann::ordered_json;

namespace {

json minimal() {
  return json::parse(R"({
    "schema_version": 1,
    "family": {"solitons": [
      {"speed": [0.5, 0, 0, 0, 0]},
      {"speed": [-0.5, 0, 0, 0, 0], "sign": -1}
    ]}
  })");
}

std::string error_code(const json& j) {
  try {
    parse_config(j);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::config);
    return e.code() + " | " + e.what();
  }
  return "";
}

Vec5 cross3(const Vec5& a, const Vec5& b) {
  return Vec5{{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0], 0, 0}};
}

}  // namespace

TEST_CASE("defaults and round trip") {
  const auto c = parse_config(minimal());
  CHECK(c.family.size() == 2);
  CHECK(c.family.solitons[0].scale == 1.0);
  CHECK(c.family.solitons[1].sign == -1);
  CHECK(c.family.delta == doctest::Approx(0.025));
  CHECK(c.kernel.points == 1000);
  CHECK(c.channel.R_grid.size() == 4);
  const auto j = to_json(c);
  CHECK(to_json(parse_config(j)).dump() == j.dump());
}

TEST_CASE("schema violations name the field") {
  auto j = minimal();
  j["family"]["solitons"][1]["speed"] = {-1.2, 0, 0, 0, 0};
  auto e = error_code(j);
  CHECK(e.find("speed-out-of-range") == 0);
  CHECK(e.find("family.solitons[1].speed") != std::string::npos);

  j = minimal();
  j["colour"] = 3;
  CHECK(error_code(j).find("unknown-key") == 0);
  j = minimal();
  j["family"]["solitons"][0]["mass"] = 1;
  CHECK(error_code(j).find("family.solitons[0].mass") != std::string::npos);
  j = minimal();
  j["suites"] = {{"verify-energy", {{"fields", 3}}}};
  CHECK(error_code(j).find("suites.verify-energy.fields") != std::string::npos);
  j = minimal();
  j["suites"] = {{"verify-everything", json::object()}};
  CHECK(error_code(j).find("unknown-key") == 0);

  j = minimal();
  j["schema_version"] = 2;
  CHECK(error_code(j).find("schema-version") == 0);
  j = minimal();
  j.erase("schema_version");
  CHECK(error_code(j).find("missing-key") == 0);
  j = minimal();
  j["family"]["solitons"][0]["scale"] = "big";
  CHECK(error_code(j).find("bad-type") == 0);
  j = minimal();
  j["family"]["solitons"][0]["scale"] = -1.0;
  CHECK(error_code(j).find("nonpositive-scale") == 0);
  j = minimal();
  j["family"]["solitons"][1]["speed"] = {0.5, 0, 0, 0, 0};
  CHECK(error_code(j).find("duplicate-speeds") == 0);
  j = minimal();
  j["suites"] = json::parse(R"({"verify-channel": {"R_grid": [1, 2, 2, 4]}})");
  CHECK(error_code(j).find("out-of-range") == 0);
  j = minimal();
  j["suites"] = json::parse(R"({"verify-interaction": {"far_field_pair": [0, 0]}})");
  CHECK(error_code(j).find("out-of-range") == 0);
  j = minimal();
  j["output"] = {{"format", "xml"}};
  CHECK(error_code(j).find("out-of-range") == 0);
}

TEST_CASE("FNV-1a and the config hash") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
  CHECK(hex64(0xabcull) == "0000000000000abc");
  auto a = parse_config(minimal());
  auto b = a;
  CHECK(config_hash(a) == config_hash(b));
  b.seed = 1;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("scenario catalog") {
  const auto cat = catalog_list();
  REQUIRE(cat.size() == 6);
  for (const auto& e : cat) {
    INFO(e.name);
    CHECK(e.config.name == e.name);
    CHECK_FALSE(e.config.description.empty());
    const auto j = to_json(e.config);
    CHECK(to_json(parse_config(j)).dump() == j.dump());
    CHECK_NOTHROW(validate_config(e.config.family));
  }
  auto find = [&](const std::string& n) -> const SolitonFamily& {
    for (const auto& e : cat)
      if (e.name == n) return e.config.family;
    FAIL("missing " << n);
    throw;
  };
  CHECK(std::abs(psi(find("antisymmetric-pair")).value) <= 1e-12);
  CHECK(psi(find("symmetric-pair")).value == doctest::Approx(0.84375).epsilon(1e-12));
  CHECK(small_speed_measure(find("yu19-smallspeed")) <= 9.0 / 25.0);

  const auto& g3 = find("generic-3");
  REQUIRE(g3.size() == 3);
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) {
      CHECK(norm(g3.solitons[a].speed - g3.solitons[b].speed) > 0.1);
      CHECK(norm(cross3(g3.solitons[a].speed, g3.solitons[b].speed)) > 0.1);
    }
  CHECK(std::abs(dot(cross3(g3.solitons[0].speed, g3.solitons[1].speed), g3.solitons[2].speed)) >
        0.1);

  const auto& col = find("collinear");
  for (const auto& s : col.solitons) CHECK(norm(cross3(s.speed, col.solitons[0].speed)) == 0.0);
}

TEST_CASE("suite dispatch is deterministic") {
  const auto c = parse_config(minimal());
  CHECK(to_json(run_suite("constants", c)).dump() == to_json(run_suite("constants", c)).dump());
  const auto p = run_suite("psi-check", c);
  CHECK(p.passed());
  CHECK(p.flags.size() == 1);
  CHECK(p.flags[0] == "vanishing");
  CHECK_THROWS_AS(run_suite("verify-nothing", c), Error);
}
