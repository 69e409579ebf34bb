#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "natf/config.hpp"

using namespace natf;

static const char* kSample =
    "# experiment header\n"
    "system.kind = doubling\n"
    "schedule.n = 50, 60, 70\n"
    "schedule.seed = 7\n"
    "deviate.threshold = 0.7\n"
    "measure.p = 0.5, 0.5\n"
    "\n"
    "output.format = csv\n";

TEST_CASE("parse_string: keys, comments, lists") {
  auto cfg = Config::parse_string(kSample);
  CHECK(cfg.get("system.kind") == "doubling");
  CHECK(cfg.get_double("deviate.threshold") == doctest::Approx(0.7));
  CHECK(cfg.get_int_list("schedule.n") == std::vector<int>{50, 60, 70});
  CHECK(cfg.get_double_list("measure.p") == std::vector<double>{0.5, 0.5});
  CHECK(cfg.get_u64("schedule.seed") == 7);
  CHECK(cfg.has("output.format"));
  CHECK(!cfg.has("missing.key"));
  CHECK(cfg.get_or("missing.key", "fallback") == "fallback");
  CHECK(cfg.get_int_or("missing.key", 3) == 3);
}

TEST_CASE("errors carry the offending key") {
  auto cfg = Config::parse_string(kSample);
  try {
    cfg.get("no.such.key");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key == "no.such.key");
  }
  try {
    cfg.get_double("system.kind");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key == "system.kind");
  }
}

TEST_CASE("malformed lines are rejected") {
  CHECK_THROWS_AS(Config::parse_string("just a bare line\n"), ConfigError);
}

TEST_CASE("hash: canonical, order independent, value sensitive") {
  auto a = Config::parse_string("x.a = 1\nx.b = 2\n");
  auto b = Config::parse_string("x.b = 2\nx.a = 1\n");
  CHECK(a.hash() == b.hash());
  auto c = Config::parse_string("x.a = 1\nx.b = 3\n");
  CHECK(a.hash() != c.hash());
  a.set("x.c", "9");
  CHECK(a.hash() != b.hash());
}

TEST_CASE("parse_file round trip") {
  std::string path = "test_config_roundtrip.cfg";
  {
    std::ofstream out(path);
    out << kSample;
  }
  auto cfg = Config::parse_file(path);
  CHECK(cfg.get("system.kind") == "doubling");
  CHECK(cfg.hash() == Config::parse_string(kSample).hash());
  std::remove(path.c_str());
  CHECK_THROWS_AS(Config::parse_file("definitely_missing.cfg"), ConfigError);
}
