#include <cmath>
#include <string>

#include <doctest.h>

#include "../../tools/run.hpp"
#include "../../tools/scenario.hpp"

using namespace navslip;
using namespace navslip::cli;

namespace {

const char* minimal = R"(
[cavity]
width = 2
height = 2
[solid]
radius = 0.25
rho = 2
x = 1
y = 1.2
[fluid]
rho = 1
mu = 0.05
beta_S = 0.5
beta_Omega = 0.5
g = 9.81
[scheme]
T = 0.5
)";

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto p = s.find(from);
  REQUIRE(p != std::string::npos);
  return s.replace(p, from.size(), to);
}

}  // namespace

TEST_CASE("minimal scenario gets the documented defaults") {
  const Scenario s = parse_scenario(minimal);
  REQUIRE(s.scheme);
  CHECK(s.scheme->n == 100.0);
  CHECK(s.scheme->N == 32);
  CHECK(s.scheme->dt == 1e-3);
  // initial gap: nearest wall is the top one, 2 - 1.2 - 0.25 = 0.55
  REQUIRE(s.scheme->delta);
  CHECK(*s.scheme->delta == doctest::Approx(0.055));
  CHECK(s.output.prefix == "run");
  // stored pointing up; the body force is -rho g
  CHECK(make_params(s).g.y() == doctest::Approx(9.81));
}

TEST_CASE("negative solid density is rejected with its position and key") {
  const std::string bad = replace(minimal, "rho = 2", "rho = -1");
  try {
    parse_scenario(bad);
    FAIL("accepted");
  } catch (const ScenarioError& e) {
    CHECK(e.key() == "[solid].rho");
    CHECK(e.line() == 7);
    CHECK(std::string(e.what()).find("must be positive") != std::string::npos);
  }
}

TEST_CASE("structural errors") {
  auto rejects = [](const std::string& text, const std::string& key) {
    try {
      parse_scenario(text);
      return false;
    } catch (const ScenarioError& e) {
      return e.key() == key;
    }
  };
  CHECK(rejects(replace(minimal, "T = 0.5", "T = 0.5\ncolour = red"), "[scheme].colour"));
  CHECK(rejects(replace(minimal, "[scheme]", "[schema]"), "[schema]"));
  CHECK(rejects(replace(minimal, "T = 0.5", "T = 0.5\nT = 1"), "[scheme].T"));
  CHECK(rejects(replace(minimal, "T = 0.5", "T ="), "[scheme].T"));
  CHECK(rejects(replace(minimal, "T = 0.5", "T = nan"), "[scheme].T"));
  CHECK(rejects(replace(minimal, "T = 0.5", "T = 0.5\nN = 3.5"), "[scheme].N"));
  CHECK(rejects(replace(minimal, "T = 0.5", "dt = 0.1"), "[scheme].T"));
  // 2 delta must fit in the initial gap
  CHECK(rejects(replace(minimal, "T = 0.5", "T = 0.5\ndelta = 0.5"), "[scheme].delta"));
  // column of a bad value points at the value
  try {
    parse_scenario("[cavity]\nwidth =   abc\nheight = 1\n");
    FAIL("accepted");
  } catch (const ScenarioError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 11);
  }
}

TEST_CASE("dump round-trips") {
  const Scenario s = parse_scenario(minimal);
  const std::string text = dump_scenario(s);
  CHECK(parse_scenario(text) == s);
  CHECK(dump_scenario(parse_scenario(text)) == text);
  const Scenario g = parse_scenario("[gap_ode]\nlaw = inverse\nh0 = 1\na = -1e-5\nT = 1e6\n# done\n");
  CHECK(parse_scenario(dump_scenario(g)) == g);
  CHECK(make_drag(g).kind == DragKind::inverse);
}

TEST_CASE("gap acceleration defaults from densities") {
  const Scenario s = parse_scenario(std::string(minimal) + "[gap_ode]\nlaw = log\nh0 = 1\nT = 10\n");
  CHECK(gap_ode_acceleration(s) == doctest::Approx(-4.905));
  CHECK_THROWS_AS(parse_scenario("[gap_ode]\nlaw = log\nh0 = 1\nT = 10\n"), ScenarioError);
}

TEST_CASE("csv quoting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("two\nlines") == "\"two\nlines\"");
}

TEST_CASE("test-function specs") {
  const Vec2 c(1.0, 1.2);
  const auto bump = parse_test_function("bump:0.5,1.5,0.3", c, 1.0);
  CHECK(bump.fluid(0.0, Vec2(0.5, 1.5)).value.norm() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(bump.fluid(0.0, Vec2(0.6, 1.5)).value.norm() > 0.0);
  CHECK(bump.fluid(1.0, Vec2(0.6, 1.5)).value.norm() == doctest::Approx(0.0));
  CHECK(bump.fluid(0.0, Vec2(0.9, 1.5)).value.norm() == 0.0);
  const auto both = parse_test_function("carrier:0.3,0.5,0.4,0.3,0.45+bump:0.5,1.5,0.3,2", c, 1.0);
  const RigidField r = both.solid(0.0);
  CHECK(r.V.x() == doctest::Approx(0.3));
  CHECK(r.V.y() == doctest::Approx(0.5));
  CHECK(r.omega == doctest::Approx(0.4));
  CHECK_THROWS_AS(parse_test_function("wave:1,2", c, 1.0), InvalidInput);
  CHECK_THROWS_AS(parse_test_function("bump:1,2", c, 1.0), InvalidInput);
}
