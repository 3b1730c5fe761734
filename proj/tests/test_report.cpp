#include "nbk/report.hpp"

#include "nbk/ktheory.hpp"

#include <doctest.h>

#include <cstdlib>

using namespace nbk;

TEST_CASE("ktheory reports") {
  const Report r = cmd_ktheory("B6", 1);
  const Json j = r.to_json();
  CHECK(j["K0"] == Json::parse(R"({"rank":2,"torsion":[]})"));
  CHECK(j["K1"] == Json::parse(R"({"rank":2,"torsion":[]})"));
  CHECK(j["schema"] == kReportSchema);
  CHECK(j["command"] == "ktheory");
  CHECK(r.exit_code() == 0);
  CHECK(cmd_ktheory("B3", 1).to_json()["K0"] == Json::parse(R"({"rank":2,"torsion":[3]})"));
  const Json plus = cmd_ktheory("B2", 1).to_json(), minus = cmd_ktheory("B2", -1).to_json();
  CHECK(plus["K0"] == minus["K0"]);
  CHECK(plus["K1"] == minus["K1"]);
  CHECK(plus["K0"]["torsion"] == Json::parse("[2,2]"));
  CHECK_THROWS_AS(cmd_ktheory("B5", 1), UsageError);
  CHECK_THROWS_AS(cmd_ktheory("B2", 3), UsageError);
}

TEST_CASE("reports are byte-stable") {
  CHECK(cmd_ktheory("B4", 1).json() == cmd_ktheory("B4", 1).json());
  SuiteOptions opt;
  opt.seed = 42;
  opt.samples = 10;
  const std::string a = cmd_verify("algebra", opt).json();
  CHECK(a == cmd_verify("algebra", opt).json());
  CHECK(cmd_verify("algebra", opt).markdown() == cmd_verify("algebra", opt).markdown());
  opt.seed = 43;
  CHECK(a != cmd_verify("algebra", opt).json());
  CHECK(cmd_scan({"B2"}, 6).json() == cmd_scan({"B2"}, 6).json());
}

TEST_CASE("scan exit status follows the published table") {
  CHECK(cmd_scan({"B4"}, 6).exit_code() == 0);
  CHECK(cmd_scan({"N1"}, 6).exit_code() == 0);
  CHECK(cmd_scan({"B2"}, 2).exit_code() == 0);
  const Report b6 = cmd_scan({"B6"}, 6);
  CHECK(b6.exit_code() == 1);
  REQUIRE(b6.checks.size() == 1);
  CHECK(b6.checks[0].counterexample.has_value());
  CHECK_THROWS_AS(cmd_scan({"X1"}, 6), UsageError);
  CHECK_THROWS_AS(cmd_scan({"B2"}, 0), UsageError);
}

TEST_CASE("anomalies fail only under strict") {
  const Report r = cmd_verify("betastar", {});
  bool anomaly = false;
  for (const auto& c : r.checks) anomaly = anomaly || c.status == Status::anomaly;
  CHECK(anomaly);
  CHECK(r.exit_code(false) == 0);
  CHECK(r.exit_code(true) == 1);
  CHECK_FALSE(r.notes.empty());
  CHECK_THROWS_AS(cmd_verify("nonsense", {}), UsageError);
}

TEST_CASE("homology report") {
  const Report r = cmd_homology(ktheory_families());
  CHECK(r.exit_code() == 0);
  CHECK(r.to_json()["families"].size() == 4);
  CHECK(r.markdown().find("| B6 | Z | Z^2 | Z^2 |") != std::string::npos);
}

TEST_CASE("folded mode") {
  if (!std::getenv("NBK_CYCLOTOMIC_ORDER")) CHECK(folded_session_order(make_rational(1, 5)) == 120);
  const int before = cyclotomic_session_order();
  const Report r = cmd_ktheory("B4", 1, make_rational(1, 5));
  CHECK(cyclotomic_session_order() == before);
  CHECK(r.exit_code() == 0);
  CHECK(r.to_json()["config"]["theta_mode"] == "folded");
  CHECK(r.to_json()["K0"] == cmd_ktheory("B4", 1).to_json()["K0"]);
  CHECK_THROWS_AS(cmd_ktheory("B2", -1, make_rational(1, 5)), UsageError);
}
