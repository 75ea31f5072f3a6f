#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <string>

#include <json.hpp>

#include "uavris/uavris.h"

namespace {
const char* kMiniConfig = R"({
  "users": [[220, 180], [-200, -160]],
  "bs_pos": [0, 0],
  "eve_pos": [0, 200],
  "N": 4, "T": 40, "H": 100, "v_max": 50,
  "alpha": 2.2, "M": 3,
  "h0_db": -80, "sigma2_dbm": -120,
  "P0": 1.0, "P_max": 1.0, "P_uav": 0.2
})";

std::string take(char* s) {
  std::string out(s != nullptr ? s : "");
  uavris_string_free(s);
  return out;
}
}  // namespace

TEST_CASE("parse failures surface an error message") {
  uavris_scenario* sc = nullptr;
  CHECK(uavris_scenario_parse("{ not json", &sc) == UAVRIS_ERR_PARSE);
  CHECK(sc == nullptr);
  CHECK(std::strlen(uavris_last_error()) > 0);
  CHECK(uavris_scenario_parse(nullptr, &sc) == UAVRIS_ERR_ARGUMENT);
}

TEST_CASE("scenario round trip through the shared surface") {
  uavris_scenario* sc = nullptr;
  REQUIRE(uavris_scenario_parse(kMiniConfig, &sc) == UAVRIS_OK);
  char* text = nullptr;
  REQUIRE(uavris_scenario_serialize(sc, &text) == UAVRIS_OK);
  const std::string serialized = take(text);

  uavris_scenario* back = nullptr;
  REQUIRE(uavris_scenario_parse(serialized.c_str(), &back) == UAVRIS_OK);
  char* text2 = nullptr;
  REQUIRE(uavris_scenario_serialize(back, &text2) == UAVRIS_OK);
  CHECK(take(text2) == serialized);
  uavris_scenario_free(sc);
  uavris_scenario_free(back);
}

TEST_CASE("default scenario is constructible") {
  uavris_scenario* sc = nullptr;
  REQUIRE(uavris_scenario_default(&sc) == UAVRIS_OK);
  char* text = nullptr;
  REQUIRE(uavris_scenario_serialize(sc, &text) == UAVRIS_OK);
  const auto j = nlohmann::json::parse(take(text));
  CHECK(j.at("N").get<int>() == 12);
  CHECK(j.at("eve_pos")[1].get<double>() == 200.0);
  CHECK(j.at("P_uav").get<double>() == 0.2);
  uavris_scenario_free(sc);
}

TEST_CASE("end-to-end run produces coherent artifacts") {
  uavris_scenario* sc = nullptr;
  REQUIRE(uavris_scenario_parse(kMiniConfig, &sc) == UAVRIS_OK);
  uavris_run_options opts{1, 0, 7};
  uavris_result* res = nullptr;
  REQUIRE(uavris_run(sc, &opts, &res) == UAVRIS_OK);

  double zeta = 0.0, gamma = 0.0;
  REQUIRE(uavris_result_metrics(res, &zeta, &gamma) == UAVRIS_OK);
  CHECK(gamma >= 0.0);
  int converged = 0, iters = 0;
  REQUIRE(uavris_result_converged(res, &converged, &iters) == UAVRIS_OK);
  CHECK(iters >= 1);

  char* s = nullptr;
  REQUIRE(uavris_result_trace_csv(res, &s) == UAVRIS_OK);
  const std::string trace = take(s);
  CHECK(trace.rfind("iteration,", 0) == 0);

  s = nullptr;
  REQUIRE(uavris_result_solution_json(res, &s) == UAVRIS_OK);
  const auto sol = nlohmann::json::parse(take(s));
  CHECK(sol.at("gamma").get<double>() == gamma);
  CHECK(sol.at("trajectory").size() == 5);  // N + 1 points

  s = nullptr;
  REQUIRE(uavris_result_trajectory_svg(res, &s) == UAVRIS_OK);
  CHECK(take(s).rfind("<svg", 0) == 0);
  s = nullptr;
  REQUIRE(uavris_result_convergence_svg(res, &s) == UAVRIS_OK);
  CHECK(take(s).rfind("<svg", 0) == 0);

  uavris_result_free(res);
  uavris_scenario_free(sc);
}

TEST_CASE("baseline flag switches the model") {
  uavris_scenario* sc = nullptr;
  REQUIRE(uavris_scenario_parse(kMiniConfig, &sc) == UAVRIS_OK);
  uavris_run_options opts{1, 1, 0};
  uavris_result* res = nullptr;
  REQUIRE(uavris_run(sc, &opts, &res) == UAVRIS_OK);
  double gamma = 0.0;
  REQUIRE(uavris_result_metrics(res, nullptr, &gamma) == UAVRIS_OK);
  CHECK(gamma > 0.0);
  uavris_result_free(res);
  uavris_scenario_free(sc);
}

TEST_CASE("sweep over the element count") {
  uavris_scenario* sc = nullptr;
  REQUIRE(uavris_scenario_parse(kMiniConfig, &sc) == UAVRIS_OK);
  const double values[] = {2.0, 4.0};
  uavris_run_options opts{1, 0, 0};
  uavris_sweep* sw = nullptr;
  REQUIRE(uavris_sweep_run(sc, "M", values, 2, &opts, 0, 1, &sw) == UAVRIS_OK);
  char* s = nullptr;
  REQUIRE(uavris_sweep_csv(sw, &s) == UAVRIS_OK);
  const std::string csv = take(s);
  CHECK(csv.rfind("M,", 0) == 0);
  CHECK(csv.find("failed") == std::string::npos);
  s = nullptr;
  REQUIRE(uavris_sweep_svg(sw, &s) == UAVRIS_OK);
  CHECK(take(s).rfind("<svg", 0) == 0);
  uavris_sweep_free(sw);

  CHECK(uavris_sweep_run(sc, "bogus", values, 2, &opts, 0, 1, &sw) == UAVRIS_ERR_PARSE);
  uavris_scenario_free(sc);
}
