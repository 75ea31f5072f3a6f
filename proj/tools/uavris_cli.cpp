// Batch front end for the secure UAV-relay optimizer. Talks to the shared
// library exclusively through the C interface; every artifact is fetched as
// a string and written in one pass so failures leave no partial output.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uavris/uavris.h"

namespace {

namespace fs = std::filesystem;

struct ScenarioDeleter {
  void operator()(uavris_scenario* p) const { uavris_scenario_free(p); }
};
struct ResultDeleter {
  void operator()(uavris_result* p) const { uavris_result_free(p); }
};
struct SweepDeleter {
  void operator()(uavris_sweep* p) const { uavris_sweep_free(p); }
};
using ScenarioPtr = std::unique_ptr<uavris_scenario, ScenarioDeleter>;
using ResultPtr = std::unique_ptr<uavris_result, ResultDeleter>;
using SweepPtr = std::unique_ptr<uavris_sweep, SweepDeleter>;

[[noreturn]] void die(const std::string& message, int code = 1) {
  std::cerr << "{\"error\": \"" << message << "\", \"code\": " << code << "}\n";
  std::exit(code);
}

void check(uavris_status st, const std::string& context) {
  if (st != UAVRIS_OK) die(context + ": " + uavris_last_error(), static_cast<int>(st));
}

std::string take_string(uavris_status st, char* s, const std::string& context) {
  check(st, context);
  std::string out(s != nullptr ? s : "");
  uavris_string_free(s);
  return out;
}

ScenarioPtr load_scenario(const std::string& config_path) {
  uavris_scenario* sc = nullptr;
  if (config_path.empty()) {
    check(uavris_scenario_default(&sc), "default scenario");
    return ScenarioPtr(sc);
  }
  std::ifstream in(config_path);
  if (!in) die("cannot read config file: " + config_path);
  std::stringstream buf;
  buf << in.rdbuf();
  check(uavris_scenario_parse(buf.str().c_str(), &sc), "parse " + config_path);
  return ScenarioPtr(sc);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) die("cannot write " + path.string());
  out << content;
}

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (...) {
      die("bad sweep value: " + item);
    }
  }
  if (out.empty()) die("no sweep values given");
  return out;
}

ResultPtr run_one(const uavris_scenario* sc, int scheme, bool baseline,
                  unsigned long long seed) {
  uavris_run_options opts{scheme, baseline ? 1 : 0, seed};
  uavris_result* res = nullptr;
  check(uavris_run(sc, &opts, &res), "optimization");
  return ResultPtr(res);
}

void emit_run_artifacts(const ResultPtr& res, const fs::path& out_dir) {
  char* s = nullptr;
  const std::string trace =
      take_string(uavris_result_trace_csv(res.get(), &s), s, "trace");
  s = nullptr;
  const std::string solution =
      take_string(uavris_result_solution_json(res.get(), &s), s, "solution");
  s = nullptr;
  const std::string traj_svg =
      take_string(uavris_result_trajectory_svg(res.get(), &s), s, "trajectory figure");
  s = nullptr;
  const std::string conv_svg =
      take_string(uavris_result_convergence_svg(res.get(), &s), s, "convergence figure");

  fs::create_directories(out_dir);
  write_file(out_dir / "trace.csv", trace);
  write_file(out_dir / "solution.json", solution);
  write_file(out_dir / "trajectory.svg", traj_svg);
  write_file(out_dir / "convergence.svg", conv_svg);
}

void print_summary(const ResultPtr& res, const std::string& label) {
  double zeta = 0.0, gamma = 0.0;
  int converged = 0, iters = 0;
  uavris_result_metrics(res.get(), &zeta, &gamma);
  uavris_result_converged(res.get(), &converged, &iters);
  std::cout << label << ": zeta = " << zeta << " bits/s/Hz, gamma = " << gamma
            << " (bits/s/Hz)/W, " << (converged ? "converged" : "iteration cap") << " in "
            << iters << " outer iterations\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secrecy energy efficiency optimizer for a UAV-carried reflecting relay"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  int scheme = 1;
  std::string baseline = "none";
  std::string axis;
  std::string values_csv;
  int jobs = 1;
  unsigned long long seed = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "scenario JSON (defaults to the built-in one)");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "seed recorded with the run");
  };

  CLI::App* run = app.add_subcommand("run", "optimize one scenario and emit artifacts");
  add_common(run);
  run->add_option("--scheme", scheme, "phase/trajectory scheme (1 or 2)")
      ->check(CLI::IsMember({1, 2}));
  run->add_option("--baseline", baseline, "none or af (relay instead of the surface)")
      ->check(CLI::IsMember({"none", "af"}));

  CLI::App* sweep = app.add_subcommand("sweep", "one run per parameter value");
  add_common(sweep);
  sweep->add_option("--scheme", scheme, "phase/trajectory scheme (1 or 2)")
      ->check(CLI::IsMember({1, 2}));
  sweep->add_option("--axis", axis, "H | alpha | Pk | M | vmax")->required();
  sweep->add_option("--values", values_csv, "comma-separated values")->required();
  sweep->add_option("--jobs", jobs, "concurrent sweep points");
  sweep->add_option("--baseline", baseline, "none or af (adds a baseline column)")
      ->check(CLI::IsMember({"none", "af"}));

  CLI::App* compare = app.add_subcommand("compare", "scheme 1 versus scheme 2");
  add_common(compare);

  CLI::App* base = app.add_subcommand("baseline", "optimized surface versus relay baseline");
  add_common(base);

  CLI11_PARSE(app, argc, argv);

  ScenarioPtr sc = load_scenario(config_path);
  const fs::path out(out_dir);

  if (run->parsed()) {
    ResultPtr res = run_one(sc.get(), scheme, baseline == "af", seed);
    emit_run_artifacts(res, out);
    print_summary(res, baseline == "af" ? "baseline" : "run");
    return 0;
  }

  if (sweep->parsed()) {
    const std::vector<double> values = parse_values(values_csv);
    uavris_run_options opts{scheme, 0, seed};
    uavris_sweep* sw = nullptr;
    check(uavris_sweep_run(sc.get(), axis.c_str(), values.data(),
                           static_cast<int>(values.size()), &opts, baseline == "af" ? 1 : 0,
                           jobs, &sw),
          "sweep");
    SweepPtr sweep_ptr(sw);
    char* s = nullptr;
    const std::string csv = take_string(uavris_sweep_csv(sw, &s), s, "sweep table");
    s = nullptr;
    const std::string svg = take_string(uavris_sweep_svg(sw, &s), s, "sweep figure");
    fs::create_directories(out);
    write_file(out / "sweep.csv", csv);
    write_file(out / "sweep.svg", svg);
    std::cout << "sweep over " << axis << " finished: " << values.size() << " points -> "
              << (out / "sweep.csv").string() << "\n";
    return 0;
  }

  if (compare->parsed()) {
    ResultPtr one = run_one(sc.get(), 1, false, seed);
    ResultPtr two = run_one(sc.get(), 2, false, seed);
    char* s = nullptr;
    const uavris_result* results[2] = {one.get(), two.get()};
    const char* labels[2] = {"scheme 1", "scheme 2"};
    const std::string svg =
        take_string(uavris_comparison_svg(results, labels, 2, &s), s, "comparison figure");
    fs::create_directories(out);
    emit_run_artifacts(one, out / "scheme1");
    emit_run_artifacts(two, out / "scheme2");
    write_file(out / "compare.svg", svg);
    print_summary(one, "scheme 1");
    print_summary(two, "scheme 2");
    return 0;
  }

  if (base->parsed()) {
    ResultPtr ris = run_one(sc.get(), 1, false, seed);
    ResultPtr af = run_one(sc.get(), 1, true, seed);
    char* s = nullptr;
    const uavris_result* results[2] = {ris.get(), af.get()};
    const char* labels[2] = {"with surface", "relay baseline"};
    const std::string svg =
        take_string(uavris_comparison_svg(results, labels, 2, &s), s, "comparison figure");
    fs::create_directories(out);
    emit_run_artifacts(ris, out / "with_ris");
    emit_run_artifacts(af, out / "baseline_af");
    write_file(out / "baseline.svg", svg);
    print_summary(ris, "with surface");
    print_summary(af, "relay baseline");
    return 0;
  }

  return 0;
}
