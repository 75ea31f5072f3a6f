#include "uavris/uavris.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "uavris/baseline_af.hpp"
#include "uavris/orchestrator.hpp"
#include "uavris/report.hpp"
#include "uavris/scenario.hpp"
#include "uavris/sweep.hpp"

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

uavris_status fail(uavris_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

template <typename Fn>
uavris_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const uavris::ConfigError& e) {
    return fail(UAVRIS_ERR_PARSE, e.what());
  } catch (const uavris::InfeasibleError& e) {
    return fail(UAVRIS_ERR_INFEASIBLE, e.what());
  } catch (const std::exception& e) {
    return fail(UAVRIS_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(UAVRIS_ERR_RUNTIME, "unknown failure");
  }
}

}  // namespace

struct uavris_scenario {
  uavris::ScenarioConfig cfg;
};

struct uavris_result {
  uavris::ScenarioConfig cfg;
  uavris::RunResult run;
  uavris::Trajectory initial;
};

struct uavris_sweep {
  uavris::SweepResult result;
};

extern "C" {

const char* uavris_version(void) { return "1.0.0"; }

const char* uavris_last_error(void) { return g_last_error.c_str(); }

void uavris_string_free(char* s) { std::free(s); }

uavris_status uavris_scenario_parse(const char* text, uavris_scenario** out) {
  if (text == nullptr || out == nullptr) return fail(UAVRIS_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    auto* sc = new uavris_scenario{uavris::parse_config(text)};
    *out = sc;
    return UAVRIS_OK;
  });
}

uavris_status uavris_scenario_default(uavris_scenario** out) {
  if (out == nullptr) return fail(UAVRIS_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new uavris_scenario{uavris::default_paper_scenario()};
    return UAVRIS_OK;
  });
}

uavris_status uavris_scenario_serialize(const uavris_scenario* sc, char** out_text) {
  if (sc == nullptr || out_text == nullptr) return fail(UAVRIS_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out_text = dup_string(uavris::serialize_config(sc->cfg));
    return *out_text != nullptr ? UAVRIS_OK : fail(UAVRIS_ERR_RUNTIME, "allocation failed");
  });
}

void uavris_scenario_free(uavris_scenario* sc) { delete sc; }

uavris_status uavris_run(const uavris_scenario* sc, const uavris_run_options* opts,
                         uavris_result** out) {
  if (sc == nullptr || out == nullptr) return fail(UAVRIS_ERR_ARGUMENT, "null argument");
  const int scheme = opts != nullptr ? opts->scheme : 1;
  const bool baseline = opts != nullptr && opts->baseline_af != 0;
  if (scheme != 1 && scheme != 2) return fail(UAVRIS_ERR_ARGUMENT, "scheme must be 1 or 2");
  return guarded([&] {
    auto res = std::make_unique<uavris_result>();
    res->cfg = sc->cfg;
    res->initial = uavris::initial_trajectory(sc->cfg);
    res->run = baseline ? uavris::run_baseline(sc->cfg)
                        : uavris::run_algorithm2(sc->cfg, scheme == 1 ? uavris::Scheme::one
                                                                      : uavris::Scheme::two);
    *out = res.release();
    return UAVRIS_OK;
  });
}

uavris_status uavris_result_metrics(const uavris_result* res, double* zeta, double* gamma) {
  if (res == nullptr) return fail(UAVRIS_ERR_ARGUMENT, "null argument");
  if (zeta != nullptr) *zeta = res->run.state.zeta;
  if (gamma != nullptr) *gamma = res->run.state.gamma;
  return UAVRIS_OK;
}

uavris_status uavris_result_converged(const uavris_result* res, int* converged,
                                      int* outer_iterations) {
  if (res == nullptr) return fail(UAVRIS_ERR_ARGUMENT, "null argument");
  if (converged != nullptr) *converged = res->run.trace.converged ? 1 : 0;
  if (outer_iterations != nullptr)
    *outer_iterations = static_cast<int>(res->run.trace.records.size());
  return UAVRIS_OK;
}

uavris_status uavris_result_trace_csv(const uavris_result* res, char** out) {
  if (res == nullptr || out == nullptr) return fail(UAVRIS_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = dup_string(res->run.trace.to_csv());
    return *out != nullptr ? UAVRIS_OK : fail(UAVRIS_ERR_RUNTIME, "allocation failed");
  });
}

uavris_status uavris_result_solution_json(const uavris_result* res, char** out) {
  if (res == nullptr || out == nullptr) return fail(UAVRIS_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = dup_string(uavris::solution_json(res->cfg, res->run.state, res->run.trace));
    return *out != nullptr ? UAVRIS_OK : fail(UAVRIS_ERR_RUNTIME, "allocation failed");
  });
}

uavris_status uavris_result_trajectory_svg(const uavris_result* res, char** out) {
  if (res == nullptr || out == nullptr) return fail(UAVRIS_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = dup_string(uavris::trajectory_svg(res->cfg, res->initial, res->run.state));
    return *out != nullptr ? UAVRIS_OK : fail(UAVRIS_ERR_RUNTIME, "allocation failed");
  });
}

uavris_status uavris_result_convergence_svg(const uavris_result* res, char** out) {
  if (res == nullptr || out == nullptr) return fail(UAVRIS_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    uavris::Series s;
    s.label = "objective";
    for (const auto& r : res->run.trace.records) {
      s.x.push_back(r.iteration);
      s.y.push_back(r.gamma);
    }
    *out = dup_string(uavris::convergence_svg({s}));
    return *out != nullptr ? UAVRIS_OK : fail(UAVRIS_ERR_RUNTIME, "allocation failed");
  });
}

void uavris_result_free(uavris_result* res) { delete res; }

uavris_status uavris_comparison_svg(const uavris_result* const* results,
                                    const char* const* labels, int count, char** out) {
  if (results == nullptr || labels == nullptr || out == nullptr || count < 1)
    return fail(UAVRIS_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    std::vector<uavris::Series> series;
    for (int i = 0; i < count; ++i) {
      if (results[i] == nullptr || labels[i] == nullptr)
        return fail(UAVRIS_ERR_ARGUMENT, "null result or label");
      uavris::Series s;
      s.label = labels[i];
      for (const auto& r : results[i]->run.trace.records) {
        s.x.push_back(r.iteration);
        s.y.push_back(r.gamma);
      }
      series.push_back(std::move(s));
    }
    *out = dup_string(uavris::convergence_svg(series));
    return *out != nullptr ? UAVRIS_OK : fail(UAVRIS_ERR_RUNTIME, "allocation failed");
  });
}

uavris_status uavris_sweep_run(const uavris_scenario* sc, const char* axis,
                               const double* values, int num_values,
                               const uavris_run_options* opts, int with_baseline, int jobs,
                               uavris_sweep** out) {
  if (sc == nullptr || axis == nullptr || values == nullptr || out == nullptr ||
      num_values < 1)
    return fail(UAVRIS_ERR_ARGUMENT, "null argument");
  const int scheme = opts != nullptr ? opts->scheme : 1;
  if (scheme != 1 && scheme != 2) return fail(UAVRIS_ERR_ARGUMENT, "scheme must be 1 or 2");
  return guarded([&] {
    auto sweep = std::make_unique<uavris_sweep>();
    sweep->result = uavris::run_sweep(
        sc->cfg, uavris::parse_sweep_axis(axis),
        std::vector<double>(values, values + num_values),
        scheme == 1 ? uavris::Scheme::one : uavris::Scheme::two, with_baseline != 0,
        jobs > 0 ? jobs : 1);
    *out = sweep.release();
    return UAVRIS_OK;
  });
}

uavris_status uavris_sweep_csv(const uavris_sweep* sw, char** out) {
  if (sw == nullptr || out == nullptr) return fail(UAVRIS_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = dup_string(uavris::sweep_csv(sw->result));
    return *out != nullptr ? UAVRIS_OK : fail(UAVRIS_ERR_RUNTIME, "allocation failed");
  });
}

uavris_status uavris_sweep_svg(const uavris_sweep* sw, char** out) {
  if (sw == nullptr || out == nullptr) return fail(UAVRIS_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = dup_string(uavris::sweep_svg(sw->result));
    return *out != nullptr ? UAVRIS_OK : fail(UAVRIS_ERR_RUNTIME, "allocation failed");
  });
}

void uavris_sweep_free(uavris_sweep* sw) { delete sw; }

}  // extern "C"
