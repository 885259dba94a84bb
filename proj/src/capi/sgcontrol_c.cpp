#include "sgcontrol/sgcontrol.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "sgc/artifacts.hpp"
#include "sgc/errors.hpp"
#include "sgc/experiment.hpp"

namespace {

thread_local std::string g_last_error = "";

sgc_status fail(sgc_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

sgc_status translate_exception() {
  try {
    throw;
  } catch (const sgc::ConfigError& e) {
    std::string msg = e.what();
    if (e.line > 0) msg = "line " + std::to_string(e.line) + ": " + msg;
    return fail(SGC_ERROR_PARSE, msg);
  } catch (const std::invalid_argument& e) {
    return fail(SGC_ERROR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(SGC_ERROR_RUNTIME, e.what());
  } catch (...) {
    return fail(SGC_ERROR_RUNTIME, "unknown error");
  }
}

int term_to_c(sgc::sim::Termination t) {
  using T = sgc::sim::Termination;
  switch (t) {
    case T::Converged: return SGC_TERM_CONVERGED;
    case T::Horizon: return SGC_TERM_HORIZON;
    case T::EventStop: return SGC_TERM_EVENT_STOP;
    case T::EnteredC: return SGC_TERM_ENTERED_C;
    case T::SolverFailure: return SGC_TERM_SOLVER_FAILURE;
    case T::EnergyBlowup: return SGC_TERM_ENERGY_BLOWUP;
  }
  return SGC_TERM_HORIZON;
}

}  // namespace

struct sgc_experiment {
  sgc::run::ConfigSource source;
};

extern "C" {

const char* sgc_version(void) { return "1.0.0"; }

const char* sgc_last_error(void) { return g_last_error.c_str(); }

sgc_status sgc_experiment_load(const char* path, sgc_experiment** out) {
  if (!path || !out) return fail(SGC_ERROR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  try {
    auto exp = new sgc_experiment{sgc::run::ConfigSource::parse_file(path)};
    // Validate eagerly so load reports config defects, not run.
    try {
      sgc::run::build_experiment_config(exp->source);
    } catch (...) {
      delete exp;
      throw;
    }
    *out = exp;
    return SGC_OK;
  } catch (...) {
    return translate_exception();
  }
}

sgc_status sgc_experiment_load_string(const char* text, const char* label,
                                      sgc_experiment** out) {
  if (!text || !out) return fail(SGC_ERROR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  try {
    auto exp = new sgc_experiment{
        sgc::run::ConfigSource::parse_text(text, label ? label : "experiment")};
    try {
      sgc::run::build_experiment_config(exp->source);
    } catch (...) {
      delete exp;
      throw;
    }
    *out = exp;
    return SGC_OK;
  } catch (...) {
    return translate_exception();
  }
}

sgc_status sgc_experiment_override(sgc_experiment* exp, const char* key, const char* value) {
  if (!exp || !key || !value) return fail(SGC_ERROR_INVALID_ARGUMENT, "null argument");
  try {
    sgc::run::ConfigSource trial = exp->source;
    trial.set(key, value);
    sgc::run::build_experiment_config(trial);  // reject bad overrides immediately
    exp->source = std::move(trial);
    return SGC_OK;
  } catch (...) {
    return translate_exception();
  }
}

void sgc_experiment_free(sgc_experiment* exp) { delete exp; }

sgc_status sgc_experiment_run(sgc_experiment* exp, const char* out_dir, sgc_run_result* result) {
  if (!exp || !out_dir) return fail(SGC_ERROR_INVALID_ARGUMENT, "null argument");
  try {
    const auto cfg = sgc::run::build_experiment_config(exp->source);
    const auto rep = sgc::run::run_experiment(cfg, out_dir);
    if (result) {
      result->termination = term_to_c(rep.termination);
      result->converged = rep.termination == sgc::sim::Termination::Converged ? 1 : 0;
      result->convergence_time = rep.convergence_time;
      result->final_time = rep.final_time;
      result->final_goal = rep.final_goal;
      result->max_decrease_violation = rep.max_decrease_violation;
      result->max_control_norm = rep.max_control_norm;
      result->max_control_jump = rep.max_control_jump;
      result->event_count = static_cast<int>(rep.events.size());
      result->checks_enabled = static_cast<int>(rep.checks.size());
      int failed = 0;
      for (const auto& c : rep.checks) failed += c.passed ? 0 : 1;
      result->checks_failed = failed;
      result->experimental = rep.experimental ? 1 : 0;
    }
    return SGC_OK;
  } catch (...) {
    return translate_exception();
  }
}

sgc_status sgc_scan(const char* plant, double delta, double radius, int resolution,
                    const char* out_json_path, sgc_scan_result* result) {
  if (!plant) return fail(SGC_ERROR_INVALID_ARGUMENT, "null plant");
  try {
    const auto scan = sgc::run::run_scan(plant, delta, radius, resolution,
                                         out_json_path ? out_json_path : "");
    if (result) {
      result->empty_region = scan ? 0 : 1;
      result->a_lower_bound = scan ? scan->a_lower_bound : std::nan("");
      result->argmin[0] = scan ? scan->argmin[0] : std::nan("");
      result->argmin[1] = scan ? scan->argmin[1] : std::nan("");
      result->argmin[2] = scan ? scan->argmin[2] : std::nan("");
      result->admissible_count = scan ? scan->admissible_count : 0;
    }
    return SGC_OK;
  } catch (...) {
    return translate_exception();
  }
}

sgc_status sgc_summarize(const char* const* report_paths, size_t count,
                         const char* out_text_path, const char* out_json_path) {
  if (!report_paths || count == 0 || !out_text_path)
    return fail(SGC_ERROR_INVALID_ARGUMENT, "need report paths and a text output path");
  try {
    std::vector<std::filesystem::path> paths;
    paths.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      if (!report_paths[i]) return fail(SGC_ERROR_INVALID_ARGUMENT, "null report path");
      paths.emplace_back(report_paths[i]);
    }
    sgc::run::summarize(paths, out_text_path, out_json_path ? out_json_path : "");
    return SGC_OK;
  } catch (...) {
    return translate_exception();
  }
}

}  // extern "C"
