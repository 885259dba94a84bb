#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sgc/assumption_scan.hpp"
#include "sgc/sim_engine.hpp"
#include "sgc/vec.hpp"
#include "sgc/vibrating_string.hpp"

namespace sgc::run {

/// Flat key = value experiment file, one key per line, '#' comments.
/// Parsed entries keep their line number for diagnostics; overrides win
/// over file values.
struct ConfigSource {
  std::string label;
  std::map<std::string, std::pair<std::string, int>> entries;

  static ConfigSource parse_file(const std::filesystem::path& path);
  static ConfigSource parse_text(const std::string& text, const std::string& label);
  void set(const std::string& key, const std::string& value);  // override, line 0
};

enum class Plant { Brockett, VibratingString };
enum class StringControlMode { Sign, Smooth };
enum class Check { Decrease, NormLaw, ReducedRates, EventResidual };
const char* check_name(Check c);

struct ExperimentConfig {
  std::string label;
  Plant plant = Plant::Brockett;
  double gamma = 0.1;

  Vec3 x0_brockett{0.0, 0.0, 0.0};
  Vec2 v_selector{1.0, 0.0};

  vibstring::Params string_params;
  Vec4 x0_string{0.0, 0.0, 0.0, 0.0};
  StringControlMode string_control = StringControlMode::Sign;

  double dt = 1e-3;
  double t_max = 100.0;
  double q_stop = 1e-10;  // ignored for the string plant (its target is an event)
  long record_stride = 1;
  double decrease_tol = 1e-6;
  std::vector<Check> checks;

  void validate() const;
};

/// Builds and validates a typed config; throws ConfigError with line/field
/// diagnostics on unknown keys, bad values or invariant violations.
ExperimentConfig build_experiment_config(const ConfigSource& source);

struct CheckOutcome {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
};

struct RunReport {
  std::string label;
  Plant plant = Plant::Brockett;
  sim::Termination termination = sim::Termination::Horizon;
  double convergence_time;  // NaN when the run did not converge
  double final_time = 0.0;
  double final_goal = 0.0;
  long steps = 0;
  long samples = 0;

  double max_decrease_violation = 0.0;
  long decrease_violations = 0;
  double max_control_norm = 0.0;  // over pre-convergence samples
  double min_control_norm = 0.0;
  double max_control_jump = 0.0;
  double max_reduced_rate_error;   // NaN unless the reduced-rates check ran
  double max_event_residual;       // NaN when no switching event fired
  double post_event_energy_drift;  // NaN unless a string event fired
  double initial_energy;           // NaN for non-string plants
  bool experimental = false;

  std::vector<sim::EventRecord> events;
  std::vector<CheckOutcome> checks;
  bool all_checks_passed = true;

  double gamma = 0.0, dt = 0.0, t_max = 0.0, q_stop = 0.0, h_star;
  long record_stride = 1;
};

/// Runs the experiment and writes trajectory.csv, events.json and
/// report.json into out_dir (created if missing).
RunReport run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

/// Same run without artifacts, for in-process consumers.
RunReport run_experiment_in_memory(const ExperimentConfig& cfg,
                                   sim::Trajectory* trajectory_out = nullptr);

/// Assumption-4 scan bound for the Brockett goal; excluded set is the
/// x3-axis minus the origin.
sg::ScanResult scan_brockett(const sg::AssumptionScanSpec& spec);

/// Scan entry point with the empty-region case reported as a structured
/// result instead of an error. Writes the JSON report when out_path is
/// non-empty.
std::optional<sg::ScanResult> run_scan(const std::string& plant, double delta, double radius,
                                       int resolution, const std::filesystem::path& out_path);

}  // namespace sgc::run
