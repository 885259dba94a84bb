#include "sgc/artifacts.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>

#include "sgc/errors.hpp"

namespace sgc::run {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

ordered_json num_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);  // binary: byte-stable artifacts
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

const char* plant_name(Plant p) {
  return p == Plant::Brockett ? "brockett" : "string";
}

}  // namespace

void write_trajectory_csv(const sim::Trajectory& traj, std::span<const std::string> state_names,
                          std::span<const std::string> control_names,
                          const std::filesystem::path& path) {
  std::string out;
  out.reserve(traj.samples.size() * 96 + 64);
  out += "t";
  for (const auto& n : state_names) out += "," + n;
  for (const auto& n : control_names) out += "," + n;
  out += ",goal\n";
  for (const auto& s : traj.samples) {
    out += fmt17(s.t);
    for (double v : s.x) {
      out += ',';
      out += fmt17(v);
    }
    for (double v : s.u) {
      out += ',';
      out += fmt17(v);
    }
    out += ',';
    out += fmt17(s.q);
    out += '\n';
  }
  write_text(path, out);
}

void write_events_json(const sim::Trajectory& traj, const std::filesystem::path& path) {
  ordered_json arr = ordered_json::array();
  for (const auto& ev : traj.events) {
    ordered_json e;
    e["name"] = ev.name;
    e["t"] = ev.t;
    e["state"] = ev.state;
    arr.push_back(std::move(e));
  }
  write_text(path, arr.dump(2) + "\n");
}

void write_report_json(const RunReport& report, const std::filesystem::path& path) {
  ordered_json j;
  j["label"] = report.label;
  j["plant"] = plant_name(report.plant);
  j["gamma"] = report.gamma;
  j["dt"] = report.dt;
  j["t_max"] = report.t_max;
  j["q_stop"] = report.q_stop;
  j["record_stride"] = report.record_stride;
  j["termination"] = sim::termination_name(report.termination);
  j["convergence_time"] = num_or_null(report.convergence_time);
  j["final_time"] = report.final_time;
  j["final_goal"] = num_or_null(report.final_goal);
  j["steps"] = report.steps;
  j["samples"] = report.samples;
  j["max_decrease_violation"] = report.max_decrease_violation;
  j["decrease_violations"] = report.decrease_violations;
  j["max_control_norm"] = num_or_null(report.max_control_norm);
  j["min_control_norm"] = num_or_null(report.min_control_norm);
  j["max_control_jump"] = report.max_control_jump;
  j["max_reduced_rate_error"] = num_or_null(report.max_reduced_rate_error);
  j["max_event_residual"] = num_or_null(report.max_event_residual);
  j["post_event_energy_drift"] = num_or_null(report.post_event_energy_drift);
  j["initial_energy"] = num_or_null(report.initial_energy);
  j["h_star"] = num_or_null(report.h_star);
  j["experimental"] = report.experimental;
  ordered_json evs = ordered_json::array();
  for (const auto& ev : report.events) {
    ordered_json e;
    e["name"] = ev.name;
    e["t"] = ev.t;
    evs.push_back(std::move(e));
  }
  j["events"] = std::move(evs);
  ordered_json checks = ordered_json::array();
  for (const auto& c : report.checks) {
    ordered_json e;
    e["name"] = c.name;
    e["passed"] = c.passed;
    e["value"] = num_or_null(c.value);
    e["threshold"] = c.threshold;
    checks.push_back(std::move(e));
  }
  j["checks"] = std::move(checks);
  j["all_checks_passed"] = report.all_checks_passed;
  write_text(path, j.dump(2) + "\n");
}

void write_scan_json(double delta, double radius, int resolution,
                     const std::optional<sg::ScanResult>& result,
                     const std::filesystem::path& path) {
  ordered_json j;
  j["delta"] = delta;
  j["radius"] = radius;
  j["resolution"] = resolution;
  j["empty_region"] = !result.has_value();
  if (result) {
    j["a_lower_bound"] = result->a_lower_bound;
    j["argmin_point"] = result->argmin;
    j["admissible_count"] = result->admissible_count;
  } else {
    j["a_lower_bound"] = nullptr;
    j["argmin_point"] = nullptr;
    j["admissible_count"] = 0;
  }
  write_text(path, j.dump(2) + "\n");
}

void summarize(std::span<const std::filesystem::path> report_paths,
               const std::filesystem::path& text_out, const std::filesystem::path& json_out) {
  if (report_paths.empty()) throw std::invalid_argument("summarize: need at least one report");

  ordered_json rows = ordered_json::array();
  for (const auto& p : report_paths) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot open report: " + p.string());
    ordered_json rep = ordered_json::parse(in);
    ordered_json row;
    row["label"] = rep.value("label", p.stem().string());
    row["plant"] = rep.value("plant", "");
    row["gamma"] = rep.value("gamma", 0.0);
    row["termination"] = rep.value("termination", "");
    row["convergence_time"] = rep.contains("convergence_time") ? rep["convergence_time"]
                                                               : ordered_json(nullptr);
    row["max_control_norm"] =
        rep.contains("max_control_norm") ? rep["max_control_norm"] : ordered_json(nullptr);
    row["max_decrease_violation"] = rep.value("max_decrease_violation", 0.0);
    row["all_checks_passed"] = rep.value("all_checks_passed", false);
    ordered_json evs = ordered_json::array();
    if (rep.contains("events"))
      for (const auto& e : rep["events"]) evs.push_back(e);
    row["events"] = evs;
    rows.push_back(std::move(row));
  }

  auto cell = [](const ordered_json& v) -> std::string {
    if (v.is_null()) return "-";
    if (v.is_number()) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.6g", v.get<double>());
      return buf;
    }
    if (v.is_boolean()) return v.get<bool>() ? "yes" : "no";
    return v.get<std::string>();
  };

  const std::vector<std::string> cols{"label",            "plant",
                                      "gamma",            "termination",
                                      "convergence_time", "max_control_norm",
                                      "checks"};
  std::vector<std::vector<std::string>> table;
  table.push_back(cols);
  for (const auto& row : rows) {
    table.push_back({cell(row["label"]), cell(row["plant"]), cell(row["gamma"]),
                     cell(row["termination"]), cell(row["convergence_time"]),
                     cell(row["max_control_norm"]),
                     row["all_checks_passed"].get<bool>() ? "pass" : "FAIL"});
  }
  std::vector<std::size_t> width(cols.size(), 0);
  for (const auto& r : table)
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  std::string text;
  for (std::size_t ri = 0; ri < table.size(); ++ri) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      text += table[ri][i];
      if (i + 1 < cols.size()) text.append(width[i] - table[ri][i].size() + 2, ' ');
    }
    text += '\n';
    if (ri == 0) {
      for (std::size_t i = 0; i < cols.size(); ++i)
        text.append(width[i] + (i + 1 < cols.size() ? 2 : 0), '-');
      text += '\n';
    }
  }

  write_text(text_out, text);
  if (!json_out.empty()) write_text(json_out, rows.dump(2) + "\n");
}

}  // namespace sgc::run
