#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sgc/experiment.hpp"

namespace sgc::run {

/// CSV with header "t,<state components>,<control components>,goal", values
/// printed with 17 significant digits.
void write_trajectory_csv(const sim::Trajectory& traj, std::span<const std::string> state_names,
                          std::span<const std::string> control_names,
                          const std::filesystem::path& path);

void write_events_json(const sim::Trajectory& traj, const std::filesystem::path& path);

void write_report_json(const RunReport& report, const std::filesystem::path& path);

void write_scan_json(double delta, double radius, int resolution,
                     const std::optional<sg::ScanResult>& result,
                     const std::filesystem::path& path);

/// Comparison table over run reports; writes a fixed-width text table and a
/// JSON array of rows.
void summarize(std::span<const std::filesystem::path> report_paths,
               const std::filesystem::path& text_out, const std::filesystem::path& json_out);

}  // namespace sgc::run
