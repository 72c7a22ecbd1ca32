#pragma once

#include <string>
#include <vector>

#include "tklab/experiments.hpp"

namespace tklab {

struct IoError : std::runtime_error {
  std::string path;
  IoError(const std::string& what, std::string file)
      : std::runtime_error(what + ": " + file), path(std::move(file)) {}
};

/// Columns, in order: t, theta_1..theta_N, temp_1..temp_N, entropy,
/// phase_diameter, temp_diameter, order_parameter, conserved_g, phase_sum.
/// Values carry 17 significant digits so a round trip is lossless.
void write_trajectory_csv(const TkTrajectory& traj, const std::string& path);

/// Rebuilds a trajectory from the CSV columns; observables are taken from
/// the file, not recomputed, so params may be left at defaults.
TkTrajectory read_trajectory_csv(const std::string& path);

void write_report_json(const VerificationReport& report,
                       const std::string& path);

std::string report_to_json(const VerificationReport& report);

void write_aggregate_json(const AggregateReport& report,
                          const std::string& path);

std::string aggregate_to_json(const AggregateReport& report);

struct PlotOptions {
  bool log_scale = false;  // log10 of |value| clipped at 1e-16
  int width = 900;
  int height = 540;
};

/// Renders the named channels of a trajectory CSV selection as SVG
/// polylines. Channel names match the CSV header fields.
void plot_svg(const TkTrajectory& traj,
              const std::vector<std::string>& channels,
              const std::string& path, const PlotOptions& options = {});

}  // namespace tklab
