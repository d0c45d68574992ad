#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "octoarm/postprocess.hpp"
#include "octoarm/rod.hpp"
#include "octoarm/scenario.hpp"

namespace octoarm {

// One output-cadence snapshot of a closed-loop run.
struct Frame {
  double t = 0.0;
  std::vector<double> x, y, theta, kappa;  // node arrays
  std::vector<double> u;                   // applied couple field [N m]
  double s_bar = 0.0;
  double min_rho = 0.0;
  double alpha_at_sbar = 0.0;
};

struct RunStats {
  double min_rho_over_run = 0.0;
  double final_min_rho = 0.0;
  double final_cos_alpha_tip = 0.0;
  double max_stretch = 0.0;       // max | |r_s| - 1 | over all steps
  double max_penetration = 0.0;   // [m]
  long steps = 0;
  double dt = 0.0;
  double output_dt = 0.0;
  double wall_seconds = 0.0;
  bool completed = true;
  double fail_time = 0.0;
  std::string fail_reason;
};

struct SimulationResult {
  std::vector<Frame> frames;
  RodState final_state;
  RunStats stats;
};

// Runs the closed loop: sense -> gain -> couple -> couple gradient -> drag
// and contact forces -> one Verlet step. Frames are recorded on a strictly
// uniform cadence (every k-th step). A numerical failure is recorded in
// stats (completed = false) and the frames gathered so far are kept.
SimulationResult simulate(const Scenario& scenario);

// One closed-loop step of an existing state under a scenario's control and
// environment (the target position follows state.time).
void closed_loop_step(Rod& rod, RodState& state, const Scenario& scenario,
                      double dt);

// Bend track of a frame series; entries are NaN where no bend exists. The
// speed column needs every frame to carry a bend and at least 3 frames; the
// filtered column additionally needs enough samples for the filter warm-up.
BendTrack bend_track_from_frames(const std::vector<Frame>& frames, double ds,
                                 double rest_length, double cutoff_hz = 1.0);

// Writes rod_series.csv, sensor_series.csv, bend_track.csv, run_meta.csv and
// summary.txt (plus failure.txt for an aborted run) into out_dir.
void write_run_outputs(const Scenario& scenario, const SimulationResult& result,
                       const std::filesystem::path& out_dir);

RunStats run_scenario(const Scenario& scenario,
                      const std::filesystem::path& out_dir);

}  // namespace octoarm
