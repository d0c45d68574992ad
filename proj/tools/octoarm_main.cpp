#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "octoarm/csv.hpp"
#include "octoarm/environment.hpp"
#include "octoarm/equilibrium.hpp"
#include "octoarm/pursuit.hpp"
#include "octoarm/scenario.hpp"
#include "octoarm/simulation.hpp"

namespace {

using namespace octoarm;

namespace fs = std::filesystem;

int cmd_simulate(const Scenario& sc, const fs::path& out) {
  const RunStats stats = run_scenario(sc, out);
  std::cout << "wrote " << (out / "rod_series.csv").string() << "\n"
            << "final min rho: " << format_number(stats.final_min_rho)
            << " m, min over run: " << format_number(stats.min_rho_over_run)
            << " m\n"
            << "final cos(alpha) at tip: "
            << format_number(stats.final_cos_alpha_tip) << "\n"
            << "max stretch deviation: " << format_number(stats.max_stretch)
            << ", max penetration: " << format_number(stats.max_penetration)
            << " m\n";
  if (!stats.completed) {
    std::cerr << "numerical failure at t = " << stats.fail_time << " s\n";
    return 2;
  }
  return 0;
}

void write_sweep(const SweepResult& res, const fs::path& path) {
  const std::vector<std::string> cols = {"mu_tilde_invm", "min_rho_m",
                                         "cos_alpha_tip", "success"};
  CsvWriter csv(path, cols);
  for (const SweepRow& row : res.rows)
    csv.row(std::vector<double>{row.mu_tilde, row.min_rho, row.cos_alpha_tip,
                                row.success ? 1.0 : 0.0});
}

int cmd_equilibrium(const Scenario& sc, const fs::path& out) {
  if (!sc.equilibrium)
    throw ConfigError("equilibrium subcommand needs an [equilibrium] section");
  const EquilibriumJob& job = *sc.equilibrium;
  const double s_bar = job.s_bar < 0.0 ? sc.rod.rest_length : job.s_bar;
  fs::create_directories(out);

  if (job.mode == "profile") {
    const EquilibriumProfile prof = integrate_equilibrium(
        job.rho0, job.alpha0, job.mu_tilde, s_bar, sc.rod);
    const std::vector<std::string> cols = {"s_m", "rho_m", "alpha_rad",
                                           "theta_rad", "x_m", "y_m"};
    CsvWriter csv(out / "equilibrium_profile.csv", cols);
    for (std::size_t k = 0; k < prof.s.size(); ++k)
      csv.row(std::vector<double>{prof.s[k], prof.rho[k], prof.alpha[k],
                                  prof.theta[k], prof.x[k], prof.y[k]});
    std::cout << "min rho: " << format_number(prof.min_rho) << " m at s = "
              << format_number(prof.s_at_min_rho) << " m"
              << (prof.captured ? " (captured)" : "") << "\n";
    return 0;
  }

  const bool reach = job.mode == "reach";
  const SweepResult res =
      reach ? verify_reach(job.rho0, job.eps, sc.rod, {}, job.alpha0)
            : verify_pointing(job.rho0, job.eps, sc.rod, {}, job.alpha0);
  write_sweep(res, out / (job.mode + "_sweep.csv"));
  for (const SweepRow& row : res.rows)
    std::cout << "mu_tilde " << format_number(row.mu_tilde) << ": min rho "
              << format_number(row.min_rho) << " m, cos alpha tip "
              << format_number(row.cos_alpha_tip)
              << (row.success ? "  [ok]" : "") << "\n";
  if (res.any_success)
    std::cout << "smallest sufficient mu_tilde: "
              << format_number(res.smallest_success_mu) << "\n";
  else
    std::cout << "no gain in the sweep met the tolerance\n";
  return 0;
}

int cmd_pursue(const Scenario& sc, const fs::path& out) {
  const SimulationResult result = simulate(sc);
  write_run_outputs(sc, result, out);
  if (!result.stats.completed) {
    std::cerr << "numerical failure at t = " << result.stats.fail_time << " s\n";
    return 2;
  }
  if (result.frames.size() < 3)
    throw ConfigError("pursue: run too short for a trajectory");

  const double ds = sc.rod.ds();
  TrajectorySeries sbar;
  double path_len = 0.0;
  for (std::size_t k = 0; k < result.frames.size(); ++k) {
    const Frame& fr = result.frames[k];
    const int node = static_cast<int>(std::lround(fr.s_bar / ds));
    sbar.t.push_back(fr.t);
    sbar.x.push_back(fr.x[node]);
    sbar.y.push_back(fr.y[node]);
    if (k > 0)
      path_len += std::hypot(sbar.x[k] - sbar.x[k - 1],
                             sbar.y[k] - sbar.y[k - 1]);
  }
  {
    CsvWriter csv(out / "sbar_traj.csv",
                  std::vector<std::string>{"t_s", "x_m", "y_m", "s_bar_m"});
    for (std::size_t k = 0; k < sbar.t.size(); ++k)
      csv.row(std::vector<double>{sbar.t[k], sbar.x[k], sbar.y[k],
                                  result.frames[k].s_bar});
  }

  const double duration = sbar.t.back() - sbar.t.front();
  const double v_pursuer = path_len / duration;
  if (!(v_pursuer > 0.0))
    throw ConfigError("pursue: the tracked point does not move");

  const double v_target = sc.target.velocity.norm();
  const double target_heading =
      v_target > 0.0 ? std::atan2(sc.target.velocity.y, sc.target.velocity.x)
                     : 0.0;
  const double dt = sbar.t[1] - sbar.t[0];

  // both baselines launch from the arm's initial closest point, aimed along
  // the local tangent
  const int node0 = static_cast<int>(std::lround(result.frames[0].s_bar / ds));
  PursuitAgent start;
  start.position = {result.frames[0].x[node0], result.frames[0].y[node0]};
  start.heading = result.frames[0].theta[node0];
  start.speed = v_pursuer;

  auto run_law = [&](bool classical) {
    TrajectorySeries traj;
    PursuitAgent agent = start;
    CsvWriter csv(out / (classical ? "pursuit_cp.csv" : "pursuit_mc.csv"),
                  std::vector<std::string>{"t_s", "x_m", "y_m", "heading_rad",
                                           "sigma_m", "phi_rad", "psi_rad",
                                           "steering_radps"});
    for (std::size_t k = 0; k < sbar.t.size(); ++k) {
      const double t = sbar.t[k];
      const Vec2 target = target_update(sc.target, t);
      const BearingGeometry g =
          bearing_geometry(agent, target, target_heading);
      double steer = 0.0;
      if (classical) {
        steer = cp_steering(g, agent.speed, v_target, sc.pursuit.chi,
                            sc.pursuit.capture_floor)
                    .value_or(0.0);
      } else {
        steer = mc_steering(g, agent.speed, v_target, sc.pursuit.chi);
      }
      traj.t.push_back(t);
      traj.x.push_back(agent.position.x);
      traj.y.push_back(agent.position.y);
      csv.row(std::vector<double>{t, agent.position.x, agent.position.y,
                                  agent.heading, g.sigma, g.phi, g.psi, steer});
      agent = unicycle_step(agent, steer, dt);
    }
    return traj;
  };

  const TrajectorySeries mc = run_law(false);
  const TrajectorySeries cp = run_law(true);
  const double rms_mc = trajectory_rms(sbar, mc);
  const double rms_cp = trajectory_rms(sbar, cp);
  {
    CsvWriter csv(out / "pursuit_rms.csv",
                  std::vector<std::string>{"rms_mc_m", "rms_cp_m",
                                           "pursuer_speed_mps"});
    csv.row(std::vector<double>{rms_mc, rms_cp, v_pursuer});
  }
  std::cout << "pursuer speed: " << format_number(v_pursuer) << " m/s\n"
            << "rms vs arm trajectory: motion camouflage "
            << format_number(rms_mc) << " m, classical pursuit "
            << format_number(rms_cp) << " m\n";
  return 0;
}

int cmd_bendprofile(const fs::path& run_dir, const fs::path& out,
                    double cutoff) {
  const CsvTable meta = read_csv(run_dir / "run_meta.csv");
  if (meta.rows.empty()) throw ConfigError("run_meta.csv has no rows");
  const int c_ds = meta.column("ds_m");
  const int c_len = meta.column("rest_length_m");
  const int c_n = meta.column("n_elements");
  if (c_ds < 0 || c_len < 0 || c_n < 0)
    throw ConfigError("run_meta.csv is missing grid columns");
  const double ds = meta.rows[0][c_ds];
  const double rest_length = meta.rows[0][c_len];

  const CsvTable rod = read_csv(run_dir / "rod_series.csv");
  const int n_nodes = static_cast<int>(meta.rows[0][c_n]) + 1;

  auto group = [&](const std::string& prefix) {
    std::vector<int> idx;
    for (std::size_t i = 0; i < rod.columns.size(); ++i)
      if (rod.columns[i].rfind(prefix + "_", 0) == 0) idx.push_back((int)i);
    if (static_cast<int>(idx.size()) != n_nodes)
      throw ConfigError("rod_series.csv: missing node columns for " + prefix);
    return idx;
  };
  const auto ix = group("x");
  const auto iy = group("y");
  const auto ith = group("theta");
  const auto ik = group("kappa");
  const auto iu = group("u");
  const int c_t = rod.column("t_s");
  if (c_t < 0) throw ConfigError("rod_series.csv: missing t_s");

  std::vector<Frame> frames(rod.rows.size());
  for (std::size_t r = 0; r < rod.rows.size(); ++r) {
    Frame& fr = frames[r];
    fr.t = rod.rows[r][c_t];
    fr.x.resize(n_nodes);
    fr.y.resize(n_nodes);
    fr.theta.resize(n_nodes);
    fr.kappa.resize(n_nodes);
    fr.u.resize(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
      fr.x[i] = rod.rows[r][ix[i]];
      fr.y[i] = rod.rows[r][iy[i]];
      fr.theta[i] = rod.rows[r][ith[i]];
      fr.kappa[i] = rod.rows[r][ik[i]];
      fr.u[i] = rod.rows[r][iu[i]];
    }
  }

  const BendTrack track =
      bend_track_from_frames(frames, ds, rest_length, cutoff);
  fs::create_directories(out);
  const std::vector<std::string> cols = {"t_s",      "s_bend_m",
                                         "x_bend_m", "y_bend_m",
                                         "speed_mps", "speed_filtered_mps"};
  CsvWriter csv(out / "bendprofile.csv", cols);
  for (std::size_t k = 0; k < track.t.size(); ++k)
    csv.row(std::vector<double>{track.t[k], track.s_bend[k], track.x[k],
                                track.y[k], track.speed[k],
                                track.speed_filtered[k]});
  std::cout << "wrote " << (out / "bendprofile.csv").string() << " ("
            << track.t.size() << " rows)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"planar soft-arm reach simulator"};
  app.require_subcommand(1);

  std::string config, out_flag, run_dir;
  std::vector<std::string> overrides;
  double cutoff = 1.0;

  auto add_config_opts = [&](CLI::App* sub) {
    sub->add_option("--config", config, "scenario config file")->required();
    sub->add_option("--out", out_flag, "output directory (overrides [output] dir)");
    sub->add_option("--override", overrides,
                    "config override section.key=value (repeatable)");
  };

  CLI::App* sim = app.add_subcommand("simulate", "run a closed-loop scenario");
  add_config_opts(sim);
  CLI::App* eq = app.add_subcommand("equilibrium",
                                    "steady-state profiles and gain sweeps");
  add_config_opts(eq);
  CLI::App* pur = app.add_subcommand(
      "pursue", "run a scenario and the point-pursuer baselines");
  add_config_opts(pur);
  CLI::App* bend = app.add_subcommand(
      "bendprofile", "bend track of an existing run directory");
  bend->add_option("--run", run_dir, "directory holding rod_series.csv")
      ->required();
  bend->add_option("--out", out_flag, "output directory (default: the run dir)");
  bend->add_option("--cutoff", cutoff, "low-pass cutoff [Hz]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }

  try {
    if (bend->parsed()) {
      const fs::path run = run_dir;
      return cmd_bendprofile(run, out_flag.empty() ? run : fs::path(out_flag),
                             cutoff);
    }
    Scenario sc = load_scenario(config, overrides);
    const fs::path out = out_flag.empty() ? fs::path(sc.out_dir)
                                          : fs::path(out_flag);
    if (sim->parsed()) return cmd_simulate(sc, out);
    if (eq->parsed()) return cmd_equilibrium(sc, out);
    if (pur->parsed()) return cmd_pursue(sc, out);
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
