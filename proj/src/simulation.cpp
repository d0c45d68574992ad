#include "octoarm/simulation.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "octoarm/csv.hpp"
#include "octoarm/environment.hpp"
#include "octoarm/sensing.hpp"

namespace octoarm {

namespace {

struct LoopFields {
  SensoryReading reading;  // target mode only
  ControlField control;
  std::vector<double> couple_grad;
  std::vector<double> fx, fy;
  double penetration = 0.0;
  double s_bar = 0.0;
  double min_rho = 0.0;
  double alpha_at_sbar = 0.0;
  double alpha_tip = 0.0;
};

LoopFields compute_fields(const Rod& rod, const RodState& st,
                          const Scenario& sc) {
  LoopFields f;
  const auto& EI = rod.node_bending_stiffness();
  const double ds = rod.ds();

  if (sc.control_mode == ControlMode::Target) {
    const Vec2 target = target_update(sc.target, st.time);
    f.reading = sense(st, target);
    const auto gain =
        gain_profile(f.reading.s_bar, EI, ds, sc.mu_tilde, sc.step_width);
    f.control = control_couple(f.reading, gain);
    f.s_bar = f.reading.s_bar;
    f.min_rho = f.reading.min_rho;
    f.alpha_at_sbar = f.reading.alpha[f.reading.closest_node];
    f.alpha_tip = f.reading.alpha.back();
  } else {
    // target at infinity: the whole arm is active
    const double s_bar = rod.geometry().rest_length;
    const auto gain = gain_profile(s_bar, EI, ds, sc.mu_tilde, sc.step_width);
    f.control = slope_feedback_couple(st, sc.slope, gain);
    f.s_bar = s_bar;
    f.min_rho = std::numeric_limits<double>::infinity();
    const double dir = std::atan(sc.slope);
    f.alpha_at_sbar = wrap_angle(dir - st.theta.back());
    f.alpha_tip = f.alpha_at_sbar;
  }

  f.couple_grad = couple_gradient(f.control.u, ds);

  const int n = st.n_nodes();
  f.fx.assign(n, 0.0);
  f.fy.assign(n, 0.0);
  if (sc.drag_enabled) {
    const ForceField drag = drag_force(st, sc.drag, rod.geometry());
    for (int i = 0; i < n; ++i) {
      f.fx[i] += drag.fx[i];
      f.fy[i] += drag.fy[i];
    }
  }
  if (!sc.obstacles.empty()) {
    const ContactResult contact =
        obstacle_force(st, sc.obstacles, rod.geometry());
    for (int i = 0; i < n; ++i) {
      f.fx[i] += contact.fx[i];
      f.fy[i] += contact.fy[i];
    }
    f.penetration = contact.max_penetration;
  }
  return f;
}

Frame make_frame(const RodState& st, const LoopFields& f) {
  Frame fr;
  fr.t = st.time;
  fr.x = st.x;
  fr.y = st.y;
  fr.theta = st.theta;
  fr.kappa = st.kappa;
  fr.u = f.control.u;
  fr.s_bar = f.s_bar;
  fr.min_rho = f.min_rho;
  fr.alpha_at_sbar = f.alpha_at_sbar;
  return fr;
}

}  // namespace

void closed_loop_step(Rod& rod, RodState& st, const Scenario& sc, double dt) {
  const LoopFields f = compute_fields(rod, st, sc);
  rod.step(st, f.fx, f.fy, f.couple_grad, dt);
}

SimulationResult simulate(const Scenario& sc) {
  sc.validate();
  if (!(sc.duration > 0.0))
    throw ConfigError("integration.duration: missing or not positive");
  Rod rod(sc.rod);
  RodState st = rod.state_from_curvature(sc.initial.curvature());

  const double dt = sc.dt > 0.0 ? sc.dt : rod.default_dt();
  const long stride = std::max<long>(1, std::lround(1.0 / (sc.output_hz * dt)));
  const long n_steps = std::max<long>(1, std::lround(sc.duration / dt));

  SimulationResult result;
  result.stats.dt = dt;
  result.stats.output_dt = stride * dt;
  result.stats.min_rho_over_run = std::numeric_limits<double>::infinity();
  result.frames.reserve(n_steps / stride + 2);

  const auto t_start = std::chrono::steady_clock::now();
  for (long i = 0; i < n_steps; ++i) {
    const LoopFields f = compute_fields(rod, st, sc);
    result.stats.min_rho_over_run =
        std::min(result.stats.min_rho_over_run, f.min_rho);
    result.stats.max_penetration =
        std::max(result.stats.max_penetration, f.penetration);
    if (i % stride == 0) result.frames.push_back(make_frame(st, f));
    try {
      rod.step(st, f.fx, f.fy, f.couple_grad, dt);
    } catch (const NumericalError& e) {
      result.stats.completed = false;
      result.stats.fail_time = e.time();
      result.stats.fail_reason = e.what();
      break;
    }
    result.stats.max_stretch =
        std::max(result.stats.max_stretch, st.max_stretch_dev);
    ++result.stats.steps;
  }

  // final snapshot on the uniform cadence
  const LoopFields f_end = compute_fields(rod, st, sc);
  result.stats.min_rho_over_run =
      std::min(result.stats.min_rho_over_run, f_end.min_rho);
  result.stats.max_penetration =
      std::max(result.stats.max_penetration, f_end.penetration);
  if (result.stats.completed && n_steps % stride == 0)
    result.frames.push_back(make_frame(st, f_end));

  result.stats.final_min_rho = f_end.min_rho;
  result.stats.final_cos_alpha_tip = std::cos(f_end.alpha_tip);
  result.stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  result.final_state = std::move(st);
  return result;
}

BendTrack bend_track_from_frames(const std::vector<Frame>& frames, double ds,
                                 double rest_length, double cutoff_hz) {
  const double nan = std::nan("");
  BendTrack track;
  const int nf = static_cast<int>(frames.size());
  track.t.resize(nf);
  track.s_bend.resize(nf);
  track.x.resize(nf);
  track.y.resize(nf);
  track.speed.assign(nf, nan);
  track.speed_filtered.assign(nf, nan);

  bool all_bent = nf > 0;
  for (int k = 0; k < nf; ++k) {
    const Frame& fr = frames[k];
    track.t[k] = fr.t;
    const auto loc = bend_location(fr.kappa, ds);
    if (!loc) {
      track.s_bend[k] = nan;
      track.x[k] = nan;
      track.y[k] = nan;
      all_bent = false;
      continue;
    }
    const double s = std::min(std::max(*loc, 0.0), rest_length);
    track.s_bend[k] = s;
    // linear interpolation of the centerline at the bend arclength
    const int n = static_cast<int>(fr.x.size());
    int i = std::min(static_cast<int>(s / ds), n - 2);
    const double frac = s / ds - i;
    track.x[k] = fr.x[i] + frac * (fr.x[i + 1] - fr.x[i]);
    track.y[k] = fr.y[i] + frac * (fr.y[i + 1] - fr.y[i]);
  }

  if (all_bent && nf >= 3) {
    track.speed = bend_velocity(track.t, track.x, track.y);
    const double fs = 1.0 / (track.t[1] - track.t[0]);
    if (nf > 9 && fs > 2.0 * cutoff_hz)
      track.speed_filtered = lowpass(track.speed, fs, cutoff_hz);
  }
  return track;
}

namespace {

std::vector<std::string> node_columns(const std::string& prefix, int n,
                                      const std::string& unit) {
  std::vector<std::string> cols(n);
  std::size_t width = 3;
  width = std::max(width, std::to_string(n - 1).size());
  for (int i = 0; i < n; ++i) {
    std::string num = std::to_string(i);
    num.insert(0, width - num.size(), '0');
    cols[i] = prefix + "_" + num + "_" + unit;
  }
  return cols;
}

}  // namespace

void write_run_outputs(const Scenario& sc, const SimulationResult& result,
                       const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const int n = sc.rod.n_nodes();
  const double ds = sc.rod.ds();

  {
    const std::vector<std::string> cols = {
        "n_elements",  "rest_length_m", "ds_m",       "dt_s",
        "output_dt_s", "duration_s",    "output_hz",  "mu_tilde_invm",
        "control_mode", "completed"};
    CsvWriter meta(out_dir / "run_meta.csv", cols);
    meta.row(std::vector<double>{
        static_cast<double>(sc.rod.n_elements), sc.rod.rest_length, ds,
        result.stats.dt, result.stats.output_dt, sc.duration, sc.output_hz,
        sc.mu_tilde, sc.control_mode == ControlMode::Slope ? 1.0 : 0.0,
        result.stats.completed ? 1.0 : 0.0});
  }

  {
    std::vector<std::string> cols = {"t_s"};
    for (const auto& group :
         {std::pair{"x", "m"}, std::pair{"y", "m"}, std::pair{"theta", "rad"},
          std::pair{"kappa", "invm"}, std::pair{"u", "Nm"}}) {
      const auto more = node_columns(group.first, n, group.second);
      cols.insert(cols.end(), more.begin(), more.end());
    }
    CsvWriter rod_csv(out_dir / "rod_series.csv", cols);
    std::vector<double> row(cols.size());
    for (const Frame& fr : result.frames) {
      std::size_t j = 0;
      row[j++] = fr.t;
      for (const auto* arr : {&fr.x, &fr.y, &fr.theta, &fr.kappa, &fr.u})
        for (double v : *arr) row[j++] = v;
      rod_csv.row(row);
    }
  }

  {
    const std::vector<std::string> cols = {"t_s", "s_bar_m", "rho_min_m",
                                           "alpha_sbar_rad"};
    CsvWriter sensor(out_dir / "sensor_series.csv", cols);
    for (const Frame& fr : result.frames)
      sensor.row(std::vector<double>{fr.t, fr.s_bar, fr.min_rho,
                                     fr.alpha_at_sbar});
  }

  {
    const BendTrack track =
        bend_track_from_frames(result.frames, ds, sc.rod.rest_length);
    const std::vector<std::string> cols = {
        "t_s",       "s_bend_m", "x_bend_m",
        "y_bend_m",  "speed_mps", "speed_filtered_mps"};
    CsvWriter bend(out_dir / "bend_track.csv", cols);
    for (std::size_t k = 0; k < track.t.size(); ++k)
      bend.row(std::vector<double>{track.t[k], track.s_bend[k], track.x[k],
                                   track.y[k], track.speed[k],
                                   track.speed_filtered[k]});
  }

  {
    std::ofstream summary(out_dir / "summary.txt");
    summary << "completed = " << (result.stats.completed ? "yes" : "no") << "\n"
            << "steps = " << result.stats.steps << "\n"
            << "dt = " << format_number(result.stats.dt) << " s\n"
            << "final_min_rho = " << format_number(result.stats.final_min_rho)
            << " m\n"
            << "min_rho_over_run = "
            << format_number(result.stats.min_rho_over_run) << " m\n"
            << "final_cos_alpha_tip = "
            << format_number(result.stats.final_cos_alpha_tip) << "\n"
            << "max_stretch_deviation = "
            << format_number(result.stats.max_stretch) << "\n"
            << "max_penetration = "
            << format_number(result.stats.max_penetration) << " m\n"
            << "wall_seconds = " << result.stats.wall_seconds << "\n";
  }

  if (!result.stats.completed) {
    std::ofstream fail(out_dir / "failure.txt");
    fail << "numerical failure at t = " << result.stats.fail_time << " s\n"
         << result.stats.fail_reason << "\n";
  }
}

RunStats run_scenario(const Scenario& sc, const std::filesystem::path& out) {
  const SimulationResult result = simulate(sc);
  write_run_outputs(sc, result, out);
  return result.stats;
}

}  // namespace octoarm
