#include "wva/runner.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <numbers>
#include <set>
#include <thread>

#include "wva/fisher.hpp"
#include "wva/protocol.hpp"
#include "wva/zassenhaus.hpp"

namespace wva {

Experiment experiment_from_string(const std::string& name) {
  if (name == "estimate") return Experiment::estimate;
  if (name == "kick") return Experiment::kick;
  if (name == "flywheel") return Experiment::flywheel;
  if (name == "fisher") return Experiment::fisher;
  if (name == "decohere") return Experiment::decohere;
  if (name == "husimi") return Experiment::husimi;
  if (name == "zassenhaus-check") return Experiment::zassenhaus_check;
  throw ConfigError("experiment: unknown experiment '" + name + "'");
}

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::estimate: return "estimate";
    case Experiment::kick: return "kick";
    case Experiment::flywheel: return "flywheel";
    case Experiment::fisher: return "fisher";
    case Experiment::decohere: return "decohere";
    case Experiment::husimi: return "husimi";
    case Experiment::zassenhaus_check: return "zassenhaus-check";
  }
  return "?";
}

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "experiment", "output_dir",
      "params.lambda_coupling", "params.omega_g", "params.b_field_tesla",
      "params.k_scale", "params.theta_postselect", "params.t_star",
      "params.fock_cutoff", "params.zassenhaus_z", "params.omega_trap",
      "params.omega_qubit",
      "noise.damp_rate", "noise.nbar", "noise.dephase_rate", "noise.integrator_step",
      "noise.calibrate_target", "noise.calibrate_channel",
      "schedule.pulse_count", "schedule.window",
      "flywheel.n_kicks", "flywheel.oracle_diagnostic",
      "zassenhaus.steps", "zassenhaus.check_convergence", "zassenhaus.grid",
      "husimi.source", "husimi.re_min", "husimi.re_max", "husimi.im_min",
      "husimi.im_max", "husimi.resolution", "husimi.alpha_re", "husimi.alpha_im",
      "decohere.samples", "decohere.kick_diagnostic",
      "sweep.parameter", "sweep.min", "sweep.max", "sweep.points", "sweep.scale",
      "sweep.values",
  };
  return keys;
}

const std::set<std::string>& sweepable_keys() {
  static const std::set<std::string> keys = {
      "params.omega_g", "params.b_field_tesla", "params.k_scale",
      "params.theta_postselect", "params.lambda_coupling", "params.zassenhaus_z",
      "noise.damp_rate", "noise.dephase_rate", "schedule.pulse_count",
  };
  return keys;
}

ExperimentParams params_from_config(const ConfigMap& cfg, Experiment e) {
  ExperimentParams p = default_params();
  if (e != Experiment::estimate) {
    p.lambda_coupling = config_double_required(cfg, "params.lambda_coupling");
  } else {
    p.lambda_coupling = config_double(cfg, "params.lambda_coupling", p.lambda_coupling);
  }
  p.t_star = config_double(cfg, "params.t_star", std::numbers::pi / p.lambda_coupling);
  const bool has_omega = cfg.count("params.omega_g") > 0;
  const bool has_field = cfg.count("params.b_field_tesla") > 0;
  if (has_omega && has_field) {
    throw ConfigError("params.omega_g: conflicts with params.b_field_tesla; give one");
  }
  if (has_field) {
    p.omega_g = field_to_omega(config_double_required(cfg, "params.b_field_tesla"));
  } else {
    p.omega_g = config_double(cfg, "params.omega_g", p.omega_g);
  }
  p.k_scale = config_double(cfg, "params.k_scale", p.k_scale);
  p.theta_postselect = config_double(cfg, "params.theta_postselect", p.theta_postselect);
  p.zassenhaus_z = config_double(cfg, "params.zassenhaus_z", p.zassenhaus_z);
  p.layout.fock_cutoff = int(config_int(cfg, "params.fock_cutoff", p.layout.fock_cutoff));
  p.omega_trap = config_double(cfg, "params.omega_trap", 0.0);
  p.omega_qubit = config_double(cfg, "params.omega_qubit", 0.0);
  return p;
}

std::vector<double> resolve_sweep_grid(const ConfigMap& cfg) {
  if (cfg.count("sweep.values")) return config_double_list(cfg, "sweep.values");
  const double lo = config_double_required(cfg, "sweep.min");
  const double hi = config_double_required(cfg, "sweep.max");
  const long long points = config_int(cfg, "sweep.points", 0);
  if (points < 2) throw ConfigError("sweep.points: need at least 2 grid points");
  const std::string scale = config_string(cfg, "sweep.scale", "linear");
  std::vector<double> grid(static_cast<size_t>(points), 0.0);
  if (scale == "log") {
    if (!(lo > 0.0) || !(hi > 0.0)) throw ConfigError("sweep.min: log scale needs positive bounds");
    const double llo = std::log(lo), lhi = std::log(hi);
    for (long long i = 0; i < points; ++i) {
      grid[size_t(i)] = std::exp(llo + (lhi - llo) * double(i) / double(points - 1));
    }
  } else if (scale == "linear") {
    for (long long i = 0; i < points; ++i) {
      grid[size_t(i)] = lo + (hi - lo) * double(i) / double(points - 1);
    }
  } else {
    throw ConfigError("sweep.scale: expected 'linear' or 'log', got '" + scale + "'");
  }
  return grid;
}

void run_indexed(int n, const std::function<void(int)>& fn) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = std::min<unsigned>(hw, unsigned(n));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

Json complex_pair(Complex v) {
  Json a = Json::array();
  a.push(Json::num(v.real()));
  a.push(Json::num(v.imag()));
  return a;
}

Json kick_json(const KickResult& r, bool with_amplitudes) {
  Json j = Json::object();
  j.set("kick_index", Json::integer(r.kick_index));
  j.set("p_f", Json::num(r.p_f));
  j.set("cumulative_p", Json::num(r.cumulative_p));
  j.set("weak_value", Json::num(r.weak_value));
  j.set("predicted_alpha", complex_pair(r.predicted_alpha));
  j.set("meter_mean_a", complex_pair(meter_mean_a(r.meter_state)));
  j.set("meter_mean_n", Json::num(meter_mean_n(r.meter_state)));
  const MeterState target = coherent_state(r.meter_state.layout, r.predicted_alpha);
  j.set("fidelity_to_predicted", Json::num(fidelity(target, r.meter_state)));
  if (with_amplitudes) {
    Json amps = Json::array();
    for (int n = 0; n < r.meter_state.layout.fock_cutoff; ++n) {
      amps.push(complex_pair(r.meter_state.amplitudes(n)));
    }
    j.set("meter_amplitudes", std::move(amps));
  }
  return j;
}

struct ArtifactSink {
  std::filesystem::path dir;
  std::vector<std::string> names;

  void write(const std::string& name, const std::string& contents) {
    write_file((dir / name).string(), contents);
    names.push_back(name);
  }
};

// --- experiment bodies ----------------------------------------------------------

void run_estimate(const RunConfig& rc, ArtifactSink& sink) {
  const PhysicalConstants consts{};
  const StrengthEstimates e = strength_estimates(consts);
  Json j = Json::object();
  j.set("energy_eV", Json::num(e.energy_eV));
  j.set("field_tesla", Json::num(e.field_tesla));
  j.set("mashhoon_ratio", Json::num(e.mashhoon_ratio));
  j.set("omega_g_rad_s", Json::num(e.omega_g_rad_s));
  Json c = Json::object();
  c.set("hbar_eV_s", Json::num(consts.hbar_eV_s));
  c.set("c_m_s", Json::num(consts.c_m_s));
  c.set("g_earth_m_s2", Json::num(consts.g_earth_m_s2));
  c.set("mu_bohr_eV_T", Json::num(consts.mu_bohr_eV_T));
  c.set("sidereal_day_s", Json::num(consts.sidereal_day_s));
  j.set("constants", std::move(c));
  (void)rc;
  sink.write("estimate.json", j.dump());
}

std::vector<double> kick_row(const RunConfig& rc, double swept) {
  const KickResult r = single_kick(rc.params);
  const Complex a = meter_mean_a(r.meter_state);
  const MeterState target = coherent_state(rc.params.layout, r.predicted_alpha);
  return {swept,
          r.p_f,
          r.predicted_alpha.real(),
          r.predicted_alpha.imag(),
          a.real(),
          a.imag(),
          fidelity(target, r.meter_state)};
}

void run_kick(const RunConfig& rc, ArtifactSink& sink) {
  const KickResult r = single_kick(rc.params);
  Json j = kick_json(r, true);
  j.set("weak_regime_margin", Json::num(weak_regime_margin(rc.params)));
  sink.write("kick.json", j.dump());
}

void run_flywheel(const RunConfig& rc, ArtifactSink& sink) {
  const auto traj = flywheel_trajectory(rc.params, rc.n_kicks);
  Json kicks = Json::array();
  std::string csv = csv_row({"kick_index", "p_f", "cumulative_p", "mean_a_re", "mean_a_im",
                             "predicted_re", "predicted_im", "fidelity_to_predicted"});
  for (const auto& r : traj) {
    kicks.push(kick_json(r, false));
    const Complex a = meter_mean_a(r.meter_state);
    const MeterState target = coherent_state(rc.params.layout, r.predicted_alpha);
    csv += csv_row_numeric({double(r.kick_index), r.p_f, r.cumulative_p, a.real(), a.imag(),
                            r.predicted_alpha.real(), r.predicted_alpha.imag(),
                            fidelity(target, r.meter_state)});
  }
  Json j = Json::object();
  j.set("n_kicks", Json::integer(rc.n_kicks));
  j.set("kicks", std::move(kicks));
  j.set("final", kick_json(traj.back(), true));
  if (rc.oracle_diagnostic) {
    Json d = Json::object();
    d.set("steps", Json::integer(rc.oracle_steps));
    d.set("first_kick_fidelity",
          Json::num(oracle_kick_fidelity(rc.params, meter_vacuum(rc.params.layout),
                                         rc.oracle_steps)));
    d.set("second_kick_fidelity",
          Json::num(oracle_kick_fidelity(rc.params, traj.front().meter_state,
                                         rc.oracle_steps)));
    j.set("oracle_kick_fidelity", std::move(d));
  }
  sink.write("flywheel.json", j.dump());
  sink.write("flywheel_kicks.csv", csv);
}

const char* kFisherHeader =
    "gamma,f_total,f_meter,f_postselect,retention,discard_fraction,f_meter_fd,"
    "f_postselect_fd";

std::vector<double> fisher_row_values(const FisherReport& r) {
  return {r.gamma,     r.f_total,          r.f_meter,    r.f_postselect,
          r.retention, r.discard_fraction, r.f_meter_fd, r.f_postselect_fd};
}

void run_fisher(const RunConfig& rc, ArtifactSink& sink) {
  const FisherReport r = fisher_budget(rc.params);
  Json j = Json::object();
  j.set("gamma", Json::num(r.gamma));
  j.set("theta", Json::num(r.theta));
  j.set("weak_value", Json::num(r.weak_value));
  j.set("z", Json::num(r.z));
  j.set("f_total", Json::num(r.f_total));
  j.set("f_meter", Json::num(r.f_meter));
  j.set("f_postselect", Json::num(r.f_postselect));
  j.set("retention", Json::num(r.retention));
  j.set("discard_fraction", Json::num(r.discard_fraction));
  j.set("f_meter_fd", Json::num(r.f_meter_fd));
  j.set("f_postselect_fd", Json::num(r.f_postselect_fd));
  sink.write("fisher.json", j.dump());
  std::string csv = std::string(kFisherHeader) + "\n";
  csv += csv_row_numeric(fisher_row_values(r));
  sink.write("fisher.csv", csv);
}

struct DecohereOutcome {
  NoiseParams noise;
  std::vector<std::pair<double, double>> curve;
  double t_star_sample = 0.0;
  double fidelity_at_t_star = 0.0;
};

DecohereOutcome decohere_core(const RunConfig& rc) {
  DecohereOutcome out;
  out.noise = rc.noise;
  if (rc.calibrate_target) {
    // calibration runs with nbar = 0, where the dynamics from |up,0> never
    // populates n > 1; a 4-level meter is exact and much faster
    ExperimentParams cal_space = rc.params;
    cal_space.layout.fock_cutoff = std::min(cal_space.layout.fock_cutoff, 4);
    const NoiseParams calibrated =
        calibrate_damping(*rc.calibrate_target, cal_space, rc.params.t_star,
                          rc.calibrate_channel, rc.noise.integrator_step);
    out.noise.damp_rate = calibrated.damp_rate;
    out.noise.dephase_rate = calibrated.dephase_rate;
  }
  out.curve = fidelity_curve(rc.params, out.noise, rc.schedule, rc.decohere_samples);
  const double window = rc.schedule.resolved_window(rc.params);
  const double frac = std::min(1.0, rc.params.t_star / window);
  const size_t idx = size_t(std::lround(frac * double(rc.decohere_samples - 1)));
  out.t_star_sample = out.curve[idx].first;
  out.fidelity_at_t_star = out.curve[idx].second;
  return out;
}

Json degraded_kick_json(const DegradedKick& dk) {
  Json j = Json::object();
  j.set("p_f", Json::num(dk.p_f));
  j.set("mean_a", complex_pair(dk.mean_a));
  j.set("amplification", Json::num(dk.amplification));
  j.set("ideal_weak_value", Json::num(dk.ideal_weak_value));
  return j;
}

void run_decohere(const RunConfig& rc, ArtifactSink& sink) {
  const DecohereOutcome out = decohere_core(rc);
  std::string csv = csv_row({"t_seconds", "fidelity"});
  for (const auto& [t, f] : out.curve) csv += csv_row_numeric({t, f});
  sink.write("fidelity_curve.csv", csv);

  Json j = Json::object();
  j.set("pulse_count", Json::integer(rc.schedule.pulse_count));
  j.set("window_seconds", Json::num(rc.schedule.resolved_window(rc.params)));
  j.set("damp_rate", Json::num(out.noise.damp_rate));
  j.set("nbar", Json::num(out.noise.nbar));
  j.set("dephase_rate", Json::num(out.noise.dephase_rate));
  j.set("calibrated", Json::boolean(rc.calibrate_target.has_value()));
  if (rc.calibrate_target) {
    j.set("calibrate_target", Json::num(*rc.calibrate_target));
    j.set("calibrate_channel", Json::str(rc.calibrate_channel == NoiseChannel::damping
                                             ? "damping"
                                             : "dephasing"));
  }
  j.set("t_star_sample", Json::num(out.t_star_sample));
  j.set("fidelity_at_t_star", Json::num(out.fidelity_at_t_star));
  if (rc.kick_diagnostic) {
    // amplification that survives one noisy kick, with and without pulses
    Json d = Json::object();
    d.set("no_pulses", degraded_kick_json(degraded_kick(rc.params, out.noise, PDDSchedule{})));
    if (rc.schedule.pulse_count > 0) {
      d.set("with_schedule",
            degraded_kick_json(degraded_kick(rc.params, out.noise, rc.schedule)));
    }
    j.set("degraded_kick", std::move(d));
  }
  sink.write("decohere.json", j.dump());
}

QGrid husimi_source_grid(const RunConfig& rc) {
  if (rc.husimi_source == "vacuum") {
    return husimi_q(meter_vacuum(rc.params.layout), rc.husimi_spec);
  }
  if (rc.husimi_source == "coherent") {
    return husimi_q(coherent_state(rc.params.layout, rc.husimi_alpha), rc.husimi_spec);
  }
  if (rc.husimi_source == "kick") {
    return husimi_q(single_kick(rc.params).meter_state, rc.husimi_spec);
  }
  if (rc.husimi_source == "flywheel") {
    return husimi_q(flywheel(rc.params, rc.n_kicks).meter_state, rc.husimi_spec);
  }
  if (rc.husimi_source == "noisy_kick") {
    return husimi_q(degraded_kick(rc.params, rc.noise, rc.schedule).meter, rc.husimi_spec);
  }
  throw ConfigError(
      "husimi.source: expected vacuum|coherent|kick|flywheel|noisy_kick, got '" +
      rc.husimi_source + "'");
}

void run_husimi(const RunConfig& rc, ArtifactSink& sink) {
  const QGrid g = husimi_source_grid(rc);

  std::string csv;
  for (int i = 0; i < g.resolution; ++i) {
    std::vector<double> row(size_t(g.resolution));
    for (int j = 0; j < g.resolution; ++j) row[size_t(j)] = g.values(i, j);
    csv += csv_row_numeric(row);
  }
  sink.write("husimi_grid.csv", csv);

  Json j = Json::object();
  j.set("re_min", Json::num(g.re_min));
  j.set("re_max", Json::num(g.re_max));
  j.set("im_min", Json::num(g.im_min));
  j.set("im_max", Json::num(g.im_max));
  j.set("resolution", Json::integer(g.resolution));
  j.set("row_axis", Json::str("im"));
  j.set("col_axis", Json::str("re"));
  j.set("peak", complex_pair(g.peak));
  j.set("mass", Json::num(g.mass));
  j.set("auto_extended", Json::boolean(g.auto_extended));
  Json markers = Json::array();
  if (rc.husimi_source == "kick" || rc.husimi_source == "flywheel" ||
      rc.husimi_source == "noisy_kick") {
    Json m = Json::object();
    m.set("symbol", Json::str("x"));
    m.set("at", complex_pair(Complex(0.0, 0.0)));
    m.set("label", Json::str("initial state centre"));
    markers.push(std::move(m));
  }
  if (rc.husimi_source == "flywheel" && rc.n_kicks >= 2) {
    const Complex alpha1 =
        rc.params.zassenhaus_z * rc.params.gamma() * rc.params.weak_value();
    Json m = Json::object();
    m.set("symbol", Json::str("+"));
    m.set("at", complex_pair(double(rc.n_kicks - 1) * alpha1));
    m.set("label", Json::str("previous kick centre"));
    markers.push(std::move(m));
  }
  j.set("markers", std::move(markers));
  sink.write("husimi_meta.json", j.dump());
}

void run_zassenhaus_check(const RunConfig& rc, ArtifactSink& sink) {
  const ZassenhausSeries series = build_series(rc.params);
  const ZAdjudication adj = adjudicate_z(rc.params, rc.plateau_grid, rc.oracle_steps);

  if (rc.oracle_check_convergence) {
    // Step-doubling convergence witness at the default scaled test point.
    ExperimentParams p = rc.params;
    p.omega_g = 1e-4 / (p.t_star * p.k_scale);
    oracle_propagator(p, rc.oracle_steps, true);
  }

  Json j = Json::object();
  Json orders = Json::array();
  for (const auto& o : series.orders) {
    Json row = Json::object();
    row.set("order", Json::integer(o.order));
    row.set("coefficient", Json::num(o.coefficient));
    orders.push(std::move(row));
  }
  j.set("orders", std::move(orders));
  j.set("z_sum", Json::num(series.z_sum));
  j.set("truncation_ratio", Json::num(series.truncation_ratio));
  j.set("reference_z", Json::num(adj.reference_z));

  Json oracle = Json::object();
  oracle.set("steps", Json::integer(rc.oracle_steps));
  Json plateau = Json::array();
  for (const auto& pt : adj.plateau) {
    Json row = Json::object();
    row.set("omega_g_t_star", Json::num(pt.omega_g_t_star));
    row.set("ratio", complex_pair(pt.ratio));
    row.set("ratio_abs", Json::num(std::abs(pt.ratio)));
    row.set("kick_abs", Json::num(std::abs(pt.kick)));
    plateau.push(std::move(row));
  }
  oracle.set("plateau", std::move(plateau));
  oracle.set("z_estimate", Json::num(adj.z_estimate));
  oracle.set("flatness", Json::num(adj.flatness));
  oracle.set("plateau_flat", Json::boolean(adj.plateau_flat));
  oracle.set("kick_scaling_exponent", Json::num(adj.kick_scaling_exponent));
  oracle.set("matches_reference", Json::boolean(adj.matches_reference));
  j.set("oracle", std::move(oracle));

  if (!adj.matches_reference || !adj.plateau_flat) {
    Json d = Json::object();
    d.set("kind", Json::str("zassenhaus-z-discrepancy"));
    d.set("reference_z", Json::num(adj.reference_z));
    d.set("series_z", Json::num(adj.series_z));
    d.set("oracle_z_estimate", Json::num(adj.z_estimate));
    d.set("plateau_flat", Json::boolean(adj.plateau_flat));
    d.set("flatness", Json::num(adj.flatness));
    d.set("kick_scaling_exponent", Json::num(adj.kick_scaling_exponent));
    d.set("note", Json::str("oracle kick amplitude scales quadratically with the "
                            "detuning at lambda t* = pi; no first-order plateau exists, "
                            "so the quoted constant is not reproduced"));
    j.set("discrepancy", std::move(d));
  } else {
    j.set("discrepancy", Json::null());
  }
  sink.write("zassenhaus_check.json", j.dump());
}

// --- sweep ----------------------------------------------------------------------

struct SweepTable {
  std::string header;
  std::vector<std::vector<double>> rows;
};

SweepTable sweep_core(const RunConfig& rc) {
  const SweepSpec& sweep = *rc.sweep;
  ConfigMap base = rc.raw;
  base.erase("sweep.parameter");
  base.erase("sweep.min");
  base.erase("sweep.max");
  base.erase("sweep.points");
  base.erase("sweep.scale");
  base.erase("sweep.values");

  SweepTable table;
  const int n = int(sweep.values.size());
  table.rows.resize(size_t(n));
  switch (rc.experiment) {
    case Experiment::kick:
      table.header = sweep.parameter +
                     ",p_f,predicted_re,predicted_im,mean_a_re,mean_a_im,"
                     "fidelity_to_predicted";
      break;
    case Experiment::fisher:
      table.header = sweep.parameter + "," + kFisherHeader;
      break;
    case Experiment::decohere:
      table.header = sweep.parameter + ",rate_damping,rate_dephasing,fidelity_at_t_star";
      break;
    default:
      throw ConfigError("sweep.parameter: experiment '" + to_string(rc.experiment) +
                        "' does not support sweeps");
  }

  run_indexed(n, [&](int i) {
    ConfigMap point = base;
    point[sweep.parameter] = format_double(sweep.values[size_t(i)]);
    RunConfig prc = parse_run_config(rc.experiment, point, rc.output_dir);
    switch (rc.experiment) {
      case Experiment::kick:
        table.rows[size_t(i)] = kick_row(prc, sweep.values[size_t(i)]);
        break;
      case Experiment::fisher: {
        std::vector<double> row{sweep.values[size_t(i)]};
        const auto vals = fisher_row_values(fisher_budget(prc.params));
        row.insert(row.end(), vals.begin(), vals.end());
        table.rows[size_t(i)] = std::move(row);
        break;
      }
      case Experiment::decohere: {
        const DecohereOutcome out = decohere_core(prc);
        table.rows[size_t(i)] = {sweep.values[size_t(i)], out.noise.damp_rate,
                                 out.noise.dephase_rate, out.fidelity_at_t_star};
        break;
      }
      default: break;
    }
  });
  return table;
}

void run_sweep(const RunConfig& rc, ArtifactSink& sink) {
  const SweepTable table = sweep_core(rc);
  std::string csv = table.header + "\n";
  for (const auto& row : table.rows) csv += csv_row_numeric(row);
  sink.write(to_string(rc.experiment) + "_sweep.csv", csv);
}

}  // namespace

RunConfig parse_run_config(const std::optional<Experiment>& experiment, ConfigMap cfg,
                           const std::string& output_dir_override) {
  for (const auto& [key, value] : cfg) {
    (void)value;
    if (!known_keys().count(key)) throw ConfigError(key + ": unknown config key");
  }

  RunConfig rc;
  const std::string cfg_exp = config_string(cfg, "experiment", "");
  if (!experiment && cfg_exp.empty()) {
    throw ConfigError("experiment: not given on the command line or in the config");
  }
  if (!cfg_exp.empty()) {
    rc.experiment = experiment_from_string(cfg_exp);
    if (experiment && *experiment != rc.experiment) {
      throw ConfigError("experiment: config says '" + cfg_exp +
                        "' but the command line requested '" + to_string(*experiment) + "'");
    }
  } else {
    rc.experiment = *experiment;
  }

  rc.params = params_from_config(cfg, rc.experiment);
  if (rc.experiment != Experiment::estimate) rc.params.validate();

  rc.noise.damp_rate = config_double(cfg, "noise.damp_rate", 0.0);
  rc.noise.nbar = config_double(cfg, "noise.nbar", 0.0);
  rc.noise.dephase_rate = config_double(cfg, "noise.dephase_rate", 0.0);
  rc.noise.integrator_step = config_double(cfg, "noise.integrator_step", 0.0);
  if (cfg.count("noise.calibrate_target")) {
    rc.calibrate_target = config_double_required(cfg, "noise.calibrate_target");
  }
  const std::string channel = config_string(cfg, "noise.calibrate_channel", "dephasing");
  if (channel == "damping") {
    rc.calibrate_channel = NoiseChannel::damping;
  } else if (channel == "dephasing") {
    rc.calibrate_channel = NoiseChannel::dephasing;
  } else {
    throw ConfigError("noise.calibrate_channel: expected damping|dephasing, got '" +
                      channel + "'");
  }

  rc.schedule.pulse_count = int(config_int(cfg, "schedule.pulse_count", 0));
  if (rc.schedule.pulse_count < 0) throw ConfigError("schedule.pulse_count: must be >= 0");
  rc.schedule.window = config_double(cfg, "schedule.window", 0.0);

  rc.n_kicks = int(config_int(cfg, "flywheel.n_kicks", 1));
  rc.oracle_diagnostic = config_bool(cfg, "flywheel.oracle_diagnostic", false);
  rc.oracle_steps = int(config_int(cfg, "zassenhaus.steps", 10000));
  rc.oracle_check_convergence = config_bool(cfg, "zassenhaus.check_convergence", true);
  rc.plateau_grid = config_double_list(cfg, "zassenhaus.grid");
  if (rc.plateau_grid.empty()) {
    rc.plateau_grid = {1e-5, 3.1622776601683795e-5, 1e-4, 3.1622776601683795e-4, 1e-3};
  }

  rc.husimi_source = config_string(cfg, "husimi.source", "kick");
  rc.husimi_spec.re_min = config_double(cfg, "husimi.re_min", 0.0);
  rc.husimi_spec.re_max = config_double(cfg, "husimi.re_max", 0.0);
  rc.husimi_spec.im_min = config_double(cfg, "husimi.im_min", 0.0);
  rc.husimi_spec.im_max = config_double(cfg, "husimi.im_max", 0.0);
  rc.husimi_spec.resolution = int(config_int(cfg, "husimi.resolution", 101));
  rc.husimi_alpha = Complex(config_double(cfg, "husimi.alpha_re", 0.0),
                            config_double(cfg, "husimi.alpha_im", 0.0));
  rc.decohere_samples = int(config_int(cfg, "decohere.samples", 90));
  rc.kick_diagnostic = config_bool(cfg, "decohere.kick_diagnostic", false);

  if (cfg.count("sweep.parameter")) {
    SweepSpec sweep;
    sweep.parameter = cfg.at("sweep.parameter");
    if (!sweepable_keys().count(sweep.parameter)) {
      throw ConfigError("sweep.parameter: '" + sweep.parameter + "' is not sweepable");
    }
    sweep.values = resolve_sweep_grid(cfg);
    rc.sweep = std::move(sweep);
  } else if (cfg.count("sweep.min") || cfg.count("sweep.values")) {
    throw ConfigError("sweep.parameter: required when sweep bounds are given");
  }

  if (!output_dir_override.empty()) {
    rc.output_dir = output_dir_override;
  } else {
    rc.output_dir = config_string(cfg, "output_dir", "");
    if (rc.output_dir.empty()) {
      const char* env = std::getenv("WVAMAG_OUTPUT_DIR");
      rc.output_dir = env && *env ? env : "out";
    }
  }

  // the manifest echoes the experiment definition only; the output directory
  // is environment, not physics, and must not perturb the config hash
  rc.raw = std::move(cfg);
  rc.raw["experiment"] = to_string(rc.experiment);
  rc.raw.erase("output_dir");
  return rc;
}

std::vector<std::string> run(const RunConfig& rc) {
  std::filesystem::create_directories(rc.output_dir);
  ArtifactSink sink{rc.output_dir, {}};

  if (rc.sweep) {
    run_sweep(rc, sink);
  } else {
    switch (rc.experiment) {
      case Experiment::estimate: run_estimate(rc, sink); break;
      case Experiment::kick: run_kick(rc, sink); break;
      case Experiment::flywheel: run_flywheel(rc, sink); break;
      case Experiment::fisher: run_fisher(rc, sink); break;
      case Experiment::decohere: run_decohere(rc, sink); break;
      case Experiment::husimi: run_husimi(rc, sink); break;
      case Experiment::zassenhaus_check: run_zassenhaus_check(rc, sink); break;
    }
  }

  Json manifest = Json::object();
  manifest.set("tool", Json::str(kToolName));
  manifest.set("version", Json::str(kToolVersion));
  manifest.set("experiment", Json::str(to_string(rc.experiment)));
  manifest.set("config_hash", Json::str(config_hash(rc.raw)));
  Json cfg = Json::object();
  for (const auto& [k, v] : rc.raw) cfg.set(k, Json::str(v));
  manifest.set("config", std::move(cfg));
  Json artifacts = Json::array();
  for (const auto& name : sink.names) artifacts.push(Json::str(name));
  manifest.set("artifacts", std::move(artifacts));
  sink.write("manifest.json", manifest.dump());
  return sink.names;
}

int run_cli(const std::optional<Experiment>& experiment, const std::string& config_path,
            const std::vector<std::string>& overrides, const std::string& output_dir) {
  try {
    ConfigMap cfg;
    if (!config_path.empty()) cfg = load_config_file(config_path);
    for (const auto& kv : overrides) apply_override(cfg, kv);
    const RunConfig rc = parse_run_config(experiment, std::move(cfg), output_dir);
    const auto artifacts = run(rc);
    for (const auto& name : artifacts) {
      std::cout << (std::filesystem::path(rc.output_dir) / name).string() << "\n";
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return int(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return int(ErrorCategory::numerical);
  }
}

}  // namespace wva
