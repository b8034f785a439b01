// Command-line driver: trajectory simulation, analytic rates, Bayesian
// state updates, Q-function maps, estimator comparison, calibration.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "cqed/harness.hpp"
#include "cqed/io.hpp"
#include "cqed/polaron.hpp"
#include "cqed/qfunc.hpp"

namespace fs = std::filesystem;
using namespace cqed;

namespace {

int cmd_simulate(const std::string& config_path, std::uint64_t seed,
                 const std::string& out_dir, std::uint64_t traj,
                 bool dump_states) {
  SimConfig cfg = load_sim_config(config_path);
  cfg.seed = seed;
  cfg.store_snapshots = dump_states;
  fs::create_directories(out_dir);
  const TrajectoryResult res = run_trajectory(cfg, traj);
  write_record(out_dir + "/record.csv", res.record, cfg);
  write_text(out_dir + "/final_state.json",
             state_dump(res.final_state).dump(2) + "\n");
  if (dump_states) {
    nlohmann::json snaps = nlohmann::json::array();
    for (const auto& s : res.snapshots) {
      nlohmann::json e = state_dump(s.state);
      e["t"] = s.t;
      snaps.push_back(std::move(e));
    }
    write_text(out_dir + "/snapshots.json", snaps.dump(2) + "\n");
  }
  std::cout << "wrote " << out_dir << "/record.csv (" << res.record.steps()
            << " steps)\n";
  return 0;
}

int cmd_rates(const std::string& config_path, const std::string& out_path,
              double t_end, double dt) {
  const SimConfig cfg = load_sim_config(config_path);
  const double t_abs = (t_end > 0.0 ? t_end : cfg.t_end) / cfg.params.kappa;
  const double dt_abs = (dt > 0.0 ? dt : 0.01) / cfg.params.kappa;
  write_text(out_path,
             rates_csv(cfg.params, cfg.initial_cavity, t_abs, dt_abs));
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_bayes(const std::string& record_path, const std::string& config_path,
              const std::string& variant, double tm, double prior_gg,
              double prior_re, double prior_im, const std::string& scale) {
  const SimConfig cfg = load_sim_config(config_path);
  const TrajectoryRecord rec = read_record(record_path);
  BayesInput in;
  in.prior.rho_gg = prior_gg;
  in.prior.rho_ee = 1.0 - prior_gg;
  in.prior.rho_ge = Complex(prior_re, prior_im);
  in.t_m = tm / cfg.params.kappa;
  in.params = cfg.params;
  in.alpha0 = cfg.initial_cavity;
  in.scheme = rec.scheme;
  in.variant = parse_estimator(variant).variant;
  in.ablation = parse_estimator(variant).ablation;
  in.phi2_scale =
      scale == "unscaled" ? Phi2Scale::unscaled : Phi2Scale::time_scaled;
  in.record = &rec;
  const BayesResult res = update_full(in);
  nlohmann::json j;
  j["rho_gg"] = res.posterior.rho_gg;
  j["rho_ee"] = res.posterior.rho_ee;
  j["re_ge"] = res.posterior.rho_ge.real();
  j["im_ge"] = res.posterior.rho_ge.imag();
  j["phi1"] = res.phi1;
  j["phi2"] = res.phi2;
  j["purity_factor"] = res.purity_factor;
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_qfunc(const std::string& config_path, std::uint64_t seed, double t,
              const std::string& out_dir) {
  SimConfig cfg = load_sim_config(config_path);
  cfg.seed = seed;
  if (t > 0.0) cfg.t_end = t;
  fs::create_directories(out_dir);
  const TrajectoryResult res = run_trajectory(cfg);
  const CavityDM rho_gg = conditional_cavity(res.final_state, Branch::g);
  const CavityDM rho_ee = conditional_cavity(res.final_state, Branch::e);
  const PhaseGrid grid = default_grid(cfg.params, cfg.initial_cavity);
  const QField qg = qfunction(rho_gg, grid);
  const QField qe = qfunction(rho_ee, grid);

  std::string csv;
  char buf[64];
  for (int j = 0; j < grid.n_im; ++j) {
    for (int i = 0; i < grid.n_re; ++i) {
      std::snprintf(buf, sizeof(buf), "%.9g", qe.values(j, i) - qg.values(j, i));
      csv += buf;
      csv += (i + 1 == grid.n_re) ? '\n' : ',';
    }
  }
  write_text(out_dir + "/qfunc_diff.csv", csv);

  const Complex com_g = q_center_of_mass(qg);
  const Complex com_e = q_center_of_mass(qe);
  nlohmann::json axes;
  axes["re_min"] = grid.re_min;
  axes["re_max"] = grid.re_max;
  axes["im_min"] = grid.im_min;
  axes["im_max"] = grid.im_max;
  axes["n_re"] = grid.n_re;
  axes["n_im"] = grid.n_im;
  axes["t"] = cfg.t_end;
  axes["rows"] = "im axis";
  axes["value"] = "Q[rho_ee] - Q[rho_gg]";
  axes["com_gg"] = {com_g.real(), com_g.imag()};
  axes["com_ee"] = {com_e.real(), com_e.imag()};
  axes["truncation_warning"] = qg.truncation_warning || qe.truncation_warning;
  write_text(out_dir + "/qfunc_axes.json", axes.dump(2) + "\n");
  if (qg.truncation_warning || qe.truncation_warning) {
    std::cerr << "warning: grid reaches beyond the truncation-reliable "
                 "region for nmax="
              << rho_gg.nmax() << "\n";
  }
  std::cout << "wrote " << out_dir << "/qfunc_diff.csv\n";
  return 0;
}

int cmd_polaron(const std::string& record_path, const std::string& config_path,
                const std::string& out_path, double prior_gg, double prior_re,
                double prior_im) {
  const SimConfig cfg = load_sim_config(config_path);
  const TrajectoryRecord rec = read_record(record_path);
  QubitDM prior;
  prior.rho_gg = prior_gg;
  prior.rho_ee = 1.0 - prior_gg;
  prior.rho_ge = Complex(prior_re, prior_im);
  const auto path =
      replay_polaron(rec, prior, cfg.params, cfg.initial_cavity);
  std::string csv = "t,rho_gg,re_ge,im_ge\n";
  char buf[160];
  for (std::size_t k = 0; k < path.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g\n",
                  rec.times[k] + rec.dt, path[k].rho_gg,
                  path[k].rho_ge.real(), path[k].rho_ge.imag());
    csv += buf;
  }
  write_text(out_path, csv);
  std::cout << "wrote " << out_path << " (" << path.size() << " steps)\n";
  return 0;
}

int cmd_compare(const std::string& config_path, const std::string& out_dir) {
  const ExperimentConfig cfg = experiment_config_from_json(
      nlohmann::json::parse(read_text(config_path)));
  const ComparisonReport report = run_experiment(cfg);
  write_report_files(report, cfg, out_dir);
  std::cout << "wrote " << out_dir << "/report.json (runtime "
            << report.runtime_seconds << " s)\n";
  if (!report.ok) {
    for (const auto& f : report.failures) std::cerr << "failure: " << f << "\n";
    return 1;
  }
  return 0;
}

int cmd_calibrate(double I_g, double I_e, double Q_g, double Q_e, bool have_q,
                  double delta_r, double eps_m, double phi_lo) {
  CalibrationInput in;
  in.I_g = I_g;
  in.I_e = I_e;
  if (have_q) {
    in.Q_g = Q_g;
    in.Q_e = Q_e;
  }
  in.delta_r = delta_r;
  in.eps_m = eps_m;
  in.phi_lo = phi_lo;
  const CalibrationResult res = calibrate_params(in);
  nlohmann::json j;
  j["kappa"] = res.kappa;
  j["chi"] = res.chi;
  j["iterations"] = res.iterations;
  j["residual"] = res.residual;
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dispersive qubit readout: trajectories and Bayesian updates"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", out_path = "rates.csv";
  std::string record_path, variant = "br2", scale = "unscaled";
  std::uint64_t seed = 0, traj = 0;
  double tm = 1.0, t = 0.0, t_end = 0.0, dt = 0.0;
  double prior_gg = 0.5, prior_re = 0.5, prior_im = 0.0;
  double I_g = 0.0, I_e = 0.0, Q_g = 0.0, Q_e = 0.0;
  double delta_r = 0.0, eps_m = 0.0, phi_lo = 0.0;

  auto* sim = app.add_subcommand("simulate", "run one trajectory");
  sim->add_option("--config", config_path)->required();
  sim->add_option("--seed", seed);
  sim->add_option("--out", out_dir)->required();
  sim->add_option("--traj", traj);
  bool dump_states = false;
  sim->add_flag("--dump-states", dump_states);

  auto* rates = app.add_subcommand("rates", "analytic fields and rates CSV");
  rates->add_option("--config", config_path)->required();
  rates->add_option("--out", out_path);
  rates->add_option("--t-end", t_end, "in units of 1/kappa");
  rates->add_option("--dt", dt, "in units of 1/kappa");

  auto* bay = app.add_subcommand("bayes", "Bayesian update from a record");
  bay->add_option("--record", record_path)->required();
  bay->add_option("--config", config_path)->required();
  bay->add_option("--variant", variant, "bare|br1|br2|br2_prime|abl_LMN");
  bay->add_option("--tm", tm, "in units of 1/kappa")->required();
  bay->add_option("--prior-gg", prior_gg);
  bay->add_option("--prior-re-ge", prior_re);
  bay->add_option("--prior-im-ge", prior_im);
  bay->add_option("--phi2-scale", scale, "time_scaled|unscaled");

  auto* qf = app.add_subcommand("qfunc", "conditional-cavity Q function");
  qf->add_option("--config", config_path)->required();
  qf->add_option("--seed", seed);
  qf->add_option("--t", t, "in units of 1/kappa (default: config t_end)");
  qf->add_option("--out", out_dir)->required();

  auto* pol = app.add_subcommand("polaron",
                                 "replay a record through the qubit-only "
                                 "polaron equations");
  pol->add_option("--record", record_path)->required();
  pol->add_option("--config", config_path)->required();
  pol->add_option("--out", out_path)->required();
  pol->add_option("--prior-gg", prior_gg);
  pol->add_option("--prior-re-ge", prior_re);
  pol->add_option("--prior-im-ge", prior_im);

  auto* cmp = app.add_subcommand("compare", "estimators vs QTE truth");
  cmp->add_option("--config", config_path)->required();
  cmp->add_option("--out", out_dir)->required();

  auto* cal = app.add_subcommand("calibrate", "fit (kappa, chi) from means");
  cal->add_option("--ig", I_g)->required();
  cal->add_option("--ie", I_e)->required();
  auto* qg_opt = cal->add_option("--qg", Q_g);
  cal->add_option("--qe", Q_e)->needs(qg_opt);
  cal->add_option("--delta-r", delta_r);
  cal->add_option("--eps-m", eps_m)->required();
  cal->add_option("--phi-lo", phi_lo);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      return cmd_simulate(config_path, seed, out_dir, traj, dump_states);
    }
    if (rates->parsed()) return cmd_rates(config_path, out_path, t_end, dt);
    if (bay->parsed()) {
      return cmd_bayes(record_path, config_path, variant, tm, prior_gg,
                       prior_re, prior_im, scale);
    }
    if (qf->parsed()) return cmd_qfunc(config_path, seed, t, out_dir);
    if (pol->parsed()) {
      return cmd_polaron(record_path, config_path, out_path, prior_gg,
                         prior_re, prior_im);
    }
    if (cmp->parsed()) return cmd_compare(config_path, out_dir);
    if (cal->parsed()) {
      return cmd_calibrate(I_g, I_e, Q_g, Q_e, qg_opt->count() > 0, delta_r,
                           eps_m, phi_lo);
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
