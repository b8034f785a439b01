#include "cqed/harness.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>

#include "cqed/io.hpp"

namespace cqed {

EstimatorSpec parse_estimator(const std::string& name) {
  EstimatorSpec spec;
  spec.name = name;
  if (name == "bare") {
    spec.variant = Variant::bare;
  } else if (name == "br1") {
    spec.variant = Variant::br1;
  } else if (name == "br2") {
    spec.variant = Variant::br2;
  } else if (name == "br2_prime") {
    spec.variant = Variant::br2_prime;
  } else if (name.size() == 7 && name.rfind("abl_", 0) == 0) {
    spec.variant = Variant::br2;
    spec.ablation.purity = name[4] == '1';
    spec.ablation.phi1 = name[5] == '1';
    spec.ablation.phi2 = name[6] == '1';
  } else {
    throw std::invalid_argument("parse_estimator: unknown estimator " + name);
  }
  return spec;
}

void ExperimentConfig::validate() const {
  sim.validate();
  if (ensemble_size < 1) {
    throw std::invalid_argument("ExperimentConfig: ensemble_size must be >= 1");
  }
  if (n_checkpoints < 1) {
    throw std::invalid_argument("ExperimentConfig: need >= 1 checkpoint");
  }
  for (double t : t_checkpoints) {
    if (!(t > 0.0) || t > sim.t_end + 1e-12) {
      throw std::invalid_argument(
          "ExperimentConfig: checkpoints must lie in (0, t_end]");
    }
  }
  for (const auto& name : estimators) parse_estimator(name);
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  cfg.sim = sim_config_from_json(j.at("sim"));
  if (j.contains("estimators")) {
    cfg.estimators = j.at("estimators").get<std::vector<std::string>>();
  }
  cfg.n_checkpoints = j.value("n_checkpoints", 100);
  if (j.contains("t_checkpoints")) {
    cfg.t_checkpoints = j.at("t_checkpoints").get<std::vector<double>>();
  }
  cfg.ensemble_size = j.value("ensemble_size", 1);
  cfg.mode = j.value("mode", std::string("parallel")) == "serial"
                 ? RunMode::serial
                 : RunMode::parallel;
  if (j.contains("phi2_scale")) {
    cfg.phi2_scale = j.at("phi2_scale").get<std::string>() == "unscaled"
                         ? Phi2Scale::unscaled
                         : Phi2Scale::time_scaled;
  }
  cfg.validate();
  return cfg;
}

nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["sim"] = sim_config_to_json(cfg.sim);
  j["estimators"] = cfg.estimators;
  j["n_checkpoints"] = cfg.n_checkpoints;
  if (!cfg.t_checkpoints.empty()) j["t_checkpoints"] = cfg.t_checkpoints;
  j["ensemble_size"] = cfg.ensemble_size;
  j["mode"] = cfg.mode == RunMode::serial ? "serial" : "parallel";
  j["phi2_scale"] =
      cfg.phi2_scale == Phi2Scale::unscaled ? "unscaled" : "time_scaled";
  return j;
}

namespace {

struct TrajOutcome {
  bool ok = false;
  std::string error;
  std::vector<QubitDM> truth;                          // per checkpoint
  std::vector<std::vector<QubitDM>> estimates;         // [estimator][ckpt]
  double truth_purity_final = 0.0;
};

}  // namespace

ComparisonReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto t_start = std::chrono::steady_clock::now();

  std::vector<EstimatorSpec> specs;
  specs.reserve(cfg.estimators.size());
  for (const auto& name : cfg.estimators) specs.push_back(parse_estimator(name));

  // checkpoints snapped to the step grid; explicit times override the
  // uniform grid over (0, t_end]
  const double dt = cfg.sim.step_size();
  const std::size_t n_steps = static_cast<std::size_t>(
      std::llround(cfg.sim.duration() / dt));
  std::vector<std::size_t> ckpt_steps;
  const auto push_step = [&](std::size_t s) {
    s = std::max<std::size_t>(1, std::min(s, n_steps));
    if (ckpt_steps.empty() || s != ckpt_steps.back()) ckpt_steps.push_back(s);
  };
  if (!cfg.t_checkpoints.empty()) {
    std::vector<double> sorted = cfg.t_checkpoints;
    std::sort(sorted.begin(), sorted.end());
    for (double t : sorted) {
      push_step(static_cast<std::size_t>(
          std::llround(t / cfg.sim.params.kappa / dt)));
    }
  } else {
    for (int c = 1; c <= cfg.n_checkpoints; ++c) {
      push_step(static_cast<std::size_t>(std::llround(
          static_cast<double>(c) / cfg.n_checkpoints * n_steps)));
    }
  }
  const std::size_t n_ckpt = ckpt_steps.size();

  std::vector<TrajOutcome> outcomes(cfg.ensemble_size);

  for_each_index(cfg.ensemble_size, cfg.mode, [&](std::size_t traj) {
    TrajOutcome& out = outcomes[traj];
    try {
      std::vector<QubitDM> truth(n_ckpt);
      std::size_t next = 0;
      double purity_final = 0.0;
      const auto observer = [&](std::size_t k, double, const JointState& s) {
        if (next < n_ckpt && k + 1 == ckpt_steps[next]) {
          truth[next] = reduce_qubit(s);
          ++next;
        }
        if (k + 1 == n_steps) purity_final = reduce_qubit(s).purity();
      };
      TrajectoryResult res = run_trajectory(cfg.sim, traj, observer);

      // the estimators must consume exactly the simulator's record: round
      // the record through its serialized form and compare content hashes
      const std::string csv = record_to_csv(res.record);
      const std::string hash = git_blob_sha1(csv);
      const TrajectoryRecord replay = record_from_csv(csv);
      if (git_blob_sha1(record_to_csv(replay)) != hash) {
        throw std::runtime_error("record hash mismatch after round-trip");
      }

      QubitDM prior;
      prior.rho_gg = std::norm(cfg.sim.initial_qubit_g);
      prior.rho_ee = std::norm(cfg.sim.initial_qubit_e);
      prior.rho_ge = cfg.sim.initial_qubit_g *
                     std::conj(cfg.sim.initial_qubit_e);

      out.estimates.assign(specs.size(), std::vector<QubitDM>(n_ckpt));
      for (std::size_t e = 0; e < specs.size(); ++e) {
        BayesInput bi;
        bi.prior = prior;
        bi.params = cfg.sim.params;
        bi.alpha0 = cfg.sim.initial_cavity;
        bi.scheme = cfg.sim.scheme;
        bi.variant = specs[e].variant;
        bi.ablation = specs[e].ablation;
        bi.phi2_scale = cfg.phi2_scale;
        bi.record = &replay;
        for (std::size_t c = 0; c < n_ckpt; ++c) {
          bi.t_m = static_cast<double>(ckpt_steps[c]) * dt;
          out.estimates[e][c] = update_full(bi).posterior;
        }
      }
      out.truth = std::move(truth);
      out.truth_purity_final = purity_final;
      out.ok = true;
    } catch (const std::exception& ex) {
      out.error = ex.what();
      out.ok = false;
    }
  });

  // merge in trajectory order
  ComparisonReport report;
  report.checkpoint_times.resize(n_ckpt);
  for (std::size_t c = 0; c < n_ckpt; ++c) {
    report.checkpoint_times[c] = static_cast<double>(ckpt_steps[c]) * dt;
  }
  auto init_stats = [&](CurveStats& s) {
    s.mean_abs_err_gg.assign(n_ckpt, 0.0);
    s.mean_abs_err_ge.assign(n_ckpt, 0.0);
    s.max_abs_err_gg.assign(n_ckpt, 0.0);
    s.max_abs_err_ge.assign(n_ckpt, 0.0);
    s.mean_rho_gg.assign(n_ckpt, 0.0);
    s.mean_re_ge.assign(n_ckpt, 0.0);
    s.mean_im_ge.assign(n_ckpt, 0.0);
  };
  init_stats(report.truth);
  for (const auto& spec : specs) init_stats(report.estimators[spec.name]);

  std::size_t n_ok = 0;
  for (std::size_t traj = 0; traj < outcomes.size(); ++traj) {
    const TrajOutcome& out = outcomes[traj];
    if (!out.ok) {
      report.failures.push_back("trajectory " + std::to_string(traj) + ": " +
                                out.error);
      continue;
    }
    ++n_ok;
    report.mean_truth_purity_final += out.truth_purity_final;
    for (std::size_t c = 0; c < n_ckpt; ++c) {
      report.truth.mean_rho_gg[c] += out.truth[c].rho_gg;
      report.truth.mean_re_ge[c] += out.truth[c].rho_ge.real();
      report.truth.mean_im_ge[c] += out.truth[c].rho_ge.imag();
    }
    for (std::size_t e = 0; e < specs.size(); ++e) {
      CurveStats& s = report.estimators[specs[e].name];
      for (std::size_t c = 0; c < n_ckpt; ++c) {
        const QubitDM& est = out.estimates[e][c];
        const QubitDM& tru = out.truth[c];
        const double err_gg = std::abs(est.rho_gg - tru.rho_gg);
        const double err_ge = std::abs(est.rho_ge - tru.rho_ge);
        s.mean_abs_err_gg[c] += err_gg;
        s.mean_abs_err_ge[c] += err_ge;
        s.max_abs_err_gg[c] = std::max(s.max_abs_err_gg[c], err_gg);
        s.max_abs_err_ge[c] = std::max(s.max_abs_err_ge[c], err_ge);
        s.mean_rho_gg[c] += est.rho_gg;
        s.mean_re_ge[c] += est.rho_ge.real();
        s.mean_im_ge[c] += est.rho_ge.imag();
        if (c + 1 == n_ckpt) s.final_err_ge.push_back(err_ge);
      }
    }
  }
  if (n_ok > 0) {
    const double inv = 1.0 / static_cast<double>(n_ok);
    report.mean_truth_purity_final *= inv;
    auto scale = [&](CurveStats& s) {
      for (std::size_t c = 0; c < n_ckpt; ++c) {
        s.mean_abs_err_gg[c] *= inv;
        s.mean_abs_err_ge[c] *= inv;
        s.mean_rho_gg[c] *= inv;
        s.mean_re_ge[c] *= inv;
        s.mean_im_ge[c] *= inv;
      }
    };
    scale(report.truth);
    for (auto& [name, s] : report.estimators) scale(s);
  }
  report.ok = report.failures.empty() && n_ok > 0;
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return report;
}

nlohmann::json ComparisonReport::to_json() const {
  nlohmann::json j;
  j["checkpoint_times"] = checkpoint_times;
  j["ok"] = ok;
  j["failures"] = failures;
  j["runtime_seconds"] = runtime_seconds;
  j["mean_truth_purity_final"] = mean_truth_purity_final;
  auto curve = [](const CurveStats& s) {
    nlohmann::json c;
    c["mean_abs_err_gg"] = s.mean_abs_err_gg;
    c["mean_abs_err_ge"] = s.mean_abs_err_ge;
    c["max_abs_err_gg"] = s.max_abs_err_gg;
    c["max_abs_err_ge"] = s.max_abs_err_ge;
    return c;
  };
  j["truth"] = {{"mean_rho_gg", truth.mean_rho_gg},
                {"mean_re_ge", truth.mean_re_ge},
                {"mean_im_ge", truth.mean_im_ge}};
  for (const auto& [name, s] : estimators) {
    j["estimators"][name] = curve(s);
  }
  return j;
}

namespace {

std::string curve_csv(const std::vector<double>& t, const CurveStats& s) {
  std::string out = "t,rho_gg,re_ge,im_ge\n";
  char buf[160];
  for (std::size_t c = 0; c < t.size(); ++c) {
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g\n", t[c],
                  s.mean_rho_gg[c], s.mean_re_ge[c], s.mean_im_ge[c]);
    out += buf;
  }
  return out;
}

}  // namespace

void write_report_files(const ComparisonReport& report,
                        const ExperimentConfig& cfg, const std::string& dir) {
  std::filesystem::create_directories(dir);
  write_text(dir + "/truth.csv",
             curve_csv(report.checkpoint_times, report.truth));
  for (const auto& [name, s] : report.estimators) {
    write_text(dir + "/curves_" + name + ".csv",
               curve_csv(report.checkpoint_times, s));
  }
  nlohmann::json j = report.to_json();
  j["config"] = experiment_config_to_json(cfg);
  write_text(dir + "/report.json", j.dump(2) + "\n");
}

CalibrationResult calibrate_params(const CalibrationInput& in) {
  const bool iq = in.Q_g.has_value() && in.Q_e.has_value();
  if (in.Q_g.has_value() != in.Q_e.has_value()) {
    throw std::invalid_argument("calibrate_params: need both Q means or none");
  }
  const double mean_gap =
      std::abs(in.I_g - in.I_e) +
      (iq ? std::abs(*in.Q_g - *in.Q_e) : 0.0);
  const double mean_scale =
      std::abs(in.I_g) + std::abs(in.I_e) +
      (iq ? std::abs(*in.Q_g) + std::abs(*in.Q_e) : 0.0);
  if (mean_gap <= 1e-12 * std::max(1.0, mean_scale)) {
    throw std::runtime_error(
        "calibrate_params: identical branch means, chi unidentifiable "
        "(singular Jacobian)");
  }

  const auto residuals = [&](double kappa, double chi) {
    ModelParams p;
    p.delta_r = in.delta_r;
    p.chi = chi;
    p.eps_m = in.eps_m;
    p.kappa = kappa;
    p.phi_lo = in.phi_lo;
    const Complex ag = alpha_steady(p, Branch::g);
    const Complex ae = alpha_steady(p, Branch::e);
    Eigen::VectorXd r(iq ? 4 : 2);
    if (iq) {
      const double g = std::sqrt(2.0 * kappa);
      r(0) = g * ag.real() - in.I_g;
      r(1) = g * ae.real() - in.I_e;
      r(2) = g * ag.imag() - *in.Q_g;
      r(3) = g * ae.imag() - *in.Q_e;
    } else {
      const Complex lo = std::polar(1.0, -in.phi_lo);
      r(0) = 2.0 * std::sqrt(kappa) * std::real(ag * lo) - in.I_g;
      r(1) = 2.0 * std::sqrt(kappa) * std::real(ae * lo) - in.I_e;
    }
    return r;
  };

  // closed-form start from the g branch (exact for noiseless I/Q data):
  // Re/Im of -i eps sqrt(2 kappa)/(I + iQ) give kappa/2 and Delta_r - chi
  double kappa = 1.0, chi = 0.1;
  if (iq) {
    const Complex w = Complex(0.0, -in.eps_m) / Complex(in.I_g, *in.Q_g);
    const double wre = std::real(w);
    if (wre > 0.0) {
      kappa = 8.0 * wre * wre;
      chi = in.delta_r - std::sqrt(2.0 * kappa) * std::imag(w);
    }
  }

  Eigen::VectorXd r = residuals(kappa, chi);
  CalibrationResult out;
  const int max_iter = 100;
  for (int iter = 0; iter < max_iter; ++iter) {
    const double hk = std::max(1e-7, 1e-7 * kappa);
    const double hc = std::max(1e-9, 1e-7 * std::abs(chi));
    const Eigen::VectorXd rk = residuals(kappa + hk, chi);
    const Eigen::VectorXd rc = residuals(kappa, chi + hc);
    Eigen::MatrixXd jac(r.size(), 2);
    jac.col(0) = (rk - r) / hk;
    jac.col(1) = (rc - r) / hc;
    const Eigen::Matrix2d normal = jac.transpose() * jac;
    if (std::abs(normal.determinant()) < 1e-14) {
      throw std::runtime_error("calibrate_params: singular Jacobian");
    }
    const Eigen::Vector2d step = normal.ldlt().solve(-jac.transpose() * r);
    double damping = 1.0;
    for (; damping > 1e-6; damping *= 0.5) {
      const double k_new = kappa + damping * step(0);
      const double c_new = chi + damping * step(1);
      if (k_new <= 0.0) continue;
      const Eigen::VectorXd r_new = residuals(k_new, c_new);
      if (r_new.squaredNorm() <= r.squaredNorm()) {
        kappa = k_new;
        chi = c_new;
        r = r_new;
        break;
      }
    }
    out.iterations = iter + 1;
    if (damping <= 1e-6) break;
    if (step.norm() < 1e-12 * (1.0 + std::abs(kappa) + std::abs(chi))) break;
  }
  if (!(kappa > 0.0)) {
    throw std::runtime_error("calibrate_params: no root with kappa > 0");
  }
  out.kappa = kappa;
  out.chi = chi;
  out.residual = r.norm();
  return out;
}

}  // namespace cqed
