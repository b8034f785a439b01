// Experiment orchestration: seeded ensembles, paired-path comparison of the
// Bayesian estimators against full-QTE truth, parameter calibration.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cqed/bayes.hpp"
#include "cqed/ensemble.hpp"
#include "cqed/trajectory.hpp"

namespace cqed {

// Estimator names: "bare", "br1", "br2", "br2_prime", or "abl_LMN" with
// L,M,N in {0,1} toggling (purity, Phi_1, Phi_2) on the br2 rule.
struct EstimatorSpec {
  std::string name;
  Variant variant;
  Ablation ablation;
};

EstimatorSpec parse_estimator(const std::string& name);

struct ExperimentConfig {
  SimConfig sim;
  std::vector<std::string> estimators = {"bare", "br2"};
  int n_checkpoints = 100;             // uniform over (0, t_end]
  std::vector<double> t_checkpoints;   // explicit override, units of 1/kappa
  int ensemble_size = 1;
  RunMode mode = RunMode::parallel;
  Phi2Scale phi2_scale = kDefaultPhi2Scale;

  void validate() const;
};

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg);

struct CurveStats {
  std::vector<double> mean_abs_err_gg;    // per checkpoint
  std::vector<double> mean_abs_err_ge;    // |delta rho_ge|
  std::vector<double> max_abs_err_gg;
  std::vector<double> max_abs_err_ge;
  std::vector<double> mean_rho_gg;        // ensemble-mean estimator curve
  std::vector<double> mean_re_ge;
  std::vector<double> mean_im_ge;
  // final-checkpoint per-trajectory |delta rho_ge| (for paired tests)
  std::vector<double> final_err_ge;
};

struct ComparisonReport {
  std::vector<double> checkpoint_times;  // absolute time
  CurveStats truth;                      // errors zero; curves are the truth
  std::map<std::string, CurveStats> estimators;
  double mean_truth_purity_final = 0.0;
  double runtime_seconds = 0.0;
  std::vector<std::string> failures;  // per-trajectory error messages
  bool ok = true;

  nlohmann::json to_json() const;
};

// Simulates ensemble_size trajectories, hands the identical record to every
// estimator (hash-checked), evaluates one-shot updates at each checkpoint.
ComparisonReport run_experiment(const ExperimentConfig& cfg);

void write_report_files(const ComparisonReport& report,
                        const ExperimentConfig& cfg, const std::string& dir);

// Steady-state calibration of (kappa, chi) from branch means.
struct CalibrationInput {
  double I_g = 0.0, I_e = 0.0;
  std::optional<double> Q_g, Q_e;  // I/Q means; both or neither
  double delta_r = 0.0;
  double eps_m = 0.0;
  double phi_lo = 0.0;  // used when only single-quadrature means are given
};

struct CalibrationResult {
  double kappa = 0.0;
  double chi = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

// Inverts alpha_bar_{g(e)} = -i eps/(i Delta_r^{-/+} + kappa/2) by damped
// Gauss-Newton. Throws on unidentifiable input (identical branch means) or
// when no root with kappa > 0 exists.
CalibrationResult calibrate_params(const CalibrationInput& in);

}  // namespace cqed
