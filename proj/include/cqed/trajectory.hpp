// Stochastic integration of the joint qubit-cavity trajectory equation
// under single- or two-quadrature homodyne monitoring, plus the
// deterministic (Lindblad) ensemble-average reference.
//
// The conditional state is propagated in pure-state (stochastic
// Schrodinger) form with per-step renormalization; the unnormalized
// density-matrix unraveling it reproduces is
//   d rho = -i[H,rho] dt + kappa D[a] rho dt + sum_k H[c_k] rho dW_k,
// with c = sqrt(kappa) a e^{-i phi} (single) or
// c_1 = sqrt(kappa/2) a, c_2 = -i sqrt(kappa/2) a (two-quadrature).

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "cqed/cavity_field.hpp"
#include "cqed/fock.hpp"
#include "cqed/model.hpp"

namespace cqed {

enum class Scheme { single_quadrature, two_quadrature };

struct SimConfig {
  ModelParams params;
  int nmax = 0;            // 0 -> suggested_nmax(params, initial_cavity)
  double dt = 1e-3;        // in units of 1/kappa (scaled by 1/params.kappa)
  double t_end = 1.0;
  Scheme scheme = Scheme::single_quadrature;
  std::uint64_t seed = 0;
  Complex initial_qubit_g = 1.0;
  Complex initial_qubit_e = 0.0;
  Complex initial_cavity = 0.0;
  double snapshot_interval = 0.05;  // in units of 1/kappa
  bool store_snapshots = false;

  int resolved_nmax() const;
  double step_size() const { return dt / params.kappa; }
  double duration() const { return t_end / params.kappa; }
  void validate() const;
};

// Measurement record of one run. Samples are I_k = <quadrature> + dW_k/dt.
// dW streams are stored raw so estimators can replay the run bit-exactly.
struct TrajectoryRecord {
  Scheme scheme = Scheme::single_quadrature;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<double> I;
  std::vector<double> Q;    // two-quadrature only
  std::vector<double> dW1;
  std::vector<double> dW2;  // two-quadrature only

  std::size_t steps() const { return times.size(); }
  // (1/t) sum I_k dt over the first n steps
  double integrated_I(std::size_t n) const;
  double integrated_Q(std::size_t n) const;
};

struct Snapshot {
  double t;
  JointState state;
};

struct TrajectoryResult {
  TrajectoryRecord record;
  std::vector<Snapshot> snapshots;
  JointState final_state;
};

// H = Delta_r a+a + (omega_q/2) sigma_z + chi a+a sigma_z + (eps* a + eps a+)
JointOperator build_hamiltonian(const ModelParams& p, int nmax);

class QteSimulator {
 public:
  explicit QteSimulator(const SimConfig& cfg);

  const SimConfig& config() const { return cfg_; }
  JointState initial_state() const;

  struct Sample {
    double I;
    double Q;  // 0 for single-quadrature
  };

  // One Euler-Maruyama step in place. Throws on norm collapse (< 1e-6
  // before renormalization), which indicates a too-coarse step.
  Sample step_single(JointState& state, double dW);
  Sample step_two(JointState& state, double dW1, double dW2);

 private:
  SimConfig cfg_;
  double dt_;
  Eigen::MatrixXcd drift_;  // -iH - (kappa/2) a+a
  Eigen::MatrixXcd meas_;   // c (single) or c_1 (two-quadrature)
  Eigen::VectorXcd work1_, work2_;
};

// Observer is called after every step with (step index, time after step,
// state). Deterministic given (cfg.seed, traj_index).
TrajectoryResult run_trajectory(
    const SimConfig& cfg, std::uint64_t traj_index = 0,
    const std::function<void(std::size_t, double, const JointState&)>&
        observer = nullptr);

// Deterministic ensemble-average evolution (noise term dropped), RK4 on the
// joint density matrix; trace preserved to 1e-8.
struct LindbladResult {
  std::vector<double> times;             // snapshot grid
  std::vector<Eigen::MatrixXcd> rho;     // joint density matrices
};

LindbladResult run_lindblad(const SimConfig& cfg);

QubitDM reduce_qubit(const JointState& state);
QubitDM reduce_qubit_dm(const Eigen::MatrixXcd& joint_rho, int nmax);

// Normalized conditional cavity block <q|rho|q>/Tr for branch q. Throws if
// the branch population is below 1e-12.
CavityDM conditional_cavity(const JointState& state, Branch branch);

}  // namespace cqed
