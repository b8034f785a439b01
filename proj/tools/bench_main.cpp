// Throughput comparison of the serial reference loop against the
// OpenMP-parallel ensemble and Q-function kernels.

#include <chrono>
#include <cstdio>
#include <vector>

#include "cqed/polaron.hpp"
#include "cqed/qfunc.hpp"
#include "cqed/trajectory.hpp"

using namespace cqed;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

SimConfig nbar1_config() {
  SimConfig cfg;
  cfg.params.delta_r = 0.0;
  cfg.params.chi = 0.1;
  cfg.params.eps_m = 1.0;
  cfg.params.kappa = 2.0;
  cfg.params.phi_lo = M_PI / 4.0;
  cfg.dt = 1e-3;
  cfg.t_end = 2.0;
  cfg.seed = 7;
  cfg.initial_qubit_g = 1.0 / std::sqrt(2.0);
  cfg.initial_qubit_e = 1.0 / std::sqrt(2.0);
  return cfg;
}

double bench_ensemble(const SimConfig& cfg, std::size_t n, RunMode mode,
                      double* checksum) {
  std::vector<double> final_gg(n);
  const auto t0 = clock_type::now();
  for_each_index(n, mode, [&](std::size_t i) {
    const TrajectoryResult res = run_trajectory(cfg, i);
    final_gg[i] = reduce_qubit(res.final_state).rho_gg;
  });
  const double dt = seconds_since(t0);
  *checksum = 0.0;
  for (double v : final_gg) *checksum += v;
  return dt;
}

double bench_qfunc(const CavityDM& dm, const PhaseGrid& grid, RunMode mode,
                   double* checksum) {
  const auto t0 = clock_type::now();
  const QField f = qfunction(dm, grid, mode);
  const double dt = seconds_since(t0);
  *checksum = f.values.sum();
  return dt;
}

}  // namespace

int main() {
  const SimConfig cfg = nbar1_config();
  const std::size_t n_traj = 64;

  double sum_serial = 0.0, sum_parallel = 0.0;
  const double t_serial =
      bench_ensemble(cfg, n_traj, RunMode::serial, &sum_serial);
  const double t_parallel =
      bench_ensemble(cfg, n_traj, RunMode::parallel, &sum_parallel);

  std::printf("ensemble of %zu trajectories (%g steps each)\n", n_traj,
              cfg.duration() / cfg.step_size());
  std::printf("  serial    %8.3f s   checksum %.12g\n", t_serial, sum_serial);
  std::printf("  parallel  %8.3f s   checksum %.12g   speedup %.2fx\n",
              t_parallel, sum_parallel, t_serial / t_parallel);
  if (sum_serial != sum_parallel) {
    std::printf("  MISMATCH: serial and parallel results differ\n");
    return 1;
  }

  const auto cs = coherent_state(Complex(0.4, -0.9), 24);
  const CavityDM dm = pure_cavity_dm(cs.state);
  PhaseGrid grid;
  grid.n_re = grid.n_im = 361;
  double q_serial = 0.0, q_parallel = 0.0;
  const double tq_serial = bench_qfunc(dm, grid, RunMode::serial, &q_serial);
  const double tq_parallel =
      bench_qfunc(dm, grid, RunMode::parallel, &q_parallel);
  std::printf("qfunction on %dx%d grid, nmax=%d\n", grid.n_re, grid.n_im,
              dm.nmax());
  std::printf("  serial    %8.3f s   checksum %.12g\n", tq_serial, q_serial);
  std::printf("  parallel  %8.3f s   checksum %.12g   speedup %.2fx\n",
              tq_parallel, q_parallel, tq_serial / tq_parallel);
  if (q_serial != q_parallel) {
    std::printf("  MISMATCH: serial and parallel results differ\n");
    return 1;
  }
  return 0;
}
