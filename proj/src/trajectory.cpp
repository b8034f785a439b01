#include "cqed/trajectory.hpp"

#include <cmath>

#include "cqed/rng.hpp"

namespace cqed {

int SimConfig::resolved_nmax() const {
  return nmax > 0 ? nmax : suggested_nmax(params, initial_cavity);
}

void SimConfig::validate() const {
  params.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("SimConfig: dt must be > 0");
  if (t_end < dt) throw std::invalid_argument("SimConfig: t_end must be >= dt");
  const double qn = std::norm(initial_qubit_g) + std::norm(initial_qubit_e);
  if (std::abs(qn - 1.0) > 1e-12) {
    throw std::invalid_argument("SimConfig: initial qubit state not normalized");
  }
  if (resolved_nmax() < 1) {
    throw std::invalid_argument("SimConfig: nmax must be >= 1");
  }
  if (snapshot_interval <= 0.0) {
    throw std::invalid_argument("SimConfig: snapshot_interval must be > 0");
  }
}

double TrajectoryRecord::integrated_I(std::size_t n) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += I[k];
  return acc / static_cast<double>(n);
}

double TrajectoryRecord::integrated_Q(std::size_t n) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += Q[k];
  return acc / static_cast<double>(n);
}

JointOperator build_hamiltonian(const ModelParams& p, int nmax) {
  p.validate();
  const FockOps ops = build_fock_operators(nmax);
  const int d = nmax + 1;
  const Eigen::MatrixXcd drive =
      std::conj(Complex(p.eps_m)) * ops.a + Complex(p.eps_m) * ops.a_dag;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2 * d, 2 * d);
  // g block: (Delta_r - chi) n - omega_q/2 + drive
  h.topLeftCorner(d, d) =
      (p.delta_r - p.chi) * ops.n -
      0.5 * p.omega_q_tilde * ops.identity + drive;
  // e block: (Delta_r + chi) n + omega_q/2 + drive
  h.bottomRightCorner(d, d) =
      (p.delta_r + p.chi) * ops.n +
      0.5 * p.omega_q_tilde * ops.identity + drive;
  return make_joint_operator(std::move(h), true);
}

QteSimulator::QteSimulator(const SimConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  const int nmax = cfg_.resolved_nmax();
  const int dim = 2 * (nmax + 1);
  dt_ = cfg_.step_size();
  const FockOps ops = build_fock_operators(nmax);
  const Eigen::MatrixXcd a_joint = lift_cavity(ops.a);
  const Eigen::MatrixXcd n_joint = lift_cavity(ops.n);
  const Eigen::MatrixXcd h = build_hamiltonian(cfg_.params, nmax).m;
  drift_ = Complex(0.0, -1.0) * h - 0.5 * cfg_.params.kappa * n_joint;
  if (cfg_.scheme == Scheme::single_quadrature) {
    meas_ = std::sqrt(cfg_.params.kappa) *
            std::polar(1.0, -cfg_.params.phi_lo) * a_joint;
  } else {
    meas_ = std::sqrt(cfg_.params.kappa / 2.0) * a_joint;
  }
  work1_.resize(dim);
  work2_.resize(dim);
}

JointState QteSimulator::initial_state() const {
  const auto cav = coherent_state(cfg_.initial_cavity, cfg_.resolved_nmax());
  return make_joint_state(cfg_.initial_qubit_g, cfg_.initial_qubit_e,
                          cav.state);
}

QteSimulator::Sample QteSimulator::step_single(JointState& state, double dW) {
  work1_.noalias() = drift_ * state.amp;
  work2_.noalias() = meas_ * state.amp;
  const double x = 2.0 * std::real(state.amp.dot(work2_));
  // d psi = [drift + (x/2) c - x^2/8] psi dt + [c - x/2] psi dW
  state.amp += dt_ * (work1_ + 0.5 * x * work2_ - 0.125 * x * x * state.amp) +
               dW * (work2_ - 0.5 * x * state.amp);
  const double nrm = state.norm();
  if (nrm < 1e-6) {
    throw std::runtime_error("step_single: norm collapse, reduce dt");
  }
  state.amp /= nrm;
  return {x + dW / dt_, 0.0};
}

QteSimulator::Sample QteSimulator::step_two(JointState& state, double dW1,
                                            double dW2) {
  work1_.noalias() = drift_ * state.amp;
  work2_.noalias() = meas_ * state.amp;  // c_1 psi; c_2 psi = -i c_1 psi
  const Complex inner = state.amp.dot(work2_);
  const double x1 = 2.0 * std::real(inner);
  const double x2 = 2.0 * std::imag(inner);  // <c_2 + c_2^+> = 2 Re[-i inner]
  const Complex w1 = dW1 - Complex(0.0, 1.0) * dW2;  // pairs with c_1 psi
  state.amp += dt_ * (work1_ +
                      0.5 * (x1 - Complex(0.0, 1.0) * x2) * work2_ -
                      0.125 * (x1 * x1 + x2 * x2) * state.amp) +
               w1 * work2_ - 0.5 * (x1 * dW1 + x2 * dW2) * state.amp;
  const double nrm = state.norm();
  if (nrm < 1e-6) {
    throw std::runtime_error("step_two: norm collapse, reduce dt");
  }
  state.amp /= nrm;
  return {x1 + dW1 / dt_, x2 + dW2 / dt_};
}

TrajectoryResult run_trajectory(
    const SimConfig& cfg, std::uint64_t traj_index,
    const std::function<void(std::size_t, double, const JointState&)>&
        observer) {
  QteSimulator sim(cfg);
  const double dt = cfg.step_size();
  const std::size_t n_steps =
      static_cast<std::size_t>(std::llround(cfg.duration() / dt));
  const bool two = cfg.scheme == Scheme::two_quadrature;

  GaussianStream xi1(cfg.seed, traj_index, 0);
  GaussianStream xi2(cfg.seed, traj_index, 1);
  const double sqrt_dt = std::sqrt(dt);

  TrajectoryResult out;
  TrajectoryRecord& rec = out.record;
  rec.scheme = cfg.scheme;
  rec.dt = dt;
  rec.times.resize(n_steps);
  rec.I.resize(n_steps);
  rec.dW1.resize(n_steps);
  if (two) {
    rec.Q.resize(n_steps);
    rec.dW2.resize(n_steps);
  }

  JointState state = sim.initial_state();
  const std::size_t snap_every = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::llround(cfg.snapshot_interval / cfg.params.kappa / dt)));
  if (cfg.store_snapshots) {
    out.snapshots.push_back({0.0, state});
  }

  for (std::size_t k = 0; k < n_steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    rec.times[k] = t;
    const double dw1 = xi1.next() * sqrt_dt;
    rec.dW1[k] = dw1;
    if (two) {
      const double dw2 = xi2.next() * sqrt_dt;
      rec.dW2[k] = dw2;
      const auto s = sim.step_two(state, dw1, dw2);
      rec.I[k] = s.I;
      rec.Q[k] = s.Q;
    } else {
      const auto s = sim.step_single(state, dw1);
      rec.I[k] = s.I;
    }
    const double t_after = static_cast<double>(k + 1) * dt;
    if (cfg.store_snapshots && (k + 1) % snap_every == 0) {
      out.snapshots.push_back({t_after, state});
    }
    if (observer) observer(k, t_after, state);
  }
  out.final_state = std::move(state);
  return out;
}

namespace {

// d rho = -i[H, rho] + kappa (a rho a+ - 1/2 {a+a, rho})
Eigen::MatrixXcd lindblad_rhs(const Eigen::MatrixXcd& h,
                              const Eigen::MatrixXcd& a_joint,
                              const Eigen::MatrixXcd& n_joint, double kappa,
                              const Eigen::MatrixXcd& rho) {
  Eigen::MatrixXcd out = Complex(0.0, -1.0) * (h * rho - rho * h);
  out += kappa * (a_joint * rho * a_joint.adjoint());
  out -= 0.5 * kappa * (n_joint * rho + rho * n_joint);
  return out;
}

}  // namespace

LindbladResult run_lindblad(const SimConfig& cfg) {
  cfg.validate();
  const int nmax = cfg.resolved_nmax();
  const FockOps ops = build_fock_operators(nmax);
  const Eigen::MatrixXcd a_joint = lift_cavity(ops.a);
  const Eigen::MatrixXcd n_joint = lift_cavity(ops.n);
  const Eigen::MatrixXcd h = build_hamiltonian(cfg.params, nmax).m;
  const double kappa = cfg.params.kappa;
  const double dt = cfg.step_size();
  const std::size_t n_steps =
      static_cast<std::size_t>(std::llround(cfg.duration() / dt));
  const std::size_t snap_every = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::llround(cfg.snapshot_interval / kappa / dt)));

  const auto cav = coherent_state(cfg.initial_cavity, nmax);
  const JointState psi0 = make_joint_state(cfg.initial_qubit_g,
                                           cfg.initial_qubit_e, cav.state);
  Eigen::MatrixXcd rho = psi0.amp * psi0.amp.adjoint();

  LindbladResult out;
  out.times.push_back(0.0);
  out.rho.push_back(rho);

  Eigen::MatrixXcd k1, k2, k3, k4;
  for (std::size_t k = 0; k < n_steps; ++k) {
    k1 = lindblad_rhs(h, a_joint, n_joint, kappa, rho);
    k2 = lindblad_rhs(h, a_joint, n_joint, kappa, rho + 0.5 * dt * k1);
    k3 = lindblad_rhs(h, a_joint, n_joint, kappa, rho + 0.5 * dt * k2);
    k4 = lindblad_rhs(h, a_joint, n_joint, kappa, rho + dt * k3);
    rho += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if ((k + 1) % snap_every == 0 || k + 1 == n_steps) {
      const double tr = rho.trace().real();
      if (std::abs(tr - 1.0) > 1e-8) {
        throw std::runtime_error("run_lindblad: trace drift beyond 1e-8");
      }
      out.times.push_back(static_cast<double>(k + 1) * dt);
      out.rho.push_back(rho);
    }
  }
  return out;
}

QubitDM reduce_qubit(const JointState& state) {
  QubitDM dm;
  dm.rho_gg = state.block_g().squaredNorm();
  dm.rho_ee = state.block_e().squaredNorm();
  // <g|rho|e> = sum_n psi_g[n] psi_e[n]^*
  dm.rho_ge = state.block_e().dot(state.block_g());
  return dm;
}

QubitDM reduce_qubit_dm(const Eigen::MatrixXcd& joint_rho, int nmax) {
  const int d = nmax + 1;
  QubitDM dm;
  dm.rho_gg = joint_rho.topLeftCorner(d, d).trace().real();
  dm.rho_ee = joint_rho.bottomRightCorner(d, d).trace().real();
  dm.rho_ge = joint_rho.topRightCorner(d, d).trace();
  return dm;
}

CavityDM conditional_cavity(const JointState& state, Branch branch) {
  const auto block =
      branch == Branch::g ? state.block_g() : state.block_e();
  const double pop = block.squaredNorm();
  if (pop < 1e-12) {
    throw std::runtime_error(
        "conditional_cavity: branch population below 1e-12");
  }
  const Eigen::VectorXcd v = block / std::sqrt(pop);
  return CavityDM{v * v.adjoint()};
}

}  // namespace cqed
