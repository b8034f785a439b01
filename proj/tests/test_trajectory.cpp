#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cqed/bayes.hpp"
#include "cqed/rng.hpp"
#include "cqed/trajectory.hpp"

using namespace cqed;

namespace {

SimConfig nbar1_config() {
  SimConfig cfg;
  cfg.params.delta_r = 0.0;
  cfg.params.chi = 0.1;
  cfg.params.eps_m = 1.0;
  cfg.params.kappa = 2.0;
  cfg.params.phi_lo = M_PI / 4.0;
  cfg.dt = 1e-3;
  cfg.t_end = 1.0;
  cfg.seed = 11;
  cfg.initial_qubit_g = 1.0 / std::sqrt(2.0);
  cfg.initial_qubit_e = 1.0 / std::sqrt(2.0);
  return cfg;
}

}  // namespace

TEST_CASE("effective hamiltonian") {
  ModelParams p;
  p.chi = 0.3;
  p.kappa = 1.0;

  SUBCASE("pure dispersive ladder is diagonal with +-chi n") {
    const auto h = build_hamiltonian(p, 4).m;
    for (int n = 0; n <= 4; ++n) {
      CHECK(h(n, n) == Complex(-0.3 * n));         // g block
      CHECK(h(5 + n, 5 + n) == Complex(0.3 * n));  // e block
    }
    Eigen::MatrixXcd off = h;
    off.diagonal().setZero();
    CHECK(off.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("hermiticity for generic parameters") {
    ModelParams q;
    q.delta_r = 0.7;
    q.chi = 0.12;
    q.eps_m = 1.3;
    q.kappa = 2.0;
    q.omega_q_tilde = 0.4;
    const auto h = build_hamiltonian(q, 6).m;
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("g-branch diagonal elements, hand-checked") {
    ModelParams q;
    q.delta_r = 0.5;
    q.chi = 0.2;
    q.omega_q_tilde = 0.8;
    q.kappa = 1.0;
    const auto h = build_hamiltonian(q, 3).m;
    for (int n = 0; n <= 2; ++n) {
      const double expect = 0.5 * n - 0.8 / 2.0 - 0.2 * n;
      CHECK(std::abs(h(n, n) - Complex(expect)) < 1e-15);
    }
  }
}

TEST_CASE("single-quadrature stepping") {
  SUBCASE("dark cavity is a fixed point") {
    SimConfig cfg;
    cfg.params.kappa = 1.0;
    cfg.params.chi = 0.1;
    cfg.params.eps_m = 0.0;
    cfg.nmax = 4;
    cfg.dt = 1e-3;
    cfg.t_end = 1.0;
    QteSimulator sim(cfg);
    JointState s = sim.initial_state();
    for (int k = 0; k < 100; ++k) {
      const auto smp = sim.step_single(s, 0.0);
      CHECK(smp.I == 0.0);
    }
    CHECK(std::abs(s.amp(0)) == doctest::Approx(1.0));
  }
  SUBCASE("conditional cavity tracks alpha_g for a pinned qubit") {
    SimConfig cfg = nbar1_config();
    cfg.initial_qubit_g = 1.0;
    cfg.initial_qubit_e = 0.0;
    cfg.t_end = 5.0;
    int checked = 0;
    const auto obs = [&](std::size_t k, double t, const JointState& s) {
      if ((k + 1) % 500 != 0) return;
      const CavityDM dm = conditional_cavity(s, Branch::g);
      const Complex a =
          alpha_transient(t, cfg.params, Branch::g, cfg.initial_cavity);
      CHECK(coherent_expectation(dm, a) > 0.99);
      ++checked;
    };
    run_trajectory(cfg, 0, obs);
    CHECK(checked == 10);  // 5000 steps, every 500th
  }
}

TEST_CASE("two-quadrature stepping") {
  SUBCASE("undriven vacuum: state invariant, samples are pure noise") {
    SimConfig cfg;
    cfg.params.kappa = 1.3;
    cfg.params.chi = 0.2;
    cfg.params.eps_m = 0.0;
    cfg.scheme = Scheme::two_quadrature;
    cfg.nmax = 4;
    cfg.dt = 1e-3;
    cfg.t_end = 1.0;
    cfg.initial_qubit_g = 0.6;
    cfg.initial_qubit_e = 0.8;
    QteSimulator sim(cfg);
    JointState s = sim.initial_state();
    const JointState s0 = s;
    GaussianStream xi(3, 0, 0);
    const double dt = cfg.step_size();
    for (int k = 0; k < 200; ++k) {
      const double dw1 = xi.next() * std::sqrt(dt);
      const double dw2 = xi.next() * std::sqrt(dt);
      const auto smp = sim.step_two(s, dw1, dw2);
      CHECK(smp.I == doctest::Approx(dw1 / dt).epsilon(1e-12));
      CHECK(smp.Q == doctest::Approx(dw2 / dt).epsilon(1e-12));
    }
    CHECK((s.amp - s0.amp).norm() < 1e-9);
  }
  SUBCASE("joint state stays pure, reduced qubit does not") {
    SimConfig cfg = nbar1_config();
    cfg.scheme = Scheme::two_quadrature;
    cfg.t_end = 2.0;
    const auto res = run_trajectory(cfg, 1);
    CHECK(res.final_state.norm() == doctest::Approx(1.0).epsilon(1e-9));
    const QubitDM dm = reduce_qubit(res.final_state);
    dm.validate();
    CHECK(dm.purity() < 1.0 - 1e-4);
  }
  SUBCASE("Q samples carry no qubit-state information (resonant, vacuum)") {
    SimConfig cfg = nbar1_config();
    cfg.scheme = Scheme::two_quadrature;
    cfg.t_end = 1.0;
    double mean_q[2] = {0.0, 0.0};
    const int n_traj = 200;
    for (int branch = 0; branch < 2; ++branch) {
      cfg.initial_qubit_g = branch == 0 ? 1.0 : 0.0;
      cfg.initial_qubit_e = branch == 0 ? 0.0 : 1.0;
      double acc = 0.0;
      std::size_t count = 0;
      for (int i = 0; i < n_traj; ++i) {
        const auto res = run_trajectory(cfg, static_cast<std::uint64_t>(i));
        for (double q : res.record.Q) acc += q;
        count += res.record.Q.size();
      }
      mean_q[branch] = acc / static_cast<double>(count);
    }
    // per-sample noise is ~N(0, 1/dt); the time average over the whole
    // ensemble has standard error sigma/sqrt(N dt t)
    const double se =
        1.0 / std::sqrt(static_cast<double>(n_traj) * nbar1_config().duration());
    CHECK(std::abs(mean_q[0] - mean_q[1]) < 4.0 * se);
  }
}

TEST_CASE("run_trajectory determinism and record structure") {
  SimConfig cfg = nbar1_config();
  cfg.t_end = 0.2;
  const auto a = run_trajectory(cfg, 5);
  const auto b = run_trajectory(cfg, 5);
  REQUIRE(a.record.steps() == b.record.steps());
  for (std::size_t k = 0; k < a.record.steps(); ++k) {
    CHECK(a.record.I[k] == b.record.I[k]);
    CHECK(a.record.dW1[k] == b.record.dW1[k]);
  }
  const auto c = run_trajectory(cfg, 6);
  bool all_equal = true;
  for (std::size_t k = 0; k < a.record.steps(); ++k) {
    if (a.record.dW1[k] != c.record.dW1[k]) all_equal = false;
  }
  CHECK_FALSE(all_equal);

  SUBCASE("sample decomposition: I_k - dW_k/dt is the quadrature mean") {
    SimConfig scfg = nbar1_config();
    scfg.t_end = 0.05;
    scfg.store_snapshots = true;
    scfg.snapshot_interval = scfg.dt;  // every step
    const auto res = run_trajectory(scfg, 2);
    const double dt = scfg.step_size();
    const auto ops = build_fock_operators(scfg.resolved_nmax());
    const Eigen::MatrixXcd quad =
        std::sqrt(scfg.params.kappa) *
        (std::polar(1.0, -scfg.params.phi_lo) * lift_cavity(ops.a) +
         std::polar(1.0, scfg.params.phi_lo) * lift_cavity(ops.a_dag));
    // snapshots[k] is the state after step k (snapshots[0] is the initial
    // state); the sample of step k uses the state before it
    for (std::size_t k = 1; k < res.record.steps(); ++k) {
      const double x = res.record.I[k] - res.record.dW1[k] / dt;
      const double expect =
          std::real(expectation(quad, res.snapshots[k].state));
      CHECK(x == doctest::Approx(expect).epsilon(1e-10));
    }
  }
}

TEST_CASE("integrated output statistics for a pinned qubit") {
  SimConfig cfg = nbar1_config();
  cfg.params.phi_lo = 0.0;
  cfg.initial_qubit_g = 1.0;
  cfg.initial_qubit_e = 0.0;
  cfg.t_end = 1.0;  // t_m = 1/kappa
  const double t_m = cfg.duration();
  const int n_traj = 1000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n_traj; ++i) {
    const auto res = run_trajectory(cfg, static_cast<std::uint64_t>(i));
    const double im = res.record.integrated_I(res.record.steps());
    sum += im;
    sum2 += im * im;
  }
  const double mean = sum / n_traj;
  const double var = sum2 / n_traj - mean * mean;
  const double expect_mean = mean_quadrature(t_m, cfg.params, Branch::g, 0.0,
                                             QuadratureMode::single, 0.0);
  const double sigma = std::sqrt(1.0 / t_m);
  CHECK(std::abs(mean - expect_mean) < 3.0 * sigma / std::sqrt(1.0 * n_traj));
  CHECK(var == doctest::Approx(1.0 / t_m).epsilon(0.12));
}

TEST_CASE("sim config validation") {
  SimConfig cfg = nbar1_config();
  CHECK_NOTHROW(cfg.validate());
  SimConfig bad = cfg;
  bad.dt = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.t_end = bad.dt / 2.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.initial_qubit_g = 0.8;  // |c_g|^2 + |c_e|^2 != 1
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.params.kappa = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.snapshot_interval = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("wiener increments have the right moments across an ensemble") {
  SimConfig cfg = nbar1_config();
  cfg.t_end = 0.5;
  double sum = 0.0, sum2 = 0.0;
  std::size_t count = 0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const auto res = run_trajectory(cfg, i);
    for (double w : res.record.dW1) {
      sum += w;
      sum2 += w * w;
    }
    count += res.record.steps();
  }
  const double dt = cfg.step_size();
  const double mean = sum / static_cast<double>(count);
  const double var = sum2 / static_cast<double>(count) - mean * mean;
  CHECK(std::abs(mean) <
        4.0 * std::sqrt(dt / static_cast<double>(count)));
  CHECK(var == doctest::Approx(dt).epsilon(0.02));
}

TEST_CASE("lindblad reference") {
  SUBCASE("undriven qubit keeps its coherence") {
    SimConfig cfg;
    cfg.params.kappa = 1.0;
    cfg.params.chi = 0.2;
    cfg.params.eps_m = 0.0;
    cfg.nmax = 3;
    cfg.dt = 1e-3;
    cfg.t_end = 2.0;
    cfg.initial_qubit_g = 1.0 / std::sqrt(2.0);
    cfg.initial_qubit_e = 1.0 / std::sqrt(2.0);
    const auto res = run_lindblad(cfg);
    const QubitDM last = reduce_qubit_dm(res.rho.back(), cfg.nmax);
    CHECK(std::abs(last.rho_ge - Complex(0.5)) < 1e-8);
  }
  SUBCASE("coherence decays at the analytic rate with the ac-Stark phase") {
    SimConfig cfg = nbar1_config();
    cfg.t_end = 2.0;
    const auto res = run_lindblad(cfg);
    for (std::size_t i = 1; i < res.times.size(); ++i) {
      const double t = res.times[i];
      const QubitDM dm = reduce_qubit_dm(res.rho[i], cfg.resolved_nmax());
      const Complex prod = alpha_product_integral(t, cfg.params, 0.0);
      const double gamma_int = 2.0 * cfg.params.chi * std::imag(prod);
      const double phi1_int = 2.0 * cfg.params.chi * std::real(prod);
      // <g|rho|e> = 1/2 exp(-int Gamma_d) exp(+i int B)
      const Complex expect =
          0.5 * std::exp(-gamma_int) * std::polar(1.0, phi1_int);
      CHECK(std::abs(dm.rho_ge - expect) < 0.01 * std::abs(expect));
      CHECK(std::abs(res.rho[i].trace().real() - 1.0) < 1e-8);
    }
  }
}

TEST_CASE("ensemble average of trajectories matches lindblad") {
  SimConfig cfg = nbar1_config();
  cfg.t_end = 1.0;
  cfg.snapshot_interval = 0.25;
  const auto lind = run_lindblad(cfg);

  const int n_traj = 400;
  const double dt = cfg.step_size();
  std::vector<std::size_t> marks;
  for (std::size_t i = 1; i < lind.times.size(); ++i) {
    marks.push_back(
        static_cast<std::size_t>(std::llround(lind.times[i] / dt)));
  }
  std::vector<double> acc_gg(marks.size(), 0.0), acc2_gg(marks.size(), 0.0);
  std::vector<Complex> acc_ge(marks.size(), 0.0);
  std::vector<double> acc2_re(marks.size(), 0.0), acc2_im(marks.size(), 0.0);
  for (int i = 0; i < n_traj; ++i) {
    std::size_t next = 0;
    const auto obs = [&](std::size_t k, double, const JointState& s) {
      if (next < marks.size() && k + 1 == marks[next]) {
        const QubitDM dm = reduce_qubit(s);
        acc_gg[next] += dm.rho_gg;
        acc2_gg[next] += dm.rho_gg * dm.rho_gg;
        acc_ge[next] += dm.rho_ge;
        acc2_re[next] += dm.rho_ge.real() * dm.rho_ge.real();
        acc2_im[next] += dm.rho_ge.imag() * dm.rho_ge.imag();
        ++next;
      }
    };
    run_trajectory(cfg, static_cast<std::uint64_t>(i), obs);
  }
  for (std::size_t m = 0; m < marks.size(); ++m) {
    const QubitDM ref = reduce_qubit_dm(lind.rho[m + 1], cfg.resolved_nmax());
    const double mean_gg = acc_gg[m] / n_traj;
    const double se_gg = std::sqrt(
        std::max(1e-12, acc2_gg[m] / n_traj - mean_gg * mean_gg) / n_traj);
    CHECK(std::abs(mean_gg - ref.rho_gg) < 3.5 * se_gg + 1e-4);
    const Complex mean_ge = acc_ge[m] / static_cast<double>(n_traj);
    const double var_re =
        acc2_re[m] / n_traj - mean_ge.real() * mean_ge.real();
    const double var_im =
        acc2_im[m] / n_traj - mean_ge.imag() * mean_ge.imag();
    const double se_re = std::sqrt(std::max(1e-12, var_re) / n_traj);
    const double se_im = std::sqrt(std::max(1e-12, var_im) / n_traj);
    CHECK(std::abs(mean_ge.real() - ref.rho_ge.real()) < 3.5 * se_re + 1e-4);
    CHECK(std::abs(mean_ge.imag() - ref.rho_ge.imag()) < 3.5 * se_im + 1e-4);
  }
}

TEST_CASE("strong convergence under step refinement with paired increments") {
  SimConfig coarse = nbar1_config();
  coarse.t_end = 1.0;
  const double dt0 = coarse.step_size();
  const std::size_t n0 =
      static_cast<std::size_t>(std::llround(coarse.duration() / dt0));

  // one shared fine Brownian path; coarser runs sum consecutive increments
  GaussianStream xi(99, 0, 0);
  std::vector<double> dw_fine(4 * n0);
  const double sqrt_fine = std::sqrt(dt0 / 4.0);
  for (auto& w : dw_fine) w = xi.next() * sqrt_fine;

  const auto run_with = [&](int refine) {
    SimConfig cfg = coarse;
    cfg.dt = coarse.dt / refine;
    QteSimulator sim(cfg);
    JointState s = sim.initial_state();
    const int group = 4 / refine;
    for (std::size_t k = 0; k < n0 * static_cast<std::size_t>(refine); ++k) {
      double dw = 0.0;
      for (int j = 0; j < group; ++j) {
        dw += dw_fine[k * static_cast<std::size_t>(group) +
                      static_cast<std::size_t>(j)];
      }
      sim.step_single(s, dw);
    }
    return s;
  };

  const JointState s1 = run_with(1);
  const JointState s2 = run_with(2);
  const JointState s4 = run_with(4);
  const double err1 = 1.0 - std::norm(s1.amp.dot(s4.amp));
  const double err2 = 1.0 - std::norm(s2.amp.dot(s4.amp));
  CHECK(err1 < 1e-3);
  CHECK(err2 < err1);
}

TEST_CASE("reductions and conditional states") {
  const int nmax = 4;
  SUBCASE("product state gives the pure conditional cavity state") {
    const auto cav = coherent_state(Complex(0.4, 0.3), nmax);
    const auto s = make_joint_state(1.0, 0.0, cav.state);
    const CavityDM dm = conditional_cavity(s, Branch::g);
    CHECK(dm.trace() == doctest::Approx(1.0).epsilon(1e-10));
    // the truncated coherent bra is renormalized, so self-fidelity is 1
    CHECK(coherent_expectation(dm, Complex(0.4, 0.3)) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(conditional_cavity(s, Branch::e), std::runtime_error);
  }
  SUBCASE("reduced coherence is c_g c_e* times the cavity overlap") {
    const Complex c_g(0.52, 0.31), c_e(0.69, -0.4);
    const auto cav_g = coherent_state(Complex(0.5, -0.2), nmax);
    const auto cav_e = coherent_state(Complex(-0.4, -0.25), nmax);
    JointState s;
    s.nmax = nmax;
    s.amp.resize(2 * (nmax + 1));
    s.block_g() = c_g * cav_g.state.coeffs;
    s.block_e() = c_e * cav_e.state.coeffs;
    const double nrm = s.norm();
    s.normalize();
    const QubitDM dm = reduce_qubit(s);
    const Complex overlap = cav_e.state.coeffs.dot(cav_g.state.coeffs);
    const Complex expect = c_g * std::conj(c_e) * overlap / (nrm * nrm);
    CHECK(std::abs(dm.rho_ge - expect) < 1e-12);
    CHECK(dm.rho_gg + dm.rho_ee == doctest::Approx(1.0).epsilon(1e-10));
  }
}
