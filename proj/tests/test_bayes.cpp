#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cqed/bayes.hpp"
#include "cqed/polaron.hpp"

using namespace cqed;

namespace {

SimConfig nbar1_config(Scheme scheme = Scheme::single_quadrature) {
  SimConfig cfg;
  cfg.params.delta_r = 0.0;
  cfg.params.chi = 0.1;
  cfg.params.eps_m = 1.0;
  cfg.params.kappa = 2.0;
  cfg.params.phi_lo = M_PI / 4.0;
  cfg.scheme = scheme;
  cfg.dt = 1e-3;
  cfg.t_end = 2.0;
  cfg.seed = 23;
  cfg.initial_qubit_g = 1.0 / std::sqrt(2.0);
  cfg.initial_qubit_e = 1.0 / std::sqrt(2.0);
  return cfg;
}

SimConfig nbar4_config(Scheme scheme = Scheme::single_quadrature) {
  SimConfig cfg = nbar1_config(scheme);
  cfg.params.kappa = 1.0;
  return cfg;
}

QubitDM balanced_prior() {
  QubitDM rho;
  rho.rho_gg = rho.rho_ee = 0.5;
  rho.rho_ge = 0.5;
  return rho;
}

BayesInput make_input(const SimConfig& cfg, const TrajectoryRecord& rec,
                      Variant v, double t_m_abs) {
  BayesInput in;
  in.prior = balanced_prior();
  in.prior.rho_ge = cfg.initial_qubit_g * std::conj(cfg.initial_qubit_e);
  in.prior.rho_gg = std::norm(cfg.initial_qubit_g);
  in.prior.rho_ee = std::norm(cfg.initial_qubit_e);
  in.t_m = t_m_abs;
  in.params = cfg.params;
  in.alpha0 = cfg.initial_cavity;
  in.scheme = cfg.scheme;
  in.variant = v;
  in.record = &rec;
  return in;
}

}  // namespace

TEST_CASE("gaussian likelihood form") {
  const auto cfg = nbar1_config();
  const double t_m = 1.0;

  SUBCASE("peak value is sqrt(t_m / 2 pi)") {
    const double mean_g = mean_quadrature(t_m, cfg.params, Branch::g, 0.0,
                                          QuadratureMode::single,
                                          cfg.params.phi_lo);
    const auto lk = gaussian_likelihoods_single(mean_g, t_m, cfg.params,
                                                cfg.params.phi_lo, 0.0);
    CHECK(lk.p_g ==
          doctest::Approx(std::sqrt(t_m / (2.0 * M_PI))).epsilon(1e-12));
    CHECK(lk.p_e < lk.p_g);
  }
  SUBCASE("likelihood ratio follows the mean separation") {
    // two-mean benchmark case: means +-1, t_m = 1, I_m at the g mean gives
    // p_e/p_g = e^{-2}; checked on the production function through the
    // general ratio formula exp[-t_m((I-Ie)^2 - (I-Ig)^2)/2]
    const double mean_g = mean_quadrature(t_m, cfg.params, Branch::g, 0.0,
                                          QuadratureMode::single,
                                          cfg.params.phi_lo);
    const double mean_e = mean_quadrature(t_m, cfg.params, Branch::e, 0.0,
                                          QuadratureMode::single,
                                          cfg.params.phi_lo);
    for (double im : {mean_g, 0.3 * mean_g + 0.7 * mean_e, mean_e, 1.4}) {
      const auto lk = gaussian_likelihoods_single(im, t_m, cfg.params,
                                                  cfg.params.phi_lo, 0.0);
      const double expect = std::exp(
          -0.5 * t_m *
          ((im - mean_e) * (im - mean_e) - (im - mean_g) * (im - mean_g)));
      CHECK(lk.p_e / lk.p_g == doctest::Approx(expect).epsilon(1e-10));
    }
    const double delta = 2.0 / std::sqrt(t_m);
    const double ratio =
        std::exp(-0.5 * t_m * delta * delta);  // means +-delta/2, I_m at g
    CHECK(ratio == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
  }
  SUBCASE("orthogonal LO phase gives equal likelihoods") {
    // phi = theta_beta + pi/2 = 3 pi/2 here; means coincide
    ModelParams p = cfg.params;
    p.phi_lo = 3.0 * M_PI / 2.0;
    for (double im : {-0.4, 0.0, 0.9}) {
      const auto lk = gaussian_likelihoods_single(im, t_m, p, p.phi_lo, 0.0);
      CHECK(lk.p_g == doctest::Approx(lk.p_e).epsilon(1e-12));
    }
  }
}

TEST_CASE("diagonal Bayes update") {
  QubitDM prior = balanced_prior();
  SUBCASE("flat likelihood leaves the state alone") {
    const auto [gg, ee] = update_diagonal(prior, {0.37, 0.37});
    CHECK(gg == doctest::Approx(0.5));
    CHECK(ee == doctest::Approx(0.5));
  }
  SUBCASE("e^-2 likelihood ratio") {
    const auto [gg, ee] = update_diagonal(prior, {1.0, std::exp(-2.0)});
    CHECK(gg == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))).epsilon(1e-12));
    CHECK(gg == doctest::Approx(0.8808).epsilon(1e-4));
    CHECK(gg + ee == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("absorbing pure states") {
    QubitDM pure;
    pure.rho_gg = 1.0;
    pure.rho_ee = 0.0;
    pure.rho_ge = 0.0;
    const auto [gg, ee] = update_diagonal(pure, {0.2, 5.0});
    CHECK(gg == 1.0);
    CHECK(ee == 0.0);
  }
  SUBCASE("degenerate evidence throws") {
    QubitDM pure;
    pure.rho_gg = 1.0;
    pure.rho_ee = 0.0;
    CHECK_THROWS_AS(update_diagonal(pure, {0.0, 1.0}), std::runtime_error);
  }
}

TEST_CASE("bare off-diagonal factor") {
  const auto cfg = nbar1_config();
  SUBCASE("balanced likelihoods keep maximal coherence") {
    const Complex off =
        bare_offdiagonal(balanced_prior(), {0.8, 0.8}, 1.0, cfg.params);
    CHECK(std::abs(off) == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("pure prior stays pure") {
    std::mt19937 gen(4);
    std::uniform_real_distribution<double> u(0.05, 2.0);
    for (int rep = 0; rep < 100; ++rep) {
      QubitDM prior;
      const double gg = 0.1 + 0.8 * u(gen) / 2.0;
      prior.rho_gg = gg;
      prior.rho_ee = 1.0 - gg;
      prior.rho_ge = std::polar(std::sqrt(gg * (1.0 - gg)), u(gen));
      const Likelihoods lk{u(gen), u(gen)};
      const auto [pgg, pee] = update_diagonal(prior, lk);
      const Complex off = bare_offdiagonal(prior, lk, 1.0, cfg.params);
      CHECK(std::abs(off) == doctest::Approx(std::sqrt(pgg * pee)).epsilon(1e-10));
    }
  }
  SUBCASE("rotating-frame phase advance") {
    ModelParams p = cfg.params;
    p.omega_q_tilde = 0.7;
    const double t_m = 1.3;
    const Complex off =
        bare_offdiagonal(balanced_prior(), {1.0, 1.0}, t_m, p);
    // literal <g|rho|e> rotates as e^{+i omega_q t}
    CHECK(std::arg(off) == doctest::Approx(0.7 * 1.3).epsilon(1e-12));
  }
}

TEST_CASE("phi1 closed form") {
  SUBCASE("no dispersive shift, no phase") {
    ModelParams p = nbar1_config().params;
    p.chi = 0.0;
    CHECK(phi1(2.0, p, 0.0) == 0.0);
  }
  SUBCASE("matches adaptive quadrature of B(t)") {
    const auto p = nbar4_config().params;
    for (double t_m : {0.5, 2.0, 7.0}) {
      const int n = 40000;
      double acc = 0.0;
      for (int k = 0; k < n; ++k) {
        const double t = (k + 0.5) * t_m / n;
        acc += rates_at(t, p, 0.0).B;
      }
      acc *= t_m / n;
      CHECK(phi1(t_m, p, 0.0) == doctest::Approx(acc).epsilon(1e-7));
    }
  }
  SUBCASE("long-time slope is the steady ac-Stark shift") {
    const auto p = nbar4_config().params;
    const double slope = (phi1(42.0, p, 0.0) - phi1(40.0, p, 0.0)) / 2.0;
    CHECK(slope == doctest::Approx(0.710059).epsilon(1e-5));
  }
  SUBCASE("bad-cavity slope reduces to 2 chi nbar") {
    ModelParams p;
    p.chi = 0.01;
    p.eps_m = 0.5;
    p.kappa = 1.0;  // nbar = 1
    const double slope = (phi1(62.0, p, 0.0) - phi1(60.0, p, 0.0)) / 2.0;
    CHECK(slope == doctest::Approx(2.0 * p.chi * 1.0).epsilon(0.01));
  }
}

TEST_CASE("phi2 from sampled records") {
  SUBCASE("phase-sensitive detection: phi = theta_beta kills phi2") {
    SimConfig cfg = nbar1_config();
    cfg.params.phi_lo = M_PI;  // theta_beta = pi for all t here
    const auto res = run_trajectory(cfg, 1);
    CHECK(std::abs(phi2_exact(res.record, res.record.steps(), cfg.params,
                              0.0)) < 1e-12);
  }
  SUBCASE("record equal to the baseline gives zero") {
    const SimConfig cfg = nbar1_config();
    TrajectoryRecord rec;
    rec.scheme = Scheme::single_quadrature;
    rec.dt = 1e-3;
    for (int k = 0; k < 500; ++k) {
      const double t = k * rec.dt;
      rec.times.push_back(t);
      rec.I.push_back(current_baseline(t, cfg.params, 0.0, cfg.params.phi_lo));
      rec.dW1.push_back(0.0);
    }
    CHECK(phi2_exact(rec, rec.steps(), cfg.params, 0.0) == doctest::Approx(0.0));
  }
  SUBCASE("Ito isometry: Var[phi2] = int Gamma_ba dt for a pinned qubit") {
    SimConfig cfg = nbar1_config();
    cfg.params.phi_lo = M_PI / 2.0;  // info = 0, I~ = xi
    cfg.initial_qubit_g = 1.0;
    cfg.initial_qubit_e = 0.0;
    cfg.t_end = 1.0;
    const int n_rec = 500;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n_rec; ++i) {
      const auto res = run_trajectory(cfg, static_cast<std::uint64_t>(i));
      const double p2 =
          phi2_exact(res.record, res.record.steps(), cfg.params, 0.0);
      sum += p2;
      sum2 += p2 * p2;
    }
    const double var = sum2 / n_rec - (sum / n_rec) * (sum / n_rec);
    const int n = 20000;
    double gba_int = 0.0;
    for (int k = 0; k < n; ++k) {
      const double t = (k + 0.5) * cfg.duration() / n;
      const double ba = backaction_coeff(t, cfg.params, 0.0);
      gba_int += ba * ba;
    }
    gba_int *= cfg.duration() / n;
    CHECK(var == doctest::Approx(gba_int).epsilon(0.2));
    CHECK(std::abs(sum / n_rec) < 3.0 * std::sqrt(gba_int / n_rec));
  }
}

TEST_CASE("phi2 integrated-output approximation") {
  const SimConfig cfg = nbar1_config();
  SUBCASE("on-mean output gives zero") {
    const double t_m = 1.0;
    const Complex imu = alpha_integral(t_m, cfg.params, Branch::g, 0.0) +
                        alpha_integral(t_m, cfg.params, Branch::e, 0.0);
    const double mean_out =
        std::sqrt(cfg.params.kappa) *
        std::real(imu * std::polar(1.0, -cfg.params.phi_lo)) / t_m;
    CHECK(phi2_approx(mean_out, t_m, cfg.params, 0.0,
                      Scheme::single_quadrature,
                      Phi2Scale::time_scaled) == doctest::Approx(0.0));
  }
  SUBCASE("vanishing back-action rate gives zero") {
    ModelParams p = cfg.params;
    p.phi_lo = M_PI;
    CHECK(std::abs(phi2_approx(1.7, 1.0, p, 0.0, Scheme::single_quadrature,
                               Phi2Scale::time_scaled)) < 1e-12);
  }
  SUBCASE("scale selection oracle at kappa t_m = 2") {
    SimConfig cfg3 = nbar4_config();
    cfg3.params.phi_lo = M_PI / 4.0;
    const std::size_t n_rec = 200;
    double err_scaled = 0.0, err_unscaled = 0.0;
    for (std::size_t i = 0; i < n_rec; ++i) {
      const auto res = run_trajectory(cfg3, i);
      const double t_m = cfg3.duration();
      const double exact =
          phi2_exact(res.record, res.record.steps(), cfg3.params, 0.0);
      const double im = res.record.integrated_I(res.record.steps());
      err_scaled += std::abs(
          phi2_approx(im, t_m, cfg3.params, 0.0, Scheme::single_quadrature,
                      Phi2Scale::time_scaled) -
          exact);
      err_unscaled += std::abs(
          phi2_approx(im, t_m, cfg3.params, 0.0, Scheme::single_quadrature,
                      Phi2Scale::unscaled) -
          exact);
    }
    // with a vacuum start the back-action coefficient is still growing at
    // kappa t_m = 2; the literal endpoint form tracks the exact integral
    // better there, and is the selected project default
    CHECK(err_unscaled < err_scaled);
    CHECK(kDefaultPhi2Scale == Phi2Scale::unscaled);
  }
}

TEST_CASE("update_full across variants") {
  SUBCASE("chi -> 0 reduces every variant to the prior") {
    SimConfig cfg = nbar1_config();
    cfg.params.chi = 0.0;
    cfg.t_end = 1.0;
    const auto res = run_trajectory(cfg, 2);
    for (Variant v : {Variant::bare, Variant::br1, Variant::br2,
                      Variant::br2_prime}) {
      const auto in = make_input(cfg, res.record, v, cfg.duration());
      const BayesResult out = update_full(in);
      CHECK(out.posterior.rho_gg == doctest::Approx(0.5).epsilon(1e-9));
      CHECK(std::abs(out.posterior.rho_ge - Complex(0.5)) < 1e-9);
      CHECK(out.phi1 == doctest::Approx(0.0));
      CHECK(out.phi2 == doctest::Approx(0.0));
      CHECK(out.purity_factor == doctest::Approx(1.0));
    }
  }
  SUBCASE("diagonals are identical across variants") {
    SimConfig cfg = nbar1_config();
    const auto res = run_trajectory(cfg, 3);
    const double t_m = cfg.duration();
    const auto bare =
        update_full(make_input(cfg, res.record, Variant::bare, t_m));
    for (Variant v : {Variant::br1, Variant::br2, Variant::br2_prime}) {
      const auto out = update_full(make_input(cfg, res.record, v, t_m));
      CHECK(out.posterior.rho_gg == bare.posterior.rho_gg);
      CHECK(out.posterior.rho_ee == bare.posterior.rho_ee);
    }
  }
  SUBCASE("br2 coherence magnitude never exceeds bare") {
    SimConfig cfg = nbar1_config();
    for (std::uint64_t i = 0; i < 20; ++i) {
      const auto res = run_trajectory(cfg, i);
      for (double t_m : {0.25, 0.5, 1.0}) {
        const auto bare =
            update_full(make_input(cfg, res.record, Variant::bare, t_m));
        const auto br2 =
            update_full(make_input(cfg, res.record, Variant::br2, t_m));
        CHECK(std::abs(br2.posterior.rho_ge) <=
              std::abs(bare.posterior.rho_ge) + 1e-12);
        br2.posterior.validate();
        bare.posterior.validate();
      }
    }
  }
  SUBCASE("br2 requires a sampled record") {
    SimConfig cfg = nbar1_config();
    BayesInput in;
    in.prior = balanced_prior();
    in.t_m = 1.0;
    in.params = cfg.params;
    in.variant = Variant::br2;
    in.I_m = 0.0;
    CHECK_THROWS_AS(update_full(in), std::invalid_argument);
  }
  SUBCASE("single-trajectory tracking: br2 beats bare at nbar ~ 1") {
    SimConfig cfg = nbar1_config();
    double err_bare = 0.0, err_br2 = 0.0;
    const int n_traj = 20;
    for (int i = 0; i < n_traj; ++i) {
      QubitDM truth;
      const auto obs = [&](std::size_t k, double, const JointState& s) {
        if (k + 1 == 2000) truth = reduce_qubit(s);
      };
      const auto res = run_trajectory(cfg, static_cast<std::uint64_t>(i), obs);
      const double t_m = cfg.duration();  // = 2 kappa^-1
      const auto bare =
          update_full(make_input(cfg, res.record, Variant::bare, t_m));
      const auto br2 =
          update_full(make_input(cfg, res.record, Variant::br2, t_m));
      err_bare += std::abs(bare.posterior.rho_ge - truth.rho_ge);
      err_br2 += std::abs(br2.posterior.rho_ge - truth.rho_ge);
    }
    CHECK(err_br2 < err_bare);
    CHECK(err_br2 / n_traj < 0.02);
  }
  SUBCASE("nbar ~ 4 regime: br2 beats br1, single and two-quadrature") {
    for (Scheme scheme :
         {Scheme::single_quadrature, Scheme::two_quadrature}) {
      SimConfig cfg = nbar4_config(scheme);
      double err_br1 = 0.0, err_br2 = 0.0;
      const int n_traj = 20;
      for (int i = 0; i < n_traj; ++i) {
        QubitDM truth;
        const auto obs = [&](std::size_t k, double, const JointState& s) {
          if (k + 1 == 2000) truth = reduce_qubit(s);
        };
        const auto res =
            run_trajectory(cfg, static_cast<std::uint64_t>(i), obs);
        const double t_m = cfg.duration();
        const auto br1 =
            update_full(make_input(cfg, res.record, Variant::br1, t_m));
        const auto br2 =
            update_full(make_input(cfg, res.record, Variant::br2, t_m));
        err_br1 += std::abs(br1.posterior.rho_ge - truth.rho_ge);
        err_br2 += std::abs(br2.posterior.rho_ge - truth.rho_ge);
      }
      CHECK(err_br2 < err_br1);
    }
  }
}

TEST_CASE("martingale property of the diagonal update") {
  SimConfig cfg = nbar1_config();
  cfg.t_end = 1.0;
  const int n_rec = 400;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n_rec; ++i) {
    const auto res = run_trajectory(cfg, static_cast<std::uint64_t>(i));
    const auto out =
        update_full(make_input(cfg, res.record, Variant::bare, cfg.duration()));
    sum += out.posterior.rho_gg;
    sum2 += out.posterior.rho_gg * out.posterior.rho_gg;
  }
  const double mean = sum / n_rec;
  const double se =
      std::sqrt((sum2 / n_rec - mean * mean) / static_cast<double>(n_rec));
  CHECK(std::abs(mean - 0.5) < 3.0 * se);
}

TEST_CASE("two-quadrature posterior ignores Q_m at resonance") {
  SimConfig cfg = nbar1_config(Scheme::two_quadrature);
  const double t_m = 1.0;
  for (double im : {-0.2, 0.4}) {
    const auto base = gaussian_likelihoods_iq(im, 0.3, t_m, cfg.params, 0.0);
    for (double qm : {-1.0, 0.0, 2.2}) {
      const auto lk = gaussian_likelihoods_iq(im, qm, t_m, cfg.params, 0.0);
      CHECK(lk.p_e / lk.p_g ==
            doctest::Approx(base.p_e / base.p_g).epsilon(1e-12));
    }
  }
}

TEST_CASE("sequential diagonal filter matches the QTE") {
  SimConfig cfg = nbar1_config();
  cfg.t_end = 1.0;
  for (std::uint64_t traj = 0; traj < 10; ++traj) {
    std::vector<double> qte_gg;
    const auto obs = [&](std::size_t, double, const JointState& s) {
      qte_gg.push_back(reduce_qubit(s).rho_gg);
    };
    const auto res = run_trajectory(cfg, traj, obs);
    const auto filt = bayes_diagonal_filter(res.record, balanced_prior(),
                                            cfg.params, cfg.initial_cavity);
    REQUIRE(filt.size() == qte_gg.size());
    double max_diff = 0.0;
    for (std::size_t k = 0; k < filt.size(); ++k) {
      max_diff = std::max(max_diff, std::abs(filt[k] - qte_gg[k]));
    }
    CHECK(max_diff < 5e-3);
  }
}

TEST_CASE("br1 limiting factors") {
  const auto p = nbar4_config().params;  // kappa = 1, eps = 1, chi = 0.1
  const auto f = br1_factors(p);
  CHECK(f.n_bar == doctest::Approx(4.0));
  CHECK(f.B == doctest::Approx(2.0 * 0.1 * 4.0));
  // Gamma_ba = 16 nbar kappa (chi/kappa)^2 sin^2 phi at phi = pi/4
  ModelParams q = p;
  q.phi_lo = M_PI / 4.0;
  const auto fq = br1_factors(q);
  CHECK(fq.ba_single * fq.ba_single ==
        doctest::Approx(16.0 * 4.0 * 1.0 * 0.01 * 0.5).epsilon(1e-12));
  CHECK(fq.ba_iq * fq.ba_iq ==
        doctest::Approx(16.0 * 4.0 * 1.0 * 0.01 / 2.0).epsilon(1e-12));
}
