#include "cqed/polaron.hpp"

#include <cmath>

#include "cqed/rng.hpp"

namespace cqed {

PolaronCoeffs polaron_coeffs(double t, const ModelParams& p, Complex alpha0,
                             Scheme scheme) {
  const Complex ag = alpha_transient(t, p, Branch::g, alpha0);
  const Complex ae = alpha_transient(t, p, Branch::e, alpha0);
  const Complex beta = ae - ag;
  PolaronCoeffs c;
  const Complex ge = ag * std::conj(ae);
  c.B = 2.0 * p.chi * std::real(ge);
  c.gamma_d = 2.0 * p.chi * std::imag(ge);
  if (scheme == Scheme::single_quadrature) {
    const double g = std::sqrt(p.kappa);
    c.info1 = channel_info(beta, p.phi_lo, g);
    c.ba1 = channel_backaction(beta, p.phi_lo, g);
  } else {
    const double g = std::sqrt(p.kappa / 2.0);
    c.info1 = channel_info(beta, 0.0, g);
    c.ba1 = channel_backaction(beta, 0.0, g);
    c.info2 = channel_info(beta, M_PI / 2.0, g);
    c.ba2 = channel_backaction(beta, M_PI / 2.0, g);
  }
  return c;
}

QubitDM step_polaron(const QubitDM& rho, const PolaronCoeffs& c,
                     double omega_q_tilde, double dt, double dW1, double dW2) {
  const double z = rho.z();
  const double dz = (1.0 - z * z) * (c.info1 * dW1 + c.info2 * dW2);
  const Complex noise = (c.info1 * z + Complex(0.0, c.ba1)) * dW1 +
                        (c.info2 * z + Complex(0.0, c.ba2)) * dW2;
  const Complex drift =
      Complex(-c.gamma_d, omega_q_tilde + c.B) * dt;  // i(wq+B) - Gd
  QubitDM out;
  const double z_new = z + dz;
  if (std::abs(z_new) > 1.0 + 1e-6) {
    throw std::runtime_error("step_polaron: <sigma_z> left [-1,1], reduce dt");
  }
  out.rho_gg = 0.5 * (1.0 - z_new);
  out.rho_ee = 0.5 * (1.0 + z_new);
  out.rho_ge = rho.rho_ge * (1.0 + drift - noise);
  const double bound = std::sqrt(std::max(0.0, out.rho_gg * out.rho_ee));
  if (std::abs(out.rho_ge) > bound + 1e-3) {
    throw std::runtime_error(
        "step_polaron: off-diagonal invariant violated, reduce dt");
  }
  return out;
}

QubitDM step_polaron_single(const QubitDM& rho, double t, double dW,
                            const ModelParams& p, Complex alpha0, double dt) {
  return step_polaron(rho,
                      polaron_coeffs(t, p, alpha0, Scheme::single_quadrature),
                      p.omega_q_tilde, dt, dW, 0.0);
}

QubitDM step_polaron_two(const QubitDM& rho, double t, double dW1, double dW2,
                         const ModelParams& p, Complex alpha0, double dt) {
  return step_polaron(rho,
                      polaron_coeffs(t, p, alpha0, Scheme::two_quadrature),
                      p.omega_q_tilde, dt, dW1, dW2);
}

double expected_current(const QubitDM& rho, double t, const ModelParams& p,
                        Complex alpha0, double phi) {
  const Complex ag = alpha_transient(t, p, Branch::g, alpha0);
  const Complex ae = alpha_transient(t, p, Branch::e, alpha0);
  const double g = std::sqrt(p.kappa);
  return channel_baseline(ae + ag, phi, g) +
         rho.z() * channel_info(ae - ag, phi, g);
}

double current_baseline(double t, const ModelParams& p, Complex alpha0,
                        double phi) {
  const Complex mu = alpha_transient(t, p, Branch::e, alpha0) +
                     alpha_transient(t, p, Branch::g, alpha0);
  return channel_baseline(mu, phi, std::sqrt(p.kappa));
}

std::vector<QubitDM> replay_polaron(const TrajectoryRecord& rec,
                                    const QubitDM& prior,
                                    const ModelParams& p, Complex alpha0) {
  const bool two = rec.scheme == Scheme::two_quadrature;
  std::vector<QubitDM> out;
  out.reserve(rec.steps());
  QubitDM rho = prior;
  for (std::size_t k = 0; k < rec.steps(); ++k) {
    const double t = rec.times[k];
    if (two) {
      rho = step_polaron_two(rho, t, rec.dW1[k], rec.dW2[k], p, alpha0,
                             rec.dt);
    } else {
      rho = step_polaron_single(rho, t, rec.dW1[k], p, alpha0, rec.dt);
    }
    out.push_back(rho);
  }
  return out;
}

std::vector<QubitDM> run_polaron(const SimConfig& cfg,
                                 std::uint64_t traj_index) {
  cfg.validate();
  const double dt = cfg.step_size();
  const std::size_t n_steps =
      static_cast<std::size_t>(std::llround(cfg.duration() / dt));
  const bool two = cfg.scheme == Scheme::two_quadrature;
  GaussianStream xi1(cfg.seed, traj_index, 0);
  GaussianStream xi2(cfg.seed, traj_index, 1);
  const double sqrt_dt = std::sqrt(dt);

  QubitDM rho;
  rho.rho_gg = std::norm(cfg.initial_qubit_g);
  rho.rho_ee = std::norm(cfg.initial_qubit_e);
  rho.rho_ge = cfg.initial_qubit_g * std::conj(cfg.initial_qubit_e);

  std::vector<QubitDM> out;
  out.reserve(n_steps);
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double dw1 = xi1.next() * sqrt_dt;
    if (two) {
      const double dw2 = xi2.next() * sqrt_dt;
      rho = step_polaron_two(rho, t, dw1, dw2, cfg.params,
                             cfg.initial_cavity, dt);
    } else {
      rho = step_polaron_single(rho, t, dw1, cfg.params, cfg.initial_cavity,
                                dt);
    }
    out.push_back(rho);
  }
  return out;
}

}  // namespace cqed
