#include "cqed/bayes.hpp"

#include <cmath>

namespace cqed {

namespace {

double gaussian(double x, double mean, double var) {
  const double d = x - mean;
  return std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * M_PI * var);
}

// Time-average of the mu baseline over [0, t_m] for one channel.
double baseline_average(double t_m, const ModelParams& p, Complex alpha0,
                        double phi, double gain) {
  const Complex imu = alpha_integral(t_m, p, Branch::g, alpha0) +
                      alpha_integral(t_m, p, Branch::e, alpha0);
  return channel_baseline(imu, phi, gain) / t_m;
}

}  // namespace

Likelihoods gaussian_likelihoods_single(double I_m, double t_m,
                                        const ModelParams& p, double phi,
                                        Complex alpha0) {
  if (!(t_m > 0.0)) {
    throw std::invalid_argument("gaussian_likelihoods: t_m must be > 0");
  }
  const double var = 1.0 / t_m;
  const double mean_g =
      mean_quadrature(t_m, p, Branch::g, alpha0, QuadratureMode::single, phi);
  const double mean_e =
      mean_quadrature(t_m, p, Branch::e, alpha0, QuadratureMode::single, phi);
  return {gaussian(I_m, mean_g, var), gaussian(I_m, mean_e, var)};
}

Likelihoods gaussian_likelihoods_iq(double I_m, double Q_m, double t_m,
                                    const ModelParams& p, Complex alpha0) {
  if (!(t_m > 0.0)) {
    throw std::invalid_argument("gaussian_likelihoods: t_m must be > 0");
  }
  const double var = 1.0 / t_m;
  Likelihoods lk;
  lk.p_g = gaussian(I_m, mean_quadrature(t_m, p, Branch::g, alpha0,
                                         QuadratureMode::I),
                    var) *
           gaussian(Q_m, mean_quadrature(t_m, p, Branch::g, alpha0,
                                         QuadratureMode::Q),
                    var);
  lk.p_e = gaussian(I_m, mean_quadrature(t_m, p, Branch::e, alpha0,
                                         QuadratureMode::I),
                    var) *
           gaussian(Q_m, mean_quadrature(t_m, p, Branch::e, alpha0,
                                         QuadratureMode::Q),
                    var);
  return lk;
}

std::pair<double, double> update_diagonal(const QubitDM& prior,
                                          const Likelihoods& lk) {
  if (lk.p_g < 0.0 || lk.p_e < 0.0) {
    throw std::invalid_argument("update_diagonal: negative likelihood");
  }
  const double evidence = prior.rho_gg * lk.p_g + prior.rho_ee * lk.p_e;
  if (evidence <= 0.0) {
    throw std::runtime_error("update_diagonal: degenerate evidence");
  }
  return {prior.rho_gg * lk.p_g / evidence, prior.rho_ee * lk.p_e / evidence};
}

Complex bare_offdiagonal(const QubitDM& prior, const Likelihoods& lk,
                         double t_m, const ModelParams& p) {
  const double evidence = prior.rho_gg * lk.p_g + prior.rho_ee * lk.p_e;
  if (evidence <= 0.0) {
    throw std::runtime_error("bare_offdiagonal: degenerate evidence");
  }
  return prior.rho_ge * std::polar(1.0, p.omega_q_tilde * t_m) *
         std::sqrt(lk.p_g * lk.p_e) / evidence;
}

double phi1(double t_m, const ModelParams& p, Complex alpha0) {
  if (t_m < 0.0) throw std::invalid_argument("phi1: t_m must be >= 0");
  if (t_m == 0.0) return 0.0;
  return 2.0 * p.chi * std::real(alpha_product_integral(t_m, p, alpha0));
}

double phi2_exact(const TrajectoryRecord& rec, std::size_t n_steps,
                  const ModelParams& p, Complex alpha0) {
  if (n_steps > rec.steps()) {
    throw std::invalid_argument("phi2_exact: record shorter than requested");
  }
  double acc = 0.0;
  if (rec.scheme == Scheme::single_quadrature) {
    const double g = std::sqrt(p.kappa);
    for (std::size_t k = 0; k < n_steps; ++k) {
      const double t = rec.times[k];
      const Complex ag = alpha_transient(t, p, Branch::g, alpha0);
      const Complex ae = alpha_transient(t, p, Branch::e, alpha0);
      const double ba = channel_backaction(ae - ag, p.phi_lo, g);
      const double base = channel_baseline(ae + ag, p.phi_lo, g);
      acc += ba * (rec.I[k] - base);
    }
  } else {
    const double g = std::sqrt(p.kappa / 2.0);
    for (std::size_t k = 0; k < n_steps; ++k) {
      const double t = rec.times[k];
      const Complex ag = alpha_transient(t, p, Branch::g, alpha0);
      const Complex ae = alpha_transient(t, p, Branch::e, alpha0);
      const Complex beta = ae - ag;
      const Complex mu = ae + ag;
      acc += channel_backaction(beta, 0.0, g) *
             (rec.I[k] - channel_baseline(mu, 0.0, g));
      acc += channel_backaction(beta, M_PI / 2.0, g) *
             (rec.Q[k] - channel_baseline(mu, M_PI / 2.0, g));
    }
  }
  return -acc * rec.dt;
}

double phi2_approx(double integrated_out, double t_m, const ModelParams& p,
                   Complex alpha0, Scheme scheme, Phi2Scale scale) {
  if (!(t_m > 0.0)) throw std::invalid_argument("phi2_approx: t_m must be > 0");
  double ba_end, base_avg;
  const Complex ag = alpha_transient(t_m, p, Branch::g, alpha0);
  const Complex ae = alpha_transient(t_m, p, Branch::e, alpha0);
  if (scheme == Scheme::single_quadrature) {
    const double g = std::sqrt(p.kappa);
    ba_end = channel_backaction(ae - ag, p.phi_lo, g);
    base_avg = baseline_average(t_m, p, alpha0, p.phi_lo, g);
  } else {
    // Q-quadrature branch carries the back-action in the I/Q scheme.
    const double g = std::sqrt(p.kappa / 2.0);
    ba_end = channel_backaction(ae - ag, M_PI / 2.0, g);
    base_avg = baseline_average(t_m, p, alpha0, M_PI / 2.0, g);
  }
  const double s = scale == Phi2Scale::time_scaled ? t_m : 1.0;
  return -ba_end * s * (integrated_out - base_avg);
}

Br1Factors br1_factors(const ModelParams& p) {
  Br1Factors f;
  const double alpha0_abs = 2.0 * std::abs(p.eps_m) / p.kappa;
  f.n_bar = alpha0_abs * alpha0_abs;
  f.B = 2.0 * p.chi * f.n_bar;
  const double ratio = p.chi / p.kappa;
  f.ba_single =
      4.0 * std::sqrt(f.n_bar * p.kappa) * ratio * std::sin(p.phi_lo);
  // Gamma_m/2 = 8 nbar kappa (chi/kappa)^2 per channel
  f.ba_iq = std::sqrt(8.0 * f.n_bar * p.kappa) * std::abs(ratio);
  return f;
}

void BayesInput::validate() const {
  params.validate();
  if (!(t_m > 0.0)) throw std::invalid_argument("BayesInput: t_m must be > 0");
  prior.validate();
  if (variant == Variant::br2 && record == nullptr) {
    throw std::invalid_argument("BayesInput: br2 requires a sampled record");
  }
  if (record != nullptr && record->scheme != scheme) {
    throw std::invalid_argument("BayesInput: record scheme mismatch");
  }
  if (record == nullptr && !I_m.has_value()) {
    throw std::invalid_argument("BayesInput: need a record or integrated I_m");
  }
  if (scheme == Scheme::two_quadrature && record == nullptr &&
      !Q_m.has_value()) {
    throw std::invalid_argument("BayesInput: two-quadrature needs Q_m");
  }
}

BayesResult update_full(const BayesInput& in) {
  in.validate();
  const ModelParams& p = in.params;

  std::size_t n_steps = 0;
  if (in.record != nullptr) {
    n_steps = static_cast<std::size_t>(std::llround(in.t_m / in.record->dt));
    if (n_steps < 1 || n_steps > in.record->steps()) {
      throw std::invalid_argument(
          "update_full: t_m incompatible with record cadence");
    }
  }
  const double I_m = in.I_m.has_value() ? *in.I_m
                                        : in.record->integrated_I(n_steps);
  double Q_m = 0.0;
  if (in.scheme == Scheme::two_quadrature) {
    Q_m = in.Q_m.has_value() ? *in.Q_m : in.record->integrated_Q(n_steps);
  }

  const Likelihoods lk =
      in.scheme == Scheme::single_quadrature
          ? gaussian_likelihoods_single(I_m, in.t_m, p, p.phi_lo, in.alpha0)
          : gaussian_likelihoods_iq(I_m, Q_m, in.t_m, p, in.alpha0);

  BayesResult out;
  auto [rho_gg, rho_ee] = update_diagonal(in.prior, lk);
  out.posterior.rho_gg = rho_gg;
  out.posterior.rho_ee = rho_ee;
  Complex off = bare_offdiagonal(in.prior, lk, in.t_m, p);

  switch (in.variant) {
    case Variant::bare:
      break;
    case Variant::br1: {
      const Br1Factors f = br1_factors(p);
      out.phi1 = f.B * in.t_m;
      const double ba = in.scheme == Scheme::single_quadrature ? f.ba_single
                                                               : f.ba_iq;
      const double base_avg =
          in.scheme == Scheme::single_quadrature
              ? baseline_average(in.t_m, p, in.alpha0, p.phi_lo,
                                 std::sqrt(p.kappa))
              : baseline_average(in.t_m, p, in.alpha0, M_PI / 2.0,
                                 std::sqrt(p.kappa / 2.0));
      const double y = in.scheme == Scheme::single_quadrature ? I_m : Q_m;
      out.phi2 = -ba * in.t_m * (y - base_avg);
      out.purity_factor = 1.0;
      off *= std::polar(1.0, out.phi1 + out.phi2);
      break;
    }
    case Variant::br2:
    case Variant::br2_prime: {
      out.purity_factor = purity_overlap(in.t_m, p, in.alpha0);
      out.phi1 = phi1(in.t_m, p, in.alpha0);
      if (in.variant == Variant::br2) {
        out.phi2 = phi2_exact(*in.record, n_steps, p, in.alpha0);
      } else {
        const double y =
            in.scheme == Scheme::single_quadrature ? I_m : Q_m;
        out.phi2 = phi2_approx(y, in.t_m, p, in.alpha0, in.scheme,
                               in.phi2_scale);
      }
      if (in.ablation.purity) off *= out.purity_factor;
      off *= std::polar(1.0, (in.ablation.phi1 ? out.phi1 : 0.0) +
                                 (in.ablation.phi2 ? out.phi2 : 0.0));
      break;
    }
  }

  const double bound = std::sqrt(std::max(0.0, rho_gg * rho_ee));
  if (std::abs(off) > bound) {
    off *= bound / std::abs(off);
    out.clamped = true;
  }
  out.posterior.rho_ge = off;
  out.posterior.validate();
  return out;
}

std::vector<double> bayes_diagonal_filter(const TrajectoryRecord& rec,
                                          const QubitDM& prior,
                                          const ModelParams& p,
                                          Complex alpha0) {
  const bool two = rec.scheme == Scheme::two_quadrature;
  std::vector<double> out;
  out.reserve(rec.steps());
  double rho_gg = prior.rho_gg;
  double rho_ee = prior.rho_ee;
  const double dt = rec.dt;
  for (std::size_t k = 0; k < rec.steps(); ++k) {
    const double t = rec.times[k];
    const Complex ag = alpha_transient(t, p, Branch::g, alpha0);
    const Complex ae = alpha_transient(t, p, Branch::e, alpha0);
    // per-step Gaussian likelihood, mean h_i dt, variance dt; the constant
    // factor cancels in the normalization
    double log_wg = 0.0, log_we = 0.0;
    if (two) {
      const double g = std::sqrt(p.kappa / 2.0);
      const double hg_i = 2.0 * g * std::real(ag);
      const double he_i = 2.0 * g * std::real(ae);
      const double hg_q = 2.0 * g * std::imag(ag);
      const double he_q = 2.0 * g * std::imag(ae);
      log_wg = hg_i * rec.I[k] * dt - 0.5 * hg_i * hg_i * dt +
               hg_q * rec.Q[k] * dt - 0.5 * hg_q * hg_q * dt;
      log_we = he_i * rec.I[k] * dt - 0.5 * he_i * he_i * dt +
               he_q * rec.Q[k] * dt - 0.5 * he_q * he_q * dt;
    } else {
      const double g = std::sqrt(p.kappa);
      const Complex lo = std::polar(1.0, -p.phi_lo);
      const double hg = 2.0 * g * std::real(ag * lo);
      const double he = 2.0 * g * std::real(ae * lo);
      log_wg = hg * rec.I[k] * dt - 0.5 * hg * hg * dt;
      log_we = he * rec.I[k] * dt - 0.5 * he * he * dt;
    }
    // subtract the common part before exponentiating
    const double m = std::max(log_wg, log_we);
    const double wg = rho_gg * std::exp(log_wg - m);
    const double we = rho_ee * std::exp(log_we - m);
    rho_gg = wg / (wg + we);
    rho_ee = we / (wg + we);
    out.push_back(rho_gg);
  }
  return out;
}

}  // namespace cqed
