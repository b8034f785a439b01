// Closed-form conditional cavity fields and the measurement rates built
// from them. These analytic expressions are the reference the stochastic
// integrators and Bayesian rules are tested against.
//
// Conventions (documented in all emitted CSV headers):
//   beta(t)  = alpha_e(t) - alpha_g(t) = |beta| e^{i theta_beta},
//   mu(t)    = alpha_e(t) + alpha_g(t) = |mu| e^{i theta_mu},
//   theta on (-pi, pi]. For Delta_r = 0 and a vacuum start, beta(t) is real
//   and negative, i.e. theta_beta = pi (not 0); only cos^2/sin^2 of
//   (phi - theta_beta) enter the rates, so all rate formulas are unaffected.
//   Signed detection-channel coefficients carry the convention where it
//   matters: info = g Re[beta e^{-i phi}], ba = g Im[beta e^{-i phi}], with
//   channel gain g = sqrt(kappa) (single quadrature) or sqrt(kappa/2) (I/Q).

#pragma once

#include "cqed/model.hpp"

namespace cqed {

// Steady-state field: alpha_bar_{g(e)} = -i eps_m / (i Delta_r^{(-/+)} + kappa/2),
// Delta_r^{(+-)} = Delta_r +- chi.
Complex alpha_steady(const ModelParams& p, Branch branch);

// Transient solution of  d alpha = -i eps_m - (i Delta + kappa/2) alpha.
Complex alpha_transient(double t, const ModelParams& p, Branch branch,
                        Complex alpha0);

// Closed-form int_0^t alpha(s) ds (antiderivative of the exponential
// solution; serves as the independent oracle for time-averaged outputs).
Complex alpha_integral(double t, const ModelParams& p, Branch branch,
                       Complex alpha0);

// Closed-form int_0^t alpha_g(s) alpha_e^*(s) ds. Re gives Phi_1, Im the
// accumulated ensemble dephasing.
Complex alpha_product_integral(double t, const ModelParams& p, Complex alpha0);

// Time-local rates at the analytic fields.
struct RateSet {
  Complex alpha_g, alpha_e;
  double beta_abs = 0.0, theta_beta = 0.0;
  double mu_abs = 0.0, theta_mu = 0.0;
  double B = 0.0;          // generalized ac-Stark shift, 2 chi Re[a_g a_e*]
  double gamma_d = 0.0;    // ensemble dephasing, 2 chi Im[a_g a_e*]
  double gamma_ci = 0.0;   // information gain at phi_lo
  double gamma_ba = 0.0;   // phase back-action at phi_lo
  double gamma_m = 0.0;    // kappa |beta|^2 = gamma_ci + gamma_ba
  double purity_D = 1.0;   // |<alpha_e|alpha_g>|
};

RateSet rates_at(double t, const ModelParams& p, Complex alpha0);

// D(t) = exp{-1/2(|a_e|^2+|a_g|^2) + Re[a_e a_g*]}.
double purity_overlap(double t, const ModelParams& p, Complex alpha0);

// D(t) = exp{-int_0^t [Gamma_d - Gamma_m/2]}, adaptive-Simpson quadrature
// (rel. tol 1e-10). Equals purity_overlap for Delta_r = 0, alpha0 = 0.
double purity_integral(double t, const ModelParams& p, Complex alpha0);

// Signed single-channel coefficients at LO phase phi and gain g.
double channel_info(Complex beta, double phi, double gain);
double channel_backaction(Complex beta, double phi, double gain);
double channel_baseline(Complex mu, double phi, double gain);

// Convenience: signed coefficients of the single-quadrature channel at
// p.phi_lo (gain sqrt(kappa)). gamma_ci = info^2, gamma_ba = ba^2.
double info_coeff(double t, const ModelParams& p, Complex alpha0);
double backaction_coeff(double t, const ModelParams& p, Complex alpha0);

enum class QuadratureMode { single, I, Q };

// Time-averaged mean detector output over [0, t_m] for a pinned qubit
// branch. single: (1/t_m) int 2 sqrt(kappa) Re[alpha e^{-i phi}];
// I/Q: (1/t_m) int sqrt(2 kappa) Re/Im[alpha].
double mean_quadrature(double t_m, const ModelParams& p, Branch branch,
                       Complex alpha0, QuadratureMode mode, double phi = 0.0);

}  // namespace cqed
