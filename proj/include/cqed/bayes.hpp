// Quantum Bayesian state-update rules for integrated homodyne records.
//
// Variants:
//   bare      — classical Bayes on the diagonals plus the purity-motivated
//               off-diagonal factor sqrt(P_g P_e)/N, nothing else.
//   br1       — bad-cavity / weak-response limiting rule: purity factor 1,
//               Phi_1 = 2 chi nbar t_m, back-action rate
//               16 nbar kappa (chi/kappa)^2 sin^2(phi), nbar = |2 eps/kappa|^2.
//               Implemented exactly as the limiting formulas.
//   br2       — generalized rule: full purity factor |<a_e|a_g>|, exact
//               Phi_1 = int B dt and Phi_2 accumulated from the sampled record.
//   br2_prime — br2 with Phi_2 approximated from the integrated output alone.
//
// Convention: QubitDM.rho_ge is the literal <g|rho|e> element, which rotates
// as e^{+i omega_q t}; the phase corrections therefore enter as
// exp{+i[Phi_1 + Phi_2]} (complex conjugate of the same rule written for
// <e|rho|g>). Phi_2 uses the signed back-action coefficient
// ba = g Im[beta e^{-i phi}] so the rule stays correct away from
// theta_beta in {0, pi}.

#pragma once

#include <optional>

#include "cqed/cavity_field.hpp"
#include "cqed/model.hpp"
#include "cqed/trajectory.hpp"

namespace cqed {

enum class Variant { bare, br1, br2, br2_prime };

// Eq.-level ablation switches (lambda_1..3 of the unified form); only
// consulted by the br2 family.
struct Ablation {
  bool purity = true;
  bool phi1 = true;
  bool phi2 = true;
};

struct Likelihoods {
  double p_g = 0.0;
  double p_e = 0.0;
};

// P_{g(e)}(I_m) Gaussian with variance D = 1/t_m around the branch means.
Likelihoods gaussian_likelihoods_single(double I_m, double t_m,
                                        const ModelParams& p, double phi,
                                        Complex alpha0);

// Product Gaussian P_{g(e)}(I_m, Q_m), each factor with variance 1/t_m.
Likelihoods gaussian_likelihoods_iq(double I_m, double Q_m, double t_m,
                                    const ModelParams& p, Complex alpha0);

// Classical Bayes on the populations. Throws if the evidence
// N = rho_gg p_g + rho_ee p_e vanishes.
std::pair<double, double> update_diagonal(const QubitDM& prior,
                                          const Likelihoods& lk);

// rho~_ge = rho_ge(0) e^{+i omega_q t_m} sqrt(p_g p_e)/N
Complex bare_offdiagonal(const QubitDM& prior, const Likelihoods& lk,
                         double t_m, const ModelParams& p);

// Phi_1 = int_0^tm B dt, closed form (2 chi Re of the field product integral).
double phi1(double t_m, const ModelParams& p, Complex alpha0);

// Phi_2 from a sampled record over its first n_steps samples:
// single: -sum ba(t_k) [I_k - baseline(t_k)] dt,
// I/Q:    -sum {ba_1(t_k)[I_k - base_1] + ba_2(t_k)[Q_k - base_2]} dt.
double phi2_exact(const TrajectoryRecord& rec, std::size_t n_steps,
                  const ModelParams& p, Complex alpha0);

// Integrated-output approximation. unscaled is the endpoint-rate form
// -ba(t_m) [I_m - Ibar(t_m)]; time_scaled multiplies by t_m, turning the
// mean-free average back into an integral. An oracle comparison against
// phi2_exact over synthetic records (see the test suite and the acceptance
// audit) selects unscaled as the default at the measurement times used in
// the estimator comparisons: with a vacuum start the back-action
// coefficient is still growing there, and the endpoint-rate x average form
// tracks the growing-rate integral better. For t_m far beyond the
// transient the time-scaled form wins instead; both stay selectable.
enum class Phi2Scale { unscaled, time_scaled };
constexpr Phi2Scale kDefaultPhi2Scale = Phi2Scale::unscaled;

double phi2_approx(double integrated_out, double t_m, const ModelParams& p,
                   Complex alpha0, Scheme scheme, Phi2Scale scale);

// Limiting-case constants used by br1.
struct Br1Factors {
  double n_bar;          // |alpha_0|^2, alpha_0 = -2 i eps/kappa
  double B;              // 2 chi nbar
  double ba_single;      // signed, 4 sqrt(nbar kappa) (chi/kappa) sin(phi)
  double ba_iq;          // signed, sqrt(Gamma_m/2) at theta_beta = pi
};
Br1Factors br1_factors(const ModelParams& p);

struct BayesInput {
  QubitDM prior;
  double t_m = 0.0;
  ModelParams params;
  Complex alpha0 = 0.0;
  Scheme scheme = Scheme::single_quadrature;
  Variant variant = Variant::br2;
  Ablation ablation;
  Phi2Scale phi2_scale = kDefaultPhi2Scale;
  const TrajectoryRecord* record = nullptr;  // required for br2
  std::optional<double> I_m;  // taken from the record when absent
  std::optional<double> Q_m;

  void validate() const;
};

struct BayesResult {
  QubitDM posterior;
  double phi1 = 0.0;
  double phi2 = 0.0;
  double purity_factor = 1.0;
  bool clamped = false;  // |rho_ge| clipped to sqrt(rho_gg rho_ee)
};

BayesResult update_full(const BayesInput& input);

// Sequential (per-sample) application of the diagonal Bayes rule along a
// record; converges to the exact conditional populations as dt -> 0 and is
// the oracle for the QTE diagonal dynamics.
std::vector<double> bayes_diagonal_filter(const TrajectoryRecord& rec,
                                          const QubitDM& prior,
                                          const ModelParams& p,
                                          Complex alpha0);

}  // namespace cqed
