// Cavity-eliminated effective qubit trajectory equations (polaron frame).
//
// Rates are evaluated from the analytic cavity fields, never from a
// simulated joint state. Signed channel coefficients are used throughout:
// for a channel with gain g and LO phase phi,
//   info = g Re[beta e^{-i phi}],  ba = g Im[beta e^{-i phi}],
// the detector output is I = g Re[mu e^{-i phi}] + <sigma_z> info + xi, and
// one Ito step of the qubit state (z = <sigma_z>, rho_ge = <g|rho|e>) reads
//   z       += (1 - z^2) sum_k info_k dW_k
//   rho_ge  += [i(omega_q + B) - Gamma_d] rho_ge dt
//              - sum_k (info_k z + i ba_k) rho_ge dW_k.
// At theta_beta = pi (Delta_r = 0, vacuum start) this reduces to the usual
// -sqrt(Gamma_ci) M[sigma_z] / +i sqrt(Gamma_ba)/2 [sigma_z, .] form.

#pragma once

#include <cstdint>
#include <vector>

#include "cqed/cavity_field.hpp"
#include "cqed/model.hpp"
#include "cqed/trajectory.hpp"

namespace cqed {

// Signed channel coefficients entering one step; physical values come from
// the analytic fields, but the step is defined for any coefficient set.
struct PolaronCoeffs {
  double info1 = 0.0, ba1 = 0.0;
  double info2 = 0.0, ba2 = 0.0;
  double B = 0.0, gamma_d = 0.0;
};

PolaronCoeffs polaron_coeffs(double t, const ModelParams& p, Complex alpha0,
                             Scheme scheme);

QubitDM step_polaron(const QubitDM& rho, const PolaronCoeffs& c,
                     double omega_q_tilde, double dt, double dW1, double dW2);

QubitDM step_polaron_single(const QubitDM& rho, double t, double dW,
                            const ModelParams& p, Complex alpha0, double dt);

QubitDM step_polaron_two(const QubitDM& rho, double t, double dW1, double dW2,
                         const ModelParams& p, Complex alpha0, double dt);

// Deterministic part of the single-quadrature output at LO phase phi:
// g Re[mu e^{-i phi}] + <sigma_z> g Re[beta e^{-i phi}], g = sqrt(kappa).
double expected_current(const QubitDM& rho, double t, const ModelParams& p,
                        Complex alpha0, double phi);

// mu-part alone; subtracting it from the record defines I~ for Phi_2.
double current_baseline(double t, const ModelParams& p, Complex alpha0,
                        double phi);

// Qubit state after each step, replaying the stored dW streams of a record.
std::vector<QubitDM> replay_polaron(const TrajectoryRecord& rec,
                                    const QubitDM& prior,
                                    const ModelParams& p, Complex alpha0);

// Fresh-noise run with the same counter-based streams as run_trajectory:
// identical (seed, traj_index) gives the shared noise path.
std::vector<QubitDM> run_polaron(const SimConfig& cfg,
                                 std::uint64_t traj_index = 0);

}  // namespace cqed
