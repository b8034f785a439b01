// Model parameters and the reduced qubit state.
//
// Units: kappa-normalized. All rates are in units of kappa, all times in
// units of 1/kappa, with kappa itself carried explicitly so parameter sets
// quoted at kappa != 1 can be used verbatim.

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

namespace cqed {

using Complex = std::complex<double>;

enum class Branch { g, e };

struct ModelParams {
  double delta_r = 0.0;        // cavity-drive detuning omega_r - omega_m
  double chi = 0.0;            // dispersive shift
  double eps_m = 0.0;          // measurement drive amplitude
  double kappa = 1.0;          // cavity damping rate
  double omega_q_tilde = 0.0;  // qubit frequency in the rotating frame
  double phi_lo = 0.0;         // local-oscillator phase (single-quadrature)

  void validate() const {
    if (!(kappa > 0.0)) {
      throw std::invalid_argument("ModelParams: kappa must be > 0");
    }
    if (!std::isfinite(delta_r) || !std::isfinite(chi) ||
        !std::isfinite(eps_m) || !std::isfinite(kappa) ||
        !std::isfinite(omega_q_tilde) || !std::isfinite(phi_lo)) {
      throw std::invalid_argument("ModelParams: non-finite parameter");
    }
  }
};

// 2x2 qubit density matrix. rho_ge is the literal <g|rho|e> element in the
// sigma_z = |e><e| - |g><g| convention.
struct QubitDM {
  double rho_gg = 1.0;
  double rho_ee = 0.0;
  Complex rho_ge = 0.0;

  double z() const { return rho_ee - rho_gg; }  // <sigma_z>
  double purity() const {
    return rho_gg * rho_gg + rho_ee * rho_ee + 2.0 * std::norm(rho_ge);
  }

  void validate(double tol = 1e-9) const {
    if (std::abs(rho_gg + rho_ee - 1.0) > tol) {
      throw std::runtime_error("QubitDM: trace deviates from 1");
    }
    if (rho_gg < -1e-12 || rho_ee < -1e-12) {
      throw std::runtime_error("QubitDM: negative population");
    }
    const double bound = std::sqrt(std::max(0.0, rho_gg * rho_ee));
    if (std::abs(rho_ge) > bound + tol) {
      throw std::runtime_error("QubitDM: off-diagonal exceeds positivity bound");
    }
  }
};

// Truncation heuristic: enough levels to hold the largest field plus a
// 5-sigma Poisson margin.
int suggested_nmax(const ModelParams& p, Complex alpha0);

}  // namespace cqed
