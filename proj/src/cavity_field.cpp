#include "cqed/cavity_field.hpp"

#include <cmath>

namespace cqed {

namespace {

constexpr double kAngleFloor = 1e-12;  // below this |beta|, angles are set to 0

// Complex decay exponent of the branch field: alpha(t) = abar + (a0-abar) e^{-z t}.
Complex branch_exponent(const ModelParams& p, Branch branch) {
  const double detuning =
      p.delta_r + (branch == Branch::e ? p.chi : -p.chi);
  return Complex(p.kappa / 2.0, detuning);
}

// Adaptive composite Simpson with absolute/relative tolerance.
template <typename F>
double simpson_recurse(const F& f, double a, double b, double fa, double fm,
                       double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol || depth > 48) {
    if (depth > 48) {
      throw std::runtime_error("purity_integral: quadrature did not converge");
    }
    return left + right + delta / 15.0;
  }
  return simpson_recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth + 1) +
         simpson_recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth + 1);
}

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double rel_tol) {
  if (b <= a) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double scale = std::max(std::abs(whole), 1e-6);
  return simpson_recurse(f, a, b, fa, fm, fb, whole, rel_tol * scale, 0);
}

}  // namespace

int suggested_nmax(const ModelParams& p, Complex alpha0) {
  double amax = std::abs(alpha0);
  amax = std::max(amax, std::abs(alpha_steady(p, Branch::g)));
  amax = std::max(amax, std::abs(alpha_steady(p, Branch::e)));
  const double n = amax * amax;
  return static_cast<int>(std::ceil(n + 5.0 * std::sqrt(n) + 5.0));
}

Complex alpha_steady(const ModelParams& p, Branch branch) {
  return Complex(0.0, -p.eps_m) / branch_exponent(p, branch);
}

Complex alpha_transient(double t, const ModelParams& p, Branch branch,
                        Complex alpha0) {
  const Complex abar = alpha_steady(p, branch);
  const Complex decay = std::exp(-branch_exponent(p, branch) * t);
  return abar * (1.0 - decay) + alpha0 * decay;
}

Complex alpha_integral(double t, const ModelParams& p, Branch branch,
                       Complex alpha0) {
  const Complex abar = alpha_steady(p, branch);
  const Complex z = branch_exponent(p, branch);
  return abar * t + (alpha0 - abar) * (1.0 - std::exp(-z * t)) / z;
}

Complex alpha_product_integral(double t, const ModelParams& p,
                               Complex alpha0) {
  const Complex abar_g = alpha_steady(p, Branch::g);
  const Complex abar_e = alpha_steady(p, Branch::e);
  const Complex zg = branch_exponent(p, Branch::g);
  const Complex zec = std::conj(branch_exponent(p, Branch::e));
  const Complex A = alpha0 - abar_g;
  const Complex Bc = std::conj(alpha0 - abar_e);
  const Complex aec = std::conj(abar_e);
  // integrand: (abar_g + A e^{-zg s})(aec + Bc e^{-zec s})
  Complex out = abar_g * aec * t;
  out += abar_g * Bc * (1.0 - std::exp(-zec * t)) / zec;
  out += aec * A * (1.0 - std::exp(-zg * t)) / zg;
  out += A * Bc * (1.0 - std::exp(-(zg + zec) * t)) / (zg + zec);
  return out;
}

double channel_info(Complex beta, double phi, double gain) {
  if (std::abs(beta) < kAngleFloor) return 0.0;
  return gain * std::real(beta * std::polar(1.0, -phi));
}

double channel_backaction(Complex beta, double phi, double gain) {
  if (std::abs(beta) < kAngleFloor) return 0.0;
  return gain * std::imag(beta * std::polar(1.0, -phi));
}

double channel_baseline(Complex mu, double phi, double gain) {
  return gain * std::real(mu * std::polar(1.0, -phi));
}

RateSet rates_at(double t, const ModelParams& p, Complex alpha0) {
  RateSet r;
  r.alpha_g = alpha_transient(t, p, Branch::g, alpha0);
  r.alpha_e = alpha_transient(t, p, Branch::e, alpha0);
  const Complex beta = r.alpha_e - r.alpha_g;
  const Complex mu = r.alpha_e + r.alpha_g;
  r.beta_abs = std::abs(beta);
  r.theta_beta = r.beta_abs < kAngleFloor ? 0.0 : std::arg(beta);
  r.mu_abs = std::abs(mu);
  r.theta_mu = r.mu_abs < kAngleFloor ? 0.0 : std::arg(mu);
  const Complex ge = r.alpha_g * std::conj(r.alpha_e);
  r.B = 2.0 * p.chi * std::real(ge);
  r.gamma_d = 2.0 * p.chi * std::imag(ge);
  if (r.beta_abs < kAngleFloor) {
    r.gamma_ci = r.gamma_ba = r.gamma_m = 0.0;
  } else {
    const double info = channel_info(beta, p.phi_lo, std::sqrt(p.kappa));
    const double ba = channel_backaction(beta, p.phi_lo, std::sqrt(p.kappa));
    r.gamma_ci = info * info;
    r.gamma_ba = ba * ba;
    r.gamma_m = p.kappa * r.beta_abs * r.beta_abs;
  }
  r.purity_D = std::exp(-0.5 * (std::norm(r.alpha_e) + std::norm(r.alpha_g)) +
                        std::real(r.alpha_e * std::conj(r.alpha_g)));
  return r;
}

double purity_overlap(double t, const ModelParams& p, Complex alpha0) {
  const Complex ag = alpha_transient(t, p, Branch::g, alpha0);
  const Complex ae = alpha_transient(t, p, Branch::e, alpha0);
  return std::exp(-0.5 * (std::norm(ae) + std::norm(ag)) +
                  std::real(ae * std::conj(ag)));
}

double purity_integral(double t, const ModelParams& p, Complex alpha0) {
  if (t < 0.0) {
    throw std::invalid_argument("purity_integral: t must be >= 0");
  }
  if (t == 0.0) return 1.0;
  const auto integrand = [&](double s) {
    const Complex ag = alpha_transient(s, p, Branch::g, alpha0);
    const Complex ae = alpha_transient(s, p, Branch::e, alpha0);
    const double gamma_d = 2.0 * p.chi * std::imag(ag * std::conj(ae));
    const double gamma_m = p.kappa * std::norm(ae - ag);
    return gamma_d - 0.5 * gamma_m;
  };
  return std::exp(-adaptive_simpson(integrand, 0.0, t, 1e-10));
}

double info_coeff(double t, const ModelParams& p, Complex alpha0) {
  const Complex beta = alpha_transient(t, p, Branch::e, alpha0) -
                       alpha_transient(t, p, Branch::g, alpha0);
  return channel_info(beta, p.phi_lo, std::sqrt(p.kappa));
}

double backaction_coeff(double t, const ModelParams& p, Complex alpha0) {
  const Complex beta = alpha_transient(t, p, Branch::e, alpha0) -
                       alpha_transient(t, p, Branch::g, alpha0);
  return channel_backaction(beta, p.phi_lo, std::sqrt(p.kappa));
}

double mean_quadrature(double t_m, const ModelParams& p, Branch branch,
                       Complex alpha0, QuadratureMode mode, double phi) {
  if (!(t_m > 0.0)) {
    throw std::invalid_argument("mean_quadrature: t_m must be > 0");
  }
  const Complex ia = alpha_integral(t_m, p, branch, alpha0);
  switch (mode) {
    case QuadratureMode::single:
      return 2.0 * std::sqrt(p.kappa) *
             std::real(ia * std::polar(1.0, -phi)) / t_m;
    case QuadratureMode::I:
      return std::sqrt(2.0 * p.kappa) * std::real(ia) / t_m;
    case QuadratureMode::Q:
      return std::sqrt(2.0 * p.kappa) * std::imag(ia) / t_m;
  }
  throw std::logic_error("mean_quadrature: bad mode");
}

}  // namespace cqed
