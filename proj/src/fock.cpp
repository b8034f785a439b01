#include "cqed/fock.hpp"

#include <cmath>

namespace cqed {

FockOps build_fock_operators(int nmax) {
  if (nmax < 1) {
    throw std::invalid_argument("build_fock_operators: nmax must be >= 1");
  }
  const int d = nmax + 1;
  FockOps ops;
  ops.nmax = nmax;
  ops.a = Eigen::MatrixXcd::Zero(d, d);
  ops.n = Eigen::MatrixXcd::Zero(d, d);
  for (int m = 0; m < nmax; ++m) {
    ops.a(m, m + 1) = std::sqrt(static_cast<double>(m + 1));
  }
  for (int m = 0; m < d; ++m) {
    ops.n(m, m) = static_cast<double>(m);
  }
  ops.a_dag = ops.a.adjoint();
  ops.identity = Eigen::MatrixXcd::Identity(d, d);
  return ops;
}

CoherentResult coherent_state(Complex alpha, int nmax) {
  if (nmax < 0) {
    throw std::invalid_argument("coherent_state: nmax must be >= 0");
  }
  const int d = nmax + 1;
  Eigen::VectorXcd c(d);
  // c_n = e^{-|a|^2/2} a^n / sqrt(n!), built recursively
  c(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < d; ++n) {
    c(n) = c(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  }
  const double sq = c.squaredNorm();
  CoherentResult out;
  out.norm_deficiency = 1.0 - sq;
  c /= std::sqrt(sq);
  out.state = CavityVector{std::move(c)};
  return out;
}

JointState make_joint_state(Complex c_g, Complex c_e, const CavityVector& cav) {
  const int nmax = cav.nmax();
  JointState s;
  s.nmax = nmax;
  s.amp = Eigen::VectorXcd::Zero(2 * (nmax + 1));
  s.block_g() = c_g * cav.coeffs;
  s.block_e() = c_e * cav.coeffs;
  s.normalize();
  return s;
}

JointOperator make_joint_operator(Eigen::MatrixXcd m, bool expect_hermitian) {
  if (expect_hermitian) {
    const double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (dev > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
      throw std::invalid_argument(
          "make_joint_operator: matrix tagged hermitian is not");
    }
  }
  return JointOperator{std::move(m), expect_hermitian};
}

Eigen::MatrixXcd lift_cavity(const Eigen::MatrixXcd& op) {
  const int d = static_cast<int>(op.rows());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(2 * d, 2 * d);
  out.topLeftCorner(d, d) = op;
  out.bottomRightCorner(d, d) = op;
  return out;
}

Eigen::MatrixXcd lift_qubit_diag(Complex g_val, Complex e_val, int nmax) {
  const int d = nmax + 1;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(2 * d, 2 * d);
  out.topLeftCorner(d, d) = g_val * Eigen::MatrixXcd::Identity(d, d);
  out.bottomRightCorner(d, d) = e_val * Eigen::MatrixXcd::Identity(d, d);
  return out;
}

Complex expectation(const Eigen::MatrixXcd& op, const JointState& state) {
  if (op.rows() != state.dim() || op.cols() != state.dim()) {
    throw std::invalid_argument("expectation: dimension mismatch");
  }
  return state.amp.dot(op * state.amp);  // Eigen dot conjugates the lhs
}

Complex expectation(const JointOperator& op, const JointState& state) {
  return expectation(op.m, state);
}

CavityDM pure_cavity_dm(const CavityVector& v) {
  Eigen::VectorXcd c = v.coeffs / v.coeffs.norm();
  return CavityDM{c * c.adjoint()};
}

double coherent_expectation(const CavityDM& dm, Complex alpha) {
  const auto cs = coherent_state(alpha, dm.nmax());
  const Eigen::VectorXcd& c = cs.state.coeffs;
  return std::real(c.dot(dm.rho * c));
}

}  // namespace cqed
