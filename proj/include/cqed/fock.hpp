// Truncated-Fock-space linear algebra for the qubit-cavity joint system.
//
// Basis ordering is qubit-major throughout: index q*(nmax+1) + n with
// q = 0 (|g>) or 1 (|e>) and n the Fock number. sigma_z = |e><e| - |g><g|.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

namespace cqed {

using Complex = std::complex<double>;

// Cavity-factor ladder operators on Fock levels 0..nmax.
struct FockOps {
  int nmax;
  Eigen::MatrixXcd a;         // <m|a|m+1> = sqrt(m+1)
  Eigen::MatrixXcd a_dag;
  Eigen::MatrixXcd n;
  Eigen::MatrixXcd identity;
};

FockOps build_fock_operators(int nmax);

// Pure cavity state, Fock amplitudes c_0..c_nmax.
struct CavityVector {
  Eigen::VectorXcd coeffs;

  int nmax() const { return static_cast<int>(coeffs.size()) - 1; }
  double norm() const { return coeffs.norm(); }
};

// coherent_state reports how much of the Poisson weight fell past the
// truncation; the returned state is renormalized.
struct CoherentResult {
  CavityVector state;
  double norm_deficiency;  // 1 - sum_{n<=nmax} |c_n|^2 before renormalization
};

CoherentResult coherent_state(Complex alpha, int nmax);

// Joint pure state of dimension 2*(nmax+1), qubit-major ordering.
struct JointState {
  int nmax;
  Eigen::VectorXcd amp;

  int dim() const { return 2 * (nmax + 1); }
  double norm() const { return amp.norm(); }
  void normalize() { amp /= amp.norm(); }

  Eigen::VectorBlock<Eigen::VectorXcd> block_g() {
    return amp.segment(0, nmax + 1);
  }
  Eigen::VectorBlock<Eigen::VectorXcd> block_e() {
    return amp.segment(nmax + 1, nmax + 1);
  }
  Eigen::VectorBlock<const Eigen::VectorXcd> block_g() const {
    return amp.segment(0, nmax + 1);
  }
  Eigen::VectorBlock<const Eigen::VectorXcd> block_e() const {
    return amp.segment(nmax + 1, nmax + 1);
  }
};

JointState make_joint_state(Complex c_g, Complex c_e, const CavityVector& cav);

// Dense joint operator with an explicit hermiticity tag (checked on
// construction when the tag says hermitian).
struct JointOperator {
  Eigen::MatrixXcd m;
  bool hermitian = false;
};

JointOperator make_joint_operator(Eigen::MatrixXcd m, bool expect_hermitian);

// qubit identity (x) op  — block-diagonal [op, op]
Eigen::MatrixXcd lift_cavity(const Eigen::MatrixXcd& op);
// diag(g_val, e_val) on the qubit factor, identity on the cavity
Eigen::MatrixXcd lift_qubit_diag(Complex g_val, Complex e_val, int nmax);

Complex expectation(const JointOperator& op, const JointState& state);
Complex expectation(const Eigen::MatrixXcd& op, const JointState& state);

// Cavity density matrix (conditional or reduced states).
struct CavityDM {
  Eigen::MatrixXcd rho;

  int nmax() const { return static_cast<int>(rho.rows()) - 1; }
  double trace() const { return rho.trace().real(); }
};

CavityDM pure_cavity_dm(const CavityVector& v);

// Overlap <alpha|rho|alpha> evaluated in the truncated basis.
double coherent_expectation(const CavityDM& dm, Complex alpha);

}  // namespace cqed
