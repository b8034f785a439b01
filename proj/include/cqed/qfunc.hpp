// Husimi Q-function diagnostics for conditional cavity states.

#pragma once

#include "cqed/ensemble.hpp"
#include "cqed/fock.hpp"
#include "cqed/model.hpp"

namespace cqed {

struct PhaseGrid {
  double re_min = -2.5, re_max = 2.5;
  double im_min = -2.5, im_max = 2.5;
  int n_re = 121, n_im = 121;

  void validate() const {
    if (n_re < 2 || n_im < 2) {
      throw std::invalid_argument("PhaseGrid: need at least 2 points per axis");
    }
    if (!(re_max > re_min) || !(im_max > im_min)) {
      throw std::invalid_argument("PhaseGrid: max must exceed min");
    }
  }
  double re_at(int i) const {
    return re_min + (re_max - re_min) * i / (n_re - 1);
  }
  double im_at(int j) const {
    return im_min + (im_max - im_min) * j / (n_im - 1);
  }
  double cell_area() const {
    return (re_max - re_min) / (n_re - 1) * (im_max - im_min) / (n_im - 1);
  }
};

// Grid spanning +-2.5 x the steady field scale, 121x121.
PhaseGrid default_grid(const ModelParams& p, Complex alpha0 = 0.0);

struct QField {
  Eigen::MatrixXd values;  // (n_im rows) x (n_re cols), Q(re_i + i im_j)
  PhaseGrid grid;
  bool truncation_warning = false;  // grid reaches beyond reliable |alpha|
};

// Q(alpha) = <alpha|rho|alpha>/pi; row evaluation parallel under RunMode.
QField qfunction(const CavityDM& dm, const PhaseGrid& grid,
                 RunMode mode = RunMode::parallel);

// <alpha|rho|alpha> in [0, 1].
double coherent_fidelity(const CavityDM& dm, Complex alpha);

// First moment of a (non-negative) Q field over the grid.
Complex q_center_of_mass(const QField& field);

double q_total_weight(const QField& field);  // sum Q dA, ~1 on a wide grid

}  // namespace cqed
