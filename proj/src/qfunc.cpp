#include "cqed/qfunc.hpp"

#include <cmath>

#include "cqed/cavity_field.hpp"

namespace cqed {

PhaseGrid default_grid(const ModelParams& p, Complex alpha0) {
  double scale = std::max(std::abs(alpha_steady(p, Branch::g)),
                          std::abs(alpha_steady(p, Branch::e)));
  scale = std::max(scale, std::abs(alpha0));
  if (scale <= 0.0) scale = 1.0;
  PhaseGrid g;
  g.re_min = -2.5 * scale;
  g.re_max = 2.5 * scale;
  g.im_min = -2.5 * scale;
  g.im_max = 2.5 * scale;
  return g;
}

QField qfunction(const CavityDM& dm, const PhaseGrid& grid, RunMode mode) {
  grid.validate();
  const int nmax = dm.nmax();
  QField out;
  out.grid = grid;
  out.values.resize(grid.n_im, grid.n_re);

  // coherent states with |alpha|^2 + 5|alpha| beyond nmax lose Poisson
  // weight to truncation; flag the grid corners if they reach that far
  const double corner =
      std::hypot(std::max(std::abs(grid.re_min), std::abs(grid.re_max)),
                 std::max(std::abs(grid.im_min), std::abs(grid.im_max)));
  out.truncation_warning =
      corner * corner + 5.0 * corner > static_cast<double>(nmax);

  for_each_index(static_cast<std::size_t>(grid.n_im), mode,
                 [&](std::size_t j) {
                   Eigen::VectorXcd c(nmax + 1), v(nmax + 1);
                   for (int i = 0; i < grid.n_re; ++i) {
                     const Complex alpha(grid.re_at(i),
                                         grid.im_at(static_cast<int>(j)));
                     c(0) = std::exp(-0.5 * std::norm(alpha));
                     for (int n = 1; n <= nmax; ++n) {
                       c(n) = c(n - 1) * alpha /
                              std::sqrt(static_cast<double>(n));
                     }
                     v.noalias() = dm.rho * c;
                     out.values(static_cast<int>(j), i) =
                         std::real(c.dot(v)) / M_PI;
                   }
                 });
  return out;
}

double coherent_fidelity(const CavityDM& dm, Complex alpha) {
  return coherent_expectation(dm, alpha);
}

Complex q_center_of_mass(const QField& field) {
  double w = 0.0, re = 0.0, im = 0.0;
  for (int j = 0; j < field.grid.n_im; ++j) {
    for (int i = 0; i < field.grid.n_re; ++i) {
      const double q = field.values(j, i);
      w += q;
      re += q * field.grid.re_at(i);
      im += q * field.grid.im_at(j);
    }
  }
  if (w <= 0.0) {
    throw std::runtime_error("q_center_of_mass: field has no weight");
  }
  return Complex(re / w, im / w);
}

double q_total_weight(const QField& field) {
  return field.values.sum() * field.grid.cell_area();
}

}  // namespace cqed
