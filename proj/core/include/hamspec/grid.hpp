#pragma once

#include <stdexcept>

#include "hamspec/types.hpp"

namespace hamspec {

/// Uniform mesh on [-L, L] with N points, x_i = -L + i*h, h = 2L/(N-1).
///
/// The boundary treatment is Dirichlet: difference operators assume ghost
/// values of zero one step beyond each endpoint. `quad_weights` are the
/// trapezoid weights {h/2, h, ..., h, h/2} used by every integral in the
/// library.
struct Grid1D {
  double half_length = 0.0;  ///< L > 0; the domain is [-L, L]
  int n_points = 0;          ///< N >= 3
  double spacing = 0.0;      ///< h = 2L/(N-1)
  Vec points;                ///< x_i, strictly increasing, symmetric about 0
  Vec quad_weights;          ///< trapezoid quadrature weights

  enum class Boundary { dirichlet };
  Boundary boundary = Boundary::dirichlet;
};

/// Builds a Grid1D; throws std::invalid_argument unless L > 0 and N >= 3.
Grid1D make_grid(double half_length, int n_points);

/// Polynomial decay weight <x>^{-s}, <x> = (1+x^2)^{1/2}, sampled on a grid.
/// All weights are positive and the weight at x=0 equals 1.
struct WeightedNorm {
  double exponent = 0.0;  ///< s
  Vec weights;            ///< <x_i>^{-s}
};

WeightedNorm make_weight(const Grid1D& grid, double s);

/// Trapezoidal discretization of the L^2 inner product; second argument is
/// conjugated, so inner_product(u, v) == conj(inner_product(v, u)).
/// Throws std::invalid_argument on length mismatch.
template <class DU, class DV>
cplx inner_product(const Eigen::MatrixBase<DU>& u, const Eigen::MatrixBase<DV>& v,
                   const Grid1D& grid) {
  if (u.size() != v.size() || u.size() != grid.n_points) {
    throw std::invalid_argument("inner_product: length mismatch with grid");
  }
  cplx acc = 0.0;
  for (int i = 0; i < grid.n_points; ++i) {
    acc += grid.quad_weights[i] * cplx(u[i]) * std::conj(cplx(v[i]));
  }
  return acc;
}

/// Quadrature L^2 norm (inner_product of u with itself, square-rooted).
template <class DU>
double quad_norm(const Eigen::MatrixBase<DU>& u, const Grid1D& grid) {
  double acc = 0.0;
  for (int i = 0; i < grid.n_points; ++i) {
    acc += grid.quad_weights[i] * std::norm(cplx(u[i]));
  }
  return std::sqrt(acc);
}

/// Norm of the weighted space L^2_{-s}: quadrature of <x>^{-2s} |u|^2, rooted.
/// s = 0 reduces to the plain L^2 norm; the value is non-increasing in s.
template <class DU>
double weighted_norm(const Eigen::MatrixBase<DU>& u, double s, const Grid1D& grid) {
  if (u.size() != grid.n_points) {
    throw std::invalid_argument("weighted_norm: length mismatch with grid");
  }
  double acc = 0.0;
  for (int i = 0; i < grid.n_points; ++i) {
    const double x = grid.points[i];
    const double w = std::pow(1.0 + x * x, -s);  // <x>^{-2s}
    acc += grid.quad_weights[i] * w * std::norm(cplx(u[i]));
  }
  return std::sqrt(acc);
}

}  // namespace hamspec
