#include "hamspec/grid.hpp"

#include <cmath>

namespace hamspec {

Grid1D make_grid(double half_length, int n_points) {
  if (!(half_length > 0.0)) {
    throw std::invalid_argument("make_grid: half_length must be positive");
  }
  if (n_points < 3) {
    throw std::invalid_argument("make_grid: n_points must be at least 3");
  }

  Grid1D g;
  g.half_length = half_length;
  g.n_points = n_points;
  g.spacing = 2.0 * half_length / static_cast<double>(n_points - 1);

  g.points.resize(n_points);
  const int last = n_points - 1;
  for (int i = 0; i <= last / 2; ++i) {
    // Fill symmetrically so x_i == -x_{N-1-i} holds exactly in floating point.
    const double x = -half_length + g.spacing * static_cast<double>(i);
    g.points[i] = x;
    g.points[last - i] = -x;
  }
  if (last % 2 == 0) g.points[last / 2] = 0.0;

  g.quad_weights = Vec::Constant(n_points, g.spacing);
  g.quad_weights[0] = 0.5 * g.spacing;
  g.quad_weights[last] = 0.5 * g.spacing;
  return g;
}

WeightedNorm make_weight(const Grid1D& grid, double s) {
  WeightedNorm w;
  w.exponent = s;
  w.weights.resize(grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) {
    const double x = grid.points[i];
    w.weights[i] = std::pow(1.0 + x * x, -0.5 * s);
  }
  return w;
}

}  // namespace hamspec
