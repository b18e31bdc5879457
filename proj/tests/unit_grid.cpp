// Mesh, quadrature, and weighted-norm tests. Expected values are closed-form:
// trapezoid sums of constants, Dirichlet sine orthogonality, the arctan
// integral for the <x>^{-1} weight, and the analytic eigenvalues
// (2/h²)(1 - cos(jπ/(N+1))) of the Dirichlet second-difference matrix.
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hamspec/grid.hpp"
#include "hamspec/linop.hpp"

using namespace hamspec;

TEST_SUITE_BEGIN("grid");

TEST_CASE("make_grid produces the documented meshes") {
  const Grid1D g = make_grid(1.0, 3);
  CHECK(g.spacing == 1.0);
  CHECK(g.points[0] == -1.0);
  CHECK(g.points[1] == 0.0);
  CHECK(g.points[2] == 1.0);

  const Grid1D g2 = make_grid(40.0, 801);
  CHECK(g2.spacing == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(g2.points[400] == 0.0);

  CHECK_THROWS_AS(make_grid(0.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(-1.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1.0, 2), std::invalid_argument);
}

TEST_CASE("grid invariants: symmetry and exact span") {
  const Grid1D g = make_grid(7.5, 38);
  for (int i = 0; i < g.n_points; ++i) {
    CHECK(g.points[i] == -g.points[g.n_points - 1 - i]);
    if (i > 0) CHECK(g.points[i] > g.points[i - 1]);
  }
  CHECK(g.spacing * (g.n_points - 1) == doctest::Approx(2.0 * g.half_length).epsilon(1e-15));
}

TEST_CASE("inner product: constants, conjugate symmetry, sine orthogonality") {
  const Grid1D g = make_grid(1.0, 3);
  const Vec ones = Vec::Ones(3);
  CHECK(inner_product(ones, ones, g).real() == doctest::Approx(2.0).epsilon(1e-15));

  // Conjugate symmetry on random complex data.
  const Grid1D gr = make_grid(5.0, 64);
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  CVec u(64), v(64);
  for (int i = 0; i < 64; ++i) {
    u[i] = cplx(uni(rng), uni(rng));
    v[i] = cplx(uni(rng), uni(rng));
  }
  const cplx a = inner_product(u, v, gr);
  const cplx b = inner_product(v, u, gr);
  CHECK(std::abs(a - std::conj(b)) < 1e-13);

  // Dirichlet sine modes sin(k x) with k = jπ/(2L) are exactly orthogonal
  // under the trapezoid rule (endpoint values vanish).
  const Grid1D gs = make_grid(200.0, 2001);
  const double L = gs.half_length;
  auto sine = [&](int j) {
    Vec s(gs.n_points);
    for (int i = 0; i < gs.n_points; ++i) {
      s[i] = std::sin(j * std::numbers::pi * (gs.points[i] + L) / (2.0 * L));
    }
    return s;
  };
  const Vec s3 = sine(3), s7 = sine(7);
  CHECK(std::abs(inner_product(s3, s7, gs)) < 1e-8);

  CHECK_THROWS_AS(inner_product(Vec::Ones(5), Vec::Ones(6), gr), std::invalid_argument);
}

TEST_CASE("weighted norm: s=0 identity, arctan limit, monotonicity in s") {
  const Grid1D g = make_grid(200.0, 4001);
  Vec u(g.n_points);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int i = 0; i < g.n_points; ++i) u[i] = uni(rng);

  CHECK(weighted_norm(u, 0.0, g) == doctest::Approx(quad_norm(u, g)).epsilon(1e-13));

  // For u ≡ 1, s = 1: ∫ (1+x²)^{-1} dx over [-L, L] = 2 atan(L) → π.
  const Vec ones = Vec::Ones(g.n_points);
  const double nrm = weighted_norm(ones, 1.0, g);
  CHECK(nrm == doctest::Approx(std::sqrt(2.0 * std::atan(g.half_length))).epsilon(1e-6));
  CHECK(std::abs(nrm - std::sqrt(std::numbers::pi)) < 5e-3);  // tail + quadrature

  // Refinement brings the quadrature to the analytic value.
  const Grid1D g2 = make_grid(200.0, 8001);
  const double nrm2 = weighted_norm(Vec::Ones(g2.n_points), 1.0, g2);
  CHECK(std::abs(nrm2 * nrm2 - 2.0 * std::atan(200.0)) <
        std::abs(nrm * nrm - 2.0 * std::atan(200.0)) + 1e-12);

  CHECK(weighted_norm(u, 0.5, g) >= weighted_norm(u, 1.5, g));
  CHECK(weighted_norm(u, -1.0, g) >= weighted_norm(u, 0.0, g));
}

TEST_CASE("weight vector: positive, centered at 1") {
  const Grid1D g = make_grid(10.0, 101);
  const WeightedNorm w = make_weight(g, 2.0);
  CHECK(w.weights.minCoeff() > 0.0);
  CHECK(w.weights[50] == 1.0);  // x=0
  CHECK(w.weights[0] == doctest::Approx(std::pow(1.0 + 100.0, -1.0)).epsilon(1e-14));
}

TEST_CASE("second difference: stencil, exact symmetry, analytic eigenvalues") {
  const Grid1D g3 = make_grid(1.0, 3);
  const SymOperator d2 = second_derivative(g3);
  CHECK(d2.matrix(0, 0) == 2.0);
  CHECK(d2.matrix(0, 1) == -1.0);
  CHECK(d2.matrix(0, 2) == 0.0);
  CHECK(d2.matrix(1, 1) == 2.0);
  CHECK((d2.matrix - d2.matrix.transpose()).cwiseAbs().maxCoeff() == 0.0);

  // Analytic Toeplitz eigenvalues of the Dirichlet matrix.
  const Grid1D g = make_grid(3.0, 120);
  const SpectralData sd = spectral_decompose(second_derivative(g), 1e-12);
  const int n = g.n_points;
  const double h2 = g.spacing * g.spacing;
  for (int j = 1; j <= n; ++j) {
    const double lam = 2.0 / h2 * (1.0 - std::cos(j * std::numbers::pi / (n + 1)));
    CHECK(std::abs(sd.eigenvalues[j - 1] - lam) < 1e-10 * (2.0 / h2));
  }
}

TEST_CASE("second difference: O(h²) consistency on a rapidly decaying function") {
  // f(x) = exp(-x²) on |x| ≤ 8: wall values ~1e-28, so the Dirichlet ghost
  // truncation is invisible and only the interior h²/12·f'''' error remains.
  auto residual = [](int n) {
    const Grid1D g = make_grid(8.0, n);
    Vec f(g.n_points), target(g.n_points);
    for (int i = 0; i < g.n_points; ++i) {
      const double x = g.points[i];
      f[i] = std::exp(-x * x);
      target[i] = (2.0 - 4.0 * x * x) * std::exp(-x * x);  // -f''
    }
    const Vec r = apply_sym(second_derivative(g), f) - target;
    return r.cwiseAbs().maxCoeff();
  };
  const double r1 = residual(201);
  const double r2 = residual(401);
  const double order = std::log2(r1 / r2);
  CHECK(order > 1.9);
  CHECK(order < 2.1);
}

TEST_SUITE_END();
