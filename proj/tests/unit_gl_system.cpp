// Block-system tests: the structured path must agree with the dense
// HamiltonSystem machinery operator-by-operator at small N, and with the
// dense matrix exponential as the end-to-end oracle.
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "hamspec/gl_system.hpp"
#include "hamspec/grid.hpp"
#include "hamspec/krein.hpp"
#include "hamspec/linop.hpp"
#include "hamspec/model_gl.hpp"

using namespace hamspec;

namespace {

const GLModel kModel{1.0, std::sqrt(2.0)};

struct Fixture {
  Grid1D grid;
  AdaptedPotential ap;
  SymOperator S;
  GlBlockSystem sys;
};

Fixture make_fixture(int n, double L) {
  Fixture f;
  f.grid = make_grid(L, n);
  const KinkProfile k = kink_profile(f.grid, kModel);
  f.ap = grid_adapted_potential(k);
  f.S = assemble_S(f.grid, f.ap.effective_mass, f.ap.values);
  f.sys = make_gl_block_system(f.S, f.ap.effective_mass);
  return f;
}

CVec random_state(int dim, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  auto u = [&] { return (static_cast<double>(eng() >> 11) + 1.0) * 0x1p-53 - 0.5; };
  CVec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = cplx(u(), u());
  return v;
}

}  // namespace

TEST_SUITE_BEGIN("gl_system");

TEST_CASE("skeleton: kernel mode, bound states, edge classification") {
  const Fixture f = make_fixture(801, 40.0);
  CHECK(f.sys.sd.kernel_dim == 1);
  CHECK(f.sys.v0.size() == 801);
  CHECK(std::abs(f.sys.v0.norm() - 1.0) < 1e-12);
  CHECK(f.sys.v0.sum() > 0.0);

  // Exactly one nonzero bound state (the internal mode at ω² = 1.5).
  const auto bound = gl_bound_states(f.sys);
  REQUIRE(bound.size() == 1);
  CHECK(bound[0].omega == doctest::Approx(std::sqrt(1.5)).epsilon(2e-3));
}

TEST_CASE("blockwise operators agree with the dense system at small N") {
  const Fixture f = make_fixture(61, 40.0);
  const HamiltonSystem dense = assemble_gl_system(f.S);
  const int dim = f.sys.dim;

  for (std::uint64_t seed : {3ull, 4ull}) {
    const CVec X = random_state(dim, seed);
    CHECK((gl_apply_A(f.sys, X) - dense.A.cast<cplx>() * X).norm() <
          1e-10 * X.norm());
    CHECK((gl_apply_B(f.sys, X) - dense.B.cast<cplx>() * X).norm() <
          1e-10 * X.norm());
    CHECK((gl_apply_J(X) - dense.J.cast<cplx>() * X).norm() < 1e-14 * X.norm());
    CHECK((gl_apply_Lambda(f.sys, X) - dense.Lambda.cast<cplx>() * X).norm() <
          1e-9 * X.norm());
    CHECK((gl_apply_LambdaPlusInv(f.sys, X) -
           dense.LambdaPlusInv.cast<cplx>() * X)
              .norm() < 1e-9 * X.norm());
  }
}

TEST_CASE("rotation propagator: equals dense e^{-iHt}, real, unitary, grouped") {
  const Fixture f = make_fixture(61, 40.0);
  const HamiltonSystem dense = assemble_gl_system(f.S);
  const CVec X = random_state(f.sys.dim, 11);
  const CVec Z = gl_apply_Lambda(f.sys, X);

  for (double t : {0.0, 0.7, 3.0, 12.0}) {
    const CVec a = gl_propagate_Z(f.sys, Z, t);
    const CVec b = propagate_Z(dense, Z, t);
    CHECK((a - b).norm() < 1e-9 * Z.norm());
    CHECK(std::abs(a.norm() - Z.norm()) < 1e-10 * Z.norm());
  }
  // Group law.
  const CVec g1 = gl_propagate_Z(f.sys, gl_propagate_Z(f.sys, Z, 1.1), 2.2);
  const CVec g2 = gl_propagate_Z(f.sys, Z, 3.3);
  CHECK((g1 - g2).norm() < 1e-10 * Z.norm());

  // Real data stays real: the propagator is a real rotation, not a complex
  // phase.
  CVec Zr = Z;
  Zr.imag().setZero();
  const CVec rot = gl_propagate_Z(f.sys, Zr, 1.9);
  CHECK(rot.imag().cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("exact solution map matches expm and the dense reconstruction") {
  const Fixture f = make_fixture(61, 40.0);
  const HamiltonSystem dense = assemble_gl_system(f.S);
  for (std::uint64_t seed : {21ull, 22ull}) {
    const CVec X0 = random_state(f.sys.dim, seed);
    for (double t : {0.0, 0.4, 2.0, 5.0}) {
      const CVec Xb = gl_reconstruct_X(f.sys, X0, t);
      const CVec Xd = reconstruct_X(dense, X0, t);
      const CVec Xe = expm_apply(dense.A, X0, t);
      CHECK((Xb - Xd).norm() < 1e-8 * X0.norm());
      CHECK((Xb - Xe).norm() < 1e-8 * X0.norm());
    }
  }
}

TEST_CASE("secular sector: X0 = Ψ₀ gives the straight-line trajectory") {
  const Fixture f = make_fixture(201, 40.0);
  const int N = 201;
  CVec X0 = CVec::Zero(2 * N);
  X0.tail(N) = (1.7 * f.sys.v0).cast<cplx>();  // π₀ along the kernel mode

  const auto [phi, psi] = gl_secular_components(f.sys, X0);
  CHECK((psi - X0).norm() < 1e-12);
  CHECK((phi.head(N) - (1.7 * f.sys.v0).cast<cplx>()).norm() < 1e-12);

  for (double t : {0.0, 2.5, 20.0}) {
    const CVec Xt = gl_reconstruct_X(f.sys, X0, t);
    CHECK((Xt - (psi + t * phi)).norm() < 1e-9);
  }
}

TEST_CASE("green lift: exact eigenmodes of A from exact eigenfunctions of S") {
  const Fixture f = make_fixture(401, 40.0);
  const int N = 401;
  // Use exact discrete eigenvectors of S above the edge as stand-ins for
  // continuum modes: S v = λ v with ω = √λ.
  for (int j : {5, 40, 200}) {
    const double lam = f.sys.sd.eigenvalues[j];
    REQUIRE(lam > 0.0);
    for (double s : {1.0, -1.0}) {
      const double omega = s * std::sqrt(lam);
      const CVec e = f.sys.sd.eigenvectors.col(j).cast<cplx>();
      const CVec a = gl_green_apply(f.sys, e, omega);
      const CVec r = gl_apply_A(f.sys, a) + I * omega * a;
      CHECK(r.norm() < 1e-8 * a.norm());
    }
  }
}

TEST_CASE("V-norm: Λ-weighted plus plain quadrature norm") {
  const Fixture f = make_fixture(201, 40.0);
  const int N = 201;
  CVec X = CVec::Zero(2 * N);
  X.tail(N).setConstant(1.0);  // π ≡ 1, ψ ≡ 0: Λ acts as identity
  const double plain = gl_state_norm(f.sys, X);
  CHECK(plain == doctest::Approx(std::sqrt(80.0)).epsilon(1e-10));
  CHECK(gl_v_norm(f.sys, X) == doctest::Approx(2.0 * plain).epsilon(1e-10));

  // Kernel direction: Λ kills it, so the V-norm reduces to the plain norm.
  CVec K = CVec::Zero(2 * N);
  K.head(N) = f.sys.v0.cast<cplx>();
  const double kn = gl_state_norm(f.sys, K);
  CHECK(gl_v_norm(f.sys, K) == doctest::Approx(kn).epsilon(1e-9));
}

TEST_CASE("full-size skeleton builds within budget and propagates") {
  const Fixture f = make_fixture(1601, 40.0);
  CHECK(f.sys.dim == 3202);
  CHECK(f.sys.sd.kernel_dim == 1);
  const CVec X0 = random_state(f.sys.dim, 5);
  const CVec X1 = gl_reconstruct_X(f.sys, X0, 1.0);
  const CVec Xb = gl_reconstruct_X(f.sys, X1, -1.0);
  CHECK((Xb - X0).norm() < 1e-9 * X0.norm());
}

TEST_SUITE_END();
