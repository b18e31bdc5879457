// Dense Hamilton-system tests. The load-bearing oracle is the dense matrix
// exponential: reconstruct_X must reproduce expm(At)·X0 to near machine
// precision for arbitrary admissible (J, B), including systems with kernels
// and secular 2×2 Jordan blocks.
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "hamspec/grid.hpp"
#include "hamspec/krein.hpp"
#include "hamspec/linop.hpp"
#include "hamspec/model_gl.hpp"

using namespace hamspec;

namespace {

const GLModel kModel{1.0, std::sqrt(2.0)};

SymOperator kink_S(int n, double L) {
  const Grid1D g = make_grid(L, n);
  const KinkProfile k = kink_profile(g, kModel);
  const AdaptedPotential ap = grid_adapted_potential(k);
  return assemble_S(g, ap.effective_mass, ap.values);
}

CVec random_cvec(int n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  auto u = [&] { return (static_cast<double>(eng() >> 11) + 1.0) * 0x1p-53 - 0.5; };
  CVec v(n);
  for (int i = 0; i < n; ++i) v[i] = cplx(u(), u());
  return v;
}

}  // namespace

TEST_SUITE_BEGIN("krein");

TEST_CASE("assemble_system rejects malformed structure pairs") {
  const Mat B = Mat::Identity(4, 4);
  Mat J = Mat::Zero(4, 4);
  J.topRightCorner(2, 2) = Mat::Identity(2, 2);
  J.bottomLeftCorner(2, 2) = -Mat::Identity(2, 2);

  CHECK_NOTHROW(assemble_system(J, B));
  CHECK_THROWS_AS(assemble_system(J, Mat::Identity(6, 6)), std::invalid_argument);
  CHECK_THROWS_AS(assemble_system(Mat::Identity(4, 4), B), std::invalid_argument);
  Mat Jbad = J;
  Jbad(0, 1) = 0.5;  // skew but J² != -I
  Jbad(1, 0) = -0.5;
  CHECK_THROWS_AS(assemble_system(Jbad, B), std::invalid_argument);
  Mat Bneg = B;
  Bneg(0, 0) = -1.0;
  CHECK_THROWS_AS(assemble_system(J, Bneg), std::domain_error);
}

TEST_CASE("canonical J with B = I: H = iJ, spectrum ±1, trivial projectors") {
  const int n = 6, half = 3;
  Mat J = Mat::Zero(n, n);
  J.topRightCorner(half, half) = Mat::Identity(half, half);
  J.bottomLeftCorner(half, half) = -Mat::Identity(half, half);
  const HamiltonSystem sys = assemble_system(J, Mat::Identity(n, n));

  CHECK((sys.Lambda - Mat::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((sys.H - I * J.cast<cplx>()).cwiseAbs().maxCoeff() < 1e-14);
  for (int j = 0; j < n; ++j) {
    CHECK(std::abs(std::abs(sys.h_eigenvalues[j]) - 1.0) < 1e-12);
  }
  CHECK(sys.Pi_K.cwiseAbs().maxCoeff() < 1e-14);
  CHECK(sys.Pi_0.cwiseAbs().maxCoeff() < 1e-14);
  CHECK((sys.Pi_R - Mat::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(sys.P.cwiseAbs().maxCoeff() < 1e-14);
  CHECK((sys.G - Mat::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);

  const ConditionReport rep = check_conditions(sys);
  CHECK(rep.ok());
  CHECK(rep.gap_delta == doctest::Approx(1.0));
  CHECK(rep.kernel_dim == 0);
  CHECK(rep.gap_epsilon_H == doctest::Approx(1.0));
}

TEST_CASE("random systems: construction invariants and condition checks") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 11ull, 12ull}) {
    for (int kd : {0, 1, 2, 3}) {
      const int n = 12;
      const HamiltonSystem sys = random_system(n, kd, 0.5, seed);

      // B spectrum: exactly kd zeros, rest in [gap, 10 gap].
      Eigen::SelfAdjointEigenSolver<Mat> es(sys.B);
      for (int j = 0; j < kd; ++j) CHECK(std::abs(es.eigenvalues()[j]) < 1e-10);
      for (int j = kd; j < n; ++j) {
        CHECK(es.eigenvalues()[j] > 0.5 * (1.0 - 1e-10));
        CHECK(es.eigenvalues()[j] < 5.0 * (1.0 + 1e-10));
      }

      const ConditionReport rep = check_conditions(sys);
      CHECK(rep.ok());
      CHECK(rep.kernel_dim == kd);
      CHECK(rep.gap_delta > 0.5 * (1.0 - 1e-10));
      CHECK(rep.gap_epsilon_H > 0.0);

      // Projector algebra.
      const int nn = sys.dim;
      auto idem = [&](const Mat& Q) {
        return (Q * Q - Q).cwiseAbs().maxCoeff() < 1e-10;
      };
      CHECK(idem(sys.Pi_K));
      CHECK(idem(sys.Pi_scriptR));
      CHECK(idem(sys.Pi_0));
      CHECK(idem(sys.Pi_R));
      CHECK((sys.Pi_K + sys.Pi_scriptR - Mat::Identity(nn, nn)).cwiseAbs().maxCoeff() <
            1e-12);
      CHECK((sys.Pi_0 * sys.Pi_R).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((sys.Pi_0 + sys.Pi_R - sys.Pi_scriptR).cwiseAbs().maxCoeff() < 1e-12);

      // Finite-rank form of P agrees with the product definition.
      CHECK((operator_P(sys) - sys.P).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(Eigen::FullPivLU<Mat>(sys.P).rank() <= kd);

      // Cached G equals the recomputed one.
      CHECK((green_operator(sys) - sys.G).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("determinism: identical seeds give identical systems") {
  const HamiltonSystem s1 = random_system(8, 2, 0.5, 7);
  const HamiltonSystem s2 = random_system(8, 2, 0.5, 7);
  const HamiltonSystem s3 = random_system(8, 2, 0.5, 8);
  CHECK((s1.J - s2.J).cwiseAbs().maxCoeff() == 0.0);
  CHECK((s1.B - s2.B).cwiseAbs().maxCoeff() == 0.0);
  CHECK((s1.B - s3.B).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("krein substitution and unitary Z-propagation") {
  const HamiltonSystem sys = random_system(10, 1, 0.4, 21);
  const CVec X = random_cvec(10, 99);
  const CVec Z = krein_substitute(sys, X);

  // Z lies in Ran Λ.
  CHECK((sys.Pi_scriptR.cast<cplx>() * Z - Z).cwiseAbs().maxCoeff() <
        1e-12 * X.norm());
  // Kernel vectors map to zero.
  const CVec k0 = sys.b_kernel_basis.col(0).cast<cplx>();
  CHECK(krein_substitute(sys, k0).norm() < 1e-12);

  // Propagation is norm preserving and satisfies the group law.
  const CVec Z1 = propagate_Z(sys, Z, 1.7);
  CHECK(std::abs(Z1.norm() - Z.norm()) < 1e-10 * Z.norm());
  const CVec Za = propagate_Z(sys, propagate_Z(sys, Z, 0.9), 0.8);
  CHECK((Za - Z1).cwiseAbs().maxCoeff() < 1e-9 * Z.norm());
  CHECK((propagate_Z(sys, Z, 0.0) - Z).cwiseAbs().maxCoeff() < 1e-12);

  // Eigenvector evolution is a pure phase.
  const CVec h = sys.h_eigenvectors.col(sys.dim - 1);
  const double w = sys.h_eigenvalues[sys.dim - 1];
  const CVec ht = propagate_Z(sys, h, 2.3);
  CHECK((ht - std::exp(-I * w * 2.3) * h).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("reconstruct_X matches the dense matrix exponential") {
  for (std::uint64_t seed : {5ull, 6ull, 7ull}) {
    for (int kd : {0, 1, 2}) {
      const HamiltonSystem sys = random_system(14, kd, 0.5, seed);
      for (std::uint64_t vs : {31ull, 32ull}) {
        const CVec X0 = random_cvec(14, vs ^ seed);
        for (double t : {0.0, 0.3, 2.0, 10.0, 20.0}) {
          const CVec Xt = reconstruct_X(sys, X0, t);
          const CVec Xe = expm_apply(sys.A, X0, t);
          CHECK((Xt - Xe).norm() / X0.norm() < 1e-8);
          // Krein equivalence: Λ·X(t) equals the propagated Z.
          const CVec lhs = sys.Lambda.cast<cplx>() * Xt;
          const CVec rhs = propagate_Z(sys, krein_substitute(sys, X0), t);
          CHECK((lhs - rhs).norm() < 1e-9 * X0.norm());
        }
      }
    }
  }
}

TEST_CASE("frozen kernel states: X(t) = X0 when X0 ∈ Ker B and P Π₀ Λ X0 = 0") {
  const HamiltonSystem sys = random_system(12, 2, 0.5, 77);
  const CVec X0 = sys.b_kernel_basis.col(1).cast<cplx>();
  // Λ X0 = 0, so the secular and oscillatory terms vanish identically.
  for (double t : {0.5, 3.0, 20.0}) {
    CHECK((reconstruct_X(sys, X0, t) - X0).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("green operator lifts eigenvectors of H to eigenmodes of A") {
  const HamiltonSystem sys = random_system(12, 1, 0.4, 55);
  int tested = 0;
  for (int j = 0; j < sys.dim; ++j) {
    const double w = sys.h_eigenvalues[j];
    if (std::abs(w) < sys.kernel_tol_abs_H) continue;
    const CVec h = sys.h_eigenvectors.col(j);
    const CVec a = sys.G.cast<cplx>() * h;
    CHECK((sys.A.cast<cplx>() * a + I * w * a).norm() < 1e-8 * a.norm());
    ++tested;
  }
  CHECK(tested >= sys.dim - 4);
}

TEST_CASE("jordan structure of random systems: pair identities, no 3-chains") {
  for (std::uint64_t seed : {101ull, 102ull, 103ull, 104ull}) {
    for (int kd : {0, 1, 2, 3}) {
      const HamiltonSystem sys = random_system(12, kd, 0.5, seed);
      const JordanData jd = jordan_structure(sys);

      // The secular count equals dim(Ker H ∩ Ran Λ) by construction; verify
      // independently against the nilpotent structure of A: each 2×2 block
      // drops the rank of A² by one relative to A.
      Eigen::FullPivLU<Mat> luA(sys.A);
      Eigen::FullPivLU<Mat> luA2(Mat(sys.A * sys.A));
      luA.setThreshold(1e-7);
      luA2.setThreshold(1e-7);
      CHECK(jd.block_count == luA.rank() - luA2.rank());
      CHECK(jd.dim_ker_HR == jd.block_count);
      CHECK(static_cast<int>(jd.secular_pairs.size()) == jd.block_count);
      CHECK(jd.kernel_A_basis.cols() == kd);

      const double anorm = std::max(1.0, sys.A.cwiseAbs().maxCoeff());
      for (const auto& [phi, psi] : jd.secular_pairs) {
        CHECK((sys.A * psi - phi).norm() < 1e-9 * anorm);
        CHECK((sys.A * phi).norm() < 1e-9 * anorm);
        CHECK((sys.A * (sys.A * psi)).norm() < 1e-9 * anorm);
      }
      if (jd.block_count > 0) {
        CHECK(jd.chain3_excluded);
        CHECK(jd.chain3_residual > 1e-6);
      }
      // Diagonalizable case: A has as many independent eigenvectors as dims.
      if (jd.block_count == 0 && kd == 0) {
        Eigen::ComplexEigenSolver<CMat> es(sys.A.cast<cplx>());
        Eigen::FullPivLU<CMat> luV(es.eigenvectors());
        luV.setThreshold(1e-10);
        CHECK(luV.rank() == sys.dim);
      }
    }
  }
}

TEST_CASE("dense field system from kink operator: block forms throughout") {
  const SymOperator S = kink_S(101, 40.0);
  const int N = 101, n = 2 * N;
  const HamiltonSystem sys = assemble_gl_system(S);
  const SpectralData sd = spectral_decompose(S);
  const Projectors pr = projectors(sd);

  CHECK(sys.dim == n);
  // Λ = blockdiag(√S, I).
  CHECK((sys.Lambda.bottomRightCorner(N, N) - Mat::Identity(N, N))
            .cwiseAbs()
            .maxCoeff() < 1e-10);
  CHECK(sys.Lambda.topRightCorner(N, N).cwiseAbs().maxCoeff() < 1e-10);

  // Projector block forms.
  auto block_equal = [&](const Mat& Q, const Mat& tl, const Mat& br) {
    return (Q.topLeftCorner(N, N) - tl).cwiseAbs().maxCoeff() < 1e-9 &&
           (Q.bottomRightCorner(N, N) - br).cwiseAbs().maxCoeff() < 1e-9 &&
           Q.topRightCorner(N, N).cwiseAbs().maxCoeff() < 1e-9;
  };
  const Mat Z = Mat::Zero(N, N);
  const Mat Id = Mat::Identity(N, N);
  CHECK(block_equal(sys.Pi_K, pr.P0, Z));
  CHECK(block_equal(sys.Pi_scriptR, pr.Pplus, Id));
  CHECK(block_equal(sys.Pi_0, Z, pr.P0));
  CHECK(block_equal(sys.Pi_R, pr.Pplus, pr.Pplus));
  CHECK(std::lround(sys.Pi_K.trace()) == 1);
  CHECK(std::lround(sys.Pi_0.trace()) == 1);

  // P(z₁, z₂) = (P₀ z₂, 0).
  CHECK((sys.P.topRightCorner(N, N) - pr.P0).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(sys.P.topLeftCorner(N, N).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(sys.P.bottomRows(N).cwiseAbs().maxCoeff() < 1e-9);

  // For this block structure the correction term in G vanishes identically,
  // leaving G = blockdiag(pinv(√S)·P₊, I), which is real.
  const SymOperator lami = pinv_sqrt(sd);
  CHECK((sys.G.topLeftCorner(N, N) - lami.matrix * pr.Pplus).cwiseAbs().maxCoeff() <
        1e-9);
  CHECK((sys.G.bottomRightCorner(N, N) - Id).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(sys.G.topRightCorner(N, N).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(sys.G.bottomLeftCorner(N, N).cwiseAbs().maxCoeff() < 1e-9);

  // Secular pair: Φ ∝ (s₀', 0), Ψ ∝ (0, s₀').
  const JordanData jd = jordan_structure(sys);
  CHECK(jd.block_count == 1);
  const Vec v0 = sd.eigenvectors.col(0);
  const auto& [phi, psi] = jd.secular_pairs[0];
  CHECK(std::abs(std::abs(phi.head(N).normalized().dot(v0)) - 1.0) < 1e-9);
  CHECK(phi.tail(N).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(std::abs(std::abs(psi.tail(N).normalized().dot(v0)) - 1.0) < 1e-9);
  CHECK(psi.head(N).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("secular trajectory: X0 = Ψ₀ evolves as tΦ₀ + Ψ₀ exactly") {
  const SymOperator S = kink_S(101, 40.0);
  const HamiltonSystem sys = assemble_gl_system(S);
  const JordanData jd = jordan_structure(sys);
  REQUIRE(jd.block_count == 1);
  const auto& [phi, psi] = jd.secular_pairs[0];

  for (double t : {0.0, 1.0, 7.5, 20.0}) {
    const CVec Xt = reconstruct_X(sys, psi.cast<cplx>(), t);
    const CVec expect = (psi + t * phi).cast<cplx>();
    CHECK((Xt - expect).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("weighted norms of the lift stay bounded on the field system") {
  const SymOperator S = kink_S(101, 20.0);
  const int N = 101;
  const HamiltonSystem sys = assemble_gl_system(S);
  // diag(<x>^ρ) G diag(<x>^{-ρ}) must have finite (and moderate) norm for
  // ρ ∈ {-2,...,2}: G is local enough that polynomial weights do not blow up.
  Vec wx(2 * N);
  for (int i = 0; i < N; ++i) {
    const double x = S.grid.points[i];
    wx[i] = wx[N + i] = std::sqrt(1.0 + x * x);
  }
  for (double rho : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
    const Vec wplus = wx.array().pow(rho);
    const Vec wminus = wx.array().pow(-rho);
    const Mat Gw = wplus.asDiagonal() * sys.G * wminus.asDiagonal();
    const double norm = Gw.jacobiSvd().singularValues()[0];
    CHECK(std::isfinite(norm));
    CHECK(norm < 1e4);
  }
}

TEST_SUITE_END();
