// Symmetric-operator machinery tests. Oracles: Pöschl–Teller bound states of
// the kink operator (0 and 3m²/4 below the edge m²), analytic Dirichlet-box
// eigenvalues for the free operator, and spectral-calculus identities that
// hold exactly for any valid eigendecomposition.
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hamspec/grid.hpp"
#include "hamspec/linop.hpp"
#include "hamspec/model_gl.hpp"

using namespace hamspec;

namespace {

const GLModel kModel{1.0, std::sqrt(2.0)};

/// Kink operator with the stencil-adapted potential on the acceptance grid.
SymOperator kink_S(int n = 1601, double L = 40.0) {
  const Grid1D g = make_grid(L, n);
  const KinkProfile k = kink_profile(g, kModel);
  const AdaptedPotential ap = grid_adapted_potential(k);
  return assemble_S(g, ap.effective_mass, ap.values);
}

}  // namespace

TEST_SUITE_BEGIN("linop");

TEST_CASE("assemble_S: free operator floor, diagonal shift, mismatch error") {
  const Grid1D g = make_grid(40.0, 401);
  const SymOperator s_free = assemble_S(g, 1.0, Vec::Zero(g.n_points));
  const SpectralData sd = spectral_decompose(s_free, 1e-10);
  // Lowest eigenvalue ≈ m² + Dirichlet gap (π/(2L+2h))².
  CHECK(sd.eigenvalues[0] >= 1.0);
  CHECK(sd.eigenvalues[0] < 1.01);

  // Adding 0.7 to the ≈400 stencil diagonal rounds in the last bits.
  const SymOperator shifted = assemble_S(g, 1.0, Vec::Constant(g.n_points, 0.7));
  CHECK((shifted.matrix - s_free.matrix - 0.7 * Mat::Identity(g.n_points, g.n_points))
            .cwiseAbs()
            .maxCoeff() < 1e-12);

  CHECK_THROWS_AS(assemble_S(g, 1.0, Vec::Zero(17)), std::invalid_argument);
}

TEST_CASE("kink spectrum: zero mode, internal mode 3m²/4, continuum edge m²") {
  const SymOperator S = kink_S();
  const SpectralData sd = spectral_decompose(S, 1e-8);

  CHECK(sd.kernel_dim == 1);
  CHECK(std::abs(sd.eigenvalues[0]) < 1e-5);   // adapted potential: ~1e-13
  CHECK(std::abs(sd.eigenvalues[1] - 1.5) < 1e-3);
  CHECK(sd.eigenvalues[2] > 2.0);              // next one is a box continuum state
  CHECK(sd.eigenvalues[2] < 2.01);
  CHECK(sd.gap == doctest::Approx(sd.eigenvalues[1]).epsilon(1e-14));

  // Exactly two eigenvalues strictly below the continuum edge.
  int below = 0;
  for (int j = 0; j < sd.eigenvalues.size(); ++j) {
    if (sd.eigenvalues[j] < 2.0 * (1.0 - 1e-3)) ++below;
  }
  CHECK(below == 2);

  // Zero-mode alignment with s₀'.
  const Grid1D g = make_grid(40.0, 1601);
  const KinkProfile k = kink_profile(g, kModel);
  const Vec z = k.derivative / k.derivative.norm();
  CHECK(std::abs(sd.eigenvectors.col(0).dot(z)) > 1.0 - 1e-6);
}

TEST_CASE("spectral data invariants: residuals, orthonormality, identity case") {
  const SymOperator S = kink_S(801, 40.0);
  const SpectralData sd = spectral_decompose(S, 1e-8);
  const int n = S.grid.n_points;

  const double snorm = sd.eigenvalues.cwiseAbs().maxCoeff();
  const Mat resid = S.matrix * sd.eigenvectors -
                    sd.eigenvectors * sd.eigenvalues.asDiagonal();
  CHECK(resid.cwiseAbs().maxCoeff() < 1e-10 * snorm);

  const Mat gram = sd.eigenvectors.transpose() * sd.eigenvectors;
  CHECK((gram - Mat::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);

  SymOperator eye;
  eye.grid = make_grid(1.0, 5);
  eye.matrix = Mat::Identity(5, 5);
  eye.tridiagonal = true;
  const SpectralData sid = spectral_decompose(eye, 1e-8);
  CHECK(sid.kernel_dim == 0);
  CHECK(sid.gap == 1.0);
  for (int j = 0; j < 5; ++j) CHECK(sid.eigenvalues[j] == doctest::Approx(1.0));
}

TEST_CASE("psd_sqrt: scalar case, reconstruction, clamping, hard failure") {
  SymOperator four;
  four.grid = make_grid(1.0, 4);
  four.matrix = 4.0 * Mat::Identity(4, 4);
  const SpectralData sd4 = spectral_decompose(four, 1e-8);
  const SymOperator lam4 = psd_sqrt(sd4);
  CHECK((lam4.matrix - 2.0 * Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);

  const SymOperator S = kink_S(401, 20.0);
  const SpectralData sd = spectral_decompose(S, 1e-8);
  const SymOperator lam = psd_sqrt(sd);
  CHECK((lam.matrix * lam.matrix - S.matrix).norm() / S.matrix.norm() < 1e-10);
  CHECK((lam.matrix - lam.matrix.transpose()).cwiseAbs().maxCoeff() == 0.0);

  // A tiny negative eigenvalue inside the clamp window maps to exactly 0.
  SymOperator tiny;
  tiny.grid = make_grid(1.0, 3);
  tiny.matrix = Mat::Zero(3, 3);
  tiny.matrix.diagonal() << -1e-12, 1.0, 2.0;
  tiny.tridiagonal = true;
  const SpectralData sdt = spectral_decompose(tiny, 1e-8);
  CHECK(sdt.kernel_dim == 1);
  const SymOperator lamt = psd_sqrt(sdt);
  CHECK(lamt.matrix(0, 0) == 0.0);

  // Indefinite input beyond the window is a Condition-I violation.
  SymOperator indef = tiny;
  indef.matrix(0, 0) = -0.5;
  CHECK_THROWS_AS(psd_sqrt(spectral_decompose(indef, 1e-8)), std::domain_error);
}

TEST_CASE("pinv_sqrt: inverse on the range, kernel annihilation, norm") {
  const SymOperator S = kink_S(401, 20.0);
  const SpectralData sd = spectral_decompose(S, 1e-8);
  const SymOperator lam = psd_sqrt(sd);
  const SymOperator lami = pinv_sqrt(sd);
  const Projectors pr = projectors(sd);

  CHECK((lami.matrix * lam.matrix - pr.Pplus).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((lami.matrix * sd.eigenvectors.col(0)).cwiseAbs().maxCoeff() < 1e-14);
  // Operator norm = gap^{-1/2}.
  Eigen::SelfAdjointEigenSolver<Mat> es(lami.matrix);
  CHECK(std::abs(es.eigenvalues().cwiseAbs().maxCoeff() - 1.0 / std::sqrt(sd.gap)) <
        1e-10);

  // Unresolved gap: the zero operator has no positive spectrum at all.
  SymOperator zero;
  zero.grid = make_grid(1.0, 3);
  zero.matrix = Mat::Zero(3, 3);
  zero.tridiagonal = true;
  CHECK_THROWS_AS(pinv_sqrt(spectral_decompose(zero, 1e-8)), std::domain_error);
}

TEST_CASE("projectors: idempotent, orthogonal, rank = kernel dimension") {
  const SymOperator S = kink_S(801, 40.0);
  const SpectralData sd = spectral_decompose(S, 1e-8);
  const Projectors pr = projectors(sd);

  CHECK((pr.P0 * pr.P0 - pr.P0).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((pr.Pplus * pr.P0).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((pr.P0 - pr.P0.transpose()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(std::abs(pr.P0.trace() - sd.kernel_dim) < 1e-10);
  CHECK(sd.kernel_dim == 1);
}

TEST_CASE("spectral calculus: commutation, mapped eigenvalues, apply helper") {
  const SymOperator S = kink_S(201, 20.0);
  const SpectralData sd = spectral_decompose(S, 1e-8);
  const SymOperator lam = psd_sqrt(sd);
  const double snorm = sd.eigenvalues.cwiseAbs().maxCoeff();

  CHECK((lam.matrix * S.matrix - S.matrix * lam.matrix).norm() < 1e-9 * snorm * snorm);

  Eigen::SelfAdjointEigenSolver<Mat> es(lam.matrix);
  for (int j = 0; j < sd.eigenvalues.size(); ++j) {
    const double expect =
        (std::abs(sd.eigenvalues[j]) < sd.kernel_tol_abs || sd.eigenvalues[j] <= 0.0)
            ? 0.0
            : std::sqrt(sd.eigenvalues[j]);
    CHECK(std::abs(es.eigenvalues()[j] - expect) < 1e-10 * std::sqrt(snorm));
  }

  // spectral_apply reproduces the dense materialization.
  Vec x = Vec::LinSpaced(S.grid.n_points, -1.0, 1.0);
  const Vec y1 = spectral_apply(sd, [](double l) { return std::sqrt(std::max(l, 0.0)); }, x);
  const Vec y2 = lam.matrix * x;
  CHECK((y1 - y2).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("local sqrt apply matches spectral calculus on band-limited data") {
  const SymOperator S = kink_S(801, 40.0);
  const SpectralData sd = spectral_decompose(S, 1e-8);
  const Grid1D& g = S.grid;
  // Synthesize a vector supported on eigenvalues in [2.2, 40]: sum of a few
  // interior eigenvectors.
  Vec x = Vec::Zero(g.n_points);
  int used = 0;
  for (int j = 0; j < sd.eigenvalues.size() && used < 25; ++j) {
    if (sd.eigenvalues[j] > 2.2 && sd.eigenvalues[j] < 40.0) {
      x += sd.eigenvectors.col(j) / (1.0 + used);
      ++used;
    }
  }
  const double lam_hi = sd.eigenvalues[sd.eigenvalues.size() - 1] + 1.0;
  const Vec yl = sqrt_apply_local(S, x, 1.8, lam_hi, 350);
  const Vec ys = spectral_apply(sd, [](double l) { return std::sqrt(std::max(l, 0.0)); }, x);
  CHECK((yl - ys).cwiseAbs().maxCoeff() < 1e-7 * x.norm());
}

TEST_SUITE_END();
