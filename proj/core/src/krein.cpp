#include "hamspec/krein.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace hamspec {

namespace {

/// Orthogonal projector onto the column space of (the significant part of) C,
/// obtained from an SVD with singular values above `sigma_cut` kept.
Mat column_space_projector(const Mat& C, double sigma_cut, int* rank_out) {
  if (C.cols() == 0) {
    if (rank_out) *rank_out = 0;
    return Mat::Zero(C.rows(), C.rows());
  }
  Eigen::JacobiSVD<Mat> svd(C, Eigen::ComputeThinU);
  int rank = 0;
  while (rank < svd.singularValues().size() &&
         svd.singularValues()[rank] > sigma_cut) {
    ++rank;
  }
  if (rank_out) *rank_out = rank;
  const Mat U = svd.matrixU().leftCols(rank);
  return U * U.transpose();
}

/// Orthonormal basis (columns) of the column space of C, same cut as above.
Mat column_space_basis(const Mat& C, double sigma_cut) {
  if (C.cols() == 0) return Mat::Zero(C.rows(), 0);
  Eigen::JacobiSVD<Mat> svd(C, Eigen::ComputeThinU);
  int rank = 0;
  while (rank < svd.singularValues().size() &&
         svd.singularValues()[rank] > sigma_cut) {
    ++rank;
  }
  return svd.matrixU().leftCols(rank);
}

void validate_structure(const Mat& J, const Mat& B) {
  const auto n = J.rows();
  if (J.cols() != n || B.rows() != n || B.cols() != n || n == 0) {
    throw std::invalid_argument("assemble_system: J and B must be square and matched");
  }
  const double jscale = std::max(1.0, J.cwiseAbs().maxCoeff());
  if ((J + J.transpose()).cwiseAbs().maxCoeff() > 1e-12 * jscale) {
    throw std::invalid_argument("assemble_system: J is not skew-symmetric");
  }
  const Mat J2 = J * J;
  if ((J2 + Mat::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-10 * jscale * jscale) {
    throw std::invalid_argument("assemble_system: J² != -I");
  }
  const double bscale = std::max(1.0, B.cwiseAbs().maxCoeff());
  if ((B - B.transpose()).cwiseAbs().maxCoeff() > 1e-12 * bscale) {
    throw std::invalid_argument("assemble_system: B is not symmetric");
  }
}

}  // namespace

HamiltonSystem assemble_system(const Mat& J, const Mat& B, double kernel_tol) {
  validate_structure(J, B);
  const int n = static_cast<int>(J.rows());

  HamiltonSystem sys;
  sys.dim = n;
  sys.J = J;
  sys.B = 0.5 * (B + B.transpose());
  sys.A = J * sys.B;
  sys.kernel_tol = kernel_tol;

  // Λ, Λ₊⁻¹ and the B-kernel from the eigendecomposition of B. A negative
  // eigenvalue beyond the kernel window violates positivity and throws from
  // psd_sqrt.
  SymOperator bop;
  bop.matrix = sys.B;
  bop.tridiagonal = false;
  bop.label = "B";
  const SpectralData sdB = spectral_decompose(bop, kernel_tol);
  sys.kernel_tol_abs_B = sdB.kernel_tol_abs;
  sys.b_gap = sdB.gap;
  sys.Lambda = psd_sqrt(sdB).matrix;
  sys.LambdaPlusInv = (sdB.gap > sdB.kernel_tol_abs || sdB.kernel_dim == n)
                          ? (sdB.kernel_dim == n
                                 ? Mat::Zero(n, n)
                                 : pinv_sqrt(sdB).matrix)
                          : throw std::domain_error(
                                "assemble_system: spectral gap of B unresolved");

  sys.b_kernel_basis.resize(n, sdB.kernel_dim);
  {
    int c = 0;
    for (int j = 0; j < n; ++j) {
      if (std::abs(sdB.eigenvalues[j]) < sdB.kernel_tol_abs) {
        sys.b_kernel_basis.col(c++) = sdB.eigenvectors.col(j);
      }
    }
  }
  const Projectors prB = projectors(sdB);
  sys.Pi_K = prB.P0;
  sys.Pi_scriptR = prB.Pplus;

  // H = Λ iJ Λ = i W with W real skew; the Hermitian eigensolve classifies
  // the H-kernel (which contains Ker Λ plus the secular subspace).
  const Mat W = sys.Lambda * J * sys.Lambda;
  sys.H = I * W.cast<cplx>();
  Eigen::SelfAdjointEigenSolver<CMat> esH(sys.H);
  if (esH.info() != Eigen::Success) {
    throw std::runtime_error("assemble_system: eigensolve of H failed");
  }
  sys.h_eigenvalues = esH.eigenvalues();
  sys.h_eigenvectors = esH.eigenvectors();
  const double hmax = sys.h_eigenvalues.cwiseAbs().maxCoeff();
  sys.kernel_tol_abs_H = kernel_tol * hmax;

  // Ker H ∩ Ran Λ. W is real, so Ker H has a real basis: stack the real and
  // imaginary parts of the kernel eigenvectors, then project onto Ran Λ.
  // Pi_scriptR acts on Ker H as an orthogonal projection with singular values
  // 1 (on the intersection) and 0 (on Ker Λ), so the 0.5 cut is robust.
  int n_ker_H = 0;
  for (int j = 0; j < n; ++j) {
    if (std::abs(sys.h_eigenvalues[j]) < sys.kernel_tol_abs_H) ++n_ker_H;
  }
  Mat ker_H_stack(n, 2 * n_ker_H);
  {
    int c = 0;
    for (int j = 0; j < n; ++j) {
      if (std::abs(sys.h_eigenvalues[j]) < sys.kernel_tol_abs_H) {
        ker_H_stack.col(c++) = sys.h_eigenvectors.col(j).real();
        ker_H_stack.col(c++) = sys.h_eigenvectors.col(j).imag();
      }
    }
  }
  const Mat ker_W = column_space_basis(ker_H_stack, 1e-8);
  sys.Pi_0 = column_space_projector(sys.Pi_scriptR * ker_W, 0.5, nullptr);
  sys.Pi_R = sys.Pi_scriptR - sys.Pi_0;

  sys.P = sys.Pi_K * J * sys.Lambda;

  // G = Λ₊⁻¹ Π_scriptR + i P H_R⁻¹ Π_R. With H = iW, i H_R⁻¹ Π_R equals the
  // real Moore–Penrose pseudo-inverse W⁺, so G is real.
  Mat w_pinv = Mat::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    const double lam = sys.h_eigenvalues[j];
    if (std::abs(lam) < sys.kernel_tol_abs_H) continue;
    // i/λ · h h* summed over nonzero eigenpairs = i H⁺; realness follows from
    // the ±λ symmetry of the skew spectrum. Build it directly as real.
    const CVec h = sys.h_eigenvectors.col(j);
    const CMat term = (I / lam) * (h * h.adjoint());
    w_pinv += term.real();
  }
  sys.G = sys.LambdaPlusInv * sys.Pi_scriptR + sys.P * w_pinv;
  return sys;
}

HamiltonSystem assemble_gl_system(const SymOperator& S, double kernel_tol) {
  const int N = static_cast<int>(S.matrix.rows());
  const int n = 2 * N;
  Mat J = Mat::Zero(n, n);
  J.topRightCorner(N, N) = Mat::Identity(N, N);
  J.bottomLeftCorner(N, N) = -Mat::Identity(N, N);
  Mat B = Mat::Zero(n, n);
  B.topLeftCorner(N, N) = 0.5 * (S.matrix + S.matrix.transpose());
  B.bottomRightCorner(N, N) = Mat::Identity(N, N);

  HamiltonSystem sys = assemble_system(J, B, kernel_tol);

  // Cross-check H against the block closed form i·[[0, √S], [−√S, 0]].
  const Mat sqrtS = sys.Lambda.topLeftCorner(N, N);
  CMat Hblock = CMat::Zero(n, n);
  Hblock.topRightCorner(N, N) = I * sqrtS.cast<cplx>();
  Hblock.bottomLeftCorner(N, N) = -I * sqrtS.cast<cplx>();
  const double hscale = std::max(1.0, sys.h_eigenvalues.cwiseAbs().maxCoeff());
  if ((sys.H - Hblock).cwiseAbs().maxCoeff() > 1e-10 * hscale) {
    throw std::runtime_error(
        "assemble_gl_system: H disagrees with its block closed form");
  }
  return sys;
}

ConditionReport check_conditions(const HamiltonSystem& sys) {
  ConditionReport rep;
  rep.gap_delta = sys.b_gap;
  rep.kernel_dim = static_cast<int>(sys.b_kernel_basis.cols());

  // Secular-coupling conditioning: the kernel directions must map into the
  // Λ-domain with finite norm; in finite dimensions this is σ_max(Λ J Π_K).
  const Mat coupling = sys.Lambda * sys.J * sys.Pi_K;
  rep.cond3_residual =
      rep.kernel_dim == 0 ? 0.0 : coupling.jacobiSvd().singularValues()[0];
  rep.cond3_ok = std::isfinite(rep.cond3_residual);
  if (!rep.cond3_ok) rep.violations.push_back("secular coupling not finite");

  const double hscale = std::max(1e-300, sys.h_eigenvalues.cwiseAbs().maxCoeff());
  rep.cond4_residual =
      (sys.H - sys.H.adjoint()).cwiseAbs().maxCoeff() / hscale;
  if (rep.cond4_residual > 1e-12) {
    rep.violations.push_back("H is not Hermitian to tolerance");
  }

  // Spectral-gap constants: smallest nonzero eigenvalue of B, smallest
  // nonzero |eigenvalue| of H.
  double eps_h = 0.0;
  for (int j = 0; j < sys.h_eigenvalues.size(); ++j) {
    const double a = std::abs(sys.h_eigenvalues[j]);
    if (a >= sys.kernel_tol_abs_H && (eps_h == 0.0 || a < eps_h)) eps_h = a;
  }
  rep.gap_epsilon_H = eps_h;
  if (!(rep.gap_delta > 0.0)) {
    rep.violations.push_back("B has no spectral gap above the kernel");
  }
  if (!(rep.gap_epsilon_H > 0.0)) {
    rep.violations.push_back("H has no spectral gap above its kernel");
  }
  return rep;
}

namespace {

/// Deterministic standard normals from raw mt19937_64 output. The standard
/// distributions are implementation-defined, so the mapping from bits to
/// doubles is done here explicitly to keep seeds portable.
class PortableGauss {
 public:
  explicit PortableGauss(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // (0, 1]
    return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1p-53;
  }

  double gauss() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  Mat gauss_matrix(int rows, int cols) {
    Mat M(rows, cols);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) M(i, j) = gauss();
    }
    return M;
  }

  /// Haar-ish random orthogonal matrix: QR of a Gaussian matrix with the
  /// R-diagonal sign fix.
  Mat orthogonal(int n) {
    const Mat G = gauss_matrix(n, n);
    Eigen::HouseholderQR<Mat> qr(G);
    Mat Q = qr.householderQ();
    const Mat R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) {
      if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);
    }
    return Q;
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace

HamiltonSystem random_system(int n, int kernel_dim, double gap,
                             std::uint64_t seed, double kernel_tol) {
  if (n % 2 != 0 || n < 2 * kernel_dim + 2 || kernel_dim < 0 || !(gap > 0.0)) {
    throw std::invalid_argument(
        "random_system: need even n >= 2*kernel_dim + 2 and gap > 0");
  }
  PortableGauss rng(seed);

  const int half = n / 2;
  Mat Jcan = Mat::Zero(n, n);
  Jcan.topRightCorner(half, half) = Mat::Identity(half, half);
  Jcan.bottomLeftCorner(half, half) = -Mat::Identity(half, half);
  const Mat Qj = rng.orthogonal(n);
  Mat J = Qj.transpose() * Jcan * Qj;
  J = 0.5 * (J - J.transpose()).eval();  // exact skewness

  Vec spectrum(n);
  for (int j = 0; j < kernel_dim; ++j) spectrum[j] = 0.0;
  for (int j = kernel_dim; j < n; ++j) {
    spectrum[j] = gap * (1.0 + 9.0 * rng.uniform());
  }
  const Mat Qb = rng.orthogonal(n);
  Mat B = Qb.transpose() * spectrum.asDiagonal() * Qb;
  B = 0.5 * (B + B.transpose()).eval();  // exact symmetry

  return assemble_system(J, B, kernel_tol);
}

CVec krein_substitute(const HamiltonSystem& sys, const CVec& X) {
  if (X.size() != sys.dim) {
    throw std::invalid_argument("krein_substitute: dimension mismatch");
  }
  return CVec(sys.Lambda.cast<cplx>() * X);
}

CVec propagate_Z(const HamiltonSystem& sys, const CVec& Z, double t) {
  if (Z.size() != sys.dim) {
    throw std::invalid_argument("propagate_Z: dimension mismatch");
  }
  const CVec coeff = sys.h_eigenvectors.adjoint() * Z;
  CVec out = CVec::Zero(sys.dim);
  for (int j = 0; j < sys.dim; ++j) {
    out += std::exp(-I * sys.h_eigenvalues[j] * t) * coeff[j] *
           sys.h_eigenvectors.col(j);
  }
  return out;
}

CVec reconstruct_X(const HamiltonSystem& sys, const CVec& X0, double t) {
  if (X0.size() != sys.dim) {
    throw std::invalid_argument("reconstruct_X: dimension mismatch");
  }
  const CVec Z0 = sys.Lambda.cast<cplx>() * X0;

  // Oscillatory range part: Λ₊⁻¹ e^{−iHt} Λ X0.
  const CVec Zt = propagate_Z(sys, Z0, t);
  CVec X = sys.LambdaPlusInv.cast<cplx>() * Zt;

  // Frozen kernel component.
  X += sys.Pi_K.cast<cplx>() * X0;

  // Secular drift t·P Π₀ Λ X0.
  X += t * (sys.P.cast<cplx>() * (sys.Pi_0.cast<cplx>() * Z0));

  // Bounded kernel correction i P (e^{−iH_R t} − 1) H_R⁻¹ Π_R Λ X0, evaluated
  // in the eigenbasis of H over the nonzero eigenvalues.
  const CVec coeff = sys.h_eigenvectors.adjoint() * Z0;
  CVec corr = CVec::Zero(sys.dim);
  for (int j = 0; j < sys.dim; ++j) {
    const double lam = sys.h_eigenvalues[j];
    if (std::abs(lam) < sys.kernel_tol_abs_H) continue;
    corr += (I * (std::exp(-I * lam * t) - 1.0) / lam) * coeff[j] *
            sys.h_eigenvectors.col(j);
  }
  X += sys.P.cast<cplx>() * corr;
  return X;
}

Mat operator_P(const HamiltonSystem& sys) {
  // Finite-rank form −Σ_k |Y_k⟩⟨Λ J Y_k| over an orthonormal kernel basis.
  const int n = sys.dim;
  Mat P = Mat::Zero(n, n);
  for (int k = 0; k < sys.b_kernel_basis.cols(); ++k) {
    const Vec y = sys.b_kernel_basis.col(k);
    const Vec w = sys.Lambda * (sys.J * y);
    P.noalias() -= y * w.transpose();
  }
  return P;
}

Mat green_operator(const HamiltonSystem& sys) {
  // Recomputed from the definition (the assembled sys.G is the cached copy).
  const int n = sys.dim;
  Mat w_pinv = Mat::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    const double lam = sys.h_eigenvalues[j];
    if (std::abs(lam) < sys.kernel_tol_abs_H) continue;
    const CVec h = sys.h_eigenvectors.col(j);
    w_pinv += ((I / lam) * (h * h.adjoint())).real();
  }
  return sys.LambdaPlusInv * sys.Pi_scriptR + sys.P * w_pinv;
}

JordanData jordan_structure(const HamiltonSystem& sys) {
  JordanData jd;
  const int n = sys.dim;
  jd.kernel_A_basis = sys.b_kernel_basis;  // Ker A = Ker B (J invertible)
  jd.dim_ker_HR = static_cast<int>(
      std::lround(sys.Pi_0.trace()));
  jd.block_count = jd.dim_ker_HR;

  if (jd.block_count == 0) {
    jd.chain3_residual = std::numeric_limits<double>::infinity();
    return jd;
  }

  // Orthonormal basis of Ran Π₀ from its eigendecomposition (eigenvalue-1
  // eigenvectors of the projector).
  Eigen::SelfAdjointEigenSolver<Mat> es(sys.Pi_0);
  Mat basis(n, jd.block_count);
  int c = 0;
  for (int j = 0; j < n; ++j) {
    if (es.eigenvalues()[j] > 0.5) basis.col(c++) = es.eigenvectors().col(j);
  }

  const double anorm = sys.A.cwiseAbs().maxCoeff();
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(sys.A);
  jd.chain3_residual = std::numeric_limits<double>::infinity();
  for (int k = 0; k < jd.block_count; ++k) {
    const Vec zeta = basis.col(k);
    const Vec phi = sys.P * zeta;
    const Vec psi = sys.LambdaPlusInv * zeta;
    jd.secular_pairs.emplace_back(phi, psi);
    jd.chain2_residual = std::max(
        {jd.chain2_residual, (sys.A * psi - phi).norm() / std::max(1.0, anorm),
         (sys.A * phi).norm() / std::max(1.0, anorm)});
    // Chain of length 3 would need w with A w = Ψ; measure the least-squares
    // residual of that equation (distance of Ψ from Ran A).
    const Vec w = cod.solve(psi);
    const double res = (sys.A * w - psi).norm() / psi.norm();
    jd.chain3_residual = std::min(jd.chain3_residual, res);
  }
  jd.chain3_excluded = jd.chain3_residual > 1e-6;
  return jd;
}

CVec expm_apply(const Mat& A, const CVec& X0, double t) {
  const Mat E = (t * A).exp();
  return CVec(E * X0.real() + I * (E * X0.imag()));
}

}  // namespace hamspec
