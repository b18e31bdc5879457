#include "hamspec/linop.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <lapacke.h>

namespace hamspec {

SymOperator second_derivative(const Grid1D& grid) {
  const int n = grid.n_points;
  const double h2 = grid.spacing * grid.spacing;
  SymOperator op;
  op.grid = grid;
  op.label = "second_derivative";
  op.tridiagonal = true;
  op.matrix = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    op.matrix(i, i) = 2.0 / h2;
    if (i + 1 < n) {
      op.matrix(i, i + 1) = -1.0 / h2;
      op.matrix(i + 1, i) = -1.0 / h2;
    }
  }
  return op;
}

SymOperator assemble_S(const Grid1D& grid, double m, const Vec& V) {
  if (V.size() != grid.n_points) {
    throw std::invalid_argument("assemble_S: potential length does not match grid");
  }
  SymOperator op = second_derivative(grid);
  op.label = "S";
  op.matrix.diagonal() += (Vec::Constant(grid.n_points, m * m) + V);
  return op;
}

namespace {

template <class VecT>
VecT apply_tridiag(const Mat& A, const VecT& x) {
  const int n = static_cast<int>(x.size());
  VecT y(n);
  for (int i = 0; i < n; ++i) {
    auto acc = A(i, i) * x[i];
    if (i > 0) acc += A(i, i - 1) * x[i - 1];
    if (i + 1 < n) acc += A(i, i + 1) * x[i + 1];
    y[i] = acc;
  }
  return y;
}

}  // namespace

Vec apply_sym(const SymOperator& S, const Vec& x) {
  return S.tridiagonal ? apply_tridiag(S.matrix, x) : Vec(S.matrix * x);
}

CVec apply_sym(const SymOperator& S, const CVec& x) {
  return S.tridiagonal ? apply_tridiag(S.matrix, x) : CVec(S.matrix * x);
}

SpectralData spectral_decompose(const SymOperator& S, double kernel_tol) {
  if (!(kernel_tol > 0.0)) {
    throw std::invalid_argument("spectral_decompose: kernel_tol must be positive");
  }
  const int n = static_cast<int>(S.matrix.rows());
  SpectralData sd;
  sd.grid = S.grid;
  sd.label = S.label;
  sd.kernel_tol = kernel_tol;

  if (S.tridiagonal) {
    Vec d = S.matrix.diagonal();
    Vec e(n > 1 ? n - 1 : 1);
    for (int i = 0; i + 1 < n; ++i) e[i] = S.matrix(i, i + 1);
    Mat z(n, n);
    const lapack_int info = LAPACKE_dstevd(LAPACK_COL_MAJOR, 'V', n, d.data(),
                                           e.data(), z.data(), n);
    if (info != 0) {
      throw std::runtime_error("spectral_decompose: dstevd failed to converge");
    }
    sd.eigenvalues = d;
    sd.eigenvectors = z;
  } else {
    Eigen::SelfAdjointEigenSolver<Mat> es(S.matrix);
    if (es.info() != Eigen::Success) {
      throw std::runtime_error("spectral_decompose: eigensolver failed to converge");
    }
    sd.eigenvalues = es.eigenvalues();
    sd.eigenvectors = es.eigenvectors();
  }

  const double scale =
      std::max(std::abs(sd.eigenvalues[0]), std::abs(sd.eigenvalues[n - 1]));
  sd.kernel_tol_abs = kernel_tol * scale;
  sd.kernel_dim = 0;
  sd.gap = 0.0;
  for (int j = 0; j < n; ++j) {
    const double lam = sd.eigenvalues[j];
    if (std::abs(lam) < sd.kernel_tol_abs) {
      ++sd.kernel_dim;
    } else if (lam > 0.0 && sd.gap == 0.0) {
      sd.gap = lam;
    }
  }
  return sd;
}

SymOperator psd_sqrt(const SpectralData& sd) {
  const int n = static_cast<int>(sd.eigenvalues.size());
  if (sd.eigenvalues[0] < -sd.kernel_tol_abs) {
    throw std::domain_error(
        "psd_sqrt: eigenvalue below -kernel_tol; operator is not nonnegative");
  }
  Vec roots(n);
  for (int j = 0; j < n; ++j) {
    const double lam = sd.eigenvalues[j];
    roots[j] = (std::abs(lam) < sd.kernel_tol_abs || lam <= 0.0) ? 0.0 : std::sqrt(lam);
  }
  SymOperator op;
  op.grid = sd.grid;
  op.label = sd.label.empty() ? "sqrt" : "sqrt(" + sd.label + ")";
  op.tridiagonal = false;
  op.matrix = sd.eigenvectors * roots.asDiagonal() * sd.eigenvectors.transpose();
  // Symmetrize away the last bits of roundoff so downstream exact-symmetry
  // invariants hold.
  op.matrix = 0.5 * (op.matrix + op.matrix.transpose()).eval();
  return op;
}

SymOperator pinv_sqrt(const SpectralData& sd) {
  const int n = static_cast<int>(sd.eigenvalues.size());
  if (!(sd.gap > sd.kernel_tol_abs)) {
    throw std::domain_error("pinv_sqrt: spectral gap not resolved above kernel_tol");
  }
  Vec inv_roots(n);
  for (int j = 0; j < n; ++j) {
    const double lam = sd.eigenvalues[j];
    inv_roots[j] = (lam > sd.kernel_tol_abs) ? 1.0 / std::sqrt(lam) : 0.0;
  }
  SymOperator op;
  op.grid = sd.grid;
  op.label = sd.label.empty() ? "pinv_sqrt" : "pinv_sqrt(" + sd.label + ")";
  op.tridiagonal = false;
  op.matrix = sd.eigenvectors * inv_roots.asDiagonal() * sd.eigenvectors.transpose();
  op.matrix = 0.5 * (op.matrix + op.matrix.transpose()).eval();
  return op;
}

Projectors projectors(const SpectralData& sd) {
  const int n = static_cast<int>(sd.eigenvalues.size());
  Projectors p;
  p.P0 = Mat::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    if (std::abs(sd.eigenvalues[j]) < sd.kernel_tol_abs) {
      p.P0.noalias() += sd.eigenvectors.col(j) * sd.eigenvectors.col(j).transpose();
    }
  }
  p.Pplus = Mat::Identity(n, n) - p.P0;
  return p;
}

namespace {

/// Chebyshev coefficients of √λ mapped from [lo, hi] to [-1, 1].
std::vector<double> sqrt_cheb_coeffs(double lo, double hi, int degree) {
  const int K = degree + 64;
  std::vector<double> c(degree + 1, 0.0);
  for (int j = 0; j <= degree; ++j) {
    double acc = 0.0;
    for (int k = 0; k < K; ++k) {
      const double theta = M_PI * (k + 0.5) / K;
      const double lam = 0.5 * (hi + lo) + 0.5 * (hi - lo) * std::cos(theta);
      acc += std::sqrt(lam) * std::cos(j * theta);
    }
    c[j] = 2.0 * acc / K;
  }
  return c;
}

template <class VecT>
VecT sqrt_apply_local_impl(const SymOperator& S, const VecT& x, double lo, double hi,
                           int degree) {
  const auto c = sqrt_cheb_coeffs(lo, hi, degree);
  const double alpha = 2.0 / (hi - lo);
  const double beta = -(hi + lo) / (hi - lo);
  // Mapped operator Ŝ = alpha·S + beta·I; forward three-term recurrence
  // T_{j+1} = 2 Ŝ T_j - T_{j-1} with banded products only.
  VecT t_prev = x;
  VecT t_cur = alpha * apply_sym(S, x) + beta * x;
  VecT y = 0.5 * c[0] * t_prev + c[1] * t_cur;
  for (int j = 2; j <= degree; ++j) {
    VecT t_next = 2.0 * (alpha * apply_sym(S, t_cur) + beta * t_cur) - t_prev;
    y += c[j] * t_next;
    t_prev.swap(t_cur);
    t_cur.swap(t_next);
  }
  return y;
}

}  // namespace

Vec spectral_apply(const SpectralData& sd, const std::function<double(double)>& f,
                   const Vec& x) {
  Vec coeffs = sd.eigenvectors.transpose() * x;
  for (int j = 0; j < coeffs.size(); ++j) coeffs[j] *= f(sd.eigenvalues[j]);
  return sd.eigenvectors * coeffs;
}

CVec spectral_apply(const SpectralData& sd, const std::function<double(double)>& f,
                    const CVec& x) {
  // The eigenvector matrix is real, so run the two real parts separately
  // (Eigen has no real-matrix × complex-vector product).
  Vec cr = sd.eigenvectors.transpose() * x.real().matrix();
  Vec ci = sd.eigenvectors.transpose() * x.imag().matrix();
  for (int j = 0; j < cr.size(); ++j) {
    const double fl = f(sd.eigenvalues[j]);
    cr[j] *= fl;
    ci[j] *= fl;
  }
  Vec yr = sd.eigenvectors * cr;
  Vec yi = sd.eigenvectors * ci;
  CVec y(x.size());
  y.real() = yr;
  y.imag() = yi;
  return y;
}

Vec sqrt_apply_local(const SymOperator& S, const Vec& x, double lambda_lo,
                     double lambda_hi, int degree) {
  return sqrt_apply_local_impl(S, x, lambda_lo, lambda_hi, degree);
}

CVec sqrt_apply_local(const SymOperator& S, const CVec& x, double lambda_lo,
                      double lambda_hi, int degree) {
  return sqrt_apply_local_impl(S, x, lambda_lo, lambda_hi, degree);
}

}  // namespace hamspec
