#include "hamspec/gl_system.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace hamspec {

namespace {

/// Spectral coefficients of a complex grid function: Vᵀ z done on real and
/// imaginary parts separately (Eigen has no real-matrix × complex-vector
/// product).
CVec to_spectral(const Mat& V, const CVec& z) {
  const Vec re = V.transpose() * z.real();
  const Vec im = V.transpose() * z.imag();
  return re + I * im;
}

CVec from_spectral(const Mat& V, const CVec& c) {
  const Vec re = V * c.real();
  const Vec im = V * c.imag();
  return re + I * im;
}

}  // namespace

GlBlockSystem make_gl_block_system(const SymOperator& S, double edge_mass,
                                   double kernel_tol) {
  GlBlockSystem sys;
  sys.grid = S.grid;
  sys.S = S;
  sys.sd = spectral_decompose(S, kernel_tol);
  if (sys.sd.kernel_dim > 1) {
    throw std::domain_error(
        "make_gl_block_system: more than one kernel direction");
  }
  if (sys.sd.kernel_dim == 1) {
    sys.v0 = sys.sd.eigenvectors.col(0);
    // Fix the sign convention: nonnegative mean (the translation mode of the
    // field model is positive).
    if (sys.v0.sum() < 0.0) sys.v0 = -sys.v0;
  }
  sys.edge_mass = edge_mass;
  sys.n_points = S.grid.n_points;
  sys.dim = 2 * sys.n_points;
  return sys;
}

std::vector<BoundState> gl_bound_states(const GlBlockSystem& sys) {
  std::vector<BoundState> out;
  const double edge2 = sys.edge_mass * sys.edge_mass * (1.0 - 1e-3);
  for (int j = 0; j < sys.sd.eigenvalues.size(); ++j) {
    const double lam = sys.sd.eigenvalues[j];
    if (std::abs(lam) < sys.sd.kernel_tol_abs) continue;
    if (lam < edge2) out.push_back({j, std::sqrt(lam)});
  }
  return out;
}

CVec gl_apply_A(const GlBlockSystem& sys, const CVec& X) {
  const int N = sys.n_points;
  if (X.size() != 2 * N) throw std::invalid_argument("gl_apply_A: bad size");
  CVec out(2 * N);
  out.head(N) = X.tail(N);
  out.tail(N) = -apply_sym(sys.S, CVec(X.head(N)));
  return out;
}

CVec gl_apply_B(const GlBlockSystem& sys, const CVec& X) {
  const int N = sys.n_points;
  if (X.size() != 2 * N) throw std::invalid_argument("gl_apply_B: bad size");
  CVec out(2 * N);
  out.head(N) = apply_sym(sys.S, CVec(X.head(N)));
  out.tail(N) = X.tail(N);
  return out;
}

CVec gl_apply_J(const CVec& X) {
  const int N = static_cast<int>(X.size()) / 2;
  CVec out(2 * N);
  out.head(N) = X.tail(N);
  out.tail(N) = -X.head(N);
  return out;
}

CVec gl_apply_Lambda(const GlBlockSystem& sys, const CVec& X) {
  const int N = sys.n_points;
  if (X.size() != 2 * N) throw std::invalid_argument("gl_apply_Lambda: bad size");
  // Clamp window as in psd_sqrt: kernel eigenvalues map to exactly 0, not to
  // √(rounding noise).
  const double cut = sys.sd.kernel_tol_abs;
  CVec out(2 * N);
  out.head(N) = spectral_apply(
      sys.sd,
      [cut](double l) { return l > cut ? std::sqrt(l) : 0.0; },
      CVec(X.head(N)));
  out.tail(N) = X.tail(N);
  return out;
}

CVec gl_apply_LambdaPlusInv(const GlBlockSystem& sys, const CVec& X) {
  const int N = sys.n_points;
  if (X.size() != 2 * N) {
    throw std::invalid_argument("gl_apply_LambdaPlusInv: bad size");
  }
  const double cut = sys.sd.kernel_tol_abs;
  CVec out(2 * N);
  out.head(N) = spectral_apply(
      sys.sd,
      [cut](double l) { return l > cut ? 1.0 / std::sqrt(l) : 0.0; },
      CVec(X.head(N)));
  out.tail(N) = X.tail(N);
  return out;
}

CVec gl_propagate_Z(const GlBlockSystem& sys, const CVec& Z0, double t) {
  const int N = sys.n_points;
  if (Z0.size() != 2 * N) throw std::invalid_argument("gl_propagate_Z: bad size");
  const Mat& V = sys.sd.eigenvectors;
  CVec a = to_spectral(V, CVec(Z0.head(N)));
  CVec b = to_spectral(V, CVec(Z0.tail(N)));
  for (int j = 0; j < N; ++j) {
    const double lam = sys.sd.eigenvalues[j];
    if (std::abs(lam) < sys.sd.kernel_tol_abs || lam <= 0.0) continue;
    const double w = std::sqrt(lam);
    const double c = std::cos(w * t), s = std::sin(w * t);
    const cplx aj = a[j], bj = b[j];
    a[j] = c * aj + s * bj;
    b[j] = -s * aj + c * bj;
  }
  CVec out(2 * N);
  out.head(N) = from_spectral(V, a);
  out.tail(N) = from_spectral(V, b);
  return out;
}

CVec gl_reconstruct_X(const GlBlockSystem& sys, const CVec& X0, double t) {
  const int N = sys.n_points;
  if (X0.size() != 2 * N) throw std::invalid_argument("gl_reconstruct_X: bad size");
  const CVec Zt = gl_propagate_Z(sys, gl_apply_Lambda(sys, X0), t);
  CVec X = gl_apply_LambdaPlusInv(sys, Zt);
  if (sys.sd.kernel_dim == 1) {
    const cplx c_psi = sys.v0.dot(X0.head(N).real()) +
                       I * sys.v0.dot(X0.head(N).imag());
    const cplx c_pi = sys.v0.dot(X0.tail(N).real()) +
                      I * sys.v0.dot(X0.tail(N).imag());
    X.head(N) += (c_psi + t * c_pi) * sys.v0.cast<cplx>();
  }
  return X;
}

std::pair<CVec, CVec> gl_secular_components(const GlBlockSystem& sys,
                                            const CVec& X0) {
  const int N = sys.n_points;
  if (X0.size() != 2 * N) {
    throw std::invalid_argument("gl_secular_components: bad size");
  }
  CVec phi = CVec::Zero(2 * N), psi = CVec::Zero(2 * N);
  if (sys.sd.kernel_dim == 1) {
    const cplx c_pi = sys.v0.dot(X0.tail(N).real()) +
                      I * sys.v0.dot(X0.tail(N).imag());
    phi.head(N) = c_pi * sys.v0.cast<cplx>();
    psi.tail(N) = c_pi * sys.v0.cast<cplx>();
  }
  return {phi, psi};
}

CVec gl_green_apply(const GlBlockSystem& sys, const CVec& e, double omega) {
  const int N = sys.n_points;
  if (e.size() != N) throw std::invalid_argument("gl_green_apply: bad size");
  if (omega == 0.0) throw std::invalid_argument("gl_green_apply: omega must be nonzero");
  CVec ep = e;
  if (sys.sd.kernel_dim == 1) {
    const cplx c = sys.v0.dot(e.real()) + I * sys.v0.dot(e.imag());
    ep -= c * sys.v0.cast<cplx>();
  }
  CVec a(2 * N);
  a.head(N) = ep / std::abs(omega);
  a.tail(N) = -I * sgn(omega) * e;
  return a;
}

double gl_state_norm(const GlBlockSystem& sys, const CVec& X) {
  const int N = sys.n_points;
  const double n1 = quad_norm(CVec(X.head(N)), sys.grid);
  const double n2 = quad_norm(CVec(X.tail(N)), sys.grid);
  return std::sqrt(n1 * n1 + n2 * n2);
}

double gl_v_norm(const GlBlockSystem& sys, const CVec& X) {
  return gl_state_norm(sys, gl_apply_Lambda(sys, X)) + gl_state_norm(sys, X);
}

}  // namespace hamspec
