#pragma once

#include <complex>

#include <Eigen/Dense>

/// Common linear-algebra aliases used across the library.
namespace hamspec {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using cplx = std::complex<double>;

inline constexpr cplx I{0.0, 1.0};

/// Parity channel of a function on the symmetric interval [-L, L].
enum class Parity { odd, even };

/// How free waves / the free Green function treat the dispersion relation.
///
/// `continuum`: textbook kernel e^{ik|x-y|} with k = sqrt(omega^2 - m^2);
/// discretization error O(h^2) (O(h^4) inside the scattering solver, which
/// adds the Euler-Maclaurin corner correction).
///
/// `lattice`: wavenumber kappa = (2/h) asin(k h/2), for which sin/cos/exp
/// waves satisfy the three-point stencil identity *exactly*; scattering
/// states built this way are exact generalized eigenvectors of the
/// discretized operator, which is what long-time propagation tests need.
enum class DispersionModel { continuum, lattice };

inline double sgn(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace hamspec
