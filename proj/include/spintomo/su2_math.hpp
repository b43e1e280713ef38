#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "spintomo/half_integer.hpp"
#include "spintomo/sphere.hpp"

namespace spintomo {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;

// ln(n!) from a read-only table built on first use. Covers every factorial
// reachable with 2j <= 100.
double log_factorial(int n);

// Clebsch-Gordan coefficient <j1,m1; j2,m2 | j,m> in the Condon-Shortley
// convention (Racah sum in log-factorial form). Returns 0 when m != m1+m2,
// when the triangle condition fails, or when j1+j2+j is not an integer.
// Invalid quantum numbers (|m| > j, parity mismatch) raise std::domain_error.
double clebsch_gordan(HalfInteger j1, HalfInteger m1,
                      HalfInteger j2, HalfInteger m2,
                      HalfInteger j, HalfInteger m);

// Wigner small-d matrix, d^j_{m'm}(beta) = <j,m'| exp(-i beta J_y) |j,m>.
// Rows and columns are ordered m = j, j-1, ..., -j.
RealMatrix wigner_d(HalfInteger j, double beta);

// Spin-j matrix of g(n) = exp(-i phi J_z) exp(-i theta J_y); its column
// mu = j holds the coherent-state amplitudes.
ComplexMatrix rotation_operator(HalfInteger j, const SpherePoint& n);

// Euler-angle group element exp(i alpha J_z) exp(i beta J_y) exp(i gamma J_z)
// (positive exponents; note the opposite sign relative to rotation_operator).
ComplexMatrix euler_rotation(HalfInteger j, double alpha, double beta, double gamma);

// Tensor (multipole) operator D_lm: entry (q, k) equals
// sqrt((2l+1)/(2j+1)) <j,k; l,m | j,q>. Orthonormal under Tr(A B^dagger).
ComplexMatrix tensor_operator(HalfInteger j, int l, int m);

// Orthonormal spherical harmonic with Condon-Shortley phase.
Complex spherical_harmonic(int l, int m, const SpherePoint& n);

// Theta-dependent part of all Y_lm with 0 <= m <= l <= lmax, indexed by
// l*(l+1)/2 + m, so Y_lm(theta,phi) = table[idx] * exp(i m phi).
std::vector<double> spherical_harmonic_table(int lmax, double theta);

// Legendre polynomial P_l(x) for |x| <= 1 by the Bonnet recurrence.
double legendre_p(int l, double x);

// P_0(x) .. P_lmax(x) in one pass.
std::vector<double> legendre_all(int lmax, double x);

// Angular momentum generators in the |j,mu> basis (mu descending).
ComplexMatrix jz_matrix(HalfInteger j);
ComplexMatrix jy_matrix(HalfInteger j);
ComplexMatrix jx_matrix(HalfInteger j);

} // namespace spintomo
