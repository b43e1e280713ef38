#pragma once

#include <vector>

#include <Eigen/Dense>

#include "spintomo/half_integer.hpp"
#include "spintomo/sphere.hpp"
#include "spintomo/su2_math.hpp"

namespace spintomo {

// Pure spin-j state; amplitudes indexed mu = j, j-1, ..., -j.
struct StateVector {
    HalfInteger j;
    Eigen::VectorXcd amplitudes;
};

// Spin-j density operator. Constructors in this module validate the
// Hermiticity / unit-trace / positivity invariants; reconstruction estimates
// are carried in the same struct and validated explicitly where required.
struct DensityMatrix {
    HalfInteger j;
    Eigen::MatrixXcd matrix;

    int dim() const { return static_cast<int>(matrix.rows()); }
};

struct MixtureComponent {
    double weight;
    DensityMatrix rho;
};

StateVector make_dicke(HalfInteger j, HalfInteger mu);

// SU(2) coherent state |j;n> = g(n)|j,j>.
StateVector make_coherent(HalfInteger j, const SpherePoint& n);

// Normalized copy of an arbitrary amplitude vector (length 2j+1, not all zero).
StateVector make_superposition(HalfInteger j, const Eigen::VectorXcd& coeffs);

// Convex combination sum_i w_i rho_i / sum_i w_i.
DensityMatrix make_mixture(const std::vector<MixtureComponent>& components);

DensityMatrix pure_density(const StateVector& psi);

// Throws std::domain_error unless Hermitian to 1e-12, unit trace to 1e-12 and
// smallest eigenvalue >= -1e-10.
void validate_density(const DensityMatrix& rho);

// Throws std::domain_error unless normalized to 1e-12.
void validate_state(const StateVector& psi);

} // namespace spintomo
