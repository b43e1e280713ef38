#include "spintomo/states.hpp"

#include <cmath>
#include <stdexcept>

namespace spintomo {

StateVector make_dicke(HalfInteger j, HalfInteger mu) {
    const int idx = index_of(j, mu); // validates |mu| <= j and parity
    StateVector psi{j, Eigen::VectorXcd::Zero(dimension(j))};
    psi.amplitudes(idx) = 1.0;
    return psi;
}

StateVector make_coherent(HalfInteger j, const SpherePoint& n) {
    const int dim = dimension(j);
    const double c = std::cos(0.5 * n.theta);
    const double s = std::sin(0.5 * n.theta);
    StateVector psi{j, Eigen::VectorXcd(dim)};
    for (int row = 0; row < dim; ++row) {
        const int jpm = j.twice() - row; // j + mu
        const int jmm = row;             // j - mu
        const double mu = 0.5 * (j.twice() - 2 * row);
        const double log_binom = 0.5 * (log_factorial(j.twice()) - log_factorial(jpm) -
                                        log_factorial(jmm));
        const double magnitude = std::exp(log_binom) *
                                 std::pow(c, jpm) * std::pow(s, jmm);
        psi.amplitudes(row) = magnitude * std::polar(1.0, -mu * n.phi);
    }
    // guard against rounding drift in the closed form
    psi.amplitudes.normalize();
    return psi;
}

StateVector make_superposition(HalfInteger j, const Eigen::VectorXcd& coeffs) {
    if (coeffs.size() != dimension(j))
        throw std::domain_error("make_superposition: expected " + std::to_string(dimension(j)) +
                                " amplitudes, got " + std::to_string(coeffs.size()));
    const double norm = coeffs.norm();
    if (norm < 1e-300) throw std::domain_error("make_superposition: zero amplitude vector");
    return StateVector{j, coeffs / norm};
}

DensityMatrix make_mixture(const std::vector<MixtureComponent>& components) {
    if (components.empty()) throw std::domain_error("make_mixture: no components");
    const HalfInteger j = components.front().rho.j;
    const int dim = dimension(j);
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(dim, dim);
    double total = 0.0;
    for (const auto& comp : components) {
        if (comp.weight < 0.0) throw std::domain_error("make_mixture: negative weight");
        if (comp.rho.j != j) throw std::domain_error("make_mixture: mixed j values");
        acc += comp.weight * comp.rho.matrix;
        total += comp.weight;
    }
    if (total <= 0.0) throw std::domain_error("make_mixture: weights sum to zero");
    DensityMatrix rho{j, acc / total};
    validate_density(rho);
    return rho;
}

DensityMatrix pure_density(const StateVector& psi) {
    return DensityMatrix{psi.j, psi.amplitudes * psi.amplitudes.adjoint()};
}

void validate_state(const StateVector& psi) {
    if (psi.amplitudes.size() != dimension(psi.j))
        throw std::domain_error("StateVector: amplitude count does not match 2j+1");
    if (std::abs(psi.amplitudes.norm() - 1.0) > 1e-12)
        throw std::domain_error("StateVector: not normalized");
}

void validate_density(const DensityMatrix& rho) {
    const int dim = dimension(rho.j);
    if (rho.matrix.rows() != dim || rho.matrix.cols() != dim)
        throw std::domain_error("DensityMatrix: dimension does not match 2j+1");
    if (!rho.matrix.allFinite())
        throw std::domain_error("DensityMatrix: non-finite entries");
    if ((rho.matrix - rho.matrix.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::domain_error("DensityMatrix: not Hermitian");
    if (std::abs(rho.matrix.trace().real() - 1.0) > 1e-12 ||
        std::abs(rho.matrix.trace().imag()) > 1e-12)
        throw std::domain_error("DensityMatrix: trace != 1");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho.matrix,
                                                           Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -1e-10)
        throw std::domain_error("DensityMatrix: negative eigenvalue");
}

} // namespace spintomo
