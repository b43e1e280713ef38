#include "spintomo/reconstruction.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "spintomo/errors.hpp"

namespace spintomo {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

int coeff_index(int l, int m) { return l * l + l + m; }

void require_same_j(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.j != b.j) throw std::domain_error("density matrices have different j");
}

// sqrt of a Hermitian PSD matrix, clipping eigensolver-scale negatives
Eigen::MatrixXcd hermitian_sqrt(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
    Eigen::VectorXd lam = solver.eigenvalues();
    for (Eigen::Index i = 0; i < lam.size(); ++i) lam(i) = lam(i) > 0.0 ? std::sqrt(lam(i)) : 0.0;
    return solver.eigenvectors() * lam.asDiagonal() * solver.eigenvectors().adjoint();
}

} // namespace

MultipoleCoefficients MultipoleCoefficients::zero(HalfInteger j) {
    const int lmax = j.twice();
    return MultipoleCoefficients{j, std::vector<Complex>((lmax + 1) * (lmax + 1), Complex{0.0, 0.0})};
}

Complex& MultipoleCoefficients::at(int l, int m) {
    if (l < 0 || l > lmax() || std::abs(m) > l)
        throw std::domain_error("MultipoleCoefficients: (l,m) out of range");
    return values[coeff_index(l, m)];
}

Complex MultipoleCoefficients::at(int l, int m) const {
    if (l < 0 || l > lmax() || std::abs(m) > l)
        throw std::domain_error("MultipoleCoefficients: (l,m) out of range");
    return values[coeff_index(l, m)];
}

MultipoleCoefficients multipoles_from_density(const DensityMatrix& rho) {
    MultipoleCoefficients R = MultipoleCoefficients::zero(rho.j);
    for (int l = 0; l <= R.lmax(); ++l)
        for (int m = -l; m <= l; ++m)
            R.at(l, m) = (rho.matrix * tensor_operator(rho.j, l, m).adjoint()).trace();
    return R;
}

DensityMatrix density_from_multipoles(const MultipoleCoefficients& R) {
    const int dim = dimension(R.j);
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    for (int l = 0; l <= R.lmax(); ++l)
        for (int m = -l; m <= l; ++m)
            rho += R.at(l, m) * tensor_operator(R.j, l, m);
    return DensityMatrix{R.j, rho};
}

std::vector<double> readout_denominators(HalfInteger j, HalfInteger mu) {
    std::vector<double> den(j.twice() + 1);
    for (int l = 0; l <= j.twice(); ++l)
        den[l] = clebsch_gordan(j, mu, HalfInteger::from_int(l), HalfInteger::from_int(0), j, mu);
    return den;
}

std::vector<int> vanishing_denominators(HalfInteger j, HalfInteger mu, double tol) {
    const auto den = readout_denominators(j, mu);
    std::vector<int> bad;
    for (int l = 0; l < static_cast<int>(den.size()); ++l)
        if (std::abs(den[l]) < tol) bad.push_back(l);
    return bad;
}

namespace {

std::vector<double> checked_denominators(HalfInteger j, HalfInteger mu) {
    const auto bad = vanishing_denominators(j, mu);
    if (!bad.empty()) {
        std::ostringstream msg;
        msg << "readout mu=" << mu.str() << " has vanishing Clebsch-Gordan denominator"
            << " <j,mu;l,0|j,mu> for l =";
        for (int l : bad) msg << " " << l;
        msg << "; choose readout mu = +j or -j";
        throw NumericError(msg.str());
    }
    return readout_denominators(j, mu);
}

} // namespace

MultipoleCoefficients multipoles_from_probabilities(const ProbabilityGrid& p) {
    if (p.values.size() != p.grid.size())
        throw std::domain_error("ProbabilityGrid: value count does not match grid");
    const HalfInteger j = p.j;
    const int lmax = j.twice();
    const auto den = checked_denominators(j, p.mu);
    if (!p.grid.exact_to_degree(2 * lmax))
        throw NumericError("grid too coarse: quadrature is not exact through degree 4j = " +
                           std::to_string(2 * lmax));

    // accumulate sum_i w_i p_i Y*_lm(n_i); conj(Y_lm) = table * exp(-i m phi)
    // and negative m follow from Y_{l,-m} = (-1)^m conj(Y_lm)
    MultipoleCoefficients R = MultipoleCoefficients::zero(j);
    const auto tri = [](int l, int m) { return l * (l + 1) / 2 + m; };
    for (std::size_t i = 0; i < p.grid.size(); ++i) {
        const auto table = spherical_harmonic_table(lmax, p.grid.points[i].theta);
        const double wp = p.grid.weights[i] * p.values[i];
        for (int m = 0; m <= lmax; ++m) {
            const Complex phase = wp * std::polar(1.0, -m * p.grid.points[i].phi);
            for (int l = m; l <= lmax; ++l) {
                const Complex contrib = table[tri(l, m)] * phase;
                R.at(l, m) += contrib;
                if (m > 0) R.at(l, -m) += (m % 2 == 0 ? std::conj(contrib) : -std::conj(contrib));
            }
        }
    }
    const double scale = std::sqrt((j.twice() + 1.0) / kFourPi);
    for (int l = 0; l <= lmax; ++l)
        for (int m = -l; m <= l; ++m) R.at(l, m) *= scale / den[l];
    return R;
}

namespace {

// <j,j;l,0|j,j>^{-s} factors of the QPD family
std::vector<double> qpd_weight_factors(HalfInteger j, int s) {
    if (s != -1 && s != 0 && s != 1)
        throw std::domain_error("QPD order parameter s must be -1, 0 or +1");
    auto den = readout_denominators(j, j);
    for (double& f : den) f = (s == 0) ? 1.0 : (s == 1 ? 1.0 / f : f);
    return den;
}

} // namespace

QPDGrid qpd_from_multipoles(const MultipoleCoefficients& R, int s, const SphereGrid& grid) {
    const HalfInteger j = R.j;
    const int lmax = R.lmax();
    const auto factor = qpd_weight_factors(j, s);
    const double scale = std::sqrt(kFourPi / (j.twice() + 1.0));
    const auto tri = [](int l, int m) { return l * (l + 1) / 2 + m; };

    QPDGrid out{grid, j, s, {}};
    out.values.reserve(grid.size());
    double max_imag = 0.0;
    for (const auto& point : grid.points) {
        const auto table = spherical_harmonic_table(lmax, point.theta);
        Complex value{0.0, 0.0};
        for (int m = 0; m <= lmax; ++m) {
            const Complex phase = std::polar(1.0, m * point.phi);
            for (int l = m; l <= lmax; ++l) {
                const double y = table[tri(l, m)];
                Complex term = R.at(l, m) * y * phase;
                if (m > 0) {
                    const Complex yneg = (m % 2 == 0 ? y : -y) * std::conj(phase);
                    term += R.at(l, -m) * yneg;
                }
                value += factor[l] * term;
            }
        }
        value *= scale;
        max_imag = std::max(max_imag, std::abs(value.imag()));
        out.values.push_back(value.real());
    }
    if (max_imag > 1e-10)
        throw NumericError("QPD assembly left imaginary residue " + std::to_string(max_imag) +
                           "; coefficient set is inconsistent with a Hermitian operator");
    return out;
}

QPDGrid qpd_from_probabilities(const ProbabilityGrid& p, int s, const SphereGrid& out_grid) {
    const HalfInteger j = p.j;
    const int lmax = j.twice();
    const auto mu_den = checked_denominators(j, p.mu);
    const auto factor = qpd_weight_factors(j, s);

    // kernel coefficients (2l+1)/(2j+1) * <j,j;l,0|j,j>^{-s} / <j,mu;l,0|j,mu>
    std::vector<double> kernel_coeff(lmax + 1);
    for (int l = 0; l <= lmax; ++l)
        kernel_coeff[l] = (2.0 * l + 1.0) / (j.twice() + 1.0) * factor[l] / mu_den[l];

    QPDGrid out{out_grid, j, s, {}};
    out.values.reserve(out_grid.size());
    const double scale = (j.twice() + 1.0) / kFourPi;
    for (const auto& n : out_grid.points) {
        double acc = 0.0;
        for (std::size_t i = 0; i < p.grid.size(); ++i) {
            const double x = std::clamp(n.dot(p.grid.points[i]), -1.0, 1.0);
            const auto pl = legendre_all(lmax, x);
            double kernel = 0.0;
            for (int l = 0; l <= lmax; ++l) kernel += kernel_coeff[l] * pl[l];
            acc += p.grid.weights[i] * kernel * p.values[i];
        }
        out.values.push_back(scale * acc);
    }
    return out;
}

double q_function(const DensityMatrix& rho, const SpherePoint& n) {
    const StateVector coherent = make_coherent(rho.j, n);
    return (coherent.amplitudes.adjoint() * rho.matrix * coherent.amplitudes)(0, 0).real();
}

double glauber_p_check(const DensityMatrix& rho, const QPDGrid& p_grid) {
    if (p_grid.s != 1)
        throw std::domain_error("glauber_p_check expects the s = +1 symbol");
    if (p_grid.j != rho.j) throw std::domain_error("glauber_p_check: j mismatch");
    const int dim = dimension(rho.j);
    Eigen::MatrixXcd assembled = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::size_t i = 0; i < p_grid.grid.size(); ++i) {
        const StateVector coherent = make_coherent(rho.j, p_grid.grid.points[i]);
        assembled += p_grid.grid.weights[i] * p_grid.values[i] *
                     (coherent.amplitudes * coherent.amplitudes.adjoint());
    }
    assembled *= (rho.j.twice() + 1.0) / kFourPi;
    return (assembled - rho.matrix).cwiseAbs().maxCoeff();
}

double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
    require_same_j(a, b);
    const Eigen::MatrixXcd sqrt_a = hermitian_sqrt(a.matrix);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sqrt_a * b.matrix * sqrt_a,
                                                           Eigen::EigenvaluesOnly);
    double root_sum = 0.0;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        const double lam = solver.eigenvalues()(i);
        if (lam > 0.0) root_sum += std::sqrt(lam);
    }
    return root_sum * root_sum;
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    require_same_j(a, b);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a.matrix - b.matrix,
                                                           Eigen::EigenvaluesOnly);
    return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

double max_abs_diff(const DensityMatrix& a, const DensityMatrix& b) {
    require_same_j(a, b);
    return (a.matrix - b.matrix).cwiseAbs().maxCoeff();
}

DensityMatrix project_to_physical(const DensityMatrix& rho_hat) {
    const Eigen::MatrixXcd herm = 0.5 * (rho_hat.matrix + rho_hat.matrix.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm);
    Eigen::VectorXd lam = solver.eigenvalues().cwiseMax(0.0);
    const double total = lam.sum();
    if (total <= 0.0)
        throw NumericError("project_to_physical: estimate has no positive spectral weight");
    lam /= total;
    return DensityMatrix{rho_hat.j,
                         solver.eigenvectors() * lam.asDiagonal() * solver.eigenvectors().adjoint()};
}

} // namespace spintomo
