#pragma once

#include <vector>

#include "spintomo/half_integer.hpp"
#include "spintomo/measure.hpp"
#include "spintomo/states.hpp"
#include "spintomo/su2_math.hpp"

namespace spintomo {

// Multipole (tensor-operator) expansion coefficients R_lm of a spin-j
// operator, 0 <= l <= 2j, |m| <= l, stored at index l*l + l + m.
struct MultipoleCoefficients {
    HalfInteger j;
    std::vector<Complex> values;

    static MultipoleCoefficients zero(HalfInteger j);
    int lmax() const { return j.twice(); }
    Complex& at(int l, int m);
    Complex at(int l, int m) const;
};

// s-parametrized quasiprobability values over a grid; s in {-1, 0, +1} for
// the Husimi, Wigner and Glauber-Sudarshan symbols respectively.
struct QPDGrid {
    SphereGrid grid;
    HalfInteger j;
    int s = 0;
    std::vector<double> values;
};

// R_lm = Tr(rho D_lm^dagger).
MultipoleCoefficients multipoles_from_density(const DensityMatrix& rho);

// rho = sum_lm R_lm D_lm. The result is a raw assembly; run validate_density
// (or project_to_physical) when a physical state is required.
DensityMatrix density_from_multipoles(const MultipoleCoefficients& R);

// Quadrature inversion of the measured distribution:
// R_lm = sqrt((2j+1)/4pi)/<j,mu;l,0|j,mu> * sum_i w_i p(n_i) Y*_lm(n_i).
// Throws NumericError when any readout denominator vanishes (listing the
// offending l) or when the grid fails the degree-4j exactness test.
MultipoleCoefficients multipoles_from_probabilities(const ProbabilityGrid& p);

// P(n;s) = sum_lm sqrt(4pi/(2j+1)) <j,j;l,0|j,j>^{-s} R_lm Y_lm(n).
// Throws NumericError when the assembled values carry imaginary residue
// above 1e-10 (inconsistent coefficient set).
QPDGrid qpd_from_multipoles(const MultipoleCoefficients& R, int s, const SphereGrid& grid);

// Direct kernel route, P(n;s) = (2j+1)/(4pi) sum_i w_i K_{mu,s}(n, n_i) p(n_i)
// with the Legendre-series kernel.
QPDGrid qpd_from_probabilities(const ProbabilityGrid& p, int s, const SphereGrid& out_grid);

// Husimi value Q(n) = <j;n| rho |j;n>.
double q_function(const DensityMatrix& rho, const SpherePoint& n);

// Reassembles rho from its Glauber-Sudarshan symbol by quadrature,
// rho' = (2j+1)/(4pi) sum_i w_i P(n_i) |j;n_i><j;n_i|, and returns
// max |rho' - rho|.
double glauber_p_check(const DensityMatrix& rho, const QPDGrid& p_grid);

// Uhlmann fidelity (Tr sqrt(sqrt(a) b sqrt(a)))^2.
double fidelity(const DensityMatrix& a, const DensityMatrix& b);

// (1/2) Tr |a - b|.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

double max_abs_diff(const DensityMatrix& a, const DensityMatrix& b);

// Projection of an estimate onto the physical cone: Hermitize, clip negative
// eigenvalues, renormalize the trace. Opt-in; never applied silently.
DensityMatrix project_to_physical(const DensityMatrix& rho_hat);

// Readout denominators <j,mu;l,0|j,mu> for l = 0..2j.
std::vector<double> readout_denominators(HalfInteger j, HalfInteger mu);

// l values whose readout denominator vanishes (|CG| < tol); empty means the
// readout index supports full inversion.
std::vector<int> vanishing_denominators(HalfInteger j, HalfInteger mu, double tol = 1e-12);

} // namespace spintomo
