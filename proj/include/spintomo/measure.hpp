#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "spintomo/half_integer.hpp"
#include "spintomo/sphere.hpp"
#include "spintomo/states.hpp"

namespace spintomo {

// Measured (or exactly evaluated) values of p_mu(n_i) across a grid for one
// fixed readout index mu. shots_per_point == 0 marks exact values. Thinned
// records (two-mode blocks) carry per-point totals in row_shots; it is empty
// when every point received shots_per_point shots.
struct ProbabilityGrid {
    SphereGrid grid;
    HalfInteger j;
    HalfInteger mu;
    std::vector<double> values;
    long long shots_per_point = 0;
    std::vector<long long> row_shots;
};

// Raw simulated counts: one row per grid point, one column per outcome mu
// (ordered mu = j ... -j). Row sums equal shots_per_point except for thinned
// two-mode block records, where shots_per_point is 0 and the row sums vary.
struct MeasurementRecord {
    SphereGrid grid;
    HalfInteger j;
    Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic> counts;
    long long shots_per_point = 0;
    std::uint64_t seed = 0;

    long long row_total(Eigen::Index row) const { return counts.row(row).sum(); }
};

// rho(n) = g^-1(n) rho g(n).
DensityMatrix displace(const DensityMatrix& rho, const SpherePoint& n);

// All displaced-projector probabilities p_mu(n) = <j,mu| g^dag rho g |j,mu>,
// ordered mu = j ... -j. Entries sum to 1.
Eigen::VectorXd displaced_probabilities(const DensityMatrix& rho, const SpherePoint& n);

// Exact p_mu over a grid.
ProbabilityGrid exact_probability_grid(const DensityMatrix& rho, const SphereGrid& grid,
                                       HalfInteger mu);

// Per-point multinomial sampling of the displaced-projector outcomes. The
// stream for point i depends only on (seed, i), so records are reproducible
// regardless of evaluation order.
MeasurementRecord sample_measurements(const DensityMatrix& rho, const SphereGrid& grid,
                                      long long shots, std::uint64_t seed);

// Empirical frequencies counts(mu) / row total for one readout index; points
// with no shots get value 0.
ProbabilityGrid record_to_probability_grid(const MeasurementRecord& rec, HalfInteger mu);

} // namespace spintomo
