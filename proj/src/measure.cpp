#include "spintomo/measure.hpp"

#include <stdexcept>

#include "spintomo/rng.hpp"
#include "spintomo/su2_math.hpp"

namespace spintomo {

DensityMatrix displace(const DensityMatrix& rho, const SpherePoint& n) {
    const ComplexMatrix g = rotation_operator(rho.j, n);
    return DensityMatrix{rho.j, g.adjoint() * rho.matrix * g};
}

Eigen::VectorXd displaced_probabilities(const DensityMatrix& rho, const SpherePoint& n) {
    const ComplexMatrix g = rotation_operator(rho.j, n);
    Eigen::VectorXd p = (g.adjoint() * rho.matrix * g).diagonal().real();
    // clip eigensolver-scale negatives so downstream samplers see probabilities
    for (Eigen::Index i = 0; i < p.size(); ++i)
        if (p(i) < 0.0 && p(i) > -1e-12) p(i) = 0.0;
    return p;
}

ProbabilityGrid exact_probability_grid(const DensityMatrix& rho, const SphereGrid& grid,
                                       HalfInteger mu) {
    const int row = index_of(rho.j, mu);
    ProbabilityGrid p{grid, rho.j, mu, {}, 0, {}};
    p.values.reserve(grid.size());
    for (const auto& point : grid.points)
        p.values.push_back(displaced_probabilities(rho, point)(row));
    return p;
}

MeasurementRecord sample_measurements(const DensityMatrix& rho, const SphereGrid& grid,
                                      long long shots, std::uint64_t seed) {
    if (shots < 1) throw std::domain_error("sample_measurements: shots must be >= 1");
    const int dim = dimension(rho.j);
    MeasurementRecord rec{grid, rho.j,
                          Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>(
                              static_cast<Eigen::Index>(grid.size()), dim),
                          shots, seed};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Eigen::VectorXd p = displaced_probabilities(rho, grid.points[i]);
        // stream id (seed, point, 0x100 + 2j): shared with the blockwise
        // sampler so a single-block record coincides with this one
        auto gen = rng::stream(seed, i, 0x100 + static_cast<std::uint64_t>(rho.j.twice()));
        const auto counts = rng::multinomial(gen, shots, {p.data(), static_cast<std::size_t>(p.size())});
        for (int k = 0; k < dim; ++k) rec.counts(static_cast<Eigen::Index>(i), k) = counts[k];
    }
    return rec;
}

ProbabilityGrid record_to_probability_grid(const MeasurementRecord& rec, HalfInteger mu) {
    const int col = index_of(rec.j, mu);
    ProbabilityGrid p{rec.grid, rec.j, mu, {}, rec.shots_per_point, {}};
    p.values.reserve(rec.grid.size());
    p.row_shots.reserve(rec.grid.size());
    for (Eigen::Index i = 0; i < rec.counts.rows(); ++i) {
        const long long total = rec.row_total(i);
        p.row_shots.push_back(total);
        p.values.push_back(total > 0 ? static_cast<double>(rec.counts(i, col)) /
                                           static_cast<double>(total)
                                     : 0.0);
    }
    return p;
}

} // namespace spintomo
