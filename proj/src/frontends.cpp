#include "spintomo/frontends.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "spintomo/errors.hpp"
#include "spintomo/rng.hpp"

namespace spintomo {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_two_pi(double angle) {
    double w = std::fmod(angle, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    if (w >= kTwoPi) w = 0.0;
    return w;
}

// exp(-i vartheta J_y) exp(-i phi J_z): the Schroedinger operator shared by
// the Ramsey and Mach-Zehnder sequences (z precession first, y pulse second).
ComplexMatrix y_after_z(HalfInteger j, double vartheta, double phi) {
    const int dim = dimension(j);
    const RealMatrix d = wigner_d(j, vartheta);
    ComplexMatrix v(dim, dim);
    for (int row = 0; row < dim; ++row)
        for (int col = 0; col < dim; ++col) {
            const double m = 0.5 * (j.twice() - 2 * col);
            v(row, col) = d(row, col) * std::polar(1.0, -m * phi);
        }
    return v;
}

// Shortest nonnegative duration with rate * t == target (mod 2pi).
double positive_duration(double target, double rate) {
    const double wrapped = wrap_two_pi(rate >= 0.0 ? target : -target);
    if (rate == 0.0) {
        if (wrapped > 1e-12 && kTwoPi - wrapped > 1e-12)
            throw ProtocolError("zero rotation rate cannot realize the requested phase angle");
        return 0.0;
    }
    return wrapped / std::abs(rate);
}

void validate_ramsey(const RamseyParams& p) {
    if (p.T < 0.0 || p.t_theta < 0.0)
        throw std::domain_error("RamseyParams: durations must be nonnegative");
}

void validate_interferometer(const InterferometerParams& p) {
    if (p.transmittance1 < 0.0 || p.transmittance1 > 1.0 || p.transmittance2 < 0.0 ||
        p.transmittance2 > 1.0)
        throw std::domain_error("InterferometerParams: transmittances must lie in [0, 1]");
}

void validate_ion(const IonParams& p) {
    if (p.Omega1 == p.Omega2)
        throw std::domain_error("IonParams: trap frequencies must differ");
    if (std::abs(p.Phi - 0.5 * kPi) > 1e-12)
        throw ProtocolError("ion frontend supports only Phi = pi/2 (J_y beam-splitter pulse)");
}

} // namespace

SpherePoint ramsey_displacement(const RamseyParams& p) {
    validate_ramsey(p);
    if (p.first_pulse_on)
        throw ProtocolError("reconstruction requires the first Ramsey pulse off (theta_1 = 0)");
    const double vartheta2 = p.omega2 * p.t_theta;
    const double phi = (p.omega0 - p.omega) * p.T;
    return SpherePoint::canonical(-vartheta2, -phi);
}

ComplexMatrix ramsey_unitary(HalfInteger j, const RamseyParams& p) {
    validate_ramsey(p);
    if (p.first_pulse_on)
        throw ProtocolError("reconstruction requires the first Ramsey pulse off (theta_1 = 0)");
    return y_after_z(j, p.omega2 * p.t_theta, (p.omega0 - p.omega) * p.T);
}

SpherePoint interferometer_displacement(const InterferometerParams& p) {
    validate_interferometer(p);
    if (p.first_splitter_present)
        throw ProtocolError("reconstruction requires removing the first beam splitter");
    const double vartheta2 = 2.0 * std::acos(std::sqrt(p.transmittance2));
    const double phi = p.phase2 - p.phase1;
    return SpherePoint::canonical(-vartheta2, -phi);
}

ComplexMatrix interferometer_unitary(HalfInteger j, const InterferometerParams& p) {
    validate_interferometer(p);
    if (p.first_splitter_present)
        throw ProtocolError("reconstruction requires removing the first beam splitter");
    return y_after_z(j, 2.0 * std::acos(std::sqrt(p.transmittance2)), p.phase2 - p.phase1);
}

SpherePoint ion_displacement(const IonParams& p) {
    validate_ion(p);
    const double theta = 2.0 * p.kappa * p.eta1 * p.eta2 * p.t_theta;
    const double phi = (p.Omega2 - p.Omega1) * p.T_free;
    return SpherePoint::canonical(theta, phi);
}

ComplexMatrix ion_unitary(HalfInteger j, const IonParams& p) {
    validate_ion(p);
    // U_y(theta) U_z(phi) with positive exponents, applied z first
    const double theta = 2.0 * p.kappa * p.eta1 * p.eta2 * p.t_theta;
    const double phi = (p.Omega2 - p.Omega1) * p.T_free;
    return y_after_z(j, -theta, -phi);
}

RamseyParams ramsey_knobs_for(const SpherePoint& n, const RamseyParams& base) {
    validate_ramsey(base);
    if (base.first_pulse_on)
        throw ProtocolError("reconstruction requires the first Ramsey pulse off (theta_1 = 0)");
    RamseyParams p = base;
    const double detuning = p.omega0 - p.omega;
    double phi_raw; // value of -(omega0 - omega) T to realize
    if (n.theta == 0.0) {
        p.t_theta = 0.0;
        phi_raw = n.phi;
    } else if (p.omega2 == 0.0) {
        throw ProtocolError("omega2 = 0 cannot realize theta > 0");
    } else if (p.omega2 > 0.0) {
        // theta_raw = -omega2 t < 0 flips the azimuth by pi
        p.t_theta = n.theta / p.omega2;
        phi_raw = n.phi - kPi;
    } else {
        p.t_theta = n.theta / -p.omega2;
        phi_raw = n.phi;
    }
    p.T = positive_duration(-phi_raw, detuning);
    return p;
}

InterferometerParams interferometer_knobs_for(const SpherePoint& n,
                                              const InterferometerParams& base) {
    validate_interferometer(base);
    if (base.first_splitter_present)
        throw ProtocolError("reconstruction requires removing the first beam splitter");
    InterferometerParams p = base;
    p.transmittance2 = std::cos(0.5 * n.theta) * std::cos(0.5 * n.theta);
    const double phi_raw = (n.theta == 0.0) ? n.phi : n.phi - kPi;
    p.phase2 = p.phase1 - phi_raw;
    return p;
}

IonParams ion_knobs_for(const SpherePoint& n, const IonParams& base) {
    validate_ion(base);
    IonParams p = base;
    const double coupling = 2.0 * p.kappa * p.eta1 * p.eta2;
    double phi_raw;
    if (n.theta == 0.0) {
        p.t_theta = 0.0;
        phi_raw = n.phi;
    } else if (coupling == 0.0) {
        throw ProtocolError("vanishing Raman coupling cannot realize theta > 0");
    } else if (coupling > 0.0) {
        p.t_theta = n.theta / coupling;
        phi_raw = n.phi;
    } else {
        p.t_theta = n.theta / -coupling;
        phi_raw = n.phi - kPi;
    }
    p.T_free = positive_duration(phi_raw, p.Omega2 - p.Omega1);
    return p;
}

bool ion_in_lamb_dicke_regime(const IonParams& p) {
    return std::abs(p.eta1) <= 0.3 && std::abs(p.eta2) <= 0.3;
}

std::pair<HalfInteger, HalfInteger> fock_to_su2(int n1, int n2) {
    if (n1 < 0 || n2 < 0) throw std::domain_error("fock_to_su2: photon numbers must be >= 0");
    return {HalfInteger::from_twice(n1 + n2), HalfInteger::from_twice(n1 - n2)};
}

std::pair<int, int> su2_to_fock(HalfInteger j, HalfInteger mu) {
    require_projection(j, mu);
    return {(j.twice() + mu.twice()) / 2, (j.twice() - mu.twice()) / 2};
}

TwoModeState decompose_two_mode(const std::vector<FockAmplitude>& amplitudes) {
    double norm2 = 0.0;
    for (const auto& a : amplitudes) norm2 += std::norm(a.amplitude);
    if (std::abs(norm2 - 1.0) > 1e-12)
        throw std::domain_error("decompose_two_mode: input amplitudes are not normalized");

    std::map<int, Eigen::VectorXcd> raw;
    for (const auto& a : amplitudes) {
        if (a.n1 < 0 || a.n2 < 0)
            throw std::domain_error("decompose_two_mode: photon numbers must be >= 0");
        const int two_j = a.n1 + a.n2;
        auto [it, inserted] = raw.try_emplace(two_j, Eigen::VectorXcd::Zero(two_j + 1));
        it->second(a.n2) += a.amplitude; // index j - mu = n2
    }

    TwoModeState state;
    for (auto& [two_j, amps] : raw) {
        const double weight = amps.squaredNorm();
        if (weight <= 0.0) continue;
        const HalfInteger j = HalfInteger::from_twice(two_j);
        state.blocks.emplace(two_j, pure_density(make_superposition(j, amps)));
        state.weights.emplace(two_j, weight);
    }
    if (state.blocks.empty()) throw std::domain_error("decompose_two_mode: no nonzero amplitudes");
    return state;
}

std::map<int, MeasurementRecord> sample_two_mode(const TwoModeState& state,
                                                 const SphereGrid& grid, long long shots,
                                                 std::uint64_t seed) {
    if (state.blocks.empty()) throw std::domain_error("sample_two_mode: state has no blocks");
    if (shots < 1) throw std::domain_error("sample_two_mode: shots must be >= 1");
    const std::size_t npoints = grid.size();

    std::vector<int> block_keys;
    std::vector<double> block_weights;
    for (const auto& [two_j, w] : state.weights) {
        block_keys.push_back(two_j);
        block_weights.push_back(w);
    }

    std::map<int, MeasurementRecord> records;
    for (int two_j : block_keys) {
        MeasurementRecord rec{grid, HalfInteger::from_twice(two_j),
                              Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>::Zero(
                                  static_cast<Eigen::Index>(npoints), two_j + 1),
                              0, seed};
        records.emplace(two_j, std::move(rec));
    }

    for (std::size_t i = 0; i < npoints; ++i) {
        auto alloc_gen = rng::stream(seed, i, 0);
        const auto allocation = rng::multinomial(alloc_gen, shots, block_weights);
        for (std::size_t bi = 0; bi < block_keys.size(); ++bi) {
            const int two_j = block_keys[bi];
            const long long s = allocation[bi];
            if (s == 0) continue;
            const Eigen::VectorXd p =
                displaced_probabilities(state.blocks.at(two_j), grid.points[i]);
            auto gen = rng::stream(seed, i, 0x100 + static_cast<std::uint64_t>(two_j));
            const auto c = rng::multinomial(gen, s, {p.data(), static_cast<std::size_t>(p.size())});
            for (std::size_t k = 0; k < c.size(); ++k)
                records.at(two_j).counts(static_cast<Eigen::Index>(i),
                                         static_cast<Eigen::Index>(k)) = c[k];
        }
    }
    // a single block always receives every shot, matching sample_measurements
    if (block_keys.size() == 1) records.begin()->second.shots_per_point = shots;
    return records;
}

std::map<int, BlockReconstruction> blockwise_reconstruct(const TwoModeState& state,
                                                         const SphereGrid& grid,
                                                         long long shots,
                                                         std::uint64_t seed) {
    if (state.blocks.empty())
        throw std::domain_error("blockwise_reconstruct: state has no blocks");
    const std::size_t npoints = grid.size();

    std::map<int, BlockReconstruction> results;
    if (shots == 0) {
        for (const auto& [two_j, rho] : state.blocks) {
            const HalfInteger j = HalfInteger::from_twice(two_j);
            BlockReconstruction block;
            block.weight_true = state.weights.at(two_j);
            block.weight_estimate = block.weight_true;
            const auto p = exact_probability_grid(rho, grid, j);
            const DensityMatrix estimate = density_from_multipoles(multipoles_from_probabilities(p));
            block.rho_hat = estimate;
            block.fidelity = spintomo::fidelity(rho, estimate);
            block.trace_distance = spintomo::trace_distance(rho, estimate);
            block.max_abs_diff = spintomo::max_abs_diff(rho, estimate);
            block.reconstructed = true;
            results.emplace(two_j, std::move(block));
        }
        return results;
    }

    const auto records = sample_two_mode(state, grid, shots, seed);
    const double total_shots = static_cast<double>(shots) * static_cast<double>(npoints);
    for (const auto& [two_j, rec] : records) {
        const HalfInteger j = HalfInteger::from_twice(two_j);
        const auto& rho = state.blocks.at(two_j);
        BlockReconstruction block;
        block.weight_true = state.weights.at(two_j);
        block.total_counts = rec.counts.sum();
        block.weight_estimate = static_cast<double>(block.total_counts) / total_shots;
        if (block.total_counts == 0) {
            block.reconstructed = false;
            block.rho_hat =
                DensityMatrix{j, Eigen::MatrixXcd::Zero(dimension(j), dimension(j))};
            results.emplace(two_j, std::move(block));
            continue;
        }
        const ProbabilityGrid p = record_to_probability_grid(rec, j);
        const DensityMatrix estimate = density_from_multipoles(multipoles_from_probabilities(p));
        block.rho_hat = estimate;
        block.fidelity = spintomo::fidelity(rho, estimate);
        block.trace_distance = spintomo::trace_distance(rho, estimate);
        block.max_abs_diff = spintomo::max_abs_diff(rho, estimate);
        block.reconstructed = true;
        results.emplace(two_j, std::move(block));
    }
    return results;
}

double JCReadoutParams::rabi_for(int n) const {
    if (!rabi.empty()) return rabi.at(static_cast<std::size_t>(n));
    return omega0 * std::sqrt(n + 1.0);
}

double JCReadoutParams::gamma_for(int n) const {
    if (!gammas.empty()) return gammas.at(static_cast<std::size_t>(n));
    return gamma0 * std::pow(n + 1.0, 0.7);
}

void JCReadoutParams::validate() const {
    if (n_max < 0) throw std::domain_error("JCReadoutParams: n_max must be >= 0");
    if (times.empty()) throw std::domain_error("JCReadoutParams: no sample times");
    if (times.front() < 0.0) throw std::domain_error("JCReadoutParams: times must be >= 0");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (times[i] <= times[i - 1])
            throw std::domain_error("JCReadoutParams: times must be strictly increasing");
    const auto n_levels = static_cast<std::size_t>(n_max) + 1;
    if (!gammas.empty() && gammas.size() < n_levels)
        throw std::domain_error("JCReadoutParams: gamma override shorter than n_max+1");
    if (!rabi.empty() && rabi.size() < n_levels)
        throw std::domain_error("JCReadoutParams: Rabi override shorter than n_max+1");
}

std::vector<double> jc_signal(const std::vector<double>& populations, const JCReadoutParams& p) {
    p.validate();
    if (populations.size() != static_cast<std::size_t>(p.n_max) + 1)
        throw std::domain_error("jc_signal: populations must have length n_max+1");
    double total = 0.0;
    for (double pn : populations) {
        if (pn < 0.0) throw std::domain_error("jc_signal: negative population");
        total += pn;
    }
    if (total > 1.0 + 1e-12) throw std::domain_error("jc_signal: populations sum above 1");

    std::vector<double> signal;
    signal.reserve(p.times.size());
    for (double t : p.times) {
        double acc = 1.0;
        for (int n = 0; n <= p.n_max; ++n)
            acc += populations[static_cast<std::size_t>(n)] *
                   std::cos(2.0 * p.rabi_for(n) * t) * std::exp(-p.gamma_for(n) * t);
        signal.push_back(0.5 * acc);
    }
    return signal;
}

namespace {

// Lawson-Hanson active-set nonnegative least squares
Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
    const Eigen::Index ncols = a.cols();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(ncols);
    std::vector<bool> passive(static_cast<std::size_t>(ncols), false);
    const double tol = 1e-12 * a.cwiseAbs().maxCoeff() * b.cwiseAbs().maxCoeff();

    for (int outer = 0; outer < 8 * static_cast<int>(ncols) + 8; ++outer) {
        const Eigen::VectorXd w = a.transpose() * (b - a * x);
        Eigen::Index best = -1;
        double best_w = tol;
        for (Eigen::Index i = 0; i < ncols; ++i)
            if (!passive[static_cast<std::size_t>(i)] && w(i) > best_w) {
                best_w = w(i);
                best = i;
            }
        if (best < 0) break;
        passive[static_cast<std::size_t>(best)] = true;

        for (int inner = 0; inner < 8 * static_cast<int>(ncols) + 8; ++inner) {
            std::vector<Eigen::Index> idx;
            for (Eigen::Index i = 0; i < ncols; ++i)
                if (passive[static_cast<std::size_t>(i)]) idx.push_back(i);
            if (idx.empty()) break;
            Eigen::MatrixXd ap(a.rows(), static_cast<Eigen::Index>(idx.size()));
            for (std::size_t k = 0; k < idx.size(); ++k) ap.col(static_cast<Eigen::Index>(k)) = a.col(idx[k]);
            const Eigen::VectorXd zp = ap.colPivHouseholderQr().solve(b);

            if (zp.minCoeff() > 0.0) {
                x.setZero();
                for (std::size_t k = 0; k < idx.size(); ++k) x(idx[k]) = zp(static_cast<Eigen::Index>(k));
                break;
            }
            double alpha = 1.0;
            for (std::size_t k = 0; k < idx.size(); ++k) {
                const double z = zp(static_cast<Eigen::Index>(k));
                if (z <= 0.0) {
                    const double xi = x(idx[k]);
                    if (xi - z > 0.0) alpha = std::min(alpha, xi / (xi - z));
                }
            }
            for (std::size_t k = 0; k < idx.size(); ++k) {
                const Eigen::Index i = idx[k];
                x(i) += alpha * (zp(static_cast<Eigen::Index>(k)) - x(i));
                if (x(i) <= 1e-14) {
                    x(i) = 0.0;
                    passive[static_cast<std::size_t>(i)] = false;
                }
            }
        }
    }
    return x;
}

} // namespace

JCInversion jc_invert(const std::vector<double>& signal, const JCReadoutParams& p,
                      bool nonnegative) {
    p.validate();
    if (signal.size() != p.times.size())
        throw std::domain_error("jc_invert: signal length must match times");
    if (p.times.size() < static_cast<std::size_t>(p.n_max) + 1)
        throw std::domain_error("jc_invert: need at least n_max+1 time samples");

    const auto rows = static_cast<Eigen::Index>(p.times.size());
    const Eigen::Index cols = p.n_max + 1;
    Eigen::MatrixXd design(rows, cols);
    Eigen::VectorXd target(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double t = p.times[static_cast<std::size_t>(i)];
        for (Eigen::Index n = 0; n < cols; ++n)
            design(i, n) = std::cos(2.0 * p.rabi_for(static_cast<int>(n)) * t) *
                           std::exp(-p.gamma_for(static_cast<int>(n)) * t);
        target(i) = 2.0 * signal[static_cast<std::size_t>(i)] - 1.0;
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(design);
    const double smin = svd.singularValues().minCoeff();
    const double cond = smin > 0.0 ? svd.singularValues().maxCoeff() / smin
                                   : std::numeric_limits<double>::infinity();
    if (cond > 1e10)
        throw NumericError("jc_invert: design matrix condition number " + std::to_string(cond) +
                           " exceeds 1e10; use a longer or denser time grid");

    JCInversion result;
    result.condition_number = cond;
    Eigen::VectorXd x;
    if (nonnegative) {
        x = nnls(design, target);
    } else {
        x = design.colPivHouseholderQr().solve(target);
    }
    result.residual_norm = (design * x - target).norm();
    result.populations.assign(x.data(), x.data() + x.size());
    return result;
}

double jz_out_mean(const DensityMatrix& rho, double theta1, double theta2, double phi) {
    const HalfInteger j = rho.j;
    const ComplexMatrix u1 = euler_rotation(j, 0.0, theta1, 0.0); // exp(i theta1 Jy)
    const ComplexMatrix u2 = euler_rotation(j, 0.0, theta2, 0.0);
    const ComplexMatrix uphi = euler_rotation(j, phi, 0.0, 0.0);  // exp(i phi Jz)
    const ComplexMatrix u = u1 * uphi * u2;
    const ComplexMatrix jz = jz_matrix(j);
    return (rho.matrix * (u * jz * u.adjoint())).trace().real();
}

double phase_uncertainty(const DensityMatrix& rho, double theta1, double theta2, double phi) {
    const HalfInteger j = rho.j;
    const ComplexMatrix u1 = euler_rotation(j, 0.0, theta1, 0.0);
    const ComplexMatrix u2 = euler_rotation(j, 0.0, theta2, 0.0);
    const ComplexMatrix uphi = euler_rotation(j, phi, 0.0, 0.0);
    const ComplexMatrix u = u1 * uphi * u2;
    const ComplexMatrix jz = jz_matrix(j);

    const ComplexMatrix out = u * jz * u.adjoint();
    const double mean = (rho.matrix * out).trace().real();
    const double second = (rho.matrix * out * out).trace().real();
    const double variance = std::max(0.0, second - mean * mean);

    // d/dphi (U Jz U^dag) = i [C, out] with C = U1 Jz U1^dag
    const ComplexMatrix c = u1 * jz * u1.adjoint();
    const ComplexMatrix derivative = Complex(0.0, 1.0) * (c * out - out * c);
    const double slope = (rho.matrix * derivative).trace().real();
    if (std::abs(slope) < 1e-12)
        throw NumericError("phase_uncertainty: <J_z,out> is stationary in phi here");
    return std::sqrt(variance) / std::abs(slope);
}

} // namespace spintomo
