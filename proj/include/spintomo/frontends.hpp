#pragma once

#include <cstdint>
#include <map>
#include <tuple>
#include <vector>

#include "spintomo/half_integer.hpp"
#include "spintomo/measure.hpp"
#include "spintomo/reconstruction.hpp"
#include "spintomo/sphere.hpp"
#include "spintomo/states.hpp"
#include "spintomo/su2_math.hpp"

namespace spintomo {

// Ramsey spectroscopy settings. Angles produced: theta_2 = omega2 * t_theta
// (second clock pulse), precession phase = (omega0 - omega) * T.
struct RamseyParams {
    double omega0 = 0.0;  // transition frequency, rad/s
    double omega = 0.0;   // drive frequency, rad/s
    double T = 0.0;       // free precession time, s
    double omega2 = 0.0;  // second-pulse Rabi frequency, rad/s
    double t_theta = 0.0; // pulse duration, s
    bool first_pulse_on = false;
};

// Mach-Zehnder settings; reconstruction mode removes the first splitter.
struct InterferometerParams {
    double transmittance1 = 1.0;
    double transmittance2 = 1.0;
    double phase1 = 0.0;
    double phase2 = 0.0;
    bool first_splitter_present = false;
};

// Two-mode trapped-ion settings. Raman beat with Phi = pi/2 realizes the
// J_y beam-splitter pulse; free evolution realizes the J_z phase.
struct IonParams {
    double kappa = 0.0;  // Raman Rabi coupling, rad/s
    double eta1 = 0.0;   // Lamb-Dicke parameters
    double eta2 = 0.0;
    double Omega1 = 0.0; // trap frequencies, rad/s
    double Omega2 = 0.0;
    double t_theta = 0.0;
    double T_free = 0.0;
    double Phi = 1.5707963267948966; // Raman phase difference
};

// Displacement points realized by each apparatus (canonicalized angles).
// Ramsey with the first pulse on and an interferometer with the first
// splitter present raise ProtocolError.
SpherePoint ramsey_displacement(const RamseyParams& p);
SpherePoint interferometer_displacement(const InterferometerParams& p);
SpherePoint ion_displacement(const IonParams& p);

// Schroedinger-picture operator V applied by the apparatus, rho -> V rho V^dag.
// For a valid reconstruction configuration V equals g^dag(n) up to a global
// phase, with n the corresponding *_displacement output.
ComplexMatrix ramsey_unitary(HalfInteger j, const RamseyParams& p);
ComplexMatrix interferometer_unitary(HalfInteger j, const InterferometerParams& p);
ComplexMatrix ion_unitary(HalfInteger j, const IonParams& p);

// Inverse maps: adjust the free knobs of a base parameter set so the
// apparatus realizes the displacement n (Ramsey: T and t_theta; MZ:
// transmittance2 and phase2; ion: t_theta and T_free).
RamseyParams ramsey_knobs_for(const SpherePoint& n, const RamseyParams& base);
InterferometerParams interferometer_knobs_for(const SpherePoint& n,
                                              const InterferometerParams& base);
IonParams ion_knobs_for(const SpherePoint& n, const IonParams& base);

bool ion_in_lamb_dicke_regime(const IonParams& p);

// |j,mu> = |j+mu>_1 (x) |j-mu>_2 in two-mode Fock terms.
std::pair<HalfInteger, HalfInteger> fock_to_su2(int n1, int n2);
std::pair<int, int> su2_to_fock(HalfInteger j, HalfInteger mu);

// Two-mode state grouped into fixed photon-number blocks, keyed by 2j. Each
// block is a unit-trace density operator on its H_j (pure inputs become
// projectors); weights sum to 1. Relative phases between blocks are preserved
// in the input amplitudes but are not recoverable by the protocol.
struct TwoModeState {
    std::map<int, DensityMatrix> blocks;
    std::map<int, double> weights;
};

struct FockAmplitude {
    int n1 = 0;
    int n2 = 0;
    Complex amplitude;
};

TwoModeState decompose_two_mode(const std::vector<FockAmplitude>& amplitudes);

// Joint sampling of (photon sum N = 2j, readout mu): per point, shots are
// multinomially allocated to blocks by weight, then each block draws its
// displaced-projector outcomes. Returned records have varying row totals
// (shots_per_point = 0). Streams depend only on (seed, point, block).
std::map<int, MeasurementRecord> sample_two_mode(const TwoModeState& state,
                                                 const SphereGrid& grid, long long shots,
                                                 std::uint64_t seed);

struct BlockReconstruction {
    bool reconstructed = false;
    DensityMatrix rho_hat;
    double fidelity = 0.0;
    double trace_distance = 1.0;
    double max_abs_diff = 1.0;
    double weight_true = 0.0;
    double weight_estimate = 0.0;
    long long total_counts = 0;
};

// Joint (photon sum, photon difference) measurement simulation followed by
// per-block inversion. shots == 0 runs the exact pipeline. Block allocation
// per point is multinomially thinned by block weight; blocks that receive no
// counts are reported unreconstructed rather than raising.
std::map<int, BlockReconstruction> blockwise_reconstruct(const TwoModeState& state,
                                                         const SphereGrid& grid,
                                                         long long shots,
                                                         std::uint64_t seed);

// Jaynes-Cummings population readout model.
struct JCReadoutParams {
    double omega0 = 1.0;        // base Rabi frequency, Omega_{n,n+1} = omega0*sqrt(n+1)
    double gamma0 = 0.0;        // decay scale, gamma_n = gamma0*(n+1)^0.7
    std::vector<double> gammas; // optional per-n override
    std::vector<double> rabi;   // optional per-n override of Omega_{n,n+1}
    std::vector<double> times;  // strictly increasing sample times, s
    int n_max = 0;

    double rabi_for(int n) const;
    double gamma_for(int n) const;
    void validate() const;
};

// P_-(t) = (1/2)[1 + sum_n P_n cos(2 Omega_{n,n+1} t) exp(-gamma_n t)].
std::vector<double> jc_signal(const std::vector<double>& populations,
                              const JCReadoutParams& p);

struct JCInversion {
    std::vector<double> populations;
    double residual_norm = 0.0;
    double condition_number = 0.0;
};

// Nonnegative least-squares fit of the level populations to the cosine-decay
// model (plain least squares available for diagnostics). Throws NumericError
// when the design matrix condition number exceeds 1e10.
JCInversion jc_invert(const std::vector<double>& signal, const JCReadoutParams& p,
                      bool nonnegative = true);

// Mean output observable <J_z,out> under U = e^{i t1 Jy} e^{i phi Jz} e^{i t2 Jy}.
double jz_out_mean(const DensityMatrix& rho, double theta1, double theta2, double phi);

// Phase estimation uncertainty Delta(phi) = Delta(J_z,out)/|d<J_z,out>/dphi|
// with the derivative evaluated analytically in commutator form. Throws
// NumericError at stationary points of the mean signal.
double phase_uncertainty(const DensityMatrix& rho, double theta1, double theta2, double phi);

} // namespace spintomo
