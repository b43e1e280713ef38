#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spintomo/errors.hpp"
#include "spintomo/frontends.hpp"
#include "spintomo/io.hpp"
#include "spintomo/measure.hpp"
#include "spintomo/reconstruction.hpp"
#include "spintomo/states.hpp"
#include "spintomo/su2_math.hpp"

namespace py = pybind11;
using namespace spintomo;

namespace {

HalfInteger half(int twice) { return HalfInteger::from_twice(twice); }

DensityMatrix as_density(const Eigen::MatrixXcd& matrix) {
    if (matrix.rows() != matrix.cols() || matrix.rows() < 1)
        throw std::domain_error("density matrix must be square and nonempty");
    return DensityMatrix{half(static_cast<int>(matrix.rows()) - 1), matrix};
}

StateVector as_state(const Eigen::VectorXcd& amplitudes) {
    if (amplitudes.size() < 1) throw std::domain_error("state vector must be nonempty");
    return StateVector{half(static_cast<int>(amplitudes.size()) - 1), amplitudes};
}

MultipoleCoefficients as_multipoles(int two_j, const Eigen::VectorXcd& values) {
    MultipoleCoefficients coeffs = MultipoleCoefficients::zero(half(two_j));
    if (static_cast<std::size_t>(values.size()) != coeffs.values.size())
        throw std::domain_error("expected (2j+1)^2 multipole coefficients");
    for (Eigen::Index k = 0; k < values.size(); ++k)
        coeffs.values[static_cast<std::size_t>(k)] = values(k);
    return coeffs;
}

Eigen::VectorXcd multipoles_out(const MultipoleCoefficients& coeffs) {
    Eigen::VectorXcd values(static_cast<Eigen::Index>(coeffs.values.size()));
    for (std::size_t k = 0; k < coeffs.values.size(); ++k)
        values(static_cast<Eigen::Index>(k)) = coeffs.values[k];
    return values;
}

ProbabilityGrid as_probability_grid(const SphereGrid& grid, int two_j, int readout_two_mu,
                                    const std::vector<double>& values, long long shots) {
    if (values.size() != grid.size())
        throw std::domain_error("value count does not match the grid");
    return ProbabilityGrid{grid, half(two_j), half(readout_two_mu), values, shots, {}};
}

TwoModeState as_two_mode(const std::vector<std::tuple<int, int, Complex>>& amplitudes) {
    std::vector<FockAmplitude> fock;
    fock.reserve(amplitudes.size());
    for (const auto& [n1, n2, c] : amplitudes) fock.push_back({n1, n2, c});
    return decompose_two_mode(fock);
}

} // namespace

PYBIND11_MODULE(_spintomo, m) {
    m.doc() = "SU(2) phase-space quantum-state reconstruction";

    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception<ProtocolError>(m, "ProtocolError", PyExc_RuntimeError);

    py::class_<SpherePoint>(m, "SpherePoint")
        .def(py::init([](double theta, double phi) {
                 return SpherePoint::canonical(theta, phi);
             }),
             py::arg("theta"), py::arg("phi"))
        .def_readonly("theta", &SpherePoint::theta)
        .def_readonly("phi", &SpherePoint::phi)
        .def("antipode", &SpherePoint::antipode)
        .def("dot", &SpherePoint::dot)
        .def("__repr__", [](const SpherePoint& n) {
            return "SpherePoint(theta=" + std::to_string(n.theta) +
                   ", phi=" + std::to_string(n.phi) + ")";
        });

    py::class_<SphereGrid>(m, "SphereGrid")
        .def_readonly("points", &SphereGrid::points)
        .def_readonly("weights", &SphereGrid::weights)
        .def("weight_sum", &SphereGrid::weight_sum)
        .def("exact_to_degree", &SphereGrid::exact_to_degree, py::arg("degree"),
             py::arg("tol") = 1e-8)
        .def("__len__", &SphereGrid::size);

    // representation-theory primitives (quantum numbers as twice-values)
    m.def("clebsch_gordan",
          [](int two_j1, int two_m1, int two_j2, int two_m2, int two_j, int two_m) {
              return clebsch_gordan(half(two_j1), half(two_m1), half(two_j2), half(two_m2),
                                    half(two_j), half(two_m));
          },
          py::arg("two_j1"), py::arg("two_m1"), py::arg("two_j2"), py::arg("two_m2"),
          py::arg("two_j"), py::arg("two_m"));
    m.def("wigner_d", [](int two_j, double beta) { return wigner_d(half(two_j), beta); },
          py::arg("two_j"), py::arg("beta"));
    m.def("rotation_operator",
          [](int two_j, double theta, double phi) {
              return rotation_operator(half(two_j), SpherePoint{theta, phi});
          },
          py::arg("two_j"), py::arg("theta"), py::arg("phi"));
    m.def("euler_rotation",
          [](int two_j, double alpha, double beta, double gamma) {
              return euler_rotation(half(two_j), alpha, beta, gamma);
          },
          py::arg("two_j"), py::arg("alpha"), py::arg("beta"), py::arg("gamma"));
    m.def("tensor_operator",
          [](int two_j, int l, int mm) { return tensor_operator(half(two_j), l, mm); },
          py::arg("two_j"), py::arg("l"), py::arg("m"));
    m.def("spherical_harmonic",
          [](int l, int mm, double theta, double phi) {
              return spherical_harmonic(l, mm, SpherePoint{theta, phi});
          },
          py::arg("l"), py::arg("m"), py::arg("theta"), py::arg("phi"));
    m.def("legendre_p", &legendre_p, py::arg("l"), py::arg("x"));

    // states
    m.def("make_dicke",
          [](int two_j, int two_mu) { return make_dicke(half(two_j), half(two_mu)).amplitudes; },
          py::arg("two_j"), py::arg("two_mu"));
    m.def("make_coherent",
          [](int two_j, double theta, double phi) {
              return make_coherent(half(two_j), SpherePoint{theta, phi}).amplitudes;
          },
          py::arg("two_j"), py::arg("theta"), py::arg("phi"));
    m.def("make_superposition",
          [](const Eigen::VectorXcd& coeffs) {
              return make_superposition(half(static_cast<int>(coeffs.size()) - 1), coeffs)
                  .amplitudes;
          },
          py::arg("coefficients"));
    m.def("pure_density",
          [](const Eigen::VectorXcd& amplitudes) {
              return pure_density(as_state(amplitudes)).matrix;
          },
          py::arg("amplitudes"));
    m.def("make_mixture",
          [](const std::vector<std::pair<double, Eigen::MatrixXcd>>& components) {
              std::vector<MixtureComponent> comps;
              for (const auto& [weight, matrix] : components)
                  comps.push_back({weight, as_density(matrix)});
              return make_mixture(comps).matrix;
          },
          py::arg("components"));
    m.def("validate_density",
          [](const Eigen::MatrixXcd& rho) { validate_density(as_density(rho)); },
          py::arg("rho"));

    // displacement and measurement
    m.def("build_grid",
          [](int two_j, double oversample) { return build_grid(half(two_j), oversample); },
          py::arg("two_j"), py::arg("oversample") = 1.0);
    m.def("displace",
          [](const Eigen::MatrixXcd& rho, double theta, double phi) {
              return displace(as_density(rho), SpherePoint{theta, phi}).matrix;
          },
          py::arg("rho"), py::arg("theta"), py::arg("phi"));
    m.def("displaced_probabilities",
          [](const Eigen::MatrixXcd& rho, double theta, double phi) {
              return displaced_probabilities(as_density(rho), SpherePoint{theta, phi});
          },
          py::arg("rho"), py::arg("theta"), py::arg("phi"));
    m.def("exact_probabilities",
          [](const Eigen::MatrixXcd& rho, const SphereGrid& grid, int readout_two_mu) {
              return exact_probability_grid(as_density(rho), grid, half(readout_two_mu)).values;
          },
          py::arg("rho"), py::arg("grid"), py::arg("readout_two_mu"));
    m.def("sample_counts",
          [](const Eigen::MatrixXcd& rho, const SphereGrid& grid, long long shots,
             std::uint64_t seed) {
              return sample_measurements(as_density(rho), grid, shots, seed).counts;
          },
          py::arg("rho"), py::arg("grid"), py::arg("shots"), py::arg("seed"));

    // reconstruction
    m.def("multipole_index", [](int l, int mm) { return l * l + l + mm; }, py::arg("l"),
          py::arg("m"));
    m.def("multipoles_from_density",
          [](const Eigen::MatrixXcd& rho) {
              return multipoles_out(multipoles_from_density(as_density(rho)));
          },
          py::arg("rho"));
    m.def("density_from_multipoles",
          [](int two_j, const Eigen::VectorXcd& values) {
              return density_from_multipoles(as_multipoles(two_j, values)).matrix;
          },
          py::arg("two_j"), py::arg("values"));
    m.def("multipoles_from_probabilities",
          [](int two_j, const SphereGrid& grid, const std::vector<double>& values,
             int readout_two_mu, long long shots) {
              return multipoles_out(multipoles_from_probabilities(
                  as_probability_grid(grid, two_j, readout_two_mu, values, shots)));
          },
          py::arg("two_j"), py::arg("grid"), py::arg("values"), py::arg("readout_two_mu"),
          py::arg("shots") = 0);
    m.def("reconstruct_density",
          [](int two_j, const SphereGrid& grid, const std::vector<double>& values,
             int readout_two_mu, bool project) {
              const DensityMatrix estimate = density_from_multipoles(multipoles_from_probabilities(
                  as_probability_grid(grid, two_j, readout_two_mu, values, 0)));
              return (project ? project_to_physical(estimate) : estimate).matrix;
          },
          py::arg("two_j"), py::arg("grid"), py::arg("values"), py::arg("readout_two_mu"),
          py::arg("project") = false);
    m.def("qpd_from_density",
          [](const Eigen::MatrixXcd& rho, int s, const SphereGrid& grid) {
              return qpd_from_multipoles(multipoles_from_density(as_density(rho)), s, grid).values;
          },
          py::arg("rho"), py::arg("s"), py::arg("grid"));
    m.def("qpd_from_probabilities",
          [](int two_j, const SphereGrid& grid, const std::vector<double>& values,
             int readout_two_mu, int s, const SphereGrid& out_grid) {
              return qpd_from_probabilities(
                         as_probability_grid(grid, two_j, readout_two_mu, values, 0), s, out_grid)
                  .values;
          },
          py::arg("two_j"), py::arg("grid"), py::arg("values"), py::arg("readout_two_mu"),
          py::arg("s"), py::arg("out_grid"));
    m.def("q_function",
          [](const Eigen::MatrixXcd& rho, double theta, double phi) {
              return q_function(as_density(rho), SpherePoint{theta, phi});
          },
          py::arg("rho"), py::arg("theta"), py::arg("phi"));
    m.def("fidelity",
          [](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
              return fidelity(as_density(a), as_density(b));
          },
          py::arg("a"), py::arg("b"));
    m.def("trace_distance",
          [](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
              return trace_distance(as_density(a), as_density(b));
          },
          py::arg("a"), py::arg("b"));
    m.def("max_abs_diff",
          [](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
              return max_abs_diff(as_density(a), as_density(b));
          },
          py::arg("a"), py::arg("b"));
    m.def("project_to_physical",
          [](const Eigen::MatrixXcd& rho) { return project_to_physical(as_density(rho)).matrix; },
          py::arg("rho"));

    // experimental frontends
    py::class_<RamseyParams>(m, "RamseyParams")
        .def(py::init([](double omega0, double omega, double T, double omega2, double t_theta,
                         bool first_pulse_on) {
                 return RamseyParams{omega0, omega, T, omega2, t_theta, first_pulse_on};
             }),
             py::arg("omega0"), py::arg("omega"), py::arg("T") = 0.0, py::arg("omega2") = 0.0,
             py::arg("t_theta") = 0.0, py::arg("first_pulse_on") = false)
        .def_readwrite("omega0", &RamseyParams::omega0)
        .def_readwrite("omega", &RamseyParams::omega)
        .def_readwrite("T", &RamseyParams::T)
        .def_readwrite("omega2", &RamseyParams::omega2)
        .def_readwrite("t_theta", &RamseyParams::t_theta)
        .def_readwrite("first_pulse_on", &RamseyParams::first_pulse_on);

    py::class_<InterferometerParams>(m, "InterferometerParams")
        .def(py::init([](double transmittance1, double transmittance2, double phase1,
                         double phase2, bool first_splitter_present) {
                 return InterferometerParams{transmittance1, transmittance2, phase1, phase2,
                                             first_splitter_present};
             }),
             py::arg("transmittance1") = 1.0, py::arg("transmittance2") = 1.0,
             py::arg("phase1") = 0.0, py::arg("phase2") = 0.0,
             py::arg("first_splitter_present") = false)
        .def_readwrite("transmittance1", &InterferometerParams::transmittance1)
        .def_readwrite("transmittance2", &InterferometerParams::transmittance2)
        .def_readwrite("phase1", &InterferometerParams::phase1)
        .def_readwrite("phase2", &InterferometerParams::phase2)
        .def_readwrite("first_splitter_present", &InterferometerParams::first_splitter_present);

    py::class_<IonParams>(m, "IonParams")
        .def(py::init([](double kappa, double eta1, double eta2, double Omega1, double Omega2,
                         double t_theta, double T_free, double Phi) {
                 return IonParams{kappa, eta1, eta2, Omega1, Omega2, t_theta, T_free, Phi};
             }),
             py::arg("kappa"), py::arg("eta1"), py::arg("eta2"), py::arg("Omega1"),
             py::arg("Omega2"), py::arg("t_theta") = 0.0, py::arg("T_free") = 0.0,
             py::arg("Phi") = 1.5707963267948966)
        .def_readwrite("kappa", &IonParams::kappa)
        .def_readwrite("eta1", &IonParams::eta1)
        .def_readwrite("eta2", &IonParams::eta2)
        .def_readwrite("Omega1", &IonParams::Omega1)
        .def_readwrite("Omega2", &IonParams::Omega2)
        .def_readwrite("t_theta", &IonParams::t_theta)
        .def_readwrite("T_free", &IonParams::T_free)
        .def_readwrite("Phi", &IonParams::Phi);

    m.def("ramsey_displacement", &ramsey_displacement, py::arg("params"));
    m.def("interferometer_displacement", &interferometer_displacement, py::arg("params"));
    m.def("ion_displacement", &ion_displacement, py::arg("params"));
    m.def("ramsey_unitary",
          [](int two_j, const RamseyParams& p) { return ramsey_unitary(half(two_j), p); },
          py::arg("two_j"), py::arg("params"));
    m.def("interferometer_unitary",
          [](int two_j, const InterferometerParams& p) {
              return interferometer_unitary(half(two_j), p);
          },
          py::arg("two_j"), py::arg("params"));
    m.def("ion_unitary",
          [](int two_j, const IonParams& p) { return ion_unitary(half(two_j), p); },
          py::arg("two_j"), py::arg("params"));
    m.def("ramsey_knobs_for",
          [](const SpherePoint& n, const RamseyParams& base) {
              return ramsey_knobs_for(n, base);
          },
          py::arg("n"), py::arg("base"));
    m.def("interferometer_knobs_for",
          [](const SpherePoint& n, const InterferometerParams& base) {
              return interferometer_knobs_for(n, base);
          },
          py::arg("n"), py::arg("base"));
    m.def("ion_knobs_for",
          [](const SpherePoint& n, const IonParams& base) { return ion_knobs_for(n, base); },
          py::arg("n"), py::arg("base"));

    // two-mode bookkeeping
    m.def("fock_to_su2",
          [](int n1, int n2) {
              const auto [j, mu] = fock_to_su2(n1, n2);
              return std::make_pair(j.twice(), mu.twice());
          },
          py::arg("n1"), py::arg("n2"));
    m.def("su2_to_fock",
          [](int two_j, int two_mu) { return su2_to_fock(half(two_j), half(two_mu)); },
          py::arg("two_j"), py::arg("two_mu"));
    m.def("decompose_two_mode",
          [](const std::vector<std::tuple<int, int, Complex>>& amplitudes) {
              const TwoModeState state = as_two_mode(amplitudes);
              py::dict blocks;
              for (const auto& [two_j, rho] : state.blocks)
                  blocks[py::int_(two_j)] =
                      py::make_tuple(rho.matrix, state.weights.at(two_j));
              return blocks;
          },
          py::arg("amplitudes"));
    m.def("blockwise_reconstruct",
          [](const std::vector<std::tuple<int, int, Complex>>& amplitudes,
             const SphereGrid& grid, long long shots, std::uint64_t seed) {
              py::dict out;
              for (const auto& [two_j, block] :
                   blockwise_reconstruct(as_two_mode(amplitudes), grid, shots, seed)) {
                  py::dict entry;
                  entry["reconstructed"] = block.reconstructed;
                  entry["rho_hat"] = block.rho_hat.matrix;
                  entry["fidelity"] = block.fidelity;
                  entry["trace_distance"] = block.trace_distance;
                  entry["max_abs_diff"] = block.max_abs_diff;
                  entry["weight_true"] = block.weight_true;
                  entry["weight_estimate"] = block.weight_estimate;
                  entry["total_counts"] = block.total_counts;
                  out[py::int_(two_j)] = entry;
              }
              return out;
          },
          py::arg("amplitudes"), py::arg("grid"), py::arg("shots"), py::arg("seed"));

    // Jaynes-Cummings readout
    py::class_<JCReadoutParams>(m, "JCReadoutParams")
        .def(py::init([](double omega0, std::vector<double> times, int n_max, double gamma0,
                         std::vector<double> gammas, std::vector<double> rabi) {
                 JCReadoutParams p;
                 p.omega0 = omega0;
                 p.times = std::move(times);
                 p.n_max = n_max;
                 p.gamma0 = gamma0;
                 p.gammas = std::move(gammas);
                 p.rabi = std::move(rabi);
                 p.validate();
                 return p;
             }),
             py::arg("omega0"), py::arg("times"), py::arg("n_max"), py::arg("gamma0") = 0.0,
             py::arg("gammas") = std::vector<double>{}, py::arg("rabi") = std::vector<double>{})
        .def_readonly("omega0", &JCReadoutParams::omega0)
        .def_readonly("times", &JCReadoutParams::times)
        .def_readonly("n_max", &JCReadoutParams::n_max)
        .def("rabi_for", &JCReadoutParams::rabi_for, py::arg("n"))
        .def("gamma_for", &JCReadoutParams::gamma_for, py::arg("n"));

    m.def("jc_signal", &jc_signal, py::arg("populations"), py::arg("params"));
    m.def("jc_invert",
          [](const std::vector<double>& signal, const JCReadoutParams& p, bool nonnegative) {
              const JCInversion inv = jc_invert(signal, p, nonnegative);
              py::dict out;
              out["populations"] = inv.populations;
              out["residual_norm"] = inv.residual_norm;
              out["condition_number"] = inv.condition_number;
              return out;
          },
          py::arg("signal"), py::arg("params"), py::arg("nonnegative") = true);

    // phase estimation
    m.def("jz_out_mean",
          [](const Eigen::MatrixXcd& rho, double theta1, double theta2, double phi) {
              return jz_out_mean(as_density(rho), theta1, theta2, phi);
          },
          py::arg("rho"), py::arg("theta1"), py::arg("theta2"), py::arg("phi"));
    m.def("phase_uncertainty",
          [](const Eigen::MatrixXcd& rho, double theta1, double theta2, double phi) {
              return phase_uncertainty(as_density(rho), theta1, theta2, phi);
          },
          py::arg("rho"), py::arg("theta1"), py::arg("theta2"), py::arg("phi"));

    m.attr("__version__") = "0.1.0";
}
