#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "spintomo/frontends.hpp"
#include "spintomo/states.hpp"

namespace spintomo::cli {

// Invalid or inconsistent configuration; maps to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class Frontend { abstract, ramsey, mach_zehnder, trapped_ion };

struct PureStateSpec {
    enum class Kind { dicke, coherent, superposition };
    Kind kind = Kind::dicke;
    int two_mu = 0;                  // dicke
    double theta = 0.0, phi = 0.0;   // coherent
    std::vector<Complex> amplitudes; // superposition
};

struct StateSpec {
    enum class Kind { dicke, coherent, superposition, mixture, two_mode };
    Kind kind = Kind::dicke;
    PureStateSpec pure;                                     // non-composite kinds
    std::vector<std::pair<double, PureStateSpec>> components; // mixture
    std::vector<FockAmplitude> fock;                        // two_mode
};

struct SweepSpec {
    std::vector<long long> shot_levels;
    int seeds = 0;
    bool include_exact = true;
};

struct ExperimentConfig {
    Frontend frontend = Frontend::abstract;
    int two_j = -1;
    std::optional<StateSpec> state;
    int readout_two_mu = 0;
    bool readout_set = false;
    double oversample = 1.0;
    long long shots = 0;
    std::uint64_t seed = 0;
    std::vector<int> s_values = {-1, 0, 1};
    std::string output_dir = "out";
    bool project_psd = false;
    std::optional<RamseyParams> ramsey;
    std::optional<InterferometerParams> mach_zehnder;
    std::optional<IonParams> trapped_ion;
    std::optional<JCReadoutParams> jc;
    std::optional<SweepSpec> sweep;
    nlohmann::json raw;

    bool is_two_mode() const { return state && state->kind == StateSpec::Kind::two_mode; }
    HalfInteger j() const { return HalfInteger::from_twice(two_j); }
    HalfInteger readout_mu() const {
        return HalfInteger::from_twice(readout_set ? readout_two_mu : two_j);
    }
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

// Single-j density from a state spec (everything except two_mode).
DensityMatrix build_density(const StateSpec& spec, HalfInteger j);
DensityMatrix build_density(const PureStateSpec& spec, HalfInteger j);

// Block decomposition of a two_mode spec.
TwoModeState build_two_mode(const StateSpec& spec);

} // namespace spintomo::cli
