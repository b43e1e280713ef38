#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "spintomo/errors.hpp"
#include "spintomo/io.hpp"

namespace spintomo::cli {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config error at " + path + ": " + what);
}

const nlohmann::json& require_field(const nlohmann::json& doc, const std::string& key,
                                    const std::string& path) {
    if (!doc.is_object() || !doc.contains(key)) fail(path + "." + key, "missing required field");
    return doc.at(key);
}

double as_number(const nlohmann::json& value, const std::string& path) {
    if (!value.is_number()) fail(path, "expected a number");
    return value.get<double>();
}

long long as_integer(const nlohmann::json& value, const std::string& path) {
    if (!value.is_number_integer()) fail(path, "expected an integer");
    return value.get<long long>();
}

bool as_bool(const nlohmann::json& value, const std::string& path) {
    if (!value.is_boolean()) fail(path, "expected a boolean");
    return value.get<bool>();
}

PureStateSpec parse_pure_state(const nlohmann::json& doc, const std::string& path) {
    if (!doc.is_object()) fail(path, "expected an object with a \"kind\" field");
    const std::string kind = require_field(doc, "kind", path).get<std::string>();
    PureStateSpec spec;
    if (kind == "dicke") {
        spec.kind = PureStateSpec::Kind::dicke;
        spec.two_mu = static_cast<int>(as_integer(require_field(doc, "two_mu", path), path + ".two_mu"));
    } else if (kind == "coherent") {
        spec.kind = PureStateSpec::Kind::coherent;
        spec.theta = as_number(require_field(doc, "theta", path), path + ".theta");
        spec.phi = as_number(require_field(doc, "phi", path), path + ".phi");
        if (spec.theta < 0.0 || spec.theta > std::acos(-1.0))
            fail(path + ".theta", "must lie in [0, pi]");
    } else if (kind == "superposition") {
        spec.kind = PureStateSpec::Kind::superposition;
        const auto& re = require_field(doc, "re", path);
        const auto& im = require_field(doc, "im", path);
        if (!re.is_array() || !im.is_array() || re.size() != im.size() || re.empty())
            fail(path, "re and im must be equal-length nonempty arrays");
        for (std::size_t k = 0; k < re.size(); ++k)
            spec.amplitudes.emplace_back(as_number(re[k], path + ".re"),
                                         as_number(im[k], path + ".im"));
    } else {
        fail(path + ".kind", "expected dicke, coherent or superposition here, got '" + kind + "'");
    }
    return spec;
}

StateSpec parse_state(const nlohmann::json& doc, const std::string& path) {
    if (!doc.is_object()) fail(path, "expected an object with a \"kind\" field");
    const std::string kind = require_field(doc, "kind", path).get<std::string>();
    StateSpec spec;
    if (kind == "dicke" || kind == "coherent" || kind == "superposition") {
        spec.pure = parse_pure_state(doc, path);
        spec.kind = kind == "dicke" ? StateSpec::Kind::dicke
                  : kind == "coherent" ? StateSpec::Kind::coherent
                                       : StateSpec::Kind::superposition;
    } else if (kind == "mixture") {
        spec.kind = StateSpec::Kind::mixture;
        const auto& comps = require_field(doc, "components", path);
        if (!comps.is_array() || comps.empty()) fail(path + ".components", "expected a nonempty array");
        for (std::size_t k = 0; k < comps.size(); ++k) {
            const std::string comp_path = path + ".components[" + std::to_string(k) + "]";
            const double weight =
                as_number(require_field(comps[k], "weight", comp_path), comp_path + ".weight");
            if (weight < 0.0) fail(comp_path + ".weight", "must be >= 0");
            spec.components.emplace_back(
                weight, parse_pure_state(require_field(comps[k], "state", comp_path),
                                         comp_path + ".state"));
        }
    } else if (kind == "two_mode") {
        spec.kind = StateSpec::Kind::two_mode;
        const auto& amps = require_field(doc, "amplitudes", path);
        if (!amps.is_array() || amps.empty()) fail(path + ".amplitudes", "expected a nonempty array");
        for (std::size_t k = 0; k < amps.size(); ++k) {
            const std::string amp_path = path + ".amplitudes[" + std::to_string(k) + "]";
            FockAmplitude fock;
            fock.n1 = static_cast<int>(as_integer(require_field(amps[k], "n1", amp_path), amp_path + ".n1"));
            fock.n2 = static_cast<int>(as_integer(require_field(amps[k], "n2", amp_path), amp_path + ".n2"));
            if (fock.n1 < 0 || fock.n2 < 0) fail(amp_path, "photon numbers must be >= 0");
            fock.amplitude = Complex(as_number(require_field(amps[k], "re", amp_path), amp_path + ".re"),
                                     as_number(require_field(amps[k], "im", amp_path), amp_path + ".im"));
            spec.fock.push_back(fock);
        }
    } else {
        fail(path + ".kind", "unknown state kind '" + kind + "'");
    }
    return spec;
}

RamseyParams parse_ramsey(const nlohmann::json& doc, const std::string& path) {
    RamseyParams p;
    p.omega0 = as_number(require_field(doc, "omega0", path), path + ".omega0");
    p.omega = as_number(require_field(doc, "omega", path), path + ".omega");
    p.omega2 = as_number(require_field(doc, "omega2", path), path + ".omega2");
    if (doc.contains("T")) p.T = as_number(doc.at("T"), path + ".T");
    if (doc.contains("t_theta")) p.t_theta = as_number(doc.at("t_theta"), path + ".t_theta");
    if (doc.contains("first_pulse_on"))
        p.first_pulse_on = as_bool(doc.at("first_pulse_on"), path + ".first_pulse_on");
    if (p.T < 0.0 || p.t_theta < 0.0) fail(path, "durations must be >= 0");
    return p;
}

InterferometerParams parse_mz(const nlohmann::json& doc, const std::string& path) {
    InterferometerParams p;
    if (doc.contains("transmittance1"))
        p.transmittance1 = as_number(doc.at("transmittance1"), path + ".transmittance1");
    if (doc.contains("transmittance2"))
        p.transmittance2 = as_number(doc.at("transmittance2"), path + ".transmittance2");
    if (doc.contains("phase1")) p.phase1 = as_number(doc.at("phase1"), path + ".phase1");
    if (doc.contains("phase2")) p.phase2 = as_number(doc.at("phase2"), path + ".phase2");
    if (doc.contains("first_splitter_present"))
        p.first_splitter_present =
            as_bool(doc.at("first_splitter_present"), path + ".first_splitter_present");
    if (p.transmittance1 < 0.0 || p.transmittance1 > 1.0 || p.transmittance2 < 0.0 ||
        p.transmittance2 > 1.0)
        fail(path, "transmittances must lie in [0, 1]");
    return p;
}

IonParams parse_ion(const nlohmann::json& doc, const std::string& path) {
    IonParams p;
    p.kappa = as_number(require_field(doc, "kappa", path), path + ".kappa");
    p.eta1 = as_number(require_field(doc, "eta1", path), path + ".eta1");
    p.eta2 = as_number(require_field(doc, "eta2", path), path + ".eta2");
    p.Omega1 = as_number(require_field(doc, "Omega1", path), path + ".Omega1");
    p.Omega2 = as_number(require_field(doc, "Omega2", path), path + ".Omega2");
    if (doc.contains("t_theta")) p.t_theta = as_number(doc.at("t_theta"), path + ".t_theta");
    if (doc.contains("T_free")) p.T_free = as_number(doc.at("T_free"), path + ".T_free");
    if (doc.contains("Phi")) p.Phi = as_number(doc.at("Phi"), path + ".Phi");
    if (p.Omega1 == p.Omega2) fail(path, "trap frequencies Omega1 and Omega2 must differ");
    return p;
}

JCReadoutParams parse_jc(const nlohmann::json& doc, const std::string& path) {
    JCReadoutParams p;
    p.omega0 = as_number(require_field(doc, "omega0", path), path + ".omega0");
    p.n_max = static_cast<int>(as_integer(require_field(doc, "n_max", path), path + ".n_max"));
    if (doc.contains("gamma0")) p.gamma0 = as_number(doc.at("gamma0"), path + ".gamma0");
    if (doc.contains("gammas")) {
        for (const auto& g : doc.at("gammas")) p.gammas.push_back(as_number(g, path + ".gammas"));
    }
    if (doc.contains("rabi")) {
        for (const auto& r : doc.at("rabi")) p.rabi.push_back(as_number(r, path + ".rabi"));
    }
    const auto& times = require_field(doc, "times", path);
    if (times.is_array()) {
        for (const auto& t : times) p.times.push_back(as_number(t, path + ".times"));
    } else if (times.is_object()) {
        const auto count = as_integer(require_field(times, "count", path + ".times"),
                                      path + ".times.count");
        const double t_max = as_number(require_field(times, "t_max", path + ".times"),
                                       path + ".times.t_max");
        if (count < 1 || t_max <= 0.0) fail(path + ".times", "count >= 1 and t_max > 0 required");
        for (long long i = 1; i <= count; ++i)
            p.times.push_back(t_max * static_cast<double>(i) / static_cast<double>(count));
    } else {
        fail(path + ".times", "expected an array of times or {count, t_max}");
    }
    try {
        p.validate();
    } catch (const std::domain_error& err) {
        fail(path, err.what());
    }
    return p;
}

SweepSpec parse_sweep(const nlohmann::json& doc, const std::string& path) {
    SweepSpec s;
    const auto& levels = require_field(doc, "shot_levels", path);
    if (!levels.is_array()) fail(path + ".shot_levels", "expected an array");
    for (const auto& level : levels) {
        const long long shots = as_integer(level, path + ".shot_levels");
        if (shots < 1) fail(path + ".shot_levels", "levels must be >= 1");
        s.shot_levels.push_back(shots);
    }
    s.seeds = static_cast<int>(as_integer(require_field(doc, "seeds", path), path + ".seeds"));
    if (doc.contains("include_exact"))
        s.include_exact = as_bool(doc.at("include_exact"), path + ".include_exact");
    if (s.shot_levels.size() < 2) fail(path + ".shot_levels", "need at least 2 shot levels");
    if (s.seeds < 5) fail(path + ".seeds", "need at least 5 seeds");
    return s;
}

} // namespace

ExperimentConfig parse_config(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("config error at <root>: expected a JSON object");
    ExperimentConfig cfg;
    cfg.raw = doc;

    if (doc.contains("frontend")) {
        const std::string name = doc.at("frontend").get<std::string>();
        if (name == "abstract") cfg.frontend = Frontend::abstract;
        else if (name == "ramsey") cfg.frontend = Frontend::ramsey;
        else if (name == "mach_zehnder") cfg.frontend = Frontend::mach_zehnder;
        else if (name == "trapped_ion") cfg.frontend = Frontend::trapped_ion;
        else fail("frontend", "unknown frontend '" + name + "'");
    }
    if (doc.contains("two_j")) {
        cfg.two_j = static_cast<int>(as_integer(doc.at("two_j"), "two_j"));
        if (cfg.two_j < 0) fail("two_j", "must be >= 0");
    }
    if (doc.contains("state")) cfg.state = parse_state(doc.at("state"), "state");
    if (doc.contains("readout_two_mu")) {
        cfg.readout_two_mu = static_cast<int>(as_integer(doc.at("readout_two_mu"), "readout_two_mu"));
        cfg.readout_set = true;
    }
    if (doc.contains("oversample")) {
        cfg.oversample = as_number(doc.at("oversample"), "oversample");
        if (cfg.oversample < 1.0) fail("oversample", "must be >= 1");
    }
    if (doc.contains("shots")) {
        cfg.shots = as_integer(doc.at("shots"), "shots");
        if (cfg.shots < 0) fail("shots", "must be >= 0 (0 = exact)");
    }
    if (doc.contains("seed")) cfg.seed = static_cast<std::uint64_t>(as_integer(doc.at("seed"), "seed"));
    if (doc.contains("s_values")) {
        cfg.s_values.clear();
        std::set<int> seen;
        for (const auto& s : doc.at("s_values")) {
            const int value = static_cast<int>(as_integer(s, "s_values"));
            if (value < -1 || value > 1) fail("s_values", "entries must be -1, 0 or 1");
            if (seen.insert(value).second) cfg.s_values.push_back(value);
        }
        if (cfg.s_values.empty()) fail("s_values", "must not be empty");
    }
    if (doc.contains("output_dir")) cfg.output_dir = doc.at("output_dir").get<std::string>();
    if (doc.contains("project_psd")) cfg.project_psd = as_bool(doc.at("project_psd"), "project_psd");
    if (doc.contains("ramsey")) cfg.ramsey = parse_ramsey(doc.at("ramsey"), "ramsey");
    if (doc.contains("mach_zehnder")) cfg.mach_zehnder = parse_mz(doc.at("mach_zehnder"), "mach_zehnder");
    if (doc.contains("trapped_ion")) cfg.trapped_ion = parse_ion(doc.at("trapped_ion"), "trapped_ion");
    if (doc.contains("jc")) cfg.jc = parse_jc(doc.at("jc"), "jc");
    if (doc.contains("sweep")) cfg.sweep = parse_sweep(doc.at("sweep"), "sweep");

    // cross-field consistency
    if (cfg.state && cfg.state->kind == StateSpec::Kind::two_mode) {
        if (cfg.frontend != Frontend::mach_zehnder && cfg.frontend != Frontend::trapped_ion)
            fail("state", "two_mode states require the mach_zehnder or trapped_ion frontend");
        int max_two_j = 0;
        for (const auto& f : cfg.state->fock) max_two_j = std::max(max_two_j, f.n1 + f.n2);
        if (cfg.two_j < 0) cfg.two_j = max_two_j;
        else if (cfg.two_j != max_two_j)
            fail("two_j", "must equal the largest photon sum of the two_mode state (" +
                              std::to_string(max_two_j) + ")");
    }
    if (cfg.two_j >= 0 && cfg.readout_set) {
        if (std::abs(cfg.readout_two_mu) > cfg.two_j ||
            ((cfg.two_j - cfg.readout_two_mu) % 2) != 0)
            fail("readout_two_mu", "readout must satisfy |mu| <= j with matching parity");
    }
    if (cfg.frontend == Frontend::ramsey && !cfg.ramsey)
        fail("ramsey", "frontend \"ramsey\" requires a ramsey parameter section");
    if (cfg.frontend == Frontend::mach_zehnder && !cfg.mach_zehnder)
        fail("mach_zehnder", "frontend \"mach_zehnder\" requires a mach_zehnder parameter section");
    if (cfg.frontend == Frontend::trapped_ion && !cfg.trapped_ion)
        fail("trapped_ion", "frontend \"trapped_ion\" requires a trapped_ion parameter section");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    nlohmann::json doc;
    try {
        doc = io::load_json(path);
    } catch (const IoError& err) {
        throw ConfigError(err.what());
    }
    return parse_config(doc);
}

DensityMatrix build_density(const PureStateSpec& spec, HalfInteger j) {
    switch (spec.kind) {
    case PureStateSpec::Kind::dicke:
        return pure_density(make_dicke(j, HalfInteger::from_twice(spec.two_mu)));
    case PureStateSpec::Kind::coherent:
        return pure_density(make_coherent(j, SpherePoint{spec.theta, spec.phi}));
    case PureStateSpec::Kind::superposition: {
        Eigen::VectorXcd amps(static_cast<Eigen::Index>(spec.amplitudes.size()));
        for (std::size_t k = 0; k < spec.amplitudes.size(); ++k)
            amps(static_cast<Eigen::Index>(k)) = spec.amplitudes[k];
        return pure_density(make_superposition(j, amps));
    }
    }
    throw ConfigError("config error at state: unsupported pure state kind");
}

DensityMatrix build_density(const StateSpec& spec, HalfInteger j) {
    switch (spec.kind) {
    case StateSpec::Kind::dicke:
    case StateSpec::Kind::coherent:
    case StateSpec::Kind::superposition:
        return build_density(spec.pure, j);
    case StateSpec::Kind::mixture: {
        std::vector<MixtureComponent> comps;
        for (const auto& [weight, pure] : spec.components)
            comps.push_back({weight, build_density(pure, j)});
        return make_mixture(comps);
    }
    case StateSpec::Kind::two_mode:
        break;
    }
    throw ConfigError("config error at state: two_mode state used where a single-j state is required");
}

TwoModeState build_two_mode(const StateSpec& spec) {
    if (spec.kind != StateSpec::Kind::two_mode)
        throw ConfigError("config error at state: expected a two_mode state");
    return decompose_two_mode(spec.fock);
}

} // namespace spintomo::cli
