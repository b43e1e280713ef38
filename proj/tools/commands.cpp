#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "spintomo/errors.hpp"
#include "spintomo/io.hpp"
#include "spintomo/measure.hpp"
#include "spintomo/reconstruction.hpp"
#include "spintomo/rng.hpp"

namespace spintomo::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

fs::path ensure_output_dir(const ExperimentConfig& cfg) {
    const fs::path dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

void require_two_j(const ExperimentConfig& cfg) {
    if (cfg.two_j < 0) throw ConfigError("config error at two_j: required for this command");
}

void save_stream(const fs::path& path, const std::ostringstream& body) {
    io::save_text(path, body.str());
    std::printf("wrote %s\n", path.string().c_str());
}

// per-point apparatus settings realizing each displacement; written alongside
// simulated data when a physical frontend is selected
void write_frontend_settings(const ExperimentConfig& cfg, const SphereGrid& grid,
                             const fs::path& dir) {
    if (cfg.frontend == Frontend::abstract) return;
    std::ostringstream out;
    if (cfg.frontend == Frontend::ramsey) {
        out << "theta,phi,omega0,omega,omega2,T,t_theta\n";
        for (const auto& n : grid.points) {
            const RamseyParams knobs = ramsey_knobs_for(n, *cfg.ramsey);
            out << io::format_double(n.theta) << ',' << io::format_double(n.phi) << ','
                << io::format_double(knobs.omega0) << ',' << io::format_double(knobs.omega) << ','
                << io::format_double(knobs.omega2) << ',' << io::format_double(knobs.T) << ','
                << io::format_double(knobs.t_theta) << "\n";
        }
    } else if (cfg.frontend == Frontend::mach_zehnder) {
        out << "theta,phi,transmittance1,transmittance2,phase1,phase2\n";
        for (const auto& n : grid.points) {
            const InterferometerParams knobs = interferometer_knobs_for(n, *cfg.mach_zehnder);
            out << io::format_double(n.theta) << ',' << io::format_double(n.phi) << ','
                << io::format_double(knobs.transmittance1) << ','
                << io::format_double(knobs.transmittance2) << ','
                << io::format_double(knobs.phase1) << ',' << io::format_double(knobs.phase2)
                << "\n";
        }
    } else {
        if (!ion_in_lamb_dicke_regime(*cfg.trapped_ion))
            std::fprintf(stderr,
                         "warning: Lamb-Dicke parameters exceed 0.3; the effective beam-splitter "
                         "Hamiltonian is a poor approximation\n");
        out << "theta,phi,kappa,eta1,eta2,Omega1,Omega2,t_theta,T_free\n";
        for (const auto& n : grid.points) {
            const IonParams knobs = ion_knobs_for(n, *cfg.trapped_ion);
            out << io::format_double(n.theta) << ',' << io::format_double(n.phi) << ','
                << io::format_double(knobs.kappa) << ',' << io::format_double(knobs.eta1) << ','
                << io::format_double(knobs.eta2) << ',' << io::format_double(knobs.Omega1) << ','
                << io::format_double(knobs.Omega2) << ',' << io::format_double(knobs.t_theta)
                << ',' << io::format_double(knobs.T_free) << "\n";
        }
    }
    save_stream(dir / "frontend_settings.csv", out);
}

// realized displacement must reproduce every grid point
void verify_frontend_round_trip(const ExperimentConfig& cfg, const SphereGrid& grid) {
    if (cfg.frontend == Frontend::abstract) return;
    double worst = 0.0;
    for (const auto& n : grid.points) {
        SpherePoint realized = n;
        if (cfg.frontend == Frontend::ramsey)
            realized = ramsey_displacement(ramsey_knobs_for(n, *cfg.ramsey));
        else if (cfg.frontend == Frontend::mach_zehnder)
            realized = interferometer_displacement(interferometer_knobs_for(n, *cfg.mach_zehnder));
        else
            realized = ion_displacement(ion_knobs_for(n, *cfg.trapped_ion));
        worst = std::max(worst, std::abs(realized.theta - n.theta));
        worst = std::max(worst,
                         std::abs(std::remainder(realized.phi - n.phi, 2.0 * std::numbers::pi)));
    }
    if (worst > 1e-7)
        throw NumericError("frontend knob inversion failed to reproduce the grid (error " +
                           std::to_string(worst) + ")");
}

nlohmann::json metrics_json(const DensityMatrix& truth, const DensityMatrix& estimate) {
    return {{"fidelity", fidelity(truth, estimate)},
            {"trace_distance", trace_distance(truth, estimate)},
            {"max_abs_diff", max_abs_diff(truth, estimate)}};
}

struct ReconstructionOutputs {
    DensityMatrix estimate;
    MultipoleCoefficients multipoles;
    bool projected = false;
};

ReconstructionOutputs invert_probability_grid(const ProbabilityGrid& p, bool project) {
    ReconstructionOutputs out{DensityMatrix{}, multipoles_from_probabilities(p), project};
    out.estimate = density_from_multipoles(out.multipoles);
    if (project) out.estimate = project_to_physical(out.estimate);
    return out;
}

ProbabilityGrid load_input_distribution(const ExperimentConfig& cfg, const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string first_line;
    std::getline(in, first_line);
    std::string second_line;
    std::getline(in, second_line);
    in.clear(); // the sniff may have hit EOF on short files
    in.seekg(0);
    const bool is_measurement = first_line.find("c_") != std::string::npos ||
                                second_line.find("c_") != std::string::npos;
    if (is_measurement) {
        const MeasurementRecord rec = io::read_measurement_csv(in, path.string());
        const HalfInteger mu = cfg.readout_set ? HalfInteger::from_twice(cfg.readout_two_mu)
                                               : rec.j;
        return record_to_probability_grid(rec, mu);
    }
    return io::read_probability_csv(in, path.string());
}

} // namespace

int cmd_simulate(const ExperimentConfig& cfg) {
    if (!cfg.state) throw ConfigError("config error at state: simulate requires a state");
    require_two_j(cfg);
    const fs::path dir = ensure_output_dir(cfg);

    if (cfg.is_two_mode()) {
        const TwoModeState state = build_two_mode(*cfg.state);
        const SphereGrid grid = build_grid(cfg.j(), cfg.oversample);
        verify_frontend_round_trip(cfg, grid);
        write_frontend_settings(cfg, grid, dir);

        nlohmann::json blocks = nlohmann::json::array();
        if (cfg.shots == 0) {
            for (const auto& [two_j, rho] : state.blocks) {
                const HalfInteger j = HalfInteger::from_twice(two_j);
                const ProbabilityGrid p = exact_probability_grid(rho, grid, j);
                std::ostringstream out;
                io::write_probability_csv(out, p);
                save_stream(dir / ("probability_two_j_" + std::to_string(two_j) + ".csv"), out);
                blocks.push_back({{"two_j", two_j}, {"weight", state.weights.at(two_j)}});
            }
        } else {
            const auto records = sample_two_mode(state, grid, cfg.shots, cfg.seed);
            for (const auto& [two_j, rec] : records) {
                std::ostringstream mout;
                io::write_measurement_csv(mout, rec);
                save_stream(dir / ("measurement_two_j_" + std::to_string(two_j) + ".csv"), mout);
                const ProbabilityGrid p =
                    record_to_probability_grid(rec, HalfInteger::from_twice(two_j));
                std::ostringstream pout;
                io::write_probability_csv(pout, p);
                save_stream(dir / ("probability_two_j_" + std::to_string(two_j) + ".csv"), pout);
                const long long total = rec.counts.sum();
                blocks.push_back(
                    {{"two_j", two_j},
                     {"weight", state.weights.at(two_j)},
                     {"total_counts", total},
                     {"weight_estimate", static_cast<double>(total) /
                                             (static_cast<double>(cfg.shots) *
                                              static_cast<double>(grid.size()))}});
            }
        }
        io::save_json(dir / "blocks.json", {{"shots", cfg.shots},
                                            {"seed", cfg.seed},
                                            {"blocks", std::move(blocks)}});
        std::printf("wrote %s\n", (dir / "blocks.json").string().c_str());
        return 0;
    }

    const DensityMatrix rho = build_density(*cfg.state, cfg.j());
    const SphereGrid grid = build_grid(cfg.j(), cfg.oversample);
    verify_frontend_round_trip(cfg, grid);
    write_frontend_settings(cfg, grid, dir);
    const HalfInteger mu = cfg.readout_mu();

    // data taken at this readout could never be inverted; refuse up front
    const auto bad = vanishing_denominators(cfg.j(), mu);
    if (!bad.empty()) {
        std::ostringstream msg;
        msg << "readout mu=" << mu.str()
            << " has vanishing Clebsch-Gordan denominator <j,mu;l,0|j,mu> for l =";
        for (int l : bad) msg << " " << l;
        msg << "; choose readout mu = +j or -j";
        throw NumericError(msg.str());
    }

    if (cfg.shots == 0) {
        const ProbabilityGrid p = exact_probability_grid(rho, grid, mu);
        std::ostringstream out;
        io::write_probability_csv(out, p);
        save_stream(dir / "probability.csv", out);
    } else {
        const MeasurementRecord rec = sample_measurements(rho, grid, cfg.shots, cfg.seed);
        std::ostringstream mout;
        io::write_measurement_csv(mout, rec);
        save_stream(dir / "measurement.csv", mout);
        std::ostringstream pout;
        io::write_probability_csv(pout, record_to_probability_grid(rec, mu));
        save_stream(dir / "probability.csv", pout);
    }
    return 0;
}

int cmd_reconstruct(const ExperimentConfig& cfg, const std::string& input) {
    const auto start = std::chrono::steady_clock::now();
    const fs::path dir = ensure_output_dir(cfg);
    const fs::path in_path(input);

    if (fs::is_directory(in_path)) {
        // blockwise mode: per-block CSVs produced by a two_mode simulate run
        std::optional<TwoModeState> truth;
        if (cfg.state && cfg.is_two_mode()) truth = build_two_mode(*cfg.state);

        nlohmann::json block_reports = nlohmann::json::array();
        std::vector<fs::path> inputs;
        for (const auto& entry : fs::directory_iterator(in_path)) {
            const std::string name = entry.path().filename().string();
            if (name.rfind("measurement_two_j_", 0) == 0 && entry.path().extension() == ".csv")
                inputs.push_back(entry.path());
        }
        if (inputs.empty()) {
            for (const auto& entry : fs::directory_iterator(in_path)) {
                const std::string name = entry.path().filename().string();
                if (name.rfind("probability_two_j_", 0) == 0 && entry.path().extension() == ".csv")
                    inputs.push_back(entry.path());
            }
        }
        if (inputs.empty())
            throw IoError(in_path.string() + ": no per-block measurement or probability CSVs");
        std::sort(inputs.begin(), inputs.end());

        for (const auto& path : inputs) {
            const ProbabilityGrid p = load_input_distribution(cfg, path);
            const int two_j = p.j.twice();
            nlohmann::json entry{{"two_j", two_j}};
            const long long total =
                p.row_shots.empty()
                    ? p.shots_per_point * static_cast<long long>(p.grid.size())
                    : [&] {
                          long long acc = 0;
                          for (long long s : p.row_shots) acc += s;
                          return acc;
                      }();
            if (p.shots_per_point != 0 || !p.row_shots.empty()) entry["total_counts"] = total;
            if (total == 0 && p.shots_per_point == 0 && !p.row_shots.empty()) {
                entry["reconstructed"] = false;
                block_reports.push_back(std::move(entry));
                continue;
            }
            const ReconstructionOutputs out = invert_probability_grid(p, cfg.project_psd);
            const std::string suffix = "_two_j_" + std::to_string(two_j) + ".json";
            io::save_json(dir / ("density" + suffix), io::density_to_json(out.estimate));
            io::save_json(dir / ("multipoles" + suffix), io::multipoles_to_json(out.multipoles));
            entry["reconstructed"] = true;
            entry["projected"] = out.projected;
            if (truth && truth->blocks.count(two_j)) {
                entry["metrics"] = metrics_json(truth->blocks.at(two_j), out.estimate);
                entry["weight_true"] = truth->weights.at(two_j);
            }
            block_reports.push_back(std::move(entry));
        }
        nlohmann::json report{{"config", cfg.raw},
                              {"input", in_path.string()},
                              {"blocks", std::move(block_reports)}};
        report["timing_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        io::save_json(dir / "report.json", report);
        std::printf("wrote %s\n", (dir / "report.json").string().c_str());
        return 0;
    }

    const ProbabilityGrid p = load_input_distribution(cfg, in_path);
    const ReconstructionOutputs out = invert_probability_grid(p, cfg.project_psd);
    io::save_json(dir / "density.json", io::density_to_json(out.estimate));
    io::save_json(dir / "multipoles.json", io::multipoles_to_json(out.multipoles));

    nlohmann::json report{{"config", cfg.raw},
                          {"input", in_path.string()},
                          {"two_j", p.j.twice()},
                          {"readout_two_mu", p.mu.twice()},
                          {"shots_per_point", p.shots_per_point},
                          {"projected", out.projected},
                          {"multipoles", io::multipoles_to_json(out.multipoles)}};
    if (cfg.state && !cfg.is_two_mode() && cfg.two_j == p.j.twice()) {
        const DensityMatrix truth = build_density(*cfg.state, p.j);
        report["metrics"] = metrics_json(truth, out.estimate);
    }
    report["timing_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    io::save_json(dir / "report.json", report);
    std::printf("wrote %s\n", (dir / "report.json").string().c_str());
    return 0;
}

int cmd_qpd(const ExperimentConfig& cfg, const std::string& input, const std::string& route) {
    if (route != "multipole" && route != "kernel" && route != "both")
        throw ConfigError("config error at --route: expected multipole, kernel or both");
    const fs::path dir = ensure_output_dir(cfg);
    const fs::path in_path(input);

    const bool density_input = in_path.extension() == ".json";
    if (density_input && route != "multipole")
        throw ConfigError(
            "config error at --route: the kernel route needs measured probabilities; density JSON "
            "input supports --route multipole only");

    std::optional<ProbabilityGrid> p;
    std::optional<MultipoleCoefficients> coeffs;
    SphereGrid grid;
    HalfInteger j = HalfInteger::from_twice(0);

    if (density_input) {
        const DensityMatrix rho = io::density_from_json(io::load_json(in_path));
        validate_density(rho);
        j = rho.j;
        grid = build_grid(j, cfg.oversample);
        coeffs = multipoles_from_density(rho);
    } else {
        p = load_input_distribution(cfg, in_path);
        j = p->j;
        grid = p->grid;
        if (route != "kernel") coeffs = multipoles_from_probabilities(*p);
    }

    for (int s : cfg.s_values) {
        QPDGrid result;
        std::optional<double> discrepancy;
        if (route == "multipole" || (route == "both" && coeffs)) {
            result = qpd_from_multipoles(*coeffs, s, grid);
            if (route == "both" && p) {
                const QPDGrid via_kernel = qpd_from_probabilities(*p, s, grid);
                double worst = 0.0;
                for (std::size_t i = 0; i < result.values.size(); ++i)
                    worst = std::max(worst, std::abs(result.values[i] - via_kernel.values[i]));
                discrepancy = worst;
            }
        } else {
            result = qpd_from_probabilities(*p, s, grid);
        }

        if (s == 0) {
            double norm = 0.0;
            for (std::size_t i = 0; i < grid.size(); ++i)
                norm += grid.weights[i] * result.values[i];
            norm *= (j.twice() + 1.0) / kFourPi;
            std::printf("s=0 normalization check: (2j+1)/(4pi) sum w W = %.12f (deviation %.3e)\n",
                        norm, std::abs(norm - 1.0));
        }

        std::ostringstream out;
        io::write_qpd_csv(out, result, discrepancy);
        save_stream(dir / ("qpd_s" + std::to_string(s) + ".csv"), out);
    }
    return 0;
}

int cmd_sweep(const ExperimentConfig& cfg) {
    if (!cfg.sweep) throw ConfigError("config error at sweep: sweep requires a sweep section");
    if (!cfg.state) throw ConfigError("config error at state: sweep requires a state");
    if (cfg.is_two_mode())
        throw ConfigError("config error at state: sweep supports single-j states only");
    require_two_j(cfg);
    const fs::path dir = ensure_output_dir(cfg);

    const DensityMatrix rho = build_density(*cfg.state, cfg.j());
    const SphereGrid grid = build_grid(cfg.j(), cfg.oversample);
    const HalfInteger mu = cfg.readout_mu();
    const SweepSpec& sweep = *cfg.sweep;

    double baseline_error = 0.0;
    if (sweep.include_exact) {
        const ProbabilityGrid p = exact_probability_grid(rho, grid, mu);
        baseline_error =
            max_abs_diff(rho, density_from_multipoles(multipoles_from_probabilities(p)));
    }

    std::ostringstream csv;
    csv << "shots,median_err,q25,q75\n";
    if (sweep.include_exact)
        csv << "0," << io::format_double(baseline_error) << ','
            << io::format_double(baseline_error) << ',' << io::format_double(baseline_error)
            << "\n";

    nlohmann::json level_entries = nlohmann::json::array();
    std::vector<double> log_shots, log_median;
    for (std::size_t level = 0; level < sweep.shot_levels.size(); ++level) {
        const long long shots = sweep.shot_levels[level];
        std::vector<double> errs;
        for (int k = 0; k < sweep.seeds; ++k) {
            auto seeder = rng::stream(cfg.seed, level + 1, static_cast<std::uint64_t>(k));
            const MeasurementRecord rec = sample_measurements(rho, grid, shots, seeder.next());
            const ProbabilityGrid p = record_to_probability_grid(rec, mu);
            errs.push_back(
                max_abs_diff(rho, density_from_multipoles(multipoles_from_probabilities(p))));
        }
        std::sort(errs.begin(), errs.end());
        const auto quantile = [&](double q) {
            const double pos = q * (static_cast<double>(errs.size()) - 1.0);
            const std::size_t lo = static_cast<std::size_t>(pos);
            const std::size_t hi = std::min(lo + 1, errs.size() - 1);
            return errs[lo] + (pos - static_cast<double>(lo)) * (errs[hi] - errs[lo]);
        };
        const double med = quantile(0.5), q25 = quantile(0.25), q75 = quantile(0.75);
        csv << shots << ',' << io::format_double(med) << ',' << io::format_double(q25) << ','
            << io::format_double(q75) << "\n";
        level_entries.push_back({{"shots", shots}, {"median", med}, {"q25", q25}, {"q75", q75}});
        log_shots.push_back(std::log(static_cast<double>(shots)));
        log_median.push_back(std::log(med));
    }

    const double n = static_cast<double>(log_shots.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < log_shots.size(); ++i) {
        sx += log_shots[i];
        sy += log_median[i];
        sxx += log_shots[i] * log_shots[i];
        sxy += log_shots[i] * log_median[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);

    save_stream(dir / "sweep.csv", csv);
    nlohmann::json report{{"config", cfg.raw},
                          {"slope", slope},
                          {"levels", std::move(level_entries)},
                          {"seeds", sweep.seeds}};
    if (sweep.include_exact) report["baseline_error"] = baseline_error;
    io::save_json(dir / "sweep_report.json", report);
    std::printf("wrote %s (slope %.4f)\n", (dir / "sweep_report.json").string().c_str(), slope);
    return 0;
}

int cmd_jc(const ExperimentConfig& cfg, const std::string& populations_path) {
    if (!cfg.jc) throw ConfigError("config error at jc: jc requires a jc parameter section");
    const fs::path dir = ensure_output_dir(cfg);

    const nlohmann::json doc = io::load_json(populations_path);
    std::vector<double> populations;
    const nlohmann::json& array = doc.is_array() ? doc : doc.at("populations");
    for (const auto& value : array) populations.push_back(value.get<double>());

    const JCReadoutParams& params = *cfg.jc;
    const std::vector<double> clean = jc_signal(populations, params);

    std::vector<double> signal = clean;
    if (cfg.shots > 0) {
        for (std::size_t i = 0; i < signal.size(); ++i) {
            auto gen = rng::stream(cfg.seed, i);
            signal[i] = static_cast<double>(rng::binomial(gen, cfg.shots, clean[i])) /
                        static_cast<double>(cfg.shots);
        }
    }

    const JCInversion inversion = jc_invert(signal, params);

    std::ostringstream csv;
    csv << "t,signal\n";
    for (std::size_t i = 0; i < params.times.size(); ++i)
        csv << io::format_double(params.times[i]) << ',' << io::format_double(signal[i]) << "\n";
    save_stream(dir / "jc_signal.csv", csv);

    io::save_json(dir / "jc_populations.json",
                  {{"populations", inversion.populations},
                   {"residual_norm", inversion.residual_norm},
                   {"condition_number", inversion.condition_number},
                   {"shots", cfg.shots},
                   {"seed", cfg.seed}});
    std::printf("wrote %s\n", (dir / "jc_populations.json").string().c_str());
    return 0;
}

} // namespace spintomo::cli
