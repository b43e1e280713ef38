#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "spintomo/errors.hpp"

namespace {

// 0 success, 2 configuration, 3 numeric/protocol, 4 I/O
int run(int argc, char** argv) {
    CLI::App app{"spintomo: SU(2) phase-space state reconstruction toolkit"};
    app.set_version_flag("--version", "spintomo 0.1.0");
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string input_path;
    std::string populations_path;
    std::string route = "both";
    long long shots_override = -1;
    long long seed_override = -1;
    bool project_psd = false;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "experiment configuration JSON")->required();
        cmd->add_option("--seed", seed_override, "override the configured RNG seed");
        cmd->add_option("--out", out_dir, "override the configured output directory");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "simulate displaced-projector data");
    add_common(simulate);
    simulate->add_option("--shots", shots_override, "shots per grid point (0 = exact)");

    CLI::App* reconstruct =
        app.add_subcommand("reconstruct", "invert measured data into a density matrix");
    add_common(reconstruct);
    reconstruct->add_option("--input", input_path,
                            "probability/measurement CSV, or a directory of per-block CSVs")
        ->required();
    reconstruct->add_flag("--project-psd", project_psd,
                          "project the estimate onto the physical cone");

    CLI::App* qpd = app.add_subcommand("qpd", "compute quasiprobability distributions");
    add_common(qpd);
    qpd->add_option("--input", input_path, "density JSON or probability CSV")->required();
    CLI::Option* route_opt =
        qpd->add_option("--route", route, "multipole | kernel | both (default both; density "
                                          "input always uses multipole)");

    CLI::App* sweep = app.add_subcommand("sweep", "reconstruction error vs shots per point");
    add_common(sweep);

    CLI::App* jc = app.add_subcommand("jc", "Jaynes-Cummings readout signal and inversion");
    add_common(jc);
    jc->add_option("--populations", populations_path, "JSON array of level populations")
        ->required();
    jc->add_option("--shots", shots_override, "Bernoulli samples per time point (0 = noiseless)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : 2;
    }

    try {
        spintomo::cli::ExperimentConfig cfg = spintomo::cli::load_config(config_path);
        if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (shots_override >= 0) cfg.shots = shots_override;
        if (project_psd) cfg.project_psd = true;

        if (simulate->parsed()) return spintomo::cli::cmd_simulate(cfg);
        if (reconstruct->parsed()) return spintomo::cli::cmd_reconstruct(cfg, input_path);
        if (qpd->parsed()) {
            // density JSON carries no measured distribution for the kernel route
            if (route_opt->count() == 0 && input_path.size() > 5 &&
                input_path.substr(input_path.size() - 5) == ".json")
                route = "multipole";
            return spintomo::cli::cmd_qpd(cfg, input_path, route);
        }
        if (sweep->parsed()) return spintomo::cli::cmd_sweep(cfg);
        if (jc->parsed()) return spintomo::cli::cmd_jc(cfg, populations_path);
        return 2;
    } catch (const spintomo::cli::ConfigError& err) {
        std::fprintf(stderr, "%s\n", err.what());
        return 2;
    } catch (const std::domain_error& err) {
        std::fprintf(stderr, "config error: %s\n", err.what());
        return 2;
    } catch (const spintomo::NumericError& err) {
        std::fprintf(stderr, "numeric error: %s\n", err.what());
        return 3;
    } catch (const spintomo::ProtocolError& err) {
        std::fprintf(stderr, "protocol error: %s\n", err.what());
        return 3;
    } catch (const spintomo::IoError& err) {
        std::fprintf(stderr, "i/o error: %s\n", err.what());
        return 4;
    }
}

} // namespace

int main(int argc, char** argv) {
    return run(argc, argv);
}
