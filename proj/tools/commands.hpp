#pragma once

#include <filesystem>
#include <string>

#include "config.hpp"

namespace spintomo::cli {

// Each command returns 0 on success; failures surface as exceptions that
// main() maps onto exit codes.
int cmd_simulate(const ExperimentConfig& cfg);
int cmd_reconstruct(const ExperimentConfig& cfg, const std::string& input);
int cmd_qpd(const ExperimentConfig& cfg, const std::string& input, const std::string& route);
int cmd_sweep(const ExperimentConfig& cfg);
int cmd_jc(const ExperimentConfig& cfg, const std::string& populations_path);

} // namespace spintomo::cli
