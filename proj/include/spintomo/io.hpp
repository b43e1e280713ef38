#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "spintomo/measure.hpp"
#include "spintomo/reconstruction.hpp"
#include "spintomo/states.hpp"

namespace spintomo::io {

// binary64 -> shortest text that round-trips (17 significant digits)
std::string format_double(double value);

// {"two_j": int, "re": [[...]], "im": [[...]]}
nlohmann::json density_to_json(const DensityMatrix& rho);
DensityMatrix density_from_json(const nlohmann::json& doc);

// {"two_j": int, "coeffs": [{"l": int, "m": int, "re": float, "im": float}]}
nlohmann::json multipoles_to_json(const MultipoleCoefficients& coeffs);
MultipoleCoefficients multipoles_from_json(const nlohmann::json& doc);

// CSV columns: theta, phi, weight, shots, then one count column per outcome
// labeled c_<2mu> with mu = j ... -j.
void write_measurement_csv(std::ostream& out, const MeasurementRecord& rec);
MeasurementRecord read_measurement_csv(std::istream& in, const std::string& name);

// CSV columns: theta, phi, weight, shots, p (shots = 0 marks exact values).
void write_probability_csv(std::ostream& out, const ProbabilityGrid& grid);
ProbabilityGrid read_probability_csv(std::istream& in, const std::string& name);

// CSV columns: theta, phi, weight, value; optional footer comment records the
// discrepancy between the multipole and kernel routes.
void write_qpd_csv(std::ostream& out, const QPDGrid& grid,
                   std::optional<double> route_discrepancy = std::nullopt);

// File wrappers; failures raise IoError naming the path (and line for parses).
void save_text(const std::filesystem::path& path, const std::string& content);
nlohmann::json load_json(const std::filesystem::path& path);
void save_json(const std::filesystem::path& path, const nlohmann::json& doc);
MeasurementRecord load_measurement_csv(const std::filesystem::path& path);
ProbabilityGrid load_probability_csv(const std::filesystem::path& path);

} // namespace spintomo::io
