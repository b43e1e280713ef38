#include "spintomo/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "spintomo/errors.hpp"

namespace spintomo::io {

namespace {

std::string csv_location(const std::string& name, std::size_t line) {
    return name + ":" + std::to_string(line);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_double(const std::string& text, const std::string& where) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw IoError(where + ": cannot parse number '" + text + "'");
    return value;
}

long long parse_int(const std::string& text, const std::string& where) {
    long long value = 0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw IoError(where + ": cannot parse integer '" + text + "'");
    return value;
}

// leading "# key=value ..." metadata line
std::map<std::string, std::string> parse_metadata(const std::string& line) {
    std::map<std::string, std::string> meta;
    std::stringstream ss(line.substr(1));
    std::string token;
    while (ss >> token) {
        const auto eq = token.find('=');
        if (eq != std::string::npos) meta[token.substr(0, eq)] = token.substr(eq + 1);
    }
    return meta;
}

struct CsvReader {
    std::istream& in;
    std::string name;
    std::size_t line_number = 0;
    std::map<std::string, std::string> metadata = {};

    SpherePoint parse_point(const std::string& theta_text, const std::string& phi_text) {
        const double theta = parse_double(theta_text, where());
        const double phi = parse_double(phi_text, where());
        if (theta < 0.0 || theta > 3.1415926535897936)
            throw IoError(where() + ": theta outside [0, pi]");
        return SpherePoint{theta, phi};
    }

    double parse_weight(const std::string& text) {
        const double weight = parse_double(text, where());
        if (weight <= 0.0) throw IoError(where() + ": quadrature weight must be > 0");
        return weight;
    }

    bool next_line(std::string& line) {
        while (std::getline(in, line)) {
            ++line_number;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            if (line.front() == '#') {
                auto meta = parse_metadata(line);
                metadata.insert(meta.begin(), meta.end());
                continue;
            }
            return true;
        }
        return false;
    }

    std::string where() const { return csv_location(name, line_number); }
};

} // namespace

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

nlohmann::json density_to_json(const DensityMatrix& rho) {
    const int dim = rho.dim();
    nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
    for (int r = 0; r < dim; ++r) {
        nlohmann::json re_row = nlohmann::json::array(), im_row = nlohmann::json::array();
        for (int c = 0; c < dim; ++c) {
            re_row.push_back(rho.matrix(r, c).real());
            im_row.push_back(rho.matrix(r, c).imag());
        }
        re.push_back(std::move(re_row));
        im.push_back(std::move(im_row));
    }
    return nlohmann::json{{"two_j", rho.j.twice()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

DensityMatrix density_from_json(const nlohmann::json& doc) {
    if (!doc.contains("two_j") || !doc.contains("re") || !doc.contains("im"))
        throw IoError("density JSON requires fields two_j, re, im");
    const int two_j = doc.at("two_j").get<int>();
    const int dim = two_j + 1;
    const auto& re = doc.at("re");
    const auto& im = doc.at("im");
    if (static_cast<int>(re.size()) != dim || static_cast<int>(im.size()) != dim)
        throw IoError("density JSON: matrix size does not match two_j");
    DensityMatrix rho{HalfInteger::from_twice(two_j), Eigen::MatrixXcd(dim, dim)};
    for (int r = 0; r < dim; ++r) {
        if (static_cast<int>(re[r].size()) != dim || static_cast<int>(im[r].size()) != dim)
            throw IoError("density JSON: ragged matrix rows");
        for (int c = 0; c < dim; ++c)
            rho.matrix(r, c) = Complex(re[r][c].get<double>(), im[r][c].get<double>());
    }
    return rho;
}

nlohmann::json multipoles_to_json(const MultipoleCoefficients& coeffs) {
    nlohmann::json entries = nlohmann::json::array();
    for (int l = 0; l <= coeffs.lmax(); ++l)
        for (int m = -l; m <= l; ++m) {
            const Complex value = coeffs.at(l, m);
            entries.push_back({{"l", l}, {"m", m}, {"re", value.real()}, {"im", value.imag()}});
        }
    return nlohmann::json{{"two_j", coeffs.j.twice()}, {"coeffs", std::move(entries)}};
}

MultipoleCoefficients multipoles_from_json(const nlohmann::json& doc) {
    if (!doc.contains("two_j") || !doc.contains("coeffs"))
        throw IoError("multipole JSON requires fields two_j, coeffs");
    MultipoleCoefficients coeffs =
        MultipoleCoefficients::zero(HalfInteger::from_twice(doc.at("two_j").get<int>()));
    for (const auto& entry : doc.at("coeffs")) {
        const int l = entry.at("l").get<int>();
        const int m = entry.at("m").get<int>();
        coeffs.at(l, m) = Complex(entry.at("re").get<double>(), entry.at("im").get<double>());
    }
    return coeffs;
}

void write_measurement_csv(std::ostream& out, const MeasurementRecord& rec) {
    out << "# two_j=" << rec.j.twice() << " seed=" << rec.seed << "\n";
    out << "theta,phi,weight,shots";
    for (int col = 0; col < dimension(rec.j); ++col)
        out << ",c_" << projection_at(rec.j, col).twice();
    out << "\n";
    for (std::size_t i = 0; i < rec.grid.size(); ++i) {
        out << format_double(rec.grid.points[i].theta) << ','
            << format_double(rec.grid.points[i].phi) << ','
            << format_double(rec.grid.weights[i]) << ','
            << rec.row_total(static_cast<Eigen::Index>(i));
        for (int col = 0; col < dimension(rec.j); ++col)
            out << ',' << rec.counts(static_cast<Eigen::Index>(i), col);
        out << "\n";
    }
}

MeasurementRecord read_measurement_csv(std::istream& in, const std::string& name) {
    CsvReader reader{.in = in, .name = name};
    std::string line;
    if (!reader.next_line(line)) throw IoError(name + ": empty measurement CSV");
    const auto header = split_fields(line);
    if (header.size() < 5 || header[0] != "theta" || header[1] != "phi" ||
        header[2] != "weight" || header[3] != "shots")
        throw IoError(reader.where() + ": expected header theta,phi,weight,shots,c_<2mu>...");
    const int dim = static_cast<int>(header.size()) - 4;
    for (int col = 0; col < dim; ++col) {
        const std::string expected = "c_" + std::to_string(dim - 1 - 2 * col);
        if (header[static_cast<std::size_t>(col) + 4] != expected)
            throw IoError(reader.where() + ": expected count column '" + expected + "', got '" +
                          header[static_cast<std::size_t>(col) + 4] + "'");
    }

    MeasurementRecord rec;
    rec.j = HalfInteger::from_twice(dim - 1);
    std::vector<std::vector<long long>> rows;
    while (reader.next_line(line)) {
        const auto fields = split_fields(line);
        if (static_cast<int>(fields.size()) != dim + 4)
            throw IoError(reader.where() + ": expected " + std::to_string(dim + 4) +
                          " fields, got " + std::to_string(fields.size()));
        rec.grid.points.push_back(reader.parse_point(fields[0], fields[1]));
        rec.grid.weights.push_back(reader.parse_weight(fields[2]));
        const long long shots = parse_int(fields[3], reader.where());
        std::vector<long long> counts(static_cast<std::size_t>(dim));
        long long total = 0;
        for (int col = 0; col < dim; ++col) {
            counts[static_cast<std::size_t>(col)] =
                parse_int(fields[static_cast<std::size_t>(col) + 4], reader.where());
            total += counts[static_cast<std::size_t>(col)];
        }
        if (total != shots)
            throw IoError(reader.where() + ": counts sum to " + std::to_string(total) +
                          " but shots column says " + std::to_string(shots));
        if (rows.empty()) rec.shots_per_point = shots;
        else if (shots != rec.shots_per_point)
            rec.shots_per_point = 0; // thinned record with per-point totals
        rows.push_back(std::move(counts));
    }
    if (rows.empty()) throw IoError(name + ": measurement CSV has no data rows");
    if (auto it = reader.metadata.find("seed"); it != reader.metadata.end())
        rec.seed = static_cast<std::uint64_t>(parse_int(it->second, name + ": metadata"));
    rec.counts.resize(static_cast<Eigen::Index>(rows.size()), dim);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (int c = 0; c < dim; ++c)
            rec.counts(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
    return rec;
}

void write_probability_csv(std::ostream& out, const ProbabilityGrid& grid) {
    out << "# two_j=" << grid.j.twice() << " readout_two_mu=" << grid.mu.twice() << "\n";
    out << "theta,phi,weight,shots,p\n";
    for (std::size_t i = 0; i < grid.grid.size(); ++i) {
        const long long shots =
            grid.row_shots.empty() ? grid.shots_per_point : grid.row_shots[i];
        out << format_double(grid.grid.points[i].theta) << ','
            << format_double(grid.grid.points[i].phi) << ','
            << format_double(grid.grid.weights[i]) << ',' << shots << ','
            << format_double(grid.values[i]) << "\n";
    }
}

ProbabilityGrid read_probability_csv(std::istream& in, const std::string& name) {
    CsvReader reader{.in = in, .name = name};
    std::string line;
    if (!reader.next_line(line)) throw IoError(name + ": empty probability CSV");
    const auto header = split_fields(line);
    if (header.size() != 5 || header[0] != "theta" || header[1] != "phi" ||
        header[2] != "weight" || header[3] != "shots" || header[4] != "p")
        throw IoError(reader.where() + ": expected header theta,phi,weight,shots,p");
    const auto two_j_it = reader.metadata.find("two_j");
    const auto mu_it = reader.metadata.find("readout_two_mu");
    if (two_j_it == reader.metadata.end() || mu_it == reader.metadata.end())
        throw IoError(name + ": missing '# two_j=<int> readout_two_mu=<int>' metadata line");

    ProbabilityGrid grid;
    grid.j = HalfInteger::from_twice(
        static_cast<int>(parse_int(two_j_it->second, name + ": metadata")));
    grid.mu = HalfInteger::from_twice(
        static_cast<int>(parse_int(mu_it->second, name + ": metadata")));
    std::vector<long long> row_shots;
    while (reader.next_line(line)) {
        const auto fields = split_fields(line);
        if (fields.size() != 5)
            throw IoError(reader.where() + ": expected 5 fields, got " +
                          std::to_string(fields.size()));
        grid.grid.points.push_back(reader.parse_point(fields[0], fields[1]));
        grid.grid.weights.push_back(reader.parse_weight(fields[2]));
        row_shots.push_back(parse_int(fields[3], reader.where()));
        const double p = parse_double(fields[4], reader.where());
        if (p < -1e-12 || p > 1.0 + 1e-12)
            throw IoError(reader.where() + ": probability outside [0, 1]");
        grid.values.push_back(p);
    }
    if (grid.values.empty()) throw IoError(name + ": probability CSV has no data rows");
    const bool uniform =
        std::all_of(row_shots.begin(), row_shots.end(),
                    [&](long long s) { return s == row_shots.front(); });
    if (uniform) {
        grid.shots_per_point = row_shots.front();
    } else {
        grid.shots_per_point = 0;
        grid.row_shots = std::move(row_shots);
    }
    return grid;
}

void write_qpd_csv(std::ostream& out, const QPDGrid& grid,
                   std::optional<double> route_discrepancy) {
    out << "# two_j=" << grid.j.twice() << " s=" << grid.s << "\n";
    out << "theta,phi,weight,value\n";
    for (std::size_t i = 0; i < grid.grid.size(); ++i) {
        out << format_double(grid.grid.points[i].theta) << ','
            << format_double(grid.grid.points[i].phi) << ','
            << format_double(grid.grid.weights[i]) << ','
            << format_double(grid.values[i]) << "\n";
    }
    if (route_discrepancy)
        out << "# max_route_discrepancy=" << format_double(*route_discrepancy) << "\n";
}

void save_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw IoError("failed writing " + path.string());
}

nlohmann::json load_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& err) {
        throw IoError(path.string() + ": " + err.what());
    }
}

void save_json(const std::filesystem::path& path, const nlohmann::json& doc) {
    save_text(path, doc.dump(2) + "\n");
}

MeasurementRecord load_measurement_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return read_measurement_csv(in, path.string());
}

ProbabilityGrid load_probability_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return read_probability_csv(in, path.string());
}

} // namespace spintomo::io
