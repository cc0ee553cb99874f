#include "optstop/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace optstop {

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        out += c;
        if (c == '"') out += '"';
    }
    out += '"';
    return out;
}

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& content) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    for (std::size_t i = 0; i < content.size(); ++i) {
        const char c = content[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < content.size() && content[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                quoted = true;
                field_started = true;
                break;
            case ',':
                row.push_back(std::move(field));
                field.clear();
                field_started = true;
                break;
            case '\r':
                break;
            case '\n':
                if (field_started || !field.empty() || !row.empty()) {
                    row.push_back(std::move(field));
                    rows.push_back(std::move(row));
                }
                field.clear();
                row.clear();
                field_started = false;
                break;
            default:
                field += c;
                field_started = true;
        }
    }
    if (field_started || !field.empty() || !row.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
}

namespace {

double parse_number(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw IoError("bad " + what + " value: '" + s + "'");
    }
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw IoError("missing column '" + name + "' in CSV header");
}

}  // namespace

std::vector<double> read_samples_csv(const std::filesystem::path& path) {
    const auto rows = parse_csv(read_file(path));
    if (rows.empty()) throw IoError("empty samples file: " + path.string());
    const std::size_t col = column_index(rows.front(), "energy");
    std::vector<double> energies;
    energies.reserve(rows.size() - 1);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() <= col) throw IoError("short row in " + path.string());
        energies.push_back(parse_number(rows[r][col], "energy"));
    }
    if (energies.empty()) throw IoError("no samples in " + path.string());
    return energies;
}

std::string samples_to_csv(std::span<const SampleRecord> records) {
    std::string out = "run_index,energy,n_sweeps,seed\n";
    for (const auto& r : records) {
        out += std::to_string(r.run_index);
        out += ',';
        out += format_double(r.energy);
        out += ',';
        out += std::to_string(r.n_sweeps);
        out += ',';
        out += std::to_string(r.seed);
        out += '\n';
    }
    return out;
}

std::string distribution_to_json(const EnergyDistribution& d) {
    nlohmann::json j;
    j["support"] = std::vector<double>(d.support().begin(), d.support().end());
    j["weights"] = std::vector<double>(d.weights().begin(), d.weights().end());
    return j.dump();
}

EnergyDistribution distribution_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        return EnergyDistribution(j.at("support").get<std::vector<double>>(),
                                  j.at("weights").get<std::vector<double>>());
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("bad distribution JSON: ") + e.what());
    }
}

DirichletPosterior prior_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        auto support = j.at("support").get<std::vector<double>>();
        if (j.contains("concentrations"))
            return DirichletPosterior(std::move(support),
                                      j.at("concentrations").get<std::vector<double>>());
        auto conc = j.at("weights").get<std::vector<double>>();
        const double strength = j.value("strength", 1.0);
        for (double& v : conc) v *= strength;
        return DirichletPosterior(std::move(support), std::move(conc));
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("bad prior JSON: ") + e.what());
    }
}

std::string instance_to_json(const IsingInstance& inst) {
    nlohmann::json j;
    j["num_vars"] = inst.num_vars();
    auto& couplings = j["couplings"] = nlohmann::json::array();
    for (const auto& c : inst.couplings()) couplings.push_back({c.i, c.j, c.value});
    return j.dump();
}

IsingInstance instance_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        std::vector<Coupling> couplings;
        for (const auto& row : j.at("couplings"))
            couplings.push_back({row.at(0).get<int>(), row.at(1).get<int>(), row.at(2).get<int>()});
        return IsingInstance(j.at("num_vars").get<long>(), std::move(couplings));
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("bad instance JSON: ") + e.what());
    }
}

std::vector<std::pair<double, double>> read_points_csv(const std::filesystem::path& path) {
    const auto rows = parse_csv(read_file(path));
    if (rows.empty()) throw IoError("empty points file: " + path.string());
    const std::size_t sc = column_index(rows.front(), "size");
    const std::size_t vc = column_index(rows.front(), "value");
    std::vector<std::pair<double, double>> points;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() <= std::max(sc, vc)) throw IoError("short row in " + path.string());
        points.emplace_back(parse_number(rows[r][sc], "size"), parse_number(rows[r][vc], "value"));
    }
    return points;
}

}  // namespace optstop
