#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "optstop/annealing.hpp"
#include "optstop/distribution.hpp"

namespace optstop {

/// RFC-4180 field quoting: quotes are added only when the field contains a
/// comma, a quote or a line break.
std::string csv_escape(const std::string& field);

/// Round-trip formatting for doubles ("%.17g"); integral values print without
/// a fraction so CSV output stays stable and diffable.
std::string format_double(double x);

/// Parses RFC-4180 CSV content (quoted fields, doubled quotes, CRLF).
std::vector<std::vector<std::string>> parse_csv(const std::string& content);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

/// Samples file `run_index,energy`; extra columns are ignored.
std::vector<double> read_samples_csv(const std::filesystem::path& path);

/// Sample archive `run_index,energy,n_sweeps,seed`.
std::string samples_to_csv(std::span<const SampleRecord> records);

/// `{"support": [...], "weights": [...]}`.
std::string distribution_to_json(const EnergyDistribution& d);
EnergyDistribution distribution_from_json(const std::string& text);

/// `{"support": [...], "concentrations": [...]}`, or a distribution object
/// with an optional "strength" scaling the weights into concentrations.
DirichletPosterior prior_from_json(const std::string& text);

/// `{"num_vars": N, "couplings": [[i, j, J], ...]}`.
std::string instance_to_json(const IsingInstance& inst);
IsingInstance instance_from_json(const std::string& text);

/// Fit input `size,value`.
std::vector<std::pair<double, double>> read_points_csv(const std::filesystem::path& path);

}  // namespace optstop
