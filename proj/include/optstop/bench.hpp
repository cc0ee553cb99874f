#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "optstop/annealing.hpp"
#include "optstop/stopping.hpp"

namespace optstop {

/// Log-spaced unit-cost grid with a fixed density per decade.
struct CGrid {
    double min_c = 0.0;
    double max_c = 0.0;
    int points_per_decade = 25;

    std::vector<double> values() const;
};

struct BootstrapOptions {
    int replicates = 1000;
    double tail_percentile = 0.1;  // lower tail, in percent
};

/// One benchmark campaign: instances (loaded and/or generated complete
/// graphs), a sweep-count grid, a unit-cost grid, and output locations.
struct BenchmarkConfig {
    std::vector<std::string> instance_paths;
    std::vector<long> generate_sizes;  // complete-graph sizes to generate
    int generate_count = 1;            // instances per size
    std::vector<long> schedules;       // n_sweeps candidates
    long runs = 1;
    CGrid c_grid;
    double t_per_sweep = 1.0;
    double t_init = 10.0;
    double t_fin = 1.0 / 3.0;
    std::string e0_mode = "auto";  // "auto": brute force for N <= 25, else best seen; "none"
    std::optional<BootstrapOptions> bootstrap;
    std::string output_dir = "out";
    bool write_samples = true;
};

BenchmarkConfig benchmark_config_from_json(const std::string& text);

/// Runs the campaign: per instance and sweep count a deterministic sample
/// batch, the empirical distribution and the full cost split over the
/// c-grid, plus the run-length envelope. All outputs are byte-stable for a
/// fixed config and master seed, independent of the worker count.
void run_benchmark(const BenchmarkConfig& config, std::uint64_t master_seed, int workers);

struct ErrorBar {
    double unit_cost = 0.0;
    double mean_cost = 0.0;
    double std_cost = 0.0;
    bool in_tail = false;  // mean optimal cost below the tail threshold
};

/// Bootstrap error bars of the optimal total cost: each of B seeded
/// replicates resamples the data, replaces its lower tail (at the given
/// percentile) by a GPD fit, and solves the optimality equation over the
/// c-grid.
std::vector<ErrorBar> bootstrap_error_bars(std::span<const double> samples, int replicates,
                                           double tail_percentile,
                                           std::span<const double> c_grid, const CostModel& cm,
                                           std::uint64_t seed);

}  // namespace optstop
