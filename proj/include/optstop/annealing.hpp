#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "optstop/distribution.hpp"

namespace optstop {

struct Coupling {
    int i = 0;
    int j = 0;
    int value = 0;  // J_ij, nonzero integer
};

/// Ising problem H = sum_{i<j} J_ij s_i s_j over spins s_i = +-1. Couplings
/// are normalized to i < j; duplicates and zero couplings are rejected.
class IsingInstance {
public:
    IsingInstance(long num_vars, std::vector<Coupling> couplings);

    long num_vars() const { return num_vars_; }
    std::span<const Coupling> couplings() const { return couplings_; }

    double energy(std::span<const std::int8_t> spins) const;

private:
    long num_vars_;
    std::vector<Coupling> couplings_;
};

/// Linear temperature schedule: sweep s of n_sweeps runs at
/// t_init + (t_fin - t_init) * s / (n_sweeps - 1), endpoints inclusive.
/// A single sweep runs at t_init.
struct AnnealSchedule {
    double t_init = 10.0;
    double t_fin = 1.0 / 3.0;
    long n_sweeps = 0;  // one sweep = N sequential spin updates
};

struct SampleRecord {
    double energy = 0.0;
    long n_sweeps = 0;
    std::uint64_t seed = 0;
    long run_index = 0;
};

/// Complete graph on n vertices with couplings uniform over +-{1..10};
/// deterministic given the seed.
IsingInstance generate_complete_instance(long n, std::uint64_t seed);

/// One simulated-annealing run: random +-1 start, sequential single-spin
/// Metropolis sweeps along the schedule, final-configuration energy.
SampleRecord sa_run(const IsingInstance& inst, const AnnealSchedule& sched, std::uint64_t seed);

struct GroundState {
    double e0 = 0.0;  // exact minimum energy
    double e1 = 0.0;  // lowest energy value strictly above e0 (+inf if none)
    std::vector<std::int8_t> config;
};

/// Exhaustive minimum over all 2^N configurations (Gray-code walk); N <= 25.
GroundState brute_force_ground_state(const IsingInstance& inst);

/// n_runs independent SA runs; run i is seeded with derive_seed(master, i),
/// so the output is byte-identical for any worker count.
std::vector<SampleRecord> sample_batch(const IsingInstance& inst, const AnnealSchedule& sched,
                                       long n_runs, std::uint64_t master_seed, int workers);

/// Visit counts per spin configuration (bitmask index, bit i set means
/// s_i = +1) of a fixed-temperature Metropolis chain; N <= 20.
std::vector<std::uint64_t> state_visit_counts(const IsingInstance& inst, double temperature,
                                              long n_updates, std::uint64_t seed);

struct RunLengthChoice {
    double unit_cost = 0.0;
    long n_sweeps = 0;
    double cost = 0.0;  // optimal total cost of the selected candidate
};

/// Lower envelope over run-length candidates: for each unit cost, the sweep
/// count whose distribution minimizes the optimal total cost, with
/// t_run = n_sweeps * t_per_sweep. Ties break toward fewer sweeps.
std::vector<RunLengthChoice> optimize_run_length(
    const std::map<long, EnergyDistribution>& curves, std::span<const double> c_grid,
    double t_per_sweep);

}  // namespace optstop
