#pragma once

#include <span>
#include <vector>

#include "optstop/stopping.hpp"

namespace optstop {

/// Core allocation: n_cpu independent processes, of which an imperfect
/// speedup factor n_imp <= n_cpu can be turned into shorter run times.
struct ParallelPlan {
    long n_cpu = 1;
    double n_imp = 1.0;
};

/// Two-part cost rate: c_t charges the flow of wall-clock time, c_cpu charges
/// each core for the same duration.
struct HardwareCost {
    double time_rate = 0.0;  // c_t >= 0
    double core_rate = 0.0;  // c_cpu >= 0; not both zero
};

enum class ParallelMode { none, embarrassing, perfect, imperfect };

/// Distribution of the minimum of n_cpu i.i.d. draws, exact on the discrete
/// support: CDF' = 1 - (1 - CDF)^n_cpu.
EnergyDistribution embarrassing_transform(const EnergyDistribution& d, long n_cpu);

/// Unit cost after the mode's rescaling: perfect divides the time rate by the
/// width, imperfect divides the whole rate by the achieved speedup,
/// embarrassing pays for every core at full run time.
double effective_unit_cost(const HardwareCost& hc, const ParallelPlan& plan, ParallelMode mode);

/// Optimal cost of the plan: applies the mode's distribution and/or cost
/// transform, then solves the optimality equation.
double evaluate_plan(const EnergyDistribution& d, const HardwareCost& hc,
                     const ParallelPlan& plan, double t_run, ParallelMode mode);

struct CoreChoice {
    long n_cpu = 1;
    double cost = 0.0;
};

/// Scan of the core count under the embarrassing strategy, modeled through
/// its perfect-equivalent rescaling c_t/n + c_cpu. Ties break toward fewer
/// cores.
CoreChoice optimal_cores(const EnergyDistribution& d, const HardwareCost& hc, double t_run,
                         std::span<const long> n_range);

struct MixedSplit {
    long width = 1;      // embarrassing width
    double speedup = 1;  // imperfect speedup of each process
    double cost = 0.0;
};

/// Grid search over ways to split n_total cores between embarrassing width
/// and per-process speedup; returns one entry per width, best last computed
/// by the caller via min_element.
std::vector<MixedSplit> mixed_split_scan(const EnergyDistribution& d, const HardwareCost& hc,
                                         double t_run, long n_total);

}  // namespace optstop
