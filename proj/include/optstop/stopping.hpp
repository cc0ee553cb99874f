#pragma once

#include <cstdint>
#include <span>
#include <utility>

#include "optstop/distribution.hpp"

namespace optstop {

/// Linear cost model: stopping after n draws costs n * unit_cost * run_time
/// on top of the best energy found.
struct CostModel {
    double unit_cost = 0.0;  // c >= 0, in energy per unit time
    double run_time = 1.0;   // t_run > 0, time per solver call

    double cost_per_draw() const { return unit_cost * run_time; }
};

/// Solution bundle of the optimality equation for one distribution and cost
/// model: optimal_cost = optimal_energy + optimal_effort.
struct StoppingSolution {
    double optimal_cost = 0.0;   // C*
    double mean_stop_step = 1.0; // n* >= 1
    double optimal_energy = 0.0; // E* = E[e | e <= C*]
    double optimal_effort = 0.0; // T* = n* * c * t_run
};

/// Unique root C* of partial_expectation(d, C) = c * t_run. The integral is
/// piecewise linear on the support brackets, so each segment is solved in
/// closed form; no iterative root-finding is involved. c == 0 returns the
/// minimum support value.
double solve_optimal_cost(const EnergyDistribution& d, const CostModel& cm);

/// Same equation against a continuous Gaussian estimate, where
/// partial_expectation(C) = (C - m) * Phi(z) + s * phi(z). Solved numerically
/// to 1e-10; throws DomainError if bracketing fails.
double solve_optimal_cost(const GaussianParams& g, const CostModel& cm);

/// Same equation against a spliced empirical/GPD estimate: closed form on the
/// tail piece, bracket scan on the body.
double solve_optimal_cost(const SplicedDistribution& s, const CostModel& cm);

/// n* = 1 / P(e <= target).
double mean_stopping_step(const EnergyDistribution& d, double target);

/// C*, n*, E*, T* in one pass.
StoppingSolution split_cost(const EnergyDistribution& d, const CostModel& cm);

/// dC*/dc = t_run / CDF(C*); kinks report the right derivative.
double cost_sensitivity(const EnergyDistribution& d, double target, const CostModel& cm);

/// First-order propagation of a signed tail-mass perturbation into C*:
/// sum(e * dp(e)) / CDF(C*).
double tail_error_estimate(const EnergyDistribution& d,
                           std::span<const std::pair<double, double>> perturbation,
                           double target);

/// t_run * log(1 - p_d) / log(1 - p): time to reach a target hit with
/// per-run probability p at confidence p_d.
double time_to_target(double p, double p_d, double t_run);

/// Expected minimum of n_draws i.i.d. energies (the fixed-window reduction of
/// the stopping problem: stop at n = floor(T / t_run)).
double expected_best_energy(const EnergyDistribution& d, long n_draws);

/// Draw energies until one falls at or below the target; returns
/// min(e_1..e_n) + n * c * t_run. Deterministic given seed.
double simulate_stopped_sequence(const EnergyDistribution& d, const CostModel& cm,
                                 double target, std::uint64_t seed);

}  // namespace optstop
