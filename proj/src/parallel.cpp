#include "optstop/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace optstop {

namespace {

void validate(const HardwareCost& hc) {
    if (!(hc.time_rate >= 0.0) || !(hc.core_rate >= 0.0) ||
        (hc.time_rate == 0.0 && hc.core_rate == 0.0))
        throw std::invalid_argument("hardware cost: rates must be nonnegative, not both zero");
}

void validate(const ParallelPlan& plan) {
    if (plan.n_cpu < 1 || !(plan.n_imp >= 1.0) ||
        plan.n_imp > static_cast<double>(plan.n_cpu))
        throw std::invalid_argument("parallel plan: need 1 <= n_imp <= n_cpu");
}

}  // namespace

EnergyDistribution embarrassing_transform(const EnergyDistribution& d, long n_cpu) {
    if (n_cpu < 1) throw std::invalid_argument("embarrassing_transform: need n_cpu >= 1");
    if (n_cpu == 1) return d;
    const double k = static_cast<double>(n_cpu);
    std::vector<double> support, weights;
    support.reserve(d.size());
    weights.reserve(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        // P(min = e_i) = S_{i-1}^k - S_i^k over the exact suffix weights
        const double w = std::pow(d.weight_from(i), k) - std::pow(d.weight_from(i + 1), k);
        if (w > 0.0) {
            support.push_back(d.support()[i]);
            weights.push_back(w);
        }
    }
    return EnergyDistribution(std::move(support), std::move(weights));
}

double effective_unit_cost(const HardwareCost& hc, const ParallelPlan& plan, ParallelMode mode) {
    validate(hc);
    validate(plan);
    const double n = static_cast<double>(plan.n_cpu);
    switch (mode) {
        case ParallelMode::none:
            return hc.time_rate + hc.core_rate;
        case ParallelMode::embarrassing:
            return hc.time_rate + hc.core_rate * n;
        case ParallelMode::perfect:
            return hc.time_rate / n + hc.core_rate;
        case ParallelMode::imperfect:
            return (hc.time_rate + hc.core_rate * n) / plan.n_imp;
    }
    throw std::invalid_argument("effective_unit_cost: unknown mode");
}

double evaluate_plan(const EnergyDistribution& d, const HardwareCost& hc,
                     const ParallelPlan& plan, double t_run, ParallelMode mode) {
    const CostModel cm{effective_unit_cost(hc, plan, mode), t_run};
    if (mode == ParallelMode::embarrassing)
        return solve_optimal_cost(embarrassing_transform(d, plan.n_cpu), cm);
    return solve_optimal_cost(d, cm);
}

CoreChoice optimal_cores(const EnergyDistribution& d, const HardwareCost& hc, double t_run,
                         std::span<const long> n_range) {
    validate(hc);
    if (n_range.empty()) throw EmptyRange("optimal_cores: empty core range");
    std::vector<long> ns(n_range.begin(), n_range.end());
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    CoreChoice best;
    bool first = true;
    for (long n : ns) {
        if (n < 1) throw std::invalid_argument("optimal_cores: core counts must be >= 1");
        const CostModel cm{hc.time_rate / static_cast<double>(n) + hc.core_rate, t_run};
        const double cost = solve_optimal_cost(d, cm);
        if (first || cost < best.cost) {
            best = {n, cost};
            first = false;
        }
    }
    return best;
}

std::vector<MixedSplit> mixed_split_scan(const EnergyDistribution& d, const HardwareCost& hc,
                                         double t_run, long n_total) {
    validate(hc);
    if (n_total < 1) throw EmptyRange("mixed_split_scan: need at least one core");
    std::vector<MixedSplit> frontier;
    frontier.reserve(static_cast<std::size_t>(n_total));
    for (long width = 1; width <= n_total; ++width) {
        const double speedup = static_cast<double>(n_total / width);
        const double unit = (hc.time_rate + hc.core_rate * static_cast<double>(n_total)) / speedup;
        const double cost =
            solve_optimal_cost(embarrassing_transform(d, width), CostModel{unit, t_run});
        frontier.push_back({width, speedup, cost});
    }
    return frontier;
}

}  // namespace optstop
