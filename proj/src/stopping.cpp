#include "optstop/stopping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace optstop {

namespace {

void validate(const CostModel& cm) {
    if (!(cm.unit_cost >= 0.0) || !(cm.run_time > 0.0) || !std::isfinite(cm.unit_cost) ||
        !std::isfinite(cm.run_time))
        throw InvalidCost("cost model: need unit_cost >= 0 and run_time > 0");
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace

double solve_optimal_cost(const EnergyDistribution& d, const CostModel& cm) {
    validate(cm);
    const double budget = cm.cost_per_draw();
    if (budget == 0.0) return d.min_support();

    // I(C) is linear on [e_k, e_{k+1}] with slope cum_weight(k); find the
    // segment whose closed-form root lies inside it.
    const std::size_t m = d.size();
    for (std::size_t k = 0; k + 1 < m; ++k) {
        const double c = (budget + d.cum_weighted_support(k)) / d.cum_weight(k);
        if (c <= d.support()[k + 1]) return c;
    }
    return (budget + d.cum_weighted_support(m - 1)) / d.cum_weight(m - 1);
}

double solve_optimal_cost(const GaussianParams& g, const CostModel& cm) {
    validate(cm);
    if (!(g.stddev > 0.0)) throw std::invalid_argument("gaussian: stddev must be positive");
    const double budget = cm.cost_per_draw();
    if (budget == 0.0)
        throw DomainError("gaussian target: c = 0 has no finite solution for an unbounded tail");

    const auto integral = [&](double c) {
        const double z = (c - g.mean) / g.stddev;
        return (c - g.mean) * normal_cdf(z) + g.stddev * normal_pdf(z);
    };

    double hi = g.mean + budget + g.stddev;
    for (int i = 0; integral(hi) < budget; ++i) {
        if (i > 200) throw DomainError("gaussian target: bracketing failed");
        hi += g.stddev + budget;
    }
    double lo = g.mean - g.stddev;
    for (int i = 0; integral(lo) > budget; ++i) {
        if (i > 200) throw DomainError("gaussian target: bracketing failed");
        lo -= 2.0 * g.stddev;
    }
    while (hi - lo > 1e-10 * std::max({1.0, std::abs(lo), std::abs(hi)})) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (integral(mid) < budget ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double solve_optimal_cost(const SplicedDistribution& s, const CostModel& cm) {
    validate(cm);
    if (s.tail().heavy_tail())
        throw DomainError("spliced target: tail shape >= 1 makes the equation degenerate");
    const double budget = cm.cost_per_draw();
    const double mu = s.threshold();
    const double k = s.tail().shape;
    const double lam = s.tail().scale;
    const double w = s.tail_mass();
    if (budget == 0.0)
        return k < 0.0 ? mu - lam / -k : -std::numeric_limits<double>::infinity();

    if (budget < s.partial_expectation(mu)) {
        // Root below the threshold: invert the closed-form GPD piece,
        // w * survival(u) * (lam + k u) / (1 - k) = budget with u = mu - C.
        const double r = budget * (1.0 - k) / (w * lam);
        double u;
        if (std::abs(k) < 1e-12) {
            u = -lam * std::log(r);
        } else {
            u = lam * std::expm1(std::log(r) * k / (k - 1.0)) / k;
        }
        return mu - u;
    }

    // Root at or above the threshold: the tail contributes the linear term
    // w * (C - mu + lam / (1 - k)) on top of the body's bracket scan.
    const EnergyDistribution& body = s.body();
    const double tail_term = lam / (1.0 - k);
    const double bw = 1.0 - w;
    const std::size_t m = body.size();
    // segment between the threshold and the first body atom
    if (const double c = mu - tail_term + budget / w; c <= body.min_support()) return c;
    for (std::size_t j = 0; j + 1 < m; ++j) {
        const double slope = w + bw * body.cum_weight(j);
        const double offset = w * (mu - tail_term) + bw * body.cum_weighted_support(j);
        const double c = (budget + offset) / slope;
        if (c <= body.support()[j + 1]) return c;
    }
    const double slope = w + bw * body.cum_weight(m - 1);
    const double offset = w * (mu - tail_term) + bw * body.cum_weighted_support(m - 1);
    return (budget + offset) / slope;
}

double mean_stopping_step(const EnergyDistribution& d, double target) {
    const double p = d.cdf(target);
    if (p <= 0.0) throw UnreachableTarget("mean_stopping_step: CDF at the target is zero");
    return 1.0 / p;
}

StoppingSolution split_cost(const EnergyDistribution& d, const CostModel& cm) {
    const double target = solve_optimal_cost(d, cm);
    const double p = d.cdf(target);
    if (p <= 0.0) throw UnreachableTarget("split_cost: CDF at the target is zero");
    auto it = std::upper_bound(d.support().begin(), d.support().end(), target);
    const std::size_t i = static_cast<std::size_t>(it - d.support().begin()) - 1;
    StoppingSolution out;
    out.optimal_cost = target;
    out.mean_stop_step = 1.0 / p;
    out.optimal_energy = d.cum_weighted_support(i) / p;
    out.optimal_effort = cm.cost_per_draw() / p;
    return out;
}

double cost_sensitivity(const EnergyDistribution& d, double target, const CostModel& cm) {
    validate(cm);
    const double p = d.cdf(target);
    if (p <= 0.0) throw UnreachableTarget("cost_sensitivity: CDF at the target is zero");
    return cm.run_time / p;
}

double tail_error_estimate(const EnergyDistribution& d,
                           std::span<const std::pair<double, double>> perturbation,
                           double target) {
    const double p = d.cdf(target);
    if (p <= 0.0) throw UnreachableTarget("tail_error_estimate: CDF at the target is zero");
    double moment = 0.0;
    for (const auto& [e, dp] : perturbation) {
        if (!std::isfinite(e) || !std::isfinite(dp))
            throw NonFinite("tail_error_estimate: non-finite perturbation entry");
        moment += e * dp;
    }
    return moment / p;
}

double time_to_target(double p, double p_d, double t_run) {
    if (!(p > 0.0 && p < 1.0) || !(p_d > 0.0 && p_d < 1.0))
        throw DomainError("time_to_target: probabilities must lie in (0, 1)");
    if (!(t_run > 0.0)) throw InvalidCost("time_to_target: run_time must be positive");
    return t_run * std::log1p(-p_d) / std::log1p(-p);
}

double expected_best_energy(const EnergyDistribution& d, long n_draws) {
    if (n_draws < 1) throw std::invalid_argument("expected_best_energy: need n_draws >= 1");
    // P(min = e_i) = S_{i-1}^n - S_i^n with S_i the exact suffix weights.
    double acc = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double hi = std::pow(d.weight_from(i), static_cast<double>(n_draws));
        const double lo = std::pow(d.weight_from(i + 1), static_cast<double>(n_draws));
        acc += d.support()[i] * (hi - lo);
    }
    return acc;
}

double simulate_stopped_sequence(const EnergyDistribution& d, const CostModel& cm,
                                 double target, std::uint64_t seed) {
    validate(cm);
    if (d.cdf(target) <= 0.0)
        throw UnreachableTarget("simulate_stopped_sequence: target below the whole support");
    RngEngine rng = make_engine(seed);
    double best = std::numeric_limits<double>::infinity();
    std::uint64_t n = 0;
    double e;
    do {
        e = d.sample(rng);
        best = std::min(best, e);
        ++n;
    } while (e > target);
    return best + static_cast<double>(n) * cm.cost_per_draw();
}

}  // namespace optstop
