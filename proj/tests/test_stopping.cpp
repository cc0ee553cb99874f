#include "doctest.h"

#include <cmath>

#include "optstop/stopping.hpp"

using namespace optstop;
using doctest::Approx;

namespace {

EnergyDistribution two_point() { return EnergyDistribution({0.0, 1.0}, {0.5, 0.5}); }

EnergyDistribution random_distribution(RngEngine& rng, int max_atoms = 50) {
    const int m = 1 + static_cast<int>(uniform_index(rng, max_atoms));
    std::vector<double> support, weights;
    double e = -10.0 * uniform01(rng) - 1.0, total = 0.0;
    for (int i = 0; i < m; ++i) {
        support.push_back(e);
        e += 0.05 + 3.0 * uniform01(rng);
        weights.push_back(0.01 + uniform01(rng));
        total += weights.back();
    }
    for (auto& w : weights) w /= total;
    return EnergyDistribution(std::move(support), std::move(weights));
}

// brute-force expected minimum of n draws by enumerating all outcome tuples
double enumerate_best_of(const EnergyDistribution& d, int n) {
    const std::size_t m = d.size();
    std::vector<std::size_t> idx(n, 0);
    double acc = 0.0;
    while (true) {
        double prob = 1.0, best = d.support()[idx[0]];
        for (int t = 0; t < n; ++t) {
            prob *= d.weights()[idx[t]];
            best = std::min(best, d.support()[idx[t]]);
        }
        acc += prob * best;
        int t = n - 1;
        while (t >= 0 && ++idx[t] == m) idx[t--] = 0;
        if (t < 0) break;
    }
    return acc;
}

}  // namespace

TEST_CASE("solve_optimal_cost hand-solved cases") {
    const auto d = two_point();
    CHECK(solve_optimal_cost(d, {0.1, 1.0}) == Approx(0.2).epsilon(1e-12));
    CHECK(solve_optimal_cost(d, {0.6, 1.0}) == Approx(1.1).epsilon(1e-12));
    CHECK(solve_optimal_cost(EnergyDistribution({5.0}, {1.0}), {0.3, 1.0}) == Approx(5.3));
    CHECK(solve_optimal_cost(d, {0.05, 2.0}) == Approx(0.2).epsilon(1e-12));

    CHECK_THROWS_AS(solve_optimal_cost(d, {-0.1, 1.0}), InvalidCost);
    CHECK_THROWS_AS(solve_optimal_cost(d, {0.1, 0.0}), InvalidCost);

    // c = 0 returns the minimum support value
    CHECK(solve_optimal_cost(d, {0.0, 1.0}) == 0.0);
    const auto free = split_cost(EnergyDistribution({2.0, 3.0}, {0.25, 0.75}), {0.0, 1.0});
    CHECK(free.optimal_cost == 2.0);
    CHECK(free.mean_stop_step == Approx(4.0));
    CHECK(free.optimal_energy == Approx(2.0));
    CHECK(free.optimal_effort == 0.0);
}

TEST_CASE("optimality equation holds exactly on random instances") {
    RngEngine rng = make_engine(101);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto d = random_distribution(rng);
        const CostModel cm{std::pow(10.0, -4.0 + 6.0 * uniform01(rng)), 1.0};
        const double target = solve_optimal_cost(d, cm);
        CHECK(std::abs(d.partial_expectation(target) - cm.cost_per_draw()) < 1e-9);
        CHECK(target > d.min_support());
        CHECK(target <= d.mean() + cm.cost_per_draw() + 1e-12);
    }
}

TEST_CASE("optimal cost is monotone in the unit cost") {
    RngEngine rng = make_engine(555);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto d = random_distribution(rng, 20);
        const double c1 = std::pow(10.0, -3.0 + 5.0 * uniform01(rng));
        const double c2 = c1 * (1.0 + uniform01(rng));
        CHECK(solve_optimal_cost(d, {c1, 1.0}) <= solve_optimal_cost(d, {c2, 1.0}) + 1e-12);
    }
}

TEST_CASE("small-c regime reduces to time-to-solution") {
    RngEngine rng = make_engine(77);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto d = random_distribution(rng, 20);
        if (d.size() < 2) continue;
        const double e0 = d.support()[0], e1 = d.support()[1];
        const double p0 = d.weights()[0];
        // pick c so that the root stays below the second atom
        const double budget = 0.5 * p0 * (e1 - e0);
        const double target = solve_optimal_cost(d, {budget, 1.0});
        REQUIRE(target < e1);
        CHECK(target == Approx(e0 + budget / p0).epsilon(1e-12));
    }
}

TEST_CASE("large-c regime reduces to the average energy") {
    RngEngine rng = make_engine(78);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto d = random_distribution(rng, 20);
        const double budget = d.max_support() - d.mean() + 1.0 + 10.0 * uniform01(rng);
        const double target = solve_optimal_cost(d, {budget, 1.0});
        REQUIRE(target >= d.max_support());
        CHECK(target == Approx(d.mean() + budget).epsilon(1e-12));
    }
}

TEST_CASE("binary distribution reduces to time-to-target") {
    RngEngine rng = make_engine(79);
    for (int trial = 0; trial < 1000; ++trial) {
        const double p = 0.001 + 0.9 * uniform01(rng);
        const double budget = std::pow(10.0, -3.0 + 3.0 * uniform01(rng));
        const double sentinel = 1e6 * budget / p + 1.0;
        const EnergyDistribution d({0.0, sentinel}, {p, 1.0 - p});
        if (budget / p >= sentinel) continue;
        CHECK(solve_optimal_cost(d, {budget, 1.0}) == Approx(budget / p).epsilon(1e-9));
    }
}

TEST_CASE("mean stopping step") {
    const auto d = two_point();
    CHECK(mean_stopping_step(d, 0.2) == Approx(2.0));
    CHECK(mean_stopping_step(d, 1.1) == Approx(1.0));
    CHECK_THROWS_AS(mean_stopping_step(d, -0.5), UnreachableTarget);
}

TEST_CASE("split cost bundles") {
    const auto d = two_point();
    const auto a = split_cost(d, {0.1, 1.0});
    CHECK(a.optimal_cost == Approx(0.2));
    CHECK(a.mean_stop_step == Approx(2.0));
    CHECK(a.optimal_energy == Approx(0.0));
    CHECK(a.optimal_effort == Approx(0.2));

    const auto b = split_cost(EnergyDistribution({5.0}, {1.0}), {0.3, 1.0});
    CHECK(b.optimal_cost == Approx(5.3));
    CHECK(b.mean_stop_step == Approx(1.0));
    CHECK(b.optimal_energy == Approx(5.0));
    CHECK(b.optimal_effort == Approx(0.3));

    const auto c = split_cost(d, {0.6, 1.0});
    CHECK(c.optimal_cost == Approx(1.1));
    CHECK(c.mean_stop_step == Approx(1.0));
    CHECK(c.optimal_energy == Approx(0.5));
    CHECK(c.optimal_effort == Approx(0.6));

    RngEngine rng = make_engine(80);
    for (int trial = 0; trial < 200; ++trial) {
        const auto r = random_distribution(rng);
        const auto sol = split_cost(r, {std::pow(10.0, -3.0 + 5.0 * uniform01(rng)), 1.0});
        CHECK(sol.optimal_cost ==
              Approx(sol.optimal_energy + sol.optimal_effort).epsilon(1e-9).scale(1.0));
        CHECK(sol.mean_stop_step >= 1.0);
        CHECK(sol.optimal_energy <= sol.optimal_cost);
    }
}

TEST_CASE("cost sensitivity") {
    const auto d = two_point();
    CHECK(cost_sensitivity(d, 0.2, {0.1, 1.0}) == Approx(2.0));
    CHECK(cost_sensitivity(EnergyDistribution({5.0}, {1.0}), 5.3, {0.3, 1.0}) == Approx(1.0));
    CHECK_THROWS_AS(cost_sensitivity(d, -1.0, {0.1, 1.0}), UnreachableTarget);

    // finite-difference oracle away from kinks
    RngEngine rng = make_engine(81);
    for (int trial = 0; trial < 200; ++trial) {
        const auto r = random_distribution(rng);
        const double c = std::pow(10.0, -3.0 + 5.0 * uniform01(rng));
        const double target = solve_optimal_cost(r, {c, 1.0});
        // skip targets that sit essentially on a support point
        bool near_kink = false;
        for (double e : r.support())
            if (std::abs(target - e) < 1e-6 * std::max(1.0, std::abs(e))) near_kink = true;
        if (near_kink) continue;
        const double h = 1e-8 * c;
        const double fd = (solve_optimal_cost(r, {c + h, 1.0}) - target) / h;
        const double analytic = cost_sensitivity(r, target, {c, 1.0});
        CHECK(std::abs(fd - analytic) / analytic < 1e-4);
    }
}

TEST_CASE("tail error estimate") {
    const auto d = two_point();
    const std::vector<std::pair<double, double>> bump = {{-10.0, 0.001}};
    CHECK(tail_error_estimate(d, bump, 0.2) == Approx(-0.02));
    CHECK(tail_error_estimate(d, {}, 0.2) == 0.0);

    // a smaller CDF denominator inflates the error
    const EnergyDistribution skew({0.0, 1.0}, {0.1, 0.9});
    CHECK(tail_error_estimate(skew, bump, 0.5) == Approx(-0.1));
    CHECK_THROWS_AS(tail_error_estimate(d, bump, -1.0), UnreachableTarget);
}

TEST_CASE("time to target") {
    CHECK(time_to_target(0.5, 0.99, 1.0) == Approx(6.6439).epsilon(1e-4));
    CHECK(time_to_target(0.3, 0.3, 2.5) == Approx(2.5));
    CHECK(time_to_target(0.01, 0.99, 1.0) == Approx(458.21).epsilon(1e-4));
    CHECK_THROWS_AS(time_to_target(0.0, 0.5, 1.0), DomainError);
    CHECK_THROWS_AS(time_to_target(0.5, 1.0, 1.0), DomainError);
}

TEST_CASE("expected best energy matches exhaustive enumeration") {
    RngEngine rng = make_engine(82);
    for (int trial = 0; trial < 50; ++trial) {
        const int m = 1 + static_cast<int>(uniform_index(rng, 4));
        std::vector<double> support, weights;
        double e = -3.0, total = 0.0;
        for (int i = 0; i < m; ++i) {
            support.push_back(e);
            e += 0.5 + 2.0 * uniform01(rng);
            weights.push_back(0.05 + uniform01(rng));
            total += weights.back();
        }
        for (auto& w : weights) w /= total;
        const EnergyDistribution d(support, weights);
        for (int n : {1, 2, 3, 5}) {
            CHECK(std::abs(expected_best_energy(d, n) - enumerate_best_of(d, n)) < 1e-9);
        }
    }
    CHECK(expected_best_energy(two_point(), 1) == Approx(0.5));
}

TEST_CASE("simulated stopped sequences agree with the solved cost") {
    const auto d = two_point();
    const CostModel cm{0.1, 1.0};

    // degenerate distribution stops at the first draw
    const EnergyDistribution point({5.0}, {1.0});
    for (std::uint64_t s = 0; s < 5; ++s)
        CHECK(simulate_stopped_sequence(point, {0.3, 1.0}, 5.3, s) == Approx(5.3));

    CHECK(simulate_stopped_sequence(d, cm, 0.2, 12345) ==
          simulate_stopped_sequence(d, cm, 0.2, 12345));
    CHECK_THROWS_AS(simulate_stopped_sequence(d, cm, -1.0, 1), UnreachableTarget);

    double sum = 0.0, sum_sq = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double x = simulate_stopped_sequence(d, cm, 0.2, derive_seed(9000, i));
        sum += x;
        sum_sq += x * x;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum_sq / n - mean * mean) / n);
    CHECK(std::abs(mean - 0.2) < 3.0 * se);
}

TEST_CASE("gaussian optimality equation") {
    const GaussianParams g{0.0, 1.0};
    const CostModel cm{0.1, 1.0};
    const double target = solve_optimal_cost(g, cm);
    // residual of the closed-form integral at the root
    const double z = target;
    const double integral = target * 0.5 * std::erfc(-z / std::sqrt(2.0)) +
                            std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
    CHECK(integral == Approx(0.1).epsilon(1e-8));

    // large budget: target tends to mean + budget
    const double big = solve_optimal_cost(GaussianParams{3.0, 0.5}, {50.0, 1.0});
    CHECK(big == Approx(53.0).epsilon(1e-6));

    // monotone in the unit cost
    double prev = -INFINITY;
    for (double c = 0.01; c < 10.0; c *= 2.0) {
        const double t = solve_optimal_cost(g, {c, 1.0});
        CHECK(t > prev);
        prev = t;
    }
}

TEST_CASE("spliced optimality equation") {
    const EnergyDistribution emp({0.0, 1.0, 2.0}, {0.10, 0.45, 0.45});
    for (double shape : {-0.4, 0.0, 0.3}) {
        const auto s = splice_tail(emp, GpdParams{0.7, shape, 0.5});
        for (double budget : {1e-4, 1e-3, 1e-2, 0.05, 0.2, 1.0, 5.0}) {
            const double target = solve_optimal_cost(s, CostModel{budget, 1.0});
            CHECK(s.partial_expectation(target) == Approx(budget).epsilon(1e-9));
        }
    }
    // heavy tails make the equation degenerate
    const auto heavy = splice_tail(emp, GpdParams{0.7, 1.2, 0.5});
    CHECK_THROWS_AS(solve_optimal_cost(heavy, CostModel{0.1, 1.0}), DomainError);
}
