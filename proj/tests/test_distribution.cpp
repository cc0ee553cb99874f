#include "doctest.h"

#include <cmath>
#include <limits>

#include "optstop/distribution.hpp"

using namespace optstop;
using doctest::Approx;

namespace {

EnergyDistribution two_point() { return EnergyDistribution({0.0, 1.0}, {0.5, 0.5}); }

// test-local sampler, independent of EnergyDistribution::sample
std::vector<double> bernoulli_values(double p1, std::size_t n, std::uint64_t seed) {
    RngEngine rng = make_engine(seed);
    std::vector<double> out(n);
    for (auto& x : out) x = uniform01(rng) < p1 ? 1.0 : 0.0;
    return out;
}

}  // namespace

TEST_CASE("build_empirical basics") {
    const auto degenerate = build_empirical(std::vector<double>{5, 5, 5});
    CHECK(degenerate.size() == 1);
    CHECK(degenerate.support()[0] == 5.0);
    CHECK(degenerate.weights()[0] == 1.0);

    const auto sym = build_empirical(std::vector<double>{0, 1, 0, 1});
    CHECK(sym.support()[0] == 0.0);
    CHECK(sym.support()[1] == 1.0);
    CHECK(sym.weights()[0] == 0.5);
    CHECK(sym.weights()[1] == 0.5);

    CHECK_THROWS_AS(build_empirical({}), EmptySample);
    CHECK_THROWS_AS(build_empirical(std::vector<double>{1.0, std::nan("")}), NonFinite);
    CHECK_THROWS_AS(build_empirical(std::vector<double>{1.0, INFINITY}), NonFinite);
}

TEST_CASE("build_empirical recovers sampling weights") {
    const auto values = bernoulli_values(0.7, 100000, 42);
    const auto d = build_empirical(values);
    REQUIRE(d.size() == 2);
    CHECK(std::abs(d.weights()[0] - 0.3) < 0.01);
    CHECK(std::abs(d.weights()[1] - 0.7) < 0.01);
}

TEST_CASE("cdf at atoms and between them") {
    const auto d = two_point();
    CHECK(d.cdf(0.0) == 0.5);
    CHECK(d.cdf(-1.0) == 0.0);
    CHECK(d.cdf(0.2) == 0.5);
    CHECK(d.cdf(1.0) == Approx(1.0));
    CHECK(d.cdf(7.0) == Approx(1.0));
}

TEST_CASE("partial expectation hand values") {
    const auto d = two_point();
    CHECK(d.partial_expectation(0.2) == Approx(0.1));
    CHECK(d.partial_expectation(-5.0) == 0.0);
    CHECK(d.partial_expectation(10.0) == Approx(9.5));
}

TEST_CASE("partial expectation slopes equal the cdf") {
    RngEngine rng = make_engine(7);
    std::vector<double> support, weights;
    double total = 0.0;
    for (int i = 0; i < 12; ++i) {
        support.push_back(i * 1.3 - 4.0);
        weights.push_back(0.05 + uniform01(rng));
        total += weights.back();
    }
    for (auto& w : weights) w /= total;
    const EnergyDistribution d(support, weights);

    const double h = 1e-4;
    int checked = 0;
    for (int trial = 0; checked < 100; ++trial) {
        REQUIRE(trial < 10000);
        const double c = -6.0 + 18.0 * uniform01(rng);
        bool near_kink = false;
        for (double e : support)
            if (std::abs(c - e) < 2.0 * h) near_kink = true;
        if (near_kink) continue;
        ++checked;
        const double right = (d.partial_expectation(c + h) - d.partial_expectation(c)) / h;
        const double left = (d.partial_expectation(c) - d.partial_expectation(c - h)) / h;
        CHECK(std::abs(right - d.cdf(c + h / 2)) < 1e-9);
        CHECK(std::abs(left - d.cdf(c - h / 2)) < 1e-9);
        CHECK(right >= left - 1e-9);  // convexity
    }
    // beyond the support the identity is exact
    for (double c : {support.back(), support.back() + 3.0, support.back() + 100.0})
        CHECK(std::abs(d.partial_expectation(c) - (c - d.mean())) < 1e-12);
}

TEST_CASE("mean") {
    CHECK(two_point().mean() == Approx(0.5));
    CHECK(EnergyDistribution({5.0}, {1.0}).mean() == 5.0);
    CHECK(EnergyDistribution({-3.0, 1.0}, {0.25, 0.75}).mean() == Approx(0.0));
}

TEST_CASE("distribution invariants are enforced") {
    CHECK_THROWS_AS(EnergyDistribution({1.0, 1.0}, {0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(EnergyDistribution({2.0, 1.0}, {0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(EnergyDistribution({0.0, 1.0}, {0.5, 0.4}), std::invalid_argument);
    CHECK_THROWS_AS(EnergyDistribution({0.0, 1.0}, {1.0, -0.0}), std::invalid_argument);
    CHECK_THROWS_AS(EnergyDistribution({}, {}), std::invalid_argument);
}

TEST_CASE("gaussian fit") {
    const auto g = gaussian_fit(std::vector<double>{0.0, 2.0});
    CHECK(g.mean == Approx(1.0));
    CHECK(g.stddev == Approx(1.0));

    CHECK_THROWS_AS(gaussian_fit(std::vector<double>{3, 3, 3}), ZeroVariance);
    CHECK_THROWS_AS(gaussian_fit(std::vector<double>{3}), InsufficientData);

    RngEngine rng = make_engine(11);
    std::vector<double> xs(100000);
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
        // Box-Muller, test-local
        const double u1 = uniform01(rng) + 1e-300;
        const double u2 = uniform01(rng);
        const double r = std::sqrt(-2.0 * std::log(u1));
        xs[i] = 10.0 + 4.0 * r * std::cos(2 * M_PI * u2);
        xs[i + 1] = 10.0 + 4.0 * r * std::sin(2 * M_PI * u2);
    }
    const auto big = gaussian_fit(xs);
    CHECK(std::abs(big.mean - 10.0) < 0.05);
    CHECK(std::abs(big.stddev - 4.0) < 0.05);
}

TEST_CASE("gpd cdf forms") {
    CHECK(gpd_cdf(GpdParams{2.0, 0.0, 0.0}, 2.0) == Approx(1.0 - std::exp(-1.0)));
    CHECK(gpd_cdf(GpdParams{2.0, 0.3, 0.0}, 0.0) == 0.0);
    CHECK(gpd_cdf(GpdParams{1.0, -1.0, 0.0}, 1.0 - 1e-9) == Approx(1.0).epsilon(1e-6));
    CHECK_THROWS_AS(gpd_cdf(GpdParams{1.0, -1.0, 0.0}, 1.0), OutOfSupport);
    CHECK_THROWS_AS(gpd_cdf(GpdParams{1.0, 0.0, 0.0}, -0.5), std::invalid_argument);

    // continuity at k -> 0
    const GpdParams near_zero{1.5, 1e-8, 0.0};
    for (double x = 0.0; x <= 15.0; x += 0.25)
        CHECK(std::abs(gpd_cdf(near_zero, x) - (1.0 - std::exp(-x / 1.5))) < 1e-6);

    // monotone nondecreasing in x
    const GpdParams g{1.0, 0.4, 0.0};
    double prev = 0.0;
    for (double x = 0.0; x < 30.0; x += 0.1) {
        const double v = gpd_cdf(g, x);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("gpd tail fit on synthetic exceedances") {
    RngEngine rng = make_engine(2024);
    // exceedances below threshold 0: energies are -x
    std::vector<double> exp_samples(100000);
    for (auto& e : exp_samples) e = 2.0 * std::log(uniform01(rng) + 1e-300);  // = -Exp(scale 2)
    const auto exp_fit = gpd_fit_tail(exp_samples, 0.0);
    CHECK(std::abs(exp_fit.scale - 2.0) / 2.0 < 0.02);
    CHECK(std::abs(exp_fit.shape) < 0.05);
    CHECK(exp_fit.threshold == 0.0);

    std::vector<double> uni_samples(100000);
    for (auto& e : uni_samples) e = -uniform01(rng);
    const auto uni_fit = gpd_fit_tail(uni_samples, 0.0);
    CHECK(std::abs(uni_fit.shape - (-1.0)) < 0.05);

    CHECK_THROWS_AS(gpd_fit_tail(std::vector<double>{-1, -2, -3, -4, -5}, 0.0), InsufficientTail);
    const std::vector<double> flat(25, -1.0);
    CHECK_THROWS_AS(gpd_fit_tail(flat, 0.0), DegenerateTail);
}

TEST_CASE("gpd fit beats a likelihood grid") {
    RngEngine rng = make_engine(5);
    std::vector<double> samples(2000);
    for (auto& e : samples) e = 1.5 * std::log(uniform01(rng) + 1e-300) - 1.0;
    const auto fit = gpd_fit_tail(samples, -1.0);

    std::vector<double> exceed;
    for (double e : samples)
        if (e < -1.0) exceed.push_back(-1.0 - e);
    const auto loglik = [&](double lam, double k) {
        double acc = -static_cast<double>(exceed.size()) * std::log(lam);
        for (double x : exceed) {
            if (k == 0.0)
                acc += -x / lam;
            else {
                const double t = 1.0 + k * x / lam;
                if (t <= 0.0) return -std::numeric_limits<double>::infinity();
                acc += -(1.0 + 1.0 / k) * std::log(t);
            }
        }
        return acc;
    };
    const double at_fit = loglik(fit.scale, fit.shape);
    for (double lam = 0.5; lam <= 3.0; lam += 0.25)
        for (double k = -2.0; k <= 2.0; k += 0.25)
            CHECK(at_fit >= loglik(lam, k) - 1e-7);
}

TEST_CASE("dirichlet updates") {
    const DirichletPosterior p({0.0, 1.0}, {1.0, 1.0});
    const auto updated = dirichlet_update(p, std::vector<long long>{3, 0});
    CHECK(updated.concentrations()[0] == 4.0);
    CHECK(updated.concentrations()[1] == 1.0);

    const DirichletPosterior q({0.0, 1.0}, {2.0, 5.0});
    const auto same = dirichlet_update(q, std::vector<long long>{0, 0});
    CHECK(same.concentrations()[0] == 2.0);
    CHECK(same.concentrations()[1] == 5.0);

    const DirichletPosterior r({0.0, 1.0, 2.0}, {1.0, 1.0, 1.0});
    const auto up3 = dirichlet_update(r, std::vector<long long>{1, 2, 3});
    CHECK(up3.concentrations()[0] == 2.0);
    CHECK(up3.concentrations()[1] == 3.0);
    CHECK(up3.concentrations()[2] == 4.0);

    CHECK_THROWS_AS(dirichlet_update(p, std::vector<long long>{-1, 0}), NegativeCount);
}

TEST_CASE("posterior predictive") {
    const auto d = posterior_predictive(DirichletPosterior({0.0, 1.0}, {4.0, 1.0}));
    CHECK(d.weights()[0] == Approx(0.8));
    CHECK(d.weights()[1] == Approx(0.2));

    const auto u = posterior_predictive(DirichletPosterior({0.0, 1.0}, {1.0, 1.0}));
    CHECK(u.weights()[0] == Approx(0.5));

    // a family prior of 500 virtual observations reproduces the family weights
    const std::vector<double> family = {0.1, 0.2, 0.3, 0.4};
    std::vector<double> conc;
    for (double f : family) conc.push_back(500.0 * f);
    const auto fam = posterior_predictive(DirichletPosterior({0, 1, 2, 3}, conc));
    for (std::size_t i = 0; i < family.size(); ++i)
        CHECK(fam.weights()[i] == Approx(family[i]));
}

TEST_CASE("weak prior predictive reproduces the empirical weights") {
    const std::vector<double> samples = {0, 0, 1, 2, 2, 2, 0, 1};
    const auto emp = build_empirical(samples);
    const DirichletPosterior weak({0.0, 1.0, 2.0}, {1e-12, 1e-12, 1e-12});
    const auto post = dirichlet_update(weak, std::vector<long long>{3, 2, 3});
    const auto pred = posterior_predictive(post);
    REQUIRE(pred.size() == emp.size());
    for (std::size_t i = 0; i < emp.size(); ++i)
        CHECK(std::abs(pred.weights()[i] - emp.weights()[i]) < 1e-9);
}

TEST_CASE("dirichlet update from raw energies extends the support") {
    const DirichletPosterior p({1.0}, {2.0});
    const auto up = dirichlet_update_with_energies(p, std::vector<double>{0.5, 1.0, 0.5});
    REQUIRE(up.size() == 2);
    CHECK(up.support()[0] == 0.5);
    CHECK(up.concentrations()[0] == Approx(2.0 + 1e-6));
    CHECK(up.concentrations()[1] == Approx(3.0));
}

TEST_CASE("splice tail") {
    // 10% of the mass sits below mu = 0.5
    const EnergyDistribution emp({0.0, 1.0, 2.0}, {0.10, 0.45, 0.45});
    const GpdParams g{1.0, 0.0, 0.5};
    const auto s = splice_tail(emp, g);
    CHECK(s.tail_mass() == Approx(0.10));
    CHECK(s.cdf(0.5 - 1e-12) == Approx(0.10).epsilon(1e-6));
    CHECK(s.cdf(2.0) == Approx(1.0).epsilon(1e-9));
    CHECK(s.body().size() == 2);
    CHECK(s.body().weights()[0] == Approx(0.5));

    CHECK_THROWS_AS(splice_tail(emp, GpdParams{1.0, 0.0, -3.0}), NoTailMass);
}

TEST_CASE("spliced partial expectation is continuous and monotone") {
    const EnergyDistribution emp({0.0, 1.0, 2.0}, {0.10, 0.45, 0.45});
    const auto s = splice_tail(emp, GpdParams{0.8, -0.3, 0.5});
    double prev = 0.0;
    for (double c = -3.0; c < 4.0; c += 0.01) {
        const double v = s.partial_expectation(c);
        CHECK(v >= prev - 1e-12);
        prev = v;
    }
    const double at_mu = s.partial_expectation(0.5);
    CHECK(s.partial_expectation(0.5 - 1e-9) == Approx(at_mu).epsilon(1e-6));
}

TEST_CASE("bootstrap resample") {
    const EnergyDistribution degenerate({5.0}, {1.0});
    const auto same = bootstrap_resample(degenerate, 100, 3);
    CHECK(same.size() == 1);
    CHECK(same.weights()[0] == 1.0);

    const auto d = two_point();
    const auto rep = bootstrap_resample(d, 100000, 99);
    CHECK(std::abs(rep.weights()[0] - 0.5) < 0.01);

    const auto rep2 = bootstrap_resample(d, 1000, 77);
    const auto rep3 = bootstrap_resample(d, 1000, 77);
    REQUIRE(rep2.size() == rep3.size());
    for (std::size_t i = 0; i < rep2.size(); ++i) {
        CHECK(rep2.support()[i] == rep3.support()[i]);
        CHECK(rep2.weights()[i] == rep3.weights()[i]);
    }
}

TEST_CASE("bootstrap converges in total variation") {
    RngEngine rng = make_engine(15);
    std::vector<double> support, weights;
    double total = 0.0;
    for (int i = 0; i < 9; ++i) {
        support.push_back(i);
        weights.push_back(0.1 + uniform01(rng));
        total += weights.back();
    }
    for (auto& w : weights) w /= total;
    const EnergyDistribution d(support, weights);
    const auto rep = bootstrap_resample(d, 1000000, 8);
    double tv = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        double w = 0.0;
        for (std::size_t j = 0; j < rep.size(); ++j)
            if (rep.support()[j] == d.support()[i]) w = rep.weights()[j];
        tv += std::abs(w - d.weights()[i]);
    }
    CHECK(tv / 2.0 < 0.01);
}
