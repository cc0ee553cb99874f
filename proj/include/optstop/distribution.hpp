#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "optstop/errors.hpp"
#include "optstop/rng.hpp"

namespace optstop {

/// Discrete probability distribution over energy values. Immutable after
/// construction; all derived quantities (CDF, partial expectations) are
/// precomputed so repeated evaluation is cheap.
class EnergyDistribution {
public:
    /// `support` must be strictly increasing and finite, `weights` positive
    /// and summing to 1 within 1e-12.
    EnergyDistribution(std::vector<double> support, std::vector<double> weights);

    std::span<const double> support() const { return support_; }
    std::span<const double> weights() const { return weights_; }
    std::size_t size() const { return support_.size(); }
    double min_support() const { return support_.front(); }
    double max_support() const { return support_.back(); }

    /// P(e <= x); right-continuous, the atom at x is included.
    double cdf(double x) const;

    /// Sum over atoms e_i <= C of w_i * (C - e_i). Piecewise linear, convex
    /// and nondecreasing in C; this is the integral side of the optimality
    /// equation.
    double partial_expectation(double c) const;

    double mean() const { return cum_weighted_.back(); }

    /// Cumulative weight up to and including atom i.
    double cum_weight(std::size_t i) const { return cum_weight_[i]; }
    /// Cumulative weighted support up to and including atom i.
    double cum_weighted_support(std::size_t i) const { return cum_weighted_[i]; }
    /// Exact suffix sum: total weight of atoms j >= i (weight_from(size()) == 0).
    double weight_from(std::size_t i) const { return suffix_weight_[i]; }

    /// One draw; deterministic given the engine state.
    double sample(RngEngine& rng) const;
    std::size_t sample_index(RngEngine& rng) const;

private:
    std::vector<double> support_;
    std::vector<double> weights_;
    std::vector<double> cum_weight_;
    std::vector<double> cum_weighted_;
    std::vector<double> suffix_weight_;
};

/// Generalized Pareto parameters for threshold exceedances. The library uses
/// it mirrored: it models the lower tail of an energy distribution, with
/// exceedance x = threshold - e for energies e below the threshold.
struct GpdParams {
    double scale = 1.0;   // lambda > 0
    double shape = 0.0;   // k; negative means a finite tail of extent scale/|k|
    double threshold = 0.0;

    /// Mean of the exceedance distribution is infinite for shape >= 1; fits in
    /// that region are flagged to callers, never silently consumed.
    bool heavy_tail() const { return shape >= 1.0; }
};

struct GaussianParams {
    double mean = 0.0;
    double stddev = 1.0;  // > 0
};

/// Dirichlet prior/posterior over the weights of a discrete energy
/// distribution; concentrations play the role of virtual observation counts.
class DirichletPosterior {
public:
    DirichletPosterior(std::vector<double> support, std::vector<double> concentrations);

    std::span<const double> support() const { return support_; }
    std::span<const double> concentrations() const { return concentrations_; }
    std::size_t size() const { return support_.size(); }

private:
    std::vector<double> support_;
    std::vector<double> concentrations_;
};

/// Empirical body with a mirrored-GPD lower tail spliced in below the
/// threshold. `body` holds the conditional distribution of e >= threshold;
/// `tail_mass` is the probability assigned below it.
class SplicedDistribution {
public:
    SplicedDistribution(EnergyDistribution body, GpdParams tail, double tail_mass);

    const EnergyDistribution& body() const { return body_; }
    const GpdParams& tail() const { return tail_; }
    double tail_mass() const { return tail_mass_; }
    double threshold() const { return tail_.threshold; }

    double cdf(double x) const;
    /// Integral of (C - e)^+ against the spliced density; closed form on the
    /// GPD piece, finite only for tail shape < 1.
    double partial_expectation(double c) const;
    double mean() const;

private:
    EnergyDistribution body_;
    GpdParams tail_;
    double tail_mass_;
};

/// Empirical distribution of a sample: weight of v is count(v) / len(samples).
EnergyDistribution build_empirical(std::span<const double> samples);

double mean(const EnergyDistribution& d);

/// ML Gaussian fit (stddev uses divisor n).
GaussianParams gaussian_fit(std::span<const double> samples);

/// ML Generalized Pareto fit of the lower tail below `threshold`, via the
/// exceedances threshold - e. The profile likelihood is maximized by a
/// coarse-grid pass (the documented fallback) followed by bracketed scalar
/// refinement to tolerance 1e-8, with the shape constrained to [-5, 5].
GpdParams gpd_fit_tail(std::span<const double> samples, double threshold);

/// CDF of the exceedance distribution at x >= 0.
double gpd_cdf(const GpdParams& g, double x);

/// Posterior update: concentrations[i] += counts[i].
DirichletPosterior dirichlet_update(const DirichletPosterior& prior,
                                    std::span<const long long> counts);

/// Update from raw observations. Energies absent from the prior support enter
/// with concentration 1e-6 before their counts are added.
DirichletPosterior dirichlet_update_with_energies(const DirichletPosterior& prior,
                                                  std::span<const double> energies);

/// Weights nu_i / sum_j nu_j over the posterior support.
EnergyDistribution posterior_predictive(const DirichletPosterior& p);

/// Replace the empirical mass strictly below g.threshold by the GPD tail.
SplicedDistribution splice_tail(const EnergyDistribution& emp, const GpdParams& g);

/// Empirical distribution of n i.i.d. draws; deterministic given the seed.
EnergyDistribution bootstrap_resample(const EnergyDistribution& d, std::size_t n,
                                      std::uint64_t seed);

}  // namespace optstop
