#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>

#include "optstop/stopping.hpp"

namespace optstop {

enum class Policy { gaussian_ml, bayes_dirichlet };

std::string to_string(Policy p);
Policy policy_from_string(const std::string& s);

/// Configuration of an online stopping session. The burn-in estimate is
/// either a Gaussian ML fit or a Dirichlet posterior predictive; past the
/// burn-in both policies switch to the empirical body with a GPD lower tail.
struct SessionConfig {
    Policy policy = Policy::gaussian_ml;
    long burn_in_len = 500;        // >= 2
    long tail_obs = 100;           // >= 20; observations kept below the tail threshold
    double override_level = 0.99;  // in (0, 1)
    CostModel cost;
    std::optional<DirichletPosterior> prior;
    long max_iterations = 10'000'000;
};

enum class Decision { proceed, stop };

/// Current distribution estimate; which alternative is active depends on the
/// policy and on whether the session is past the burn-in.
using Estimate = std::variant<GaussianParams, EnergyDistribution, SplicedDistribution>;

/// Solves the optimality equation against whichever estimate is active.
double solve_optimal_cost(const Estimate& est, const CostModel& cm);
double estimate_cdf(const Estimate& est, double x);

/// Online session state: every observation refits the estimate, recomputes
/// the running target C*_{c,n} and applies the stopping rule, with the
/// confidence override as a guard against targets below every reachable
/// energy.
class Session {
public:
    explicit Session(SessionConfig config);

    /// Appends one energy and decides stop/continue. Throws SessionClosed
    /// once stopped.
    Decision observe(double energy);

    /// Estimate after the latest observation; InsufficientData before the
    /// policy can produce one (gaussian-ml needs two points).
    const Estimate& current_estimate() const;
    bool has_estimate() const { return estimate_.has_value(); }

    /// True when enough observations have accumulated that, under the current
    /// estimate, a stopping energy should already have appeared at the
    /// configured confidence level.
    bool override_check() const;

    std::optional<double> target() const { return target_; }
    long step_count() const { return n_; }
    std::span<const double> observations() const { return observations_; }
    bool stopped() const { return stopped_; }
    bool stopped_by_override() const { return stopped_by_override_; }
    /// min(e_1..e_n) + n * c * t_run; only meaningful once stopped.
    double realized_cost() const;
    const SessionConfig& config() const { return config_; }

private:
    void refit_estimate();

    SessionConfig config_;
    std::vector<double> observations_;
    std::map<double, long> counts_;
    long n_ = 0;
    double best_ = 0.0;
    double sum_ = 0.0;
    double sum_sq_ = 0.0;
    std::optional<Estimate> estimate_;
    std::optional<double> target_;
    bool stopped_ = false;
    bool stopped_by_override_ = false;
};

/// One step of a finished or running session, for logging.
struct SessionStep {
    long n = 0;
    double energy = 0.0;
    std::optional<double> target;
    Decision decision = Decision::proceed;
};

using StepCallback = std::function<void(const SessionStep&)>;

/// Drives a session with energies from the sampler until it stops; throws
/// MaxIterations if the cap is reached first.
Session run_session(const std::function<double()>& sampler, const SessionConfig& config,
                    const StepCallback& on_step = {});

}  // namespace optstop
