#include "optstop/controller.hpp"

#include <algorithm>
#include <cmath>

namespace optstop {

std::string to_string(Policy p) {
    return p == Policy::gaussian_ml ? "gaussian-ml" : "bayes-dirichlet";
}

Policy policy_from_string(const std::string& s) {
    if (s == "gaussian-ml") return Policy::gaussian_ml;
    if (s == "bayes-dirichlet") return Policy::bayes_dirichlet;
    throw ConfigError("unknown policy: " + s);
}

double solve_optimal_cost(const Estimate& est, const CostModel& cm) {
    return std::visit([&](const auto& e) { return solve_optimal_cost(e, cm); }, est);
}

double estimate_cdf(const Estimate& est, double x) {
    if (const auto* g = std::get_if<GaussianParams>(&est))
        return 0.5 * std::erfc(-(x - g->mean) / (g->stddev * std::numbers::sqrt2));
    if (const auto* d = std::get_if<EnergyDistribution>(&est)) return d->cdf(x);
    return std::get<SplicedDistribution>(est).cdf(x);
}

Session::Session(SessionConfig config) : config_(std::move(config)) {
    if (config_.burn_in_len < 2) throw ConfigError("session: burn_in_len must be >= 2");
    if (config_.tail_obs < 20) throw ConfigError("session: tail_obs must be >= 20");
    if (!(config_.override_level > 0.0 && config_.override_level < 1.0))
        throw ConfigError("session: override_level must lie in (0, 1)");
    if (!(config_.cost.unit_cost >= 0.0) || !(config_.cost.run_time > 0.0))
        throw ConfigError("session: invalid cost model");
    observations_.reserve(1024);
}

void Session::refit_estimate() {
    if (n_ > config_.burn_in_len && n_ > config_.tail_obs) {
        // Asymptotic regime: threshold at the order statistic that leaves
        // tail_obs observations strictly below, GPD fit over the exceedances.
        // Discreteness can defeat the fit (ties at the threshold, a
        // degenerate tail, a heavy-tail fit); the empirical distribution is
        // the fallback in all such cases.
        long rank = config_.tail_obs;
        double mu = 0.0;
        long seen = 0;
        for (const auto& [e, c] : counts_) {
            seen += c;
            if (seen > rank) {
                mu = e;
                break;
            }
        }
        std::vector<double> tail;
        tail.reserve(static_cast<std::size_t>(rank));
        for (const auto& [e, c] : counts_) {
            if (e >= mu) break;
            tail.insert(tail.end(), static_cast<std::size_t>(c), e);
        }
        std::vector<double> support, weights;
        support.reserve(counts_.size());
        weights.reserve(counts_.size());
        for (const auto& [e, c] : counts_) {
            support.push_back(e);
            weights.push_back(static_cast<double>(c) / static_cast<double>(n_));
        }
        EnergyDistribution empirical(std::move(support), std::move(weights));
        try {
            const GpdParams g = gpd_fit_tail(tail, mu);
            if (!g.heavy_tail()) {
                estimate_ = splice_tail(empirical, g);
                return;
            }
        } catch (const Error&) {
        }
        estimate_ = std::move(empirical);
        return;
    }

    if (config_.policy == Policy::bayes_dirichlet) {
        std::vector<double> support, conc;
        if (config_.prior) {
            // merge prior concentrations with observed counts; unseen
            // energies enter with the documented 1e-6 default
            const auto& prior = *config_.prior;
            std::map<double, double> nu;
            for (std::size_t i = 0; i < prior.size(); ++i)
                nu[prior.support()[i]] = prior.concentrations()[i];
            for (const auto& [e, c] : counts_)
                nu.try_emplace(e, 1e-6).first->second += static_cast<double>(c);
            for (const auto& [e, v] : nu) {
                support.push_back(e);
                conc.push_back(v);
            }
        } else {
            for (const auto& [e, c] : counts_) {
                support.push_back(e);
                conc.push_back(1e-6 + static_cast<double>(c));
            }
        }
        estimate_ = posterior_predictive(DirichletPosterior(std::move(support), std::move(conc)));
        return;
    }

    // gaussian-ml burn-in; a fit needs two points, so the first observation
    // leaves the estimate undefined, and an all-equal prefix degenerates to
    // the point-mass empirical distribution.
    if (n_ < 2) {
        estimate_.reset();
        return;
    }
    const double mean = sum_ / static_cast<double>(n_);
    const double var = std::max(0.0, sum_sq_ / static_cast<double>(n_) - mean * mean);
    if (counts_.size() == 1 || var == 0.0) {
        estimate_ = EnergyDistribution({counts_.begin()->first}, {1.0});
        return;
    }
    estimate_ = GaussianParams{mean, std::sqrt(var)};
}

Decision Session::observe(double energy) {
    if (stopped_) throw SessionClosed("observe: session already stopped");
    if (!std::isfinite(energy)) throw NonFinite("observe: non-finite energy");

    observations_.push_back(energy);
    ++counts_[energy];
    ++n_;
    best_ = n_ == 1 ? energy : std::min(best_, energy);
    sum_ += energy;
    sum_sq_ += energy * energy;

    refit_estimate();
    if (!estimate_) {
        target_.reset();
        return Decision::proceed;
    }
    target_ = solve_optimal_cost(*estimate_, config_.cost);

    bool stop = energy <= *target_;
    if (!stop && override_check()) {
        stop = true;
        stopped_by_override_ = true;
    }
    if (stop) stopped_ = true;
    return stop ? Decision::stop : Decision::proceed;
}

const Estimate& Session::current_estimate() const {
    if (!estimate_)
        throw InsufficientData("current_estimate: not enough observations for this policy");
    return *estimate_;
}

bool Session::override_check() const {
    if (!target_ || !estimate_) return false;
    const double p = estimate_cdf(*estimate_, *target_);
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    // (1 - p)^n <= 1 - level, evaluated in logs
    return static_cast<double>(n_) * std::log1p(-p) <= std::log1p(-config_.override_level);
}

double Session::realized_cost() const {
    if (!stopped_) throw Error("realized_cost: session still running");
    return best_ + static_cast<double>(n_) * config_.cost.cost_per_draw();
}

Session run_session(const std::function<double()>& sampler, const SessionConfig& config,
                    const StepCallback& on_step) {
    Session session(config);
    for (long i = 0; i < config.max_iterations; ++i) {
        const double e = sampler();
        const Decision d = session.observe(e);
        if (on_step) on_step(SessionStep{session.step_count(), e, session.target(), d});
        if (d == Decision::stop) return session;
    }
    throw MaxIterations("run_session: iteration cap reached before stopping");
}

}  // namespace optstop
