#include "optstop/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace optstop {

namespace {

constexpr double kWeightSumTolerance = 1e-12;
constexpr double kNewEnergyConcentration = 1e-6;

bool all_finite(std::span<const double> xs) {
    return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

EnergyDistribution::EnergyDistribution(std::vector<double> support, std::vector<double> weights)
    : support_(std::move(support)), weights_(std::move(weights)) {
    if (support_.empty() || support_.size() != weights_.size())
        throw std::invalid_argument("distribution: support and weights must be nonempty and aligned");
    if (!all_finite(support_))
        throw std::invalid_argument("distribution: support values must be finite");
    if (std::adjacent_find(support_.begin(), support_.end(),
                           [](double a, double b) { return a >= b; }) != support_.end())
        throw std::invalid_argument("distribution: support must be strictly increasing");
    double total = 0.0;
    for (double w : weights_) {
        if (!(w > 0.0)) throw std::invalid_argument("distribution: weights must be positive");
        total += w;
    }
    if (std::abs(total - 1.0) > kWeightSumTolerance)
        throw std::invalid_argument("distribution: weights must sum to 1");

    const std::size_t m = support_.size();
    cum_weight_.resize(m);
    cum_weighted_.resize(m);
    double cw = 0.0, cws = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        cw += weights_[i];
        cws += weights_[i] * support_[i];
        cum_weight_[i] = cw;
        cum_weighted_[i] = cws;
    }
    suffix_weight_.assign(m + 1, 0.0);
    for (std::size_t i = m; i-- > 0;) suffix_weight_[i] = suffix_weight_[i + 1] + weights_[i];
}

double EnergyDistribution::cdf(double x) const {
    auto it = std::upper_bound(support_.begin(), support_.end(), x);
    if (it == support_.begin()) return 0.0;
    // accumulated rounding may push the last prefix sum past 1
    return std::min(cum_weight_[static_cast<std::size_t>(it - support_.begin()) - 1], 1.0);
}

double EnergyDistribution::partial_expectation(double c) const {
    auto it = std::upper_bound(support_.begin(), support_.end(), c);
    if (it == support_.begin()) return 0.0;
    const std::size_t i = static_cast<std::size_t>(it - support_.begin()) - 1;
    return c * cum_weight_[i] - cum_weighted_[i];
}

std::size_t EnergyDistribution::sample_index(RngEngine& rng) const {
    const double u = uniform01(rng) * cum_weight_.back();
    auto it = std::upper_bound(cum_weight_.begin(), cum_weight_.end(), u);
    std::size_t i = static_cast<std::size_t>(it - cum_weight_.begin());
    if (i >= support_.size()) i = support_.size() - 1;
    return i;
}

double EnergyDistribution::sample(RngEngine& rng) const { return support_[sample_index(rng)]; }

EnergyDistribution build_empirical(std::span<const double> samples) {
    if (samples.empty()) throw EmptySample("build_empirical: no samples");
    if (!all_finite(samples)) throw NonFinite("build_empirical: non-finite sample value");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> support;
    std::vector<double> weights;
    const double n = static_cast<double>(sorted.size());
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        support.push_back(sorted[i]);
        weights.push_back(static_cast<double>(j - i) / n);
        i = j;
    }
    return EnergyDistribution(std::move(support), std::move(weights));
}

double mean(const EnergyDistribution& d) { return d.mean(); }

GaussianParams gaussian_fit(std::span<const double> samples) {
    if (samples.size() < 2) throw InsufficientData("gaussian_fit: need at least 2 samples");
    if (!all_finite(samples)) throw NonFinite("gaussian_fit: non-finite sample value");
    const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
    if (*lo == *hi) throw ZeroVariance("gaussian_fit: all samples equal");
    const double n = static_cast<double>(samples.size());
    const double m = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : samples) ss += (x - m) * (x - m);
    return GaussianParams{m, std::sqrt(ss / n)};
}

double gpd_cdf(const GpdParams& g, double x) {
    if (!(x >= 0.0)) throw std::invalid_argument("gpd_cdf: exceedance must be nonnegative");
    const double k = g.shape;
    const double lam = g.scale;
    if (k < 0.0 && x >= lam / -k) throw OutOfSupport("gpd_cdf: exceedance beyond finite tail");
    if (x == 0.0) return 0.0;
    double v;
    if (k == 0.0) {
        v = -std::expm1(-x / lam);
    } else {
        v = -std::expm1(-std::log1p(k * x / lam) / k);
    }
    return std::clamp(v, 0.0, 1.0);
}

namespace {

// Profile log-likelihood of the GPD in the Grimshaw parametrization
// theta = shape/scale: for fixed theta the ML shape has the closed form
// k(theta) = mean(log1p(theta * x)), and the scale is k/theta.
struct GpdProfile {
    std::span<const double> exceedances;

    double shape_at(double theta) const {
        double s = 0.0;
        for (double x : exceedances) s += std::log1p(theta * x);
        return s / static_cast<double>(exceedances.size());
    }

    // log-likelihood maximized over scale at this theta; -inf when invalid
    double operator()(double theta, double* shape_out = nullptr,
                      double* scale_out = nullptr) const {
        const double n = static_cast<double>(exceedances.size());
        double k, lam;
        if (theta == 0.0) {
            k = 0.0;
            lam = std::accumulate(exceedances.begin(), exceedances.end(), 0.0) / n;
        } else {
            k = shape_at(theta);
            lam = k / theta;
            if (!(lam > 0.0) || !std::isfinite(k))
                return -std::numeric_limits<double>::infinity();
        }
        if (shape_out) *shape_out = k;
        if (scale_out) *scale_out = lam;
        return -n * (std::log(lam) + k + 1.0);
    }
};

}  // namespace

GpdParams gpd_fit_tail(std::span<const double> samples, double threshold) {
    std::vector<double> exceed;
    exceed.reserve(samples.size());
    for (double e : samples)
        if (e < threshold) exceed.push_back(threshold - e);
    if (exceed.size() < 20)
        throw InsufficientTail("gpd_fit_tail: fewer than 20 samples below the threshold");
    const auto [lo_it, hi_it] = std::minmax_element(exceed.begin(), exceed.end());
    if (*lo_it == *hi_it) throw DegenerateTail("gpd_fit_tail: all exceedances equal");
    const double x_max = *hi_it;

    const GpdProfile profile{exceed};

    // Feasible theta interval. The left end approaches -1/x_max (finite-tail
    // fits); both ends are pulled in until the shape lies in [-5, 5].
    double theta_lo = -(1.0 - 1e-9) / x_max;
    if (profile.shape_at(theta_lo) < -5.0) {
        double a = theta_lo, b = 0.0;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (a + b);
            (profile.shape_at(mid) < -5.0 ? a : b) = mid;
        }
        theta_lo = b;
    }
    const double x_mean = std::accumulate(exceed.begin(), exceed.end(), 0.0) /
                          static_cast<double>(exceed.size());
    double theta_hi = 1.0 / x_mean;
    while (profile.shape_at(theta_hi) < 5.0 && theta_hi < 1e12 / x_mean) theta_hi *= 2.0;
    {
        double a = 0.0, b = theta_hi;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (a + b);
            (profile.shape_at(mid) <= 5.0 ? a : b) = mid;
        }
        theta_hi = a;
    }

    // Grid pass: geometric spacing on both sides of 0 keeps near-exponential
    // and boundary fits both reachable. This is the documented fallback; the
    // refinement below can only improve on the best grid point.
    std::vector<double> grid;
    grid.push_back(0.0);
    for (int i = 0; i < 48; ++i) {
        const double f = std::pow(10.0, -6.0 * i / 47.0);
        grid.push_back(theta_lo * f);
        grid.push_back(theta_hi * f);
    }
    double best_theta = 0.0;
    double best_ll = -std::numeric_limits<double>::infinity();
    for (double t : grid) {
        const double ll = profile(t);
        if (ll > best_ll) {
            best_ll = ll;
            best_theta = t;
        }
    }

    // Bracketed golden-section refinement around the best grid point.
    double a = theta_lo, b = theta_hi;
    for (double t : grid) {
        if (t < best_theta && t > a) a = t;
        if (t > best_theta && t < b) b = t;
    }
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = profile(x1), f2 = profile(x2);
    const double tol = 1e-8 * (theta_hi - theta_lo);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = profile(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = profile(x1);
        }
    }
    const double refined = 0.5 * (a + b);
    if (profile(refined) > best_ll) best_theta = refined;

    double k = 0.0, lam = 0.0;
    profile(best_theta, &k, &lam);
    return GpdParams{lam, k, threshold};
}

DirichletPosterior::DirichletPosterior(std::vector<double> support,
                                       std::vector<double> concentrations)
    : support_(std::move(support)), concentrations_(std::move(concentrations)) {
    if (support_.empty() || support_.size() != concentrations_.size())
        throw std::invalid_argument("dirichlet: support and concentrations must be aligned");
    if (!all_finite(support_))
        throw std::invalid_argument("dirichlet: support values must be finite");
    if (std::adjacent_find(support_.begin(), support_.end(),
                           [](double a, double b) { return a >= b; }) != support_.end())
        throw std::invalid_argument("dirichlet: support must be strictly increasing");
    for (double v : concentrations_)
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument("dirichlet: concentrations must be positive");
}

DirichletPosterior dirichlet_update(const DirichletPosterior& prior,
                                    std::span<const long long> counts) {
    if (counts.size() != prior.size())
        throw std::invalid_argument("dirichlet_update: counts must align with the support");
    for (long long c : counts)
        if (c < 0) throw NegativeCount("dirichlet_update: negative count");
    std::vector<double> nu(prior.concentrations().begin(), prior.concentrations().end());
    for (std::size_t i = 0; i < nu.size(); ++i) nu[i] += static_cast<double>(counts[i]);
    return DirichletPosterior(std::vector<double>(prior.support().begin(), prior.support().end()),
                              std::move(nu));
}

DirichletPosterior dirichlet_update_with_energies(const DirichletPosterior& prior,
                                                  std::span<const double> energies) {
    if (!all_finite(energies))
        throw NonFinite("dirichlet_update_with_energies: non-finite energy");
    std::map<double, double> nu;
    for (std::size_t i = 0; i < prior.size(); ++i)
        nu[prior.support()[i]] = prior.concentrations()[i];
    for (double e : energies) {
        nu.try_emplace(e, kNewEnergyConcentration).first->second += 1.0;
    }
    std::vector<double> support, conc;
    support.reserve(nu.size());
    conc.reserve(nu.size());
    for (const auto& [e, v] : nu) {
        support.push_back(e);
        conc.push_back(v);
    }
    return DirichletPosterior(std::move(support), std::move(conc));
}

EnergyDistribution posterior_predictive(const DirichletPosterior& p) {
    const double total =
        std::accumulate(p.concentrations().begin(), p.concentrations().end(), 0.0);
    std::vector<double> weights(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) weights[i] = p.concentrations()[i] / total;
    return EnergyDistribution(std::vector<double>(p.support().begin(), p.support().end()),
                              std::move(weights));
}

SplicedDistribution::SplicedDistribution(EnergyDistribution body, GpdParams tail,
                                         double tail_mass)
    : body_(std::move(body)), tail_(tail), tail_mass_(tail_mass) {
    if (!(tail_mass_ > 0.0 && tail_mass_ < 1.0))
        throw std::invalid_argument("spliced: tail mass must be in (0, 1)");
    if (!(tail_.scale > 0.0)) throw std::invalid_argument("spliced: tail scale must be positive");
    if (body_.min_support() < tail_.threshold)
        throw std::invalid_argument("spliced: body must lie at or above the threshold");
}

double SplicedDistribution::cdf(double x) const {
    const double mu = tail_.threshold;
    if (x >= mu) return tail_mass_ + (1.0 - tail_mass_) * body_.cdf(x);
    const double u = mu - x;
    if (tail_.shape < 0.0 && u >= tail_.scale / -tail_.shape) return 0.0;
    return tail_mass_ * (1.0 - gpd_cdf(tail_, u));
}

double SplicedDistribution::partial_expectation(double c) const {
    if (tail_.heavy_tail())
        throw DomainError("spliced: tail shape >= 1, partial expectation is infinite");
    const double mu = tail_.threshold;
    const double k = tail_.shape;
    const double lam = tail_.scale;
    if (c >= mu)
        return tail_mass_ * (c - mu + lam / (1.0 - k)) +
               (1.0 - tail_mass_) * body_.partial_expectation(c);
    const double u = mu - c;
    if (k < 0.0 && u >= lam / -k) return 0.0;
    // survival(u) * mean excess over u, both in closed form for the GPD
    const double survival = std::exp(k == 0.0 ? -u / lam : -std::log1p(k * u / lam) / k);
    return tail_mass_ * survival * (lam + k * u) / (1.0 - k);
}

double SplicedDistribution::mean() const {
    if (tail_.heavy_tail()) throw DomainError("spliced: tail shape >= 1, mean is infinite");
    const double tail_mean = tail_.threshold - tail_.scale / (1.0 - tail_.shape);
    return tail_mass_ * tail_mean + (1.0 - tail_mass_) * body_.mean();
}

SplicedDistribution splice_tail(const EnergyDistribution& emp, const GpdParams& g) {
    const double mu = g.threshold;
    auto support = emp.support();
    auto cut = std::lower_bound(support.begin(), support.end(), mu);
    const std::size_t first_body = static_cast<std::size_t>(cut - support.begin());
    if (first_body == 0) throw NoTailMass("splice_tail: no empirical mass below the threshold");
    if (first_body == support.size())
        throw std::invalid_argument("splice_tail: threshold above the whole support");
    const double tail_mass = emp.cum_weight(first_body - 1);

    std::vector<double> body_support(support.begin() + first_body, support.end());
    std::vector<double> body_weights;
    body_weights.reserve(body_support.size());
    const double body_mass = 1.0 - tail_mass;
    for (std::size_t i = first_body; i < support.size(); ++i)
        body_weights.push_back(emp.weights()[i] / body_mass);
    return SplicedDistribution(
        EnergyDistribution(std::move(body_support), std::move(body_weights)), g, tail_mass);
}

EnergyDistribution bootstrap_resample(const EnergyDistribution& d, std::size_t n,
                                      std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("bootstrap_resample: need at least one draw");
    RngEngine rng = make_engine(seed);
    std::vector<std::size_t> counts(d.size(), 0);
    for (std::size_t i = 0; i < n; ++i) ++counts[d.sample_index(rng)];
    std::vector<double> support, weights;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (counts[i] == 0) continue;
        support.push_back(d.support()[i]);
        weights.push_back(static_cast<double>(counts[i]) / static_cast<double>(n));
    }
    return EnergyDistribution(std::move(support), std::move(weights));
}

}  // namespace optstop
