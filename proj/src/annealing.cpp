#include "optstop/annealing.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <set>
#include <thread>

#include "optstop/stopping.hpp"

namespace optstop {

namespace {

/// Dense symmetric coupling matrix; row-major, zero diagonal.
struct DenseCouplings {
    long n = 0;
    std::vector<int> j;

    explicit DenseCouplings(const IsingInstance& inst)
        : n(inst.num_vars()), j(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0) {
        for (const auto& c : inst.couplings()) {
            j[static_cast<std::size_t>(c.i) * n + c.j] = c.value;
            j[static_cast<std::size_t>(c.j) * n + c.i] = c.value;
        }
    }

    const int* row(long i) const { return j.data() + static_cast<std::size_t>(i) * n; }
};

struct SpinState {
    std::vector<std::int8_t> spins;
    std::vector<long> fields;  // h_i = sum_j J_ij s_j

    SpinState(const DenseCouplings& jm, RngEngine& rng) : spins(jm.n), fields(jm.n, 0) {
        for (auto& s : spins) s = (rng() & 1) ? 1 : -1;
        for (long i = 0; i < jm.n; ++i) {
            const int* row = jm.row(i);
            long h = 0;
            for (long k = 0; k < jm.n; ++k) h += static_cast<long>(row[k]) * spins[k];
            fields[i] = h;
        }
    }

    // One Metropolis proposal at site i; returns true when the flip happened.
    bool update(const DenseCouplings& jm, long i, double inv_temp, RngEngine& rng) {
        const long delta = -2L * spins[i] * fields[i];
        if (delta > 0 &&
            uniform01(rng) >= std::exp(-static_cast<double>(delta) * inv_temp))
            return false;
        spins[i] = -spins[i];
        const int* row = jm.row(i);
        const long two_s = 2L * spins[i];
        // zero diagonal keeps fields[i] itself unchanged
        for (long k = 0; k < jm.n; ++k) fields[k] += two_s * row[k];
        return true;
    }

    double energy() const {
        long acc = 0;
        for (std::size_t i = 0; i < spins.size(); ++i) acc += spins[i] * fields[i];
        return static_cast<double>(acc / 2);
    }
};

void validate(const AnnealSchedule& sched) {
    if (!(sched.t_init > sched.t_fin) || !(sched.t_fin > 0.0))
        throw std::invalid_argument("schedule: need t_init > t_fin > 0");
    if (sched.n_sweeps < 0) throw std::invalid_argument("schedule: need n_sweeps >= 0");
}

double anneal_once(const DenseCouplings& jm, const AnnealSchedule& sched, std::uint64_t seed) {
    RngEngine rng = make_engine(seed);
    SpinState state(jm, rng);
    const double step = sched.n_sweeps > 1
                            ? (sched.t_fin - sched.t_init) / static_cast<double>(sched.n_sweeps - 1)
                            : 0.0;
    for (long s = 0; s < sched.n_sweeps; ++s) {
        const double inv_temp = 1.0 / (sched.t_init + step * static_cast<double>(s));
        for (long i = 0; i < jm.n; ++i) state.update(jm, i, inv_temp, rng);
    }
    return state.energy();
}

}  // namespace

IsingInstance::IsingInstance(long num_vars, std::vector<Coupling> couplings)
    : num_vars_(num_vars), couplings_(std::move(couplings)) {
    if (num_vars_ < 1) throw InvalidSize("instance: need at least one variable");
    std::set<std::pair<int, int>> seen;
    for (auto& c : couplings_) {
        if (c.i > c.j) std::swap(c.i, c.j);
        if (c.i < 0 || c.j >= num_vars_ || c.i == c.j)
            throw std::invalid_argument("instance: coupling indices out of range");
        if (c.value == 0) throw std::invalid_argument("instance: zero coupling");
        if (!seen.emplace(c.i, c.j).second)
            throw std::invalid_argument("instance: duplicate coupling pair");
    }
    std::sort(couplings_.begin(), couplings_.end(), [](const Coupling& a, const Coupling& b) {
        return std::pair(a.i, a.j) < std::pair(b.i, b.j);
    });
}

double IsingInstance::energy(std::span<const std::int8_t> spins) const {
    if (static_cast<long>(spins.size()) != num_vars_)
        throw DimensionMismatch("energy: spin count must match num_vars");
    for (auto s : spins)
        if (s != 1 && s != -1) throw InvalidSpin("energy: spins must be +-1");
    long acc = 0;
    for (const auto& c : couplings_)
        acc += static_cast<long>(c.value) * spins[c.i] * spins[c.j];
    return static_cast<double>(acc);
}

IsingInstance generate_complete_instance(long n, std::uint64_t seed) {
    if (n < 2) throw InvalidSize("generate_complete_instance: need n >= 2");
    RngEngine rng = make_engine(seed);
    std::vector<Coupling> couplings;
    couplings.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const auto r = static_cast<int>(uniform_index(rng, 20));
            const int value = r < 10 ? r + 1 : -(r - 9);
            couplings.push_back({i, j, value});
        }
    }
    return IsingInstance(n, std::move(couplings));
}

SampleRecord sa_run(const IsingInstance& inst, const AnnealSchedule& sched, std::uint64_t seed) {
    validate(sched);
    const DenseCouplings jm(inst);
    return SampleRecord{anneal_once(jm, sched, seed), sched.n_sweeps, seed, 0};
}

GroundState brute_force_ground_state(const IsingInstance& inst) {
    const long n = inst.num_vars();
    if (n > 25) throw TooLarge("brute_force_ground_state: limited to 25 variables");
    const DenseCouplings jm(inst);

    std::vector<std::int8_t> spins(n, 1);
    std::vector<long> fields(n, 0);
    for (long i = 0; i < n; ++i) {
        const int* row = jm.row(i);
        long h = 0;
        for (long k = 0; k < n; ++k) h += row[k];
        fields[i] = h;
    }
    long energy = 0;
    for (long i = 0; i < n; ++i) energy += spins[i] * fields[i];
    energy /= 2;

    long best = energy;
    long second = std::numeric_limits<long>::max();
    std::vector<std::int8_t> best_config = spins;

    // Gray-code walk: step g flips bit ctz(g), so energies update in O(N).
    const std::uint64_t total = 1ULL << n;
    for (std::uint64_t g = 1; g < total; ++g) {
        const int b = std::countr_zero(g);
        energy += -2L * spins[b] * fields[b];
        spins[b] = -spins[b];
        const int* row = jm.row(b);
        const long two_s = 2L * spins[b];
        for (long k = 0; k < n; ++k) fields[k] += two_s * row[k];

        if (energy < best) {
            second = best;
            best = energy;
            best_config = spins;
        } else if (energy > best && energy < second) {
            second = energy;
        }
    }
    GroundState out;
    out.e0 = static_cast<double>(best);
    out.e1 = second == std::numeric_limits<long>::max()
                 ? std::numeric_limits<double>::infinity()
                 : static_cast<double>(second);
    out.config = std::move(best_config);
    return out;
}

std::vector<SampleRecord> sample_batch(const IsingInstance& inst, const AnnealSchedule& sched,
                                       long n_runs, std::uint64_t master_seed, int workers) {
    validate(sched);
    if (n_runs < 1) throw std::invalid_argument("sample_batch: need n_runs >= 1");
    if (workers < 1) throw std::invalid_argument("sample_batch: need workers >= 1");
    const DenseCouplings jm(inst);
    std::vector<SampleRecord> records(static_cast<std::size_t>(n_runs));

    std::atomic<long> next{0};
    auto work = [&] {
        for (long i = next.fetch_add(1); i < n_runs; i = next.fetch_add(1)) {
            const std::uint64_t seed = derive_seed(master_seed, static_cast<std::uint64_t>(i));
            records[static_cast<std::size_t>(i)] =
                SampleRecord{anneal_once(jm, sched, seed), sched.n_sweeps, seed, i};
        }
    };
    const int n_threads = static_cast<int>(std::min<long>(workers, n_runs));
    if (n_threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    return records;
}

std::vector<std::uint64_t> state_visit_counts(const IsingInstance& inst, double temperature,
                                              long n_updates, std::uint64_t seed) {
    const long n = inst.num_vars();
    if (n > 20) throw TooLarge("state_visit_counts: limited to 20 variables");
    if (!(temperature > 0.0))
        throw std::invalid_argument("state_visit_counts: temperature must be positive");
    const DenseCouplings jm(inst);
    RngEngine rng = make_engine(seed);
    SpinState state(jm, rng);

    std::uint64_t mask = 0;
    for (long i = 0; i < n; ++i)
        if (state.spins[i] > 0) mask |= 1ULL << i;

    std::vector<std::uint64_t> counts(1ULL << n, 0);
    const double inv_temp = 1.0 / temperature;
    for (long u = 0; u < n_updates; ++u) {
        const long i = u % n;
        if (state.update(jm, i, inv_temp, rng)) mask ^= 1ULL << i;
        ++counts[mask];
    }
    return counts;
}

std::vector<RunLengthChoice> optimize_run_length(
    const std::map<long, EnergyDistribution>& curves, std::span<const double> c_grid,
    double t_per_sweep) {
    if (curves.empty()) throw EmptyCandidates("optimize_run_length: no candidates");
    if (!(t_per_sweep > 0.0))
        throw InvalidCost("optimize_run_length: t_per_sweep must be positive");
    std::vector<RunLengthChoice> out;
    out.reserve(c_grid.size());
    for (double c : c_grid) {
        RunLengthChoice choice;
        bool first = true;
        for (const auto& [sweeps, dist] : curves) {
            const CostModel cm{c, static_cast<double>(sweeps) * t_per_sweep};
            const double cost = solve_optimal_cost(dist, cm);
            if (first || cost < choice.cost) {
                choice = {c, sweeps, cost};
                first = false;
            }
        }
        out.push_back(choice);
    }
    return out;
}

}  // namespace optstop
