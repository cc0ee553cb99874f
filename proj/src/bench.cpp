#include "optstop/bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>

#include "json.hpp"
#include "optstop/io.hpp"

namespace optstop {

namespace {

constexpr std::uint64_t kGenerateTag = 0x67656E;   // instance generation stream
constexpr std::uint64_t kBatchTag = 0x62617463;    // per-cell sampling stream
constexpr std::uint64_t kBootstrapTag = 0x626F6F;  // bootstrap replicate stream

std::size_t tail_cut(std::size_t n, double percentile) {
    const auto k = static_cast<std::size_t>(std::floor(static_cast<double>(n) * percentile / 100.0));
    return std::min(k, n - 1);
}

/// Value at sorted rank `rank` (counting multiplicity) of a distribution that
/// was built from integer counts out of n draws.
double rank_value(const EnergyDistribution& d, std::size_t n, std::size_t rank) {
    double seen = 0.0;
    const double want = static_cast<double>(rank) + 0.5;
    for (std::size_t i = 0; i < d.size(); ++i) {
        seen += d.weights()[i] * static_cast<double>(n);
        if (seen > want) return d.support()[i];
    }
    return d.max_support();
}

}  // namespace

std::vector<double> CGrid::values() const {
    if (!(min_c > 0.0) || !(max_c >= min_c))
        throw ConfigError("c grid: bounds must be positive and increasing");
    if (points_per_decade < 1) throw ConfigError("c grid: points_per_decade must be >= 1");
    if (min_c == max_c) return {min_c};
    const double decades = std::log10(max_c / min_c);
    const auto total = static_cast<std::size_t>(std::lround(decades * points_per_decade)) + 1;
    std::vector<double> out(std::max<std::size_t>(total, 2));
    const double n1 = static_cast<double>(out.size() - 1);
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = min_c * std::pow(max_c / min_c, static_cast<double>(j) / n1);
    out.front() = min_c;
    out.back() = max_c;
    return out;
}

BenchmarkConfig benchmark_config_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad benchmark config: ") + e.what());
    }
    try {
        BenchmarkConfig cfg;
        cfg.instance_paths = j.value("instances", std::vector<std::string>{});
        if (j.contains("generate")) {
            cfg.generate_sizes = j["generate"].value("sizes", std::vector<long>{});
            cfg.generate_count = j["generate"].value("count", 1);
        }
        cfg.schedules = j.at("schedules").get<std::vector<long>>();
        cfg.runs = j.at("runs").get<long>();
        const auto& g = j.at("c_grid");
        cfg.c_grid = {g.at("min").get<double>(), g.at("max").get<double>(),
                      g.value("points_per_decade", 25)};
        cfg.t_per_sweep = j.value("t_per_sweep", 1.0);
        cfg.t_init = j.value("t_init", 10.0);
        cfg.t_fin = j.value("t_fin", 1.0 / 3.0);
        cfg.e0_mode = j.value("e0_mode", std::string("auto"));
        if (j.contains("bootstrap")) {
            BootstrapOptions b;
            b.replicates = j["bootstrap"].value("replicates", 1000);
            b.tail_percentile = j["bootstrap"].value("tail_percentile", 0.1);
            cfg.bootstrap = b;
        }
        cfg.output_dir = j.value("output_dir", std::string("out"));
        cfg.write_samples = j.value("write_samples", true);
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad benchmark config: ") + e.what());
    }
}

std::vector<ErrorBar> bootstrap_error_bars(std::span<const double> samples, int replicates,
                                           double tail_percentile,
                                           std::span<const double> c_grid, const CostModel& cm,
                                           std::uint64_t seed) {
    if (replicates < 2)
        throw std::invalid_argument("bootstrap_error_bars: need at least 2 replicates");
    if (!(tail_percentile >= 0.0 && tail_percentile < 100.0))
        throw std::invalid_argument("bootstrap_error_bars: bad percentile");
    const EnergyDistribution base = build_empirical(samples);
    const std::size_t n = samples.size();
    const double mu_full = rank_value(base, n, tail_cut(n, tail_percentile));

    std::vector<std::vector<double>> costs(c_grid.size(),
                                           std::vector<double>(replicates, 0.0));
    for (int b = 0; b < replicates; ++b) {
        const EnergyDistribution rep = bootstrap_resample(base, n, derive_seed(seed, b));
        const double mu = rank_value(rep, n, tail_cut(n, tail_percentile));

        std::vector<double> tail;
        for (std::size_t i = 0; i < rep.size() && rep.support()[i] < mu; ++i) {
            const auto count =
                static_cast<std::size_t>(std::lround(rep.weights()[i] * static_cast<double>(n)));
            tail.insert(tail.end(), count, rep.support()[i]);
        }
        // an empty tail (degenerate data) keeps the plain empirical replicate;
        // an undersized one is an error the caller must see
        std::optional<SplicedDistribution> spliced;
        if (!tail.empty()) spliced = splice_tail(rep, gpd_fit_tail(tail, mu));

        for (std::size_t ci = 0; ci < c_grid.size(); ++ci) {
            const CostModel rc{c_grid[ci], cm.run_time};
            costs[ci][static_cast<std::size_t>(b)] =
                spliced ? solve_optimal_cost(*spliced, rc) : solve_optimal_cost(rep, rc);
        }
    }

    std::vector<ErrorBar> out(c_grid.size());
    const double nb = replicates;
    for (std::size_t ci = 0; ci < c_grid.size(); ++ci) {
        double mean = 0.0;
        for (double x : costs[ci]) mean += x;
        mean /= nb;
        const auto [lo, hi] = std::minmax_element(costs[ci].begin(), costs[ci].end());
        double var = 0.0;
        if (*lo != *hi) {
            for (double x : costs[ci]) var += (x - mean) * (x - mean);
            var /= nb - 1.0;
        }
        out[ci] = ErrorBar{c_grid[ci], mean, std::sqrt(var), mean < mu_full};
    }
    return out;
}

void run_benchmark(const BenchmarkConfig& config, std::uint64_t master_seed, int workers) {
    if (config.runs < 1) throw ConfigError("benchmark: runs must be >= 1");
    if (config.schedules.empty()) throw ConfigError("benchmark: no schedules");
    for (long s : config.schedules)
        if (s < 1) throw ConfigError("benchmark: sweep counts must be >= 1");
    if (config.e0_mode != "auto" && config.e0_mode != "none")
        throw ConfigError("benchmark: e0_mode must be 'auto' or 'none'");
    const std::vector<double> c_values = config.c_grid.values();
    const std::filesystem::path out_dir(config.output_dir);

    std::vector<std::pair<std::string, IsingInstance>> instances;
    for (const auto& path : config.instance_paths)
        instances.emplace_back(std::filesystem::path(path).stem().string(),
                               instance_from_json(read_file(path)));
    const std::uint64_t gen_seed = derive_seed(master_seed, kGenerateTag);
    std::uint64_t gen_index = 0;
    for (long size : config.generate_sizes)
        for (int k = 0; k < config.generate_count; ++k, ++gen_index)
            instances.emplace_back(
                "complete_N" + std::to_string(size) + "_" + std::to_string(k),
                generate_complete_instance(size, derive_seed(gen_seed, gen_index)));
    if (instances.empty()) throw ConfigError("benchmark: no instances configured");

    const bool with_e0 = config.e0_mode == "auto";
    std::string results = "instance,n_sweeps,c,optimal_cost,optimal_energy,optimal_effort,"
                          "mean_stop_step";
    if (with_e0) results += ",cost_minus_e0";
    results += '\n';
    std::string envelope = "instance,c,n_sweeps,optimal_cost\n";
    std::string errorbars = "instance,n_sweeps,c,mean_cost,std_cost,in_tail\n";
    nlohmann::json summary;
    summary["seed"] = master_seed;
    summary["runs"] = config.runs;
    summary["schedules"] = config.schedules;
    summary["c_grid"] = {{"min", config.c_grid.min_c},
                         {"max", config.c_grid.max_c},
                         {"points_per_decade", config.c_grid.points_per_decade}};
    summary["instances"] = nlohmann::json::array();

    const std::uint64_t batch_root = derive_seed(master_seed, kBatchTag);
    const std::uint64_t boot_root = derive_seed(master_seed, kBootstrapTag);
    std::size_t cell = 0;
    std::size_t boot_cell = 0;
    for (const auto& [name, inst] : instances) {
        std::map<long, EnergyDistribution> curves;
        std::map<long, std::vector<double>> cell_energies;
        double best_seen = std::numeric_limits<double>::infinity();
        for (long sweeps : config.schedules) {
            const AnnealSchedule sched{config.t_init, config.t_fin, sweeps};
            const auto records =
                sample_batch(inst, sched, config.runs, derive_seed(batch_root, cell), workers);
            ++cell;
            std::vector<double> energies(records.size());
            for (std::size_t i = 0; i < records.size(); ++i) {
                energies[i] = records[i].energy;
                best_seen = std::min(best_seen, records[i].energy);
            }
            EnergyDistribution dist = build_empirical(energies);
            if (config.write_samples)
                write_file(out_dir / "samples" / (name + "_s" + std::to_string(sweeps) + ".csv"),
                           samples_to_csv(records));
            write_file(out_dir / "distributions" /
                           (name + "_s" + std::to_string(sweeps) + ".json"),
                       distribution_to_json(dist));
            curves.emplace(sweeps, std::move(dist));
            cell_energies.emplace(sweeps, std::move(energies));
        }

        std::optional<double> e0;
        std::string e0_source = "none";
        nlohmann::json inst_summary{{"name", name}, {"num_vars", inst.num_vars()}};
        if (with_e0) {
            if (inst.num_vars() <= 25) {
                const GroundState gs = brute_force_ground_state(inst);
                e0 = gs.e0;
                e0_source = "exact";
                inst_summary["e1"] = gs.e1;
            } else {
                e0 = best_seen;
                e0_source = "best-seen";
            }
            inst_summary["e0"] = *e0;
        }
        inst_summary["e0_source"] = e0_source;
        summary["instances"].push_back(inst_summary);

        for (const auto& [sweeps, dist] : curves) {
            const double t_run = static_cast<double>(sweeps) * config.t_per_sweep;
            for (double c : c_values) {
                const StoppingSolution sol = split_cost(dist, CostModel{c, t_run});
                results += name;
                results += ',' + std::to_string(sweeps);
                results += ',' + format_double(c);
                results += ',' + format_double(sol.optimal_cost);
                results += ',' + format_double(sol.optimal_energy);
                results += ',' + format_double(sol.optimal_effort);
                results += ',' + format_double(sol.mean_stop_step);
                if (with_e0) results += ',' + format_double(sol.optimal_cost - *e0);
                results += '\n';
            }
        }

        for (const auto& choice : optimize_run_length(curves, c_values, config.t_per_sweep)) {
            envelope += name;
            envelope += ',' + format_double(choice.unit_cost);
            envelope += ',' + std::to_string(choice.n_sweeps);
            envelope += ',' + format_double(choice.cost);
            envelope += '\n';
        }

        if (config.bootstrap) {
            for (const auto& [sweeps, energies] : cell_energies) {
                const CostModel cm{0.0, static_cast<double>(sweeps) * config.t_per_sweep};
                const auto bars = bootstrap_error_bars(
                    energies, config.bootstrap->replicates, config.bootstrap->tail_percentile,
                    c_values, cm, derive_seed(boot_root, boot_cell++));
                for (const auto& bar : bars) {
                    errorbars += name;
                    errorbars += ',' + std::to_string(sweeps);
                    errorbars += ',' + format_double(bar.unit_cost);
                    errorbars += ',' + format_double(bar.mean_cost);
                    errorbars += ',' + format_double(bar.std_cost);
                    errorbars += bar.in_tail ? ",1\n" : ",0\n";
                }
            }
        }
    }

    write_file(out_dir / "results.csv", results);
    write_file(out_dir / "envelope.csv", envelope);
    if (config.bootstrap) write_file(out_dir / "errorbars.csv", errorbars);
    write_file(out_dir / "summary.json", summary.dump(2) + "\n");
}

}  // namespace optstop
