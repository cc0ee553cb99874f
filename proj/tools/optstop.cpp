#include <algorithm>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "optstop/bench.hpp"
#include "optstop/controller.hpp"
#include "optstop/io.hpp"
#include "optstop/parallel.hpp"
#include "optstop/scaling.hpp"

namespace {

using namespace optstop;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

struct BenchArgs {
    std::string config_path;
    std::uint64_t seed = 0;
    int workers = 1;
};

struct LiveArgs {
    std::string instance_path;
    std::string policy = "gaussian-ml";
    double unit_cost = 0.0;
    double t_run = 1.0;
    std::string prior_path;
    long sweeps = 1000;
    double t_init = 10.0;
    double t_fin = 1.0 / 3.0;
    long burn_in = 500;
    long tail_obs = 100;
    double override_level = 0.99;
    long max_iterations = 10'000'000;
    std::uint64_t seed = 0;
    std::string log_path;
};

struct FitArgs {
    std::string input_path;
    std::string model = "exp-sqrt";
    double e1_gap = 0.0;
    bool has_gap = false;
};

struct ParallelArgs {
    std::string input_path;
    double time_rate = 0.0;
    double core_rate = 0.0;
    long max_cores = 1;
    double t_run = 1.0;
    std::string summary_path;
};

int run_bench(const BenchArgs& args) {
    const auto config = benchmark_config_from_json(read_file(args.config_path));
    run_benchmark(config, args.seed, args.workers);
    std::printf("wrote %s\n", config.output_dir.c_str());
    return kExitOk;
}

int run_live(const LiveArgs& args) {
    const auto inst = instance_from_json(read_file(args.instance_path));
    SessionConfig cfg;
    cfg.policy = policy_from_string(args.policy);
    cfg.cost = {args.unit_cost, args.t_run};
    cfg.burn_in_len = args.burn_in;
    cfg.tail_obs = args.tail_obs;
    cfg.override_level = args.override_level;
    cfg.max_iterations = args.max_iterations;
    if (!args.prior_path.empty()) cfg.prior = prior_from_json(read_file(args.prior_path));

    const AnnealSchedule sched{args.t_init, args.t_fin, args.sweeps};
    long run_counter = 0;
    const auto sampler = [&] {
        return sa_run(inst, sched, derive_seed(args.seed, run_counter++)).energy;
    };

    std::string log = "n,energy,target,decision\n";
    const auto session = run_session(sampler, cfg, [&](const SessionStep& step) {
        log += std::to_string(step.n);
        log += ',' + format_double(step.energy);
        log += ',';
        if (step.target) log += format_double(*step.target);
        log += step.decision == Decision::stop ? ",stop\n" : ",continue\n";
    });
    if (!args.log_path.empty()) write_file(args.log_path, log);

    nlohmann::json summary;
    summary["policy"] = args.policy;
    summary["realized_cost"] = session.realized_cost();
    summary["stop_step"] = session.step_count();
    summary["best_energy"] =
        *std::min_element(session.observations().begin(), session.observations().end());
    summary["stopped_by_override"] = session.stopped_by_override();
    if (session.target()) summary["final_target"] = *session.target();
    std::printf("%s\n", summary.dump().c_str());
    return kExitOk;
}

int run_fit(const FitArgs& args) {
    const auto points = read_points_csv(args.input_path);
    const auto model = scaling_model_from_string(args.model);
    const auto fit = fit_scaling(points, model);
    nlohmann::json out;
    out["model"] = to_string(model);
    if (model == ScalingModel::exp_sqrt || model == ScalingModel::exp_linear) {
        out["alpha"] = fit.params[0];
        out["beta"] = fit.params[1];
    } else if (model == ScalingModel::quadratic) {
        out["gamma"] = fit.params[0];
        out["delta"] = fit.params[1];
        out["omega"] = fit.params[2];
    } else {
        out["gamma"] = fit.params[0];
        out["omega"] = fit.params[1];
    }
    out["residual_norm"] = fit.residual_norm;
    if (args.has_gap) out["giveup_size"] = giveup_size(fit, args.e1_gap);
    std::printf("%s\n", out.dump().c_str());
    return kExitOk;
}

int run_parallel(const ParallelArgs& args) {
    const auto energies = read_samples_csv(args.input_path);
    const auto d = build_empirical(energies);
    const HardwareCost hc{args.time_rate, args.core_rate};
    if (args.max_cores < 1) throw ConfigError("parallel: --max-cores must be >= 1");

    std::string csv = "n_cpu,unit_cost,optimal_cost\n";
    std::vector<long> range;
    for (long n = 1; n <= args.max_cores; ++n) {
        range.push_back(n);
        const double unit = hc.time_rate / static_cast<double>(n) + hc.core_rate;
        csv += std::to_string(n);
        csv += ',' + format_double(unit);
        csv += ',' + format_double(solve_optimal_cost(d, CostModel{unit, args.t_run}));
        csv += '\n';
    }
    std::fputs(csv.c_str(), stdout);

    if (!args.summary_path.empty()) {
        const auto best = optimal_cores(d, hc, args.t_run, range);
        nlohmann::json summary;
        summary["n_cpu"] = best.n_cpu;
        summary["optimal_cost"] = best.cost;
        write_file(args.summary_path, summary.dump() + "\n");
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal-stopping benchmark toolkit for randomized optimizers"};
    app.require_subcommand(1);

    BenchArgs bench_args;
    auto* bench = app.add_subcommand("bench", "Run a benchmark campaign from a JSON config");
    bench->add_option("--config", bench_args.config_path, "Campaign config (JSON)")->required();
    bench->add_option("--seed", bench_args.seed, "Master seed")->required();
    bench->add_option("--workers", bench_args.workers, "Worker threads")->default_val(1);

    LiveArgs live_args;
    auto* live = app.add_subcommand("live", "Run one online optimally-stopped SA session");
    live->add_option("--instance", live_args.instance_path, "Instance file (JSON)")->required();
    live->add_option("--policy", live_args.policy, "gaussian-ml or bayes-dirichlet");
    live->add_option("--c", live_args.unit_cost, "Unit cost rate")->required();
    live->add_option("--t-run", live_args.t_run, "Run time per SA call")->required();
    live->add_option("--prior", live_args.prior_path, "Dirichlet prior (JSON)");
    live->add_option("--sweeps", live_args.sweeps, "SA sweeps per run");
    live->add_option("--t-init", live_args.t_init, "Initial temperature");
    live->add_option("--t-fin", live_args.t_fin, "Final temperature");
    live->add_option("--burn-in", live_args.burn_in, "Burn-in length");
    live->add_option("--tail-obs", live_args.tail_obs, "Tail observations for the GPD fit");
    live->add_option("--override-level", live_args.override_level, "Override confidence");
    live->add_option("--max-iterations", live_args.max_iterations, "Iteration cap");
    live->add_option("--seed", live_args.seed, "Master seed");
    live->add_option("--log", live_args.log_path, "Write the per-step session log (CSV)");

    FitArgs fit_args;
    auto* fit = app.add_subcommand("fit", "Fit a scaling model to size,value points");
    fit->add_option("--input", fit_args.input_path, "Points CSV (size,value)")->required();
    fit->add_option("--model", fit_args.model, "exp-sqrt, quadratic, exp-linear or quadratic-2d");
    auto* gap = fit->add_option("--e1-gap", fit_args.e1_gap,
                                "Gap to the second-lowest energy; adds the give-up size");

    ParallelArgs par_args;
    auto* par = app.add_subcommand("parallel", "Scan core counts for a sample file");
    par->add_option("--input", par_args.input_path, "Samples CSV (run_index,energy)")->required();
    par->add_option("--ct", par_args.time_rate, "Time cost rate")->required();
    par->add_option("--ccpu", par_args.core_rate, "Per-core cost rate")->required();
    par->add_option("--max-cores", par_args.max_cores, "Largest core count")->required();
    par->add_option("--t-run", par_args.t_run, "Run time per call");
    par->add_option("--summary", par_args.summary_path, "Write the chosen optimum (JSON)");

    try {
        app.parse(argc, argv);
        fit_args.has_gap = gap->count() > 0;
        if (*bench) return run_bench(bench_args);
        if (*live) return run_live(live_args);
        if (*fit) return run_fit(fit_args);
        if (*par) return run_parallel(par_args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const IoError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const Error& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return kExitData;
    }
    return kExitConfig;
}
