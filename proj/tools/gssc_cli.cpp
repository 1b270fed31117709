// gssc: generate synthetic subspace datasets, run SSC / GSSC on them, and
// drive parameter sweeps.
#include "gssc/dataset_io.hpp"
#include "gssc/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace gssc;

namespace {

// Flags shared by every subcommand that runs the solver. Each flag, when
// given, overrides the matching key=value config entry.
struct SolverFlags {
    std::map<std::string, std::string> values;

    void attach(CLI::App* app) {
        const auto add = [&](const std::string& flag, const std::string& key, const std::string& help) {
            app->add_option_function<std::string>(flag, [this, key](const std::string& v) { values[key] = v; }, help);
        };
        add("--alpha-e", "alpha_e", "error weight scale (default 5)");
        add("--alpha-z", "alpha_z", "noise weight scale (default 50)");
        add("--rho0", "rho0", "initial ADMM penalty (default 10)");
        add("--mu", "mu", "penalty growth per iteration (default 1.05)");
        add("--epsilon", "epsilon", "ADMM stop tolerance (default 0.001)");
        add("--max-iters", "max_iters", "ADMM iteration cap (default 200)");
        add("--affine", "affine", "affine subspaces: true/false (default false)");
        add("--linear-solver", "linear_solver", "auto, woodbury or dense");
        add("--alpha1", "alpha1", "first-threshold residual weight (default 0.4)");
        add("--alpha2", "alpha2", "first-threshold median weight (default 0.5)");
        add("--beta", "beta", "threshold decay (default 0.65)");
        add("--kappa", "kappa", "weight of marked entries (default 1e-4)");
        add("--greedy-iters", "greedy_iters", "greedy iterations (default 5)");
    }

    void apply(KeyValueConfig& kv) const {
        for (const auto& [k, v] : values) kv.set(k, v);
    }
};

void write_history(const fs::path& path, const TrialOutcome& outcome) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "iteration,num_marked,threshold,solver_iters,converged,res_affine,res_constraint,res_delta_a,res_delta_e,"
           "rho,misclassification\n";
    const auto& hist = outcome.greedy.state.history;
    for (std::size_t i = 0; i < hist.size(); ++i) {
        const GreedyStep& s = hist[i];
        const Residuals& r = s.solver.residuals;
        out << s.iteration << ',' << s.num_marked << ',' << format_double(s.threshold) << ','
            << s.solver.iterations << ',' << (s.solver.converged ? 1 : 0) << ',' << format_double(r.affine) << ','
            << format_double(r.constraint) << ',' << format_double(r.delta_a) << ',' << format_double(r.delta_e)
            << ',' << format_double(s.solver.rho) << ','
            << (i < outcome.rate_per_iter.size() ? format_double(outcome.rate_per_iter[i]) : std::string("nan"))
            << '\n';
    }
}

int cmd_generate(const std::string& config_path, const fs::path& out_dir, const std::map<std::string, std::string>& overrides) {
    KeyValueConfig kv = config_path.empty() ? KeyValueConfig() : KeyValueConfig::from_file(config_path);
    for (const auto& [k, v] : overrides) kv.set(k, v);

    TrialSpec spec;
    spec.theta = kv.get_double("theta", spec.theta);
    spec.p_err = kv.get_double("p_err", spec.p_err);
    spec.p_ers = kv.get_double("p_ers", spec.p_ers);
    spec.snr_db = kv.get_optional_double("snr_db");
    spec.kappa = kv.get_double("kappa", spec.kappa);
    spec.ambient_dim = static_cast<int>(kv.get_int("ambient_dim", spec.ambient_dim));
    spec.per_subspace = static_cast<int>(kv.get_int("per_subspace", spec.per_subspace));
    const std::uint64_t seed = kv.get_uint64("seed", 0);

    const SyntheticDataset ds = make_trial_dataset(spec, seed);
    DatasetManifest m;
    m.D = static_cast<int>(ds.rows());
    m.N = static_cast<int>(ds.cols());
    m.K = ds.num_subspaces;
    m.theta = spec.theta;
    m.p_err = spec.p_err;
    m.p_ers = spec.p_ers;
    m.snr_db = spec.snr_db;
    m.seed = seed;
    m.kappa = spec.kappa;
    save_dataset(out_dir, ds, m);
    std::cout << "wrote " << m.D << "x" << m.N << " dataset (K=" << m.K << ") to " << out_dir.string() << '\n';
    return 0;
}

int cmd_solve(const fs::path& dataset_dir, const std::string& algorithm, const std::string& config_path,
              const SolverFlags& flags, fs::path out_dir, fs::path record_path, std::optional<std::uint64_t> seed,
              const std::string& trace_path) {
    const StoredDataset ds = load_dataset(dataset_dir);
    KeyValueConfig kv = config_path.empty() ? KeyValueConfig() : KeyValueConfig::from_file(config_path);
    flags.apply(kv);
    const SolverConfig scfg = solver_config_from(kv);
    GreedyConfig gcfg = greedy_config_from(kv);
    gcfg.kappa = ds.manifest.kappa;
    const Algorithm algo = parse_algorithm(algorithm);

    if (out_dir.empty()) out_dir = dataset_dir / ("solve_" + to_string(algo));
    fs::create_directories(out_dir);
    if (record_path.empty()) record_path = out_dir / "results.csv";

    const std::uint64_t cluster_seed = seed ? *seed : stream_seed(ds.manifest.seed, SeedStream::Clustering);
    TrialOutcome outcome;
    if (trace_path.empty()) {
        outcome = run_pipeline(ds.Y, ds.lambda, ds.labels, ds.manifest.K, algo, scfg, gcfg, cluster_seed);
    } else {
        std::ofstream trace(trace_path);
        if (!trace) throw Error("cannot write " + trace_path);
        trace << "solve,iter,res_affine,res_constraint,res_delta_a,res_delta_e,rho\n";
        int solve_index = -1;
        GreedyConfig g = gcfg;
        if (algo == Algorithm::SSC) g.num_greedy_iters = 0;
        const auto on_iter = [&](const SolverState& s) {
            if (s.iter == 1) ++solve_index;
            const Residuals& r = s.residuals;
            trace << solve_index << ',' << s.iter << ',' << format_double(r.affine) << ','
                  << format_double(r.constraint) << ',' << format_double(r.delta_a) << ','
                  << format_double(r.delta_e) << ',' << format_double(s.rho) << '\n';
        };
        const auto start = std::chrono::steady_clock::now();
        outcome.greedy = run_gssc(ds.Y, ds.lambda, scfg, g,
                                  [&](const GreedyStep& step, const GreedyState&) {
                                      const auto a = cluster(build_affinity(step.C, ds.manifest.K), cluster_seed);
                                      outcome.rate_per_iter.push_back(misclassification(a.labels, ds.labels, ds.manifest.K).rate);
                                      outcome.labels = a.labels;
                                      outcome.solver_iters += step.solver.iterations;
                                  },
                                  on_iter);
        outcome.misclassification = outcome.rate_per_iter.back();
        outcome.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }

    write_labels_csv(out_dir / "labels.csv", outcome.labels);
    write_history(out_dir / "history.csv", outcome);

    TrialRecord rec;
    rec.theta = ds.manifest.theta;
    rec.p_err = ds.manifest.p_err;
    rec.p_ers = ds.manifest.p_ers;
    rec.snr_db = ds.manifest.snr_db;
    rec.algorithm = to_string(algo);
    rec.greedy_iters = algo == Algorithm::SSC ? 0 : gcfg.num_greedy_iters;
    rec.trial_seed = ds.manifest.seed;
    rec.misclassification = outcome.misclassification;
    rec.wall_seconds = outcome.wall_seconds;
    rec.solver_iters = outcome.solver_iters;
    append_results(record_path, {rec});

    std::cout << to_string(algo) << " misclassification=" << format_double(outcome.misclassification)
              << " admm_iters=" << outcome.solver_iters << '\n';
    return 0;
}

int cmd_sweep(const std::string& config_path, const SolverFlags& flags, const fs::path& out_dir, int jobs) {
    KeyValueConfig kv = KeyValueConfig::from_file(config_path);
    flags.apply(kv);
    const SweepSpec spec = SweepSpec::from_config(kv);
    const SweepReport report = run_sweep(spec, out_dir, jobs, std::cerr);
    std::cout << "tasks=" << report.tasks_total << " skipped=" << report.tasks_skipped
              << " failed=" << report.tasks_failed << " rows_written=" << report.rows_written << '\n'
              << "results: " << (out_dir / "results.csv").string() << '\n'
              << "summary: " << (out_dir / "summary.csv").string() << '\n'
              << "plot:    python3 " << (out_dir / "plot_phase.py").string() << ' '
              << (out_dir / "summary.csv").string() << '\n';
    return report.tasks_failed ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Greedy sparse subspace clustering: datasets, solves and sweeps"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("generate", "Write a synthetic three-subspace dataset directory");
    std::string gen_config;
    std::string gen_out;
    std::map<std::string, std::string> gen_overrides;
    gen->add_option("config", gen_config, "key=value dataset config (theta, p_err, p_ers, snr_db, seed, kappa, ...)");
    gen->add_option("-o,--out", gen_out, "output directory")->required();
    for (const char* key : {"theta", "p_err", "p_ers", "snr_db", "seed", "kappa"}) {
        const std::string k = key;
        gen->add_option_function<std::string>("--" + k, [&gen_overrides, k](const std::string& v) { gen_overrides[k] = v; },
                                              "override " + k);
    }

    auto* solve = app.add_subcommand("solve", "Cluster a dataset directory with SSC or GSSC");
    std::string solve_dir, solve_algo = "GSSC", solve_config, solve_out, solve_record, solve_trace;
    std::optional<std::uint64_t> solve_seed;
    SolverFlags solve_flags;
    solve->add_option("dataset", solve_dir, "dataset directory")->required()->check(CLI::ExistingDirectory);
    solve->add_option("-a,--algorithm", solve_algo, "SSC or GSSC")->capture_default_str();
    solve->add_option("-c,--config", solve_config, "key=value solver config");
    solve->add_option("-o,--out", solve_out, "output directory (default <dataset>/solve_<algorithm>)");
    solve->add_option("--record", solve_record, "results CSV to append the trial row to");
    solve->add_option("--seed", solve_seed, "k-means seed (default derived from the dataset seed)");
    solve->add_option("--trace", solve_trace, "write per-ADMM-iteration residuals to this CSV");
    solve_flags.attach(solve);

    auto* sweep = app.add_subcommand("sweep", "Run a (theta, p_err, p_ers, snr) sweep; resumable");
    std::string sweep_config, sweep_out = "sweep_out";
    int sweep_jobs = 0;
    SolverFlags sweep_flags;
    sweep->add_option("config", sweep_config, "key=value sweep config")->required()->check(CLI::ExistingFile);
    sweep->add_option("-o,--out", sweep_out, "output directory")->capture_default_str();
    sweep->add_option("-j,--jobs", sweep_jobs, "worker threads (default: GSSC_JOBS or all cores)");
    sweep_flags.attach(sweep);

    auto* summarize = app.add_subcommand("summarize", "Aggregate results.csv into per-cell means");
    std::string sum_in, sum_out;
    summarize->add_option("results", sum_in, "results CSV")->required()->check(CLI::ExistingFile);
    summarize->add_option("-o,--out", sum_out, "summary CSV (default: summary.csv next to results)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) return cmd_generate(gen_config, gen_out, gen_overrides);
        if (*solve)
            return cmd_solve(solve_dir, solve_algo, solve_config, solve_flags, solve_out, solve_record, solve_seed,
                             solve_trace);
        if (*sweep) return cmd_sweep(sweep_config, sweep_flags, sweep_out, sweep_jobs);
        if (*summarize) {
            const fs::path in = sum_in;
            const fs::path out = sum_out.empty() ? in.parent_path() / "summary.csv" : fs::path(sum_out);
            const auto cells = summarize_results(in, out);
            std::cout << "wrote " << cells.size() << " cells to " << out.string() << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
