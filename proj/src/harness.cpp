#include "gssc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>
#include <tuple>

namespace gssc {

namespace fs = std::filesystem;

std::uint64_t trial_seed(std::uint64_t seed_base, double theta, double p_err, double p_ers, int trial) {
    std::uint64_t s = derive_seed(seed_base, std::bit_cast<std::uint64_t>(theta));
    s = derive_seed(s, std::bit_cast<std::uint64_t>(p_err));
    s = derive_seed(s, std::bit_cast<std::uint64_t>(p_ers));
    return derive_seed(s, static_cast<std::uint64_t>(trial));
}

SyntheticDataset make_trial_dataset(const TrialSpec& spec, std::uint64_t seed) {
    const SubspaceModel model = build_bases(spec.theta, stream_seed(seed, SeedStream::Bases), spec.ambient_dim);
    SyntheticDataset clean = sample_points(model, spec.per_subspace, stream_seed(seed, SeedStream::Samples));
    CorruptionSpec corruption;
    corruption.p_err = spec.p_err;
    corruption.p_ers = spec.p_ers;
    corruption.snr_db = spec.snr_db;
    corruption.kappa = spec.kappa;
    corruption.seed = stream_seed(seed, SeedStream::Corruption);
    return inject_corruption(std::move(clean), corruption);
}

std::string to_string(Algorithm a) { return a == Algorithm::SSC ? "SSC" : "GSSC"; }

Algorithm parse_algorithm(const std::string& s) {
    std::string u = s;
    std::transform(u.begin(), u.end(), u.begin(), [](unsigned char c) { return std::toupper(c); });
    if (u == "SSC") return Algorithm::SSC;
    if (u == "GSSC") return Algorithm::GSSC;
    throw InvalidArgument("unknown algorithm '" + s + "' (expected SSC or GSSC)");
}

TrialOutcome run_pipeline(const Matrix& Y, const Matrix& lambda0, const Labels& truth, int num_clusters,
                          Algorithm algorithm, const SolverConfig& scfg, const GreedyConfig& gcfg,
                          std::uint64_t cluster_seed, const ClusterOptions& copts) {
    const auto start = std::chrono::steady_clock::now();
    GreedyConfig g = gcfg;
    if (algorithm == Algorithm::SSC) g.num_greedy_iters = 0;

    TrialOutcome out;
    const auto score = [&](const GreedyStep& step, const GreedyState&) {
        const ClusterAssignment a = cluster(build_affinity(step.C, num_clusters), cluster_seed, copts);
        if (!truth.empty()) out.rate_per_iter.push_back(misclassification(a.labels, truth, num_clusters).rate);
        out.labels = a.labels;
        out.solver_iters += step.solver.iterations;
    };
    out.greedy = run_gssc(Y, lambda0, scfg, g, score);
    out.misclassification = out.rate_per_iter.empty() ? 0.0 : out.rate_per_iter.back();
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

TrialOutcome run_trial(const TrialSpec& spec, std::uint64_t seed, Algorithm algorithm, const SolverConfig& scfg,
                       const GreedyConfig& gcfg, const ClusterOptions& copts) {
    const SyntheticDataset ds = make_trial_dataset(spec, seed);
    GreedyConfig g = gcfg;
    g.kappa = spec.kappa;
    return run_pipeline(ds.Y, ds.lambda0, ds.labels, ds.num_subspaces, algorithm, scfg, g,
                        stream_seed(seed, SeedStream::Clustering), copts);
}

TrialOutcome replay(const TrialRecord& record, const SolverConfig& scfg, GreedyConfig gcfg, const TrialSpec& base,
                    const ClusterOptions& copts) {
    TrialSpec spec = base;
    spec.theta = record.theta;
    spec.p_err = record.p_err;
    spec.p_ers = record.p_ers;
    spec.snr_db = record.snr_db;
    gcfg.num_greedy_iters = record.greedy_iters;
    return run_trial(spec, record.trial_seed, parse_algorithm(record.algorithm), scfg, gcfg, copts);
}

SolverConfig solver_config_from(const KeyValueConfig& kv, SolverConfig base) {
    base.alpha_e = kv.get_double("alpha_e", base.alpha_e);
    base.alpha_z = kv.get_double("alpha_z", base.alpha_z);
    base.rho0 = kv.get_double("rho0", base.rho0);
    base.mu = kv.get_double("mu", base.mu);
    base.epsilon = kv.get_double("epsilon", base.epsilon);
    base.max_iters = static_cast<int>(kv.get_int("max_iters", base.max_iters));
    base.affine = kv.get_bool("affine", base.affine);
    if (const auto m = kv.get("linear_solver")) {
        if (*m == "auto") base.linear_solver = LinearSolver::Auto;
        else if (*m == "woodbury") base.linear_solver = LinearSolver::Woodbury;
        else if (*m == "dense") base.linear_solver = LinearSolver::Dense;
        else throw InvalidArgument("linear_solver must be auto, woodbury or dense");
    }
    base.validate();
    return base;
}

GreedyConfig greedy_config_from(const KeyValueConfig& kv, GreedyConfig base) {
    base.alpha1 = kv.get_double("alpha1", base.alpha1);
    base.alpha2 = kv.get_double("alpha2", base.alpha2);
    base.beta = kv.get_double("beta", base.beta);
    base.kappa = kv.get_double("kappa", base.kappa);
    base.num_greedy_iters = static_cast<int>(kv.get_int("greedy_iters", base.num_greedy_iters));
    base.validate();
    return base;
}

SweepSpec SweepSpec::from_config(const KeyValueConfig& kv) {
    SweepSpec s;
    s.theta_list = kv.get_double_list("theta", s.theta_list);
    s.p_err_list = kv.get_double_list("p_err", s.p_err_list);
    s.p_ers_list = kv.get_double_list("p_ers", s.p_ers_list);
    if (const auto snr = kv.get("snr_db")) {
        s.snr_list.clear();
        for (const auto& item : split(*snr, ',')) s.snr_list.push_back(parse_optional_double(item));
        if (s.snr_list.empty()) s.snr_list.push_back(std::nullopt);
    }
    s.trials = static_cast<int>(kv.get_int("trials", s.trials));
    if (kv.contains("algorithms")) {
        s.algorithms.clear();
        for (const auto& a : kv.get_string_list("algorithms", {})) s.algorithms.push_back(parse_algorithm(a));
    }
    s.seed_base = kv.get_uint64("seed_base", s.seed_base);
    s.record_history = kv.get_bool("record_history", s.record_history);
    s.trial.kappa = kv.get_double("kappa", s.trial.kappa);
    s.trial.ambient_dim = static_cast<int>(kv.get_int("ambient_dim", s.trial.ambient_dim));
    s.trial.per_subspace = static_cast<int>(kv.get_int("per_subspace", s.trial.per_subspace));
    s.solver = solver_config_from(kv, s.solver);
    s.greedy = greedy_config_from(kv, s.greedy);
    s.greedy.kappa = s.trial.kappa;
    s.clustering.restarts = static_cast<int>(kv.get_int("kmeans_restarts", s.clustering.restarts));
    s.clustering.max_iters = static_cast<int>(kv.get_int("kmeans_max_iters", s.clustering.max_iters));
    s.validate();
    return s;
}

void SweepSpec::validate() const {
    if (theta_list.empty() || p_err_list.empty() || p_ers_list.empty() || snr_list.empty())
        throw InvalidArgument("sweep: every parameter list needs at least one value");
    for (double t : theta_list)
        if (!(t >= 0.0 && t < 90.0)) throw InvalidArgument("sweep: theta outside [0, 90)");
    for (double p : p_err_list)
        if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("sweep: p_err outside [0, 1]");
    for (double p : p_ers_list)
        if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("sweep: p_ers outside [0, 1]");
    if (trials < 1) throw InvalidArgument("sweep: trials must be positive");
    if (algorithms.empty()) throw InvalidArgument("sweep: no algorithms selected");
    solver.validate();
    greedy.validate();
}

std::vector<SweepTask> enumerate_tasks(const SweepSpec& spec) {
    std::vector<SweepTask> tasks;
    for (double theta : spec.theta_list)
        for (double p_err : spec.p_err_list)
            for (double p_ers : spec.p_ers_list)
                for (const auto& snr : spec.snr_list)
                    for (int t = 0; t < spec.trials; ++t)
                        for (Algorithm a : spec.algorithms) {
                            SweepTask task;
                            task.spec = spec.trial;
                            task.spec.theta = theta;
                            task.spec.p_err = p_err;
                            task.spec.p_ers = p_ers;
                            task.spec.snr_db = snr;
                            task.seed = trial_seed(spec.seed_base, theta, p_err, p_ers, t);
                            task.algorithm = a;
                            tasks.push_back(task);
                        }
    return tasks;
}

namespace {

TrialRecord base_record(const SweepTask& task) {
    TrialRecord r;
    r.theta = task.spec.theta;
    r.p_err = task.spec.p_err;
    r.p_ers = task.spec.p_ers;
    r.snr_db = task.spec.snr_db;
    r.algorithm = to_string(task.algorithm);
    r.trial_seed = task.seed;
    return r;
}

// Key that identifies a finished unit of work in results.csv: the final row
// of a task (greedy_iters equal to the configured count, 0 for SSC).
using DoneKey = std::tuple<CellKey, std::uint64_t>;

int final_greedy_iters(const SweepTask& task, const SweepSpec& spec) {
    return task.algorithm == Algorithm::SSC ? 0 : spec.greedy.num_greedy_iters;
}

}  // namespace

std::vector<TrialRecord> records_for(const SweepTask& task, const TrialOutcome& outcome, const SweepSpec& spec) {
    std::vector<TrialRecord> rows;
    const int last = final_greedy_iters(task, spec);
    const int first = (task.algorithm == Algorithm::GSSC && spec.record_history) ? 0 : last;
    for (int n = first; n <= last; ++n) {
        TrialRecord r = base_record(task);
        r.greedy_iters = n;
        r.misclassification = outcome.rate_per_iter.at(static_cast<std::size_t>(n));
        int iters = 0;
        for (int s = 0; s <= n; ++s) iters += outcome.greedy.state.history.at(static_cast<std::size_t>(s)).solver.iterations;
        r.solver_iters = iters;
        r.wall_seconds = n == last ? outcome.wall_seconds : 0.0;
        rows.push_back(r);
    }
    return rows;
}

std::vector<TrialRecord> read_results(const fs::path& results_csv) {
    std::vector<TrialRecord> rows;
    std::ifstream in(results_csv);
    if (!in) return rows;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        if (header) {
            header = false;
            if (line.rfind("theta,", 0) == 0) continue;
        }
        rows.push_back(parse_csv_row(line));
    }
    return rows;
}

void append_results(const fs::path& results_csv, const std::vector<TrialRecord>& rows) {
    const bool fresh = !fs::exists(results_csv) || fs::file_size(results_csv) == 0;
    std::ofstream out(results_csv, std::ios::app);
    if (!out) throw Error("cannot append to " + results_csv.string());
    if (fresh) out << kResultsHeader << '\n';
    for (const auto& r : rows) out << to_csv_row(r) << '\n';
    out.flush();
}

std::vector<CellSummary> summarize_results(const fs::path& results_csv, const fs::path& summary_csv) {
    const std::vector<CellSummary> summary = aggregate_trials(read_results(results_csv));
    std::ofstream out(summary_csv);
    if (!out) throw Error("cannot write " + summary_csv.string());
    out << kSummaryHeader << '\n';
    for (const auto& s : summary) out << to_csv_row(s) << '\n';
    return summary;
}

void write_plot_script(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << R"PY(#!/usr/bin/env python3
"""Render misclassification phase grids (P_err x P_ers) from summary.csv.

One figure per (snr_db, theta), one panel per algorithm. GSSC panels use the
largest greedy iteration count present in the summary.
usage: plot_phase.py [summary.csv] [output_prefix]
"""
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

summary = sys.argv[1] if len(sys.argv) > 1 else "summary.csv"
prefix = sys.argv[2] if len(sys.argv) > 2 else "phase"

df = pd.read_csv(summary, keep_default_na=False)
df["greedy_iters"] = df["greedy_iters"].astype(int)
final = df.groupby(["snr_db", "theta", "algorithm"])["greedy_iters"].transform("max")
df = df[df["greedy_iters"] == final]

for (snr, theta), block in df.groupby(["snr_db", "theta"]):
    algos = sorted(block["algorithm"].unique())
    fig, axes = plt.subplots(1, len(algos), figsize=(4.5 * len(algos), 4), squeeze=False)
    for ax, algo in zip(axes[0], algos):
        sub = block[block["algorithm"] == algo]
        grid = sub.pivot_table(index="p_err", columns="p_ers", values="mean")
        im = ax.imshow(grid.values, origin="lower", cmap="gray_r", vmin=0.0, vmax=0.6, aspect="auto",
                       extent=[grid.columns.min(), grid.columns.max(), grid.index.min(), grid.index.max()])
        ers = np.linspace(grid.columns.min(), grid.columns.max(), 50)
        ax.plot(ers, 0.17 - 0.4 * ers, "r--", linewidth=1)
        ax.set_xlim(grid.columns.min(), grid.columns.max())
        ax.set_ylim(grid.index.min(), grid.index.max())
        ax.set_xlabel("P_ers")
        ax.set_ylabel("P_err")
        ax.set_title(f"{algo}  theta={theta}  snr={snr}")
        fig.colorbar(im, ax=ax)
    fig.tight_layout()
    fig.savefig(f"{prefix}_theta{theta}_snr{snr}.png", dpi=120)
    plt.close(fig)
)PY";
}

int resolve_jobs(int requested) {
    int cap = 0;
    if (const char* env = std::getenv("GSSC_JOBS")) cap = std::atoi(env);
    int jobs = requested > 0 ? requested : (cap > 0 ? cap : static_cast<int>(std::thread::hardware_concurrency()));
    if (cap > 0) jobs = std::min(jobs, cap);
    return std::max(jobs, 1);
}

SweepReport run_sweep(const SweepSpec& spec, const fs::path& out_dir, int jobs, std::ostream& log) {
    spec.validate();
    fs::create_directories(out_dir);
    const fs::path results = out_dir / "results.csv";

    std::set<DoneKey> done;
    for (const auto& r : read_results(results)) done.emplace(CellKey::of(r), r.trial_seed);

    const std::vector<SweepTask> all = enumerate_tasks(spec);
    std::vector<SweepTask> pending;
    SweepReport report;
    report.tasks_total = all.size();
    for (const auto& task : all) {
        TrialRecord probe = base_record(task);
        probe.greedy_iters = final_greedy_iters(task, spec);
        if (done.count({CellKey::of(probe), task.seed}))
            ++report.tasks_skipped;
        else
            pending.push_back(task);
    }

    std::mutex writer;
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < pending.size(); i = next++) {
            const SweepTask& task = pending[i];
            try {
                const TrialOutcome outcome =
                    run_trial(task.spec, task.seed, task.algorithm, spec.solver, spec.greedy, spec.clustering);
                const auto rows = records_for(task, outcome, spec);
                std::lock_guard lock(writer);
                append_results(results, rows);
                report.rows_written += rows.size();
            } catch (const std::exception& e) {
                std::lock_guard lock(writer);
                ++report.tasks_failed;
                log << "task failed (theta=" << task.spec.theta << " p_err=" << task.spec.p_err
                    << " p_ers=" << task.spec.p_ers << " seed=" << task.seed << " " << to_string(task.algorithm)
                    << "): " << e.what() << '\n';
            }
        }
    };

    const int workers = std::min<int>(resolve_jobs(jobs), static_cast<int>(std::max<std::size_t>(pending.size(), 1)));
    {
        std::vector<std::jthread> pool;
        for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
        worker();
    }

    if (!fs::exists(results)) append_results(results, {});
    summarize_results(results, out_dir / "summary.csv");
    write_plot_script(out_dir / "plot_phase.py");
    return report;
}

}  // namespace gssc
