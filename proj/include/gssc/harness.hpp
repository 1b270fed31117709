#pragma once

#include "gssc/config.hpp"
#include "gssc/greedy.hpp"
#include "gssc/metrics.hpp"
#include "gssc/spectral.hpp"
#include "gssc/synth.hpp"

#include <filesystem>
#include <iosfwd>

namespace gssc {

/// Parameters of one synthetic trial, before seeding.
struct TrialSpec {
    double theta = 60.0;
    double p_err = 0.0;
    double p_ers = 0.0;
    std::optional<double> snr_db;
    double kappa = 1e-4;
    int ambient_dim = 50;
    int per_subspace = 35;
};

/// Seed streams derived from a trial seed.
enum class SeedStream : std::uint64_t { Bases = 1, Samples = 2, Corruption = 3, Clustering = 4 };

inline std::uint64_t stream_seed(std::uint64_t trial_seed, SeedStream s) {
    return derive_seed(trial_seed, static_cast<std::uint64_t>(s));
}

/// trial_seed = mix(mix(mix(mix(seed_base, bits(theta)), bits(p_err)), bits(p_ers)), trial)
/// with mix(a, b) = splitmix64(a ^ splitmix64(b)). Noise level is not part of
/// the seed, so the same trial index sees the same data at every SNR.
std::uint64_t trial_seed(std::uint64_t seed_base, double theta, double p_err, double p_ers, int trial);

SyntheticDataset make_trial_dataset(const TrialSpec& spec, std::uint64_t trial_seed);

enum class Algorithm { SSC, GSSC };
std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& s);

struct TrialOutcome {
    Labels labels;                       ///< labels from the final solve
    std::vector<double> rate_per_iter;   ///< misclassification after each solve (index = greedy iteration)
    double misclassification = 0.0;      ///< final rate
    int solver_iters = 0;
    double wall_seconds = 0.0;
    GreedyResult greedy;
};

/// Solve, cluster and score. SSC is the greedy loop with zero greedy
/// iterations, so both share one code path.
TrialOutcome run_pipeline(const Matrix& Y, const Matrix& lambda0, const Labels& truth, int num_clusters,
                          Algorithm algorithm, const SolverConfig& scfg, const GreedyConfig& gcfg,
                          std::uint64_t cluster_seed, const ClusterOptions& copts = {});

/// Generate the trial's data from its seed and run the pipeline.
TrialOutcome run_trial(const TrialSpec& spec, std::uint64_t trial_seed, Algorithm algorithm,
                       const SolverConfig& scfg, const GreedyConfig& gcfg, const ClusterOptions& copts = {});

/// Re-run a results row from its recorded parameters and seed.
TrialOutcome replay(const TrialRecord& record, const SolverConfig& scfg, GreedyConfig gcfg,
                    const TrialSpec& base = {}, const ClusterOptions& copts = {});

SolverConfig solver_config_from(const KeyValueConfig& kv, SolverConfig base = {});
GreedyConfig greedy_config_from(const KeyValueConfig& kv, GreedyConfig base = {});

struct SweepSpec {
    std::vector<double> theta_list{60.0};
    std::vector<double> p_err_list{0.0};
    std::vector<double> p_ers_list{0.0};
    std::vector<std::optional<double>> snr_list{std::nullopt};
    int trials = 20;
    std::vector<Algorithm> algorithms{Algorithm::SSC, Algorithm::GSSC};
    std::uint64_t seed_base = 0;
    /// GSSC also emits one row per intermediate greedy iteration.
    bool record_history = false;
    TrialSpec trial;  ///< theta/p_err/p_ers/snr overridden per cell
    SolverConfig solver;
    GreedyConfig greedy;
    ClusterOptions clustering;

    static SweepSpec from_config(const KeyValueConfig& kv);
    void validate() const;
};

/// One (cell, trial, algorithm) unit of sweep work.
struct SweepTask {
    TrialSpec spec;
    std::uint64_t seed = 0;
    Algorithm algorithm = Algorithm::SSC;
};

std::vector<SweepTask> enumerate_tasks(const SweepSpec& spec);

/// Rows produced by one task (one row, or one per greedy iteration when
/// record_history is set).
std::vector<TrialRecord> records_for(const SweepTask& task, const TrialOutcome& outcome, const SweepSpec& spec);

struct SweepReport {
    std::size_t tasks_total = 0;
    std::size_t tasks_skipped = 0;  ///< already present in results.csv
    std::size_t tasks_failed = 0;
    std::size_t rows_written = 0;
};

/// Runs every task not already recorded in out_dir/results.csv using up to
/// jobs worker threads, then rewrites summary.csv and plot_phase.py.
SweepReport run_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir, int jobs, std::ostream& log);

std::vector<TrialRecord> read_results(const std::filesystem::path& results_csv);
void append_results(const std::filesystem::path& results_csv, const std::vector<TrialRecord>& rows);
/// Aggregate results_csv into summary_csv; returns the summaries written.
std::vector<CellSummary> summarize_results(const std::filesystem::path& results_csv,
                                           const std::filesystem::path& summary_csv);
void write_plot_script(const std::filesystem::path& path);

/// Worker count: requested if positive, else GSSC_JOBS, else hardware
/// concurrency; always capped by GSSC_JOBS when that is set.
int resolve_jobs(int requested);

}  // namespace gssc
