#include "doctest.h"

#include "gssc/harness.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace gssc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("gssc_harness_" + name);
    fs::remove_all(p);
    return p;
}

SweepSpec tiny_sweep() {
    SweepSpec s;
    s.theta_list = {60.0};
    s.p_err_list = {0.05};
    s.p_ers_list = {0.1};
    s.trials = 1;
    s.greedy.num_greedy_iters = 2;
    s.seed_base = 11;
    return s;
}

}  // namespace

TEST_CASE("trial_seed: deterministic and sensitive to every field") {
    const std::uint64_t s = trial_seed(1, 60.0, 0.1, 0.2, 3);
    CHECK(s == trial_seed(1, 60.0, 0.1, 0.2, 3));
    CHECK(s != trial_seed(2, 60.0, 0.1, 0.2, 3));
    CHECK(s != trial_seed(1, 0.0, 0.1, 0.2, 3));
    CHECK(s != trial_seed(1, 60.0, 0.2, 0.1, 3));
    CHECK(s != trial_seed(1, 60.0, 0.1, 0.2, 4));
    CHECK(stream_seed(s, SeedStream::Bases) != stream_seed(s, SeedStream::Samples));
}

TEST_CASE("make_trial_dataset: same seed, same data; corruption is applied") {
    TrialSpec spec;
    spec.p_err = 0.1;
    spec.p_ers = 0.2;
    const auto a = make_trial_dataset(spec, 5);
    const auto b = make_trial_dataset(spec, 5);
    CHECK(a.Y == b.Y);
    CHECK(a.lambda0 == b.lambda0);
    CHECK(a.Y.rows() == 50);
    CHECK(a.Y.cols() == 105);
    CHECK(a.erasure_mask.count() > 0);
    // The clean part does not depend on the noise level.
    TrialSpec noisy = spec;
    noisy.snr_db = 20.0;
    const auto c = make_trial_dataset(noisy, 5);
    CHECK((c.erasure_mask == a.erasure_mask).all());
}

TEST_CASE("parse_algorithm") {
    CHECK(parse_algorithm("SSC") == Algorithm::SSC);
    CHECK(parse_algorithm("GSSC") == Algorithm::GSSC);
    CHECK(to_string(Algorithm::GSSC) == "GSSC");
    CHECK_THROWS_AS(parse_algorithm("LASSO"), InvalidArgument);
}

TEST_CASE("run_trial: SSC is GSSC with zero greedy iterations") {
    TrialSpec spec;
    spec.p_err = 0.05;
    spec.p_ers = 0.1;
    const std::uint64_t seed = trial_seed(3, spec.theta, spec.p_err, spec.p_ers, 0);
    GreedyConfig g;
    const TrialOutcome ssc = run_trial(spec, seed, Algorithm::SSC, SolverConfig{}, g);
    g.num_greedy_iters = 0;
    const TrialOutcome gssc0 = run_trial(spec, seed, Algorithm::GSSC, SolverConfig{}, g);
    CHECK(ssc.labels == gssc0.labels);
    CHECK(ssc.misclassification == gssc0.misclassification);
    CHECK(ssc.greedy.C == gssc0.greedy.C);
    CHECK(ssc.rate_per_iter.size() == 1);
}

TEST_CASE("run_trial: one rate per solve, final rate matches the labels") {
    TrialSpec spec;
    spec.p_err = 0.1;
    const std::uint64_t seed = trial_seed(3, spec.theta, spec.p_err, spec.p_ers, 1);
    GreedyConfig g;
    g.num_greedy_iters = 3;
    const TrialOutcome out = run_trial(spec, seed, Algorithm::GSSC, SolverConfig{}, g);
    REQUIRE(out.rate_per_iter.size() == 4);
    CHECK(out.rate_per_iter.back() == out.misclassification);
    const auto ds = make_trial_dataset(spec, seed);
    CHECK(misclassification(out.labels, ds.labels, 3).rate == out.misclassification);
    int total = 0;
    for (const auto& step : out.greedy.state.history) total += step.solver.iterations;
    CHECK(out.solver_iters == total);
}

TEST_CASE("replay reproduces a recorded trial exactly") {
    TrialSpec spec;
    spec.p_err = 0.1;
    spec.p_ers = 0.1;
    spec.snr_db = 20.0;
    const std::uint64_t seed = trial_seed(9, spec.theta, spec.p_err, spec.p_ers, 2);
    GreedyConfig g;
    g.num_greedy_iters = 2;
    const TrialOutcome out = run_trial(spec, seed, Algorithm::GSSC, SolverConfig{}, g);

    TrialRecord rec;
    rec.theta = spec.theta;
    rec.p_err = spec.p_err;
    rec.p_ers = spec.p_ers;
    rec.snr_db = spec.snr_db;
    rec.algorithm = "GSSC";
    rec.greedy_iters = 2;
    rec.trial_seed = seed;
    rec.misclassification = out.misclassification;
    const TrialRecord parsed = parse_csv_row(to_csv_row(rec));
    const TrialOutcome again = replay(parsed, SolverConfig{}, GreedyConfig{});
    CHECK(again.misclassification == out.misclassification);
    CHECK(again.labels == out.labels);
}

TEST_CASE("SweepSpec::from_config") {
    const auto kv = KeyValueConfig::parse(
        "theta=60,0\np_err=0,0.1\np_ers=0\nsnr_db=none,20\ntrials=3\nalgorithms=GSSC\n"
        "seed_base=42\ngreedy_iters=4\nkappa=0.001\nrecord_history=yes\n");
    const SweepSpec s = SweepSpec::from_config(kv);
    CHECK(s.theta_list == std::vector<double>{60.0, 0.0});
    CHECK(s.snr_list.size() == 2);
    CHECK_FALSE(s.snr_list[0].has_value());
    CHECK(s.snr_list[1] == 20.0);
    CHECK(s.algorithms == std::vector<Algorithm>{Algorithm::GSSC});
    CHECK(s.seed_base == 42);
    CHECK(s.greedy.num_greedy_iters == 4);
    CHECK(s.greedy.kappa == 0.001);
    CHECK(s.trial.kappa == 0.001);
    CHECK(s.record_history);
    CHECK(enumerate_tasks(s).size() == 2u * 2u * 1u * 2u * 3u);
    CHECK_THROWS_AS(SweepSpec::from_config(KeyValueConfig::parse("theta=90\n")), InvalidArgument);
    CHECK_THROWS_AS(SweepSpec::from_config(KeyValueConfig::parse("trials=0\n")), InvalidArgument);
}

TEST_CASE("run_sweep: minimal grid, resumability and summary regeneration") {
    const fs::path dir = scratch("sweep");
    std::ostringstream log;
    const SweepSpec spec = tiny_sweep();
    const SweepReport first = run_sweep(spec, dir, 1, log);
    CHECK(first.tasks_total == 2);
    CHECK(first.tasks_failed == 0);
    CHECK(first.rows_written == 2);
    const auto rows = read_results(dir / "results.csv");
    CHECK(rows.size() == spec.algorithms.size());
    CHECK(fs::exists(dir / "plot_phase.py"));

    const std::string results_before = slurp(dir / "results.csv");
    const std::string summary_before = slurp(dir / "summary.csv");
    const SweepReport second = run_sweep(spec, dir, 1, log);
    CHECK(second.tasks_skipped == 2);
    CHECK(second.rows_written == 0);
    CHECK(slurp(dir / "results.csv") == results_before);
    CHECK(slurp(dir / "summary.csv") == summary_before);

    summarize_results(dir / "results.csv", dir / "summary2.csv");
    CHECK(slurp(dir / "summary2.csv") == summary_before);

    // A sweep interrupted after one task picks up only the remainder.
    std::ifstream in(dir / "results.csv");
    std::string header, line;
    std::getline(in, header);
    std::getline(in, line);
    in.close();
    const fs::path partial = scratch("partial");
    fs::create_directories(partial);
    std::ofstream(partial / "results.csv") << header << '\n' << line << '\n';
    const SweepReport resumed = run_sweep(spec, partial, 1, log);
    CHECK(resumed.tasks_skipped == 1);
    CHECK(resumed.rows_written == 1);
    CHECK(slurp(partial / "summary.csv") == summary_before);

    // Every results row replays to its recorded rate.
    for (const auto& r : rows) {
        GreedyConfig g = spec.greedy;
        CHECK(replay(r, spec.solver, g).misclassification == r.misclassification);
    }
    fs::remove_all(dir);
    fs::remove_all(partial);
}

TEST_CASE("run_sweep: history rows for every greedy iteration") {
    const fs::path dir = scratch("history");
    std::ostringstream log;
    SweepSpec spec = tiny_sweep();
    spec.algorithms = {Algorithm::GSSC};
    spec.record_history = true;
    const SweepReport r = run_sweep(spec, dir, 1, log);
    CHECK(r.rows_written == 3);
    const auto rows = read_results(dir / "results.csv");
    REQUIRE(rows.size() == 3);
    for (int n = 0; n < 3; ++n) CHECK(rows[static_cast<std::size_t>(n)].greedy_iters == n);
    CHECK(run_sweep(spec, dir, 1, log).tasks_skipped == 1);
    fs::remove_all(dir);
}

TEST_CASE("resolve_jobs honors the environment cap") {
    ::setenv("GSSC_JOBS", "2", 1);
    CHECK(resolve_jobs(8) == 2);
    CHECK(resolve_jobs(0) == 2);
    CHECK(resolve_jobs(1) == 1);
    ::unsetenv("GSSC_JOBS");
    CHECK(resolve_jobs(3) == 3);
    CHECK(resolve_jobs(0) >= 1);
}
