#pragma once

#include "gssc/admm.hpp"

namespace gssc {

struct GreedyConfig {
    double alpha1 = 0.4;  ///< weight of ||Y - E|| in the first threshold
    double alpha2 = 0.5;  ///< weight of the column-median floor
    double beta = 0.65;   ///< threshold decay per greedy iteration
    double kappa = 1e-4;  ///< mask weight of marked entries
    int num_greedy_iters = 5;

    void validate() const;
};

/// One ADMM solve inside the greedy loop. Iteration 0 is the plain solve on
/// the input data and initial mask.
struct GreedyStep {
    int iteration = 0;
    Matrix C;
    Matrix E;
    double threshold = 0.0;  ///< threshold used to extend the mask before this solve (0 at iteration 0)
    Eigen::Index num_marked = 0;
    SolverDiagnostics solver;
};

struct GreedyState {
    Matrix Y_current;
    Matrix Lambda;
    double T = 0.0;
    std::vector<GreedyStep> history;
};

struct GreedyResult {
    Matrix C;
    GreedyState state;
};

/// Called after each solve with the step just appended to the history.
using GreedyObserver = std::function<void(const GreedyStep&, const GreedyState&)>;

/// Optional early exit, checked after each solve; returning true ends the
/// loop. The default runs exactly num_greedy_iters iterations.
using GreedyStopRule = std::function<bool(const GreedyState&)>;

/// T1 = max(alpha1 ||Y - E||_inf, alpha2 max_j median_i |Y_ij|), where
/// ||.||_inf is the largest absolute entry.
double initial_threshold(const Matrix& Y, const Matrix& E, const GreedyConfig& cfg);

/// Entries with |E| >= T become kappa; everything else is kept.
Matrix update_mask(const Matrix& Lambda, const Matrix& E, double T, double kappa);

/// Y - E at entries marked in Lambda (weight below 1); other entries unchanged.
Matrix correct_data(const Matrix& Y, const Matrix& E, const Matrix& Lambda);

/// Number of entries marked in Lambda.
Eigen::Index count_marked(const Matrix& Lambda);

/// Greedy outer loop: solve, then for each greedy iteration extend the error
/// map, correct the marked entries and solve again from a fresh ADMM state.
/// Regularization weights are re-derived from the current data on every solve
/// unless scfg.lambdas is set.
GreedyResult run_gssc(const Matrix& Y, const Matrix& Lambda0, const SolverConfig& scfg,
                      const GreedyConfig& gcfg, const GreedyObserver& observer = {},
                      const IterationObserver& admm_observer = {},
                      const GreedyStopRule& stop_rule = {});

}  // namespace gssc
