#pragma once

#include "gssc/types.hpp"

#include <optional>
#include <string>

namespace gssc {

struct MisclassificationResult {
    double rate = 0.0;
    /// best_permutation[predicted] = true label it is matched to.
    std::vector<int> best_permutation;
    /// confusion(t, p): points with true label t and predicted label p.
    Eigen::MatrixXi confusion;
};

/// Fraction of points whose predicted label, after the best relabeling,
/// differs from the true label. Exhaustive over permutations for K <= 6,
/// Hungarian assignment above.
MisclassificationResult misclassification(const Labels& pred, const Labels& truth, int num_clusters);

/// Maximum-weight perfect assignment on a square matrix;
/// result[row] = column. O(n^3).
std::vector<int> max_weight_assignment(const Eigen::MatrixXd& weights);

/// One experiment row. The CSV column order is fixed by kResultsHeader.
struct TrialRecord {
    double theta = 0.0;
    double p_err = 0.0;
    double p_ers = 0.0;
    std::optional<double> snr_db;
    std::string algorithm;  ///< "SSC" or "GSSC"
    int greedy_iters = 0;
    std::uint64_t trial_seed = 0;
    double misclassification = 0.0;
    double wall_seconds = 0.0;
    int solver_iters = 0;  ///< ADMM iterations summed over all solves
};

inline constexpr const char* kResultsHeader =
    "theta,p_err,p_ers,snr_db,algorithm,greedy_iters,trial_seed,misclassification,wall_seconds,solver_iters";
inline constexpr const char* kSummaryHeader =
    "theta,p_err,p_ers,snr_db,algorithm,greedy_iters,n,mean,sd,min,max";

std::string to_csv_row(const TrialRecord& r);
TrialRecord parse_csv_row(const std::string& line);

/// Identifies a parameter cell (everything except the seed).
struct CellKey {
    double theta = 0.0;
    double p_err = 0.0;
    double p_ers = 0.0;
    std::optional<double> snr_db;
    std::string algorithm;
    int greedy_iters = 0;

    static CellKey of(const TrialRecord& r);
    auto operator<=>(const CellKey&) const = default;
};

struct CellSummary {
    CellKey key;
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;  ///< sample standard deviation (n - 1); 0 when n < 2
    double min = 0.0;
    double max = 0.0;
    bool empty() const { return n == 0; }
};

/// Mean and sample standard deviation per cell, ordered by key. Cells listed
/// in expected but absent from records are returned with n == 0 and NaN
/// statistics.
std::vector<CellSummary> aggregate_trials(const std::vector<TrialRecord>& records,
                                          const std::vector<CellKey>& expected = {});

std::string to_csv_row(const CellSummary& s);

}  // namespace gssc
