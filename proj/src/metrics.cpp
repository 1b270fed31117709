#include "gssc/metrics.hpp"

#include "gssc/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace gssc {

std::vector<int> max_weight_assignment(const Eigen::MatrixXd& weights) {
    const int n = static_cast<int>(weights.rows());
    if (weights.cols() != n) throw InvalidArgument("max_weight_assignment: matrix must be square");
    if (n == 0) return {};

    // Hungarian algorithm with potentials on cost = -weight, 1-based.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = -weights(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }

    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

MisclassificationResult misclassification(const Labels& pred, const Labels& truth, int num_clusters) {
    if (pred.size() != truth.size()) throw InvalidArgument("misclassification: length mismatch");
    if (num_clusters < 1) throw InvalidArgument("misclassification: K must be >= 1");
    const int k = num_clusters;

    MisclassificationResult out;
    out.confusion = Eigen::MatrixXi::Zero(k, k);
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] < 0 || pred[i] >= k || truth[i] < 0 || truth[i] >= k)
            throw InvalidArgument("misclassification: label out of range");
        ++out.confusion(truth[i], pred[i]);
    }

    long matched = 0;
    if (k <= 6) {
        std::vector<int> perm(static_cast<std::size_t>(k));
        std::iota(perm.begin(), perm.end(), 0);
        long best = -1;
        do {
            long m = 0;
            for (int p = 0; p < k; ++p) m += out.confusion(perm[static_cast<std::size_t>(p)], p);
            if (m > best) {
                best = m;
                out.best_permutation = perm;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        matched = best;
    } else {
        // rows: predicted, cols: true
        const Eigen::MatrixXd w = out.confusion.transpose().cast<double>();
        out.best_permutation = max_weight_assignment(w);
        for (int p = 0; p < k; ++p) matched += out.confusion(out.best_permutation[static_cast<std::size_t>(p)], p);
    }

    out.rate = pred.empty() ? 0.0
                            : static_cast<double>(static_cast<long>(pred.size()) - matched) /
                                  static_cast<double>(pred.size());
    return out;
}

std::string to_csv_row(const TrialRecord& r) {
    std::ostringstream out;
    out << format_double(r.theta) << ',' << format_double(r.p_err) << ',' << format_double(r.p_ers) << ','
        << format_optional_double(r.snr_db) << ',' << r.algorithm << ',' << r.greedy_iters << ','
        << r.trial_seed << ',' << format_double(r.misclassification) << ',' << format_double(r.wall_seconds)
        << ',' << r.solver_iters;
    return out.str();
}

TrialRecord parse_csv_row(const std::string& line) {
    const auto cells = split(trim(line), ',');
    if (cells.size() < 8) throw InvalidArgument("results row has too few columns: " + line);
    TrialRecord r;
    r.theta = parse_double(cells[0]);
    r.p_err = parse_double(cells[1]);
    r.p_ers = parse_double(cells[2]);
    r.snr_db = parse_optional_double(cells[3]);
    r.algorithm = cells[4];
    r.greedy_iters = static_cast<int>(parse_double(cells[5]));
    r.trial_seed = std::stoull(cells[6]);
    r.misclassification = parse_double(cells[7]);
    if (cells.size() > 8) r.wall_seconds = parse_double(cells[8]);
    if (cells.size() > 9) r.solver_iters = static_cast<int>(parse_double(cells[9]));
    return r;
}

CellKey CellKey::of(const TrialRecord& r) {
    return CellKey{r.theta, r.p_err, r.p_ers, r.snr_db, r.algorithm, r.greedy_iters};
}

std::vector<CellSummary> aggregate_trials(const std::vector<TrialRecord>& records,
                                          const std::vector<CellKey>& expected) {
    std::map<CellKey, std::vector<double>> cells;
    for (const auto& key : expected) cells[key];
    for (const auto& r : records) cells[CellKey::of(r)].push_back(r.misclassification);

    std::vector<CellSummary> out;
    out.reserve(cells.size());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (auto& [key, values] : cells) {
        // Order-independent: results.csv row order depends on worker timing.
        std::sort(values.begin(), values.end());
        CellSummary s;
        s.key = key;
        s.n = values.size();
        if (values.empty()) {
            s.mean = s.sd = s.min = s.max = nan;
            out.push_back(s);
            continue;
        }
        const double n = static_cast<double>(values.size());
        s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
        const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
        s.min = *lo;
        s.max = *hi;
        out.push_back(s);
    }
    return out;
}

std::string to_csv_row(const CellSummary& s) {
    std::ostringstream out;
    const CellKey& k = s.key;
    out << format_double(k.theta) << ',' << format_double(k.p_err) << ',' << format_double(k.p_ers) << ','
        << format_optional_double(k.snr_db) << ',' << k.algorithm << ',' << k.greedy_iters << ',' << s.n << ','
        << format_double(s.mean) << ',' << format_double(s.sd) << ',' << format_double(s.min) << ','
        << format_double(s.max);
    return out.str();
}

}  // namespace gssc
