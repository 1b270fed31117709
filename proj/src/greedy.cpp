#include "gssc/greedy.hpp"

#include <algorithm>
#include <cmath>

namespace gssc {

namespace {

constexpr bool is_marked(double weight) { return weight < 1.0; }

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double hi = v[mid];
    if (v.size() % 2) return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw InvalidArgument(std::string(what) + ": shape mismatch");
}

}  // namespace

void GreedyConfig::validate() const {
    if (!(alpha1 > 0.0 && alpha1 < 1.0)) throw InvalidArgument("alpha1 must lie in (0, 1)");
    if (!(alpha2 > 0.0 && alpha2 < 1.0)) throw InvalidArgument("alpha2 must lie in (0, 1)");
    if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgument("beta must lie in (0, 1)");
    if (!(kappa >= 0.0)) throw InvalidArgument("kappa must be >= 0");
    if (num_greedy_iters < 0) throw InvalidArgument("num_greedy_iters must be >= 0");
}

double initial_threshold(const Matrix& Y, const Matrix& E, const GreedyConfig& cfg) {
    require_same_shape(Y, E, "initial_threshold");
    const double resid = Y.size() ? (Y - E).cwiseAbs().maxCoeff() : 0.0;
    double med = 0.0;
    for (Eigen::Index j = 0; j < Y.cols(); ++j) {
        std::vector<double> col(static_cast<std::size_t>(Y.rows()));
        for (Eigen::Index i = 0; i < Y.rows(); ++i) col[static_cast<std::size_t>(i)] = std::abs(Y(i, j));
        med = std::max(med, median(std::move(col)));
    }
    return std::max(cfg.alpha1 * resid, cfg.alpha2 * med);
}

Matrix update_mask(const Matrix& Lambda, const Matrix& E, double T, double kappa) {
    require_same_shape(Lambda, E, "update_mask");
    if (!(T >= 0.0)) throw InvalidArgument("update_mask: threshold must be >= 0");
    Matrix out = Lambda;
    for (Eigen::Index j = 0; j < E.cols(); ++j)
        for (Eigen::Index i = 0; i < E.rows(); ++i)
            if (std::abs(E(i, j)) >= T) out(i, j) = kappa;
    return out;
}

Matrix correct_data(const Matrix& Y, const Matrix& E, const Matrix& Lambda) {
    require_same_shape(Y, E, "correct_data");
    require_same_shape(Y, Lambda, "correct_data");
    Matrix out = Y;
    for (Eigen::Index j = 0; j < Y.cols(); ++j)
        for (Eigen::Index i = 0; i < Y.rows(); ++i)
            if (is_marked(Lambda(i, j))) out(i, j) = Y(i, j) - E(i, j);
    return out;
}

Eigen::Index count_marked(const Matrix& Lambda) {
    return (Lambda.array() < 1.0).count();
}

GreedyResult run_gssc(const Matrix& Y, const Matrix& Lambda0, const SolverConfig& scfg,
                      const GreedyConfig& gcfg, const GreedyObserver& observer,
                      const IterationObserver& admm_observer, const GreedyStopRule& stop_rule) {
    scfg.validate();
    gcfg.validate();
    require_same_shape(Y, Lambda0, "run_gssc");
    for (Eigen::Index k = 0; k < Lambda0.size(); ++k) {
        const double w = Lambda0.data()[k];
        if (w != 1.0 && w != gcfg.kappa)
            throw InvalidArgument("run_gssc: initial mask entries must be 1 or kappa");
    }

    GreedyState state;
    state.Y_current = Y;
    state.Lambda = Lambda0;

    const auto run_step = [&](int iteration, double threshold) {
        SolveResult r = solve(state.Y_current, state.Lambda, scfg, admm_observer);
        GreedyStep step;
        step.iteration = iteration;
        step.C = std::move(r.C);
        step.E = std::move(r.E);
        step.threshold = threshold;
        step.num_marked = count_marked(state.Lambda);
        step.solver = r.diagnostics;
        state.history.push_back(std::move(step));
        if (observer) observer(state.history.back(), state);
    };

    run_step(0, 0.0);
    for (int n = 1; n <= gcfg.num_greedy_iters; ++n) {
        if (stop_rule && stop_rule(state)) break;
        const Matrix& E = state.history.back().E;
        state.T = (n == 1) ? initial_threshold(state.Y_current, E, gcfg) : gcfg.beta * state.T;
        state.Lambda = update_mask(state.Lambda, E, state.T, gcfg.kappa);
        state.Y_current = correct_data(state.Y_current, E, state.Lambda);
        run_step(n, state.T);
    }

    GreedyResult out;
    out.C = state.history.back().C;
    out.state = std::move(state);
    return out;
}

}  // namespace gssc
