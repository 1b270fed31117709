#include "doctest.h"

#include "gssc/admm.hpp"
#include "gssc/harness.hpp"

#include <cmath>
#include <limits>
#include <random>

using namespace gssc;

namespace {

Matrix gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Matrix m(rows, cols);
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = normal(rng);
    return m;
}

// Straight transcription of the scale definitions with explicit loops.
std::pair<double, double> brute_force_scales(const Matrix& Y) {
    const Eigen::Index n = Y.cols();
    double mu_e = std::numeric_limits<double>::infinity();
    double mu_z = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
        double best_e = 0.0, best_z = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) continue;
            double l1 = 0.0, ip = 0.0;
            for (Eigen::Index r = 0; r < Y.rows(); ++r) {
                l1 += std::abs(Y(r, j));
                ip += Y(r, i) * Y(r, j);
            }
            best_e = std::max(best_e, l1);
            best_z = std::max(best_z, std::abs(ip));
        }
        mu_e = std::min(mu_e, best_e);
        mu_z = std::min(mu_z, best_z);
    }
    return {mu_e, mu_z};
}

// Objective the solver minimizes, in the linear (non-affine) setting with C
// constrained to a zero diagonal and A = C.
double objective(const Matrix& Y, const Matrix& C, const Matrix& E, const Matrix& mask, const Lambdas& l) {
    const Matrix Z = Y - Y * C - E;
    return C.cwiseAbs().sum() + l.lambda_e * mask.cwiseProduct(E).cwiseAbs().sum() +
           0.5 * l.lambda_z * Z.squaredNorm();
}

// Accelerated proximal gradient on one column:
//   min |c|_1 + lambda_e |w o e|_1 + lambda_z / 2 |y - Y c - e|^2,  c_i = 0.
// Returns the objective contribution of that column at the optimum.
double fista_column(const Matrix& Y, const Matrix& mask, Eigen::Index i, const Lambdas& l, int iters) {
    const Eigen::Index d = Y.rows(), n = Y.cols();
    const Vector y = Y.col(i);
    Eigen::JacobiSVD<Matrix> svd(Y);
    const double smax = svd.singularValues()(0);
    const double L = l.lambda_z * (smax * smax + 1.0);
    Vector c = Vector::Zero(n), e = Vector::Zero(d);
    Vector c_prev = c, e_prev = e, zc = c, ze = e;
    double t = 1.0;
    for (int k = 0; k < iters; ++k) {
        const Vector r = y - Y * zc - ze;
        const Vector gc = -l.lambda_z * (Y.transpose() * r);
        const Vector ge = -l.lambda_z * r;
        c_prev = c;
        e_prev = e;
        for (Eigen::Index j = 0; j < n; ++j) c(j) = (j == i) ? 0.0 : shrink(zc(j) - gc(j) / L, 1.0 / L);
        for (Eigen::Index j = 0; j < d; ++j) e(j) = shrink(ze(j) - ge(j) / L, l.lambda_e * mask(j, i) / L);
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        zc = c + ((t - 1.0) / t_next) * (c - c_prev);
        ze = e + ((t - 1.0) / t_next) * (e - e_prev);
        t = t_next;
    }
    const Vector z = y - Y * c - e;
    return c.cwiseAbs().sum() + l.lambda_e * mask.col(i).cwiseProduct(e).cwiseAbs().sum() +
           0.5 * l.lambda_z * z.squaredNorm();
}

SolverState random_state(Eigen::Index d, Eigen::Index n, double rho, std::uint64_t seed) {
    SolverState s = SolverState::zeros(d, n, rho);
    s.C = gaussian(n, n, seed);
    s.E = gaussian(d, n, seed + 1);
    s.Delta = gaussian(n, n, seed + 2);
    s.delta = gaussian(n, 1, seed + 3);
    s.A = gaussian(n, n, seed + 4);
    return s;
}

SyntheticDataset seeded_clean_dataset() {
    TrialSpec spec;
    return make_trial_dataset(spec, trial_seed(0, spec.theta, 0.0, 0.0, 0));
}

}  // namespace

TEST_CASE("compute_lambdas: worked 2x2 example") {
    Matrix Y(2, 2);
    Y << 1, 2, 1, 2;
    const Lambdas l = compute_lambdas(Y, SolverConfig{});
    CHECK(l.mu_e == 2.0);
    CHECK(l.mu_z == 4.0);
    CHECK(l.lambda_e == doctest::Approx(5.0 / 2.0));
    CHECK(l.lambda_z == doctest::Approx(50.0 / 4.0));
}

TEST_CASE("compute_lambdas: orthogonal columns are degenerate") {
    const Matrix Y = Matrix::Identity(2, 2);
    CHECK_THROWS_AS(compute_lambdas(Y, SolverConfig{}), DegenerateInput);
    CHECK_THROWS_AS(compute_lambdas(Matrix::Zero(3, 4), SolverConfig{}), DegenerateInput);
    CHECK_THROWS_AS(compute_lambdas(Matrix::Ones(3, 1), SolverConfig{}), InvalidArgument);
}

TEST_CASE("compute_lambdas: matches the brute-force definition") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Matrix Y = gaussian(7, 13, seed);
        const auto [mu_e, mu_z] = brute_force_scales(Y);
        const Lambdas l = compute_lambdas(Y, SolverConfig{});
        CHECK(l.mu_e == doctest::Approx(mu_e).epsilon(1e-12));
        CHECK(l.mu_z == doctest::Approx(mu_z).epsilon(1e-12));
    }
}

TEST_CASE("compute_lambdas: scale covariance") {
    const Matrix Y = gaussian(6, 9, 3);
    const Lambdas base = compute_lambdas(Y, SolverConfig{});
    for (double c : {0.25, 3.0, 17.5}) {
        const Lambdas l = compute_lambdas(c * Y, SolverConfig{});
        CHECK(l.mu_e == doctest::Approx(c * base.mu_e).epsilon(1e-12));
        CHECK(l.mu_z == doctest::Approx(c * c * base.mu_z).epsilon(1e-12));
    }
}

TEST_CASE("shrink: scalar table") {
    CHECK(shrink(3.0, 1.0) == 2.0);
    CHECK(shrink(-3.0, 1.0) == -2.0);
    CHECK(shrink(0.5, 1.0) == 0.0);
    CHECK(shrink(2.5, 0.0) == 2.5);
    CHECK(shrink(1.0, 1.0) == 0.0);
    CHECK(shrink(-1.0, 1.0) == 0.0);
}

TEST_CASE("shrink: matrix forms agree with the scalar one and are non-expansive") {
    const Matrix x = gaussian(5, 6, 11);
    const Matrix y = gaussian(5, 6, 12);
    const Matrix eps = gaussian(5, 6, 13).cwiseAbs();
    const Matrix sx = shrink(x, 0.3);
    const Matrix sxe = shrink(x, eps);
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        CHECK(sx.data()[k] == shrink(x.data()[k], 0.3));
        CHECK(sxe.data()[k] == shrink(x.data()[k], eps.data()[k]));
    }
    const Matrix sy = shrink(y, eps);
    CHECK(((sxe - sy).cwiseAbs().array() <= (x - y).cwiseAbs().array() + 1e-15).all());
    CHECK_THROWS_AS(shrink(x, Matrix(eps.topRows(2))), InvalidArgument);
}

TEST_CASE("update_A: closed form at zero initialization") {
    const Matrix Y = gaussian(10, 25, 5);
    SolverConfig cfg;
    const Lambdas l = compute_lambdas(Y, cfg);
    const SolverState s = SolverState::zeros(10, 25, cfg.rho0);
    const Matrix A = update_A(s, Y, l, cfg);
    const Matrix G = Y.transpose() * Y;
    const Matrix M = l.lambda_z * G + cfg.rho0 * Matrix::Identity(25, 25);
    const Matrix expected = M.llt().solve(l.lambda_z * G);
    CHECK((A - expected).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("update_A: zero data gives the multiplier-only solution") {
    const Matrix Y = Matrix::Zero(4, 6);
    Lambdas l{1.0, 2.0, 1.0, 1.0};
    SolverConfig cfg;
    SolverState s = random_state(4, 6, 3.0, 21);
    const Matrix A = update_A(s, Y, l, cfg);
    CHECK((A - (s.C - s.Delta / s.rho)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("solve_a_system: Woodbury and dense routes agree") {
    const Matrix Y = gaussian(50, 105, 7);
    Lambdas l{0.7, 3.0, 1.0, 1.0};
    for (bool affine : {false, true}) {
        const SolverState s = random_state(50, 105, 12.5, 31);
        const Matrix rhs = a_update_rhs(s, Y, l, affine);
        const Matrix wood = solve_a_system(Y, rhs, l.lambda_z, s.rho, affine, LinearSolver::Woodbury);
        const Matrix dense = solve_a_system(Y, rhs, l.lambda_z, s.rho, affine, LinearSolver::Dense);
        CHECK((wood - dense).cwiseAbs().maxCoeff() < 1e-8);
        const double rel = (apply_a_system(Y, wood, l.lambda_z, s.rho, affine) - rhs).norm() / rhs.norm();
        CHECK(rel < 1e-8);
    }
}

TEST_CASE("apply_a_system: matches the explicit matrix") {
    const Matrix Y = gaussian(4, 7, 8);
    const Matrix X = gaussian(7, 3, 9);
    const double lz = 1.7, rho = 2.3;
    Matrix M = lz * Y.transpose() * Y + rho * Matrix::Identity(7, 7);
    CHECK((apply_a_system(Y, X, lz, rho, false) - M * X).cwiseAbs().maxCoeff() < 1e-12);
    M.array() += rho;
    CHECK((apply_a_system(Y, X, lz, rho, true) - M * X).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("update_C: diagonal zero, full shrinkage and the large-rho limit") {
    const Matrix A = gaussian(8, 8, 41);
    const Matrix Delta = gaussian(8, 8, 42);
    const Matrix C = update_C(A, Delta, 2.0);
    CHECK((C.diagonal().array() == 0.0).all());

    const Matrix small = 0.01 * A;
    CHECK(update_C(small, Matrix::Zero(8, 8), 1.0).isZero(0.0));

    Matrix off = A;
    off.diagonal().setZero();
    CHECK((update_C(A, Delta, 1e12) - off).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("update_E: mask controls the per-entry threshold") {
    const Matrix Y = gaussian(6, 9, 51);
    const Matrix A = 0.1 * gaussian(9, 9, 52);
    const Lambdas l{2.0, 8.0, 1.0, 1.0};
    const Matrix R = Y - Y * A;

    const Matrix ones = Matrix::Ones(6, 9);
    CHECK((update_E(Y, A, l, ones) - shrink(R, 0.25)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((update_E(Y, A, l, Matrix::Zero(6, 9)) - R).cwiseAbs().maxCoeff() < 1e-14);

    Matrix mask = ones;
    mask(2, 3) = 1e-4;
    const Matrix E = update_E(Y, A, l, mask);
    CHECK(E(2, 3) == doctest::Approx(shrink(R(2, 3), 0.25e-4)).epsilon(1e-14));
    CHECK(E(0, 0) == doctest::Approx(shrink(R(0, 0), 0.25)).epsilon(1e-14));
}

TEST_CASE("update_multipliers: arithmetic") {
    SolverState s = SolverState::zeros(3, 4, 10.0);
    const Matrix A = gaussian(4, 4, 61);

    Multipliers same = update_multipliers(s, A, A, false);
    CHECK(same.Delta.isZero(0.0));
    CHECK(same.delta.isZero(0.0));

    const Matrix C = Matrix::Zero(4, 4);
    Multipliers m = update_multipliers(s, A, C, true);
    CHECK((m.Delta - 10.0 * A).cwiseAbs().maxCoeff() < 1e-14);
    const Vector expected = 10.0 * (A.colwise().sum().transpose() - Vector::Ones(4));
    CHECK((m.delta - expected).cwiseAbs().maxCoeff() < 1e-14);

    Multipliers lin = update_multipliers(s, A, C, false);
    CHECK(lin.delta.isZero(0.0));
}

TEST_CASE("solve: multiplier equals the accumulated weighted constraint gaps") {
    const Matrix Y = gaussian(12, 20, 71);
    SolverConfig cfg;
    cfg.epsilon = 1e-300;
    cfg.max_iters = 25;
    std::vector<Matrix> gaps;
    std::vector<double> rhos;
    std::vector<Matrix> deltas;
    double rho = cfg.rho0;
    solve(Y, Matrix::Ones(12, 20), cfg, [&](const SolverState& s) {
        gaps.push_back(s.A - s.C);
        rhos.push_back(rho);
        deltas.push_back(s.Delta);
        rho *= cfg.mu;
    });
    REQUIRE(gaps.size() == 25);
    Matrix acc = Matrix::Zero(20, 20);
    for (std::size_t k = 0; k < gaps.size(); ++k) {
        acc += rhos[k] * gaps[k];
        CHECK((deltas[k] - acc).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, acc.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("solve: invariants along the iteration") {
    const SyntheticDataset ds = seeded_clean_dataset();
    SolverConfig cfg;
    int calls = 0;
    double last_rho = 0.0;
    const SolveResult r = solve(ds.Y, ds.lambda0, cfg, [&](const SolverState& s) {
        ++calls;
        CHECK(s.iter == calls);
        CHECK((s.C.diagonal().array() == 0.0).all());
        CHECK(s.rho == doctest::Approx(cfg.rho0 * std::pow(cfg.mu, s.iter)).epsilon(1e-12));
        CHECK(s.rho > last_rho);
        last_rho = s.rho;
    });
    CHECK(calls == r.diagnostics.iterations);
    CHECK((r.C.diagonal().array() == 0.0).all());
    CHECK(r.diagnostics.max_linear_residual < 1e-8);
    if (r.diagnostics.converged) {
        CHECK(r.diagnostics.residuals.constraint < cfg.epsilon);
        CHECK(r.diagnostics.residuals.delta_a < cfg.epsilon);
        CHECK(r.diagnostics.residuals.delta_e < cfg.epsilon);
    }
}

TEST_CASE("solve: termination behavior") {
    const Matrix Y = gaussian(10, 30, 81);
    SolverConfig cfg;
    cfg.epsilon = 1e3;
    const SolveResult loose = solve(Y, Matrix::Ones(10, 30), cfg);
    CHECK(loose.diagnostics.iterations == 1);
    CHECK(loose.diagnostics.converged);

    cfg.epsilon = 1e-12;
    cfg.max_iters = 3;
    const SolveResult capped = solve(Y, Matrix::Ones(10, 30), cfg);
    CHECK(capped.diagnostics.iterations == 3);
    CHECK_FALSE(capped.diagnostics.converged);
}

TEST_CASE("solve: same input gives bitwise identical output") {
    const Matrix Y = gaussian(10, 30, 82);
    const SolveResult a = solve(Y, Matrix::Ones(10, 30), SolverConfig{});
    const SolveResult b = solve(Y, Matrix::Ones(10, 30), SolverConfig{});
    CHECK(a.C == b.C);
    CHECK(a.E == b.E);
}

TEST_CASE("solve: fixed point agrees with an independent proximal-gradient solver") {
    const SyntheticDataset ds = seeded_clean_dataset();
    // 40 columns exercises the dense route, 105 the Woodbury route.
    for (Eigen::Index cols : {40, 105}) {
        Matrix Y = ds.Y.leftCols(cols);
        Y.col(3) += 2.0 * Vector::Unit(Y.rows(), 5);  // one gross error
        const Matrix mask = Matrix::Ones(Y.rows(), Y.cols());
        SolverConfig fixed;
        fixed.mu = 1.0;  // constant penalty: the iteration converges to the minimizer
        fixed.epsilon = 1e-7;
        fixed.max_iters = 10000;
        const SolveResult r = solve(Y, mask, fixed);
        REQUIRE(r.diagnostics.converged);
        const SolveResult dflt = solve(Y, mask, SolverConfig{});
        const Lambdas& l = r.diagnostics.lambdas;
        const auto column_objective = [&](const SolveResult& s, Eigen::Index i) {
            const Vector z = Y.col(i) - Y * s.C.col(i) - s.E.col(i);
            return s.C.col(i).cwiseAbs().sum() + l.lambda_e * s.E.col(i).cwiseAbs().sum() +
                   0.5 * l.lambda_z * z.squaredNorm();
        };
        // Column objectives decouple; compare a few of them.
        for (Eigen::Index i : {0, 3, 17}) {
            const double reference = fista_column(Y, mask, i, l, 20000);
            CHECK(column_objective(r, i) == doctest::Approx(reference).epsilon(1e-5));
            // The growing-penalty schedule stops early but never below the optimum.
            CHECK(column_objective(dflt, i) >= reference - 1e-6);
        }
        CHECK(objective(Y, dflt.C, dflt.E, mask, l) >= objective(Y, r.C, r.E, mask, l) - 1e-6);
    }
}

TEST_CASE("solve: affine mode drives column sums to one") {
    const Matrix Y = gaussian(10, 30, 83);
    SolverConfig cfg;
    cfg.affine = true;
    cfg.max_iters = 500;
    const SolveResult r = solve(Y, Matrix::Ones(10, 30), cfg);
    REQUIRE(r.diagnostics.converged);
    CHECK((r.C.colwise().sum().array() - 1.0).abs().maxCoeff() < 10.0 * cfg.epsilon);
}

TEST_CASE("solve: coefficients concentrate on the own subspace") {
    const SyntheticDataset ds = seeded_clean_dataset();
    const SolveResult r = solve(ds.Y, ds.lambda0, SolverConfig{});
    double own = 0.0, total = 0.0;
    for (Eigen::Index j = 0; j < r.C.cols(); ++j)
        for (Eigen::Index i = 0; i < r.C.rows(); ++i) {
            const double v = std::abs(r.C(i, j));
            total += v;
            if (ds.labels[static_cast<std::size_t>(i)] == ds.labels[static_cast<std::size_t>(j)]) own += v;
        }
    CHECK((total - own) / total < 0.05);
}

TEST_CASE("solve: a duplicated column is represented by its twin") {
    Matrix Y = gaussian(20, 15, 91);
    Y.col(14) = Y.col(2);
    const SolveResult r = solve(Y, Matrix::Ones(20, 15), SolverConfig{});
    Eigen::Index arg = 0;
    r.C.col(2).cwiseAbs().maxCoeff(&arg);
    CHECK(arg == 14);
    r.C.col(14).cwiseAbs().maxCoeff(&arg);
    CHECK(arg == 2);
}

TEST_CASE("SolverConfig::validate rejects bad parameters") {
    SolverConfig cfg;
    cfg.mu = 0.5;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
    cfg = {};
    cfg.rho0 = 0.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
    cfg = {};
    cfg.max_iters = 0;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
    CHECK_THROWS_AS(solve(Matrix::Ones(3, 4), Matrix::Ones(3, 3), SolverConfig{}), InvalidArgument);
}
