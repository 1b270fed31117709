#pragma once

#include "gssc/types.hpp"

#include <functional>
#include <optional>

namespace gssc {

/// Regularization weights for the error and noise terms.
///
/// lambda_e = alpha_e / mu_e and lambda_z = alpha_z / mu_z, where mu_e and
/// mu_z are data-dependent scales (see compute_lambdas).
struct Lambdas {
    double lambda_e = 0.0;
    double lambda_z = 0.0;
    double mu_e = 0.0;
    double mu_z = 0.0;
};

enum class LinearSolver {
    Auto,       ///< Woodbury when D < N, dense Cholesky otherwise
    Woodbury,   ///< D x D factorization via the matrix inversion identity
    Dense,      ///< N x N Cholesky of the full system matrix
};

struct SolverConfig {
    double alpha_e = 5.0;
    double alpha_z = 50.0;
    double rho0 = 10.0;
    double mu = 1.05;       ///< penalty growth factor per iteration
    double epsilon = 1e-3;  ///< stop tolerance on the infinity-norm residuals
    int max_iters = 200;
    bool affine = false;    ///< enforce unit column sums A^T 1 = 1 (affine subspaces)
    LinearSolver linear_solver = LinearSolver::Auto;
    /// Relative residual the A-update must meet; NumericalError otherwise.
    double linear_residual_tol = 1e-8;
    /// Skip automatic selection and use these weights.
    std::optional<Lambdas> lambdas;

    void validate() const;
};

/// Infinity-norm residuals checked by the stop rule.
struct Residuals {
    double affine = 0.0;      ///< ||A^T 1 - 1||  (affine mode only)
    double constraint = 0.0;  ///< ||A - C||
    double delta_a = 0.0;     ///< ||A_{k+1} - A_k||
    double delta_e = 0.0;     ///< ||E_{k+1} - E_k||
};

/// ADMM iterates. All blocks start at zero.
struct SolverState {
    Matrix A;
    Matrix C;
    Matrix E;
    Vector delta;  ///< multiplier for the affine constraint
    Matrix Delta;  ///< multiplier for A = C
    double rho = 0.0;
    int iter = 0;
    Residuals residuals;

    static SolverState zeros(Eigen::Index d, Eigen::Index n, double rho0);
};

struct SolverDiagnostics {
    int iterations = 0;
    bool converged = false;  ///< false means max_iters was hit
    Residuals residuals;
    double rho = 0.0;
    Lambdas lambdas;
    double max_linear_residual = 0.0;
};

struct SolveResult {
    Matrix C;  ///< N x N, zero diagonal
    Matrix E;  ///< D x N sparse error estimate
    SolverDiagnostics diagnostics;
};

/// Called after every completed iteration with the updated state.
using IterationObserver = std::function<void(const SolverState&)>;

/// mu_e = min_i max_{j != i} ||y_j||_1,  mu_z = min_i max_{j != i} |y_i^T y_j|.
/// Throws DegenerateInput if either scale is zero.
Lambdas compute_lambdas(const Matrix& Y, const SolverConfig& cfg);

/// Soft thresholding S_eps[x]; |x| == eps maps to 0.
inline double shrink(double x, double eps) {
    if (x > eps) return x - eps;
    if (x < -eps) return x + eps;
    return 0.0;
}
Matrix shrink(const Matrix& x, double eps);
/// Entrywise thresholds, same shape as x.
Matrix shrink(const Matrix& x, const Matrix& eps);

/// Solves (lambda_z Y^T Y + rho I [+ rho 1 1^T]) A = rhs for the A-update
/// right-hand side of the current state. Bracketed terms are affine only.
Matrix update_A(const SolverState& state, const Matrix& Y, const Lambdas& lambdas,
                const SolverConfig& cfg);
/// Right-hand side of the A-update system.
Matrix a_update_rhs(const SolverState& state, const Matrix& Y, const Lambdas& lambdas, bool affine);
/// (lambda_z Y^T Y + rho I [+ rho 1 1^T]) X, without forming the N x N matrix.
Matrix apply_a_system(const Matrix& Y, const Matrix& X, double lambda_z, double rho, bool affine);
/// Solves the A-update system for an arbitrary right-hand side.
Matrix solve_a_system(const Matrix& Y, const Matrix& rhs, double lambda_z, double rho, bool affine,
                      LinearSolver method);

/// C = J - diag(J), J = S_{1/rho}[A + Delta / rho].
Matrix update_C(const Matrix& A_next, const Matrix& Delta, double rho);

/// E = S_{(lambda_e / lambda_z) * mask}[Y - Y A], thresholds applied entrywise.
Matrix update_E(const Matrix& Y, const Matrix& A_next, const Lambdas& lambdas, const Matrix& mask);

struct Multipliers {
    Vector delta;
    Matrix Delta;
};

/// delta += rho (A^T 1 - 1) in affine mode (unchanged otherwise);
/// Delta += rho (A - C).
Multipliers update_multipliers(const SolverState& state, const Matrix& A_next, const Matrix& C_next,
                               bool affine);

/// Full ADMM run from zero initialization. Not converging within max_iters is
/// reported in the diagnostics; the last iterate is returned.
SolveResult solve(const Matrix& Y, const Matrix& mask, const SolverConfig& cfg,
                  const IterationObserver& observer = {});

/// Same as solve() with lambdas already chosen.
SolveResult solve_with_lambdas(const Matrix& Y, const Matrix& mask, const SolverConfig& cfg,
                               const Lambdas& lambdas, const IterationObserver& observer = {});

}  // namespace gssc
