#include "gssc/admm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gssc {

namespace {

double inf_norm(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }
double inf_norm(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

LinearSolver resolve_method(LinearSolver method, const Matrix& Y) {
    if (method != LinearSolver::Auto) return method;
    return Y.rows() < Y.cols() ? LinearSolver::Woodbury : LinearSolver::Dense;
}

// (lambda_z Y^T Y + rho I)^{-1} applied through the D x D capacitance matrix
// (rho / lambda_z) I + Y Y^T.
class WoodburyInverse {
public:
    WoodburyInverse(const Matrix& Y, double lambda_z, double rho) : Y_(Y), rho_(rho) {
        Matrix cap = Y * Y.transpose();
        cap.diagonal().array() += rho / lambda_z;
        llt_.compute(cap);
        if (llt_.info() != Eigen::Success)
            throw NumericalError("Woodbury capacitance factorization failed");
    }

    Matrix apply(const Matrix& rhs) const {
        return (rhs - Y_.transpose() * llt_.solve(Y_ * rhs)) / rho_;
    }

private:
    const Matrix& Y_;
    double rho_;
    Eigen::LLT<Matrix> llt_;
};

}  // namespace

void SolverConfig::validate() const {
    if (!(alpha_e > 0.0) || !(alpha_z > 0.0)) throw InvalidArgument("alpha_e and alpha_z must be positive");
    if (!(rho0 > 0.0)) throw InvalidArgument("rho0 must be positive");
    if (!(mu >= 1.0)) throw InvalidArgument("mu must be >= 1");
    if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
    if (max_iters < 1) throw InvalidArgument("max_iters must be positive");
    if (lambdas && (!(lambdas->lambda_e > 0.0) || !(lambdas->lambda_z > 0.0)))
        throw InvalidArgument("explicit lambdas must be positive");
}

SolverState SolverState::zeros(Eigen::Index d, Eigen::Index n, double rho0) {
    SolverState s;
    s.A = Matrix::Zero(n, n);
    s.C = Matrix::Zero(n, n);
    s.E = Matrix::Zero(d, n);
    s.delta = Vector::Zero(n);
    s.Delta = Matrix::Zero(n, n);
    s.rho = rho0;
    return s;
}

Lambdas compute_lambdas(const Matrix& Y, const SolverConfig& cfg) {
    const Eigen::Index n = Y.cols();
    if (n < 2) throw InvalidArgument("compute_lambdas: need at least two columns");

    const Vector l1 = Y.cwiseAbs().colwise().sum().transpose();
    const Matrix gram = (Y.transpose() * Y).cwiseAbs();

    double mu_e = std::numeric_limits<double>::infinity();
    double mu_z = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
        double max_l1 = 0.0;
        double max_ip = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) continue;
            max_l1 = std::max(max_l1, l1(j));
            max_ip = std::max(max_ip, gram(i, j));
        }
        mu_e = std::min(mu_e, max_l1);
        mu_z = std::min(mu_z, max_ip);
    }
    if (!(mu_e > 0.0) || !(mu_z > 0.0))
        throw DegenerateInput("compute_lambdas: mu_e or mu_z is zero; supply lambdas explicitly");

    Lambdas out;
    out.mu_e = mu_e;
    out.mu_z = mu_z;
    out.lambda_e = cfg.alpha_e / mu_e;
    out.lambda_z = cfg.alpha_z / mu_z;
    return out;
}

Matrix shrink(const Matrix& x, double eps) {
    return x.unaryExpr([eps](double v) { return shrink(v, eps); });
}

Matrix shrink(const Matrix& x, const Matrix& eps) {
    if (x.rows() != eps.rows() || x.cols() != eps.cols())
        throw InvalidArgument("shrink: threshold shape mismatch");
    return x.binaryExpr(eps, [](double v, double e) { return shrink(v, e); });
}

Matrix apply_a_system(const Matrix& Y, const Matrix& X, double lambda_z, double rho, bool affine) {
    Matrix out = lambda_z * (Y.transpose() * (Y * X)) + rho * X;
    if (affine) out.rowwise() += rho * X.colwise().sum();
    return out;
}

Matrix a_update_rhs(const SolverState& s, const Matrix& Y, const Lambdas& lambdas, bool affine) {
    Matrix rhs = lambdas.lambda_z * (Y.transpose() * (Y - s.E)) + s.rho * s.C - s.Delta;
    if (affine) {
        rhs.array() += s.rho;
        // 1 delta^T: row i equals delta^T.
        rhs.rowwise() -= s.delta.transpose();
    }
    return rhs;
}

Matrix solve_a_system(const Matrix& Y, const Matrix& rhs, double lambda_z, double rho, bool affine,
                      LinearSolver method) {
    const Eigen::Index n = Y.cols();
    if (!(rho > 0.0)) throw InvalidArgument("solve_a_system: rho must be positive");
    if (rhs.rows() != n) throw InvalidArgument("solve_a_system: rhs has wrong row count");

    if (resolve_method(method, Y) == LinearSolver::Dense) {
        Matrix m = lambda_z * (Y.transpose() * Y);
        m.diagonal().array() += rho;
        if (affine) m.array() += rho;
        Eigen::LLT<Matrix> llt(m);
        if (llt.info() != Eigen::Success) throw NumericalError("A-update Cholesky factorization failed");
        return llt.solve(rhs);
    }

    const WoodburyInverse inv(Y, lambda_z, rho);
    Matrix x = inv.apply(rhs);
    if (affine) {
        // Sherman-Morrison for the rank-one term rho 1 1^T.
        const Vector u = inv.apply(Matrix::Ones(n, 1));
        const double denom = 1.0 + rho * u.sum();
        x -= u * ((rho / denom) * x.colwise().sum());
    }
    return x;
}

Matrix update_A(const SolverState& s, const Matrix& Y, const Lambdas& lambdas, const SolverConfig& cfg) {
    const Matrix rhs = a_update_rhs(s, Y, lambdas, cfg.affine);
    return solve_a_system(Y, rhs, lambdas.lambda_z, s.rho, cfg.affine, cfg.linear_solver);
}

Matrix update_C(const Matrix& A_next, const Matrix& Delta, double rho) {
    if (!(rho > 0.0)) throw InvalidArgument("update_C: rho must be positive");
    Matrix c = shrink(A_next + Delta / rho, 1.0 / rho);
    c.diagonal().setZero();
    return c;
}

Matrix update_E(const Matrix& Y, const Matrix& A_next, const Lambdas& lambdas, const Matrix& mask) {
    if (mask.rows() != Y.rows() || mask.cols() != Y.cols())
        throw InvalidArgument("update_E: mask shape must match Y");
    const double ratio = lambdas.lambda_e / lambdas.lambda_z;
    return shrink(Y - Y * A_next, ratio * mask);
}

Multipliers update_multipliers(const SolverState& s, const Matrix& A_next, const Matrix& C_next,
                               bool affine) {
    Multipliers out{s.delta, s.Delta + s.rho * (A_next - C_next)};
    if (affine) out.delta += s.rho * (A_next.colwise().sum().transpose() - Vector::Ones(A_next.cols()));
    return out;
}

SolveResult solve(const Matrix& Y, const Matrix& mask, const SolverConfig& cfg,
                  const IterationObserver& observer) {
    cfg.validate();
    const Lambdas lambdas = cfg.lambdas ? *cfg.lambdas : compute_lambdas(Y, cfg);
    return solve_with_lambdas(Y, mask, cfg, lambdas, observer);
}

SolveResult solve_with_lambdas(const Matrix& Y, const Matrix& mask, const SolverConfig& cfg,
                               const Lambdas& lambdas, const IterationObserver& observer) {
    cfg.validate();
    if (mask.rows() != Y.rows() || mask.cols() != Y.cols())
        throw InvalidArgument("solve: mask shape must match Y");
    if ((mask.array() < 0.0).any()) throw InvalidArgument("solve: mask entries must be non-negative");
    if (!Y.allFinite()) throw InvalidArgument("solve: Y must be finite");

    const Eigen::Index n = Y.cols();
    SolverState s = SolverState::zeros(Y.rows(), n, cfg.rho0);
    SolverDiagnostics diag;
    diag.lambdas = lambdas;

    while (s.iter < cfg.max_iters) {
        const Matrix rhs = a_update_rhs(s, Y, lambdas, cfg.affine);
        Matrix a_next = solve_a_system(Y, rhs, lambdas.lambda_z, s.rho, cfg.affine, cfg.linear_solver);

        const double rhs_norm = rhs.norm();
        const double lin_res =
            (apply_a_system(Y, a_next, lambdas.lambda_z, s.rho, cfg.affine) - rhs).norm() /
            (rhs_norm > 0.0 ? rhs_norm : 1.0);
        if (!(lin_res <= cfg.linear_residual_tol))
            throw NumericalError("A-update residual " + std::to_string(lin_res) + " exceeds tolerance");
        diag.max_linear_residual = std::max(diag.max_linear_residual, lin_res);

        Matrix c_next = update_C(a_next, s.Delta, s.rho);
        Matrix e_next = update_E(Y, a_next, lambdas, mask);
        Multipliers mult = update_multipliers(s, a_next, c_next, cfg.affine);

        Residuals r;
        if (cfg.affine) r.affine = inf_norm(Vector(a_next.colwise().sum().transpose() - Vector::Ones(n)));
        r.constraint = inf_norm(Matrix(a_next - c_next));
        r.delta_a = inf_norm(Matrix(a_next - s.A));
        r.delta_e = inf_norm(Matrix(e_next - s.E));

        s.A = std::move(a_next);
        s.C = std::move(c_next);
        s.E = std::move(e_next);
        s.delta = std::move(mult.delta);
        s.Delta = std::move(mult.Delta);
        s.rho *= cfg.mu;
        s.residuals = r;
        ++s.iter;
        if (observer) observer(s);

        const bool done = (!cfg.affine || r.affine < cfg.epsilon) && r.constraint < cfg.epsilon &&
                          r.delta_a < cfg.epsilon && r.delta_e < cfg.epsilon;
        if (done) {
            diag.converged = true;
            break;
        }
    }

    diag.iterations = s.iter;
    diag.residuals = s.residuals;
    diag.rho = s.rho;
    return SolveResult{std::move(s.C), std::move(s.E), diag};
}

}  // namespace gssc
