#include "gssc/harness.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace gssc;

namespace {

SolverConfig solver_config(double alpha_e, double alpha_z, double rho0, double mu, double epsilon, int max_iters,
                           bool affine) {
    SolverConfig cfg;
    cfg.alpha_e = alpha_e;
    cfg.alpha_z = alpha_z;
    cfg.rho0 = rho0;
    cfg.mu = mu;
    cfg.epsilon = epsilon;
    cfg.max_iters = max_iters;
    cfg.affine = affine;
    return cfg;
}

py::dict diagnostics_dict(const SolverDiagnostics& d) {
    py::dict out;
    out["iterations"] = d.iterations;
    out["converged"] = d.converged;
    out["rho"] = d.rho;
    out["lambda_e"] = d.lambdas.lambda_e;
    out["lambda_z"] = d.lambdas.lambda_z;
    out["residual_constraint"] = d.residuals.constraint;
    out["residual_affine"] = d.residuals.affine;
    out["residual_delta_a"] = d.residuals.delta_a;
    out["residual_delta_e"] = d.residuals.delta_e;
    return out;
}

Matrix to_double(const BoolMatrix& m) { return m.cast<double>().matrix(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "C++ core for greedy sparse subspace clustering";

    py::register_exception<DegenerateInput>(m, "DegenerateInputError", PyExc_ValueError);
    py::register_exception<InvalidArgument>(m, "InvalidArgumentError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    m.def("trial_seed", &trial_seed, py::arg("seed_base"), py::arg("theta"), py::arg("p_err"), py::arg("p_ers"),
          py::arg("trial"));

    m.def(
        "make_dataset",
        [](double theta, double p_err, double p_ers, std::optional<double> snr_db, std::uint64_t seed,
           double kappa, int ambient_dim, int per_subspace) {
            TrialSpec spec;
            spec.theta = theta;
            spec.p_err = p_err;
            spec.p_ers = p_ers;
            spec.snr_db = snr_db;
            spec.kappa = kappa;
            spec.ambient_dim = ambient_dim;
            spec.per_subspace = per_subspace;
            const SyntheticDataset ds = make_trial_dataset(spec, seed);
            py::dict out;
            out["Y"] = ds.Y;
            out["labels"] = ds.labels;
            out["lambda0"] = ds.lambda0;
            out["error"] = ds.error_true;
            out["error_mask"] = to_double(ds.error_mask);
            out["erasure_mask"] = to_double(ds.erasure_mask);
            out["bases"] = ds.bases;
            return out;
        },
        "Synthetic three-subspace dataset for one trial seed.", py::arg("theta") = 60.0, py::arg("p_err") = 0.0,
        py::arg("p_ers") = 0.0, py::arg("snr_db") = py::none(), py::arg("seed") = 0, py::arg("kappa") = 1e-4,
        py::arg("ambient_dim") = 50, py::arg("per_subspace") = 35);

    m.def(
        "compute_lambdas",
        [](const Matrix& Y, double alpha_e, double alpha_z) {
            SolverConfig cfg;
            cfg.alpha_e = alpha_e;
            cfg.alpha_z = alpha_z;
            const Lambdas l = compute_lambdas(Y, cfg);
            py::dict out;
            out["lambda_e"] = l.lambda_e;
            out["lambda_z"] = l.lambda_z;
            out["mu_e"] = l.mu_e;
            out["mu_z"] = l.mu_z;
            return out;
        },
        py::arg("Y"), py::arg("alpha_e") = 5.0, py::arg("alpha_z") = 50.0);

    m.def("shrink", py::overload_cast<const Matrix&, double>(&shrink), "Entrywise soft thresholding.",
          py::arg("x"), py::arg("eps"));

    m.def(
        "solve",
        [](const Matrix& Y, std::optional<Matrix> mask, double alpha_e, double alpha_z, double rho0, double mu,
           double epsilon, int max_iters, bool affine) {
            const Matrix w = mask ? *mask : Matrix::Ones(Y.rows(), Y.cols());
            SolveResult r;
            {
                py::gil_scoped_release release;
                r = solve(Y, w, solver_config(alpha_e, alpha_z, rho0, mu, epsilon, max_iters, affine));
            }
            return py::make_tuple(r.C, r.E, diagnostics_dict(r.diagnostics));
        },
        "Sparse self-expression with a sparse error term; returns (C, E, diagnostics).", py::arg("Y"),
        py::arg("mask") = py::none(), py::arg("alpha_e") = 5.0, py::arg("alpha_z") = 50.0, py::arg("rho0") = 10.0,
        py::arg("mu") = 1.05, py::arg("epsilon") = 1e-3, py::arg("max_iters") = 200, py::arg("affine") = false);

    m.def(
        "run_gssc",
        [](const Matrix& Y, std::optional<Matrix> lambda0, int greedy_iters, double alpha1, double alpha2,
           double beta, double kappa, double alpha_e, double alpha_z, double epsilon, bool affine) {
            GreedyConfig g;
            g.num_greedy_iters = greedy_iters;
            g.alpha1 = alpha1;
            g.alpha2 = alpha2;
            g.beta = beta;
            g.kappa = kappa;
            const SolverConfig s = solver_config(alpha_e, alpha_z, 10.0, 1.05, epsilon, 200, affine);
            const Matrix l0 = lambda0 ? *lambda0 : Matrix::Ones(Y.rows(), Y.cols());
            GreedyResult r;
            {
                py::gil_scoped_release release;
                r = run_gssc(Y, l0, s, g);
            }
            py::list history;
            for (const auto& step : r.state.history) {
                py::dict h;
                h["iteration"] = step.iteration;
                h["threshold"] = step.threshold;
                h["num_marked"] = step.num_marked;
                h["C"] = step.C;
                h["E"] = step.E;
                h["solver"] = diagnostics_dict(step.solver);
                history.append(h);
            }
            py::dict out;
            out["C"] = r.C;
            out["Lambda"] = r.state.Lambda;
            out["Y"] = r.state.Y_current;
            out["history"] = history;
            return out;
        },
        "Greedy loop: solve, extend the error mask, correct marked entries, repeat.", py::arg("Y"),
        py::arg("lambda0") = py::none(), py::arg("greedy_iters") = 5, py::arg("alpha1") = 0.4,
        py::arg("alpha2") = 0.5, py::arg("beta") = 0.65, py::arg("kappa") = 1e-4, py::arg("alpha_e") = 5.0,
        py::arg("alpha_z") = 50.0, py::arg("epsilon") = 1e-3, py::arg("affine") = false);

    m.def(
        "build_affinity", [](const Matrix& C) { return build_affinity(C, 1).W; }, "W = |C| + |C^T|.",
        py::arg("C"));

    m.def(
        "cluster",
        [](const Matrix& C, int num_clusters, std::uint64_t seed, int restarts) {
            ClusterOptions opts;
            opts.restarts = restarts;
            return cluster(build_affinity(C, num_clusters), seed, opts).labels;
        },
        "Spectral clustering of the affinity built from C.", py::arg("C"), py::arg("num_clusters"),
        py::arg("seed") = 0, py::arg("restarts") = 20);

    m.def(
        "misclassification",
        [](const Labels& pred, const Labels& truth, int num_clusters) {
            return misclassification(pred, truth, num_clusters).rate;
        },
        py::arg("pred"), py::arg("truth"), py::arg("num_clusters"));

    m.def(
        "run_trial",
        [](double theta, double p_err, double p_ers, std::optional<double> snr_db, std::uint64_t seed,
           const std::string& algorithm, int greedy_iters) {
            TrialSpec spec;
            spec.theta = theta;
            spec.p_err = p_err;
            spec.p_ers = p_ers;
            spec.snr_db = snr_db;
            GreedyConfig g;
            g.num_greedy_iters = greedy_iters;
            TrialOutcome o;
            {
                py::gil_scoped_release release;
                o = run_trial(spec, seed, parse_algorithm(algorithm), SolverConfig{}, g);
            }
            py::dict out;
            out["labels"] = o.labels;
            out["misclassification"] = o.misclassification;
            out["rate_per_iter"] = o.rate_per_iter;
            out["solver_iters"] = o.solver_iters;
            out["wall_seconds"] = o.wall_seconds;
            return out;
        },
        "Generate one seeded trial and cluster it with SSC or GSSC.", py::arg("theta") = 60.0,
        py::arg("p_err") = 0.0, py::arg("p_ers") = 0.0, py::arg("snr_db") = py::none(), py::arg("seed") = 0,
        py::arg("algorithm") = "GSSC", py::arg("greedy_iters") = 5);
}
