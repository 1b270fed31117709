#include "gssc/spectral.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace gssc {

namespace {

struct NormalizedGraph {
    Vector inv_sqrt_degree;  // 0 at isolated vertices
    Matrix sym;              // D^{-1/2} W D^{-1/2}
    int isolated = 0;
};

NormalizedGraph normalize(const Matrix& W) {
    NormalizedGraph g;
    const Vector degree = W.rowwise().sum();
    g.inv_sqrt_degree = Vector::Zero(W.rows());
    for (Eigen::Index i = 0; i < W.rows(); ++i) {
        if (degree(i) > 0.0)
            g.inv_sqrt_degree(i) = 1.0 / std::sqrt(degree(i));
        else
            ++g.isolated;
    }
    g.sym = g.inv_sqrt_degree.asDiagonal() * W * g.inv_sqrt_degree.asDiagonal();
    // Exact symmetry for the eigensolver.
    g.sym = 0.5 * (g.sym + g.sym.transpose()).eval();
    return g;
}

double sq_dist(const Eigen::Ref<const Eigen::RowVectorXd>& a, const Eigen::Ref<const Eigen::RowVectorXd>& b) {
    return (a - b).squaredNorm();
}

KMeansResult lloyd_once(const Matrix& points, int k, std::mt19937_64& rng, int max_iters) {
    const Eigen::Index n = points.rows();
    Matrix centroids(k, points.cols());

    // k-means++ seeding.
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    centroids.row(0) = points.row(pick(rng));
    Vector closest(n);
    for (Eigen::Index i = 0; i < n; ++i) closest(i) = sq_dist(points.row(i), centroids.row(0));
    for (int c = 1; c < k; ++c) {
        const double total = closest.sum();
        Eigen::Index chosen = 0;
        if (total > 0.0) {
            std::uniform_real_distribution<double> u(0.0, total);
            double target = u(rng);
            chosen = n - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                target -= closest(i);
                if (target < 0.0) {
                    chosen = i;
                    break;
                }
            }
        } else {
            chosen = pick(rng);
        }
        centroids.row(c) = points.row(chosen);
        for (Eigen::Index i = 0; i < n; ++i)
            closest(i) = std::min(closest(i), sq_dist(points.row(i), centroids.row(c)));
    }

    Labels labels(static_cast<std::size_t>(n), -1);
    double inertia = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        bool changed = false;
        inertia = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double d = sq_dist(points.row(i), centroids.row(c));
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            inertia += best_d;
            if (labels[static_cast<std::size_t>(i)] != best) {
                labels[static_cast<std::size_t>(i)] = best;
                changed = true;
            }
        }
        if (!changed) break;

        Matrix sums = Matrix::Zero(k, points.cols());
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            const int c = labels[static_cast<std::size_t>(i)];
            sums.row(c) += points.row(i);
            ++counts[static_cast<std::size_t>(c)];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                centroids.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
                continue;
            }
            // Empty cluster: move it to the point farthest from its centroid.
            Eigen::Index far = 0;
            double far_d = -1.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const double d = sq_dist(points.row(i), centroids.row(labels[static_cast<std::size_t>(i)]));
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            centroids.row(c) = points.row(far);
        }
    }
    return KMeansResult{std::move(labels), std::move(centroids), inertia};
}

}  // namespace

AffinityGraph build_affinity(const Matrix& C, int num_clusters) {
    if (C.rows() != C.cols()) throw InvalidArgument("build_affinity: C must be square");
    if (num_clusters < 1) throw InvalidArgument("build_affinity: num_clusters must be >= 1");
    const Matrix abs_c = C.cwiseAbs();
    return AffinityGraph{abs_c + abs_c.transpose(), num_clusters};
}

Vector laplacian_spectrum(const AffinityGraph& graph) {
    const NormalizedGraph g = normalize(graph.W);
    const Eigen::Index n = graph.W.rows();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(Matrix::Identity(n, n) - g.sym, Eigen::EigenvaluesOnly);
    return eig.eigenvalues();
}

KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, const ClusterOptions& options) {
    if (k < 1) throw InvalidArgument("kmeans: k must be >= 1");
    if (points.rows() < k) throw InvalidArgument("kmeans: fewer points than clusters");
    if (options.restarts < 1 || options.max_iters < 1)
        throw InvalidArgument("kmeans: restarts and max_iters must be positive");

    KMeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (int r = 0; r < options.restarts; ++r) {
        std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
        KMeansResult trial = lloyd_once(points, k, rng, options.max_iters);
        if (trial.inertia < best.inertia) best = std::move(trial);
    }
    return best;
}

ClusterAssignment cluster(const AffinityGraph& graph, std::uint64_t seed, const ClusterOptions& options) {
    const Matrix& W = graph.W;
    const int k = graph.num_clusters;
    const Eigen::Index n = W.rows();
    if (W.cols() != n) throw InvalidArgument("cluster: W must be square");
    if (k < 1 || n < k) throw InvalidArgument("cluster: need 1 <= K <= N");
    if ((W.array() < 0.0).any()) throw InvalidArgument("cluster: W must be non-negative");

    const NormalizedGraph g = normalize(W);
    // L_sym = I - sym shares eigenvalues with L_rw; its smallest eigenvectors
    // are the largest of sym.
    Eigen::SelfAdjointEigenSolver<Matrix> eig(Matrix::Identity(n, n) - g.sym);
    if (eig.info() != Eigen::Success) throw NumericalError("cluster: eigendecomposition failed");

    ClusterAssignment out;
    out.isolated_vertices = g.isolated;
    out.eigenvalues = eig.eigenvalues().head(k);
    out.embedding = g.inv_sqrt_degree.asDiagonal() * eig.eigenvectors().leftCols(k);

    std::vector<Eigen::Index> active;
    for (Eigen::Index i = 0; i < n; ++i)
        if (g.inv_sqrt_degree(i) > 0.0) active.push_back(i);

    out.labels.assign(static_cast<std::size_t>(n), 0);
    if (static_cast<Eigen::Index>(active.size()) < k) {
        // Too few connected vertices to form K clusters: each active vertex
        // gets its own label, the rest share label 0.
        for (std::size_t a = 0; a < active.size(); ++a)
            out.labels[static_cast<std::size_t>(active[a])] = static_cast<int>(a);
        return out;
    }

    Matrix points(static_cast<Eigen::Index>(active.size()), k);
    for (std::size_t a = 0; a < active.size(); ++a)
        points.row(static_cast<Eigen::Index>(a)) = out.embedding.row(active[a]);
    KMeansResult km = kmeans(points, k, seed, options);
    out.inertia = km.inertia;
    for (std::size_t a = 0; a < active.size(); ++a)
        out.labels[static_cast<std::size_t>(active[a])] = km.labels[a];

    if (g.isolated > 0) {
        Eigen::Index nearest = 0;
        km.centroids.rowwise().squaredNorm().minCoeff(&nearest);
        for (Eigen::Index i = 0; i < n; ++i)
            if (g.inv_sqrt_degree(i) == 0.0) out.labels[static_cast<std::size_t>(i)] = static_cast<int>(nearest);
    }
    return out;
}

}  // namespace gssc
