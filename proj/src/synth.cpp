#include "gssc/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace gssc {

namespace {

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix m(rows, cols);
    // Column-major fill keeps the draw order tied to storage order.
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
    return m;
}

}  // namespace

Matrix random_orthogonal(int n, std::uint64_t seed) {
    if (n < 1) throw InvalidArgument("random_orthogonal: n must be positive");
    std::mt19937_64 rng(seed);
    const Matrix g = gaussian_matrix(n, n, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(n, n);
    const Matrix& r = qr.matrixQR();
    for (int j = 0; j < n; ++j)
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    return q;
}

double root_mean_square(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return std::sqrt(m.squaredNorm() / static_cast<double>(m.size()));
}

double smallest_angle_cosine(const Matrix& a, const Matrix& b) {
    // Singular values of a^T b are the cosines of the principal angles.
    Eigen::JacobiSVD<Matrix> svd(a.transpose() * b);
    return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

SubspaceModel build_bases(double theta_deg, std::uint64_t seed, int ambient_dim) {
    if (!(theta_deg >= 0.0 && theta_deg < 90.0))
        throw InvalidArgument("build_bases: theta must lie in [0, 90) degrees");
    if (ambient_dim < kModelMinAmbientDim)
        throw InvalidArgument("build_bases: ambient dimension must be at least " +
                              std::to_string(kModelMinAmbientDim));

    const Matrix frame = random_orthogonal(ambient_dim, seed).leftCols(kModelMinAmbientDim);
    const double t = theta_deg * std::numbers::pi / 180.0;
    const Vector p1 = frame.col(0);
    const Vector p2 = frame.col(1);

    SubspaceModel model;
    model.ambient_dim = ambient_dim;
    model.theta_deg = theta_deg;
    model.bases.assign(kModelNumSubspaces, Matrix(ambient_dim, kModelSubspaceDim));

    Matrix& b1 = model.bases[0];
    Matrix& b2 = model.bases[1];
    Matrix& b3 = model.bases[2];
    b1.col(0) = std::cos(t) * p1 - std::sin(t) * p2;
    b2.col(0) = p1;
    b3.col(0) = std::cos(t) * p1 + std::sin(t) * p2;
    for (int j = 1; j < kModelSubspaceDim; ++j) {
        b1.col(j) = frame.col(1 + j);
        b2.col(j) = frame.col(4 + j);
        b3.col(j) = (b1.col(j) + b2.col(j)) / std::numbers::sqrt2;
    }
    return model;
}

SyntheticDataset sample_points(const SubspaceModel& model, int per_subspace, std::uint64_t seed) {
    if (per_subspace < 1) throw InvalidArgument("sample_points: per_subspace must be >= 1");
    const int k = model.num_subspaces();
    if (k < 1) throw InvalidArgument("sample_points: model has no subspaces");
    const int d = model.ambient_dim;
    const int n = k * per_subspace;

    std::mt19937_64 rng(seed);
    Matrix points(d, n);
    SyntheticDataset ds;
    ds.num_subspaces = k;
    ds.labels.resize(static_cast<std::size_t>(n));
    for (int l = 0; l < k; ++l) {
        const Matrix& basis = model.bases[static_cast<std::size_t>(l)];
        const Matrix coeffs = gaussian_matrix(basis.cols(), per_subspace, rng);
        points.middleCols(l * per_subspace, per_subspace) = basis * coeffs;
        for (int i = 0; i < per_subspace; ++i) ds.labels[static_cast<std::size_t>(l * per_subspace + i)] = l;
    }

    const Matrix rotation = random_orthogonal(d, derive_seed(seed, 0x5107));
    ds.Y = rotation * points;
    for (const Matrix& b : model.bases) ds.bases.push_back(rotation * b);
    ds.lambda0 = Matrix::Ones(d, n);
    ds.error_true = Matrix::Zero(d, n);
    ds.error_mask = BoolMatrix::Constant(d, n, false);
    ds.erasure_mask = BoolMatrix::Constant(d, n, false);
    return ds;
}

SyntheticDataset inject_corruption(SyntheticDataset ds, const CorruptionSpec& spec) {
    if (!(spec.p_err >= 0.0 && spec.p_err <= 1.0) || !(spec.p_ers >= 0.0 && spec.p_ers <= 1.0))
        throw InvalidArgument("inject_corruption: probabilities must lie in [0, 1]");
    if (!(spec.kappa >= 0.0)) throw InvalidArgument("inject_corruption: kappa must be >= 0");

    const Eigen::Index rows = ds.Y.rows();
    const Eigen::Index cols = ds.Y.cols();
    std::mt19937_64 noise_rng(derive_seed(spec.seed, 1));
    std::mt19937_64 error_rng(derive_seed(spec.seed, 2));
    std::mt19937_64 erasure_rng(derive_seed(spec.seed, 3));

    if (spec.snr_db) {
        const double sigma = root_mean_square(ds.Y) * std::pow(10.0, -*spec.snr_db / 20.0);
        ds.Y += sigma * gaussian_matrix(rows, cols, noise_rng);
    }

    if (spec.p_err > 0.0) {
        std::bernoulli_distribution hit(spec.p_err);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (Eigen::Index j = 0; j < cols; ++j)
            for (Eigen::Index i = 0; i < rows; ++i) {
                if (!hit(error_rng)) continue;
                const double e = normal(error_rng);
                ds.Y(i, j) += e;
                ds.error_true(i, j) += e;
                ds.error_mask(i, j) = true;
            }
    }

    if (spec.p_ers > 0.0) {
        std::bernoulli_distribution hit(spec.p_ers);
        for (Eigen::Index j = 0; j < cols; ++j)
            for (Eigen::Index i = 0; i < rows; ++i) {
                if (!hit(erasure_rng)) continue;
                ds.Y(i, j) = 0.0;
                ds.lambda0(i, j) = spec.kappa;
                ds.erasure_mask(i, j) = true;
            }
    }
    return ds;
}

}  // namespace gssc
