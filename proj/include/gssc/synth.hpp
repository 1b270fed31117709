#pragma once

#include "gssc/types.hpp"

#include <optional>

namespace gssc {

/// Three 4-dimensional linear subspaces of R^D arranged so that each lies in
/// the sum of the other two. The first basis vectors of the three subspaces
/// share a 2-D plane with pairwise angles theta, theta and 2*theta.
struct SubspaceModel {
    int ambient_dim = 0;
    double theta_deg = 0.0;
    std::vector<Matrix> bases;  // D x d_l, orthonormal columns

    int num_subspaces() const { return static_cast<int>(bases.size()); }
};

struct CorruptionSpec {
    double p_err = 0.0;
    double p_ers = 0.0;
    std::optional<double> snr_db;  // dense Gaussian noise, none if empty
    std::uint64_t seed = 0;
    double kappa = 1e-4;  // mask weight at erased entries
};

struct SyntheticDataset {
    Matrix Y;               // D x N
    Labels labels;          // ground-truth subspace index per column
    int num_subspaces = 0;
    Matrix lambda0;         // initial weight mask: 1, or kappa at erasures
    Matrix error_true;      // injected sparse error values
    BoolMatrix error_mask;
    BoolMatrix erasure_mask;
    std::vector<Matrix> bases;  // subspace bases after the random rotation

    Eigen::Index rows() const { return Y.rows(); }
    Eigen::Index cols() const { return Y.cols(); }
};

inline constexpr int kModelSubspaceDim = 4;
inline constexpr int kModelNumSubspaces = 3;
/// Two plane directions plus six mutually orthogonal complements.
inline constexpr int kModelMinAmbientDim = 8;

/// Build the three-subspace model. theta must lie in [0, 90) degrees. The
/// eight model directions are embedded in R^D through a seeded random
/// orthonormal frame.
SubspaceModel build_bases(double theta_deg, std::uint64_t seed, int ambient_dim = 50);

/// Draw per_subspace standard-normal combinations from every basis, then
/// rotate the whole D x N matrix by one Haar-distributed orthogonal matrix.
SyntheticDataset sample_points(const SubspaceModel& model, int per_subspace, std::uint64_t seed);

/// Apply noise, then additive N(0,1) errors, then erasures (zeroed, weight
/// kappa). Erasure wins where it coincides with an error.
SyntheticDataset inject_corruption(SyntheticDataset ds, const CorruptionSpec& spec);

/// Largest |u^T v| over unit u in span(a), v in span(b): the cosine of the
/// smallest principal angle. Bases must be orthonormal.
double smallest_angle_cosine(const Matrix& a, const Matrix& b);

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with the sign
/// of R's diagonal folded into Q).
Matrix random_orthogonal(int n, std::uint64_t seed);

double root_mean_square(const Matrix& m);

}  // namespace gssc
