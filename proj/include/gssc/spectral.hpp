#pragma once

#include "gssc/types.hpp"

namespace gssc {

/// Symmetric non-negative affinity W = |C| + |C^T|.
struct AffinityGraph {
    Matrix W;
    int num_clusters = 1;
};

struct ClusterOptions {
    int restarts = 20;
    int max_iters = 300;
};

struct ClusterAssignment {
    Labels labels;
    Matrix embedding;      ///< N x K random-walk Laplacian eigenvectors
    Vector eigenvalues;    ///< K smallest eigenvalues of L_rw, ascending
    double inertia = 0.0;  ///< k-means objective of the returned labeling
    int isolated_vertices = 0;
};

AffinityGraph build_affinity(const Matrix& C, int num_clusters);

/// All eigenvalues of L_rw = I - D^{-1} W, ascending. Isolated vertices
/// contribute eigenvalue 1.
Vector laplacian_spectrum(const AffinityGraph& graph);

/// Random-walk-Laplacian spectral clustering: K smallest eigenvectors of L_rw
/// (computed through the symmetric normalization), then k-means++ with
/// restarts on the embedded rows. Zero-degree vertices are left out of
/// k-means and assigned to the centroid nearest the origin.
ClusterAssignment cluster(const AffinityGraph& graph, std::uint64_t seed,
                          const ClusterOptions& options = {});

struct KMeansResult {
    Labels labels;
    Matrix centroids;  ///< k x dim
    double inertia = 0.0;
};

/// Lloyd's algorithm with k-means++ seeding; best inertia over restarts.
/// Rows of points are the samples. Restart r uses seed derive_seed(seed, r).
KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, const ClusterOptions& options = {});

}  // namespace gssc
