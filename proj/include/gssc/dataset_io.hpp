#pragma once

#include "gssc/synth.hpp"

#include <filesystem>

namespace gssc {

/// Contents of manifest.txt in a dataset directory.
struct DatasetManifest {
    int D = 0;
    int N = 0;
    int K = 0;
    double theta = 0.0;
    double p_err = 0.0;
    double p_ers = 0.0;
    std::optional<double> snr_db;
    std::uint64_t seed = 0;
    double kappa = 1e-4;
};

/// A dataset as read back from disk. Ground-truth error positions are not
/// persisted; only what the solver and scorer need.
struct StoredDataset {
    Matrix Y;
    Labels labels;
    Matrix lambda;
    DatasetManifest manifest;
};

inline constexpr const char* kManifestFile = "manifest.txt";

/// Writes Y.csv, labels.csv, lambda.csv and manifest.txt into dir (created if
/// missing). Values are written with round-trip precision.
void save_dataset(const std::filesystem::path& dir, const SyntheticDataset& ds,
                  const DatasetManifest& manifest);
StoredDataset load_dataset(const std::filesystem::path& dir);

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix_csv(const std::filesystem::path& path);
/// One label per line.
void write_labels_csv(const std::filesystem::path& path, const Labels& labels);
/// Accepts one label per line or a single comma-separated row.
Labels read_labels_csv(const std::filesystem::path& path);

}  // namespace gssc
