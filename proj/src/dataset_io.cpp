#include "gssc/dataset_io.hpp"

#include "gssc/config.hpp"

#include <fstream>
#include <sstream>

namespace gssc {

namespace fs = std::filesystem;

void write_matrix_csv(const fs::path& path, const Matrix& m) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
    if (!out) throw Error("write failed: " + path.string());
}

Matrix read_matrix_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        std::vector<double> row;
        for (const auto& cell : split(line, ',')) row.push_back(parse_double(cell));
        if (!rows.empty() && row.size() != rows.front().size())
            throw Error("ragged CSV row in " + path.string());
        rows.push_back(std::move(row));
    }
    if (rows.empty()) return Matrix();
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
}

void write_labels_csv(const fs::path& path, const Labels& labels) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    for (int l : labels) out << l << '\n';
}

Labels read_labels_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path.string());
    Labels labels;
    std::string line;
    while (std::getline(in, line))
        for (const auto& cell : split(line, ','))
            if (!cell.empty()) labels.push_back(static_cast<int>(parse_double(cell)));
    return labels;
}

void save_dataset(const fs::path& dir, const SyntheticDataset& ds, const DatasetManifest& manifest) {
    fs::create_directories(dir);
    write_matrix_csv(dir / "Y.csv", ds.Y);
    write_labels_csv(dir / "labels.csv", ds.labels);
    write_matrix_csv(dir / "lambda.csv", ds.lambda0);

    std::ofstream out(dir / kManifestFile);
    if (!out) throw Error("cannot write manifest in " + dir.string());
    out << "D=" << manifest.D << '\n'
        << "N=" << manifest.N << '\n'
        << "K=" << manifest.K << '\n'
        << "theta=" << format_double(manifest.theta) << '\n'
        << "p_err=" << format_double(manifest.p_err) << '\n'
        << "p_ers=" << format_double(manifest.p_ers) << '\n'
        << "snr_db=" << format_optional_double(manifest.snr_db) << '\n'
        << "seed=" << manifest.seed << '\n'
        << "kappa=" << format_double(manifest.kappa) << '\n';
}

StoredDataset load_dataset(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw Error("dataset directory not found: " + dir.string());
    const KeyValueConfig kv = KeyValueConfig::from_file(dir / kManifestFile);

    StoredDataset ds;
    ds.manifest.D = static_cast<int>(kv.get_int("D", 0));
    ds.manifest.N = static_cast<int>(kv.get_int("N", 0));
    ds.manifest.K = static_cast<int>(kv.get_int("K", 0));
    ds.manifest.theta = kv.get_double("theta", 0.0);
    ds.manifest.p_err = kv.get_double("p_err", 0.0);
    ds.manifest.p_ers = kv.get_double("p_ers", 0.0);
    ds.manifest.snr_db = kv.get_optional_double("snr_db");
    ds.manifest.seed = kv.get_uint64("seed", 0);
    ds.manifest.kappa = kv.get_double("kappa", 1e-4);

    ds.Y = read_matrix_csv(dir / "Y.csv");
    ds.labels = read_labels_csv(dir / "labels.csv");
    ds.lambda = fs::exists(dir / "lambda.csv") ? read_matrix_csv(dir / "lambda.csv")
                                                : Matrix::Ones(ds.Y.rows(), ds.Y.cols());

    const auto& m = ds.manifest;
    if (ds.Y.rows() != m.D || ds.Y.cols() != m.N)
        throw Error("Y.csv shape does not match manifest in " + dir.string());
    if (ds.lambda.rows() != m.D || ds.lambda.cols() != m.N)
        throw Error("lambda.csv shape does not match manifest in " + dir.string());
    if (static_cast<int>(ds.labels.size()) != m.N)
        throw Error("labels.csv length does not match manifest in " + dir.string());
    for (int l : ds.labels)
        if (l < 0 || l >= m.K) throw Error("label out of range in " + dir.string());
    return ds;
}

}  // namespace gssc
