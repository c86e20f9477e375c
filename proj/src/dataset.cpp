#include "mvembed/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include <json.hpp>

#include "mvembed/csv.hpp"
#include "mvembed/errors.hpp"
#include "mvembed/rng.hpp"

namespace fs = std::filesystem;

namespace mvembed {

int MultiViewDataset::n_classes() const {
    if (labels.empty()) return 0;
    return 1 + *std::max_element(labels.begin(), labels.end());
}

void MultiViewDataset::validate() const {
    if (views.empty()) throw EmptyViewError(name + ": dataset has no views");
    if (view_names.size() != views.size()) {
        throw BadShapeError(name + ": view_names/view count mismatch");
    }
    const Eigen::Index n = views.front().rows();
    if (n < 2) throw BadShapeError(name + ": need at least 2 samples, got " + std::to_string(n));
    for (std::size_t v = 0; v < views.size(); ++v) {
        if (views[v].rows() != n) {
            throw RowCountMismatchError(name + ": view " + view_names[v] + " has " +
                                        std::to_string(views[v].rows()) + " rows, expected " +
                                        std::to_string(n));
        }
        if (views[v].cols() < 1) throw EmptyViewError(name + ": view " + view_names[v] + " has no columns");
        if (!views[v].allFinite()) {
            throw NonFiniteEntryError(name + ": view " + view_names[v] + " has non-finite entries");
        }
    }
    if (!labels.empty()) {
        if (static_cast<Eigen::Index>(labels.size()) != n) {
            throw RowCountMismatchError(name + ": " + std::to_string(labels.size()) +
                                        " labels for " + std::to_string(n) + " samples");
        }
        const int c = n_classes();
        std::vector<bool> seen(static_cast<std::size_t>(c), false);
        for (int label : labels) {
            if (label < 0) throw BadShapeError(name + ": negative class id");
            seen[static_cast<std::size_t>(label)] = true;
        }
        if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) {
            throw BadShapeError(name + ": some class id in 0.." + std::to_string(c - 1) +
                                " never appears");
        }
    }
}

MultiViewDataset load_dataset(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw MissingFileError("cannot open manifest " + manifest_path);

    nlohmann::json manifest;
    try {
        in >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw CsvFormatError(manifest_path + ": invalid JSON: " + e.what());
    }

    const fs::path base = fs::path(manifest_path).parent_path();
    MultiViewDataset data;
    data.name = manifest.value("name", fs::path(manifest_path).stem().string());

    if (!manifest.contains("views") || !manifest["views"].is_array() || manifest["views"].empty()) {
        throw CsvFormatError(manifest_path + ": manifest needs a non-empty \"views\" array");
    }
    for (const auto& view : manifest["views"]) {
        const std::string file = view.at("file").get<std::string>();
        data.view_names.push_back(view.value("name", fs::path(file).stem().string()));
        data.views.push_back(csv::read_matrix((base / file).string()));
    }

    if (manifest.contains("labels") && !manifest["labels"].is_null()) {
        const auto tokens = csv::read_lines((base / manifest["labels"].get<std::string>()).string());
        // remap arbitrary tokens to dense ids in first-appearance order
        std::map<std::string, int> ids;
        for (const auto& token : tokens) {
            const auto [it, inserted] = ids.try_emplace(token, static_cast<int>(ids.size()));
            data.labels.push_back(it->second);
        }
    }

    data.validate();
    return data;
}

MultiViewDataset synth_multiview(int n_samples, int n_clusters, int n_views,
                                 const std::vector<int>& dims, double noise_sigma,
                                 std::uint64_t seed) {
    if (n_clusters < 2 || n_samples < n_clusters) {
        throw BadShapeError("need n_samples >= n_clusters >= 2");
    }
    if (static_cast<int>(dims.size()) != n_views) {
        throw BadShapeError("dims has " + std::to_string(dims.size()) + " entries for " +
                            std::to_string(n_views) + " views");
    }
    for (int d : dims) {
        if (d < 2) throw BadShapeError("every view dimension must be >= 2");
    }
    if (noise_sigma < 0.0) throw BadShapeError("noise_sigma must be >= 0");

    std::mt19937_64 eng(seed);
    rng::Gaussian gauss;

    // Cluster centers live in a latent space a bit wider than the cluster
    // count. Each view sees the latent geometry through its own random map
    // of limited rank, so different views lose different directions and no
    // single view carries the whole structure. Samples share one latent
    // position across views (center plus a small within-cluster offset);
    // per-view feature noise comes on top. The noiseless signal is rescaled
    // to unit RMS per view, so noise_sigma reads as a noise-to-signal ratio.
    const int latent_dim = n_clusters + 3;
    const int map_rank = std::max(2, latent_dim / 2);
    const double jitter = 0.2;

    Eigen::MatrixXd centers(n_clusters, latent_dim);
    for (int c = 0; c < n_clusters; ++c) {
        for (int q = 0; q < latent_dim; ++q) centers(c, q) = gauss.next(eng);
    }

    MultiViewDataset data;
    data.name = "synth-n" + std::to_string(n_samples) + "-k" + std::to_string(n_clusters) + "-s" +
                std::to_string(seed);
    data.labels.resize(static_cast<std::size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i) data.labels[static_cast<std::size_t>(i)] = i % n_clusters;

    Eigen::MatrixXd latent(n_samples, latent_dim);
    for (int i = 0; i < n_samples; ++i) {
        for (int q = 0; q < latent_dim; ++q) {
            latent(i, q) = centers(data.labels[static_cast<std::size_t>(i)], q) +
                           jitter * gauss.next(eng);
        }
    }

    const double map_scale = 1.0 / std::sqrt(static_cast<double>(map_rank));
    for (int v = 0; v < n_views; ++v) {
        const int dim = dims[static_cast<std::size_t>(v)];
        Eigen::MatrixXd reduce(map_rank, latent_dim);
        for (int a = 0; a < map_rank; ++a) {
            for (int q = 0; q < latent_dim; ++q) reduce(a, q) = gauss.next(eng) * map_scale;
        }
        Eigen::MatrixXd expand(dim, map_rank);
        for (int a = 0; a < dim; ++a) {
            for (int q = 0; q < map_rank; ++q) expand(a, q) = gauss.next(eng) * map_scale;
        }

        Eigen::MatrixXd x = latent * (expand * reduce).transpose();  // n_samples x dim
        const double rms = std::sqrt(x.squaredNorm() / static_cast<double>(x.size()));
        if (rms > 0.0) x /= rms;
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            for (Eigen::Index j = 0; j < x.cols(); ++j) {
                x(i, j) += noise_sigma * gauss.next(eng);
            }
        }
        data.views.push_back(std::move(x));
        data.view_names.push_back("view" + std::to_string(v));
    }

    data.validate();
    return data;
}

Eigen::MatrixXd normalize_samples(const Eigen::MatrixXd& x) {
    if (!x.allFinite()) throw NonFiniteEntryError("normalize_samples: non-finite input");
    Eigen::MatrixXd out = x;
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        const double norm = out.row(i).norm();
        if (norm > 0.0) out.row(i) /= norm;
    }
    return out;
}

SplitIndices split_labels(int n, double test_fraction, std::uint64_t seed) {
    if (n < 2) throw BadShapeError("split_labels: need n >= 2");
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw BadFractionError("test_fraction must lie in (0,1), got " +
                               std::to_string(test_fraction));
    }
    int test_count = static_cast<int>(std::floor(test_fraction * n + 0.5));  // round half up
    test_count = std::clamp(test_count, 1, n - 1);

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 eng(seed);
    rng::shuffle(order, eng);

    SplitIndices split;
    split.test.assign(order.begin(), order.begin() + test_count);
    split.train.assign(order.begin() + test_count, order.end());
    return split;
}

}  // namespace mvembed
