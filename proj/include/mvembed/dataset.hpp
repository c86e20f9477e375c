#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace mvembed {

/// A collection of per-view feature matrices over the same N samples.
/// Samples are stored as rows; view v has shape N x D_v.
struct MultiViewDataset {
    std::vector<Eigen::MatrixXd> views;
    std::vector<std::string> view_names;
    std::vector<int> labels;  // empty when the dataset is unlabeled
    std::string name;

    int n_samples() const { return views.empty() ? 0 : static_cast<int>(views.front().rows()); }
    int n_views() const { return static_cast<int>(views.size()); }
    bool has_labels() const { return !labels.empty(); }
    int n_classes() const;

    /// Throws unless all views share N >= 2, every D_v >= 1, all entries are
    /// finite, and labels (when present) have length N with every class used.
    void validate() const;
};

struct SplitIndices {
    std::vector<int> train;
    std::vector<int> test;
};

/// Loads a dataset from a JSON manifest:
///   {"name": str, "views": [{"name": str, "file": relative path}...],
///    "labels": optional relative path}
/// View files are numeric CSV; the labels file holds one token per line and
/// tokens are remapped to dense class ids 0..C-1 in first-appearance order.
MultiViewDataset load_dataset(const std::string& manifest_path);

/// Clustered synthetic data: k centers in a latent space, pushed through a
/// per-view random rank-limited linear map, plus per-coordinate Gaussian
/// noise of scale noise_sigma. Labels are the cluster ids. Deterministic
/// given the seed.
MultiViewDataset synth_multiview(int n_samples, int n_clusters, int n_views,
                                 const std::vector<int>& dims, double noise_sigma,
                                 std::uint64_t seed);

/// Rescales every nonzero row to unit Euclidean norm; zero rows stay zero.
Eigen::MatrixXd normalize_samples(const Eigen::MatrixXd& x);

/// Uniform random train/test partition of {0..n-1}. The test count is
/// round-half-up(test_fraction * n) clamped to [1, n-1]. Deterministic given
/// the seed.
SplitIndices split_labels(int n, double test_fraction, std::uint64_t seed);

}  // namespace mvembed
