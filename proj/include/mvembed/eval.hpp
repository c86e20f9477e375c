#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "mvembed/dataset.hpp"
#include "mvembed/embedding.hpp"

namespace mvembed {

enum class Method { amsre, uniform, spp };

std::string method_name(Method m);
Method parse_method(const std::string& name);

struct ReportTable {
    std::string method;
    int dimension = 0;
    int repeats = 0;
    std::vector<double> per_view_mean;
    std::vector<double> per_view_max;
    double best_view_mean = 0.0;
    double best_view_max = 0.0;
    Eigen::MatrixXd per_repeat_accuracies;  // repeats x m
};

/// 1NN with Euclidean distance; exact distance ties go to the lowest
/// training index. Parallel over test points.
std::vector<int> knn1_classify(const Eigen::MatrixXd& train_points,
                               const std::vector<int>& train_labels,
                               const Eigen::MatrixXd& test_points);

/// Fraction of exact matches.
double accuracy(const std::vector<int>& pred, const std::vector<int>& truth);

/// The repeated-split harness on any per-view point sets (embeddings or raw
/// features): repeat k draws split_labels(n, test_fraction, seed + k), runs
/// per-view 1NN on the split, and records the accuracies. Repeats run in
/// parallel; the per-repeat RNG stream depends only on seed + k, so the
/// result is identical for any thread count.
ReportTable evaluate_views(const std::vector<Eigen::MatrixXd>& view_points,
                           const std::vector<int>& labels, int repeats, double test_fraction,
                           std::uint64_t seed);

/// Transductive protocol: embeddings are computed once on the full dataset
/// with the selected method, then labels are repeatedly split and scored.
ReportTable run_experiment(const MultiViewDataset& dataset, Method method,
                           const AmsreConfig& config, int repeats, double test_fraction,
                           std::uint64_t seed);

}  // namespace mvembed
