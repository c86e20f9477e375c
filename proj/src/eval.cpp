#include "mvembed/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mvembed/baselines.hpp"
#include "mvembed/errors.hpp"
#include "mvembed/reference.hpp"

namespace mvembed {

namespace {

// Nearest training row by squared Euclidean distance; strict less-than keeps
// the lowest index on exact ties.
int nearest_index(const Eigen::MatrixXd& train, const Eigen::RowVectorXd& point) {
    int best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < train.rows(); ++j) {
        const double dist = (train.row(j) - point).squaredNorm();
        if (dist < best_dist) {
            best_dist = dist;
            best = static_cast<int>(j);
        }
    }
    return best;
}

}  // namespace

std::string method_name(Method m) {
    switch (m) {
        case Method::amsre: return "amsre";
        case Method::uniform: return "uniform";
        case Method::spp: return "spp";
    }
    return "unknown";
}

Method parse_method(const std::string& name) {
    if (name == "amsre") return Method::amsre;
    if (name == "uniform") return Method::uniform;
    if (name == "spp") return Method::spp;
    throw ConfigError("unknown method '" + name + "' (expected amsre, uniform or spp)");
}

std::vector<int> knn1_classify(const Eigen::MatrixXd& train_points,
                               const std::vector<int>& train_labels,
                               const Eigen::MatrixXd& test_points) {
    if (train_points.rows() < 1) throw DimensionMismatchError("knn1: empty training set");
    if (train_points.cols() != test_points.cols()) {
        throw DimensionMismatchError("knn1: train has " + std::to_string(train_points.cols()) +
                                     " columns, test has " + std::to_string(test_points.cols()));
    }
    if (static_cast<Eigen::Index>(train_labels.size()) != train_points.rows()) {
        throw DimensionMismatchError("knn1: label count does not match training rows");
    }

    std::vector<int> predictions(static_cast<std::size_t>(test_points.rows()));
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < test_points.rows(); ++i) {
        predictions[static_cast<std::size_t>(i)] =
            train_labels[static_cast<std::size_t>(nearest_index(train_points, test_points.row(i)))];
    }
    return predictions;
}

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
    if (pred.size() != truth.size() || pred.empty()) {
        throw LengthMismatchError("accuracy: prediction/truth length mismatch");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] == truth[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(pred.size());
}

ReportTable evaluate_views(const std::vector<Eigen::MatrixXd>& view_points,
                           const std::vector<int>& labels, int repeats, double test_fraction,
                           std::uint64_t seed) {
    if (labels.empty()) throw MissingLabelsError("evaluation needs labels");
    if (view_points.empty()) throw BadShapeError("evaluation needs at least one view");
    if (repeats < 1) throw BadShapeError("repeats must be >= 1");
    const int n = static_cast<int>(view_points.front().rows());
    const int m = static_cast<int>(view_points.size());
    // validate up front; the parallel region below must not throw
    if (static_cast<int>(labels.size()) != n) {
        throw RowCountMismatchError("labels/points row mismatch");
    }
    for (const auto& points : view_points) {
        if (points.rows() != n) throw RowCountMismatchError("views disagree on N");
    }
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw BadFractionError("test_fraction must lie in (0,1)");
    }
    if (n < 2) throw BadShapeError("evaluation needs at least 2 samples");

    ReportTable table;
    table.repeats = repeats;
    table.per_repeat_accuracies.setZero(repeats, m);

#pragma omp parallel for schedule(static)
    for (int k = 0; k < repeats; ++k) {
        const SplitIndices split = split_labels(n, test_fraction, seed + static_cast<std::uint64_t>(k));
        for (int v = 0; v < m; ++v) {
            const auto& points = view_points[static_cast<std::size_t>(v)];
            Eigen::MatrixXd train(split.train.size(), points.cols());
            Eigen::MatrixXd test(split.test.size(), points.cols());
            std::vector<int> train_labels, test_labels;
            train_labels.reserve(split.train.size());
            test_labels.reserve(split.test.size());
            for (std::size_t a = 0; a < split.train.size(); ++a) {
                train.row(static_cast<Eigen::Index>(a)) = points.row(split.train[a]);
                train_labels.push_back(labels[static_cast<std::size_t>(split.train[a])]);
            }
            for (std::size_t a = 0; a < split.test.size(); ++a) {
                test.row(static_cast<Eigen::Index>(a)) = points.row(split.test[a]);
                test_labels.push_back(labels[static_cast<std::size_t>(split.test[a])]);
            }
            const std::vector<int> pred = knn1_classify(train, train_labels, test);
            table.per_repeat_accuracies(k, v) = accuracy(pred, test_labels);
        }
    }

    table.per_view_mean.assign(static_cast<std::size_t>(m), 0.0);
    table.per_view_max.assign(static_cast<std::size_t>(m), 0.0);
    for (int v = 0; v < m; ++v) {
        table.per_view_mean[static_cast<std::size_t>(v)] =
            table.per_repeat_accuracies.col(v).mean();
        table.per_view_max[static_cast<std::size_t>(v)] =
            table.per_repeat_accuracies.col(v).maxCoeff();
    }
    table.best_view_mean = *std::max_element(table.per_view_mean.begin(), table.per_view_mean.end());
    table.best_view_max = *std::max_element(table.per_view_max.begin(), table.per_view_max.end());
    return table;
}

ReportTable run_experiment(const MultiViewDataset& dataset, Method method,
                           const AmsreConfig& config, int repeats, double test_fraction,
                           std::uint64_t seed) {
    if (!dataset.has_labels()) throw MissingLabelsError(dataset.name + " has no labels");

    EmbeddingResult fitted;
    switch (method) {
        case Method::amsre: fitted = fit_amsre(dataset, config); break;
        case Method::uniform: fitted = uniform_multiview(dataset, config); break;
        case Method::spp: fitted = spp_all_views(dataset, config); break;
    }

    ReportTable table = evaluate_views(fitted.embeddings, dataset.labels, repeats, test_fraction, seed);
    table.method = method_name(method);
    table.dimension = config.d;
    return table;
}

namespace reference {

std::vector<int> knn1_classify_serial(const Eigen::MatrixXd& train_points,
                                      const std::vector<int>& train_labels,
                                      const Eigen::MatrixXd& test_points) {
    if (train_points.rows() < 1) throw DimensionMismatchError("knn1: empty training set");
    if (train_points.cols() != test_points.cols()) {
        throw DimensionMismatchError("knn1: train/test column mismatch");
    }
    std::vector<int> predictions(static_cast<std::size_t>(test_points.rows()));
    for (Eigen::Index i = 0; i < test_points.rows(); ++i) {
        int best = 0;
        double best_dist = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < train_points.rows(); ++j) {
            const double dist = (train_points.row(j) - test_points.row(i)).squaredNorm();
            if (dist < best_dist) {
                best_dist = dist;
                best = static_cast<int>(j);
            }
        }
        predictions[static_cast<std::size_t>(i)] = train_labels[static_cast<std::size_t>(best)];
    }
    return predictions;
}

}  // namespace reference

}  // namespace mvembed
