#include "mvembed/embedding.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "mvembed/errors.hpp"

namespace mvembed {

namespace {

// Largest-|entry| component positive; near-ties (relative 1e-12) resolve to
// the lowest index so analytically symmetric vectors get a stable sign.
void fix_column_signs(Eigen::MatrixXd& y) {
    for (Eigen::Index c = 0; c < y.cols(); ++c) {
        const double max_abs = y.col(c).cwiseAbs().maxCoeff();
        if (max_abs == 0.0) continue;
        for (Eigen::Index i = 0; i < y.rows(); ++i) {
            if (std::abs(y(i, c)) >= max_abs * (1.0 - 1e-12)) {
                if (y(i, c) < 0.0) y.col(c) = -y.col(c);
                break;
            }
        }
    }
}

double orthonormality_defect(const Eigen::MatrixXd& y) {
    const Eigen::Index d = y.cols();
    return (y.transpose() * y - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff();
}

}  // namespace

Eigen::MatrixXd smallest_eigenvectors(const Eigen::MatrixXd& a, int d) {
    if (a.rows() != a.cols()) throw BadShapeError("smallest_eigenvectors: matrix not square");
    if (d < 1 || d > a.rows()) {
        throw BadShapeError("smallest_eigenvectors: d out of range [1, " +
                            std::to_string(a.rows()) + "]");
    }
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, a.cwiseAbs().maxCoeff())) {
        throw BadShapeError("smallest_eigenvectors: matrix not symmetric");
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
    if (solver.info() != Eigen::Success) {
        throw EigenFailureError("eigendecomposition did not converge");
    }
    // eigenvalues come back sorted ascending
    Eigen::MatrixXd y = solver.eigenvectors().leftCols(d);
    fix_column_signs(y);
    return y;
}

std::vector<Eigen::MatrixXd> init_embeddings(const std::vector<Eigen::MatrixXd>& ms, int d) {
    if (ms.empty()) throw BadShapeError("init_embeddings: no matrices");
    std::vector<Eigen::MatrixXd> ys;
    ys.reserve(ms.size());
    for (const auto& m : ms) {
        if (m.rows() != ms.front().rows()) {
            throw BadShapeError("init_embeddings: views disagree on N");
        }
        ys.push_back(smallest_eigenvectors(m, d));
    }
    return ys;
}

Eigen::MatrixXd view_subproblem_matrix(int v, const std::vector<Eigen::MatrixXd>& ys,
                                       const Eigen::MatrixXd& m_v, double alpha_v, double r,
                                       double lambda, bool positive_coupling) {
    const double coupling_sign = positive_coupling ? 1.0 : -1.0;
    Eigen::MatrixXd b = std::pow(alpha_v, r) * m_v;
    for (std::size_t w = 0; w < ys.size(); ++w) {
        if (static_cast<int>(w) == v) continue;
        b.noalias() += coupling_sign * lambda * (ys[w] * ys[w].transpose());
    }
    b = 0.5 * (b + b.transpose()).eval();
    return b;
}

Eigen::MatrixXd update_view(int v, const std::vector<Eigen::MatrixXd>& ys,
                            const Eigen::MatrixXd& m_v, const WeightVector& weights,
                            const AmsreConfig& config) {
    const Eigen::MatrixXd sub = view_subproblem_matrix(
        v, ys, m_v, weights.alphas(v), weights.r, config.lambda, config.positive_coupling);
    return smallest_eigenvectors(sub, config.d);
}

WeightVector update_weights(const std::vector<Eigen::MatrixXd>& ys,
                            const std::vector<Eigen::MatrixXd>& ms, double r, bool* degenerate) {
    constexpr double kCostFloor = 1e-12;
    if (!(r > 1.0)) throw ConfigError("update_weights: r must be > 1");
    const std::size_t m = ys.size();

    Eigen::VectorXd costs(static_cast<Eigen::Index>(m));
    for (std::size_t v = 0; v < m; ++v) {
        costs(static_cast<Eigen::Index>(v)) =
            std::max((ys[v].transpose() * ms[v] * ys[v]).trace(), kCostFloor);
    }

    WeightVector weights;
    weights.r = r;
    if (degenerate) *degenerate = false;
    if ((costs.array() <= kCostFloor).all()) {
        if (degenerate) *degenerate = true;
        weights.alphas = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(m),
                                                   1.0 / static_cast<double>(m));
        return weights;
    }

    // alpha_v proportional to (1/c_v)^(1/(r-1)); dividing by the smallest
    // cost first keeps every pow argument in (0, 1] so huge exponents can
    // only underflow harmlessly.
    const double c_min = costs.minCoeff();
    const double exponent = 1.0 / (r - 1.0);
    Eigen::VectorXd t(costs.size());
    for (Eigen::Index v = 0; v < costs.size(); ++v) {
        t(v) = std::pow(c_min / costs(v), exponent);
    }
    weights.alphas = t / t.sum();
    return weights;
}

double objective(const std::vector<Eigen::MatrixXd>& ys, const std::vector<Eigen::MatrixXd>& ms,
                 const WeightVector& weights, double lambda, bool positive_coupling) {
    const double coupling_sign = positive_coupling ? 1.0 : -1.0;
    double total = 0.0;
    for (std::size_t v = 0; v < ys.size(); ++v) {
        total += std::pow(weights.alphas(static_cast<Eigen::Index>(v)), weights.r) *
                 (ys[v].transpose() * ms[v] * ys[v]).trace();
    }
    for (std::size_t v = 0; v < ys.size(); ++v) {
        for (std::size_t w = v + 1; w < ys.size(); ++w) {
            // tr(Y_v Y_v^T Y_w Y_w^T) == ||Y_v^T Y_w||_F^2
            total += coupling_sign * lambda * (ys[v].transpose() * ys[w]).squaredNorm();
        }
    }
    return total;
}

void check_config(const MultiViewDataset& dataset, const AmsreConfig& config) {
    dataset.validate();
    Eigen::Index min_dim = dataset.views.front().cols();
    for (const auto& view : dataset.views) min_dim = std::min(min_dim, view.cols());
    if (config.d < 1 || config.d >= min_dim || config.d > dataset.n_samples()) {
        throw ConfigError("d=" + std::to_string(config.d) + " must satisfy 1 <= d < " +
                          std::to_string(min_dim) + " and d <= " +
                          std::to_string(dataset.n_samples()));
    }
    if (config.lambda < 0.0) throw ConfigError("lambda must be >= 0");
    if (!(config.r > 1.0)) throw ConfigError("r must be > 1");
    if (config.max_outer_iter < 1) throw ConfigError("max_outer_iter must be >= 1");
    if (!(config.conv_tol > 0.0)) throw ConfigError("conv_tol must be > 0");
    if (!(config.lasso.gamma_rel > 0.0) || !(config.lasso.tol > 0.0) ||
        config.lasso.max_iter < 1) {
        throw ConfigError("invalid lasso settings");
    }
}

namespace detail {

EmbeddingResult alternating_fit(const MultiViewDataset& dataset, const AmsreConfig& config,
                                bool auto_weight) {
    check_config(dataset, config);
    const int m = dataset.n_views();

    EmbeddingResult result;
    std::vector<Eigen::MatrixXd> ms;
    ms.reserve(static_cast<std::size_t>(m));
    for (int v = 0; v < m; ++v) {
        const Eigen::MatrixXd normalized =
            normalize_samples(dataset.views[static_cast<std::size_t>(v)]);
        const SparseGraph graph = sparse_graph(normalized, config.lasso, v);
        result.lasso_rows_not_converged += graph.rows_not_converged;
        ms.push_back(reconstruction_matrix(graph));
    }

    result.embeddings = init_embeddings(ms, config.d);
    for (const auto& y : result.embeddings) {
        result.max_orthonormality_defect =
            std::max(result.max_orthonormality_defect, orthonormality_defect(y));
    }
    result.weights.r = config.r;
    result.weights.alphas = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));

    double previous = objective(result.embeddings, ms, result.weights, config.lambda,
                                config.positive_coupling);
    result.objective_trace.push_back({0, previous, result.weights.alphas});
    result.half_step_objectives.push_back(previous);

    for (int iter = 1; iter <= config.max_outer_iter; ++iter) {
        for (int v = 0; v < m; ++v) {
            result.embeddings[static_cast<std::size_t>(v)] =
                update_view(v, result.embeddings, ms[static_cast<std::size_t>(v)],
                            result.weights, config);
            result.max_orthonormality_defect =
                std::max(result.max_orthonormality_defect,
                         orthonormality_defect(result.embeddings[static_cast<std::size_t>(v)]));
            result.half_step_objectives.push_back(objective(
                result.embeddings, ms, result.weights, config.lambda, config.positive_coupling));
        }

        if (auto_weight) {
            bool degenerate = false;
            result.weights = update_weights(result.embeddings, ms, config.r, &degenerate);
            if (degenerate) ++result.degenerate_weight_updates;
        }
        const double current = objective(result.embeddings, ms, result.weights, config.lambda,
                                         config.positive_coupling);
        result.half_step_objectives.push_back(current);
        result.objective_trace.push_back({iter, current, result.weights.alphas});
        result.iterations_used = iter;

        const double rel_change =
            std::abs(current - previous) / std::max(std::abs(previous), 1e-12);
        if (rel_change < config.conv_tol) {
            result.converged = true;
            break;
        }
        previous = current;
    }
    return result;
}

}  // namespace detail

EmbeddingResult fit_amsre(const MultiViewDataset& dataset, const AmsreConfig& config) {
    return detail::alternating_fit(dataset, config, true);
}

}  // namespace mvembed
