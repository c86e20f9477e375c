#include "mvembed/sparse_coding.hpp"

#include <cmath>

#include "mvembed/errors.hpp"
#include "mvembed/reference.hpp"

namespace mvembed {

namespace {

inline double soft_threshold(double z, double gamma) {
    if (z > gamma) return z - gamma;
    if (z < -gamma) return z + gamma;
    return 0.0;
}

// Shared by the parallel and serial graph builders: the lasso problem for
// one sample against all the others.
struct RowSolve {
    Eigen::VectorXd coefficients;  // length N, diagonal slot already zero
    bool converged = true;
};

RowSolve solve_graph_row(const Eigen::MatrixXd& x, Eigen::Index i, const LassoSettings& settings) {
    const Eigen::Index n = x.rows();
    const Eigen::Index dim = x.cols();

    Eigen::MatrixXd predictors(dim, n - 1);
    Eigen::Index col = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        predictors.col(col++) = x.row(j).transpose();
    }
    const Eigen::VectorXd target = x.row(i).transpose();

    const double max_corr = (predictors.transpose() * target).cwiseAbs().maxCoeff();
    const double gamma = settings.gamma_rel * max_corr;

    const LassoResult fit = lasso_cd(predictors, target, gamma, settings);

    RowSolve out;
    out.converged = fit.converged;
    out.coefficients = Eigen::VectorXd::Zero(n);
    col = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        out.coefficients(j) = fit.coefficients(col++);
    }
    return out;
}

}  // namespace

LassoResult lasso_cd(const Eigen::MatrixXd& predictors, const Eigen::VectorXd& target,
                     double gamma, const LassoSettings& settings) {
    if (predictors.cols() < 1) throw BadShapeError("lasso_cd: no predictor columns");
    if (predictors.rows() != target.size()) {
        throw BadShapeError("lasso_cd: predictor/target row mismatch");
    }
    if (gamma < 0.0) throw BadShapeError("lasso_cd: gamma must be >= 0");
    if (!(settings.tol > 0.0) || settings.max_iter < 1) {
        throw BadShapeError("lasso_cd: invalid settings");
    }

    const Eigen::Index p = predictors.cols();
    const Eigen::VectorXd col_sq = predictors.colwise().squaredNorm();

    LassoResult result;
    result.coefficients = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd residual = target;

    for (int sweep = 0; sweep < settings.max_iter; ++sweep) {
        double max_change = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            if (col_sq(j) == 0.0) continue;  // zero column, coefficient stays 0
            const double old = result.coefficients(j);
            const double rho = predictors.col(j).dot(residual) + col_sq(j) * old;
            const double updated = soft_threshold(rho, gamma) / col_sq(j);
            const double delta = updated - old;
            if (delta != 0.0) {
                residual -= delta * predictors.col(j);
                result.coefficients(j) = updated;
            }
            max_change = std::max(max_change, std::abs(delta));
        }
        result.sweeps = sweep + 1;
        result.sweep_objectives.push_back(0.5 * residual.squaredNorm() +
                                          gamma * result.coefficients.lpNorm<1>());
        if (max_change <= settings.tol) return result;
    }
    result.converged = false;
    return result;
}

SparseGraph sparse_graph(const Eigen::MatrixXd& x, const LassoSettings& settings, int view_index) {
    const Eigen::Index n = x.rows();
    if (n < 2) throw BadShapeError("sparse_graph: need at least 2 samples");

    SparseGraph graph;
    graph.coefficients.setZero(n, n);
    graph.gamma_rel = settings.gamma_rel;
    graph.view_index = view_index;

    int failures = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : failures)
    for (Eigen::Index i = 0; i < n; ++i) {
        const RowSolve row = solve_graph_row(x, i, settings);
        graph.coefficients.row(i) = row.coefficients.transpose();
        if (!row.converged) ++failures;
    }
    graph.rows_not_converged = failures;
    return graph;
}

Eigen::MatrixXd reconstruction_matrix(const SparseGraph& graph) {
    const Eigen::Index n = graph.coefficients.rows();
    const Eigen::MatrixXd t = Eigen::MatrixXd::Identity(n, n) - graph.coefficients;
    Eigen::MatrixXd m = t * t.transpose();
    m = 0.5 * (m + m.transpose()).eval();
    return m;
}

namespace reference {

SparseGraph sparse_graph_serial(const Eigen::MatrixXd& x, const LassoSettings& settings,
                                int view_index) {
    const Eigen::Index n = x.rows();
    if (n < 2) throw BadShapeError("sparse_graph: need at least 2 samples");

    SparseGraph graph;
    graph.coefficients.setZero(n, n);
    graph.gamma_rel = settings.gamma_rel;
    graph.view_index = view_index;

    for (Eigen::Index i = 0; i < n; ++i) {
        const RowSolve row = solve_graph_row(x, i, settings);
        graph.coefficients.row(i) = row.coefficients.transpose();
        if (!row.converged) ++graph.rows_not_converged;
    }
    return graph;
}

}  // namespace reference

}  // namespace mvembed
