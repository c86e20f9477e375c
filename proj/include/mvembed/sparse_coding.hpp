#pragma once

#include <Eigen/Core>
#include <vector>

namespace mvembed {

struct LassoSettings {
    double gamma_rel = 0.1;  // L1 strength relative to the max target correlation
    double tol = 1e-9;       // max absolute coefficient change per sweep
    int max_iter = 1000;     // sweep cap
};

struct LassoResult {
    Eigen::VectorXd coefficients;
    int sweeps = 0;
    bool converged = true;
    std::vector<double> sweep_objectives;  // 0.5*||b - A s||^2 + gamma*||s||_1 after each sweep
};

/// Minimizes 0.5*||b - A s||^2 + gamma*||s||_1 by cyclic coordinate descent
/// with soft thresholding. Coordinates are visited in ascending column index
/// order. A column of all zeros gets coefficient 0. When max_iter sweeps
/// run out the best iterate is returned with converged = false.
LassoResult lasso_cd(const Eigen::MatrixXd& predictors, const Eigen::VectorXd& target,
                     double gamma, const LassoSettings& settings);

/// Row i holds the sparse coefficients reconstructing sample i from the
/// other samples; the diagonal is exactly zero.
struct SparseGraph {
    Eigen::MatrixXd coefficients;  // N x N
    double gamma_rel = 0.0;
    int view_index = 0;
    int rows_not_converged = 0;
};

/// Solves one lasso problem per sample: predictors are all other samples'
/// feature vectors (as columns, ascending sample order), the target is the
/// sample itself, and the absolute penalty is gamma_rel times the largest
/// |x_j . x_i| over j != i. Rows are independent and solved in parallel;
/// each worker writes only its own row, so the result does not depend on
/// the thread count.
SparseGraph sparse_graph(const Eigen::MatrixXd& x, const LassoSettings& settings,
                         int view_index = 0);

/// M = (I - S)(I - S)^T, symmetrized as (M + M^T)/2. Symmetric PSD.
Eigen::MatrixXd reconstruction_matrix(const SparseGraph& graph);

}  // namespace mvembed
