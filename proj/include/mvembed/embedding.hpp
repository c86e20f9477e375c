#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "mvembed/dataset.hpp"
#include "mvembed/sparse_coding.hpp"

namespace mvembed {

/// View weights on the probability simplex with exponent r > 1.
struct WeightVector {
    Eigen::VectorXd alphas;
    double r = 2.0;
};

struct AmsreConfig {
    int d = 2;                   // target dimension, 1 <= d < min_v D_v, d <= N
    double lambda = 0.5;         // coupling strength >= 0
    double r = 2.0;              // weight exponent > 1
    LassoSettings lasso;
    int max_outer_iter = 100;
    double conv_tol = 1e-6;      // relative objective-change threshold
    std::uint64_t seed = 0;
    // Debug switch: flips the sign of the coupling term so that agreement
    // between views is penalized instead of rewarded.
    bool positive_coupling = false;
};

struct TraceEntry {
    int iteration = 0;
    double objective = 0.0;
    Eigen::VectorXd alphas;
};

struct EmbeddingResult {
    std::vector<Eigen::MatrixXd> embeddings;  // per view, N x d, orthonormal columns
    WeightVector weights;
    std::vector<TraceEntry> objective_trace;        // one entry per outer iteration, from 0
    std::vector<double> half_step_objectives;       // objective after every view/weight update
    bool converged = false;
    int iterations_used = 0;
    int lasso_rows_not_converged = 0;
    int degenerate_weight_updates = 0;
    // Largest ||Y^T Y - I||_max seen over all embeddings produced during the run.
    double max_orthonormality_defect = 0.0;
};

/// Columns are unit eigenvectors of the d algebraically smallest eigenvalues
/// of the symmetric matrix a, ascending. Sign fixed per column: the entry of
/// largest absolute value is positive (near-ties resolve to the lowest index).
Eigen::MatrixXd smallest_eigenvectors(const Eigen::MatrixXd& a, int d);

/// Independent per-view initialization: Y_v spans the d-smallest eigenspace
/// of M_v.
std::vector<Eigen::MatrixXd> init_embeddings(const std::vector<Eigen::MatrixXd>& ms, int d);

/// alpha_v^r * M_v - lambda * sum_{w != v} Y_w Y_w^T, symmetrized.
/// (With positive_coupling the sum is added instead.)
Eigen::MatrixXd view_subproblem_matrix(int v, const std::vector<Eigen::MatrixXd>& ys,
                                       const Eigen::MatrixXd& m_v, double alpha_v, double r,
                                       double lambda, bool positive_coupling = false);

/// Exact minimizer of the view-v block with all other variables fixed.
Eigen::MatrixXd update_view(int v, const std::vector<Eigen::MatrixXd>& ys,
                            const Eigen::MatrixXd& m_v, const WeightVector& weights,
                            const AmsreConfig& config);

/// Closed-form simplex minimizer of sum_v alpha_v^r * c_v for the per-view
/// costs c_v = tr(Y_v^T M_v Y_v), floored at 1e-12. If every cost sits at the
/// floor the weights degenerate to uniform and *degenerate is set.
WeightVector update_weights(const std::vector<Eigen::MatrixXd>& ys,
                            const std::vector<Eigen::MatrixXd>& ms, double r,
                            bool* degenerate = nullptr);

/// sum_v alpha_v^r tr(Y_v^T M_v Y_v) - lambda * sum_{v<w} ||Y_v^T Y_w||_F^2.
/// The coupling trace is computed at d x d cost, never through an N x N
/// product.
double objective(const std::vector<Eigen::MatrixXd>& ys, const std::vector<Eigen::MatrixXd>& ms,
                 const WeightVector& weights, double lambda, bool positive_coupling = false);

/// Full alternating optimizer: normalize views, build the per-view sparse
/// graphs and reconstruction matrices once, initialize embeddings and uniform
/// weights, then sweep view updates (in view order) followed by the weight
/// update until the relative objective change drops below conv_tol or
/// max_outer_iter is reached.
EmbeddingResult fit_amsre(const MultiViewDataset& dataset, const AmsreConfig& config);

/// Validates config against dataset shapes; throws ConfigError.
void check_config(const MultiViewDataset& dataset, const AmsreConfig& config);

namespace detail {
/// Shared alternating loop; with auto_weight = false the weights stay
/// pinned at 1/m (the uniform baseline).
EmbeddingResult alternating_fit(const MultiViewDataset& dataset, const AmsreConfig& config,
                                bool auto_weight);
}  // namespace detail

}  // namespace mvembed
