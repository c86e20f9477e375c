#include "mvembed/baselines.hpp"

#include "mvembed/errors.hpp"

namespace mvembed {

Eigen::MatrixXd spp_embed(const Eigen::MatrixXd& x, int d, const LassoSettings& lasso) {
    if (d < 1 || d >= x.cols() || d > x.rows()) {
        throw ConfigError("spp_embed: d out of range for a " + std::to_string(x.rows()) + "x" +
                          std::to_string(x.cols()) + " view");
    }
    const Eigen::MatrixXd normalized = normalize_samples(x);
    const SparseGraph graph = sparse_graph(normalized, lasso);
    return smallest_eigenvectors(reconstruction_matrix(graph), d);
}

EmbeddingResult spp_all_views(const MultiViewDataset& dataset, const AmsreConfig& config) {
    check_config(dataset, config);
    const int m = dataset.n_views();

    EmbeddingResult result;
    std::vector<Eigen::MatrixXd> ms;
    for (int v = 0; v < m; ++v) {
        const Eigen::MatrixXd normalized =
            normalize_samples(dataset.views[static_cast<std::size_t>(v)]);
        const SparseGraph graph = sparse_graph(normalized, config.lasso, v);
        result.lasso_rows_not_converged += graph.rows_not_converged;
        ms.push_back(reconstruction_matrix(graph));
    }
    result.embeddings = init_embeddings(ms, config.d);
    result.weights.r = config.r;
    result.weights.alphas = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
    result.converged = true;
    result.iterations_used = 0;
    result.objective_trace.push_back(
        {0,
         objective(result.embeddings, ms, result.weights, config.lambda, config.positive_coupling),
         result.weights.alphas});
    result.half_step_objectives.push_back(result.objective_trace.front().objective);
    return result;
}

EmbeddingResult uniform_multiview(const MultiViewDataset& dataset, const AmsreConfig& config) {
    return detail::alternating_fit(dataset, config, false);
}

}  // namespace mvembed
