#pragma once

#include <Eigen/Core>

#include "mvembed/dataset.hpp"
#include "mvembed/embedding.hpp"
#include "mvembed/sparse_coding.hpp"

namespace mvembed {

/// Single-view sparse reconstructive embedding: normalize rows, build S and
/// M for the one view, return the d-smallest eigenvectors of M.
Eigen::MatrixXd spp_embed(const Eigen::MatrixXd& x, int d, const LassoSettings& lasso);

/// spp_embed applied to every view of a dataset, packaged like an optimizer
/// result (uniform weights, single trace entry).
EmbeddingResult spp_all_views(const MultiViewDataset& dataset, const AmsreConfig& config);

/// Ablation: identical to fit_amsre except the view weights stay pinned at
/// 1/m and are never updated.
EmbeddingResult uniform_multiview(const MultiViewDataset& dataset, const AmsreConfig& config);

}  // namespace mvembed
