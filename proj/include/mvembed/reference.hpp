#pragma once

#include <Eigen/Core>
#include <vector>

#include "mvembed/eval.hpp"
#include "mvembed/sparse_coding.hpp"

namespace mvembed::reference {

// Serial counterparts of the OpenMP kernels. They must produce bitwise
// identical results; tests compare them and bench/ times them.

SparseGraph sparse_graph_serial(const Eigen::MatrixXd& x, const LassoSettings& settings,
                                int view_index = 0);

std::vector<int> knn1_classify_serial(const Eigen::MatrixXd& train_points,
                                      const std::vector<int>& train_labels,
                                      const Eigen::MatrixXd& test_points);

}  // namespace mvembed::reference
