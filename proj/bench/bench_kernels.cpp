// Times the OpenMP kernels against their serial reference implementations
// and checks that both produce identical results.
//
//   bench_kernels [--quick]

#include <omp.h>

#include <Eigen/Core>
#include <cstdio>
#include <cstring>
#include <random>

#include "mvembed/dataset.hpp"
#include "mvembed/reference.hpp"
#include "mvembed/rng.hpp"
#include "mvembed/sparse_coding.hpp"

using namespace mvembed;

namespace {

Eigen::MatrixXd gaussian_matrix(std::mt19937_64& eng, int rows, int cols) {
    rng::Gaussian gauss;
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = gauss.next(eng);
    return m;
}

void report(const char* kernel, double serial_s, double parallel_s, double max_diff) {
    std::printf("%-16s serial %8.3fs   parallel %8.3fs   speedup %5.2fx   max|diff| %g\n",
                kernel, serial_s, parallel_s, serial_s / parallel_s, max_diff);
}

}  // namespace

int main(int argc, char** argv) {
    const bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;

    const int graph_n = quick ? 80 : 400;
    const int graph_dim = quick ? 20 : 60;
    const int knn_train = quick ? 500 : 4000;
    const int knn_test = quick ? 200 : 1500;
    const int knn_dim = 32;

    std::printf("threads: %d\n", omp_get_max_threads());
    std::mt19937_64 eng(1234);

    {
        const Eigen::MatrixXd x = normalize_samples(gaussian_matrix(eng, graph_n, graph_dim));
        LassoSettings settings;

        const double t0 = omp_get_wtime();
        const SparseGraph serial = reference::sparse_graph_serial(x, settings);
        const double t1 = omp_get_wtime();
        const SparseGraph parallel = sparse_graph(x, settings);
        const double t2 = omp_get_wtime();

        report("sparse_graph", t1 - t0, t2 - t1,
               (serial.coefficients - parallel.coefficients).cwiseAbs().maxCoeff());
    }

    {
        const Eigen::MatrixXd train = gaussian_matrix(eng, knn_train, knn_dim);
        const Eigen::MatrixXd test = gaussian_matrix(eng, knn_test, knn_dim);
        std::vector<int> labels(static_cast<std::size_t>(knn_train));
        for (int i = 0; i < knn_train; ++i) labels[static_cast<std::size_t>(i)] = i % 7;

        const double t0 = omp_get_wtime();
        const std::vector<int> serial = reference::knn1_classify_serial(train, labels, test);
        const double t1 = omp_get_wtime();
        const std::vector<int> parallel = knn1_classify(train, labels, test);
        const double t2 = omp_get_wtime();

        int diffs = 0;
        for (std::size_t i = 0; i < serial.size(); ++i) {
            if (serial[i] != parallel[i]) ++diffs;
        }
        report("knn1_classify", t1 - t0, t2 - t1, static_cast<double>(diffs));
    }

    return 0;
}
