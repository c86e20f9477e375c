#include <doctest.h>

#include <Eigen/Core>
#include <fstream>
#include <set>
#include <sstream>

#include "mvembed/csv.hpp"
#include "mvembed/dataset.hpp"
#include "mvembed/errors.hpp"
#include "mvembed/eval.hpp"
#include "test_util.hpp"

using namespace mvembed;

namespace {

// Patterned numeric CSV, cheap to generate at document-scale widths.
void write_view_csv(const std::string& path, int rows, int cols) {
    std::ofstream out(path);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            if (j) out << ',';
            out << ((i * 7 + j * 3) % 10) * 0.25;
        }
        out << '\n';
    }
}

void write_labels(const std::string& path, int rows, int classes) {
    std::ofstream out(path);
    for (int i = 0; i < rows; ++i) out << "c" << (i % classes) << '\n';
}

}  // namespace

TEST_CASE("load_dataset: three document-scale views cross-checked against labels") {
    testutil::TempDir dir("load3");
    write_view_csv(dir.file("bbc.csv"), 169, 3068);
    write_view_csv(dir.file("reuters.csv"), 169, 3631);
    write_view_csv(dir.file("guardian.csv"), 169, 3560);
    write_labels(dir.file("labels.txt"), 169, 6);
    testutil::write_file(dir.file("manifest.json"), R"({
      "name": "three-sources",
      "views": [
        {"name": "bbc", "file": "bbc.csv"},
        {"name": "reuters", "file": "reuters.csv"},
        {"name": "guardian", "file": "guardian.csv"}
      ],
      "labels": "labels.txt"
    })");

    const MultiViewDataset data = load_dataset(dir.file("manifest.json"));
    CHECK(data.n_views() == 3);
    CHECK(data.n_samples() == 169);
    CHECK(data.views[0].cols() == 3068);
    CHECK(data.views[1].cols() == 3631);
    CHECK(data.views[2].cols() == 3560);
    CHECK(data.n_classes() == 6);
    CHECK(data.view_names[1] == "reuters");
}

TEST_CASE("load_dataset: minimal unlabeled single view") {
    testutil::TempDir dir("load1");
    testutil::write_file(dir.file("v.csv"), "1,2\n3,4\n");
    testutil::write_file(dir.file("manifest.json"),
                         R"({"name":"tiny","views":[{"name":"v","file":"v.csv"}]})");
    const MultiViewDataset data = load_dataset(dir.file("manifest.json"));
    CHECK(data.n_views() == 1);
    CHECK(data.n_samples() == 2);
    CHECK_FALSE(data.has_labels());
}

TEST_CASE("load_dataset: row count mismatch against labels is an error") {
    testutil::TempDir dir("loadbad");
    write_view_csv(dir.file("a.csv"), 169, 5);
    write_view_csv(dir.file("b.csv"), 168, 5);
    write_labels(dir.file("labels.txt"), 169, 6);
    testutil::write_file(dir.file("manifest.json"), R"({
      "views": [{"name":"a","file":"a.csv"},{"name":"b","file":"b.csv"}],
      "labels": "labels.txt"
    })");
    CHECK_THROWS_AS(load_dataset(dir.file("manifest.json")), RowCountMismatchError);
}

TEST_CASE("load_dataset: missing / malformed inputs") {
    testutil::TempDir dir("loaderr");
    CHECK_THROWS_AS(load_dataset(dir.file("nope.json")), MissingFileError);

    testutil::write_file(dir.file("m1.json"), R"({"views":[{"name":"v","file":"gone.csv"}]})");
    CHECK_THROWS_AS(load_dataset(dir.file("m1.json")), MissingFileError);

    testutil::write_file(dir.file("v.csv"), "1,nan\n2,3\n");
    testutil::write_file(dir.file("m2.json"), R"({"views":[{"name":"v","file":"v.csv"}]})");
    CHECK_THROWS_AS(load_dataset(dir.file("m2.json")), NonFiniteEntryError);

    testutil::write_file(dir.file("empty.csv"), "");
    testutil::write_file(dir.file("m3.json"), R"({"views":[{"name":"v","file":"empty.csv"}]})");
    CHECK_THROWS_AS(load_dataset(dir.file("m3.json")), EmptyViewError);

    testutil::write_file(dir.file("ragged.csv"), "1,2\n3\n");
    testutil::write_file(dir.file("m4.json"), R"({"views":[{"name":"v","file":"ragged.csv"}]})");
    CHECK_THROWS_AS(load_dataset(dir.file("m4.json")), CsvFormatError);
}

TEST_CASE("load_dataset: label tokens remap to dense ids in first-appearance order") {
    testutil::TempDir dir("remap");
    testutil::write_file(dir.file("v.csv"), "1\n2\n3\n4\n");
    testutil::write_file(dir.file("labels.txt"), "zebra\napple\nzebra\nmango\n");
    testutil::write_file(dir.file("manifest.json"),
                         R"({"views":[{"name":"v","file":"v.csv"}],"labels":"labels.txt"})");
    const MultiViewDataset data = load_dataset(dir.file("manifest.json"));
    CHECK(data.labels == std::vector<int>{0, 1, 0, 2});
}

TEST_CASE("synth_multiview: shape contract and determinism") {
    const MultiViewDataset a = synth_multiview(30, 3, 2, {5, 7}, 0.1, 1);
    CHECK(a.n_views() == 2);
    CHECK(a.views[0].rows() == 30);
    CHECK(a.views[0].cols() == 5);
    CHECK(a.views[1].cols() == 7);
    std::set<int> classes(a.labels.begin(), a.labels.end());
    CHECK(classes == std::set<int>{0, 1, 2});

    const MultiViewDataset b = synth_multiview(30, 3, 2, {5, 7}, 0.1, 1);
    for (int v = 0; v < 2; ++v) {
        CHECK((a.views[v] - b.views[v]).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK(a.labels == b.labels);

    CHECK_THROWS_AS(synth_multiview(30, 3, 2, {5}, 0.1, 1), BadShapeError);
    CHECK_THROWS_AS(synth_multiview(2, 3, 1, {5}, 0.1, 1), BadShapeError);
    CHECK_THROWS_AS(synth_multiview(30, 3, 1, {1}, 0.1, 1), BadShapeError);
    CHECK_THROWS_AS(synth_multiview(30, 3, 1, {5}, -0.1, 1), BadShapeError);
}

TEST_CASE("synth_multiview: raw features give strong 1NN accuracy at the default noise") {
    const MultiViewDataset data = synth_multiview(300, 5, 3, {50, 50, 50}, 0.05, 7);
    const ReportTable raw = evaluate_views(data.views, data.labels, 10, 0.2, 0);
    for (double mean : raw.per_view_mean) {
        CHECK(mean > 0.9);
    }
}

TEST_CASE("normalize_samples") {
    Eigen::MatrixXd x(3, 2);
    x << 3, 4, 0, 0, 1, 0;
    const Eigen::MatrixXd out = normalize_samples(x);
    CHECK(out(0, 0) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(out(0, 1) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(out(1, 0) == 0.0);
    CHECK(out(1, 1) == 0.0);

    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        const double norm = out.row(i).norm();
        CHECK((std::abs(norm - 1.0) < 1e-12 || norm == 0.0));
    }

    // idempotent
    std::mt19937_64 eng(11);
    Eigen::MatrixXd r(20, 6);
    for (Eigen::Index i = 0; i < r.size(); ++i) r(i) = std::cos(static_cast<double>(i) * 1.7) * 3.0;
    const Eigen::MatrixXd once = normalize_samples(r);
    const Eigen::MatrixXd twice = normalize_samples(once);
    CHECK((twice - once).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("split_labels: counts, clamping, determinism") {
    const SplitIndices s = split_labels(10, 0.2, 0);
    CHECK(s.test.size() == 2);
    CHECK(s.train.size() == 8);
    std::set<int> all(s.train.begin(), s.train.end());
    all.insert(s.test.begin(), s.test.end());
    CHECK(all.size() == 10);

    for (std::uint64_t seed : {0, 1, 42}) {
        const SplitIndices big = split_labels(169, 0.2, seed);
        CHECK(big.test.size() == 34);
        CHECK(big.train.size() == 135);
    }

    const SplitIndices tiny = split_labels(2, 0.2, 5);
    CHECK(tiny.test.size() == 1);
    CHECK(tiny.train.size() == 1);

    const SplitIndices a = split_labels(50, 0.3, 9);
    const SplitIndices b = split_labels(50, 0.3, 9);
    CHECK(a.test == b.test);
    CHECK(a.train == b.train);

    CHECK_THROWS_AS(split_labels(10, 0.0, 0), BadFractionError);
    CHECK_THROWS_AS(split_labels(10, 1.0, 0), BadFractionError);
}

TEST_CASE("split_labels: every index lands in test at roughly the right frequency") {
    const int n = 10;
    const double fraction = 0.3;
    std::vector<int> test_hits(n, 0);
    const int trials = 1000;
    for (int seed = 0; seed < trials; ++seed) {
        for (int idx : split_labels(n, fraction, static_cast<std::uint64_t>(seed)).test) {
            ++test_hits[static_cast<std::size_t>(idx)];
        }
    }
    for (int hits : test_hits) {
        const double freq = static_cast<double>(hits) / trials;
        CHECK(std::abs(freq - fraction) < 0.1);
    }
}

TEST_CASE("MultiViewDataset::validate enforces the shared-N invariant") {
    MultiViewDataset data;
    data.name = "bad";
    data.views.push_back(Eigen::MatrixXd::Zero(3, 2));
    data.views.push_back(Eigen::MatrixXd::Zero(4, 2));
    data.view_names = {"a", "b"};
    CHECK_THROWS_AS(data.validate(), RowCountMismatchError);

    data.views[1] = Eigen::MatrixXd::Zero(3, 2);
    CHECK_NOTHROW(data.validate());

    data.labels = {0, 1};  // wrong length
    CHECK_THROWS_AS(data.validate(), RowCountMismatchError);
    data.labels = {0, 2, 2};  // class 1 missing
    CHECK_THROWS_AS(data.validate(), BadShapeError);
    data.labels = {0, 1, 1};
    CHECK_NOTHROW(data.validate());
}

TEST_CASE("csv round trip keeps 17 significant digits") {
    testutil::TempDir dir("csvrt");
    Eigen::MatrixXd m(2, 3);
    m << 1.0 / 3.0, -2.718281828459045e-7, 1e100, 0.1, -0.0, 42;
    csv::write_matrix(dir.file("m.csv"), m);
    const Eigen::MatrixXd back = csv::read_matrix(dir.file("m.csv"));
    REQUIRE(back.rows() == 2);
    REQUIRE(back.cols() == 3);
    for (Eigen::Index i = 0; i < m.size(); ++i) CHECK(back(i) == m(i));
}
