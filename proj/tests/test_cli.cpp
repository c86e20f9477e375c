#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

const char* cli_path() { return MVEMBED_CLI_PATH; }

int run_cli(const std::string& args) {
    const std::string cmd = std::string(cli_path()) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    return fields;
}

}  // namespace

TEST_CASE("cli synth: writes the dataset directory, reruns byte-identical") {
    testutil::TempDir dir("clisynth");
    const std::string out1 = dir.file("d1");
    const std::string out2 = dir.file("d2");
    const std::string flags = "--samples 30 --clusters 3 --views 2 --dims 5,7 --seed 1";

    REQUIRE(run_cli("synth --out " + out1 + " " + flags) == 0);
    REQUIRE(run_cli("synth --out " + out2 + " " + flags) == 0);

    for (const char* name : {"view0.csv", "view1.csv", "labels.csv", "manifest.json"}) {
        CAPTURE(name);
        REQUIRE(fs::exists(fs::path(out1) / name));
        CHECK(testutil::read_file((fs::path(out1) / name).string()) ==
              testutil::read_file((fs::path(out2) / name).string()));
    }
    CHECK(fs::exists(fs::path(out1) / "run_manifest.json"));

    // 30 rows in each view file
    std::ifstream view((fs::path(out1) / "view0.csv").string());
    int rows = 0;
    std::string line;
    while (std::getline(view, line)) ++rows;
    CHECK(rows == 30);
}

TEST_CASE("cli synth: dims/views mismatch exits 2 and names the flag") {
    testutil::TempDir dir("clisynthbad");
    const std::string cmd = std::string(cli_path()) + " synth --out " + dir.file("d") +
                            " --samples 10 --clusters 2 --views 2 --dims 5 2>" +
                            dir.file("err.txt");
    const int status = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(status) == 2);
    const std::string err = testutil::read_file(dir.file("err.txt"));
    CHECK(err.find("--dims") != std::string::npos);
}

TEST_CASE("cli embed: output layout, config validation, monotone trace") {
    testutil::TempDir dir("cliembed");
    const std::string data = dir.file("data");
    REQUIRE(run_cli("synth --out " + data + " --samples 25 --clusters 3 --views 2 --dims 6,8 --seed 3") == 0);
    const std::string manifest = (fs::path(data) / "manifest.json").string();

    const std::string out = dir.file("emb");
    REQUIRE(run_cli("embed --data " + manifest + " --dim 2 --lambda 0.5 --r 2 --out " + out) == 0);

    for (const char* name :
         {"view_view0_embedding.csv", "view_view1_embedding.csv", "weights.csv", "trace.csv",
          "result.json", "run_manifest.json"}) {
        CAPTURE(name);
        CHECK(fs::exists(fs::path(out) / name));
    }

    // dimension beyond the smallest view is a config error
    CHECK(run_cli("embed --data " + manifest + " --dim 5000 --out " + dir.file("x")) == 2);
    // missing dataset
    CHECK(run_cli("embed --data " + dir.file("nope.json") + " --dim 2 --out " + dir.file("y")) == 2);
    // bad flag
    CHECK(run_cli("embed --data " + manifest + " --dim 2 --out " + dir.file("z") + " --bogus") == 2);

    // objective column of trace.csv never increases
    std::ifstream trace((fs::path(out) / "trace.csv").string());
    std::string line;
    double previous = 0.0;
    bool first = true;
    int rows = 0;
    while (std::getline(trace, line)) {
        const auto fields = split_csv_line(line);
        REQUIRE(fields.size() >= 4);  // iteration, objective, two alphas
        const double objective = std::stod(fields[1]);
        if (!first) {
            CHECK(objective <= previous + 1e-9 * std::max(1.0, std::abs(previous)));
        }
        previous = objective;
        first = false;
        ++rows;
    }
    CHECK(rows >= 2);

    // weights.csv: one alpha per view plus the exponent
    std::ifstream weights((fs::path(out) / "weights.csv").string());
    std::vector<double> values;
    while (std::getline(weights, line)) values.push_back(std::stod(line));
    REQUIRE(values.size() == 3);
    CHECK(std::abs(values[0] + values[1] - 1.0) < 1e-12);
    CHECK(values[2] == 2.0);
}

TEST_CASE("cli embed: baseline methods write method-tagged subdirectories") {
    testutil::TempDir dir("clibase");
    const std::string data = dir.file("data");
    REQUIRE(run_cli("synth --out " + data + " --samples 20 --clusters 2 --views 2 --dims 5,6 --seed 4") == 0);
    const std::string manifest = (fs::path(data) / "manifest.json").string();

    const std::string out = dir.file("emb");
    REQUIRE(run_cli("embed --data " + manifest + " --dim 2 --method spp --out " + out) == 0);
    CHECK(fs::exists(fs::path(out) / "spp" / "view_view0_embedding.csv"));
    CHECK(fs::exists(fs::path(out) / "spp" / "weights.csv"));

    REQUIRE(run_cli("embed --data " + manifest + " --dim 2 --method uniform --out " + out) == 0);
    CHECK(fs::exists(fs::path(out) / "uniform" / "trace.csv"));
}

TEST_CASE("cli embed: graph dump flag") {
    testutil::TempDir dir("clidump");
    const std::string data = dir.file("data");
    REQUIRE(run_cli("synth --out " + data + " --samples 12 --clusters 2 --views 1 --dims 5 --seed 5") == 0);
    const std::string out = dir.file("emb");
    REQUIRE(run_cli("embed --data " + (fs::path(data) / "manifest.json").string() +
                    " --dim 2 --dump-graphs --out " + out) == 0);
    CHECK(fs::exists(fs::path(out) / "S_view0.csv"));
    CHECK(fs::exists(fs::path(out) / "M_view0.csv"));
}

TEST_CASE("cli eval: report shape, determinism, label requirement") {
    testutil::TempDir dir("clieval");
    const std::string data = dir.file("data");
    REQUIRE(run_cli("synth --out " + data + " --samples 40 --clusters 3 --views 2 --dims 8,9 --seed 6") == 0);
    const std::string manifest = (fs::path(data) / "manifest.json").string();

    const std::string out1 = dir.file("r1");
    REQUIRE(run_cli("eval --data " + manifest +
                    " --dims 2,3 --methods spp,uniform --repeats 4 --seed 5 --out " + out1) == 0);

    const std::string report = testutil::read_file((fs::path(out1) / "report.csv").string());
    std::stringstream ss(report);
    std::string line;
    REQUIRE(std::getline(ss, line));
    const auto header = split_csv_line(line);
    CHECK(header[0] == "method");
    CHECK(header[1] == "dim");
    // per-view mean/max columns plus the best-view pair
    CHECK(std::count(header.begin(), header.end(), "best_view_mean") == 1);
    CHECK(std::count(header.begin(), header.end(), "best_view_max") == 1);
    int rows = 0;
    while (std::getline(ss, line)) {
        if (!line.empty()) ++rows;
    }
    CHECK(rows == 4);  // 2 methods x 2 dims
    CHECK(fs::exists(fs::path(out1) / "report.txt"));

    // identical bytes on a rerun
    const std::string out2 = dir.file("r2");
    REQUIRE(run_cli("eval --data " + manifest +
                    " --dims 2,3 --methods spp,uniform --repeats 4 --seed 5 --out " + out2) == 0);
    CHECK(testutil::read_file((fs::path(out1) / "report.csv").string()) ==
          testutil::read_file((fs::path(out2) / "report.csv").string()));

    // repeats=1 makes the mean and max columns coincide
    const std::string out3 = dir.file("r3");
    REQUIRE(run_cli("eval --data " + manifest + " --dims 2 --methods spp --repeats 1 --out " +
                    out3) == 0);
    std::stringstream ss3(testutil::read_file((fs::path(out3) / "report.csv").string()));
    std::getline(ss3, line);
    std::getline(ss3, line);
    const auto fields = split_csv_line(line);
    CHECK(fields[3] == fields[4]);  // mean_view0 == max_view0
    CHECK(fields[5] == fields[6]);

    // unlabeled dataset is an input error
    const std::string bare = dir.file("bare");
    fs::create_directories(bare);
    testutil::write_file((fs::path(bare) / "v.csv").string(), "1,2\n3,4\n5,6\n");
    testutil::write_file((fs::path(bare) / "manifest.json").string(),
                         R"({"views":[{"name":"v","file":"v.csv"}]})");
    CHECK(run_cli("eval --data " + (fs::path(bare) / "manifest.json").string() +
                  " --dims 1 --methods spp --repeats 1 --out " + dir.file("r4")) == 2);
}

TEST_CASE("cli: thread count does not change any output byte") {
    testutil::TempDir dir("clithreads");
    const std::string data = dir.file("data");
    REQUIRE(run_cli("synth --out " + data + " --samples 30 --clusters 3 --views 2 --dims 7,8 --seed 7") == 0);
    const std::string manifest = (fs::path(data) / "manifest.json").string();

    const std::string t1 = dir.file("t1");
    const std::string t4 = dir.file("t4");
    const std::string flags = " --dims 2 --methods amsre,spp --repeats 3 --seed 2 --out ";
    REQUIRE(run_cli("eval --data " + manifest + flags + t1 + " --threads 1") == 0);
    REQUIRE(run_cli("eval --data " + manifest + flags + t4 + " --threads 4") == 0);
    CHECK(testutil::read_file((fs::path(t1) / "report.csv").string()) ==
          testutil::read_file((fs::path(t4) / "report.csv").string()));
}

TEST_CASE("cli: config file supplies defaults, flags override") {
    testutil::TempDir dir("cliconfig");
    const std::string data = dir.file("data");
    REQUIRE(run_cli("synth --out " + data + " --samples 20 --clusters 2 --views 2 --dims 5,6 --seed 8") == 0);
    const std::string manifest = (fs::path(data) / "manifest.json").string();

    testutil::write_file(dir.file("cfg.json"), R"({"dim": 2, "lambda": 0.25, "r": 3.0})");

    const std::string out = dir.file("emb");
    REQUIRE(run_cli("embed --data " + manifest + " --config " + dir.file("cfg.json") +
                    " --r 2.0 --out " + out) == 0);

    const std::string result = testutil::read_file((fs::path(out) / "result.json").string());
    CHECK(result.find("\"lambda\": 0.25") != std::string::npos);  // from the file
    CHECK(result.find("\"r\": 2.0") != std::string::npos);        // flag wins
    CHECK(result.find("\"dim\": 2") != std::string::npos);
}
