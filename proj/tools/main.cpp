// mvembed: synthesize, embed, and evaluate multi-view datasets.
//
// Commands
//   synth   write a synthetic clustered multi-view dataset
//   embed   fit an embedding (amsre by default, or a baseline) and dump it
//   eval    repeated-split 1NN accuracy report over methods x dimensions
//
// Exit codes: 0 success, 2 input/config error, 3 numeric failure.

#include <omp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "mvembed/baselines.hpp"
#include "mvembed/csv.hpp"
#include "mvembed/dataset.hpp"
#include "mvembed/embedding.hpp"
#include "mvembed/errors.hpp"
#include "mvembed/eval.hpp"
#include "mvembed/sparse_coding.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// shared plumbing

std::string join_command(int argc, char** argv) {
    std::string cmd;
    for (int i = 0; i < argc; ++i) {
        if (i) cmd += ' ';
        cmd += argv[i];
    }
    return cmd;
}

std::string fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw mvembed::MissingFileError("cannot open " + path + " for fingerprinting");
    std::uint64_t hash = 1469598103934665603ull;
    char buf[1 << 15];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 1099511628211ull;
        }
    }
    char hex[20];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
    return std::string("fnv1a64:") + hex;
}

// threads flag wins, then MVEMBED_THREADS, then the OpenMP default
void apply_thread_count(int flag_value, bool flag_given) {
    int threads = 0;
    if (flag_given) {
        threads = flag_value;
    } else if (const char* env = std::getenv("MVEMBED_THREADS")) {
        threads = std::atoi(env);
    }
    if (threads > 0) omp_set_num_threads(threads);
}

// Pre-parse --config so file values become defaults the flags then override.
json load_config_file(const std::vector<std::string>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        std::string path;
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            continue;
        }
        std::ifstream in(path);
        if (!in) throw mvembed::MissingFileError("cannot open config file " + path);
        json config;
        try {
            in >> config;
        } catch (const json::exception& e) {
            throw mvembed::ConfigError(path + ": invalid JSON: " + e.what());
        }
        return config;
    }
    return json::object();
}

template <typename T>
void maybe_set(const json& config, const char* key, T& value) {
    if (config.contains(key)) value = config[key].get<T>();
}

// CLI11's vector overload wants the arguments reversed
void parse_args(CLI::App& app, const std::vector<std::string>& args) {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
}

struct CommonOpts {
    std::uint64_t seed = 0;
    int threads = 0;
    bool verbose = false;
    std::string out;
    std::string config_path;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--seed", opts.seed, "RNG seed (default 0)");
    cmd->add_option("--threads", opts.threads, "worker threads, 0 = auto (env MVEMBED_THREADS)");
    cmd->add_flag("--verbose", opts.verbose, "chatty progress on stderr");
    cmd->add_option("--out", opts.out, "output directory")->required();
    cmd->add_option("--config", opts.config_path, "JSON config file (flags override it)");
}

void write_run_manifest(const fs::path& out_dir, const std::string& command,
                        const json& resolved_config, const json& fingerprint,
                        double duration_seconds) {
    json manifest;
    manifest["command"] = command;
    manifest["tool_version"] = kVersion;
    manifest["resolved_config"] = resolved_config;
    manifest["dataset_fingerprint"] = fingerprint;
    manifest["duration_seconds"] = duration_seconds;
    std::ofstream out(out_dir / "run_manifest.json");
    out << manifest.dump(2) << '\n';
}

json fingerprint_dataset_files(const std::string& manifest_path) {
    json fingerprint;
    fingerprint[fs::path(manifest_path).filename().string()] = fnv1a_file(manifest_path);
    std::ifstream in(manifest_path);
    json manifest;
    in >> manifest;
    const fs::path base = fs::path(manifest_path).parent_path();
    for (const auto& view : manifest["views"]) {
        const std::string file = view.at("file").get<std::string>();
        fingerprint[file] = fnv1a_file((base / file).string());
    }
    if (manifest.contains("labels") && !manifest["labels"].is_null()) {
        const std::string file = manifest["labels"].get<std::string>();
        fingerprint[file] = fnv1a_file((base / file).string());
    }
    return fingerprint;
}

// optimizer knobs shared by embed and eval
struct FitOpts {
    double lambda = 0.5;
    double r = 2.0;
    double gamma_rel = 0.1;
    double lasso_tol = 1e-7;
    int lasso_max_iter = 1000;
    int max_outer_iter = 100;
    double conv_tol = 1e-6;
    bool positive_coupling = false;
};

void add_fit_options(CLI::App* cmd, FitOpts& opts) {
    cmd->add_option("--lambda", opts.lambda, "coupling strength (default 0.5)");
    cmd->add_option("--r", opts.r, "weight exponent > 1 (default 2)");
    cmd->add_option("--gamma-rel", opts.gamma_rel, "relative L1 penalty (default 0.1)");
    cmd->add_option("--lasso-tol", opts.lasso_tol, "lasso sweep tolerance (default 1e-7)");
    cmd->add_option("--lasso-max-iter", opts.lasso_max_iter, "lasso sweep cap (default 1000)");
    cmd->add_option("--max-iter", opts.max_outer_iter, "outer iteration cap (default 100)");
    cmd->add_option("--conv-tol", opts.conv_tol, "relative objective-change threshold");
    cmd->add_flag("--coupling-plus", opts.positive_coupling,
                  "debug: flip the coupling sign so agreement is penalized");
}

void apply_fit_config_file(const json& config, FitOpts& opts) {
    maybe_set(config, "lambda", opts.lambda);
    maybe_set(config, "r", opts.r);
    maybe_set(config, "gamma_rel", opts.gamma_rel);
    maybe_set(config, "lasso_tol", opts.lasso_tol);
    maybe_set(config, "lasso_max_iter", opts.lasso_max_iter);
    maybe_set(config, "max_outer_iter", opts.max_outer_iter);
    maybe_set(config, "conv_tol", opts.conv_tol);
    maybe_set(config, "positive_coupling", opts.positive_coupling);
}

mvembed::AmsreConfig make_config(const FitOpts& opts, int dim, std::uint64_t seed) {
    mvembed::AmsreConfig config;
    config.d = dim;
    config.lambda = opts.lambda;
    config.r = opts.r;
    config.lasso.gamma_rel = opts.gamma_rel;
    config.lasso.tol = opts.lasso_tol;
    config.lasso.max_iter = opts.lasso_max_iter;
    config.max_outer_iter = opts.max_outer_iter;
    config.conv_tol = opts.conv_tol;
    config.seed = seed;
    config.positive_coupling = opts.positive_coupling;
    return config;
}

json fit_config_json(const FitOpts& opts, int dim, const CommonOpts& common,
                     const std::string& method) {
    json config;
    config["method"] = method;
    config["dim"] = dim;
    config["lambda"] = opts.lambda;
    config["r"] = opts.r;
    config["gamma_rel"] = opts.gamma_rel;
    config["lasso_tol"] = opts.lasso_tol;
    config["lasso_max_iter"] = opts.lasso_max_iter;
    config["max_outer_iter"] = opts.max_outer_iter;
    config["conv_tol"] = opts.conv_tol;
    config["positive_coupling"] = opts.positive_coupling;
    config["seed"] = common.seed;
    config["threads"] = common.threads;
    return config;
}

void write_embedding_outputs(const fs::path& dir, const mvembed::MultiViewDataset& data,
                             const mvembed::EmbeddingResult& result, const json& config_echo) {
    fs::create_directories(dir);
    for (int v = 0; v < data.n_views(); ++v) {
        mvembed::csv::write_matrix(
            (dir / ("view_" + data.view_names[static_cast<std::size_t>(v)] + "_embedding.csv"))
                .string(),
            result.embeddings[static_cast<std::size_t>(v)]);
    }

    std::ofstream weights(dir / "weights.csv");
    for (Eigen::Index v = 0; v < result.weights.alphas.size(); ++v) {
        weights << mvembed::csv::format_double(result.weights.alphas(v)) << '\n';
    }
    weights << mvembed::csv::format_double(result.weights.r) << '\n';

    std::ofstream trace(dir / "trace.csv");
    for (const auto& entry : result.objective_trace) {
        trace << entry.iteration << ',' << mvembed::csv::format_double(entry.objective);
        for (Eigen::Index v = 0; v < entry.alphas.size(); ++v) {
            trace << ',' << mvembed::csv::format_double(entry.alphas(v));
        }
        trace << '\n';
    }

    json result_json;
    result_json["config"] = config_echo;
    result_json["converged"] = result.converged;
    result_json["iterations_used"] = result.iterations_used;
    result_json["lasso_rows_not_converged"] = result.lasso_rows_not_converged;
    result_json["final_objective"] = result.objective_trace.back().objective;
    std::ofstream rj(dir / "result.json");
    rj << result_json.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// synth

int cmd_synth(const std::vector<std::string>& args, const std::string& command_echo) {
    CommonOpts common;
    int samples = 100, clusters = 3, views = 2;
    double noise = 0.05;
    std::vector<int> dims;
    std::string name;

    CLI::App app{"write a synthetic clustered multi-view dataset"};
    add_common(&app, common);
    app.add_option("--samples", samples, "sample count");
    app.add_option("--clusters", clusters, "cluster count");
    app.add_option("--views", views, "view count");
    app.add_option("--dims", dims, "per-view feature dimensions, e.g. 5,7")->delimiter(',');
    app.add_option("--noise", noise, "noise sigma (default 0.05)");
    app.add_option("--name", name, "dataset name (default synth-...)");

    const json file_config = load_config_file(args);
    maybe_set(file_config, "samples", samples);
    maybe_set(file_config, "clusters", clusters);
    maybe_set(file_config, "views", views);
    maybe_set(file_config, "dims", dims);
    maybe_set(file_config, "noise", noise);
    maybe_set(file_config, "seed", common.seed);

    try {
        parse_args(app, args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (dims.empty()) {
        std::cerr << "error: --dims is required (flag or config file)\n";
        return 2;
    }
    if (static_cast<int>(dims.size()) != views) {
        std::cerr << "error: --dims lists " << dims.size() << " entries but --views is " << views
                  << "\n";
        return 2;
    }

    const auto start = std::chrono::steady_clock::now();
    apply_thread_count(common.threads, app.count("--threads") > 0);

    mvembed::MultiViewDataset data =
        mvembed::synth_multiview(samples, clusters, views, dims, noise, common.seed);
    if (!name.empty()) data.name = name;

    const fs::path out_dir(common.out);
    fs::create_directories(out_dir);

    json manifest;
    manifest["name"] = data.name;
    manifest["views"] = json::array();
    json fingerprint;
    for (int v = 0; v < views; ++v) {
        const std::string file = data.view_names[static_cast<std::size_t>(v)] + ".csv";
        mvembed::csv::write_matrix((out_dir / file).string(),
                                   data.views[static_cast<std::size_t>(v)]);
        manifest["views"].push_back({{"name", data.view_names[static_cast<std::size_t>(v)]},
                                     {"file", file}});
        fingerprint[file] = fnv1a_file((out_dir / file).string());
    }
    {
        std::ofstream labels(out_dir / "labels.csv");
        for (int label : data.labels) labels << label << '\n';
    }
    fingerprint["labels.csv"] = fnv1a_file((out_dir / "labels.csv").string());
    manifest["labels"] = "labels.csv";
    {
        std::ofstream mf(out_dir / "manifest.json");
        mf << manifest.dump(2) << '\n';
    }
    fingerprint["manifest.json"] = fnv1a_file((out_dir / "manifest.json").string());

    json resolved;
    resolved["samples"] = samples;
    resolved["clusters"] = clusters;
    resolved["views"] = views;
    resolved["dims"] = dims;
    resolved["noise"] = noise;
    resolved["seed"] = common.seed;
    resolved["threads"] = common.threads;

    const double duration =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_run_manifest(out_dir, command_echo, resolved, fingerprint, duration);

    if (common.verbose) {
        std::cerr << "synth: wrote " << views << " views x " << samples << " samples to "
                  << out_dir << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// embed

int cmd_embed(const std::vector<std::string>& args, const std::string& command_echo) {
    CommonOpts common;
    FitOpts fit;
    std::string data_path, method = "amsre";
    int dim = 0;
    bool dump_graphs = false;

    CLI::App app{"fit an embedding and write it out"};
    add_common(&app, common);
    add_fit_options(&app, fit);
    app.add_option("--data", data_path, "dataset manifest JSON");
    app.add_option("--dim", dim, "target dimension");
    app.add_option("--method", method, "amsre | uniform | spp (default amsre)");
    app.add_flag("--dump-graphs", dump_graphs, "also write per-view S and M matrices");

    const json file_config = load_config_file(args);
    apply_fit_config_file(file_config, fit);
    maybe_set(file_config, "method", method);
    maybe_set(file_config, "dim", dim);
    maybe_set(file_config, "seed", common.seed);
    maybe_set(file_config, "threads", common.threads);

    try {
        parse_args(app, args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (data_path.empty()) {
        std::cerr << "error: --data is required (flag or config file)\n";
        return 2;
    }
    if (dim < 1) {
        std::cerr << "error: --dim is required and must be >= 1\n";
        return 2;
    }

    const auto start = std::chrono::steady_clock::now();
    apply_thread_count(common.threads, app.count("--threads") > 0);

    const mvembed::Method method_id = mvembed::parse_method(method);
    const mvembed::MultiViewDataset data = mvembed::load_dataset(data_path);
    const mvembed::AmsreConfig config = make_config(fit, dim, common.seed);

    mvembed::EmbeddingResult result;
    switch (method_id) {
        case mvembed::Method::amsre: result = mvembed::fit_amsre(data, config); break;
        case mvembed::Method::uniform: result = mvembed::uniform_multiview(data, config); break;
        case mvembed::Method::spp: result = mvembed::spp_all_views(data, config); break;
    }
    if (result.lasso_rows_not_converged > 0) {
        std::cerr << "warning: " << result.lasso_rows_not_converged
                  << " lasso rows hit the sweep cap\n";
    }

    const fs::path out_dir(common.out);
    // baselines land in a method-tagged subdirectory, the default method in
    // the output directory itself
    const fs::path target =
        method_id == mvembed::Method::amsre ? out_dir : out_dir / method;

    const json config_echo = fit_config_json(fit, dim, common, method);
    write_embedding_outputs(target, data, result, config_echo);

    if (dump_graphs) {
        for (int v = 0; v < data.n_views(); ++v) {
            const Eigen::MatrixXd normalized =
                mvembed::normalize_samples(data.views[static_cast<std::size_t>(v)]);
            const mvembed::SparseGraph graph = mvembed::sparse_graph(normalized, config.lasso, v);
            const std::string tag = data.view_names[static_cast<std::size_t>(v)];
            mvembed::csv::write_matrix((target / ("S_" + tag + ".csv")).string(),
                                       graph.coefficients);
            mvembed::csv::write_matrix((target / ("M_" + tag + ".csv")).string(),
                                       mvembed::reconstruction_matrix(graph));
        }
    }

    const double duration =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_run_manifest(out_dir, command_echo, config_echo, fingerprint_dataset_files(data_path),
                       duration);

    if (common.verbose) {
        std::cerr << "embed: " << method << " on " << data.name << " converged="
                  << (result.converged ? "yes" : "no") << " iterations="
                  << result.iterations_used << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// eval

std::string percent(double value) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.2f%%", value * 100.0);
    return buf;
}

int cmd_eval(const std::vector<std::string>& args, const std::string& command_echo) {
    CommonOpts common;
    FitOpts fit;
    std::string data_path;
    std::vector<int> dims;
    std::vector<std::string> methods = {"amsre"};
    int repeats = 20;
    double test_fraction = 0.2;

    CLI::App app{"repeated-split 1NN accuracy over methods x dimensions"};
    add_common(&app, common);
    add_fit_options(&app, fit);
    app.add_option("--data", data_path, "dataset manifest JSON");
    app.add_option("--dims", dims, "target dimensions, e.g. 10,30,50")->delimiter(',');
    app.add_option("--methods", methods, "subset of amsre,uniform,spp")->delimiter(',');
    app.add_option("--repeats", repeats, "split repetitions (default 20)");
    app.add_option("--test-fraction", test_fraction, "held-out fraction (default 0.2)");

    const json file_config = load_config_file(args);
    apply_fit_config_file(file_config, fit);
    maybe_set(file_config, "dims", dims);
    maybe_set(file_config, "methods", methods);
    maybe_set(file_config, "repeats", repeats);
    maybe_set(file_config, "test_fraction", test_fraction);
    maybe_set(file_config, "seed", common.seed);
    maybe_set(file_config, "threads", common.threads);

    try {
        parse_args(app, args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (data_path.empty()) {
        std::cerr << "error: --data is required (flag or config file)\n";
        return 2;
    }
    if (dims.empty()) {
        std::cerr << "error: --dims is required (flag or config file)\n";
        return 2;
    }

    const auto start = std::chrono::steady_clock::now();
    apply_thread_count(common.threads, app.count("--threads") > 0);

    const mvembed::MultiViewDataset data = mvembed::load_dataset(data_path);
    if (!data.has_labels()) {
        std::cerr << "error: dataset " << data.name << " has no labels\n";
        return 2;
    }
    if (repeats < 1) {
        std::cerr << "error: --repeats must be >= 1\n";
        return 2;
    }

    std::vector<mvembed::ReportTable> tables;
    for (const std::string& method : methods) {
        const mvembed::Method method_id = mvembed::parse_method(method);
        for (int dim : dims) {
            const mvembed::AmsreConfig config = make_config(fit, dim, common.seed);
            tables.push_back(mvembed::run_experiment(data, method_id, config, repeats,
                                                     test_fraction, common.seed));
            if (common.verbose) {
                std::cerr << "eval: " << method << " dim=" << dim
                          << " best mean=" << percent(tables.back().best_view_mean) << "\n";
            }
        }
    }

    const fs::path out_dir(common.out);
    fs::create_directories(out_dir);

    // CSV: one row per method x dimension
    {
        std::ofstream out(out_dir / "report.csv");
        out << "method,dim,repeats";
        for (const auto& name : data.view_names) out << ",mean_" << name << ",max_" << name;
        out << ",best_view_mean,best_view_max\n";
        for (const auto& t : tables) {
            out << t.method << ',' << t.dimension << ',' << t.repeats;
            for (std::size_t v = 0; v < t.per_view_mean.size(); ++v) {
                out << ',' << mvembed::csv::format_double(t.per_view_mean[v]) << ','
                    << mvembed::csv::format_double(t.per_view_max[v]);
            }
            out << ',' << mvembed::csv::format_double(t.best_view_mean) << ','
                << mvembed::csv::format_double(t.best_view_max) << '\n';
        }
    }

    // aligned text table: methods as columns, one Mean/Max row pair per dim
    {
        std::ofstream out(out_dir / "report.txt");
        out << "dataset: " << data.name << "  views: " << data.n_views()
            << "  repeats: " << repeats << "  test fraction: " << test_fraction << "\n\n";
        char line[256];
        std::snprintf(line, sizeof(line), "%-14s", "");
        out << line;
        for (const auto& method : methods) {
            std::snprintf(line, sizeof(line), "%12s", method.c_str());
            out << line;
        }
        out << '\n';
        for (int dim : dims) {
            for (const char* stat : {"Mean", "Max"}) {
                std::snprintf(line, sizeof(line), "Dim=%-5d %-4s", dim, stat);
                out << line;
                for (const auto& method : methods) {
                    const auto it = std::find_if(tables.begin(), tables.end(), [&](const auto& t) {
                        return t.method == method && t.dimension == dim;
                    });
                    const double value = std::string(stat) == "Mean" ? it->best_view_mean
                                                                     : it->best_view_max;
                    std::snprintf(line, sizeof(line), "%12s", percent(value).c_str());
                    out << line;
                }
                out << '\n';
            }
        }
    }

    json resolved = fit_config_json(fit, dims.front(), common, methods.front());
    resolved.erase("method");
    resolved.erase("dim");
    resolved["methods"] = methods;
    resolved["dims"] = dims;
    resolved["repeats"] = repeats;
    resolved["test_fraction"] = test_fraction;

    const double duration =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_run_manifest(out_dir, command_echo, resolved, fingerprint_dataset_files(data_path),
                       duration);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string command_echo = join_command(argc, argv);
    if (argc < 2) {
        std::cerr << "usage: mvembed <synth|embed|eval> [flags]\n"
                  << "       mvembed <command> --help\n";
        return 2;
    }
    const std::string command = argv[1];
    std::vector<std::string> args(argv + 2, argv + argc);

    try {
        if (command == "synth") return cmd_synth(args, command_echo);
        if (command == "embed") return cmd_embed(args, command_echo);
        if (command == "eval") return cmd_eval(args, command_echo);
        if (command == "--version" || command == "version") {
            std::cout << "mvembed " << kVersion << "\n";
            return 0;
        }
        std::cerr << "error: unknown command '" << command << "'\n";
        return 2;
    } catch (const mvembed::EigenFailureError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const mvembed::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
}
