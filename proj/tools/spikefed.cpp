// spikefed: ingest -> train -> compare pipeline for federated SNN benchmarking.
//
// Exit status: 0 success, 1 invalid configuration or arguments, 2 data error
// (missing or malformed files), 3 any other runtime failure.

#include "spikefed/experiment/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

enum Exit : int { kOk = 0, kValidation = 1, kData = 2, kRuntime = 3 };

using namespace spikefed;

struct Common {
    std::string config_path;
    std::vector<std::string> overrides;
    bool synthetic = false;
    std::string output;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("-c,--config", c.config_path, "JSON config file; built-in defaults when omitted");
    cmd->add_option("--set", c.overrides, "override a config key, e.g. --set federated.rounds=10");
    cmd->add_flag("--synthetic", c.synthetic, "generate seeded surrogate EEG instead of reading dataset files");
    cmd->add_option("-o,--output", c.output, "output directory");
    cmd->add_option("--seed", c.seed, "master seed");
}

experiment::ExperimentConfig resolve(const Common& c) {
    auto cfg = c.config_path.empty() ? experiment::parse_config("{}", c.overrides)
                                     : experiment::load_config(c.config_path, c.overrides);
    if (c.synthetic) cfg.dataset.synthetic = true;
    if (!c.output.empty()) cfg.output = c.output;
    if (c.seed) cfg.seed = c.seed;
    experiment::apply_environment(cfg);
    return cfg;
}

void log_line(const std::string& s) { std::cerr << s << std::endl; }

int run(int argc, char** argv) {
    CLI::App app{"Federated spiking-network benchmarking on EEG motor imagery"};
    app.require_subcommand(1);
    app.set_version_flag("--version", experiment::toolkit_version());

    Common ingest_opts, train_opts, compare_opts, config_opts;
    auto* ingest = app.add_subcommand("ingest", "parse EDF files, cut trials, split and normalize into a cache");
    add_common(ingest, ingest_opts);

    auto* train = app.add_subcommand("train", "federated training of one method from the ingest cache");
    add_common(train, train_opts);
    std::vector<std::string> methods;
    train->add_option("-m,--method", methods, "snn, cnn, lstm or all (default: model.kind)")
        ->check(CLI::IsMember({"snn", "cnn", "lstm", "all"}));

    auto* compare = app.add_subcommand("compare", "energy and WSP report over the snn, cnn and lstm runs");
    add_common(compare, compare_opts);

    auto* inspect = app.add_subcommand("inspect", "describe a checkpoint, cache, report, metrics or EDF file");
    std::string inspect_path;
    inspect->add_option("path", inspect_path, "file or directory")->required();

    auto* show = app.add_subcommand("config", "print the resolved configuration");
    add_common(show, config_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }

    if (*ingest) {
        auto cfg = resolve(ingest_opts);
        auto res = experiment::cmd_ingest(cfg, log_line);
        std::cout << res.summary;
    } else if (*train) {
        auto cfg = resolve(train_opts);
        std::vector<models::ModelKind> kinds;
        if (methods.empty()) kinds.push_back(cfg.model);
        for (const auto& m : methods) {
            if (m == "all")
                kinds.insert(kinds.end(), {models::ModelKind::Snn, models::ModelKind::Cnn, models::ModelKind::Lstm});
            else
                kinds.push_back(models::parse_model_kind(m));
        }
        for (auto k : kinds) {
            auto res = experiment::cmd_train(cfg, k, log_line);
            std::cout << models::to_string(k) << ": accuracy " << res.accuracy << ", " << res.energy_joules
                      << " J per inference, results in " << res.dir.string() << "\n";
        }
    } else if (*compare) {
        auto cfg = resolve(compare_opts);
        auto res = experiment::cmd_compare(cfg, log_line);
        std::cout << res.table;
    } else if (*inspect) {
        std::cout << experiment::cmd_inspect(inspect_path);
    } else if (*show) {
        std::cout << experiment::to_json_text(resolve(config_opts)) << "\n";
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const spikefed::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const spikefed::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kData;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return kRuntime;
    }
}
