#include "ipp/cli.hpp"

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "ipp/errors.hpp"
#include "ipp/harness.hpp"

namespace ipp {

namespace {

constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

struct Options {
    std::string config;
    std::string out;
    std::string methods = "rmcts,mcts,ncmcts";
    std::optional<std::uint64_t> seed;
    std::optional<int> runs;
    std::optional<int> iterations;
    std::optional<int> artifact_runs;
};

std::vector<Method> parse_methods(const std::string& list) {
    std::vector<Method> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(parse_method(item));
    }
    if (out.empty()) throw ConfigError("methods", "at least one method is required");
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

int execute(const Options& opt, bool compare) {
    ExperimentConfig config;
    std::vector<Method> methods;
    try {
        config = parse_config(std::filesystem::path(opt.config));
        if (opt.seed) config.base_seed = *opt.seed;
        if (opt.runs) config.runs = *opt.runs;
        if (opt.iterations) config.planner.iterations = *opt.iterations;
        config.validate();
        methods = compare ? parse_methods(opt.methods) : std::vector<Method>{config.method};
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    }

    try {
        const std::filesystem::path out(opt.out);
        std::filesystem::create_directories(out);
        auto batches = compare_methods(config, methods);

        write_file(out / "metrics.json", batch_metrics_json(batches).dump(2) + "\n");
        nlohmann::json timing = nlohmann::json::array();
        for (const auto& b : batches) {
            timing.push_back({{"method", b.row.method}, {"wall_clock_seconds", b.row.wall_clock_seconds}});
        }
        write_file(out / "timing.json", timing.dump(2) + "\n");

        const int emit = opt.artifact_runs.value_or(config.runs);
        for (const auto& b : batches) {
            for (int i = 0; i < emit && i < static_cast<int>(b.missions.size()); ++i) {
                std::string lower = b.row.method;
                for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
                emit_artifacts(b.missions[i], out / lower / ("seed_" + std::to_string(b.summaries[i].seed)));
            }
        }

        for (const auto& b : batches) {
            const auto& r = b.row;
            std::cout << r.method << "  B=" << r.budget << "  robots=" << r.team_size << "  runs=" << r.runs
                      << "  mse=" << r.mean_mse << "  B_re=" << r.mean_remaining_budget << "  stranded=" << r.stranded
                      << "  time=" << r.wall_clock_seconds << "s\n";
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Budget-constrained multi-robot online sampling simulator"};
    app.require_subcommand(1);

    Options opt;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "Experiment config (JSON)")->required();
        sub->add_option("--out", opt.out, "Output directory")->required();
        sub->add_option("--seed", opt.seed, "Override base_seed");
        sub->add_option("--runs", opt.runs, "Override the run count");
        sub->add_option("--iterations", opt.iterations, "Override planner iterations per step");
        sub->add_option("--artifact-runs", opt.artifact_runs, "Emit per-mission artifacts for the first N runs");
    };
    auto* run = app.add_subcommand("run", "Run a batch with the configured method");
    add_common(run);
    auto* cmp = app.add_subcommand("compare", "Run several methods on paired seeds");
    add_common(cmp);
    cmp->add_option("--methods", opt.methods, "Comma-separated list of rmcts,mcts,ncmcts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }
    return execute(opt, cmp->parsed());
}

}  // namespace ipp
