#include <chrono>
#include <exception>
#include <string>

#include "ipp/errors.hpp"
#include "ipp/harness.hpp"

namespace ipp {

using nlohmann::json;

RunSetup make_run_setup(const ExperimentConfig& config, std::uint64_t run_seed) {
    Rng pool_rng(derive_seed(run_seed, Stream::pool));
    auto pool = initial_locations(config.grid, config.n_locations, pool_rng);
    if (config.field.kind == FieldConfig::Kind::raster) return {Field(*config.field.raster), std::move(pool)};
    if (!config.field.components.empty()) return {Field(MixtureField(config.grid, config.field.components)), std::move(pool)};
    Rng field_rng(derive_seed(run_seed, Stream::field));
    return {Field(random_mixture(config.grid, config.field.mixture, field_rng)), std::move(pool)};
}

BatchResult run_batch(const ExperimentConfig& config, Execution exec) {
    config.validate();
    const auto started = std::chrono::steady_clock::now();
    const auto mission = config.mission();
    const int runs = config.runs;

    BatchResult out;
    out.missions.resize(static_cast<std::size_t>(runs));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(runs));

    auto one = [&](int i) {
        try {
            const std::uint64_t seed = config.base_seed + static_cast<std::uint64_t>(i);
            auto setup = make_run_setup(config, seed);
            out.missions[i] = run_mission(mission, setup.field, setup.pool, seed);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (int i = 0; i < runs; ++i) one(i);
    } else {
        for (int i = 0; i < runs; ++i) one(i);
    }

    for (int i = 0; i < runs; ++i) {
        if (!errors[i]) continue;
        const auto seed = std::to_string(config.base_seed + static_cast<std::uint64_t>(i));
        try {
            std::rethrow_exception(errors[i]);
        } catch (const std::exception& e) {
            throw std::runtime_error("run with seed " + seed + " failed: " + e.what());
        }
    }

    auto& row = out.row;
    row.method = method_name(config.method);
    row.budget = config.budget;
    row.team_size = static_cast<int>(config.robots.size());
    row.runs = runs;
    for (int i = 0; i < runs; ++i) {
        const auto& m = out.missions[i];
        RunSummary s{config.base_seed + static_cast<std::uint64_t>(i), m.mse, m.mean_remaining_budget(),
                     m.stranded_count()};
        row.mean_mse += s.mse;
        row.mean_remaining_budget += s.mean_remaining_budget;
        row.stranded += s.stranded;
        out.summaries.push_back(s);
    }
    row.mean_mse /= runs;
    row.mean_remaining_budget /= runs;
    row.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return out;
}

std::vector<BatchResult> compare_methods(const ExperimentConfig& config, const std::vector<Method>& methods,
                                         Execution exec) {
    if (methods.empty()) throw ConfigError("methods", "at least one method is required");
    std::vector<BatchResult> out;
    for (auto m : methods) {
        auto c = config;
        c.method = m;
        out.push_back(run_batch(c, exec));
    }
    return out;
}

json to_json(const MetricsRow& row, bool include_timing) {
    json j = {{"method", row.method},
              {"budget", row.budget},
              {"team_size", row.team_size},
              {"runs", row.runs},
              {"mean_mse", row.mean_mse},
              {"mean_remaining_budget", row.mean_remaining_budget},
              {"stranded", row.stranded}};
    if (include_timing) j["wall_clock_seconds"] = row.wall_clock_seconds;
    return j;
}

MetricsRow metrics_row_from_json(const json& j) {
    MetricsRow row;
    row.method = j.at("method").get<std::string>();
    row.budget = j.at("budget").get<double>();
    row.team_size = j.at("team_size").get<int>();
    row.runs = j.at("runs").get<int>();
    row.mean_mse = j.at("mean_mse").get<double>();
    row.mean_remaining_budget = j.at("mean_remaining_budget").get<double>();
    row.stranded = j.at("stranded").get<int>();
    row.wall_clock_seconds = j.value("wall_clock_seconds", 0.0);
    return row;
}

json batch_metrics_json(const std::vector<BatchResult>& batches) {
    json rows = json::array();
    json runs = json::object();
    for (const auto& b : batches) {
        rows.push_back(to_json(b.row, false));
        json per = json::array();
        for (const auto& s : b.summaries) {
            per.push_back({{"seed", s.seed},
                           {"mse", s.mse},
                           {"mean_remaining_budget", s.mean_remaining_budget},
                           {"stranded", s.stranded}});
        }
        runs[b.row.method] = std::move(per);
    }
    return {{"rows", rows}, {"runs", runs}};
}

}  // namespace ipp
