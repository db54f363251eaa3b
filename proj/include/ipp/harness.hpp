#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ipp/coordination.hpp"
#include "ipp/field.hpp"

namespace ipp {

struct FieldConfig {
    enum class Kind { mixture, raster };
    Kind kind = Kind::mixture;
    MixtureSpec mixture;
    // Fixed mixture; when empty a fresh mixture is drawn for every run.
    std::vector<GaussianComponent> components;
    std::filesystem::path raster_path;
    bool zscore = false;
    std::optional<GridField> raster;  // loaded by parse_config
};

struct ExperimentConfig {
    FieldConfig field;
    GridSpec grid;
    std::size_t n_locations = 100;
    std::vector<RobotSpec> robots;
    double budget = 0.0;
    Method method = Method::rmcts;
    PlannerParams planner;
    CostParams cost;
    KernelParams kernel;
    ResampleParams resample;
    double noise_sd = 0.0;
    bool shared_gp = true;
    int runs = 1;
    std::uint64_t base_seed = 0;

    // Throws ConfigError naming the offending key.
    void validate() const;
    MissionConfig mission() const;
};

// Relative raster paths resolve against `base_dir`.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
ExperimentConfig parse_config(const std::filesystem::path& path);

struct MetricsRow {
    std::string method;
    double budget = 0.0;
    int team_size = 0;
    int runs = 0;
    double mean_mse = 0.0;
    double mean_remaining_budget = 0.0;
    int stranded = 0;
    double wall_clock_seconds = 0.0;

    friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

nlohmann::json to_json(const MetricsRow& row, bool include_timing = true);
MetricsRow metrics_row_from_json(const nlohmann::json& j);

enum class Execution { serial, parallel };

struct RunSummary {
    std::uint64_t seed = 0;
    double mse = 0.0;
    double mean_remaining_budget = 0.0;
    int stranded = 0;
};

struct BatchResult {
    std::vector<MissionResult> missions;
    std::vector<RunSummary> summaries;
    MetricsRow row;
};

// Ground truth and location pool for one run; identical for every method.
struct RunSetup {
    Field field;
    LocationSet pool;
};
RunSetup make_run_setup(const ExperimentConfig& config, std::uint64_t run_seed);

// Independent missions with seeds base_seed, base_seed+1, ...; reduction is in
// run order regardless of execution mode.
BatchResult run_batch(const ExperimentConfig& config, Execution exec = Execution::parallel);

// Paired comparison: every method sees the same seeds.
std::vector<BatchResult> compare_methods(const ExperimentConfig& config, const std::vector<Method>& methods,
                                         Execution exec = Execution::parallel);

// metrics.json, robot_<id>.csv per robot, truth.pgm, reconstruction.pgm, paths.svg.
void emit_artifacts(const MissionResult& result, const std::filesystem::path& outdir);

void write_trace_csv(const RobotTrace& trace, std::ostream& out);
void write_pgm(const std::vector<double>& values, const GridSpec& grid, double lo, double hi, std::ostream& out);
nlohmann::json mission_json(const MissionResult& result);

// Batch-level document written by the CLI; excludes wall-clock timing so that
// repeated invocations are byte-identical.
nlohmann::json batch_metrics_json(const std::vector<BatchResult>& batches);

}  // namespace ipp
