#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ipp/field.hpp"
#include "ipp/gp.hpp"
#include "ipp/location.hpp"
#include "ipp/planner.hpp"
#include "ipp/rng.hpp"

namespace ipp {

enum class Method { rmcts, mcts, ncmcts };

struct ModeFlags {
    bool communication = true;
    bool resampling = true;

    friend bool operator==(const ModeFlags&, const ModeFlags&) = default;
};

ModeFlags mode_flags(Method method);
// Case-insensitive; throws ConfigError listing the supported names.
Method parse_method(std::string_view name);
std::string method_name(Method method);

enum class RobotStatus { active, finished, stranded };
std::string status_name(RobotStatus status);

// Visited locations posted by each robot. Claim sets only grow.
class BroadcastBoard {
public:
    struct Post {
        int robot;
        Location loc;
        friend bool operator==(const Post&, const Post&) = default;
    };

    void post(int robot, Location loc);
    // Union over every robot other than `self`.
    bool claimed_by_other(int self, Location loc) const;
    bool claimed(Location loc) const;
    const LocationSet& claims(int robot) const;
    const std::vector<Post>& log() const { return log_; }

private:
    std::map<int, LocationSet> claims_;
    std::vector<Post> log_;
};

// V_i minus own visits minus other robots' posted visits. A null board means
// communication is disabled.
LocationSet candidate_filter(const LocationSet& pool, const LocationSet& own_visited, const BroadcastBoard* board,
                             int self);

// k distinct indices drawn without replacement with probability proportional
// to weight. Once every remaining weight is zero the rest are drawn uniformly.
std::vector<std::size_t> weighted_sample(std::span<const double> weights, std::size_t k, Rng& rng);

// k distinct cells drawn without replacement, weight proportional to posterior
// variance. Cells visited by this robot or (when a board is given) claimed by
// anyone are ineligible.
LocationSet resample_locations(const GpModel& model, const GridSpec& grid, const LocationSet& own_visited,
                               const BroadcastBoard* board, std::size_t k, Rng& rng);

struct RobotSpec {
    Location start;
    Location final;
};

struct ResampleParams {
    std::size_t size = 30;
    int period = 2;
};

struct MissionConfig {
    GridSpec grid;
    std::vector<RobotSpec> robots;
    double budget = 100.0;
    Method method = Method::rmcts;
    PlannerParams planner;
    CostParams cost;
    KernelParams kernel;
    ResampleParams resample;
    double noise_sd = 0.0;
    // One GP fed by every robot. Forced off when communication is disabled.
    bool shared_gp = true;

    void validate() const;
};

struct RobotStreams {
    Rng planning;
    Rng cost;
    Rng resampling;
    Rng measurement;

    static RobotStreams derive(std::uint64_t run_seed, int robot);
};

struct RobotState {
    int id = 0;
    Location current;
    Location final;
    double budget_remaining = 0.0;
    LocationSet visited;
    std::vector<Observation> observations;
    RobotStatus status = RobotStatus::active;
    int step_count = 0;
    LocationSet pool;  // V_i
};

struct TraceStep {
    int step = 0;
    Location loc;
    double realized_cost = 0.0;
    std::optional<double> reading;  // empty when the cell was already sampled
};

struct StepRecord {
    Location target;
    double realized_cost = 0.0;
    bool moved = false;
    std::optional<double> reading;
    long violations = 0;
};

struct StepEnv {
    const MissionConfig& config;
    const Field& truth;
    bool communication = true;
};

// One pass of the per-robot loop: filter, plan, move, measure, post.
// `model` is the GP snapshot this robot plans with and feeds.
StepRecord step(RobotState& robot, BroadcastBoard& board, const GpModel& model, const StepEnv& env,
                RobotStreams& rngs);

struct RobotTrace {
    int id = 0;
    Location start;
    Location final;
    double initial_budget = 0.0;
    double remaining_budget = 0.0;
    RobotStatus status = RobotStatus::active;
    std::vector<TraceStep> steps;  // steps[0] is the start location
    std::vector<Observation> observations;
};

struct ResampleEvent {
    int robot = 0;
    int step = 0;
    std::size_t size = 0;
    std::size_t eligible = 0;
};

struct MissionResult {
    GridSpec grid;
    Method method = Method::rmcts;
    std::vector<RobotTrace> robots;
    GpModel model;
    std::vector<double> truth;           // row-major ground truth
    std::vector<double> reconstruction;  // row-major posterior mean
    double mse = 0.0;
    std::vector<BroadcastBoard::Post> board_log;
    std::vector<ResampleEvent> resamples;
    long planner_violations = 0;
    double planning_seconds = 0.0;

    double mean_remaining_budget() const;
    int stranded_count() const;
};

MissionResult run_mission(const MissionConfig& config, const Field& truth, const LocationSet& pool,
                          std::uint64_t run_seed);

}  // namespace ipp
