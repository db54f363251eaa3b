#include "ipp/coordination.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <numeric>
#include <unordered_set>

#include "ipp/errors.hpp"

namespace ipp {

ModeFlags mode_flags(Method method) {
    switch (method) {
        case Method::rmcts: return {true, true};
        case Method::mcts: return {true, false};
        case Method::ncmcts: return {false, true};
    }
    return {};
}

Method parse_method(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "rmcts") return Method::rmcts;
    if (lower == "mcts") return Method::mcts;
    if (lower == "ncmcts") return Method::ncmcts;
    throw ConfigError("method", "unknown method '" + std::string(name) + "' (supported: rmcts, mcts, ncmcts)");
}

std::string method_name(Method method) {
    switch (method) {
        case Method::rmcts: return "RMCTS";
        case Method::mcts: return "MCTS";
        case Method::ncmcts: return "NCMCTS";
    }
    return "?";
}

std::string status_name(RobotStatus status) {
    switch (status) {
        case RobotStatus::active: return "active";
        case RobotStatus::finished: return "finished";
        case RobotStatus::stranded: return "stranded";
    }
    return "?";
}

void BroadcastBoard::post(int robot, Location loc) {
    if (claims_[robot].insert(loc)) log_.push_back({robot, loc});
}

bool BroadcastBoard::claimed_by_other(int self, Location loc) const {
    for (const auto& [id, set] : claims_) {
        if (id != self && set.contains(loc)) return true;
    }
    return false;
}

bool BroadcastBoard::claimed(Location loc) const {
    for (const auto& [id, set] : claims_) {
        if (set.contains(loc)) return true;
    }
    return false;
}

const LocationSet& BroadcastBoard::claims(int robot) const {
    static const LocationSet empty;
    auto it = claims_.find(robot);
    return it == claims_.end() ? empty : it->second;
}

LocationSet candidate_filter(const LocationSet& pool, const LocationSet& own_visited, const BroadcastBoard* board,
                             int self) {
    LocationSet out;
    for (auto l : pool) {
        if (own_visited.contains(l)) continue;
        if (board && board->claimed_by_other(self, l)) continue;
        out.insert(l);
    }
    return out;
}

std::vector<std::size_t> weighted_sample(std::span<const double> weights, std::size_t k, Rng& rng) {
    const std::size_t n = weights.size();
    k = std::min(k, n);
    std::vector<char> taken(n, 0);
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t draw = 0; draw < k; ++draw) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!taken[i] && weights[i] > 0.0) total += weights[i];
        }
        std::size_t chosen = n;
        if (total > 0.0) {
            double u = std::uniform_real_distribution<double>(0.0, total)(rng);
            for (std::size_t i = 0; i < n; ++i) {
                if (taken[i] || !(weights[i] > 0.0)) continue;
                chosen = i;
                if (u < weights[i]) break;
                u -= weights[i];
            }
        } else {
            std::size_t r = std::uniform_int_distribution<std::size_t>(0, n - draw - 1)(rng);
            for (std::size_t i = 0; i < n; ++i) {
                if (taken[i]) continue;
                if (r-- == 0) {
                    chosen = i;
                    break;
                }
            }
        }
        taken[chosen] = 1;
        out.push_back(chosen);
    }
    return out;
}

LocationSet resample_locations(const GpModel& model, const GridSpec& grid, const LocationSet& own_visited,
                               const BroadcastBoard* board, std::size_t k, Rng& rng) {
    if (k < 1) throw ParameterError("resample size must be >= 1");
    std::vector<Location> eligible;
    for (auto cell : grid.cells()) {
        if (own_visited.contains(cell)) continue;
        if (board && board->claimed(cell)) continue;
        eligible.push_back(cell);
    }
    if (eligible.size() <= k) return LocationSet(eligible);

    auto preds = predict(model, eligible);
    std::vector<double> weight(preds.size());
    std::transform(preds.begin(), preds.end(), weight.begin(), [](const Prediction& p) { return p.variance; });
    LocationSet out;
    for (auto i : weighted_sample(weight, k, rng)) out.insert(eligible[i]);
    return out;
}

void MissionConfig::validate() const {
    planner.validate();
    cost.validate();
    kernel.validate();
    if (robots.empty()) throw ParameterError("mission needs at least one robot");
    for (const auto& r : robots) {
        if (!grid.contains(r.start) || !grid.contains(r.final)) {
            throw ParameterError("robot start/final must lie inside the grid");
        }
    }
    if (!(budget >= 0.0)) throw ParameterError("budget must be >= 0");
    if (resample.size < 1) throw ParameterError("resample size must be >= 1");
    if (resample.period < 1) throw ParameterError("resample period must be >= 1");
    if (!(noise_sd >= 0.0)) throw ParameterError("noise_sd must be >= 0");
}

RobotStreams RobotStreams::derive(std::uint64_t run_seed, int robot) {
    const auto r = static_cast<std::uint64_t>(robot);
    return {Rng(derive_seed(run_seed, Stream::planning, r)), Rng(derive_seed(run_seed, Stream::cost, r)),
            Rng(derive_seed(run_seed, Stream::resampling, r)), Rng(derive_seed(run_seed, Stream::measurement, r))};
}

StepRecord step(RobotState& robot, BroadcastBoard& board, const GpModel& model, const StepEnv& env,
                RobotStreams& rngs) {
    StepRecord rec;
    const auto& cfg = env.config;
    const BroadcastBoard* view = env.communication ? &board : nullptr;

    PlanningContext ctx;
    ctx.current = robot.current;
    ctx.remaining_budget = robot.budget_remaining;
    ctx.final = robot.final;
    ctx.candidates = candidate_filter(robot.pool, robot.visited, view, robot.id);
    ctx.variances = variance_map(model, ctx.candidates);
    ctx.cost = cfg.cost;
    ctx.params = cfg.planner;

    auto planned = plan(ctx, rngs.planning);
    rec.target = planned.choice;
    rec.violations = planned.violations;
    rec.realized_cost = gen_cost(robot.current, rec.target, cfg.cost, rngs.cost);

    if (rec.realized_cost > robot.budget_remaining) {
        robot.status = RobotStatus::stranded;
        robot.budget_remaining = 0.0;
        return rec;
    }
    rec.moved = true;
    robot.budget_remaining -= rec.realized_cost;

    const auto& seen = model.observations();
    const bool sampled = std::any_of(seen.begin(), seen.end(), [&](const Observation& o) { return o.loc == rec.target; }) ||
                         (view && view->claimed_by_other(robot.id, rec.target));
    if (!sampled) {
        rec.reading = sample_measurement(env.truth, rec.target, cfg.noise_sd, rngs.measurement);
        robot.observations.push_back({rec.target, *rec.reading});
    }
    robot.visited.insert(rec.target);
    robot.current = rec.target;
    robot.step_count += 1;
    board.post(robot.id, rec.target);
    if (robot.current == robot.final) robot.status = RobotStatus::finished;
    return rec;
}

double MissionResult::mean_remaining_budget() const {
    if (robots.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& r : robots) sum += r.remaining_budget;
    return sum / static_cast<double>(robots.size());
}

int MissionResult::stranded_count() const {
    return static_cast<int>(
        std::count_if(robots.begin(), robots.end(), [](const RobotTrace& r) { return r.status == RobotStatus::stranded; }));
}

namespace {

std::vector<Observation> dedup(const std::vector<Observation>& obs) {
    std::unordered_set<Location, LocationHash> seen;
    std::vector<Observation> out;
    for (const auto& o : obs) {
        if (seen.insert(o.loc).second) out.push_back(o);
    }
    return out;
}

}  // namespace

MissionResult run_mission(const MissionConfig& config, const Field& truth, const LocationSet& pool,
                          std::uint64_t run_seed) {
    config.validate();
    if (!(field_grid(truth) == config.grid)) throw ParameterError("field grid does not match mission grid");
    const ModeFlags flags = mode_flags(config.method);
    const bool shared = flags.communication && config.shared_gp;

    const std::size_t n = config.robots.size();
    std::vector<RobotState> robots(n);
    std::vector<RobotStreams> streams;
    std::vector<RobotTrace> traces(n);
    BroadcastBoard board;
    for (std::size_t i = 0; i < n; ++i) {
        auto& r = robots[i];
        r.id = static_cast<int>(i);
        r.current = config.robots[i].start;
        r.final = config.robots[i].final;
        r.budget_remaining = config.budget;
        r.visited.insert(r.current);
        r.pool = pool;
        if (r.current == r.final) {
            r.status = RobotStatus::finished;
        } else if (config.budget <= 0.0) {
            r.status = RobotStatus::stranded;
            r.budget_remaining = 0.0;
        }
        board.post(r.id, r.current);
        streams.push_back(RobotStreams::derive(run_seed, r.id));

        auto& t = traces[i];
        t.id = r.id;
        t.start = r.current;
        t.final = r.final;
        t.initial_budget = config.budget;
        t.steps.push_back({0, r.current, 0.0, std::nullopt});
    }

    std::vector<Observation> collected;  // every reading, in collection order
    GpModel shared_model(config.kernel);
    std::vector<GpModel> own_models(n, GpModel(config.kernel));

    MissionResult result;
    const auto started = std::chrono::steady_clock::now();
    const StepEnv env{config, truth, flags.communication};
    const std::size_t max_rounds = n * (config.grid.cell_count() + 1);
    auto any_active = [&] {
        return std::any_of(robots.begin(), robots.end(), [](const RobotState& r) { return r.status == RobotStatus::active; });
    };
    for (std::size_t round = 0; any_active(); ++round) {
        if (round >= max_rounds) throw NumericalError("mission exceeded its round bound");
        for (std::size_t i = 0; i < n; ++i) {
            auto& r = robots[i];
            if (r.status != RobotStatus::active) continue;
            GpModel& model = shared ? shared_model : own_models[i];
            auto rec = step(r, board, model, env, streams[i]);
            result.planner_violations += rec.violations;
            if (!rec.moved) continue;
            traces[i].steps.push_back({r.step_count, rec.target, rec.realized_cost, rec.reading});
            if (rec.reading) {
                collected.push_back({rec.target, *rec.reading});
                model = shared ? fit(collected, config.kernel) : fit(r.observations, config.kernel);
            }
            if (flags.resampling && r.status == RobotStatus::active && r.step_count % config.resample.period == 0) {
                r.pool = resample_locations(model, config.grid, r.visited, flags.communication ? &board : nullptr,
                                            config.resample.size, streams[i].resampling);
                std::size_t eligible = 0;
                for (auto cell : config.grid.cells()) {
                    if (!r.visited.contains(cell) && !(flags.communication && board.claimed(cell))) ++eligible;
                }
                result.resamples.push_back({r.id, r.step_count, r.pool.size(), eligible});
            }
        }
    }
    result.planning_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    for (std::size_t i = 0; i < n; ++i) {
        traces[i].remaining_budget = robots[i].budget_remaining;
        traces[i].status = robots[i].status;
        traces[i].observations = robots[i].observations;
    }
    result.grid = config.grid;
    result.method = config.method;
    result.robots = std::move(traces);
    result.model = shared ? shared_model : fit(dedup(collected), config.kernel);
    result.truth = field_values(truth);
    result.reconstruction = posterior_grid(result.model, config.grid);
    result.mse = mse(result.reconstruction, truth);
    result.board_log = board.log();
    return result;
}

}  // namespace ipp
