#include <doctest.h>

#include <cmath>
#include <set>

#include "ipp/coordination.hpp"
#include "ipp/errors.hpp"

using namespace ipp;

namespace {

MissionConfig small_config(Method method, int robots, double budget, int iterations = 60) {
    MissionConfig c;
    c.grid = GridSpec(30, 30);
    c.robots.assign(static_cast<std::size_t>(robots), RobotSpec{{0, 0}, {29, 29}});
    c.budget = budget;
    c.method = method;
    c.planner.iterations = iterations;
    return c;
}

Field test_field() {
    return MixtureField(GridSpec(30, 30), {{8, 20, 3.0, 4.0}, {22, 6, 2.0, 3.0}, {15, 15, 4.0, 5.0}});
}

LocationSet test_pool(std::uint64_t seed, std::size_t n = 100) {
    Rng rng(seed);
    return initial_locations(GridSpec(30, 30), n, rng);
}

void check_mission_invariants(const MissionConfig& cfg, const MissionResult& r) {
    std::vector<Observation> union_obs;
    for (const auto& t : r.robots) {
        double spent = 0.0;
        for (const auto& s : t.steps) spent += s.realized_cost;
        CHECK(spent <= cfg.budget + 1e-9);
        CHECK(t.remaining_budget >= 0.0);
        if (t.status == RobotStatus::finished) {
            CHECK(t.steps.back().loc == t.final);
            CHECK(spent == doctest::Approx(cfg.budget - t.remaining_budget));
        }
        CHECK(t.status != RobotStatus::active);
        std::set<Location> path;
        for (const auto& s : t.steps) CHECK(path.insert(s.loc).second);
        for (const auto& o : t.observations) union_obs.push_back(o);
    }
    if (mode_flags(cfg.method).communication) {
        for (std::size_t i = 0; i < r.robots.size(); ++i) {
            for (std::size_t j = i + 1; j < r.robots.size(); ++j) {
                for (const auto& a : r.robots[i].observations) {
                    for (const auto& b : r.robots[j].observations) CHECK(a.loc != b.loc);
                }
            }
        }
        // shared model holds exactly the union of every robot's readings
        CHECK(r.model.observations().size() == union_obs.size());
        std::set<Location> in_model;
        for (const auto& o : r.model.observations()) in_model.insert(o.loc);
        for (const auto& o : union_obs) CHECK(in_model.count(o.loc) == 1);
    }
    // replaying the traces in round order reproduces the board log
    BroadcastBoard replay;
    for (const auto& t : r.robots) replay.post(t.id, t.start);
    std::size_t rounds = 0;
    for (const auto& t : r.robots) rounds = std::max(rounds, t.steps.size());
    for (std::size_t k = 1; k < rounds; ++k) {
        for (const auto& t : r.robots) {
            if (k < t.steps.size()) replay.post(t.id, t.steps[k].loc);
        }
    }
    CHECK(replay.log() == r.board_log);
    CHECK(r.planner_violations == 0);
}

}  // namespace

TEST_CASE("mode flags") {
    CHECK(mode_flags(Method::rmcts) == ModeFlags{true, true});
    CHECK(mode_flags(Method::mcts) == ModeFlags{true, false});
    CHECK(mode_flags(Method::ncmcts) == ModeFlags{false, true});
    CHECK(parse_method("RMCTS") == Method::rmcts);
    CHECK(parse_method("ncmcts") == Method::ncmcts);
    CHECK_THROWS_AS(parse_method("MRS"), ConfigError);
}

TEST_CASE("candidate filter") {
    LocationSet pool{{0, 0}, {1, 1}, {2, 2}, {3, 3}};
    BroadcastBoard board;
    board.post(0, {0, 0});
    CHECK(candidate_filter(pool, LocationSet{{0, 0}}, &board, 0) == LocationSet{{1, 1}, {2, 2}, {3, 3}});

    board.post(1, {1, 1});
    board.post(1, {2, 2});
    board.post(1, {3, 3});
    board.post(1, {0, 0});
    CHECK(candidate_filter(pool, LocationSet{{0, 0}}, &board, 0).empty());
    // communication off: only own visits count
    CHECK(candidate_filter(pool, LocationSet{{0, 0}}, nullptr, 0) == LocationSet{{1, 1}, {2, 2}, {3, 3}});
}

TEST_CASE("board claims only grow") {
    BroadcastBoard b;
    b.post(0, {1, 1});
    b.post(0, {1, 1});
    b.post(1, {1, 1});
    CHECK(b.log().size() == 2);
    CHECK(b.claimed_by_other(0, {1, 1}));
    CHECK_FALSE(b.claimed_by_other(0, {2, 2}));
    CHECK(b.claims(5).empty());
}

TEST_CASE("weighted sampling") {
    SUBCASE("degenerate weights") {
        std::vector<double> w(50, 0.0);
        w[17] = 1.0;
        for (std::uint64_t s = 0; s < 100; ++s) {
            Rng rng(s);
            auto picks = weighted_sample(w, 3, rng);
            REQUIRE(picks.size() == 3);
            CHECK(picks[0] == 17);
            CHECK(std::set<std::size_t>(picks.begin(), picks.end()).size() == 3);
        }
    }
    SUBCASE("3:1 frequencies") {
        std::vector<double> w{0.75, 0.25};
        Rng rng(2024);
        int hits = 0;
        for (int i = 0; i < 10000; ++i) hits += weighted_sample(w, 1, rng)[0] == 0;
        CHECK(std::abs(hits / 10000.0 - 0.75) < 0.02);
    }
    SUBCASE("all zero is uniform") {
        std::vector<double> w(4, 0.0);
        Rng rng(6);
        std::vector<int> count(4, 0);
        for (int i = 0; i < 8000; ++i) count[weighted_sample(w, 1, rng)[0]]++;
        for (int c : count) CHECK(std::abs(c / 8000.0 - 0.25) < 0.03);
    }
}

TEST_CASE("resample locations") {
    GridSpec grid(30, 30);
    SUBCASE("empty model draws distinct unclaimed cells") {
        BroadcastBoard board;
        board.post(1, {3, 3});
        LocationSet own{{0, 0}};
        Rng rng(1);
        auto v = resample_locations(GpModel(), grid, own, &board, 30, rng);
        CHECK(v.size() == 30);
        CHECK_FALSE(v.contains({0, 0}));
        CHECK_FALSE(v.contains({3, 3}));
    }
    SUBCASE("fewer eligible cells than requested") {
        GridSpec tiny(2, 2);
        Rng rng(1);
        auto v = resample_locations(GpModel(), tiny, LocationSet{{0, 0}}, nullptr, 30, rng);
        CHECK(v.size() == 3);
    }
    SUBCASE("high-variance cells are favoured") {
        std::vector<Observation> obs;
        for (int x = 0; x < 15; ++x) {
            for (int y = 0; y < 30; ++y) obs.push_back({{x, y}, 0.0});
        }
        auto model = fit(obs, {});
        Rng rng(3);
        auto v = resample_locations(model, grid, LocationSet{{0, 0}}, nullptr, 30, rng);
        int right = 0;
        for (auto l : v) right += l.x >= 15;
        CHECK(right >= 27);
    }
}

TEST_CASE("step") {
    MissionConfig cfg = small_config(Method::rmcts, 1, 100);
    Field truth = test_field();
    StepEnv env{cfg, truth, true};
    BroadcastBoard board;

    SUBCASE("finishing move") {
        RobotState r;
        r.current = {27, 29};
        r.final = {29, 29};
        r.budget_remaining = 100;
        r.visited.insert(r.current);
        auto streams = RobotStreams::derive(1, 0);
        auto rec = step(r, board, GpModel(), env, streams);
        CHECK(rec.target == Location{29, 29});
        CHECK(r.status == RobotStatus::finished);
        CHECK(r.budget_remaining >= 98.0);
        CHECK(r.budget_remaining <= 99.0);
        REQUIRE(rec.reading.has_value());
        CHECK(*rec.reading == eval_field(truth, {29, 29}));
        CHECK(board.claims(0).contains({29, 29}));
    }
    SUBCASE("budget too small for any detour") {
        RobotState r;
        r.current = {20, 29};
        r.final = {29, 29};
        // worst case straight to final is 0.5 * 9 + 1 = 5.5
        r.budget_remaining = 5.6;
        r.visited.insert(r.current);
        r.pool = LocationSet{{20, 28}, {25, 25}, {10, 10}};
        auto streams = RobotStreams::derive(2, 0);
        auto rec = step(r, board, GpModel(), env, streams);
        CHECK(rec.target == Location{29, 29});
        CHECK(r.status == RobotStatus::finished);
    }
    SUBCASE("stranded on an unaffordable forced move") {
        RobotState r;
        r.current = {28, 29};
        r.final = {29, 29};
        r.budget_remaining = 0.5;
        r.visited.insert(r.current);
        auto streams = RobotStreams::derive(3, 0);
        auto rec = step(r, board, GpModel(), env, streams);
        CHECK_FALSE(rec.moved);
        CHECK(r.status == RobotStatus::stranded);
        CHECK(r.budget_remaining == 0.0);
        CHECK(r.current == Location{28, 29});
    }
    SUBCASE("already sampled cell yields no second reading") {
        RobotState r;
        r.current = {27, 29};
        r.final = {29, 29};
        r.budget_remaining = 100;
        r.visited.insert(r.current);
        auto model = fit({{{29, 29}, 1.0}}, {});
        auto streams = RobotStreams::derive(1, 0);
        auto rec = step(r, board, model, env, streams);
        CHECK(rec.moved);
        CHECK_FALSE(rec.reading.has_value());
        CHECK(r.observations.empty());
    }
}

TEST_CASE("single robot visits a small pool then final") {
    auto cfg = small_config(Method::mcts, 1, 1000, 300);
    Field truth = test_field();
    LocationSet pool{{6, 5}, {14, 15}, {21, 22}};
    auto r = run_mission(cfg, truth, pool, 11);
    const auto& t = r.robots[0];
    CHECK(t.status == RobotStatus::finished);
    REQUIRE(t.steps.size() == 5);
    std::set<Location> visited;
    for (std::size_t i = 1; i + 1 < t.steps.size(); ++i) visited.insert(t.steps[i].loc);
    CHECK(visited == std::set<Location>(pool.begin(), pool.end()));
    CHECK(t.steps.back().loc == Location{29, 29});
    const double empty_mse = mse(posterior_grid(GpModel(cfg.kernel), cfg.grid), truth);
    CHECK(r.mse < empty_mse);
    check_mission_invariants(cfg, r);
}

TEST_CASE("zero budget") {
    auto cfg = small_config(Method::rmcts, 2, 0.0);
    auto r = run_mission(cfg, test_field(), test_pool(1), 5);
    for (const auto& t : r.robots) {
        CHECK(t.status == RobotStatus::stranded);
        CHECK(t.remaining_budget == 0.0);
        CHECK(t.steps.size() == 1);
    }
    CHECK(r.model.observations().empty());

    cfg.robots[0].final = cfg.robots[0].start;
    auto r2 = run_mission(cfg, test_field(), test_pool(1), 5);
    CHECK(r2.robots[0].status == RobotStatus::finished);
}

TEST_CASE("missions are deterministic and respect the coordination invariants") {
    for (Method m : {Method::rmcts, Method::mcts, Method::ncmcts}) {
        CAPTURE(method_name(m));
        auto cfg = small_config(m, 3, 100);
        auto a = run_mission(cfg, test_field(), test_pool(4), 99);
        auto b = run_mission(cfg, test_field(), test_pool(4), 99);
        CHECK(a.mse == b.mse);
        REQUIRE(a.robots.size() == b.robots.size());
        for (std::size_t i = 0; i < a.robots.size(); ++i) {
            REQUIRE(a.robots[i].steps.size() == b.robots[i].steps.size());
            for (std::size_t k = 0; k < a.robots[i].steps.size(); ++k) {
                CHECK(a.robots[i].steps[k].loc == b.robots[i].steps[k].loc);
                CHECK(a.robots[i].steps[k].realized_cost == b.robots[i].steps[k].realized_cost);
            }
            CHECK(a.robots[i].remaining_budget == b.robots[i].remaining_budget);
        }
        check_mission_invariants(cfg, a);
        CHECK(a.stranded_count() == 0);
    }
}

TEST_CASE("resampling cadence and pool size") {
    auto cfg = small_config(Method::rmcts, 2, 100);
    auto r = run_mission(cfg, test_field(), test_pool(8), 3);
    REQUIRE_FALSE(r.resamples.empty());
    for (const auto& e : r.resamples) {
        CHECK(e.step % 2 == 0);
        if (e.eligible >= 30) CHECK(e.size == 30);
    }
    auto no = run_mission(small_config(Method::mcts, 2, 100), test_field(), test_pool(8), 3);
    CHECK(no.resamples.empty());
}

TEST_CASE("without communication robots keep private models") {
    auto cfg = small_config(Method::ncmcts, 3, 100);
    auto r = run_mission(cfg, test_field(), test_pool(2), 21);
    std::set<Location> distinct;
    std::size_t total = 0;
    for (const auto& t : r.robots) {
        for (const auto& o : t.observations) {
            distinct.insert(o.loc);
            ++total;
        }
    }
    // every robot samples the shared final on its own
    CHECK(total > distinct.size());
    CHECK(r.model.observations().size() == distinct.size());
}
