// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ipp/cli.hpp"
#include "ipp/coordination.hpp"
#include "ipp/gp.hpp"
#include "ipp/harness.hpp"
#include "ipp/planner.hpp"
#include "oracles.hpp"

using namespace ipp;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentConfig default_config(double budget, int runs, int iterations = 1000) {
    nlohmann::json doc = {{"field", {{"type", "mixture"}}},
                          {"robots", 3},
                          {"budget", budget},
                          {"planner", {{"iterations", iterations}}},
                          {"runs", runs},
                          {"base_seed", 0}};
    return parse_config(doc);
}

double mean_of(const BatchResult& b) { return b.row.mean_mse; }

std::vector<double> paired_diffs(const BatchResult& a, const BatchResult& b) {
    std::vector<double> d;
    for (std::size_t i = 0; i < a.summaries.size(); ++i) d.push_back(a.summaries[i].mse - b.summaries[i].mse);
    return d;
}

int count_negative(const std::vector<double>& d) {
    int n = 0;
    for (double x : d) n += x < 0.0;
    return n;
}

int count_positive(const std::vector<double>& d) {
    int n = 0;
    for (double x : d) n += x > 0.0;
    return n;
}

// Shared between criteria 4, 5, 6 and 8.
const BatchResult& rmcts_b100() {
    static const BatchResult b = run_batch(default_config(100, 100));
    return b;
}

Outcome gp_oracle() {
    Rng rng(20240601);
    const GridSpec grid(30, 30);
    auto cells = initial_locations(grid, 125, rng);
    std::uniform_real_distribution<double> val(-3.0, 3.0);
    std::vector<Observation> obs;
    std::vector<Location> locs;
    std::vector<double> vals;
    for (std::size_t i = 0; i < 25; ++i) {
        obs.push_back({cells[i], val(rng)});
        locs.push_back(cells[i]);
        vals.push_back(obs.back().value);
    }
    std::vector<Location> queries(cells.items().begin() + 25, cells.items().end());
    // half the queries re-hit observed cells, where the posterior is sharpest
    for (std::size_t i = 0; i < 50; ++i) queries[i] = cells[i % 25];

    const KernelParams params{1.0, 1.0, 1e-8};
    const auto t0 = Clock::now();
    const auto model = fit(obs, params);
    const auto pred = predict(model, queries);
    const double elapsed = seconds_since(t0);

    const oracle::DenseGp ref(locs, vals, 1.0, 1.0, 1e-8);
    double worst = 0.0;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        auto [m, v] = ref.predict(queries[i]);
        worst = std::max({worst, std::abs(m - pred[i].mean), std::abs(std::max(v, 0.0) - pred[i].variance)});
    }
    return {worst <= 1e-8 && elapsed < 1.0, fmt("max |diff| = %.3g over %zu queries, %.4f s", worst, queries.size(), elapsed)};
}

Outcome kernel_spot_values() {
    const KernelParams p{1.0, 1.0, 1e-8};
    const double at0 = matern32(0.0, p);
    const double scaled = matern32(1.0 / std::sqrt(3.0) * p.length_scale, p) * std::numbers::e;
    bool decay = true;
    const double rs[] = {0, 0.5, 1, 2, 5, 10};
    for (int i = 1; i < 6; ++i) decay = decay && matern32(rs[i], p) < matern32(rs[i - 1], p);
    const bool ok = at0 == 1.0 && std::abs(scaled - 2.0) <= 1e-12 && decay;
    return {ok, fmt("k(0) = %.17g, k(l/sqrt3)*e - 2 = %.3g, strictly decreasing: %s", at0, scaled - 2.0,
                    decay ? "yes" : "no")};
}

Outcome ucb_guarantee() {
    const GridSpec grid(30, 30);
    long violations = 0;
    long nodes = 0;
    for (int call = 0; call < 1000; ++call) {
        Rng rng(derive_seed(777, static_cast<std::uint64_t>(call)));
        PlanningContext ctx;
        auto cells = initial_locations(grid, 101, rng);
        ctx.current = cells[0];
        ctx.final = {29, 29};
        std::uniform_real_distribution<double> var(0.0, 1.0);
        for (std::size_t i = 1; i < cells.size(); ++i) {
            if (cells[i] == ctx.current) continue;
            ctx.candidates.insert(cells[i]);
        }
        for (const auto& c : grid.cells()) ctx.variances[c] = var(rng);
        ctx.remaining_budget = worst_cost(ctx.current, ctx.final, ctx.cost) + std::uniform_real_distribution<>(0, 60)(rng);
        auto res = plan(ctx, rng);
        violations += res.violations;
        nodes += static_cast<long>(res.tree.size());
    }
    return {violations == 0, fmt("%ld violations across 1000 calls (%ld tree nodes)", violations, nodes)};
}

Outcome budget_safety() {
    const auto& b = rmcts_b100();
    int over = 0, stranded = 0;
    double worst_spend = 0.0;
    for (const auto& m : b.missions) {
        for (const auto& t : m.robots) {
            double spent = 0.0;
            for (const auto& s : t.steps) spent += s.realized_cost;
            worst_spend = std::max(worst_spend, spent);
            over += spent > 100.0;
        }
        stranded += m.stranded_count();
    }
    return {over == 0 && stranded == 0 && b.missions.size() == 100,
            fmt("%zu missions, max realized spend %.4f, over-budget robots %d, stranded %d", b.missions.size(),
                worst_spend, over, stranded)};
}

Outcome non_duplication() {
    const auto& b = rmcts_b100();
    int shared = 0;
    for (const auto& m : b.missions) {
        std::map<Location, std::set<int>> who;
        for (const auto& t : m.robots) {
            for (const auto& s : t.steps) {
                if (s.reading) who[s.loc].insert(t.id);
            }
        }
        for (const auto& [loc, ids] : who) shared += ids.size() > 1;
    }
    return {shared == 0, fmt("%d cells sampled by more than one robot across %zu missions", shared, b.missions.size())};
}

Outcome method_ordering() {
    const auto cfg = default_config(100, 100);
    const auto& r = rmcts_b100();
    auto mc = cfg;
    mc.method = Method::mcts;
    auto nc = cfg;
    nc.method = Method::ncmcts;
    const auto m = run_batch(mc);
    const auto n = run_batch(nc);

    const auto dn = paired_diffs(r, n);
    const double p = oracle::sign_test_p(dn);
    const bool vs_nc = mean_of(r) < mean_of(n) && p < 0.01;
    const bool vs_mc = mean_of(r) <= mean_of(m);

    const auto quick = default_config(100, 50, 200);
    auto quick_nc = quick;
    quick_nc.method = Method::ncmcts;
    const auto qr = run_batch(quick);
    const auto qn = run_batch(quick_nc);
    const bool ci = mean_of(qr) < mean_of(qn);

    return {vs_nc && vs_mc && ci,
            fmt("1000 it, 100 seeds: RMCTS %.4f, MCTS %.4f, NCMCTS %.4f; RMCTS better than NCMCTS on %d/%d "
                "(sign p = %.3g); 200 it, 50 seeds: RMCTS %.4f vs NCMCTS %.4f",
                mean_of(r), mean_of(m), mean_of(n), count_negative(dn), count_negative(dn) + count_positive(dn), p,
                mean_of(qr), mean_of(qn))};
}

Outcome budget_scaling() {
    const auto small = run_batch(default_config(100, 50));
    const auto large = run_batch(default_config(200, 50));
    const auto d = paired_diffs(large, small);
    return {mean_of(large) <= mean_of(small),
            fmt("50 seeds: B=200 %.4f vs B=100 %.4f (B=200 lower on %d/50)", mean_of(large), mean_of(small),
                count_negative(d))};
}

Outcome resampling_distribution() {
    // 3x2 grid with one observation at (0,0). Everything except (1,0) and
    // (2,0) counts as visited. Their variance ratio rises from 1 towards 4 as
    // the length scale grows; bisect for exactly 3.
    const GridSpec grid(3, 2);
    const std::vector<Observation> obs{{{0, 0}, 1.0}};
    auto ratio = [&](double ell) {
        const auto m = fit(obs, KernelParams{ell, 1.0, 1e-8});
        const auto p = predict(m, std::vector<Location>{{2, 0}, {1, 0}});
        return p[0].variance / p[1].variance;
    };
    double lo = 0.1, hi = 100.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (ratio(mid) < 3.0 ? lo : hi) = mid;
    }
    const double ell = 0.5 * (lo + hi);
    const auto model = fit(obs, KernelParams{ell, 1.0, 1e-8});
    const double achieved = ratio(ell);

    const LocationSet visited{{0, 0}, {0, 1}, {1, 1}, {2, 1}};
    int hits = 0;
    Rng rng(4242);
    for (int i = 0; i < 10000; ++i) {
        auto pick = resample_locations(model, grid, visited, nullptr, 1, rng);
        hits += pick.size() == 1 && pick[0] == Location{2, 0};
    }
    const double freq = hits / 10000.0;

    int events = 0, bad = 0;
    for (const auto& m : rmcts_b100().missions) {
        for (const auto& e : m.resamples) {
            if (e.eligible < 30) continue;
            ++events;
            bad += e.size != 30;
        }
    }
    const bool ok = std::abs(achieved - 3.0) < 1e-9 && std::abs(freq - 0.75) <= 0.02 && bad == 0 && events > 0;
    return {ok, fmt("variance ratio %.12f, high-variance frequency %.4f; %d resampling events, %d with |V| != 30",
                    achieved, freq, events, bad)};
}

Outcome determinism() {
    const auto dir = fs::temp_directory_path() / "ipp_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    nlohmann::json doc = {{"field", {{"type", "mixture"}}}, {"robots", 3}, {"budget", 100}, {"runs", 2}};
    std::ofstream(dir / "cfg.json") << doc.dump(2);
    const std::string cfg = (dir / "cfg.json").string();
    std::vector<std::string> outs{(dir / "a").string(), (dir / "b").string()};
    for (const auto& out : outs) {
        const char* argv[] = {"ipp", "compare", "--config", cfg.c_str(), "--out", out.c_str(), "--seed", "11"};
        if (run_cli(8, argv) != 0) return {false, "compare invocation failed"};
    }
    int compared = 0, differing = 0;
    for (const auto& e : fs::recursive_directory_iterator(dir / "a")) {
        const auto ext = e.path().extension();
        if (!e.is_regular_file() || (ext != ".csv" && e.path().filename() != "metrics.json")) continue;
        const auto twin = dir / "b" / fs::relative(e.path(), dir / "a");
        ++compared;
        differing += !fs::exists(twin) || slurp(e.path()) != slurp(twin);
    }
    return {compared > 0 && differing == 0, fmt("%d files compared byte-for-byte, %d differ", compared, differing)};
}

Outcome cost_statistics() {
    Rng rng(99);
    const CostParams cost{0.5, 1.0};
    double sum = 0.0, lo = 1e9, hi = -1e9;
    for (int i = 0; i < 10000; ++i) {
        const double c = gen_cost({0, 0}, {4, 6}, cost, rng);
        sum += c;
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    const double mean = sum / 10000.0;
    return {std::abs(mean - 5.5) <= 0.02 && lo >= 5.0 && hi <= 6.0,
            fmt("mean %.4f, min %.4f, max %.4f", mean, lo, hi)};
}

Outcome planning_time() {
    nlohmann::json doc = {{"field", {{"type", "mixture"}}}, {"robots", 1}, {"budget", 100}, {"runs", 1}};
    const auto cfg = parse_config(doc);
    const auto setup = make_run_setup(cfg, 0);
    const auto t0 = Clock::now();
    const auto m = run_mission(cfg.mission(), setup.field, setup.pool, 0);
    const double wall = seconds_since(t0);
    return {m.planning_seconds < 60.0,
            fmt("planning %.2f s (mission wall clock %.2f s, %zu steps)", m.planning_seconds, wall,
                m.robots[0].steps.size() - 1)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1  gp oracle equivalence", gp_oracle},
        {"2  kernel spot values", kernel_spot_values},
        {"3  ucb exploration guarantee", ucb_guarantee},
        {"4  budget safety", budget_safety},
        {"5  non-duplication", non_duplication},
        {"6  method ordering", method_ordering},
        {"7  budget scaling", budget_scaling},
        {"8  resampling distribution", resampling_distribution},
        {"9  determinism", determinism},
        {"10 cost model statistics", cost_statistics},
        {"11 planning time", planning_time},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("%s  criterion %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(),
                    seconds_since(t0));
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
