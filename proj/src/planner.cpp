#include "ipp/planner.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "ipp/errors.hpp"

namespace ipp {

void CostParams::validate() const {
    if (!(alpha > 0.0)) throw ParameterError("cost alpha must be > 0");
    if (!(lambda_max >= 0.0)) throw ParameterError("cost lambda_max must be >= 0");
}

void PlannerParams::validate() const {
    if (branching < 2 || branching % 2 != 0) throw ParameterError("branching M must be an even integer >= 2");
    if (!(exploration >= 0.0)) throw ParameterError("exploration c must be >= 0");
    if (!(discount >= 0.0 && discount <= 1.0)) throw ParameterError("discount must lie in [0, 1]");
    if (iterations < 1) throw ParameterError("iterations must be >= 1");
}

double gen_cost(Location a, Location b, const CostParams& cost, Rng& rng) {
    double noise = 0.0;
    if (cost.lambda_max > 0.0) noise = std::uniform_real_distribution<double>(0.0, cost.lambda_max)(rng);
    return cost.alpha * manhattan_distance(a, b) + noise;
}

double worst_cost(Location a, Location b, const CostParams& cost) {
    return cost.alpha * manhattan_distance(a, b) + cost.lambda_max;
}

double reward(double variance, int dist) {
    assert(dist > 0 && "reward needs a positive travel distance");
    return variance / dist;
}

double ucb(double q, int n, double t, double c) {
    if (n == 0) return std::numeric_limits<double>::infinity();
    return q + c * std::sqrt(std::log(t) / n);
}

bool admissible(const PlanningContext& ctx, Location from, double budget, Location target) {
    if (target == ctx.final) return worst_cost(from, target, ctx.cost) <= budget;
    return worst_cost(from, target, ctx.cost) + worst_cost(target, ctx.final, ctx.cost) <= budget;
}

namespace {

// Candidate locations with their frozen variances, addressed by index so the
// rollout loop can track consumption with a flat mask.
struct CandidateTable {
    std::vector<Location> locs;
    std::vector<double> variance;
    std::unordered_map<Location, int, LocationHash> index;

    explicit CandidateTable(const PlanningContext& ctx) {
        locs = ctx.candidates.items();
        variance.reserve(locs.size());
        index.reserve(locs.size());
        for (int i = 0; i < static_cast<int>(locs.size()); ++i) {
            auto it = ctx.variances.find(locs[i]);
            if (it == ctx.variances.end()) {
                throw ParameterError("no variance for candidate (" + std::to_string(locs[i].x) + "," +
                                     std::to_string(locs[i].y) + ")");
            }
            variance.push_back(it->second);
            index.emplace(locs[i], i);
        }
    }

    std::vector<char> mask(const LocationSet& consumed) const {
        std::vector<char> m(locs.size(), 0);
        for (auto l : consumed) {
            if (auto it = index.find(l); it != index.end()) m[it->second] = 1;
        }
        return m;
    }

    double reward_at(const PlanningContext& ctx, Location from, Location to) const {
        if (to == ctx.final) return 0.0;
        auto it = index.find(to);
        return reward(it == index.end() ? 0.0 : variance[it->second], manhattan_distance(from, to));
    }
};

struct Scratch {
    std::vector<std::pair<std::uint64_t, int>> keyed;
    std::vector<Location> children;
    std::vector<Location> admissible;
};

void children_into(const PlanningContext& ctx, const CandidateTable& table, Location from,
                   const std::vector<char>& consumed, Rng& rng, Scratch& s) {
    auto& keyed = s.keyed;
    auto& out = s.children;
    keyed.clear();
    out.clear();
    for (int i = 0; i < static_cast<int>(table.locs.size()); ++i) {
        const Location l = table.locs[i];
        if (consumed[i] || l == from) continue;
        // (distance, y, x) packed so that integer order is the tie-break order
        const auto key = (static_cast<std::uint64_t>(manhattan_distance(from, l)) << 42) |
                         (static_cast<std::uint64_t>(l.y) << 21) | static_cast<std::uint64_t>(l.x);
        keyed.emplace_back(key, i);
    }
    const std::size_t half = static_cast<std::size_t>(ctx.params.branching / 2);
    const std::size_t nearest = std::min(half, keyed.size());
    if (nearest < keyed.size()) {
        std::nth_element(keyed.begin(), keyed.begin() + nearest, keyed.end());
    }
    std::sort(keyed.begin(), keyed.begin() + nearest);
    bool has_final = false;
    for (std::size_t k = 0; k < nearest; ++k) {
        out.push_back(table.locs[keyed[k].second]);
        has_final |= out.back() == ctx.final;
    }

    const std::size_t rest = keyed.size() - nearest;
    const std::size_t random = std::min(half > 0 ? half - 1 : 0, rest);
    for (std::size_t k = 0; k < random; ++k) {
        std::uniform_int_distribution<std::size_t> pick(nearest + k, keyed.size() - 1);
        std::swap(keyed[nearest + k], keyed[pick(rng)]);
        out.push_back(table.locs[keyed[nearest + k].second]);
        has_final |= out.back() == ctx.final;
    }
    if (!has_final && from != ctx.final) out.push_back(ctx.final);
}

void admissible_into(const PlanningContext& ctx, Location from, double budget, Scratch& s) {
    s.admissible.clear();
    for (auto l : s.children) {
        if (admissible(ctx, from, budget, l)) s.admissible.push_back(l);
    }
}

double rollout_impl(const PlanningContext& ctx, const CandidateTable& table, Location loc, double budget,
                    std::vector<char> consumed, double start_reward, Rng& rng, Scratch& s) {
    double ret = start_reward;
    double weight = 1.0;
    const std::size_t max_depth = table.locs.size() + 1;
    for (std::size_t depth = 0; depth < max_depth && loc != ctx.final; ++depth) {
        children_into(ctx, table, loc, consumed, rng, s);
        admissible_into(ctx, loc, budget, s);
        if (s.admissible.empty()) break;
        std::uniform_int_distribution<std::size_t> pick(0, s.admissible.size() - 1);
        const Location next = s.admissible[pick(rng)];
        budget -= gen_cost(loc, next, ctx.cost, rng);
        weight *= ctx.params.discount;
        ret += weight * table.reward_at(ctx, loc, next);
        if (auto it = table.index.find(next); it != table.index.end()) consumed[it->second] = 1;
        loc = next;
    }
    return ret;
}

std::optional<int> expand_impl(const PlanningContext& ctx, const CandidateTable& table, SearchTree& tree, int leaf,
                               Rng& rng, Scratch& s) {
    if (!tree.node(leaf).initialized) {
        auto& node = tree.node(leaf);
        node.initialized = true;
        if (node.loc != ctx.final) {
            children_into(ctx, table, node.loc, table.mask(tree.path_locations(leaf)), rng, s);
            admissible_into(ctx, node.loc, node.remaining_budget, s);
            node.untried = s.admissible;
        }
    }
    auto& node = tree.node(leaf);
    if (node.untried.empty()) return std::nullopt;

    std::uniform_int_distribution<std::size_t> pick(0, node.untried.size() - 1);
    const std::size_t k = pick(rng);
    const Location target = node.untried[k];
    node.untried.erase(node.untried.begin() + static_cast<std::ptrdiff_t>(k));
    const Location from = node.loc;
    const double budget = node.remaining_budget - gen_cost(from, target, ctx.cost, rng);
    // `node` may dangle after add_child reallocates.
    return tree.add_child(leaf, target, budget, table.reward_at(ctx, from, target));
}

double rollout_node(const PlanningContext& ctx, const CandidateTable& table, const SearchTree& tree, int start,
                    Rng& rng, Scratch& s) {
    const auto& node = tree.node(start);
    return rollout_impl(ctx, table, node.loc, node.remaining_budget, table.mask(tree.path_locations(start)),
                        node.reward, rng, s);
}

}  // namespace

std::vector<Location> children_map(const PlanningContext& ctx, Location from, const LocationSet& consumed, Rng& rng) {
    ctx.params.validate();
    CandidateTable table(ctx);
    Scratch s;
    children_into(ctx, table, from, table.mask(consumed), rng, s);
    return s.children;
}

SearchTree::SearchTree(Location root, double budget) {
    TreeNode n;
    n.loc = root;
    n.remaining_budget = budget;
    nodes_.push_back(std::move(n));
}

int SearchTree::add_child(int parent, Location loc, double budget, double reward) {
    TreeNode n;
    n.loc = loc;
    n.remaining_budget = budget;
    n.reward = reward;
    n.parent = parent;
    nodes_.push_back(std::move(n));
    const int id = static_cast<int>(nodes_.size()) - 1;
    nodes_[parent].children.push_back(id);
    return id;
}

LocationSet SearchTree::path_locations(int i) const {
    std::vector<Location> rev;
    for (int cur = i; cur >= 0; cur = nodes_[cur].parent) rev.push_back(nodes_[cur].loc);
    return LocationSet(std::vector<Location>(rev.rbegin(), rev.rend()));
}

std::vector<int> select(const SearchTree& tree, double c, SelectStats* stats) {
    std::vector<int> path{tree.root()};
    int cur = tree.root();
    while (tree.node(cur).fully_expanded() && !tree.node(cur).children.empty()) {
        const auto& node = tree.node(cur);
        int best = -1;
        double best_score = -std::numeric_limits<double>::infinity();
        for (int child : node.children) {
            const auto& ch = tree.node(child);
            const double score = ucb(ch.value, ch.visits, node.visits, c);
            if (best < 0 || score > best_score) {
                best = child;
                best_score = score;
            }
        }
        if (stats) {
            bool untried_sibling = !node.untried.empty();
            for (int child : node.children) untried_sibling |= tree.node(child).visits == 0 && child != best;
            if (untried_sibling && tree.node(best).visits > 0) ++stats->violations;
        }
        cur = best;
        path.push_back(cur);
    }
    return path;
}

std::optional<int> expand(const PlanningContext& ctx, SearchTree& tree, int leaf, Rng& rng) {
    CandidateTable table(ctx);
    Scratch s;
    return expand_impl(ctx, table, tree, leaf, rng, s);
}

double rollout(const PlanningContext& ctx, const SearchTree& tree, int start, Rng& rng) {
    CandidateTable table(ctx);
    Scratch s;
    return rollout_node(ctx, table, tree, start, rng, s);
}

double rollout_from(const PlanningContext& ctx, Location loc, double budget, const LocationSet& consumed,
                    double start_reward, Rng& rng) {
    CandidateTable table(ctx);
    Scratch s;
    return rollout_impl(ctx, table, loc, budget, table.mask(consumed), start_reward, rng, s);
}

void backup(SearchTree& tree, std::span<const int> path, double leaf_return, double discount) {
    double g = leaf_return;
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
        auto& node = tree.node(*it);
        if (it != path.rbegin()) g = node.reward + discount * g;
        node.visits += 1;
        node.value += (g - node.value) / node.visits;
    }
}

PlanResult plan(const PlanningContext& ctx, Rng& rng) {
    ctx.params.validate();
    ctx.cost.validate();
    PlanResult result{ctx.final, SearchTree(ctx.current, ctx.remaining_budget), 0, 0};
    if (ctx.current == ctx.final) return result;

    CandidateTable table(ctx);
    Scratch s;
    SelectStats stats;
    auto& tree = result.tree;
    for (int it = 0; it < ctx.params.iterations; ++it) {
        auto path = select(tree, ctx.params.exploration, &stats);
        const int leaf = path.back();
        double ret = 0.0;
        if (auto child = expand_impl(ctx, table, tree, leaf, rng, s)) {
            path.push_back(*child);
            ret = rollout_node(ctx, table, tree, *child, rng, s);
        } else if (leaf == tree.root()) {
            break;  // no admissible move at all
        } else {
            ret = rollout_node(ctx, table, tree, leaf, rng, s);
        }
        backup(tree, path, ret, ctx.params.discount);
        ++result.iterations_run;
    }
    result.violations = stats.violations;

    int best = -1;
    for (int child : tree.node(tree.root()).children) {
        if (best < 0 || tree.node(child).visits > tree.node(best).visits) best = child;
    }
    if (best >= 0) result.choice = tree.node(best).loc;
    return result;
}

}  // namespace ipp
