#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ipp/gp.hpp"
#include "ipp/location.hpp"
#include "ipp/rng.hpp"

namespace ipp {

// Stochastic move cost: alpha * manhattan + Uniform[0, lambda_max].
struct CostParams {
    double alpha = 0.5;
    double lambda_max = 1.0;

    void validate() const;
};

struct PlannerParams {
    int branching = 30;        // M, even
    double exploration = 3.0;  // c in the UCB bonus
    double discount = 1.0;     // lambda applied to future rewards
    int iterations = 1000;     // nodes added per planning call

    void validate() const;
};

double gen_cost(Location a, Location b, const CostParams& cost, Rng& rng);

// Upper end of the cost support; used for budget-feasibility pruning.
double worst_cost(Location a, Location b, const CostParams& cost);

// Variance scaled by travel distance; dist must be positive.
double reward(double variance, int dist);

// +infinity for an untried action.
double ucb(double q, int n, double t, double c);

struct PlanningContext {
    Location current;
    double remaining_budget = 0.0;
    Location final;
    LocationSet candidates;  // V minus every excluded location
    VarianceMap variances;   // frozen for the whole planning call
    CostParams cost;
    PlannerParams params;
};

// A move to `target` from `from` with budget `budget` can still reach final in
// the worst case.
bool admissible(const PlanningContext& ctx, Location from, double budget, Location target);

// Bounded successor set: M/2 nearest available candidates, M/2-1 random others,
// then final. Available = candidates - consumed - {from}.
std::vector<Location> children_map(const PlanningContext& ctx, Location from, const LocationSet& consumed, Rng& rng);

struct TreeNode {
    Location loc;
    double remaining_budget = 0.0;
    double reward = 0.0;  // collected on arrival from the parent
    int visits = 0;
    double value = 0.0;
    int parent = -1;
    std::vector<int> children;
    // Admissible successors not yet attached. Filled on first expansion.
    std::vector<Location> untried;
    bool initialized = false;

    bool terminal() const { return initialized && untried.empty() && children.empty(); }
    bool fully_expanded() const { return initialized && untried.empty(); }
};

class SearchTree {
public:
    SearchTree(Location root, double budget);

    int root() const { return 0; }
    TreeNode& node(int i) { return nodes_[i]; }
    const TreeNode& node(int i) const { return nodes_[i]; }
    std::size_t size() const { return nodes_.size(); }
    int add_child(int parent, Location loc, double budget, double reward);

    // Locations on the root-to-node path, including both ends.
    LocationSet path_locations(int i) const;

private:
    std::vector<TreeNode> nodes_;
};

struct SelectStats {
    // Descents into a child while the parent still had untried successors.
    long violations = 0;
};

// Tree policy: descend by UCB (lowest index wins ties) until a node that is not
// fully expanded or has no children.
std::vector<int> select(const SearchTree& tree, double c, SelectStats* stats = nullptr);

// Attaches one untried admissible child of `leaf`; std::nullopt at terminal
// leaves.
std::optional<int> expand(const PlanningContext& ctx, SearchTree& tree, int leaf, Rng& rng);

// Random-policy episode from a tree node. The node's own reward has weight 1.
double rollout(const PlanningContext& ctx, const SearchTree& tree, int start, Rng& rng);

// Rollout from an explicit state; `start_reward` is counted with weight 1.
double rollout_from(const PlanningContext& ctx, Location loc, double budget, const LocationSet& consumed,
                    double start_reward, Rng& rng);

// Running-mean update along the path. The leaf receives `leaf_return`; each
// ancestor receives its own reward plus the discounted return of its child.
void backup(SearchTree& tree, std::span<const int> path, double leaf_return, double discount);

struct PlanResult {
    Location choice;
    SearchTree tree;
    long violations = 0;
    int iterations_run = 0;
};

PlanResult plan(const PlanningContext& ctx, Rng& rng);

inline Location plan_next(const PlanningContext& ctx, Rng& rng) { return plan(ctx, rng).choice; }

}  // namespace ipp
