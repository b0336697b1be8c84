#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ibp/bounding.hpp"
#include "ibp/riccati.hpp"
#include "ibp/system_model.hpp"

namespace ibp {

enum class Strategy { Exhaustive, Greedy, ZB, COV, SIP, IBP };

std::string strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);

// Binary budget system B·u <= b over the N·S scheduling decisions; column
// k*S + (i-1) is sensor i at step k. The virtual sensor loads no column.
struct BudgetConstraint {
  Eigen::MatrixXi B;  // rows × (N·S), entries in {0, 1}
  Eigen::VectorXi b;

  // Budget "at most k_max measurements over the horizon" (all-ones row).
  static BudgetConstraint max_measurements(int horizon, int num_sensors,
                                           int k_max);
  // Per-sensor energy budgets: sensor i may measure at most k_i times.
  static BudgetConstraint per_sensor_energy(int horizon,
                                            const std::vector<int>& k_i);
};

// Expanded-node trace entry; recorded when SearchOptions::trace is set.
struct NodeTrace {
  std::vector<Action> prefix;
  SymMatrix C;
  double known_cost = 0.0;
};

struct SearchOptions {
  int subset_size = 1;  // S' sensors fused per step
  std::optional<BudgetConstraint> budget;
  bool virtual_sensor = false;  // adds the zero-information action {0}
  double tol = 1e-9;            // PSD comparisons in dominance filters
  std::optional<std::int64_t> node_limit;
  bool dominance_filter = true;  // sensor-information filter in IBP
  double ridge = kDefaultRidge;
  std::vector<NodeTrace>* trace = nullptr;  // filled by B&B searches
};

struct SearchResult {
  Schedule schedule;
  CostValue cost;
  std::int64_t expanded_nodes = 0;
  double elapsed_s = 0.0;
  Strategy strategy = Strategy::Exhaustive;
};

// Raised when node_limit is exceeded; carries the incumbent, if any.
class NodeLimitError : public std::runtime_error {
 public:
  NodeLimitError(const std::string& what, std::optional<SearchResult> best)
      : std::runtime_error(what), best_so_far(std::move(best)) {}
  std::optional<SearchResult> best_so_far;
};

// Ids of the maximal elements of the information-matrix partial order:
// sensor j is dropped when some i has M_i ⪰ M_j, the smaller id surviving
// exact ties. Selecting a dropped sensor can never beat its dominator.
std::vector<int> dominated_sensor_filter(
    const std::vector<SensorInfoMatrix>& sims, double tol = 1e-9);

// Feasible actions at a node, in lexicographic order (virtual action first
// when enabled). Applies subset enumeration and budget feasibility, not the
// dominance filter.
struct SearchNode {
  int step = 0;
  std::vector<Action> prefix;
};
std::vector<Action> expand_children(const SearchNode& node, const Scenario& sc,
                                    const SearchOptions& options);

// Full enumeration, ties broken to the lexicographically smallest schedule.
// Used as the small-instance oracle; errors when the tree exceeds node_limit
// (default guard 10^7 leaves).
SearchResult exhaustive_search(const Scenario& sc,
                               const SearchOptions& options = {});

// One-step lookahead; optimal for scalar states, suboptimal in general.
SearchResult greedy_search(const Scenario& sc,
                           const SearchOptions& options = {});

// Depth-first branch and bound with the zero lower bound and no dominance
// filter.
SearchResult zb_search(const Scenario& sc, const SearchOptions& options = {});

// zb_search plus the sensor-information dominance filter.
SearchResult sip_search(const Scenario& sc, const SearchOptions& options = {});

// Breadth-first level-wise search pruning nodes dominated in both covariance
// and accumulated cost.
SearchResult cov_search(const Scenario& sc, const SearchOptions& options = {});

// Information-based pruning: dominance filter plus the bounding-sensor lower
// bound, children sorted by bound, pruned against the incumbent.
SearchResult ibp_search(const Scenario& sc, const SearchOptions& options = {});

SearchResult run_strategy(Strategy s, const Scenario& sc,
                          const SearchOptions& options = {});

}  // namespace ibp
