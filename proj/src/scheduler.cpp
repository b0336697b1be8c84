#include "ibp/scheduler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace ibp {

namespace {

// Prune margin against the incumbent: a child is cut when its lower bound is
// >= J_min - margin, protecting optimality against floating-point ties.
constexpr double kGlobalBoundMargin = 1e-12;
constexpr std::int64_t kDefaultExhaustiveLeafLimit = 10'000'000;

class Timer {
 public:
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t0_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ =
      std::chrono::steady_clock::now();
};

bool is_virtual(const Action& a) { return a.size() == 1 && a[0] == 0; }

bool lex_less(const std::vector<Action>& a, const std::vector<Action>& b) {
  return a < b;
}

void validate_options(const Scenario& sc, const SearchOptions& opt) {
  const int S = sc.num_sensors();
  if (opt.subset_size < 1 || opt.subset_size > S) {
    throw std::invalid_argument("options: subset_size must be in [1, S]");
  }
  if (opt.virtual_sensor && opt.subset_size > 1) {
    throw std::invalid_argument(
        "options: virtual sensor is only supported in single-sensor mode");
  }
  if (opt.budget) {
    const auto& bc = *opt.budget;
    if (bc.B.cols() != static_cast<Eigen::Index>(sc.horizon()) * S) {
      throw std::invalid_argument("budget: B must have N*S columns");
    }
    if (bc.b.size() != bc.B.rows()) {
      throw std::invalid_argument("budget: b size must match B rows");
    }
    if ((bc.B.array() != 0 && bc.B.array() != 1).any()) {
      throw std::invalid_argument("budget: B entries must be binary");
    }
  }
}

// All candidate actions for one step, lexicographically ordered; the virtual
// action {0} comes first when enabled.
std::vector<Action> enumerate_step_actions(int num_sensors,
                                           const SearchOptions& opt) {
  std::vector<Action> out;
  if (opt.virtual_sensor) out.push_back(Action{0});
  if (opt.subset_size == 1) {
    for (int i = 1; i <= num_sensors; ++i) out.push_back(Action{i});
    return out;
  }
  // Fixed-size combinations in lexicographic order.
  Action combo(opt.subset_size);
  for (int i = 0; i < opt.subset_size; ++i) combo[i] = i + 1;
  for (;;) {
    out.push_back(combo);
    int pos = opt.subset_size - 1;
    while (pos >= 0 && combo[pos] == num_sensors - (opt.subset_size - 1 - pos)) {
      --pos;
    }
    if (pos < 0) break;
    ++combo[pos];
    for (int j = pos + 1; j < opt.subset_size; ++j) combo[j] = combo[j - 1] + 1;
  }
  return out;
}

// Pairwise dominance over action information matrices. Entry i is removed
// when a same-group entry j has M_j ⪰ M_i (strictly, or exactly with j
// earlier in lexicographic order). Protected entries (the virtual action)
// neither prune nor get pruned.
std::vector<int> maximal_indices(const std::vector<SymMatrix>& sims,
                                 const std::vector<int>& group,
                                 const std::vector<bool>& protected_flags,
                                 double tol) {
  const int n = static_cast<int>(sims.size());
  std::vector<bool> removed(n, false);
  for (int i = 0; i < n; ++i) {
    if (protected_flags[i]) continue;
    for (int j = 0; j < n && !removed[i]; ++j) {
      if (j == i || protected_flags[j] || removed[j]) continue;
      if (group[j] != group[i]) continue;
      const PsdOrder o = psd_compare(sims[i], sims[j], tol);
      if (o == PsdOrder::LessEq || (o == PsdOrder::Equal && j < i)) {
        removed[i] = true;
      }
    }
  }
  std::vector<int> out;
  for (int i = 0; i < n; ++i) {
    if (!removed[i]) out.push_back(i);
  }
  return out;
}

// Per-step action table plus budget bookkeeping shared by all searches.
class SearchContext {
 public:
  SearchContext(const Scenario& sc, const SearchOptions& opt, bool use_filter,
                bool use_bound)
      : sc_(sc), opt_(opt), use_bound_(use_bound) {
    sc.validate();
    validate_options(sc, opt);
    const int N = sc.horizon();
    const int S = sc.num_sensors();
    actions_ = enumerate_step_actions(S, opt);
    const int na = static_cast<int>(actions_.size());

    const Eigen::Index rows = opt.budget ? opt.budget->B.rows() : 0;
    if (opt.budget) {
      action_loads_.resize(N);
      suffix_min_ = Eigen::MatrixXi::Zero(rows, N + 1);
      for (int k = N - 1; k >= 0; --k) {
        Eigen::MatrixXi& tbl = action_loads_[k];
        tbl = Eigen::MatrixXi::Zero(rows, na);
        for (int a = 0; a < na; ++a) {
          for (int id : actions_[a]) {
            if (id == 0) continue;
            tbl.col(a) += opt.budget->B.col(k * S + id - 1);
          }
        }
        suffix_min_.col(k) =
            suffix_min_.col(k + 1) + tbl.rowwise().minCoeff();
      }
    }

    sims_.resize(N);
    surviving_.resize(N);
    for (int k = 0; k < N; ++k) {
      sims_[k].reserve(na);
      for (int a = 0; a < na; ++a) {
        sims_[k].push_back(action_info_matrix(sc, actions_[a], k));
      }
      if (use_filter) {
        // Dominance may only swap actions with identical budget footprints,
        // otherwise the swap could break feasibility of the completion.
        std::vector<int> group(na, 0);
        if (opt.budget) {
          std::vector<Eigen::VectorXi> keys;
          for (int a = 0; a < na; ++a) {
            const Eigen::VectorXi col = action_loads_[k].col(a);
            int g = -1;
            for (std::size_t u = 0; u < keys.size(); ++u) {
              if (keys[u] == col) {
                g = static_cast<int>(u);
                break;
              }
            }
            if (g < 0) {
              g = static_cast<int>(keys.size());
              keys.push_back(col);
            }
            group[a] = g;
          }
        }
        std::vector<bool> prot(na, false);
        for (int a = 0; a < na; ++a) prot[a] = is_virtual(actions_[a]);
        surviving_[k] = maximal_indices(sims_[k], group, prot, opt.tol);
      } else {
        surviving_[k].resize(na);
        for (int a = 0; a < na; ++a) surviving_[k][a] = a;
      }
    }

    if (use_bound_) {
      lb_cache_ = make_bound_cache(sc, CoverKind::MaxCover, opt.ridge);
    }
  }

  const Scenario& scenario() const { return sc_; }
  const SearchOptions& options() const { return opt_; }
  bool use_bound() const { return use_bound_; }
  int num_actions() const { return static_cast<int>(actions_.size()); }
  const Action& action(int a) const { return actions_[a]; }
  const SymMatrix& sim(int k, int a) const { return sims_[k][a]; }
  const std::vector<int>& candidates(int k) const { return surviving_[k]; }
  const std::vector<BoundingSim>& lb_cache() const { return lb_cache_; }
  Eigen::Index budget_rows() const {
    return opt_.budget ? opt_.budget->b.size() : 0;
  }

  // Can some completion through this action still satisfy the budget? Checked
  // row by row against the per-step minimum future loads; exact when rows do
  // not couple across actions (a total measurement budget, per-sensor
  // energies), conservative otherwise. Complete schedules are always checked
  // in full by construction, so returned schedules satisfy the budget exactly.
  bool feasible(const Eigen::VectorXi& loads, int k, int a) const {
    if (!opt_.budget) return true;
    const Eigen::VectorXi after =
        loads + action_loads_[k].col(a) + suffix_min_.col(k + 1);
    return (after.array() <= opt_.budget->b.array()).all();
  }

  void add_load(Eigen::VectorXi& loads, int k, int a) const {
    if (opt_.budget) loads += action_loads_[k].col(a);
  }
  void sub_load(Eigen::VectorXi& loads, int k, int a) const {
    if (opt_.budget) loads -= action_loads_[k].col(a);
  }

 private:
  const Scenario& sc_;
  const SearchOptions& opt_;
  bool use_bound_;
  std::vector<Action> actions_;
  std::vector<std::vector<SymMatrix>> sims_;    // [step][action]
  std::vector<std::vector<int>> surviving_;     // [step] -> action indices
  std::vector<Eigen::MatrixXi> action_loads_;   // [step](row, action)
  Eigen::MatrixXi suffix_min_;                  // (row, step), step <= N
  std::vector<BoundingSim> lb_cache_;
};

// Depth-first branch and bound shared by ZB, SIP and IBP; the variants
// differ only in the dominance filter (via SearchContext) and the lower
// bound attached to each child.
class BnbEngine {
 public:
  BnbEngine(const SearchContext& ctx, Strategy strategy)
      : ctx_(ctx), strategy_(strategy) {}

  SearchResult run() {
    Timer timer;
    const Scenario& sc = ctx_.scenario();
    std::vector<Action> prefix;
    Eigen::VectorXi loads = Eigen::VectorXi::Zero(ctx_.budget_rows());
    dfs(0, sc.C0, 0.0, loads, prefix);
    if (!found_) {
      throw std::runtime_error(strategy_name(strategy_) +
                               ": no feasible schedule");
    }
    SearchResult res;
    res.schedule = best_;
    res.cost = total_cost(sc, best_);
    res.expanded_nodes = expanded_;
    res.elapsed_s = timer.elapsed();
    res.strategy = strategy_;
    return res;
  }

 private:
  struct Child {
    int aidx;
    SymMatrix C;
    double known;
    double bound;
  };

  void dfs(int k, const SymMatrix& C, double known, Eigen::VectorXi& loads,
           std::vector<Action>& prefix) {
    const Scenario& sc = ctx_.scenario();
    const SearchOptions& opt = ctx_.options();
    ++expanded_;
    if (opt.node_limit && expanded_ > *opt.node_limit) {
      throw NodeLimitError(strategy_name(strategy_) + ": node limit exceeded",
                           partial_result());
    }
    if (opt.trace) opt.trace->push_back(NodeTrace{prefix, C, known});

    std::vector<Child> kids;
    for (int aidx : ctx_.candidates(k)) {
      if (!ctx_.feasible(loads, k, aidx)) continue;
      SymMatrix Cn = propagate_covariance(C, ctx_.sim(k, aidx),
                                          sc.dynamics.A[k], sc.dynamics.Q[k]);
      const double kn = known + stage_cost(Cn, sc.W[k], sc.cost_fn);
      const double bd =
          kn + (ctx_.use_bound()
                    ? lower_bound_remaining(Cn, k + 1, sc, ctx_.lb_cache())
                    : 0.0);
      kids.push_back(Child{aidx, std::move(Cn), kn, bd});
    }
    // Most promising child first; stable keeps lexicographic order on ties.
    std::stable_sort(kids.begin(), kids.end(),
                     [](const Child& a, const Child& b) {
                       return a.bound < b.bound;
                     });
    for (const Child& kid : kids) {
      if (kid.bound >= j_min_ - kGlobalBoundMargin) continue;
      prefix.push_back(ctx_.action(kid.aidx));
      ctx_.add_load(loads, k, kid.aidx);
      if (k + 1 == sc.horizon()) {
        if (kid.known < j_min_) {
          j_min_ = kid.known;
          best_.steps = prefix;
          found_ = true;
        }
      } else {
        dfs(k + 1, kid.C, kid.known, loads, prefix);
      }
      ctx_.sub_load(loads, k, kid.aidx);
      prefix.pop_back();
    }
  }

  std::optional<SearchResult> partial_result() const {
    if (!found_) return std::nullopt;
    SearchResult res;
    res.schedule = best_;
    res.cost = total_cost(ctx_.scenario(), best_);
    res.expanded_nodes = expanded_;
    res.strategy = strategy_;
    return res;
  }

  const SearchContext& ctx_;
  Strategy strategy_;
  double j_min_ = std::numeric_limits<double>::infinity();
  Schedule best_;
  bool found_ = false;
  std::int64_t expanded_ = 0;
};

}  // namespace

std::string strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Exhaustive: return "exhaustive";
    case Strategy::Greedy: return "greedy";
    case Strategy::ZB: return "zb";
    case Strategy::COV: return "cov";
    case Strategy::SIP: return "sip";
    case Strategy::IBP: return "ibp";
  }
  return "?";
}

Strategy strategy_from_name(const std::string& name) {
  for (Strategy s : {Strategy::Exhaustive, Strategy::Greedy, Strategy::ZB,
                     Strategy::COV, Strategy::SIP, Strategy::IBP}) {
    if (strategy_name(s) == name) return s;
  }
  throw std::invalid_argument("unknown strategy: " + name);
}

BudgetConstraint BudgetConstraint::max_measurements(int horizon,
                                                    int num_sensors,
                                                    int k_max) {
  BudgetConstraint bc;
  bc.B = Eigen::MatrixXi::Ones(1, horizon * num_sensors);
  bc.b = Eigen::VectorXi::Constant(1, k_max);
  return bc;
}

BudgetConstraint BudgetConstraint::per_sensor_energy(
    int horizon, const std::vector<int>& k_i) {
  const int S = static_cast<int>(k_i.size());
  BudgetConstraint bc;
  bc.B = Eigen::MatrixXi::Zero(S, horizon * S);
  bc.b = Eigen::VectorXi(S);
  for (int i = 0; i < S; ++i) {
    bc.b(i) = k_i[i];
    for (int k = 0; k < horizon; ++k) bc.B(i, k * S + i) = 1;
  }
  return bc;
}

std::vector<int> dominated_sensor_filter(
    const std::vector<SensorInfoMatrix>& sims, double tol) {
  if (sims.empty()) {
    throw std::invalid_argument("dominated_sensor_filter: empty input");
  }
  const int n = static_cast<int>(sims.size());
  std::vector<bool> removed(n, false);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n && !removed[i]; ++j) {
      if (j == i || removed[j]) continue;
      const PsdOrder o = psd_compare(sims[i].M, sims[j].M, tol);
      if (o == PsdOrder::LessEq ||
          (o == PsdOrder::Equal && sims[j].sensor_id < sims[i].sensor_id)) {
        removed[i] = true;
      }
    }
  }
  std::vector<int> out;
  for (int i = 0; i < n; ++i) {
    if (!removed[i]) out.push_back(sims[i].sensor_id);
  }
  return out;
}

std::vector<Action> expand_children(const SearchNode& node, const Scenario& sc,
                                    const SearchOptions& options) {
  if (node.step != static_cast<int>(node.prefix.size())) {
    throw std::invalid_argument("expand_children: step/prefix mismatch");
  }
  if (node.step < 0 || node.step >= sc.horizon()) {
    throw std::invalid_argument("expand_children: step out of range");
  }
  SearchContext ctx(sc, options, /*use_filter=*/false, /*use_bound=*/false);
  Eigen::VectorXi loads = Eigen::VectorXi::Zero(ctx.budget_rows());
  if (options.budget) {
    const int S = sc.num_sensors();
    for (int k = 0; k < node.step; ++k) {
      for (int id : node.prefix[k]) {
        if (id >= 1) loads += options.budget->B.col(k * S + id - 1);
      }
    }
  }
  std::vector<Action> out;
  for (int a = 0; a < ctx.num_actions(); ++a) {
    if (ctx.feasible(loads, node.step, a)) out.push_back(ctx.action(a));
  }
  return out;
}

SearchResult exhaustive_search(const Scenario& sc,
                               const SearchOptions& options) {
  Timer timer;
  SearchContext ctx(sc, options, /*use_filter=*/false, /*use_bound=*/false);
  const std::int64_t limit =
      options.node_limit.value_or(kDefaultExhaustiveLeafLimit);
  double leaves = 1.0;
  for (int k = 0; k < sc.horizon(); ++k) leaves *= ctx.num_actions();
  if (leaves > static_cast<double>(limit)) {
    throw NodeLimitError("exhaustive: instance too large (" +
                             std::to_string(leaves) + " leaves)",
                         std::nullopt);
  }

  double best_cost = std::numeric_limits<double>::infinity();
  Schedule best;
  bool found = false;
  std::int64_t expanded = 0;
  std::vector<Action> prefix;
  Eigen::VectorXi loads = Eigen::VectorXi::Zero(ctx.budget_rows());

  // Plain lexicographic enumeration; strict improvement keeps the
  // lexicographically smallest schedule among cost ties.
  auto recurse = [&](auto&& self, int k, const SymMatrix& C,
                     double known) -> void {
    ++expanded;
    for (int a = 0; a < ctx.num_actions(); ++a) {
      if (!ctx.feasible(loads, k, a)) continue;
      SymMatrix Cn = propagate_covariance(C, ctx.sim(k, a), sc.dynamics.A[k],
                                          sc.dynamics.Q[k]);
      const double kn = known + stage_cost(Cn, sc.W[k], sc.cost_fn);
      prefix.push_back(ctx.action(a));
      ctx.add_load(loads, k, a);
      if (k + 1 == sc.horizon()) {
        if (kn < best_cost) {
          best_cost = kn;
          best.steps = prefix;
          found = true;
        }
      } else {
        self(self, k + 1, Cn, kn);
      }
      ctx.sub_load(loads, k, a);
      prefix.pop_back();
    }
  };
  recurse(recurse, 0, sc.C0, 0.0);
  if (!found) throw std::runtime_error("exhaustive: no feasible schedule");

  SearchResult res;
  res.schedule = best;
  res.cost = total_cost(sc, best);
  res.expanded_nodes = expanded;
  res.elapsed_s = timer.elapsed();
  res.strategy = Strategy::Exhaustive;
  return res;
}

SearchResult greedy_search(const Scenario& sc, const SearchOptions& options) {
  Timer timer;
  SearchContext ctx(sc, options, /*use_filter=*/false, /*use_bound=*/false);
  SymMatrix C = sc.C0;
  Eigen::VectorXi loads = Eigen::VectorXi::Zero(ctx.budget_rows());
  Schedule schedule;
  std::int64_t expanded = 0;
  for (int k = 0; k < sc.horizon(); ++k) {
    ++expanded;
    double best_g = std::numeric_limits<double>::infinity();
    int best_a = -1;
    SymMatrix best_C;
    for (int a = 0; a < ctx.num_actions(); ++a) {
      if (!ctx.feasible(loads, k, a)) continue;
      SymMatrix Cn = propagate_covariance(C, ctx.sim(k, a), sc.dynamics.A[k],
                                          sc.dynamics.Q[k]);
      const double g = stage_cost(Cn, sc.W[k], sc.cost_fn);
      if (g < best_g) {
        best_g = g;
        best_a = a;
        best_C = std::move(Cn);
      }
    }
    if (best_a < 0) throw std::runtime_error("greedy: no feasible action");
    schedule.steps.push_back(ctx.action(best_a));
    ctx.add_load(loads, k, best_a);
    C = best_C;
  }
  SearchResult res;
  res.schedule = schedule;
  res.cost = total_cost(sc, schedule);
  res.expanded_nodes = expanded;
  res.elapsed_s = timer.elapsed();
  res.strategy = Strategy::Greedy;
  return res;
}

namespace {

SearchResult bnb_search(const Scenario& sc, const SearchOptions& options,
                        Strategy strategy) {
  const bool use_filter =
      strategy == Strategy::SIP ||
      (strategy == Strategy::IBP && options.dominance_filter);
  const bool use_bound = strategy == Strategy::IBP;
  SearchContext ctx(sc, options, use_filter, use_bound);
  return BnbEngine(ctx, strategy).run();
}

}  // namespace

SearchResult zb_search(const Scenario& sc, const SearchOptions& options) {
  return bnb_search(sc, options, Strategy::ZB);
}

SearchResult sip_search(const Scenario& sc, const SearchOptions& options) {
  return bnb_search(sc, options, Strategy::SIP);
}

SearchResult ibp_search(const Scenario& sc, const SearchOptions& options) {
  return bnb_search(sc, options, Strategy::IBP);
}

SearchResult cov_search(const Scenario& sc, const SearchOptions& options) {
  Timer timer;
  SearchContext ctx(sc, options, /*use_filter=*/false, /*use_bound=*/false);

  struct CovNode {
    std::vector<Action> prefix;
    SymMatrix C;
    double known;
    Eigen::VectorXi loads;
  };

  std::vector<CovNode> level;
  level.push_back(CovNode{{}, sc.C0, 0.0,
                          Eigen::VectorXi::Zero(ctx.budget_rows())});
  std::int64_t expanded = 0;

  for (int k = 0; k < sc.horizon(); ++k) {
    std::vector<CovNode> candidates;
    for (const CovNode& node : level) {
      ++expanded;
      for (int a = 0; a < ctx.num_actions(); ++a) {
        if (!ctx.feasible(node.loads, k, a)) continue;
        SymMatrix Cn = propagate_covariance(
            node.C, ctx.sim(k, a), sc.dynamics.A[k], sc.dynamics.Q[k]);
        const double kn =
            node.known + stage_cost(Cn, sc.W[k], sc.cost_fn);
        CovNode child{node.prefix, std::move(Cn), kn, node.loads};
        child.prefix.push_back(ctx.action(a));
        ctx.add_load(child.loads, k, a);
        candidates.push_back(std::move(child));
      }
    }
    if (candidates.empty()) {
      throw std::runtime_error("cov: no feasible schedule");
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const CovNode& a, const CovNode& b) {
                if (a.known != b.known) return a.known < b.known;
                return lex_less(a.prefix, b.prefix);
              });
    if (k + 1 == sc.horizon()) {
      level = std::move(candidates);
      break;
    }
    // A node is dropped when an earlier node (cheaper or equal accumulated
    // cost by the sort) has a covariance that is ⪯ its own: by monotonicity
    // and cost ordering every completion of the dropped node is matched or
    // beaten. Covariance domination alone is not sufficient here because
    // accumulated running costs differ between same-level nodes. Under a
    // budget only nodes with identical consumption are comparable.
    std::vector<bool> removed(candidates.size(), false);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      for (std::size_t j = 0; j < i && !removed[i]; ++j) {
        if (removed[j]) continue;
        if (options.budget && candidates[j].loads != candidates[i].loads) {
          continue;
        }
        const PsdOrder o =
            psd_compare(candidates[j].C, candidates[i].C, options.tol);
        if (o == PsdOrder::LessEq || o == PsdOrder::Equal) removed[i] = true;
      }
    }
    std::vector<CovNode> survivors;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (!removed[i]) survivors.push_back(std::move(candidates[i]));
    }
    if (options.node_limit &&
        static_cast<std::int64_t>(survivors.size()) > *options.node_limit) {
      throw NodeLimitError("cov: level width exceeds node limit",
                           std::nullopt);
    }
    level = std::move(survivors);
  }

  const CovNode& best = level.front();  // sorted by (cost, schedule)
  SearchResult res;
  res.schedule.steps = best.prefix;
  res.cost = total_cost(sc, res.schedule);
  res.expanded_nodes = expanded;
  res.elapsed_s = timer.elapsed();
  res.strategy = Strategy::COV;
  return res;
}

SearchResult run_strategy(Strategy s, const Scenario& sc,
                          const SearchOptions& options) {
  switch (s) {
    case Strategy::Exhaustive: return exhaustive_search(sc, options);
    case Strategy::Greedy: return greedy_search(sc, options);
    case Strategy::ZB: return zb_search(sc, options);
    case Strategy::COV: return cov_search(sc, options);
    case Strategy::SIP: return sip_search(sc, options);
    case Strategy::IBP: return ibp_search(sc, options);
  }
  throw std::invalid_argument("run_strategy: unknown strategy");
}

}  // namespace ibp
