#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ibp/bench.hpp"
#include "ibp/rng.hpp"
#include "ibp/scenario_io.hpp"
#include "ibp/scheduler.hpp"

namespace {

using nlohmann::json;

json schedule_to_json(const ibp::Schedule& s, bool flat) {
  json out = json::array();
  for (const ibp::Action& a : s.steps) {
    if (flat) {
      out.push_back(a.front());
    } else {
      out.push_back(a);
    }
  }
  return out;
}

int cmd_gen(const std::string& kind, int N, std::uint64_t seed, double T,
            double q, int n_x, int S, const std::string& out_path) {
  const ibp::Scenario sc = kind == "tracking"
                               ? ibp::make_tracking_scenario(T, q, N, seed)
                               : ibp::make_random_scenario(n_x, S, N, seed);
  const json j = ibp::scenario_to_json(sc);
  if (out_path.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open for writing: " + out_path);
    out << j.dump(2) << '\n';
  }
  return 0;
}

int cmd_run(const std::string& scenario_path, const std::string& strategy,
            const ibp::SearchOptions& opt) {
  const ibp::Scenario sc = ibp::load_scenario(scenario_path);
  const ibp::SearchResult res =
      ibp::run_strategy(ibp::strategy_from_name(strategy), sc, opt);
  json j;
  j["strategy"] = ibp::strategy_name(res.strategy);
  j["schedule"] = schedule_to_json(res.schedule, opt.subset_size == 1);
  j["cost"] = res.cost.total;
  j["per_step_cost"] = res.cost.per_step;
  j["expanded_nodes"] = res.expanded_nodes;
  j["elapsed_s"] = res.elapsed_s;
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_bench(const std::string& config_path, const std::string& out_override) {
  ibp::BenchConfig cfg = ibp::load_bench_config(config_path);
  if (!out_override.empty()) cfg.out_path = out_override;
  const ibp::BenchOutput out = ibp::run_bench(cfg);
  if (cfg.out_path.empty()) {
    ibp::write_records_csv(std::cout, out.records);
  } else {
    std::ofstream f(cfg.out_path);
    if (!f) throw std::runtime_error("cannot open for writing: " + cfg.out_path);
    ibp::write_records_csv(f, out.records);
  }
  // Aggregate table goes to stdout for quick inspection and plotting.
  ibp::write_aggregate_csv(std::cout, out.aggregate);
  return 0;
}

int cmd_verify(int trials, int max_S, int max_N, int max_nx,
               std::uint64_t seed) {
  int ok = 0;
  for (int t = 0; t < trials; ++t) {
    ibp::Rng pick(seed ^ ibp::splitmix64(static_cast<std::uint64_t>(t)));
    const int n_x = pick.uniform_int(1, max_nx);
    const int S = pick.uniform_int(1, max_S);
    const int N = pick.uniform_int(1, max_N);
    ibp::Scenario sc =
        ibp::make_random_scenario(n_x, S, N, pick.next_u64());
    sc.cost_fn = static_cast<ibp::CostFn>(t % 3);
    const ibp::SearchResult oracle = ibp::exhaustive_search(sc);
    const ibp::SearchResult ibp_res = ibp::ibp_search(sc);
    const double ref = oracle.cost.total;
    const double diff = std::abs(ibp_res.cost.total - ref);
    if (diff <= 1e-9 * std::max(1.0, std::abs(ref))) {
      ++ok;
    } else {
      std::ostringstream msg;
      msg << "trial " << t << " MISMATCH: n_x=" << n_x << " S=" << S
          << " N=" << N << " oracle=" << ref << " ibp=" << ibp_res.cost.total;
      std::cout << msg.str() << '\n';
    }
  }
  std::cout << ok << '/' << trials << " OK\n";
  return ok == trials ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-step sensor scheduling via information-based pruning"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a scenario JSON");
  bool gen_tracking = false, gen_random = false;
  int gen_N = 4, gen_nx = 4, gen_S = 8;
  std::uint64_t gen_seed = 0;
  double gen_T = 1.0, gen_q = 0.02;
  std::string gen_out;
  gen->add_flag("--tracking", gen_tracking, "constant-velocity tracking scenario");
  gen->add_flag("--random", gen_random, "randomized scenario");
  gen->add_option("--N", gen_N, "horizon length")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "rng seed");
  gen->add_option("--T", gen_T, "sampling interval (tracking)");
  gen->add_option("--q", gen_q, "diffusion strength (tracking)");
  gen->add_option("--nx", gen_nx, "state dimension (random)");
  gen->add_option("--S", gen_S, "number of sensors (random)");
  gen->add_option("--out", gen_out, "output path (default stdout)");

  // run
  auto* run = app.add_subcommand("run", "run one strategy on a scenario file");
  std::string run_scenario, run_strategy = "ibp";
  ibp::SearchOptions run_opt;
  std::int64_t run_node_limit = 0;
  int run_budget_k = -1;
  run->add_option("--scenario", run_scenario, "scenario JSON path")->required();
  run->add_option("--strategy", run_strategy,
                  "exhaustive|greedy|zb|cov|sip|ibp");
  run->add_option("--node-limit", run_node_limit, "abort after this many expanded nodes");
  run->add_option("--subset-size", run_opt.subset_size, "sensors scheduled per step");
  run->add_option("--budget-k", run_budget_k,
                  "measurement budget; enables the virtual sensor");
  run->add_option("--tol", run_opt.tol, "PSD comparison tolerance");
  bool run_no_filter = false;
  run->add_flag("--no-dominance-filter", run_no_filter,
                "disable the sensor-information filter (ibp only)");

  // bench
  auto* bench = app.add_subcommand("bench", "Monte Carlo sweep from a config file");
  std::string bench_config, bench_out;
  bench->add_option("--config", bench_config, "bench config JSON")->required();
  bench->add_option("--out", bench_out, "records CSV path (overrides config)");

  // verify
  auto* verify = app.add_subcommand(
      "verify", "oracle-vs-IBP equivalence on random small instances");
  int v_trials = 50, v_max_S = 4, v_max_N = 5, v_max_nx = 4;
  std::uint64_t v_seed = 1;
  verify->add_option("--trials", v_trials, "number of random instances");
  verify->add_option("--max-S", v_max_S, "max sensors");
  verify->add_option("--max-N", v_max_N, "max horizon");
  verify->add_option("--max-nx", v_max_nx, "max state dimension");
  verify->add_option("--seed", v_seed, "base seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      if (gen_tracking == gen_random) {
        throw std::invalid_argument("gen: pass exactly one of --tracking / --random");
      }
      return cmd_gen(gen_tracking ? "tracking" : "random", gen_N, gen_seed,
                     gen_T, gen_q, gen_nx, gen_S, gen_out);
    }
    if (run->parsed()) {
      if (run_node_limit > 0) run_opt.node_limit = run_node_limit;
      if (run_budget_k >= 0) {
        const ibp::Scenario sc = ibp::load_scenario(run_scenario);
        run_opt.budget = ibp::BudgetConstraint::max_measurements(
            sc.horizon(), sc.num_sensors(), run_budget_k);
        run_opt.virtual_sensor = true;
      }
      run_opt.dominance_filter = !run_no_filter;
      return cmd_run(run_scenario, run_strategy, run_opt);
    }
    if (bench->parsed()) return cmd_bench(bench_config, bench_out);
    if (verify->parsed()) {
      return cmd_verify(v_trials, v_max_S, v_max_N, v_max_nx, v_seed);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
