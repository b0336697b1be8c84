#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ibp/scheduler.hpp"
#include "ibp/system_model.hpp"

namespace ibp {

struct ScenarioSource {
  enum class Kind { Tracking, Random, File };
  Kind kind = Kind::Tracking;
  double T = 1.0;   // tracking
  double q = 0.02;  // tracking
  int n_x = 4;      // random
  int S = 8;        // random
  std::string path;  // file
};

struct BenchConfig {
  std::vector<int> horizons;
  int runs = 1;
  std::uint64_t base_seed = 0;
  std::vector<Strategy> strategies;
  ScenarioSource source;
  std::string out_path;
  SearchOptions search;
};

struct BenchRecord {
  int horizon = 0;
  int run = 0;
  std::uint64_t seed = 0;
  Strategy strategy = Strategy::IBP;
  double cost = 0.0;
  std::int64_t expanded_nodes = 0;
  double elapsed_s = 0.0;
  std::optional<double> deviation;  // cost - IBP cost on the same instance
  bool ok = true;                   // false when the node limit was hit
};

struct AggregateRow {
  int horizon = 0;
  Strategy strategy = Strategy::IBP;
  int runs_ok = 0;
  double mean_cost = 0.0;
  double mean_expanded_nodes = 0.0;
  double mean_elapsed_s = 0.0;
  std::optional<double> mean_deviation;
};

struct BenchOutput {
  std::vector<BenchRecord> records;     // sorted by (N, run, strategy order)
  std::vector<AggregateRow> aggregate;  // per (N, strategy), failed runs excluded
};

// Seed used for horizon N, run index r.
std::uint64_t bench_run_seed(std::uint64_t base_seed, int horizon, int run);

// Executes every configured strategy on one freshly generated scenario per
// (horizon, run) pair. Runs may execute in parallel (capped by the
// IBP_THREADS environment variable, 0 or unset = auto); output ordering is
// independent of the execution schedule.
BenchOutput run_bench(const BenchConfig& config);

// CSV schema: N,run,seed,strategy,cost,expanded_nodes,elapsed_s,deviation,status
void write_records_csv(std::ostream& out, const std::vector<BenchRecord>& rs);
// CSV schema: N,strategy,runs_ok,mean_cost,mean_expanded_nodes,mean_elapsed_s,mean_deviation
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rs);

BenchConfig bench_config_from_json(const nlohmann::json& j);
BenchConfig load_bench_config(const std::string& path);

}  // namespace ibp
