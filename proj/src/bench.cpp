#include "ibp/bench.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ibp/rng.hpp"
#include "ibp/scenario_io.hpp"

namespace ibp {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int requested_threads() {
  const char* env = std::getenv("IBP_THREADS");
  if (!env) return 0;
  const int v = std::atoi(env);
  return v > 0 ? v : 0;  // 0 = auto
}

Scenario instantiate(const BenchConfig& cfg, const Scenario* file_scenario,
                     int horizon, std::uint64_t seed) {
  switch (cfg.source.kind) {
    case ScenarioSource::Kind::Tracking:
      return make_tracking_scenario(cfg.source.T, cfg.source.q, horizon, seed);
    case ScenarioSource::Kind::Random:
      return make_random_scenario(cfg.source.n_x, cfg.source.S, horizon, seed);
    case ScenarioSource::Kind::File:
      return truncate_scenario(*file_scenario, horizon);
  }
  throw std::invalid_argument("bench: unknown scenario source");
}

}  // namespace

std::uint64_t bench_run_seed(std::uint64_t base_seed, int horizon, int run) {
  const std::uint64_t key = (static_cast<std::uint64_t>(horizon) << 32) |
                            static_cast<std::uint32_t>(run);
  return base_seed ^ splitmix64(key);
}

BenchOutput run_bench(const BenchConfig& cfg) {
  if (cfg.horizons.empty()) throw std::invalid_argument("bench: horizons empty");
  if (cfg.runs < 1) throw std::invalid_argument("bench: runs must be >= 1");
  if (cfg.strategies.empty()) {
    throw std::invalid_argument("bench: strategies empty");
  }

  Scenario file_scenario;
  if (cfg.source.kind == ScenarioSource::Kind::File) {
    file_scenario = load_scenario(cfg.source.path);
  }

  const int num_h = static_cast<int>(cfg.horizons.size());
  const int num_s = static_cast<int>(cfg.strategies.size());
  const int tasks = num_h * cfg.runs;
  std::vector<BenchRecord> records(
      static_cast<std::size_t>(tasks) * num_s);
  std::vector<std::string> task_errors(tasks);

  const int threads = requested_threads();
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) \
    num_threads(threads > 0 ? threads : omp_get_max_threads())
#endif
  for (int t = 0; t < tasks; ++t) {
    const int hi = t / cfg.runs;
    const int run = t % cfg.runs;
    const int N = cfg.horizons[hi];
    const std::uint64_t seed = bench_run_seed(cfg.base_seed, N, run);
    try {
      const Scenario sc = instantiate(cfg, &file_scenario, N, seed);
      std::optional<double> ibp_cost;
      for (int si = 0; si < num_s; ++si) {
        BenchRecord& rec = records[static_cast<std::size_t>(t) * num_s + si];
        rec.horizon = N;
        rec.run = run;
        rec.seed = seed;
        rec.strategy = cfg.strategies[si];
        try {
          const SearchResult res =
              run_strategy(cfg.strategies[si], sc, cfg.search);
          rec.cost = res.cost.total;
          rec.expanded_nodes = res.expanded_nodes;
          rec.elapsed_s = res.elapsed_s;
          if (cfg.strategies[si] == Strategy::IBP) ibp_cost = res.cost.total;
        } catch (const NodeLimitError&) {
          rec.ok = false;
        }
      }
      if (ibp_cost) {
        for (int si = 0; si < num_s; ++si) {
          BenchRecord& rec = records[static_cast<std::size_t>(t) * num_s + si];
          if (rec.ok) rec.deviation = rec.cost - *ibp_cost;
        }
      }
    } catch (const std::exception& e) {
      task_errors[t] = e.what();
    }
  }
  (void)threads;

  for (int t = 0; t < tasks; ++t) {
    if (!task_errors[t].empty()) {
      throw std::runtime_error("bench task failed: " + task_errors[t]);
    }
  }

  BenchOutput out;
  out.records = std::move(records);  // (N, run, strategy) order by layout

  for (int hi = 0; hi < num_h; ++hi) {
    for (int si = 0; si < num_s; ++si) {
      AggregateRow row;
      row.horizon = cfg.horizons[hi];
      row.strategy = cfg.strategies[si];
      double cost = 0.0, nodes = 0.0, elapsed = 0.0, dev = 0.0;
      int dev_count = 0;
      for (int run = 0; run < cfg.runs; ++run) {
        const BenchRecord& rec =
            out.records[(static_cast<std::size_t>(hi) * cfg.runs + run) *
                            num_s +
                        si];
        if (!rec.ok) continue;
        ++row.runs_ok;
        cost += rec.cost;
        nodes += static_cast<double>(rec.expanded_nodes);
        elapsed += rec.elapsed_s;
        if (rec.deviation) {
          dev += *rec.deviation;
          ++dev_count;
        }
      }
      if (row.runs_ok > 0) {
        row.mean_cost = cost / row.runs_ok;
        row.mean_expanded_nodes = nodes / row.runs_ok;
        row.mean_elapsed_s = elapsed / row.runs_ok;
        if (dev_count == row.runs_ok) row.mean_deviation = dev / dev_count;
      }
      out.aggregate.push_back(row);
    }
  }
  return out;
}

void write_records_csv(std::ostream& out, const std::vector<BenchRecord>& rs) {
  out << "N,run,seed,strategy,cost,expanded_nodes,elapsed_s,deviation,status\n";
  for (const BenchRecord& r : rs) {
    out << r.horizon << ',' << r.run << ',' << r.seed << ','
        << strategy_name(r.strategy) << ',';
    if (r.ok) out << fmt_double(r.cost);
    out << ',';
    if (r.ok) out << r.expanded_nodes;
    out << ',';
    if (r.ok) out << fmt_double(r.elapsed_s);
    out << ',';
    if (r.ok && r.deviation) out << fmt_double(*r.deviation);
    out << ',' << (r.ok ? "ok" : "node_limit") << '\n';
  }
}

void write_aggregate_csv(std::ostream& out,
                         const std::vector<AggregateRow>& rs) {
  out << "N,strategy,runs_ok,mean_cost,mean_expanded_nodes,mean_elapsed_s,"
         "mean_deviation\n";
  for (const AggregateRow& r : rs) {
    out << r.horizon << ',' << strategy_name(r.strategy) << ',' << r.runs_ok
        << ',';
    if (r.runs_ok > 0) {
      out << fmt_double(r.mean_cost) << ',' << fmt_double(r.mean_expanded_nodes)
          << ',' << fmt_double(r.mean_elapsed_s) << ',';
      if (r.mean_deviation) out << fmt_double(*r.mean_deviation);
    } else {
      out << ",,,";
    }
    out << '\n';
  }
}

BenchConfig bench_config_from_json(const nlohmann::json& j) {
  BenchConfig cfg;
  cfg.horizons = j.at("horizons").get<std::vector<int>>();
  cfg.runs = j.at("runs").get<int>();
  cfg.base_seed = j.at("base_seed").get<std::uint64_t>();
  for (const auto& name : j.at("strategies")) {
    cfg.strategies.push_back(strategy_from_name(name.get<std::string>()));
  }
  const auto& src = j.at("scenario");
  const std::string type = src.at("type").get<std::string>();
  if (type == "tracking") {
    cfg.source.kind = ScenarioSource::Kind::Tracking;
    cfg.source.T = src.value("T", 1.0);
    cfg.source.q = src.value("q", 0.02);
  } else if (type == "random") {
    cfg.source.kind = ScenarioSource::Kind::Random;
    cfg.source.n_x = src.at("n_x").get<int>();
    cfg.source.S = src.at("S").get<int>();
  } else if (type == "file") {
    cfg.source.kind = ScenarioSource::Kind::File;
    cfg.source.path = src.at("path").get<std::string>();
  } else {
    throw std::invalid_argument("bench config: unknown scenario type " + type);
  }
  cfg.out_path = j.value("out", std::string{});
  if (j.contains("node_limit")) {
    cfg.search.node_limit = j.at("node_limit").get<std::int64_t>();
  }
  return cfg;
}

BenchConfig load_bench_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open bench config: " + path);
  nlohmann::json j;
  in >> j;
  return bench_config_from_json(j);
}

}  // namespace ibp
