#include "irswpcn/harness.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#ifndef IRSWPCN_VERSION
#define IRSWPCN_VERSION "0.0.0"
#endif

namespace irswpcn {

namespace {

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// status strings end up in a CSV cell
std::string clean(std::string s) {
  std::replace_if(s.begin(), s.end(), [](char c) { return c == ',' || c == '\n' || c == '\r' || c == '"'; }, ' ');
  return s;
}

std::vector<double> amax_for(const ExperimentConfig& config, Scheme scheme) {
  if (!is_active(scheme)) return {0.0};
  return config.amax_db;
}

void run_parallel(int workers, std::size_t count, const std::function<void(std::size_t)>& body) {
  workers = std::max(1, std::min<int>(workers, static_cast<int>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  for (auto& t : pool) t.join();
}

using GroupKey = std::tuple<double, int, double>;

GroupKey key_of(const RunTask& t) { return {t.sweep_value, static_cast<int>(t.scheme), t.a_max_db}; }

}  // namespace

std::string version() { return IRSWPCN_VERSION; }

std::vector<RunTask> tasks_for_point(const ExperimentConfig& config, double sweep_value) {
  std::vector<RunTask> out;
  for (Scheme s : config.schemes)
    for (double a : amax_for(config, s))
      for (int r = 0; r < config.num_realizations; ++r) out.push_back({sweep_value, s, a, r});
  return out;
}

TaskSetup prepare_task(const ExperimentConfig& config, const RunTask& task, bool apply_sweep) {
  TaskSetup setup;
  setup.params = config.params;
  setup.geometry = config.geometry;
  if (apply_sweep) {
    switch (config.sweep) {
      case SweepVariable::kHapPowerDbm: setup.params.hap_power = dbm_to_watts(task.sweep_value); break;
      case SweepVariable::kDeviceX:
        setup.geometry.cluster_center_x = task.sweep_value;
        if (config.irs_follows_devices) setup.geometry.irs_x = task.sweep_value;
        break;
      case SweepVariable::kIrsX: setup.geometry.irs_x = task.sweep_value; break;
    }
  }
  if (is_active(task.scheme)) setup.params.max_amplitude = db_to_amplitude(task.a_max_db);
  const RealizationSeed seed{config.seed, static_cast<std::uint64_t>(task.realization)};
  setup.instance = generate_instance(setup.geometry, config.fading, setup.params.num_elements, seed);
  setup.solver = config.solver;
  setup.solver.randomization_seed = seed.stream(LinkType::kRandomization)();
  return setup;
}

Solution solve_task(const TaskSetup& setup, Scheme scheme) {
  const Setup kind = setup_of(scheme);
  if (is_active(scheme)) return solve(kind, setup.params, setup.instance.derived, setup.solver);
  return solve_passive_baseline(setup.params, setup.instance.derived, kind, setup.solver);
}

RunRecord run_task(const ExperimentConfig& config, const RunTask& task) {
  RunRecord rec;
  rec.task = task;
  rec.seed = config.seed;
  try {
    const TaskSetup setup = prepare_task(config, task);
    const Solution sol = solve_task(setup, task.scheme);
    rec.wall_time = sol.wall_time;
    rec.iterations = sol.iterations;
    rec.converged = sol.converged;
    rec.tau0 = sol.allocation.tau0;
    rec.feasible = sol.feasibility.feasible;
    rec.energy = total_energy_consumption(sol.params, setup.instance.derived, sol.allocation, sol.reflections,
                                          sol.passive ? EnergyMode::kPassive : EnergyMode::kActive);
    if (rec.feasible) {
      rec.objective = sol.objective;
    } else {
      rec.status = "infeasible";
    }
  } catch (const std::exception& e) {
    rec.status = clean(std::string("error: ") + e.what());
    rec.feasible = false;
  }
  return rec;
}

std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& records, std::ostream* warn) {
  struct Acc {
    std::vector<double> obj, energy;
    int failures = 0;
  };
  std::map<GroupKey, Acc> groups;
  for (const auto& r : records) {
    auto& g = groups[key_of(r.task)];
    if (r.status == "ok") {
      g.obj.push_back(r.objective);
      g.energy.push_back(r.energy);
    } else {
      ++g.failures;
    }
  }
  auto stats = [](std::vector<double> xs, double& mean, double& se) {
    // sorted so the sum does not depend on record order
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double s = 0.0;
    for (double x : xs) s += x;
    mean = s / n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    se = xs.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  };
  std::vector<AggregateRow> rows;
  for (const auto& [key, g] : groups) {
    const auto& [value, scheme, amax] = key;
    if (g.obj.empty()) {
      if (warn)
        *warn << "warning: no successful runs for " << to_string(static_cast<Scheme>(scheme)) << " a_max_db=" << num(amax)
              << " at " << num(value) << "; group omitted\n";
      continue;
    }
    AggregateRow row;
    row.sweep_value = value;
    row.scheme = static_cast<Scheme>(scheme);
    row.a_max_db = amax;
    row.count = static_cast<int>(g.obj.size());
    row.failures = g.failures;
    stats(g.obj, row.objective_mean, row.objective_stderr);
    stats(g.energy, row.energy_mean, row.energy_stderr);
    rows.push_back(row);
  }
  return rows;
}

SweepResult run_sweep(const ExperimentConfig& config, std::ostream* log) {
  config.validate();
  SweepResult result;
  for (double value : config.grid) {
    const auto tasks = tasks_for_point(config, value);
    std::vector<RunRecord> recs(tasks.size());
    run_parallel(config.workers, tasks.size(), [&](std::size_t i) { recs[i] = run_task(config, tasks[i]); });
    result.records.insert(result.records.end(), recs.begin(), recs.end());

    std::map<GroupKey, std::pair<int, int>> tally;  // failures, total
    for (const auto& r : recs) {
      auto& t = tally[key_of(r.task)];
      t.first += r.status != "ok";
      ++t.second;
    }
    int failed = 0;
    for (const auto& [key, t] : tally) failed += t.first;
    if (log)
      *log << to_string(config.sweep) << "=" << num(value) << ": " << recs.size() << " runs, " << failed
           << " failed\n";
    for (const auto& [key, t] : tally) {
      if (2 * t.first > t.second) {
        std::ostringstream os;
        os << to_string(static_cast<Scheme>(std::get<1>(key))) << " a_max_db=" << num(std::get<2>(key)) << " at "
           << to_string(config.sweep) << "=" << num(value) << ": " << t.first << " of " << t.second
           << " runs failed";
        result.aborted = true;
        result.summary = os.str();
        break;
      }
    }
    if (result.aborted) break;
  }
  result.rows = aggregate(result.records, log);
  return result;
}

void write_records_csv(std::ostream& out, const ExperimentConfig& config, const std::vector<RunRecord>& records) {
  out << to_string(config.sweep)
      << ",scheme,a_max_db,realization,seed,status,feasible,objective_bps_hz,energy_j,tau0_s,iterations,converged\n";
  for (const auto& r : records) {
    const bool ok = r.status == "ok";
    out << num(r.task.sweep_value) << ',' << to_string(r.task.scheme) << ',' << num(r.task.a_max_db) << ','
        << r.task.realization << ',' << r.seed << ',' << r.status << ',' << (r.feasible ? "true" : "false") << ','
        << (ok ? num(r.objective) : "") << ',' << (ok ? num(r.energy) : "") << ',' << (ok ? num(r.tau0) : "") << ','
        << r.iterations << ',' << (r.converged ? "true" : "false") << '\n';
  }
}

void write_aggregate_csv(std::ostream& out, const ExperimentConfig& config, const std::vector<AggregateRow>& rows) {
  out << to_string(config.sweep)
      << ",scheme,a_max_db,count,failures,objective_mean,objective_stderr,energy_mean,energy_stderr\n";
  for (const auto& r : rows)
    out << num(r.sweep_value) << ',' << to_string(r.scheme) << ',' << num(r.a_max_db) << ',' << r.count << ','
        << r.failures << ',' << num(r.objective_mean) << ',' << num(r.objective_stderr) << ','
        << num(r.energy_mean) << ',' << num(r.energy_stderr) << '\n';
}

void write_timing_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << "sweep_value,scheme,a_max_db,realization,wall_time_s\n";
  for (const auto& r : records)
    out << num(r.task.sweep_value) << ',' << to_string(r.task.scheme) << ',' << num(r.task.a_max_db) << ','
        << r.task.realization << ',' << num(r.wall_time) << '\n';
}

std::string content_hash(const std::string& content) {
  const std::string blob = "blob " + std::to_string(content.size()) + '\0' + content;
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(blob.data(), blob.size(), digest, &len, EVP_sha1(), nullptr) != 1)
    throw std::runtime_error("sha1 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

void write_outputs(const std::string& dir, const ExperimentConfig& config, const SweepResult& result) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::ostringstream records, agg, timing, cfg;
  write_records_csv(records, config, result.records);
  write_aggregate_csv(agg, config, result.rows);
  write_timing_csv(timing, result.records);
  write_config(cfg, config);

  auto dump = [&](const std::string& name, const std::string& text) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
    out << text;
  };
  dump("records.csv", records.str());
  dump("aggregate.csv", agg.str());
  dump("timing.csv", timing.str());

  std::ostringstream m;
  m << "irswpcn " << version() << "\n"
    << "csv_schema_version = " << kCsvSchemaVersion << "\n"
    << "seed = " << config.seed << "\n"
    << "status = " << (result.aborted ? "aborted: " + result.summary : "complete") << "\n"
    << "records = " << result.records.size() << "\n"
    << "config_hash = " << content_hash(cfg.str()) << "\n"
    << "records.csv = " << content_hash(records.str()) << "\n"
    << "aggregate.csv = " << content_hash(agg.str()) << "\n"
    << "\n# config\n"
    << cfg.str();
  dump("manifest.txt", m.str());
}

}  // namespace irswpcn
