#pragma once

#include "irswpcn/ao.hpp"
#include "irswpcn/channel.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace irswpcn {

enum class Scheme { kUeActive, kUlActive, kStaticActive, kUePassive, kStaticPassive };

std::string to_string(Scheme scheme);
std::optional<Scheme> parse_scheme(const std::string& name);
bool is_active(Scheme scheme);
Setup setup_of(Scheme scheme);

enum class SweepVariable { kHapPowerDbm, kDeviceX, kIrsX };

std::string to_string(SweepVariable variable);
std::optional<SweepVariable> parse_sweep_variable(const std::string& name);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a sweep needs. Powers are stored in Watts (converted from dBm
/// when the file is read).
struct ExperimentConfig {
  SystemParams params;
  GeometryConfig geometry;
  FadingConfig fading;
  std::vector<Scheme> schemes{Scheme::kUeActive, Scheme::kUlActive, Scheme::kStaticActive, Scheme::kUePassive,
                              Scheme::kStaticPassive};
  std::vector<double> amax_db{10.0, 25.0};
  SweepVariable sweep = SweepVariable::kHapPowerDbm;
  std::vector<double> grid{10.0, 15.0, 20.0, 25.0, 30.0};
  bool irs_follows_devices = true;  // x_ue sweeps move the IRS with the cluster
  int num_realizations = 50;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string output_dir = "results";
  SolverConfig solver;

  void validate() const;
};

/// INI text with sections [system], [geometry], [fading], [experiment],
/// [solver]. Missing keys keep their defaults; unknown keys throw ConfigError.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);
/// Writes `config` back in the same format (dBm, metres, seconds).
void write_config(std::ostream& out, const ExperimentConfig& config);

/// One (sweep value, scheme, a_max) point for one realization.
struct RunTask {
  double sweep_value = 0.0;
  Scheme scheme = Scheme::kUeActive;
  double a_max_db = 0.0;
  int realization = 0;
};

struct RunRecord {
  RunTask task;
  std::uint64_t seed = 0;
  std::string status = "ok";
  bool feasible = false;
  double objective = 0.0;
  double energy = 0.0;
  double tau0 = 0.0;
  int iterations = 0;
  bool converged = false;
  double wall_time = 0.0;
};

/// Parameters and instance of one task; fading depends only on the
/// realization index, so every sweep point sees the same draws.
struct TaskSetup {
  SystemParams params;
  GeometryConfig geometry;
  Instance instance;
  SolverConfig solver;
};

/// With apply_sweep false the task's sweep value is ignored and the base
/// configuration is used as is.
TaskSetup prepare_task(const ExperimentConfig& config, const RunTask& task, bool apply_sweep = true);
RunRecord run_task(const ExperimentConfig& config, const RunTask& task);

/// Solves one prepared task (active or passive according to the scheme).
Solution solve_task(const TaskSetup& setup, Scheme scheme);

struct AggregateRow {
  double sweep_value = 0.0;
  Scheme scheme = Scheme::kUeActive;
  double a_max_db = 0.0;
  int count = 0;
  int failures = 0;
  double objective_mean = 0.0;
  double objective_stderr = 0.0;
  double energy_mean = 0.0;
  double energy_stderr = 0.0;
};

/// Groups successful records by (sweep value, scheme, a_max) and reports
/// mean and standard error (sample standard deviation / sqrt(n)). Groups
/// without a successful record are dropped with a warning on `warn`.
std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& records, std::ostream* warn = nullptr);

struct SweepResult {
  std::vector<RunRecord> records;
  std::vector<AggregateRow> rows;
  bool aborted = false;
  std::string summary;
};

/// Runs every task, grouped by sweep point; stops after a point at which
/// more than half the runs of some (scheme, a_max) failed.
SweepResult run_sweep(const ExperimentConfig& config, std::ostream* log = nullptr);

std::vector<RunTask> tasks_for_point(const ExperimentConfig& config, double sweep_value);

inline constexpr int kCsvSchemaVersion = 1;

void write_records_csv(std::ostream& out, const ExperimentConfig& config, const std::vector<RunRecord>& records);
void write_aggregate_csv(std::ostream& out, const ExperimentConfig& config, const std::vector<AggregateRow>& rows);
void write_timing_csv(std::ostream& out, const std::vector<RunRecord>& records);

/// Git-style blob id: sha1("blob <size>\0" + content), lowercase hex.
std::string content_hash(const std::string& content);

/// Writes records.csv, aggregate.csv, timing.csv and manifest.txt into `dir`.
void write_outputs(const std::string& dir, const ExperimentConfig& config, const SweepResult& result);

std::string version();

}  // namespace irswpcn
