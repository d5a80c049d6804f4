// irswpcn command-line tool: solve one instance, run a sweep, run quick
// self-checks, or print the default configuration.

#include "irswpcn/harness.hpp"
#include "irswpcn/kernel.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

using namespace irswpcn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> workers;
  std::string scheme;
};

void add_common(CLI::App* cmd, Options& opt, bool config_required) {
  auto* c = cmd->add_option("--config", opt.config, "configuration file (INI)");
  if (config_required) c->required();
  cmd->add_option("--seed", opt.seed, "master seed (overrides the config)");
  cmd->add_option("--out", opt.out, "output directory (overrides the config)");
  cmd->add_option("--workers", opt.workers, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--scheme", opt.scheme, "ue_active, ul_active, static_active, ue_passive or static_passive");
}

ExperimentConfig load(const Options& opt) {
  ExperimentConfig config = opt.config.empty() ? ExperimentConfig{} : load_config(opt.config);
  if (opt.seed) config.seed = *opt.seed;
  if (!opt.out.empty()) config.output_dir = opt.out;
  if (opt.workers) config.workers = *opt.workers;
  if (!opt.scheme.empty()) {
    auto s = parse_scheme(opt.scheme);
    if (!s) throw CLI::ValidationError("--scheme", "unknown scheme '" + opt.scheme + "'");
    config.schemes = {*s};
  }
  config.validate();
  return config;
}

std::string g(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

void print_vector(std::ostream& os, const std::string& name, const ReflectionVector& v) {
  os << name << " amplitude:";
  for (int n = 0; n < v.size(); ++n) os << ' ' << g(v.amplitude(n));
  os << '\n' << name << " phase:";
  for (int n = 0; n < v.size(); ++n) os << ' ' << g(v.phase(n));
  os << '\n';
}

int run_solve(const Options& opt) {
  const ExperimentConfig config = load(opt);
  const Scheme scheme = config.schemes.front();
  RunTask task;
  task.scheme = scheme;
  task.a_max_db = is_active(scheme) ? config.amax_db.front() : 0.0;
  const TaskSetup setup = prepare_task(config, task, false);
  const Solution sol = solve_task(setup, scheme);
  const auto& ch = setup.instance.derived;

  std::ostringstream os;
  os << "scheme: " << to_string(scheme) << " (" << to_string(sol.setup) << (sol.passive ? ", passive" : ", active")
     << ")\n"
     << "seed: " << config.seed << "\n"
     << "a_max_db: " << g(task.a_max_db) << "\n"
     << "objective_bps_hz: " << g(sol.objective) << "\n"
     << "tau0: " << g(sol.allocation.tau0) << "\n";
  for (int k = 0; k < ch.num_devices; ++k) {
    os << "device " << k << ": tau " << g(sol.allocation.tau(k)) << " power_w " << g(sol.allocation.power(k))
       << " harvested_j " << g(harvested_energy(sol.params, ch, k, sol.reflections.downlink, sol.allocation.tau0))
       << " rate " << g(throughput(sol.params, ch, k, sol.allocation.tau(k), sol.allocation.power(k),
                                   sol.reflections.uplink_for(k)))
       << '\n';
  }
  os << "energy_j: "
     << g(total_energy_consumption(sol.params, ch, sol.allocation, sol.reflections,
                                   sol.passive ? EnergyMode::kPassive : EnergyMode::kActive))
     << '\n'
     << "iterations: " << sol.iterations << (sol.converged ? " (converged)" : " (iteration cap)") << '\n'
     << "trace:";
  for (double t : sol.objective_trace) os << ' ' << g(t);
  os << '\n' << "feasibility: " << sol.feasibility.summary() << '\n';
  print_vector(os, "v0", sol.reflections.downlink);
  for (std::size_t i = 0; i < sol.reflections.uplink.size(); ++i)
    print_vector(os, "v" + std::to_string(i + 1), sol.reflections.uplink[i]);

  std::cout << os.str();
  if (!opt.out.empty()) {
    std::filesystem::create_directories(opt.out);
    std::ofstream(std::filesystem::path(opt.out) / "solution.txt") << os.str();
  }
  return sol.feasibility.feasible ? kExitOk : kExitSolver;
}

int run_sweep_cmd(const Options& opt) {
  const ExperimentConfig config = load(opt);
  const auto result = run_sweep(config, &std::cerr);
  write_outputs(config.output_dir, config, result);
  std::cerr << "wrote " << result.records.size() << " records to " << config.output_dir << '\n';
  if (result.aborted) {
    std::cerr << "sweep aborted: " << result.summary << '\n';
    return kExitSolver;
  }
  return kExitOk;
}

// Small instances, a handful of invariants; one line per check.
int run_check(const Options& opt) {
  ExperimentConfig config = load(opt);
  config.params.num_elements = 4;
  config.params.num_devices = 2;
  config.params.weights = {1.0, 1.0};
  config.geometry.num_devices = 2;
  int failures = 0;
  auto report = [&](const std::string& name, bool ok, const std::string& detail) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << (detail.empty() ? "" : ": " + detail) << '\n';
    failures += !ok;
  };

  bool monotone = true, feasible = true, ordered = true;
  std::string detail;
  for (int r = 0; r < 3; ++r) {
    RunTask task{0.0, Scheme::kUeActive, config.amax_db.empty() ? 10.0 : config.amax_db.front(), r};
    const TaskSetup setup = prepare_task(config, task, false);
    double prev_obj = kInf;
    for (Scheme s : {Scheme::kUeActive, Scheme::kUlActive, Scheme::kStaticActive}) {
      const Solution sol = solve_task(setup, s);
      for (std::size_t i = 1; i < sol.objective_trace.size(); ++i)
        if (sol.objective_trace[i] < sol.objective_trace[i - 1] - 1e-8) monotone = false;
      if (!sol.feasibility.feasible) {
        feasible = false;
        detail = to_string(s) + " " + sol.feasibility.summary();
      }
      if (sol.objective > prev_obj + 1e-4) ordered = false;
      prev_obj = sol.objective;
    }
  }
  report("objective traces nondecreasing", monotone, "");
  report("solutions feasible", feasible, detail);
  report("setup ordering ue >= ul >= static", ordered, "");

  const TaskSetup setup = prepare_task(config, {0.0, Scheme::kUeActive, 10.0, 0}, false);
  const auto& ch = setup.instance.derived;
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal;
  auto random_vector = [&] {
    CVector v(ch.num_elements);
    for (auto& x : v) x = cplx(normal(rng), normal(rng));
    return v;
  };
  double worst_tangent = 0.0, worst_bound = 0.0;
  for (int i = 0; i < 200; ++i) {
    const CVector v = random_vector(), e = random_vector();
    const int k = i % ch.num_devices;
    const double exact_v = harvest_rate(setup.params, ch, k, v) / setup.params.efficiency;
    const double exact_e = harvest_rate(setup.params, ch, k, e) / setup.params.efficiency;
    worst_tangent = std::max(worst_tangent,
                             std::abs(sca_surrogate_qk(setup.params, ch, k, e, e) - exact_e) / exact_e);
    worst_bound = std::max(worst_bound, (sca_surrogate_qk(setup.params, ch, k, v, e) - exact_v) / exact_v);
  }
  report("sca surrogate tangent", worst_tangent < 1e-12, "max rel err " + g(worst_tangent));
  report("sca surrogate lower bound", worst_bound < 1e-9, "max rel excess " + g(worst_bound));

  double worst_chi = 0.0;
  for (int i = 0; i < 50; ++i) {
    const CVector v = random_vector();
    const int k = i % ch.num_devices;
    const double p = 1e-3 * (1 + i);
    const double sinr = uplink_sinr(setup.params, ch, k, ReflectionVector(v), p);
    worst_chi = std::max(worst_chi, std::abs(fp_update_chi(setup.params, ch, k, p, v) - sinr) / sinr);
  }
  report("sinr auxiliary matches model", worst_chi < 1e-12, "max rel err " + g(worst_chi));

  const Solution a = solve_task(setup, Scheme::kUeActive);
  const Solution b = solve_task(setup, Scheme::kUeActive);
  report("solve deterministic", a.objective == b.objective && a.allocation.tau == b.allocation.tau, "");
  return failures ? kExitSolver : kExitOk;
}

int run_emit(const Options& opt) {
  std::ostringstream os;
  write_config(os, ExperimentConfig{});
  if (opt.config.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream out(opt.config);
    if (!out) throw ConfigError("cannot write '" + opt.config + "'");
    out << os.str();
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active-IRS wireless powered network simulator"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);
  Options opt;
  auto* solve_cmd = app.add_subcommand("solve", "solve one instance and print the solution");
  auto* sweep_cmd = app.add_subcommand("sweep", "run a Monte Carlo sweep and write CSV files");
  auto* check_cmd = app.add_subcommand("check", "run quick invariant checks on small instances");
  auto* emit_cmd = app.add_subcommand("emit-default-config", "write the default configuration (stdout without --config)");
  add_common(solve_cmd, opt, true);
  add_common(sweep_cmd, opt, true);
  add_common(check_cmd, opt, false);
  emit_cmd->add_option("--config", opt.config, "output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*solve_cmd) return run_solve(opt);
    if (*sweep_cmd) return run_sweep_cmd(opt);
    if (*check_cmd) return run_check(opt);
    if (*emit_cmd) return run_emit(opt);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitUsage;
}
