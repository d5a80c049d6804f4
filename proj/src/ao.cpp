#include "irswpcn/ao.hpp"

#include "irswpcn/kernel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

namespace irswpcn {

namespace {

constexpr double kFeasibilityTolerance = 1e-6;

double rel_change(double before, double after) {
  return std::abs(after - before) / std::max(std::abs(before), 1e-12);
}

// Uniform amplitude at 90% of what makes the downlink amplify budget tight,
// phases co-phased toward device k.
CVector initial_vector(const SystemParams& params, const DerivedChannel& ch, int k, InitStrategy init) {
  const int n = ch.num_elements;
  if (init == InitStrategy::kZero) return CVector::Zero(n);
  double amp = params.max_amplitude;
  if (std::isfinite(params.amplify_budget)) {
    const double per_unit = params.hap_power * ch.q1.sum() + params.noise_irs_dl * n;
    if (per_unit > 0.0) amp = std::min(amp, 0.9 * std::sqrt(params.amplify_budget / per_unit));
  }
  const double ref = std::arg(ch.direct_conj(k));
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = std::polar(amp, ref + std::arg(ch.cascade[k](i)));
  return v;
}

int heaviest_device(const SystemParams& params) {
  return static_cast<int>(std::max_element(params.weights.begin(), params.weights.end()) - params.weights.begin());
}

// Solvers work on weights scaled to max 1 so that the iterates do not
// depend on the overall weight scale.
SystemParams normalized(const SystemParams& params, double& scale) {
  SystemParams out = params;
  scale = *std::max_element(params.weights.begin(), params.weights.end());
  for (double& w : out.weights) w /= scale;
  return out;
}

std::vector<CVector> repeat(const CVector& v, int k) { return std::vector<CVector>(k, v); }

double rate_sum(const SystemParams& params, const DerivedChannel& ch, const ResourceAllocation& alloc,
                const std::vector<CVector>& uplink) {
  double total = 0.0;
  for (int k = 0; k < ch.num_devices; ++k) {
    if (alloc.tau(k) <= 0.0) continue;
    total += params.weights[k] * alloc.tau(k) *
             std::log2(1.0 + alloc.power(k) * uplink_gain_to_noise(params, ch, k, uplink[k]));
  }
  return total;
}

// Per-device quadratic transform on gamma_k(v) with p_k fixed.
CVector fp_device(const SystemParams& params, const DerivedChannel& ch, int k, double power, CVector v,
                  const SolverConfig& config, std::vector<double>& trace) {
  double value = uplink_gain_to_noise(params, ch, k, v);
  trace.push_back(value);
  for (int it = 0; it < config.fp_max_iterations; ++it) {
    const cplx iota = fp_update_iota_ue(params, ch, k, v);
    const auto step = solve_qcqp_vk(params, ch, k, power, iota, config.inner);
    if (step.status == conic::Status::kInfeasible) break;
    const double next = uplink_gain_to_noise(params, ch, k, step.v.coeffs());
    if (next < value) break;
    const double change = rel_change(value, next);
    v = step.v.coeffs();
    value = next;
    trace.push_back(value);
    if (change < config.fp_rel_tolerance) break;
  }
  return v;
}

// Shared-vector quadratic transform (uplink setup) or quadratic transform
// with one SCA linearization per pass (static setup), allocation fixed.
CVector fp_shared(const SystemParams& params, const DerivedChannel& ch, SharedKind kind,
                  const ResourceAllocation& alloc, CVector v, const SolverConfig& config,
                  std::vector<double>& trace) {
  const int kc = ch.num_devices;
  double value = rate_sum(params, ch, alloc, repeat(v, kc));
  trace.push_back(value);
  for (int it = 0; it < config.fp_max_iterations; ++it) {
    SharedQcqpInputs in;
    in.kind = kind;
    in.allocation = alloc;
    in.chi.resize(kc);
    in.iota.resize(kc);
    for (int k = 0; k < kc; ++k) {
      in.chi(k) = fp_update_chi(params, ch, k, alloc.power(k), v);
      in.iota(k) = fp_update_iota_ul(params, ch, k, params.weights[k], alloc.tau(k), alloc.power(k), in.chi(k), v);
    }
    in.current = v;
    const auto step = solve_qcqp_shared(params, ch, in, config.inner);
    if (step.status == conic::Status::kInfeasible) break;
    const double next = rate_sum(params, ch, alloc, repeat(step.v.coeffs(), kc));
    if (next < value) break;
    const double change = rel_change(value, next);
    v = step.v.coeffs();
    value = next;
    trace.push_back(value);
    if (change < config.fp_rel_tolerance) break;
  }
  return v;
}

using Clock = std::chrono::steady_clock;

void finish(Solution& sol, const SystemParams& params, const DerivedChannel& ch, double weight_scale,
            Clock::time_point start) {
  for (double& t : sol.objective_trace) t *= weight_scale;
  sol.params = params;
  sol.objective = weighted_sum_throughput(params, ch, sol.allocation, sol.reflections);
  sol.feasibility = check_feasibility(sol.setup, params, ch, sol.allocation, sol.reflections, kFeasibilityTolerance);
  sol.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
}

// Shared AO skeleton for the two setups whose downlink vector is lifted.
// `update_uplink` improves the uplink vectors for a fixed allocation.
template <typename Update>
Solution lifted_ao(Setup setup, const SystemParams& original, const DerivedChannel& ch, const SolverConfig& config,
                   std::vector<CVector> uplink, Update update_uplink) {
  const auto start = Clock::now();
  original.validate();
  config.validate();
  double scale = 1.0;
  const SystemParams params = normalized(original, scale);
  const int kc = ch.num_devices;

  auto gains_of = [&](const std::vector<CVector>& vs) {
    RVector g(kc);
    for (int k = 0; k < kc; ++k) g(k) = uplink_gain_to_noise(params, ch, k, vs[k]);
    return g;
  };

  Solution sol;
  sol.setup = setup;
  TimePowerSolution relaxed = solve_time_power_sdp(params, ch, gains_of(uplink), uplink, config.inner);
  if (relaxed.status == conic::Status::kInfeasible) throw ModelError("initial allocation program is infeasible");
  sol.objective_trace.push_back(relaxed.objective);

  for (int it = 0; it < config.ao_max_iterations; ++it) {
    std::vector<CVector> next_uplink = update_uplink(params, relaxed.allocation(), uplink, sol.fp_traces);
    const auto next = solve_time_power_sdp(params, ch, gains_of(next_uplink), next_uplink, config.inner);
    ++sol.iterations;
    if (next.status == conic::Status::kInfeasible || next.objective < relaxed.objective) {
      sol.note = "stopped: allocation step did not improve";
      sol.converged = true;
      break;
    }
    const double change = rel_change(relaxed.objective, next.objective);
    relaxed = next;
    uplink = std::move(next_uplink);
    sol.objective_trace.push_back(relaxed.objective);
    if (change < config.ao_rel_tolerance) {
      sol.converged = true;
      break;
    }
  }

  std::mt19937_64 rng(config.randomization_seed);
  const auto picked =
      gaussian_randomization(params, ch, relaxed.lifted_dl, relaxed.tau0, config.randomization_count, rng);
  const CVector& v0 = picked.v.coeffs();
  const auto final_alloc =
      solve_time_power_convex(params, time_power_inputs(params, ch, v0, uplink), config.inner);
  if (final_alloc.status == conic::Status::kInfeasible) throw ModelError("final allocation program is infeasible");

  sol.allocation = final_alloc.allocation();
  sol.reflections.setup = setup;
  sol.reflections.downlink = picked.v;
  if (setup == Setup::kUserAdaptive) {
    for (const auto& v : uplink) sol.reflections.uplink.emplace_back(v);
  } else {
    sol.reflections.uplink.emplace_back(uplink[0]);
  }
  finish(sol, original, ch, scale, start);
  return sol;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(ao_rel_tolerance > 0.0) || !(fp_rel_tolerance > 0.0)) throw std::invalid_argument("tolerances must be > 0");
  if (ao_max_iterations < 1 || fp_max_iterations < 1) throw std::invalid_argument("iteration caps must be >= 1");
  if (randomization_count < 0) throw std::invalid_argument("randomization_count must be >= 0");
}

Solution solve_ue(const SystemParams& params, const DerivedChannel& ch, const SolverConfig& config) {
  std::vector<CVector> init;
  for (int k = 0; k < ch.num_devices; ++k) init.push_back(initial_vector(params, ch, k, config.init));
  return lifted_ao(Setup::kUserAdaptive, params, ch, config, std::move(init),
                   [&](const SystemParams& p, const ResourceAllocation& alloc, std::vector<CVector> vs,
                       std::vector<std::vector<double>>& traces) {
                     for (int k = 0; k < ch.num_devices; ++k) {
                       traces.emplace_back();
                       vs[k] = fp_device(p, ch, k, alloc.power(k), vs[k], config, traces.back());
                     }
                     return vs;
                   });
}

Solution solve_ul(const SystemParams& params, const DerivedChannel& ch, const SolverConfig& config) {
  const CVector init = initial_vector(params, ch, heaviest_device(params), config.init);
  return lifted_ao(Setup::kUplinkAdaptive, params, ch, config, repeat(init, ch.num_devices),
                   [&](const SystemParams& p, const ResourceAllocation& alloc, const std::vector<CVector>& vs,
                       std::vector<std::vector<double>>& traces) {
                     traces.emplace_back();
                     return repeat(fp_shared(p, ch, SharedKind::kUplink, alloc, vs[0], config, traces.back()),
                                   ch.num_devices);
                   });
}

Solution solve_st(const SystemParams& original, const DerivedChannel& ch, const SolverConfig& config) {
  const auto start = Clock::now();
  original.validate();
  config.validate();
  double scale = 1.0;
  const SystemParams params = normalized(original, scale);
  const int kc = ch.num_devices;

  CVector v0 = initial_vector(params, ch, heaviest_device(params), config.init);
  Solution sol;
  sol.setup = Setup::kStatic;
  auto alloc_for = [&](const CVector& v) {
    return solve_time_power_convex(params, time_power_inputs(params, ch, v, repeat(v, kc)), config.inner);
  };
  TimePowerSolution current = alloc_for(v0);
  if (current.status == conic::Status::kInfeasible) throw ModelError("initial allocation program is infeasible");
  sol.objective_trace.push_back(current.objective);

  for (int it = 0; it < config.ao_max_iterations; ++it) {
    sol.fp_traces.emplace_back();
    const CVector next_v =
        fp_shared(params, ch, SharedKind::kStatic, current.allocation(), v0, config, sol.fp_traces.back());
    const auto next = alloc_for(next_v);
    ++sol.iterations;
    if (next.status == conic::Status::kInfeasible || next.objective < current.objective) {
      sol.note = "stopped: allocation step did not improve";
      sol.converged = true;
      break;
    }
    const double change = rel_change(current.objective, next.objective);
    current = next;
    v0 = next_v;
    sol.objective_trace.push_back(current.objective);
    if (change < config.ao_rel_tolerance) {
      sol.converged = true;
      break;
    }
  }

  sol.allocation = current.allocation();
  sol.reflections.setup = Setup::kStatic;
  sol.reflections.downlink = ReflectionVector(v0);
  finish(sol, original, ch, scale, start);
  return sol;
}

SystemParams passive_params(const SystemParams& params) {
  SystemParams out = params;
  out.max_amplitude = 1.0;
  out.noise_irs_dl = 0.0;
  out.noise_irs_ul = 0.0;
  out.amplify_budget = kInf;
  return out;
}

Solution solve_passive_baseline(const SystemParams& params, const DerivedChannel& ch, Setup setup,
                                const SolverConfig& config) {
  const SystemParams p = passive_params(params);
  Solution sol;
  switch (setup) {
    case Setup::kUserAdaptive: sol = solve_ue(p, ch, config); break;
    case Setup::kStatic: sol = solve_st(p, ch, config); break;
    case Setup::kUplinkAdaptive: sol = solve_ul(p, ch, config); break;
  }
  sol.passive = true;
  return sol;
}

Solution solve(Setup setup, const SystemParams& params, const DerivedChannel& ch, const SolverConfig& config) {
  switch (setup) {
    case Setup::kUserAdaptive: return solve_ue(params, ch, config);
    case Setup::kUplinkAdaptive: return solve_ul(params, ch, config);
    case Setup::kStatic: return solve_st(params, ch, config);
  }
  throw std::invalid_argument("unknown setup");
}

}  // namespace irswpcn
