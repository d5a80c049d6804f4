#pragma once

#include "irswpcn/channel.hpp"
#include "irswpcn/conic.hpp"
#include "irswpcn/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace irswpcn {

// Quadratic-transform auxiliaries.

/// iota_k = z_k(v_k) / (sigma_n2^2 v^H Q1 v + sigma_z2^2)
cplx fp_update_iota_ue(const SystemParams& params, const DerivedChannel& ch, int k, const CVector& v);

/// chi_k = uplink SINR of device k under v at power p.
double fp_update_chi(const SystemParams& params, const DerivedChannel& ch, int k, double power, const CVector& v);

/// iota_k = sqrt(w tau (1+chi) p) z_k(v) / (p |z_k(v)|^2 + sigma_n2^2 v^H Q1 v + sigma_z2^2)
cplx fp_update_iota_ul(const SystemParams& params, const DerivedChannel& ch, int k, double weight, double tau,
                       double power, double chi, const CVector& v);

enum class InitStrategy { kCoPhased, kZero };

struct SolverConfig {
  double ao_rel_tolerance = 1e-4;
  int ao_max_iterations = 50;
  double fp_rel_tolerance = 1e-5;
  int fp_max_iterations = 30;
  int randomization_count = 500;
  std::uint64_t randomization_seed = 0;
  InitStrategy init = InitStrategy::kCoPhased;
  conic::Settings inner;

  void validate() const;
};

struct Solution {
  Setup setup = Setup::kUserAdaptive;
  bool passive = false;
  SystemParams params;  // parameters the solver actually used
  ResourceAllocation allocation;
  ReflectionSet reflections;
  double objective = 0.0;                      // weighted sum throughput of the returned point
  std::vector<double> objective_trace;         // one entry per AO iteration
  std::vector<std::vector<double>> fp_traces;  // inner-loop surrogate values, one list per FP run
  FeasibilityReport feasibility;
  int iterations = 0;
  double wall_time = 0.0;
  bool converged = false;
  std::string note;
};

Solution solve_ue(const SystemParams& params, const DerivedChannel& ch, const SolverConfig& config = {});
Solution solve_ul(const SystemParams& params, const DerivedChannel& ch, const SolverConfig& config = {});
Solution solve_st(const SystemParams& params, const DerivedChannel& ch, const SolverConfig& config = {});

/// Passive IRS: a_max = 1, no amplifier noise, no amplify budget. Supports
/// the user-adaptive and static setups.
SystemParams passive_params(const SystemParams& params);
Solution solve_passive_baseline(const SystemParams& params, const DerivedChannel& ch, Setup setup,
                                const SolverConfig& config = {});

Solution solve(Setup setup, const SystemParams& params, const DerivedChannel& ch, const SolverConfig& config = {});

// Single-device closed forms.

enum class Link { kDownlink, kUplink };

/// kCauchySchwarz maximizes |z(v)|^2 under the amplify budget:
///   a_n = c |b_n| / w_n,  w_n = P_A |g_n|^2 + sigma_n1^2 (DL) or p |h_n|^2 + sigma_n2^2 (UL).
/// kEqualGain equalizes |g_n| |h_n| a_n across elements, a_n = c / (|g_n| |h_n|).
/// Both scale c so the budget is tight, then clip at a_max.
enum class AmplitudeRule { kCauchySchwarz, kEqualGain };

struct ClosedFormVector {
  RVector amplitude;
  RVector phase;
  double scale = 0.0;  // c before clipping
  bool clipped = false;
  CVector coeffs() const;
};

ClosedFormVector closed_form_single_device(const SystemParams& params, const DerivedChannel& ch, Link link,
                                           double power = 0.0,
                                           AmplitudeRule rule = AmplitudeRule::kCauchySchwarz);

}  // namespace irswpcn
