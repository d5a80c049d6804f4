#pragma once

#include "irswpcn/channel.hpp"
#include "irswpcn/conic.hpp"
#include "irswpcn/model.hpp"

#include <random>

// Convex subproblems of the alternating optimization. Every solve reports a
// conic::Status instead of throwing; callers decide on fallbacks.
namespace irswpcn {

/// Outcome of a time/energy allocation solve. `lifted_dl` is the relaxed
/// W0 (SDP only; empty otherwise).
struct TimePowerSolution {
  double tau0 = 0.0;
  RVector tau;
  RVector energy;
  CMatrix lifted_dl;
  double objective = 0.0;
  double gap = kInf;
  conic::Status status = conic::Status::kInfeasible;

  ResourceAllocation allocation() const { return ResourceAllocation::from_energy(tau0, tau, energy); }
};

/// Rank-relaxed joint (tau0, tau, f, W0) program for fixed uplink vectors.
/// `gains[k]` is the SINR per unit power gamma_k(v_k); `uplink[k]` is the
/// vector device k transmits under (the same vector repeated for shared setups).
TimePowerSolution solve_time_power_sdp(const SystemParams& params, const DerivedChannel& ch,
                                       const RVector& gains, const std::vector<CVector>& uplink,
                                       const conic::Settings& settings = {});

/// Per-device data of the allocation program with a fixed downlink vector.
struct TimePowerInputs {
  RVector gains;         // gamma_k
  RVector harvest_rate;  // harvested power per second of downlink [W]
  RVector power_cap;     // largest p_k allowed by the uplink amplify budget (+inf if none)
};

TimePowerInputs time_power_inputs(const SystemParams& params, const DerivedChannel& ch, const CVector& downlink,
                                  const std::vector<CVector>& uplink);

/// Allocation program with the downlink vector fixed (convex, no lifting).
TimePowerSolution solve_time_power_convex(const SystemParams& params, const TimePowerInputs& inputs,
                                          const conic::Settings& settings = {});

struct ReflectionSolve {
  ReflectionVector v;
  double objective = 0.0;
  conic::Status status = conic::Status::kInfeasible;
};

/// Objective of the per-device quadratic-transform program at (v, iota).
double qcqp_vk_objective(const SystemParams& params, const DerivedChannel& ch, int k, const CVector& v,
                         cplx iota);

/// Maximizes qcqp_vk_objective over v subject to the uplink amplify budget
/// for power p_k and the amplitude caps. iota == 0 returns the zero vector.
ReflectionSolve solve_qcqp_vk(const SystemParams& params, const DerivedChannel& ch, int k, double power,
                              cplx iota, const conic::Settings& settings = {});

enum class SharedKind { kUplink, kStatic };

/// Fixed data of the shared-vector quadratic-transform program.
struct SharedQcqpInputs {
  SharedKind kind = SharedKind::kUplink;
  ResourceAllocation allocation;
  RVector chi;
  CVector iota;
  CVector current;  // warm start; for kStatic also the SCA expansion point
};

/// sum_k [w_k tau_k log2(1+chi_k) - w_k tau_k chi_k + u_k(v, chi_k, iota_k)]
double shared_qcqp_objective(const SystemParams& params, const DerivedChannel& ch, const SharedQcqpInputs& in,
                             const CVector& v);

/// Shared-vector program. kUplink: per-device uplink amplify budgets and
/// caps. kStatic additionally enforces energy causality through the
/// first-order lower bound sca_surrogate_qk at `current`, plus the downlink
/// amplify budget. An empty interior yields Status::kInfeasible.
ReflectionSolve solve_qcqp_shared(const SystemParams& params, const DerivedChannel& ch,
                                  const SharedQcqpInputs& inputs, const conic::Settings& settings = {});

/// Tangent lower bound at `expansion` of P_A |z_k(v)|^2 + sigma_n1^2 v^H Q2k v.
double sca_surrogate_qk(const SystemParams& params, const DerivedChannel& ch, int k, const CVector& v,
                        const CVector& expansion);

struct RandomizationResult {
  ReflectionVector v;
  double score = -kInf;      // min_k harvested-rate ratio to the relaxation
  int candidates = 0;
  bool rank_one = false;
};

/// Recovers a downlink vector from a relaxed W0. Throws ModelError if no
/// candidate is usable.
RandomizationResult gaussian_randomization(const SystemParams& params, const DerivedChannel& ch,
                                           const CMatrix& lifted_dl, double tau0, int num_candidates,
                                           std::mt19937_64& rng);

/// Per-unit-tau0 harvested power implied by the relaxed covariance W0/tau0.
double relaxed_harvest_rate(const SystemParams& params, const DerivedChannel& ch, int k, const CMatrix& cov);

}  // namespace irswpcn
