#pragma once

#include "irswpcn/channel.hpp"
#include "irswpcn/types.hpp"

namespace irswpcn {

// Closed-form quantities of the harvest-then-transmit model. Everything is in
// Watts, Joules and seconds; throughput is in bits/Hz.

/// Per-unit-time harvested power eta (P_A |z_k(v0)|^2 + sigma_n1^2 v0^H Q2k v0).
double harvest_rate(const SystemParams& params, const DerivedChannel& ch, int k, const CVector& v0);

/// E_k(v0) = tau0 * harvest_rate.
double harvested_energy(const SystemParams& params, const DerivedChannel& ch, int k,
                        const ReflectionVector& v0, double tau0);

/// SINR per unit transmit power: |z_k(v)|^2 / (sigma_n2^2 v^H Q1 v + sigma_z2^2).
double uplink_gain_to_noise(const SystemParams& params, const DerivedChannel& ch, int k, const CVector& v);

double uplink_sinr(const SystemParams& params, const DerivedChannel& ch, int k,
                   const ReflectionVector& v, double power);

/// tau log2(1 + SINR), zero at tau == 0.
double throughput(const SystemParams& params, const DerivedChannel& ch, int k, double tau,
                  double power, const ReflectionVector& v);

double weighted_sum_throughput(const SystemParams& params, const DerivedChannel& ch,
                               const ResourceAllocation& alloc, const ReflectionSet& refl);

/// P_A v0^H Q1 v0 + sigma_n1^2 v0^H v0
double dl_amplify_power(const SystemParams& params, const DerivedChannel& ch, const ReflectionVector& v0);

/// p_k v^H Q2k v + sigma_n2^2 v^H v
double ul_amplify_power(const SystemParams& params, const DerivedChannel& ch, int k,
                        const ReflectionVector& v, double power);

/// Largest uplink power that keeps (p v^H Q2k v + sigma_n2^2 v^H v) within P_F.
/// Returns +inf when unconstrained and a negative value when no power is feasible.
double ul_power_cap(const SystemParams& params, const DerivedChannel& ch, int k, const CVector& v);

/// Constraint slacks, each normalised by the magnitude of its two sides so
/// that a single tolerance applies to Joules, Watts, seconds and amplitudes.
struct FeasibilityReport {
  std::vector<double> energy_causality;  // one per device
  double dl_amplify = kInf;
  std::vector<double> ul_amplify;        // one per (vector, device) check
  double time_budget = kInf;
  double nonnegativity = kInf;
  double amplitude = kInf;
  double tolerance = 1e-6;
  bool feasible = false;

  double worst_slack() const;
  std::string summary() const;
};

FeasibilityReport check_feasibility(Setup kind, const SystemParams& params, const DerivedChannel& ch,
                                    const ResourceAllocation& alloc, const ReflectionSet& refl,
                                    double tolerance = 1e-6);

enum class EnergyMode { kActive, kPassive };

double total_energy_consumption(const SystemParams& params, const DerivedChannel& ch,
                                const ResourceAllocation& alloc, const ReflectionSet& refl,
                                EnergyMode mode);

}  // namespace irswpcn
