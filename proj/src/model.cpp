#include "irswpcn/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace irswpcn {

namespace {

double quad_diag(const RVector& q, const CVector& v) { return q.dot(v.cwiseAbs2()); }

// (rhs - lhs) / max(|lhs|, |rhs|); an exact 0 <= 0 counts as tight.
double relative_slack(double lhs, double rhs) {
  if (std::isinf(rhs) && rhs > 0) return kInf;
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  if (scale == 0.0) return 0.0;
  return (rhs - lhs) / scale;
}

void require_devices(const DerivedChannel& ch, int k) {
  if (k < 0 || k >= ch.num_devices) throw std::out_of_range("device index out of range");
}

void require_size(const DerivedChannel& ch, const CVector& v) {
  if (v.size() != ch.num_elements) throw std::invalid_argument("reflection vector has wrong length");
}

}  // namespace

void SystemParams::validate() const {
  if (num_elements < 1 || num_devices < 1) throw std::invalid_argument("N and K must be >= 1");
  if (static_cast<int>(weights.size()) != num_devices)
    throw std::invalid_argument("need one weight per device");
  for (double w : weights)
    if (!(w > 0.0)) throw std::invalid_argument("weights must be positive");
  for (double p : {hap_power, amplify_budget, noise_irs_dl, noise_irs_ul, noise_receiver_dl, noise_receiver_ul})
    if (!(p >= 0.0)) throw std::invalid_argument("powers and noise variances must be >= 0");
  if (!(efficiency > 0.0 && efficiency <= 1.0)) throw std::invalid_argument("efficiency must be in (0, 1]");
  if (!(frame_time > 0.0) || !std::isfinite(frame_time)) throw std::invalid_argument("frame_time must be > 0");
  if (!(max_amplitude > 0.0)) throw std::invalid_argument("max_amplitude must be > 0");
}

ResourceAllocation ResourceAllocation::zeros(int k) {
  ResourceAllocation a;
  a.tau = RVector::Zero(k);
  a.power = RVector::Zero(k);
  a.energy = RVector::Zero(k);
  return a;
}

ResourceAllocation ResourceAllocation::from_energy(double tau0, const RVector& tau, const RVector& energy) {
  ResourceAllocation a;
  a.tau0 = tau0;
  a.tau = tau;
  a.energy = energy;
  a.power = RVector::Zero(tau.size());
  for (Eigen::Index k = 0; k < tau.size(); ++k)
    a.power(k) = tau(k) > 0.0 ? energy(k) / tau(k) : 0.0;
  return a;
}

std::string to_string(Setup setup) {
  switch (setup) {
    case Setup::kUserAdaptive: return "user-adaptive";
    case Setup::kUplinkAdaptive: return "uplink-adaptive";
    case Setup::kStatic: return "static";
  }
  return "?";
}

const ReflectionVector& ReflectionSet::uplink_for(int k) const {
  switch (setup) {
    case Setup::kUserAdaptive: return uplink.at(k);
    case Setup::kUplinkAdaptive: return uplink.at(0);
    case Setup::kStatic: return downlink;
  }
  return downlink;
}

void ReflectionSet::validate(int num_devices, int num_elements) const {
  std::size_t expected = 0;
  if (setup == Setup::kUserAdaptive) expected = num_devices;
  if (setup == Setup::kUplinkAdaptive) expected = 1;
  if (uplink.size() != expected)
    throw std::invalid_argument(to_string(setup) + " setup expects " + std::to_string(expected) +
                                " uplink vectors, got " + std::to_string(uplink.size()));
  if (downlink.size() != num_elements) throw std::invalid_argument("downlink vector has wrong length");
  for (const auto& v : uplink)
    if (v.size() != num_elements) throw std::invalid_argument("uplink vector has wrong length");
}

double harvest_rate(const SystemParams& params, const DerivedChannel& ch, int k, const CVector& v0) {
  require_devices(ch, k);
  require_size(ch, v0);
  return params.efficiency *
         (params.hap_power * std::norm(ch.effective_gain(k, v0)) + params.noise_irs_dl * quad_diag(ch.q2[k], v0));
}

double harvested_energy(const SystemParams& params, const DerivedChannel& ch, int k,
                        const ReflectionVector& v0, double tau0) {
  return tau0 * harvest_rate(params, ch, k, v0.coeffs());
}

double uplink_gain_to_noise(const SystemParams& params, const DerivedChannel& ch, int k, const CVector& v) {
  require_devices(ch, k);
  require_size(ch, v);
  const double noise = params.noise_irs_ul * quad_diag(ch.q1, v) + params.noise_receiver_ul;
  if (!(noise > 0.0)) throw ModelError("uplink SINR undefined: zero noise power");
  return std::norm(ch.effective_gain(k, v)) / noise;
}

double uplink_sinr(const SystemParams& params, const DerivedChannel& ch, int k,
                   const ReflectionVector& v, double power) {
  if (power < 0.0) throw std::invalid_argument("uplink power must be >= 0");
  return power * uplink_gain_to_noise(params, ch, k, v.coeffs());
}

double throughput(const SystemParams& params, const DerivedChannel& ch, int k, double tau,
                  double power, const ReflectionVector& v) {
  if (tau < 0.0) throw std::invalid_argument("tau must be >= 0");
  if (tau == 0.0) return 0.0;
  return tau * std::log2(1.0 + uplink_sinr(params, ch, k, v, power));
}

double weighted_sum_throughput(const SystemParams& params, const DerivedChannel& ch,
                               const ResourceAllocation& alloc, const ReflectionSet& refl) {
  double total = 0.0;
  for (int k = 0; k < ch.num_devices; ++k)
    total += params.weights[k] * throughput(params, ch, k, alloc.tau(k), alloc.power(k), refl.uplink_for(k));
  return total;
}

double dl_amplify_power(const SystemParams& params, const DerivedChannel& ch, const ReflectionVector& v0) {
  require_size(ch, v0.coeffs());
  return params.hap_power * quad_diag(ch.q1, v0.coeffs()) + params.noise_irs_dl * v0.coeffs().squaredNorm();
}

double ul_amplify_power(const SystemParams& params, const DerivedChannel& ch, int k,
                        const ReflectionVector& v, double power) {
  require_devices(ch, k);
  require_size(ch, v.coeffs());
  return power * quad_diag(ch.q2[k], v.coeffs()) + params.noise_irs_ul * v.coeffs().squaredNorm();
}

double ul_power_cap(const SystemParams& params, const DerivedChannel& ch, int k, const CVector& v) {
  if (std::isinf(params.amplify_budget)) return kInf;
  const double headroom = params.amplify_budget - params.noise_irs_ul * v.squaredNorm();
  const double gain = quad_diag(ch.q2[k], v);
  if (gain <= 0.0) return headroom >= 0.0 ? kInf : -1.0;
  return headroom / gain;
}

double FeasibilityReport::worst_slack() const {
  double w = std::min({dl_amplify, time_budget, nonnegativity, amplitude});
  for (double s : energy_causality) w = std::min(w, s);
  for (double s : ul_amplify) w = std::min(w, s);
  return w;
}

std::string FeasibilityReport::summary() const {
  std::ostringstream os;
  os << (feasible ? "feasible" : "INFEASIBLE") << " (worst slack " << worst_slack() << ", tol " << tolerance
     << "; energy";
  for (double s : energy_causality) os << ' ' << s;
  os << "; dl " << dl_amplify << "; ul";
  for (double s : ul_amplify) os << ' ' << s;
  os << "; time " << time_budget << "; nonneg " << nonnegativity << "; amp " << amplitude << ')';
  return os.str();
}

FeasibilityReport check_feasibility(Setup kind, const SystemParams& params, const DerivedChannel& ch,
                                    const ResourceAllocation& alloc, const ReflectionSet& refl,
                                    double tolerance) {
  if (refl.setup != kind) throw std::invalid_argument("reflection set does not match the problem kind");
  refl.validate(ch.num_devices, ch.num_elements);
  const int k_count = ch.num_devices;
  if (alloc.tau.size() != k_count || alloc.power.size() != k_count)
    throw std::invalid_argument("allocation size does not match the number of devices");

  FeasibilityReport r;
  r.tolerance = tolerance;

  for (int k = 0; k < k_count; ++k) {
    const double spent = alloc.power(k) * alloc.tau(k);
    r.energy_causality.push_back(relative_slack(spent, harvested_energy(params, ch, k, refl.downlink, alloc.tau0)));
  }

  r.dl_amplify = relative_slack(dl_amplify_power(params, ch, refl.downlink), params.amplify_budget);

  // user-adaptive: v_k against device k; shared setups: the one vector against every device.
  for (int k = 0; k < k_count; ++k)
    r.ul_amplify.push_back(relative_slack(ul_amplify_power(params, ch, k, refl.uplink_for(k), alloc.power(k)),
                                          params.amplify_budget));

  r.time_budget = (params.frame_time - alloc.total_time()) / params.frame_time;

  double nonneg = alloc.tau0 / params.frame_time;
  for (int k = 0; k < k_count; ++k) nonneg = std::min(nonneg, alloc.tau(k) / params.frame_time);
  const double pscale = std::max(alloc.power.cwiseAbs().maxCoeff(), 1e-300);
  for (int k = 0; k < k_count; ++k) nonneg = std::min(nonneg, alloc.power(k) / pscale);
  r.nonnegativity = nonneg;

  double amp = kInf;
  auto check_amp = [&](const ReflectionVector& v) {
    amp = std::min(amp, (params.max_amplitude - v.max_amplitude()) / params.max_amplitude);
  };
  check_amp(refl.downlink);
  for (const auto& v : refl.uplink) check_amp(v);
  r.amplitude = amp;

  r.feasible = r.worst_slack() >= -tolerance;
  return r;
}

double total_energy_consumption(const SystemParams& params, const DerivedChannel& ch,
                                const ResourceAllocation& alloc, const ReflectionSet& refl,
                                EnergyMode mode) {
  const double transmit = params.hap_power * alloc.tau0;
  if (mode == EnergyMode::kPassive) return transmit;
  double total = transmit + alloc.tau0 * dl_amplify_power(params, ch, refl.downlink);
  for (int k = 0; k < ch.num_devices; ++k)
    total += alloc.tau(k) * ul_amplify_power(params, ch, k, refl.uplink_for(k), alloc.power(k));
  return total;
}

}  // namespace irswpcn
