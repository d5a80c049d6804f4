#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace irswpcn {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// dBm <-> Watts. Conversions happen once at the configuration boundary.
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }
inline double db_to_linear_power(double db) { return std::pow(10.0, db / 10.0); }
// Amplification factors are quoted as power gains, so the amplitude cap is 10^(dB/20).
inline double db_to_amplitude(double db) { return std::pow(10.0, db / 20.0); }

/// Physical constants of one network instance, all in SI units.
///
/// `amplify_budget` may be +inf, which removes every IRS amplifying-power
/// constraint (used by the passive baseline). `noise_receiver_dl` is carried
/// for completeness; harvested energy ignores receiver noise, so no formula
/// reads it.
struct SystemParams {
  double hap_power = dbm_to_watts(20.0);        // P_A [W]
  double amplify_budget = dbm_to_watts(5.0);    // P_F [W]
  double noise_irs_dl = dbm_to_watts(-90.0);    // sigma^2_{n1} [W]
  double noise_irs_ul = dbm_to_watts(-90.0);    // sigma^2_{n2} [W]
  double noise_receiver_dl = dbm_to_watts(-90.0);  // sigma^2_{z1} [W], inert
  double noise_receiver_ul = dbm_to_watts(-90.0);  // sigma^2_{z2} [W]
  double efficiency = 0.8;                      // eta
  double frame_time = 1.0;                      // T_max [s]
  double max_amplitude = db_to_amplitude(10.0); // a_max (linear amplitude)
  std::vector<double> weights{1.0, 1.0, 1.0, 1.0};
  int num_elements = 10;
  int num_devices = 4;

  void validate() const;
};

/// One complex IRS coefficient vector.
class ReflectionVector {
 public:
  ReflectionVector() = default;
  explicit ReflectionVector(CVector coeffs) : coeffs_(std::move(coeffs)) {}
  static ReflectionVector zeros(int n) { return ReflectionVector(CVector::Zero(n)); }

  int size() const { return static_cast<int>(coeffs_.size()); }
  const CVector& coeffs() const { return coeffs_; }
  CVector& coeffs() { return coeffs_; }
  double amplitude(int n) const { return std::abs(coeffs_(n)); }
  double phase(int n) const { return std::arg(coeffs_(n)); }
  double max_amplitude() const { return coeffs_.size() ? coeffs_.cwiseAbs().maxCoeff() : 0.0; }

 private:
  CVector coeffs_;
};

/// Time split and uplink powers. `energy` stores f_k = p_k tau_k.
struct ResourceAllocation {
  double tau0 = 0.0;
  RVector tau;
  RVector power;
  RVector energy;

  static ResourceAllocation zeros(int k);
  // Rebuilds p_k = f_k / tau_k (zero where tau_k == 0).
  static ResourceAllocation from_energy(double tau0, const RVector& tau, const RVector& energy);
  double total_time() const { return tau0 + tau.sum(); }
};

enum class Setup { kUserAdaptive, kUplinkAdaptive, kStatic };

std::string to_string(Setup setup);

/// Reflection vectors in the layout a given setup uses: user-adaptive keeps
/// one uplink vector per device, uplink-adaptive one shared uplink vector,
/// static none (the downlink vector is reused for the uplink).
struct ReflectionSet {
  Setup setup = Setup::kUserAdaptive;
  ReflectionVector downlink;
  std::vector<ReflectionVector> uplink;

  const ReflectionVector& uplink_for(int k) const;
  void validate(int num_devices, int num_elements) const;
};

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace irswpcn
