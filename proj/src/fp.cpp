#include "irswpcn/ao.hpp"

#include <cmath>

namespace irswpcn {

cplx fp_update_iota_ue(const SystemParams& params, const DerivedChannel& ch, int k, const CVector& v) {
  const double denom = params.noise_irs_ul * ch.q1.dot(v.cwiseAbs2()) + params.noise_receiver_ul;
  if (!(denom > 0.0)) throw ModelError("fp_update_iota_ue: zero denominator");
  return ch.effective_gain(k, v) / denom;
}

double fp_update_chi(const SystemParams& params, const DerivedChannel& ch, int k, double power, const CVector& v) {
  if (power == 0.0) return 0.0;
  return power * uplink_gain_to_noise(params, ch, k, v);
}

cplx fp_update_iota_ul(const SystemParams& params, const DerivedChannel& ch, int k, double weight, double tau,
                       double power, double chi, const CVector& v) {
  const cplx z = ch.effective_gain(k, v);
  const double denom =
      power * std::norm(z) + params.noise_irs_ul * ch.q1.dot(v.cwiseAbs2()) + params.noise_receiver_ul;
  if (!(denom > 0.0)) throw ModelError("fp_update_iota_ul: zero denominator");
  const double s = std::sqrt(weight * tau * (1.0 + chi) * power);
  return s * z / denom;
}

}  // namespace irswpcn
