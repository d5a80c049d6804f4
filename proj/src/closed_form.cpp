#include "irswpcn/ao.hpp"

#include <cmath>

namespace irswpcn {

CVector ClosedFormVector::coeffs() const {
  CVector v(amplitude.size());
  for (Eigen::Index n = 0; n < v.size(); ++n) v(n) = std::polar(amplitude(n), phase(n));
  return v;
}

ClosedFormVector closed_form_single_device(const SystemParams& params, const DerivedChannel& ch, Link link,
                                           double power, AmplitudeRule rule) {
  if (ch.num_devices != 1) throw std::invalid_argument("closed_form_single_device: needs exactly one device");
  if (!std::isfinite(params.amplify_budget))
    throw std::invalid_argument("closed_form_single_device: needs a finite amplify budget");
  if (link == Link::kUplink && power < 0.0) throw std::invalid_argument("uplink power must be >= 0");
  const int n = ch.num_elements;
  const RVector& q1 = ch.q1;
  const RVector& q2 = ch.q2[0];
  for (int i = 0; i < n; ++i)
    if (q1(i) == 0.0 || q2(i) == 0.0) throw ModelError("closed_form_single_device: zero channel entry");

  // per-element amplify cost and cascaded gain |b_n| = |g_n| |h_n|
  RVector cost(n), gain(n);
  for (int i = 0; i < n; ++i) {
    cost(i) = link == Link::kDownlink ? params.hap_power * q1(i) + params.noise_irs_dl
                                      : power * q2(i) + params.noise_irs_ul;
    gain(i) = std::sqrt(q1(i) * q2(i));
  }

  ClosedFormVector out;
  RVector shape(n);
  for (int i = 0; i < n; ++i) shape(i) = rule == AmplitudeRule::kCauchySchwarz ? gain(i) / cost(i) : 1.0 / gain(i);
  const double spent = cost.dot(shape.cwiseAbs2());
  out.scale = std::sqrt(params.amplify_budget / spent);
  out.amplitude = (out.scale * shape).cwiseMin(params.max_amplitude);
  out.clipped = (out.scale * shape).maxCoeff() > params.max_amplitude;

  // co-phase every cascaded term with the direct link
  const double ref = std::arg(ch.direct_conj(0));
  out.phase.resize(n);
  for (int i = 0; i < n; ++i) out.phase(i) = ref + std::arg(ch.cascade[0](i));
  return out;
}

}  // namespace irswpcn
