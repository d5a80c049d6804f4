#include "irswpcn/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace irswpcn {

namespace {

// splitmix64 finalizer
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

cplx standard_complex_normal(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  const double re = normal(rng);
  const double im = normal(rng);
  return {re, im};
}

bool finite(const Position& p) {
  return std::isfinite(p[0]) && std::isfinite(p[1]) && std::isfinite(p[2]);
}

// sqrt(PL) * (sqrt(beta/(1+beta)) LoS + sqrt(1/(1+beta)) CN(0, I))
CVector rician(const CVector& los, double pathloss, double beta, std::mt19937_64& rng) {
  const int n = static_cast<int>(los.size());
  double los_w = 1.0;
  double nlos_w = 0.0;
  if (std::isfinite(beta)) {
    los_w = std::sqrt(beta / (1.0 + beta));
    nlos_w = std::sqrt(1.0 / (1.0 + beta));
  }
  CVector out(n);
  for (int i = 0; i < n; ++i) {
    // Always draw so the stream position does not depend on beta.
    const cplx w = standard_complex_normal(rng);
    out(i) = std::sqrt(pathloss) * (los_w * los(i) + nlos_w * w);
  }
  return out;
}

}  // namespace

double distance(const Position& a, const Position& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

void GeometryConfig::validate() const {
  if (!(cluster_radius >= 0.0) || !std::isfinite(cluster_radius))
    throw std::invalid_argument("cluster_radius must be finite and non-negative");
  if (num_devices < 1) throw std::invalid_argument("num_devices must be >= 1");
  if (!finite(hap_position) || !std::isfinite(irs_x) || !std::isfinite(irs_height) ||
      !std::isfinite(cluster_center_x))
    throw std::invalid_argument("geometry coordinates must be finite");
}

void FadingConfig::validate() const {
  if (!(pathloss_exponent_irs >= 0.0) || !(pathloss_exponent_direct >= 0.0))
    throw std::invalid_argument("path-loss exponents must be non-negative");
  if (!(rician_factor >= 0.0)) throw std::invalid_argument("rician_factor must be >= 0");
  if (!(reference_distance > 0.0)) throw std::invalid_argument("reference_distance must be > 0");
  if (!std::isfinite(reference_gain_db)) throw std::invalid_argument("reference_gain_db must be finite");
}

void ChannelRealization::validate() const {
  const auto k = h_d.size();
  if (h_r.size() != static_cast<std::size_t>(k))
    throw std::invalid_argument("h_r and h_d disagree on the number of devices");
  for (const auto& h : h_r) {
    if (h.size() != g.size()) throw std::invalid_argument("h_r and g disagree on the number of elements");
    if (!h.allFinite()) throw std::invalid_argument("non-finite IRS-device channel");
  }
  if (!g.allFinite() || !h_d.allFinite()) throw std::invalid_argument("non-finite channel entries");
}

cplx DerivedChannel::effective_gain(int k, const CVector& v) const {
  // Eigen's dot conjugates the left operand: b.dot(v) = b^H v.
  return direct_conj(k) + cascade[k].dot(v);
}

std::mt19937_64 make_stream(std::uint64_t master_seed, std::uint64_t realization, LinkType link) {
  const std::uint64_t key =
      mix(mix(mix(master_seed) ^ realization) ^ static_cast<std::uint64_t>(link));
  std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)};
  return std::mt19937_64(seq);
}

NodePositions place_nodes(const GeometryConfig& config, std::mt19937_64& rng) {
  config.validate();
  NodePositions pos;
  pos.hap = config.hap_position;
  pos.irs = {config.irs_x, 0.0, config.irs_height};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  pos.devices.reserve(config.num_devices);
  for (int k = 0; k < config.num_devices; ++k) {
    const double r = config.cluster_radius * std::sqrt(unit(rng));
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    pos.devices.push_back({config.cluster_center_x + r * std::cos(phi), r * std::sin(phi), 0.0});
  }
  return pos;
}

double path_loss(double distance_m, const FadingConfig& fading, double exponent) {
  if (!(distance_m >= fading.reference_distance))
    throw std::domain_error("path_loss: distance " + std::to_string(distance_m) +
                            " m is below the reference distance");
  return db_to_linear_power(fading.reference_gain_db) *
         std::pow(distance_m / fading.reference_distance, -exponent);
}

CVector steering_vector(int num_elements, const Position& irs, const Position& target) {
  const double d = distance(irs, target);
  const double cos_angle = d > 0.0 ? (target[0] - irs[0]) / d : 0.0;
  CVector a(num_elements);
  for (int n = 0; n < num_elements; ++n)
    a(n) = std::polar(1.0, -std::numbers::pi * n * cos_angle);
  return a;
}

ChannelRealization sample_channels(const NodePositions& positions, int num_elements,
                                   const FadingConfig& fading, const RealizationSeed& seed) {
  fading.validate();
  if (num_elements < 1) throw std::invalid_argument("num_elements must be >= 1");
  const int k_count = static_cast<int>(positions.devices.size());

  ChannelRealization ch;
  {
    auto rng = seed.stream(LinkType::kHapIrs);
    const double pl = path_loss(distance(positions.hap, positions.irs), fading, fading.pathloss_exponent_irs);
    ch.g = rician(steering_vector(num_elements, positions.irs, positions.hap), pl, fading.rician_factor, rng);
  }
  {
    auto rng = seed.stream(LinkType::kIrsDevice);
    ch.h_r.reserve(k_count);
    for (const auto& dev : positions.devices) {
      const double pl = path_loss(distance(positions.irs, dev), fading, fading.pathloss_exponent_irs);
      ch.h_r.push_back(rician(steering_vector(num_elements, positions.irs, dev), pl, fading.rician_factor, rng));
    }
  }
  {
    auto rng = seed.stream(LinkType::kDirect);
    ch.h_d.resize(k_count);
    for (int k = 0; k < k_count; ++k) {
      const double pl = path_loss(distance(positions.hap, positions.devices[k]), fading,
                                  fading.pathloss_exponent_direct);
      ch.h_d(k) = std::sqrt(pl) * standard_complex_normal(rng);
    }
  }
  return ch;
}

DerivedChannel derive_channel(const ChannelRealization& realization) {
  realization.validate();
  DerivedChannel d;
  d.num_elements = realization.num_elements();
  d.num_devices = realization.num_devices();
  const int n = d.num_elements;
  d.g = realization.g;
  d.h_r = realization.h_r;
  d.h_d = realization.h_d;
  d.q1 = realization.g.cwiseAbs2();
  d.q1_lift.resize(n + 1);
  d.q1_lift << d.q1, 1.0;
  for (int k = 0; k < d.num_devices; ++k) {
    const CVector& hr = realization.h_r[k];
    // b_k^H = h_r^H diag(g)  =>  [b_k]_n = [h_r]_n conj(g_n)
    CVector b = hr.cwiseProduct(realization.g.conjugate());
    RVector q2 = hr.cwiseAbs2();
    RVector q2l(n + 1);
    q2l << q2, 1.0;
    CVector t(n + 1);
    t << b, realization.h_d(k);
    d.lifted_outer.push_back(t * t.adjoint());
    d.cascade.push_back(std::move(b));
    d.q2.push_back(std::move(q2));
    d.q2_lift.push_back(std::move(q2l));
    d.lifted.push_back(std::move(t));
  }
  return d;
}

Instance generate_instance(const GeometryConfig& geometry, const FadingConfig& fading,
                           int num_elements, const RealizationSeed& seed) {
  Instance inst;
  auto placement = seed.stream(LinkType::kPlacement);
  inst.positions = place_nodes(geometry, placement);
  inst.channels = sample_channels(inst.positions, num_elements, fading, seed);
  inst.derived = derive_channel(inst.channels);
  return inst;
}

}  // namespace irswpcn
