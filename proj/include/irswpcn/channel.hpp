#pragma once

#include "irswpcn/types.hpp"

#include <array>
#include <cstdint>
#include <random>

namespace irswpcn {

using Position = std::array<double, 3>;

double distance(const Position& a, const Position& b);

/// HAP at the origin, IRS at (irs_x, 0, irs_height), devices uniform in a
/// horizontal disk centred on (cluster_center_x, 0, 0).
struct GeometryConfig {
  Position hap_position{0.0, 0.0, 0.0};
  double irs_x = 10.0;
  double irs_height = 2.0;
  double cluster_center_x = 10.0;
  double cluster_radius = 1.0;
  int num_devices = 4;

  void validate() const;
};

/// Distance-dependent path loss plus Rician (IRS links) / Rayleigh (direct
/// links) small-scale fading. `rician_factor` may be +inf (pure LoS).
struct FadingConfig {
  double pathloss_exponent_irs = 2.2;
  double pathloss_exponent_direct = 3.5;
  double rician_factor = 10.0;
  double reference_gain_db = -30.0;
  double reference_distance = 1.0;

  void validate() const;
};

struct NodePositions {
  Position hap{};
  Position irs{};
  std::vector<Position> devices;
};

/// Raw baseband channels: g (HAP->IRS), h_r[k] (IRS->device k), h_d[k] (HAP->device k).
struct ChannelRealization {
  CVector g;
  std::vector<CVector> h_r;
  CVector h_d;

  int num_elements() const { return static_cast<int>(g.size()); }
  int num_devices() const { return static_cast<int>(h_d.size()); }
  void validate() const;
};

/// Channel quantities every formula consumes, computed once per realization.
///
/// With z_k(v) = h_{d,k}^H + b_k^H v the effective uplink/downlink gain,
/// `lifted[k]` = [b_k; h_{d,k}] satisfies [v;1]^H lifted lifted^H [v;1] = |z_k(v)|^2.
struct DerivedChannel {
  int num_elements = 0;
  int num_devices = 0;
  CVector g;
  std::vector<CVector> h_r;
  CVector h_d;
  std::vector<CVector> cascade;      // b_k, with b_k^H = h_{r,k}^H diag(g)
  RVector q1;                        // |g_n|^2
  std::vector<RVector> q2;           // |[h_{r,k}]_n|^2
  RVector q1_lift;                   // [q1; 1]
  std::vector<RVector> q2_lift;      // [q2_k; 1]
  std::vector<CVector> lifted;       // t_k = [b_k; h_{d,k}]
  std::vector<CMatrix> lifted_outer; // B_k = t_k t_k^H

  // z_k(v) = conj(h_{d,k}) + b_k^H v
  cplx effective_gain(int k, const CVector& v) const;
  cplx direct_conj(int k) const { return std::conj(h_d(k)); }
};

/// Independent random streams. Each (realization, link) pair gets its own
/// engine so that sweeping a geometry parameter reuses the same fading draws.
enum class LinkType : std::uint64_t {
  kPlacement = 1,
  kHapIrs = 2,
  kIrsDevice = 3,
  kDirect = 4,
  kRandomization = 5,
};

std::mt19937_64 make_stream(std::uint64_t master_seed, std::uint64_t realization, LinkType link);

struct RealizationSeed {
  std::uint64_t master = 0;
  std::uint64_t index = 0;
  std::mt19937_64 stream(LinkType link) const { return make_stream(master, index, link); }
};

NodePositions place_nodes(const GeometryConfig& config, std::mt19937_64& rng);

/// Linear power gain; throws std::domain_error below the reference distance.
double path_loss(double distance_m, const FadingConfig& fading, double exponent);

/// Half-wavelength ULA steering vector along the x axis toward `target`.
CVector steering_vector(int num_elements, const Position& irs, const Position& target);

ChannelRealization sample_channels(const NodePositions& positions, int num_elements,
                                   const FadingConfig& fading, const RealizationSeed& seed);

DerivedChannel derive_channel(const ChannelRealization& realization);

/// place_nodes + sample_channels + derive_channel for one realization.
struct Instance {
  NodePositions positions;
  ChannelRealization channels;
  DerivedChannel derived;
};

Instance generate_instance(const GeometryConfig& geometry, const FadingConfig& fading,
                           int num_elements, const RealizationSeed& seed);

}  // namespace irswpcn
