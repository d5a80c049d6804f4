#pragma once

#include "irswpcn/harness.hpp"

#include <vector>

namespace fixture {

using namespace irswpcn;

// hand-built channel; every device sees the same IRS link g
inline DerivedChannel channel(const CVector& g, const std::vector<CVector>& h_r, const CVector& h_d) {
  ChannelRealization r;
  r.g = g;
  r.h_r = h_r;
  r.h_d = h_d;
  return derive_channel(r);
}

inline SystemParams params(int n, int k) {
  SystemParams p;
  p.num_elements = n;
  p.num_devices = k;
  p.weights.assign(k, 1.0);
  return p;
}

// default geometry and fading with K devices
inline ExperimentConfig small_config(int n, int k) {
  ExperimentConfig c;
  c.params.num_elements = n;
  c.params.num_devices = k;
  c.params.weights.assign(k, 1.0);
  c.geometry.num_devices = k;
  return c;
}

inline TaskSetup instance(const ExperimentConfig& c, int realization, double amax_db = 10.0) {
  return prepare_task(c, {0.0, Scheme::kUeActive, amax_db, realization}, false);
}

}  // namespace fixture
