#include "fixtures.hpp"

#include <doctest.h>

#include <cmath>

using namespace irswpcn;

TEST_CASE("path loss follows the log-distance law") {
  FadingConfig f;
  CHECK(path_loss(1.0, f, 2.2) == doctest::Approx(1e-3).epsilon(1e-14));
  CHECK(path_loss(10.0, f, 2.2) == doctest::Approx(1e-3 * std::pow(10.0, -2.2)).epsilon(1e-14));
  CHECK(path_loss(10.0, f, 3.5) == doctest::Approx(1e-3 * std::pow(10.0, -3.5)).epsilon(1e-14));
  CHECK_THROWS_AS(path_loss(0.5, f, 2.2), std::domain_error);
}

TEST_CASE("unit conversions") {
  CHECK(dbm_to_watts(30.0) == doctest::Approx(1.0));
  CHECK(dbm_to_watts(-90.0) == doctest::Approx(1e-12));
  CHECK(watts_to_dbm(0.1) == doctest::Approx(20.0));
  CHECK(db_to_amplitude(20.0) == doctest::Approx(10.0));
}

TEST_CASE("placement stays in the cluster disk") {
  GeometryConfig g;
  g.cluster_center_x = 7.0;
  g.cluster_radius = 1.5;
  g.num_devices = 50;
  auto rng = make_stream(3, 0, LinkType::kPlacement);
  const auto pos = place_nodes(g, rng);
  REQUIRE(pos.devices.size() == 50);
  for (const auto& d : pos.devices) {
    CHECK(std::hypot(d[0] - 7.0, d[1]) <= 1.5 + 1e-12);
    CHECK(d[2] == 0.0);
  }
  CHECK(pos.irs[0] == g.irs_x);
  CHECK(pos.irs[2] == g.irs_height);
}

TEST_CASE("lifted vector reproduces the effective gain") {
  const RealizationSeed seed{11, 2};
  const auto inst = generate_instance(GeometryConfig{}, FadingConfig{}, 6, seed);
  const auto& ch = inst.derived;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 5; ++trial) {
    CVector v(6);
    for (auto& x : v) x = cplx(nd(rng), nd(rng));
    CVector lifted(7);
    lifted << v, 1.0;
    for (int k = 0; k < ch.num_devices; ++k) {
      // h_d^H + h_r^H diag(g) v
      const cplx z = std::conj(ch.h_d(k)) + (ch.h_r[k].conjugate().array() * ch.g.array() * v.array()).sum();
      CHECK(std::abs(ch.effective_gain(k, v) - z) <= 1e-12 * std::abs(z));
      const double quad = (lifted.adjoint() * ch.lifted_outer[k] * lifted)(0).real();
      CHECK(quad == doctest::Approx(std::norm(z)).epsilon(1e-10));
    }
  }
}

TEST_CASE("fading second moments match the path loss") {
  GeometryConfig geo;
  geo.cluster_radius = 0.0;
  geo.num_devices = 1;
  FadingConfig fading;
  auto rng = make_stream(0, 0, LinkType::kPlacement);
  const auto pos = place_nodes(geo, rng);
  const int trials = 20000;
  double g_pow = 0.0, hd_pow = 0.0;
  for (int r = 0; r < trials; ++r) {
    const auto ch = sample_channels(pos, 2, fading, {99, static_cast<std::uint64_t>(r)});
    g_pow += std::norm(ch.g(0));
    hd_pow += std::norm(ch.h_d(0));
  }
  const double pl_g = path_loss(distance(pos.hap, pos.irs), fading, fading.pathloss_exponent_irs);
  const double pl_d = path_loss(distance(pos.hap, pos.devices[0]), fading, fading.pathloss_exponent_direct);
  CHECK(g_pow / trials == doctest::Approx(pl_g).epsilon(0.03));
  CHECK(hd_pow / trials == doctest::Approx(pl_d).epsilon(0.03));
}

TEST_CASE("pure line of sight is deterministic") {
  GeometryConfig geo;
  FadingConfig fading;
  fading.rician_factor = kInf;
  auto rng = make_stream(1, 0, LinkType::kPlacement);
  const auto pos = place_nodes(geo, rng);
  const auto a = sample_channels(pos, 4, fading, {1, 0});
  const auto b = sample_channels(pos, 4, fading, {2, 7});
  CHECK((a.g - b.g).norm() == 0.0);
  const double pl = path_loss(distance(pos.hap, pos.irs), fading, fading.pathloss_exponent_irs);
  CHECK(a.g.cwiseAbs2().maxCoeff() == doctest::Approx(pl));
}

TEST_CASE("common random numbers across sweep points") {
  GeometryConfig near, far;
  far.irs_x = 5.0;
  const RealizationSeed seed{7, 3};
  const auto a = generate_instance(near, FadingConfig{}, 4, seed);
  const auto b = generate_instance(far, FadingConfig{}, 4, seed);
  // direct links do not depend on the IRS position
  CHECK((a.channels.h_d - b.channels.h_d).norm() == 0.0);
  const auto c = generate_instance(near, FadingConfig{}, 4, {7, 4});
  CHECK((a.channels.h_d - c.channels.h_d).norm() > 0.0);
  const auto d = generate_instance(near, FadingConfig{}, 4, seed);
  CHECK((a.channels.g - d.channels.g).norm() == 0.0);
}

TEST_CASE("streams differ per link") {
  auto a = make_stream(1, 0, LinkType::kHapIrs);
  auto b = make_stream(1, 0, LinkType::kDirect);
  CHECK(a() != b());
}
