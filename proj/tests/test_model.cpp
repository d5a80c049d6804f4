#include "fixtures.hpp"

#include <doctest.h>

#include <cmath>

using namespace irswpcn;

namespace {

// N = 1, K = 1, every channel coefficient 1, so z(v) = 1 + v
struct Scalar {
  SystemParams p = fixture::params(1, 1);
  DerivedChannel ch = fixture::channel(CVector::Ones(1), {CVector::Ones(1)}, CVector::Ones(1));
  Scalar() {
    p.hap_power = 1.0;
    p.noise_irs_dl = 0.5;
    p.noise_irs_ul = 0.25;
    p.noise_receiver_ul = 0.75;
    p.efficiency = 0.5;
    p.amplify_budget = 2.0;
    p.max_amplitude = 1.0;
  }
};

}  // namespace

TEST_CASE("scalar model quantities") {
  Scalar s;
  const CVector v = CVector::Ones(1);
  CHECK(std::abs(s.ch.effective_gain(0, v) - cplx(2.0)) < 1e-15);
  // 0.5 (1 * 4 + 0.5 * 1)
  CHECK(harvest_rate(s.p, s.ch, 0, v) == doctest::Approx(2.25));
  CHECK(harvested_energy(s.p, s.ch, 0, ReflectionVector(v), 0.4) == doctest::Approx(0.9));
  // 4 / (0.25 + 0.75)
  CHECK(uplink_gain_to_noise(s.p, s.ch, 0, v) == doctest::Approx(4.0));
  CHECK(uplink_sinr(s.p, s.ch, 0, ReflectionVector(v), 0.75) == doctest::Approx(3.0));
  CHECK(throughput(s.p, s.ch, 0, 0.5, 0.75, ReflectionVector(v)) == doctest::Approx(1.0));
  CHECK(throughput(s.p, s.ch, 0, 0.0, 0.75, ReflectionVector(v)) == 0.0);
  CHECK(dl_amplify_power(s.p, s.ch, ReflectionVector(v)) == doctest::Approx(1.5));
  CHECK(ul_amplify_power(s.p, s.ch, 0, ReflectionVector(v), 0.75) == doctest::Approx(1.0));
  // (2 - 0.25) / 1
  CHECK(ul_power_cap(s.p, s.ch, 0, v) == doctest::Approx(1.75));
  s.p.amplify_budget = kInf;
  CHECK(ul_power_cap(s.p, s.ch, 0, v) == kInf);
}

TEST_CASE("zero reflection leaves the direct link") {
  Scalar s;
  const CVector v = CVector::Zero(1);
  CHECK(harvest_rate(s.p, s.ch, 0, v) == doctest::Approx(0.5));
  CHECK(uplink_gain_to_noise(s.p, s.ch, 0, v) == doctest::Approx(1.0 / 0.75));
}

TEST_CASE("weighted sum throughput and energy accounting") {
  Scalar s;
  s.p.weights = {2.0};
  ResourceAllocation a = ResourceAllocation::from_energy(0.5, RVector::Constant(1, 0.5), RVector::Constant(1, 0.375));
  CHECK(a.power(0) == doctest::Approx(0.75));
  ReflectionSet refl;
  refl.setup = Setup::kStatic;
  refl.downlink = ReflectionVector(CVector::Ones(1));
  CHECK(weighted_sum_throughput(s.p, s.ch, a, refl) == doctest::Approx(2.0));
  // 1 * 0.5 + 0.5 * 1.5 + 0.5 * 1.0
  CHECK(total_energy_consumption(s.p, s.ch, a, refl, EnergyMode::kActive) == doctest::Approx(1.75));
  CHECK(total_energy_consumption(s.p, s.ch, a, refl, EnergyMode::kPassive) == doctest::Approx(0.5));
}

TEST_CASE("feasibility report") {
  Scalar s;
  ReflectionSet refl;
  refl.setup = Setup::kStatic;
  refl.downlink = ReflectionVector(CVector::Ones(1));
  // harvested 0.5 * 2.25 = 1.125 J, spent 0.375 J
  auto a = ResourceAllocation::from_energy(0.5, RVector::Constant(1, 0.5), RVector::Constant(1, 0.375));
  CHECK(check_feasibility(Setup::kStatic, s.p, s.ch, a, refl).feasible);

  auto greedy = ResourceAllocation::from_energy(0.5, RVector::Constant(1, 0.5), RVector::Constant(1, 1.2));
  const auto r = check_feasibility(Setup::kStatic, s.p, s.ch, greedy, refl);
  CHECK_FALSE(r.feasible);
  CHECK(r.energy_causality[0] < 0.0);

  auto late = ResourceAllocation::from_energy(0.6, RVector::Constant(1, 0.5), RVector::Constant(1, 0.1));
  CHECK_FALSE(check_feasibility(Setup::kStatic, s.p, s.ch, late, refl).feasible);

  ReflectionSet loud = refl;
  loud.downlink = ReflectionVector(CVector::Constant(1, 1.5));
  CHECK_FALSE(check_feasibility(Setup::kStatic, s.p, s.ch, a, loud).feasible);
}

TEST_CASE("harvested energy worked examples") {
  SystemParams p = fixture::params(1, 1);
  p.efficiency = 0.5;
  p.hap_power = 1.0;
  p.noise_irs_dl = 0.1;
  const auto ch = fixture::channel(CVector::Ones(1), {CVector::Ones(1)}, CVector::Ones(1));
  // 2 * 0.5 * (|1 + 1|^2 + 0.1)
  CHECK(harvested_energy(p, ch, 0, ReflectionVector(CVector::Ones(1)), 2.0) == doctest::Approx(4.1));

  p.efficiency = 0.8;
  p.hap_power = 0.1;
  const auto weak = fixture::channel(CVector::Ones(1), {CVector::Ones(1)}, CVector::Constant(1, 1e-3));
  CHECK(harvested_energy(p, weak, 0, ReflectionVector::zeros(1), 1.0) == doctest::Approx(8e-8));
}
