#include "fixtures.hpp"
#include "irswpcn/kernel.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace irswpcn;

namespace {

CVector random_vector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  CVector v(n);
  for (auto& x : v) x = cplx(nd(rng), nd(rng));
  return v;
}

// |grad| of f at iota by central differences on the real and imaginary parts
double fd_gradient(const std::function<double(cplx)>& f, cplx iota) {
  const double h = 1e-6 * std::max(std::abs(iota), 1e-30);
  const double gr = (f(iota + h) - f(iota - h)) / (2 * h);
  const double gi = (f(iota + cplx(0, h)) - f(iota - cplx(0, h))) / (2 * h);
  return std::hypot(gr, gi);
}

// instance with the IRS channels removed
DerivedChannel without_irs(const Instance& inst) {
  auto r = inst.channels;
  r.g.setZero();
  for (auto& h : r.h_r) h.setZero();
  return derive_channel(r);
}

double classic_oracle(const SystemParams& p, const DerivedChannel& ch) {
  std::vector<double> e, gamma;
  for (int k = 0; k < ch.num_devices; ++k) {
    const double gain = std::norm(ch.h_d(k));
    e.push_back(p.efficiency * p.hap_power * gain);
    gamma.push_back(gain / p.noise_receiver_ul);
  }
  return oracle::two_phase_wpcn(p.weights, e, gamma, p.frame_time);
}

}  // namespace

TEST_CASE("auxiliary updates on a scalar instance") {
  SystemParams p = fixture::params(1, 1);
  p.noise_receiver_ul = 1.0;
  const auto ch = fixture::channel(CVector::Zero(1), {CVector::Ones(1)}, CVector::Ones(1));
  const CVector v = CVector::Zero(1);
  // 1 * 1 / (1 + 0 + 1)
  CHECK(std::abs(fp_update_iota_ul(p, ch, 0, 1.0, 1.0, 1.0, 0.0, v) - cplx(0.5)) < 1e-15);
  CHECK(fp_update_iota_ul(p, ch, 0, 1.0, 1.0, 0.0, 0.0, v) == cplx(0.0));
  CHECK(fp_update_chi(p, ch, 0, 3.0, v) == doctest::Approx(3.0));
  CHECK(fp_update_chi(p, ch, 0, 0.0, v) == 0.0);
  p.noise_receiver_ul = 2.0;
  CHECK(std::abs(fp_update_iota_ue(p, ch, 0, v) - cplx(0.5)) < 1e-15);
  p.noise_receiver_ul = 0.0;
  CHECK_THROWS_AS(fp_update_iota_ue(p, ch, 0, v), ModelError);
}

TEST_CASE("auxiliary updates are stationary points") {
  const auto cfg = fixture::small_config(5, 3);
  const auto s = fixture::instance(cfg, 0, 25.0);
  const auto& ch = s.instance.derived;
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    const CVector v = random_vector(5, rng);
    for (int k = 0; k < 3; ++k) {
      const cplx iota = fp_update_iota_ue(s.params, ch, k, v);
      auto f = [&](cplx x) { return qcqp_vk_objective(s.params, ch, k, v, x); };
      // scale: the linear term alone has gradient 2|z|
      CHECK(fd_gradient(f, iota) <= 1e-6 * 2.0 * std::abs(ch.effective_gain(k, v)));
    }
    SharedQcqpInputs in;
    in.allocation = ResourceAllocation::from_energy(0.3, RVector::Constant(3, 0.2), RVector::Constant(3, 0.01));
    in.chi.resize(3);
    in.iota.resize(3);
    in.current = v;
    for (int k = 0; k < 3; ++k) {
      in.chi(k) = fp_update_chi(s.params, ch, k, in.allocation.power(k), v);
      in.iota(k) = fp_update_iota_ul(s.params, ch, k, 1.0, 0.2, in.allocation.power(k), in.chi(k), v);
    }
    for (int k = 0; k < 3; ++k) {
      auto f = [&](cplx x) {
        auto moved = in;
        moved.iota(k) = x;
        return shared_qcqp_objective(s.params, ch, moved, v);
      };
      const double lin = 2.0 * std::sqrt(0.2 * (1.0 + in.chi(k)) * in.allocation.power(k)) *
                         std::abs(ch.effective_gain(k, v));
      CHECK(fd_gradient(f, in.iota(k)) <= 1e-6 * lin);
      CHECK(in.chi(k) == doctest::Approx(uplink_sinr(s.params, ch, k, ReflectionVector(v), 0.05)).epsilon(1e-12));
    }
  }
}

TEST_CASE("closed form on one element") {
  SystemParams p = fixture::params(1, 1);
  p.hap_power = 1.0;
  p.noise_irs_dl = 0.0;
  p.amplify_budget = 1.0;
  p.max_amplitude = 10.0;
  const auto ch = fixture::channel(CVector::Ones(1), {CVector::Ones(1)}, CVector::Ones(1));
  const auto cf = closed_form_single_device(p, ch, Link::kDownlink);
  CHECK(cf.scale == doctest::Approx(1.0));
  CHECK(cf.amplitude(0) == doctest::Approx(1.0));
  CHECK_FALSE(cf.clipped);
  // co-phased with the direct path
  CHECK(std::abs(ch.effective_gain(0, cf.coeffs())) == doctest::Approx(2.0));

  p.max_amplitude = 0.5;
  const auto clipped = closed_form_single_device(p, ch, Link::kDownlink);
  CHECK(clipped.clipped);
  CHECK(clipped.amplitude(0) == doctest::Approx(0.5));

  p.num_devices = 2;
  const auto two = fixture::channel(CVector::Ones(1), {CVector::Ones(1), CVector::Ones(1)}, CVector::Ones(2));
  CHECK_THROWS_AS(closed_form_single_device(p, two, Link::kDownlink), std::invalid_argument);
}

TEST_CASE("closed form beats the equal-gain rule and matches an ascent oracle") {
  auto cfg = fixture::small_config(6, 1);
  std::mt19937_64 rng(12);
  for (int r = 0; r < 4; ++r) {
    const auto s = fixture::instance(cfg, r, 60.0);
    const auto& ch = s.instance.derived;
    const auto& p = s.params;
    const auto cs = closed_form_single_device(p, ch, Link::kDownlink);
    const auto eg = closed_form_single_device(p, ch, Link::kDownlink, 0.0, AmplitudeRule::kEqualGain);
    REQUIRE_FALSE(cs.clipped);
    const double h_cs = harvest_rate(p, ch, 0, cs.coeffs());
    CHECK(h_cs >= harvest_rate(p, ch, 0, eg.coeffs()) * (1.0 - 1e-12));
    CHECK(dl_amplify_power(p, ch, ReflectionVector(cs.coeffs())) == doctest::Approx(p.amplify_budget).epsilon(1e-9));

    const RVector cost = (p.hap_power * ch.q1).array() + p.noise_irs_dl;
    const CVector x = oracle::ellipsoid_ascent(p.hap_power, std::conj(ch.h_d(0)), ch.cascade[0].conjugate(),
                                               p.noise_irs_dl, ch.q2[0], cost, p.amplify_budget, rng, 2, 5000);
    CHECK(h_cs == doctest::Approx(harvest_rate(p, ch, 0, x)).epsilon(1e-3));
  }
}

TEST_CASE("no IRS channel reduces to the classic two-phase network") {
  auto cfg = fixture::small_config(4, 1);
  for (int r = 0; r < 2; ++r) {
    const auto s = fixture::instance(cfg, r);
    const auto ch = without_irs(s.instance);
    const double want = classic_oracle(s.params, ch);
    for (Setup setup : {Setup::kUserAdaptive, Setup::kUplinkAdaptive, Setup::kStatic}) {
      const auto sol = solve(setup, s.params, ch, s.solver);
      CHECK(sol.objective == doctest::Approx(want).epsilon(1e-4));
    }
  }
  cfg = fixture::small_config(3, 3);
  cfg.params.weights = {1.0, 0.5, 2.0};
  const auto s = fixture::instance(cfg, 5);
  const auto ch = without_irs(s.instance);
  CHECK(solve_ue(s.params, ch, s.solver).objective == doctest::Approx(classic_oracle(s.params, ch)).epsilon(1e-4));
}

TEST_CASE("solutions are feasible with nondecreasing traces") {
  const auto cfg = fixture::small_config(4, 2);
  for (int r = 0; r < 2; ++r) {
    const auto s = fixture::instance(cfg, r, 25.0);
    const auto& ch = s.instance.derived;
    for (Setup setup : {Setup::kUserAdaptive, Setup::kUplinkAdaptive, Setup::kStatic}) {
      const auto sol = solve(setup, s.params, ch, s.solver);
      CHECK(sol.feasibility.feasible);
      for (std::size_t i = 1; i < sol.objective_trace.size(); ++i)
        CHECK(sol.objective_trace[i] >= sol.objective_trace[i - 1] - 1e-8);
      CHECK(sol.objective ==
            doctest::Approx(weighted_sum_throughput(sol.params, ch, sol.allocation, sol.reflections)).epsilon(1e-8));
      CHECK(sol.reflections.setup == setup);
    }
  }
}

TEST_CASE("doubling the weights doubles the objective") {
  const auto cfg = fixture::small_config(4, 2);
  const auto s = fixture::instance(cfg, 3);
  SystemParams twice = s.params;
  for (auto& w : twice.weights) w *= 2.0;
  const auto a = solve_ue(s.params, s.instance.derived, s.solver);
  const auto b = solve_ue(twice, s.instance.derived, s.solver);
  CHECK(b.objective == doctest::Approx(2.0 * a.objective).epsilon(1e-6));
  CHECK(std::abs(a.allocation.tau0 - b.allocation.tau0) < 1e-6);
  CHECK((a.allocation.tau - b.allocation.tau).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("one device: user-adaptive and uplink-adaptive coincide") {
  const auto cfg = fixture::small_config(4, 1);
  for (int r = 0; r < 3; ++r) {
    const auto s = fixture::instance(cfg, r, 25.0);
    const auto ue = solve_ue(s.params, s.instance.derived, s.solver);
    const auto ul = solve_ul(s.params, s.instance.derived, s.solver);
    CHECK(ul.objective == doctest::Approx(ue.objective).epsilon(1e-4));
  }
}

TEST_CASE("passive baseline") {
  const auto cfg = fixture::small_config(4, 2);
  const auto s = fixture::instance(cfg, 0);
  const auto pp = passive_params(s.params);
  CHECK(pp.max_amplitude == 1.0);
  CHECK(pp.noise_irs_dl == 0.0);
  CHECK(pp.noise_irs_ul == 0.0);
  CHECK(pp.amplify_budget == kInf);
  const auto sol = solve_passive_baseline(s.params, s.instance.derived, Setup::kUserAdaptive, s.solver);
  CHECK(sol.passive);
  CHECK(sol.feasibility.feasible);
  CHECK(sol.reflections.downlink.max_amplitude() <= 1.0 + 1e-9);
}

TEST_CASE("solver config validation") {
  SolverConfig c;
  CHECK_NOTHROW(c.validate());
  c.ao_max_iterations = 0;
  CHECK_THROWS(c.validate());
}
