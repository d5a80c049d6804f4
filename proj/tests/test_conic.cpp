#include "irswpcn/conic.hpp"

#include <Eigen/Eigenvalues>
#include <doctest.h>

#include <random>

using namespace irswpcn;
using namespace irswpcn::conic;

TEST_CASE("linear program vertex") {
  // max x + y  s.t. x + 2y <= 4, 3x + y <= 6, x, y >= 0  ->  (1.6, 1.2)
  Program p(2);
  p.add_linear_objective(0, 1.0);
  p.add_linear_objective(1, 1.0);
  p.add_linear({{{0, 1.0}, {1, 2.0}}, 4.0});
  p.add_linear({{{0, 3.0}, {1, 1.0}}, 6.0});
  p.add_upper_bound(0, 0.0, -1.0);
  p.add_upper_bound(1, 0.0, -1.0);
  const auto r = maximize(p, RVector::Constant(2, 0.5));
  REQUIRE(r.status == Status::kOptimal);
  CHECK(r.x(0) == doctest::Approx(1.6).epsilon(1e-6));
  CHECK(r.x(1) == doctest::Approx(1.2).epsilon(1e-6));
  CHECK(r.objective == doctest::Approx(2.8).epsilon(1e-8));
}

TEST_CASE("concave quadratic with inactive and active balls") {
  // max c'x - x'x has its peak at c / 2
  Program p(3);
  const RVector c = (RVector(3) << 1.0, -2.0, 0.5).finished();
  p.add_linear_objective(c);
  p.add_concave_quadratic(RMatrix::Identity(3, 3));
  p.add_quadratic({RMatrix::Identity(3, 3), RVector::Zero(3), 100.0});
  auto r = maximize(p, RVector::Zero(3));
  REQUIRE(r.status == Status::kOptimal);
  CHECK((r.x - c / 2).norm() < 1e-6);

  // a small ball pushes the optimum to its boundary along c
  Program q(3);
  q.add_linear_objective(c);
  q.add_concave_quadratic(RMatrix::Identity(3, 3));
  q.add_quadratic({RMatrix::Identity(3, 3), RVector::Zero(3), 0.25});
  r = maximize(q, RVector::Zero(3));
  REQUIRE(r.status == Status::kOptimal);
  CHECK((r.x - 0.5 * c / c.norm()).norm() < 1e-5);
}

TEST_CASE("trace-constrained Hermitian block gives the largest eigenvalue") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  for (int n : {2, 3, 5}) {
    CMatrix a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = cplx(nd(rng), nd(rng));
    const CMatrix m = (a + a.adjoint()) / 2.0;
    const double lmax = Eigen::SelfAdjointEigenSolver<CMatrix>(m).eigenvalues().maxCoeff();

    Program p(n * n);
    const auto block = p.add_hermitian_block(0, n);
    for (const auto& t : block.functional(m)) p.add_linear_objective(t.index, t.coeff);
    p.add_linear({block.functional(CMatrix::Identity(n, n)), 1.0});
    RVector x0 = RVector::Zero(n * n);
    block.pack(CMatrix::Identity(n, n) / (2.0 * n), x0);
    const auto r = maximize(p, x0);
    REQUIRE(r.status == Status::kOptimal);
    CHECK(r.objective == doctest::Approx(lmax).epsilon(1e-7));
    const CMatrix w = block.unpack(r.x);
    CHECK(w.trace().real() == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("hermitian block pack round trip") {
  Program p(9);
  const auto block = p.add_hermitian_block(0, 3);
  CMatrix w(3, 3);
  w << 2.0, cplx(0.1, 0.2), cplx(-0.3, 0.4), cplx(0.1, -0.2), 1.0, cplx(0.5, 0.0), cplx(-0.3, -0.4),
      cplx(0.5, 0.0), 3.0;
  RVector x = RVector::Zero(9);
  block.pack(w, x);
  CHECK((block.unpack(x) - w).norm() < 1e-15);
  CMatrix m = CMatrix::Identity(3, 3);
  m(0, 1) = cplx(0.0, 1.0);
  m(1, 0) = cplx(0.0, -1.0);
  double lin = 0.0;
  for (const auto& t : block.functional(m)) lin += t.coeff * x(t.index);
  CHECK(lin == doctest::Approx((m * w).trace().real()));
}

TEST_CASE("perspective logarithm") {
  // max 2 t ln(1 + 3 e / t) with t, e <= 1 is increasing in both
  Program p(2);
  p.add_perspective_log({0, 1, 2.0, 3.0});
  p.add_upper_bound(0, 1.0);
  p.add_upper_bound(1, 1.0);
  p.add_upper_bound(0, 0.0, -1.0);
  p.add_upper_bound(1, 0.0, -1.0);
  const auto r = maximize(p, RVector::Constant(2, 0.5));
  REQUIRE(r.status == Status::kOptimal);
  CHECK(r.objective == doctest::Approx(2.0 * std::log(4.0)).epsilon(1e-8));

  // t + e <= 1, compared with a fine scan
  Program q(2);
  q.add_perspective_log({0, 1, 1.0, 1.0});
  q.add_linear({{{0, 1.0}, {1, 1.0}}, 1.0});
  q.add_upper_bound(0, 0.0, -1.0);
  q.add_upper_bound(1, 0.0, -1.0);
  const auto s = maximize(q, RVector::Constant(2, 0.3));
  double best = 0.0;
  for (int i = 1; i < 100000; ++i) {
    const double t = i / 100000.0;
    best = std::max(best, t * std::log(1.0 + (1.0 - t) / t));
  }
  REQUIRE(s.status == Status::kOptimal);
  CHECK(s.objective == doctest::Approx(best).epsilon(1e-7));
}

TEST_CASE("phase one") {
  Program p(2);
  p.add_linear({{{0, 1.0}, {1, 1.0}}, 1.0});
  p.add_linear({{{0, -1.0}}, -0.4});
  p.add_linear({{{1, -1.0}}, -0.4});
  const auto x = find_strictly_feasible(p, RVector::Zero(2));
  REQUIRE(x.has_value());
  CHECK(p.strictly_feasible(*x));

  Program empty(1);
  empty.add_upper_bound(0, 0.0);
  empty.add_upper_bound(0, -1.0, -1.0);
  CHECK_FALSE(find_strictly_feasible(empty, RVector::Zero(1)).has_value());
}
