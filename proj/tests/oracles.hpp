#pragma once

// Brute-force reference solutions used by the unit tests and the acceptance
// runner. Nothing here calls into the solvers.

#include "irswpcn/model.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

using irswpcn::CVector;
using irswpcn::RVector;
using irswpcn::cplx;

// max of a unimodal f on [lo, hi]
inline double golden_max(const std::function<double(double)>& f, double lo, double hi, double* argmax = nullptr) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < 200 && b - a > 1e-15 * (1.0 + std::abs(a)); ++i) {
    if (fc > fd) {
      b = d, d = c, fd = fc;
      c = b - r * (b - a), fc = f(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + r * (b - a), fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  if (argmax) *argmax = x;
  return f(x);
}

// max sum_k w_k t_k log2(1 + c_k / t_k) over t >= 0, sum t = budget.
// KKT: w_k (ln(1+x) - x/(1+x)) is equal across k with x = c_k / t_k.
inline double split_time(const std::vector<double>& w, const std::vector<double>& c, double budget) {
  auto marginal = [](double x) { return std::log1p(x) - x / (1.0 + x); };
  auto x_for = [&](double wk, double lam) {
    double lo = 0.0, hi = 1.0;
    while (wk * marginal(hi) < lam) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
      const double m = 0.5 * (lo + hi);
      (wk * marginal(m) < lam ? lo : hi) = m;
    }
    return 0.5 * (lo + hi);
  };
  auto used = [&](double lam) {
    double s = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k)
      if (c[k] > 0.0) s += c[k] / x_for(w[k], lam);
    return s;
  };
  bool any = false;
  for (double x : c) any |= x > 0.0;
  if (!any || budget <= 0.0) return 0.0;
  double lo = 1e-300, hi = 1.0;
  while (used(hi) > budget) hi *= 2.0;
  for (int i = 0; i < 3000 && hi / lo > 1.0 + 1e-15; ++i) {
    const double m = std::sqrt(lo * hi);
    (used(m) > budget ? lo : hi) = m;
  }
  const double lam = std::sqrt(lo * hi);
  double total = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (c[k] <= 0.0) continue;
    const double x = x_for(w[k], lam);
    total += w[k] * (c[k] / x) * std::log2(1.0 + x);
  }
  return total;
}

// Classic harvest-then-transmit network: device k harvests e_k per second of
// downlink and has uplink SNR gamma_k per Watt. Golden section over tau0.
inline double two_phase_wpcn(const std::vector<double>& w, const std::vector<double>& e,
                             const std::vector<double>& gamma, double frame) {
  return golden_max(
      [&](double t0) {
        std::vector<double> c(e.size());
        for (std::size_t k = 0; k < e.size(); ++k) c[k] = gamma[k] * e[k] * t0;
        return split_time(w, c, frame - t0);
      },
      0.0, frame);
}

// Projected gradient over complex coefficients x_n = a_n e^{j theta_n} of
//   f(x) = P_A |h + sum_n b_n x_n|^2 + s sum_n q_n |x_n|^2
// on the ellipsoid sum_n cost_n |x_n|^2 <= budget. Works in scaled
// coordinates u = sqrt(cost) x where the feasible set is a ball.
inline CVector ellipsoid_ascent(double pa, cplx h, const CVector& b, double s, const RVector& q, const RVector& cost,
                                double budget, std::mt19937_64& rng, int restarts = 4, int steps = 20000) {
  const int n = static_cast<int>(b.size());
  const RVector scale = cost.cwiseSqrt();
  const CVector bs = b.cwiseQuotient(scale.cast<cplx>());
  const RVector qs = q.cwiseQuotient(cost);
  const double radius = std::sqrt(budget);
  auto f = [&](const CVector& u) {
    return pa * std::norm(h + (bs.array() * u.array()).sum()) + s * qs.dot(u.cwiseAbs2());
  };
  // Lipschitz constant of the gradient of f in u
  const double lip = 2.0 * (pa * bs.squaredNorm() + s * qs.maxCoeff());
  std::normal_distribution<double> normal;
  CVector best;
  double best_val = -1.0;
  for (int r = 0; r < restarts; ++r) {
    CVector u(n);
    for (auto& x : u) x = cplx(normal(rng), normal(rng));
    u *= radius / u.norm();
    for (int it = 0; it < steps; ++it) {
      const cplx z = h + (bs.array() * u.array()).sum();
      // d f / d conj(u): pa z conj(bs) + s qs u
      const CVector grad = pa * z * bs.conjugate() + s * qs.cast<cplx>().cwiseProduct(u);
      CVector next = u + (2.0 / lip) * grad;
      if (next.norm() > radius) next *= radius / next.norm();
      if ((next - u).norm() <= 1e-15 * radius) {
        u = next;
        break;
      }
      u = next;
    }
    const double val = f(u);
    if (val > best_val) {
      best_val = val;
      best = u;
    }
  }
  return best.cwiseQuotient(scale.cast<cplx>());
}

}  // namespace oracle
