#include "irswpcn/kernel.hpp"

#include <algorithm>
#include <cmath>

namespace irswpcn {

namespace {

// Pull a candidate back inside the amplitude caps and the downlink amplify
// budget by shrinking it uniformly.
CVector rescale(const SystemParams& params, const DerivedChannel& ch, CVector v) {
  double s = 1.0;
  const double peak = v.cwiseAbs().maxCoeff();
  if (peak > params.max_amplitude) s = std::min(s, params.max_amplitude / peak);
  if (std::isfinite(params.amplify_budget)) {
    const double dl = params.hap_power * ch.q1.dot(v.cwiseAbs2()) + params.noise_irs_dl * v.squaredNorm();
    if (dl > params.amplify_budget) s = std::min(s, std::sqrt(params.amplify_budget / dl));
  }
  return s * v;
}

}  // namespace

RandomizationResult gaussian_randomization(const SystemParams& params, const DerivedChannel& ch,
                                           const CMatrix& lifted_dl, double tau0, int num_candidates,
                                           std::mt19937_64& rng) {
  const int n = ch.num_elements;
  if (lifted_dl.rows() != n + 1 || lifted_dl.cols() != n + 1)
    throw std::invalid_argument("gaussian_randomization: W0 must be (N+1)x(N+1)");
  if (!(tau0 > 0.0)) throw ModelError("gaussian_randomization: tau0 must be > 0");

  const CMatrix cov = lifted_dl / tau0;
  std::vector<double> relaxed(ch.num_devices);
  for (int k = 0; k < ch.num_devices; ++k) relaxed[k] = relaxed_harvest_rate(params, ch, k, cov);

  Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (cov + cov.adjoint()));
  RVector lambda = eig.eigenvalues().cwiseMax(0.0);
  const CMatrix& u = eig.eigenvectors();
  const double l1 = lambda(n);
  const double l2 = n > 0 ? lambda(n - 1) : 0.0;

  RandomizationResult best;
  auto consider = [&](const CVector& xi) {
    ++best.candidates;
    if (std::abs(xi(n)) < 1e-300) return;
    CVector v = xi.head(n) / xi(n);
    if (!v.allFinite()) return;
    v = rescale(params, ch, std::move(v));
    double score = kInf;
    for (int k = 0; k < ch.num_devices; ++k) {
      if (!(relaxed[k] > 0.0)) continue;
      score = std::min(score, harvest_rate(params, ch, k, v) / relaxed[k]);
    }
    if (score > best.score) {
      best.score = score;
      best.v = ReflectionVector(std::move(v));
    }
  };

  consider(u.col(n));
  best.rank_one = l1 > 0.0 && l2 <= 1e-7 * l1;
  if (!best.rank_one) {
    const CMatrix root = u * lambda.cwiseSqrt().asDiagonal();
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    CVector r(n + 1);
    for (int c = 0; c < num_candidates; ++c) {
      for (int i = 0; i <= n; ++i) r(i) = cplx(normal(rng), normal(rng));
      consider(root * r);
    }
  }
  if (best.v.size() != n) throw ModelError("gaussian_randomization: no usable candidate");
  return best;
}

}  // namespace irswpcn
