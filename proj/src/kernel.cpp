#include "irswpcn/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace irswpcn {

namespace {

constexpr double kLn2 = std::numbers::ln2;

// v^H A v = x' [[Re A, -Im A], [Im A, Re A]] x with x = [Re v; Im v].
RMatrix real_embedding(const CMatrix& a) {
  const auto n = a.rows();
  RMatrix m(2 * n, 2 * n);
  m.topLeftCorner(n, n) = a.real();
  m.topRightCorner(n, n) = -a.imag();
  m.bottomLeftCorner(n, n) = a.imag();
  m.bottomRightCorner(n, n) = a.real();
  return m;
}

RMatrix real_diag(const RVector& d) {
  const auto n = d.size();
  RVector full(2 * n);
  full << d, d;
  return full.asDiagonal();
}

// 2 Re{c^H v} = lin' x
RVector real_linear(const CVector& c) {
  const auto n = c.size();
  RVector l(2 * n);
  l << 2.0 * c.real(), 2.0 * c.imag();
  return l;
}

RVector to_real(const CVector& v) {
  RVector x(2 * v.size());
  x << v.real(), v.imag();
  return x;
}

CVector to_complex(const RVector& x) {
  const auto n = x.size() / 2;
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(x(i), x(i + n));
  return v;
}

void add_amplitude_caps(conic::Program& prog, int n, double a_max) {
  for (int i = 0; i < n; ++i) {
    conic::QuadraticConstraint c;
    c.quad = RMatrix::Zero(2 * n, 2 * n);
    c.quad(i, i) = 1.0;
    c.quad(i + n, i + n) = 1.0;
    c.lin = RVector::Zero(2 * n);
    c.rhs = a_max * a_max;
    prog.add_quadratic(std::move(c));
  }
}

// p v^H Q2k v + sigma_n2^2 v^H v <= P_F
void add_uplink_budget(conic::Program& prog, const SystemParams& params, const DerivedChannel& ch, int k,
                       double power) {
  if (std::isinf(params.amplify_budget)) return;
  const RVector d = power * ch.q2[k].array() + params.noise_irs_ul;
  prog.add_quadratic({real_diag(d), RVector::Zero(2 * ch.num_elements), params.amplify_budget});
}

conic::LinearConstraint merged(std::vector<conic::LinearTerm> terms, double rhs) {
  std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
  conic::LinearConstraint c;
  for (const auto& t : terms) {
    if (!c.terms.empty() && c.terms.back().index == t.index) c.terms.back().coeff += t.coeff;
    else c.terms.push_back(t);
  }
  c.rhs = rhs;
  return c;
}

double uplink_headroom(const SystemParams& params, const CVector& v) {
  return params.amplify_budget - params.noise_irs_ul * v.squaredNorm();
}

}  // namespace

double relaxed_harvest_rate(const SystemParams& params, const DerivedChannel& ch, int k, const CMatrix& cov) {
  const int n = ch.num_elements;
  double tr_b = (ch.lifted_outer[k] * cov).trace().real();
  double tr_q = 0.0;
  for (int i = 0; i <= n; ++i) tr_q += ch.q2_lift[k](i) * cov(i, i).real();
  return params.efficiency * (params.hap_power * tr_b + params.noise_irs_dl * tr_q - params.noise_irs_dl * cov(n, n).real());
}

TimePowerSolution solve_time_power_sdp(const SystemParams& params, const DerivedChannel& ch,
                                       const RVector& gains, const std::vector<CVector>& uplink,
                                       const conic::Settings& settings) {
  const int n = ch.num_elements;
  const int kc = ch.num_devices;
  if (gains.size() != kc || static_cast<int>(uplink.size()) != kc)
    throw std::invalid_argument("solve_time_power_sdp: need one gain and one uplink vector per device");
  const double tmax = params.frame_time;
  const double a2 = params.max_amplitude * params.max_amplitude;
  const bool budgeted = std::isfinite(params.amplify_budget);

  // Interior starting point: diagonal W0 with small uniform amplitude.
  double alpha2 = 0.5 * a2;
  if (budgeted) {
    const double per_unit = params.hap_power * ch.q1.sum() + params.noise_irs_dl * n;
    if (per_unit > 0.0) alpha2 = std::min(alpha2, 0.5 * params.amplify_budget / per_unit);
  }
  const double tau0_init = 0.45 * tmax;
  CMatrix w_init = CMatrix::Zero(n + 1, n + 1);
  for (int i = 0; i < n; ++i) w_init(i, i) = tau0_init * alpha2;
  w_init(n, n) = tau0_init;

  // Devices that can neither harvest nor transmit are pinned to zero.
  std::vector<int> active;
  std::vector<double> cap(kc, kInf), e_init(kc, 0.0);
  for (int k = 0; k < kc; ++k) {
    if (budgeted) {
      const double head = uplink_headroom(params, uplink[k]);
      const double q = ch.q2[k].dot(uplink[k].cwiseAbs2());
      if (head <= 0.0) continue;
      cap[k] = q > 0.0 ? head / q : kInf;
    }
    e_init[k] = relaxed_harvest_rate(params, ch, k, w_init / tau0_init) * tau0_init;
    if (e_init[k] > 0.0) active.push_back(k);
  }

  const int na = static_cast<int>(active.size());
  double e_unit = 0.0;
  for (int k : active) e_unit = std::max(e_unit, e_init[k]);
  if (!(e_unit > 0.0)) e_unit = 1.0;

  // x = [tau (na) | f / e_unit (na) | W0 block]
  const int off_w = 2 * na;
  conic::Program prog(off_w + (n + 1) * (n + 1));
  const auto blk = prog.add_hermitian_block(off_w, n + 1);
  const int tau0_idx = blk.diag(n);

  for (int j = 0; j < na; ++j) {
    const int k = active[j];
    prog.add_perspective_log({j, na + j, params.weights[k] / kLn2, gains(k) * e_unit});
    prog.add_upper_bound(j, 0.0, -1.0);
    prog.add_upper_bound(na + j, 0.0, -1.0);

    // f_k + eta tau0 sigma_n1^2 <= eta Tr[(P_A B_k + sigma_n1^2 Q2k~) W0]
    CMatrix m = params.hap_power * ch.lifted_outer[k];
    for (int i = 0; i <= n; ++i) m(i, i) += params.noise_irs_dl * ch.q2_lift[k](i);
    auto terms = blk.functional(m);
    for (auto& t : terms) t.coeff *= -params.efficiency;
    terms.push_back({na + j, e_unit});
    terms.push_back({tau0_idx, params.efficiency * params.noise_irs_dl});
    prog.add_linear(merged(std::move(terms), 0.0));

    // f_k v_k^H Q2k v_k + sigma_n2^2 tau_k v_k^H v_k <= tau_k P_F, i.e. f_k <= cap_k tau_k
    if (std::isfinite(cap[k])) prog.add_linear(merged({{na + j, e_unit}, {j, -cap[k]}}, 0.0));
  }

  if (budgeted) {
    // P_A Tr(Q1~ W0) + sigma_n1^2 Tr(W0) <= tau0 (P_F + P_A + sigma_n1^2)
    CMatrix m = CMatrix::Zero(n + 1, n + 1);
    for (int i = 0; i <= n; ++i) m(i, i) = params.hap_power * ch.q1_lift(i) + params.noise_irs_dl;
    auto terms = blk.functional(m);
    terms.push_back({tau0_idx, -(params.amplify_budget + params.hap_power + params.noise_irs_dl)});
    prog.add_linear(merged(std::move(terms), 0.0));
  }

  {
    std::vector<conic::LinearTerm> terms{{tau0_idx, 1.0}};
    for (int j = 0; j < na; ++j) terms.push_back({j, 1.0});
    prog.add_linear(merged(std::move(terms), tmax));
  }
  for (int i = 0; i < n; ++i) prog.add_linear(merged({{blk.diag(i), 1.0}, {tau0_idx, -a2}}, 0.0));

  RVector x0 = RVector::Zero(prog.num_vars());
  blk.pack(w_init, x0);
  for (int j = 0; j < na; ++j) {
    const int k = active[j];
    const double tau = 0.45 * tmax / na;
    x0(j) = tau;
    x0(na + j) = 0.5 * std::min(e_init[k], cap[k] * tau) / e_unit;
  }

  TimePowerSolution sol;
  sol.tau = RVector::Zero(kc);
  sol.energy = RVector::Zero(kc);
  const auto res = conic::maximize(prog, x0, settings);
  sol.status = res.status;
  sol.gap = res.gap;
  if (res.status == conic::Status::kInfeasible) return sol;
  sol.lifted_dl = blk.unpack(res.x);
  sol.tau0 = res.x(tau0_idx);
  for (int j = 0; j < na; ++j) {
    sol.tau(active[j]) = res.x(j);
    sol.energy(active[j]) = res.x(na + j) * e_unit;
  }
  sol.objective = res.objective;
  return sol;
}

TimePowerInputs time_power_inputs(const SystemParams& params, const DerivedChannel& ch, const CVector& downlink,
                                  const std::vector<CVector>& uplink) {
  const int kc = ch.num_devices;
  if (static_cast<int>(uplink.size()) != kc) throw std::invalid_argument("need one uplink vector per device");
  TimePowerInputs in;
  in.gains.resize(kc);
  in.harvest_rate.resize(kc);
  in.power_cap.resize(kc);
  for (int k = 0; k < kc; ++k) {
    in.gains(k) = uplink_gain_to_noise(params, ch, k, uplink[k]);
    in.harvest_rate(k) = harvest_rate(params, ch, k, downlink);
    in.power_cap(k) = ul_power_cap(params, ch, k, uplink[k]);
  }
  return in;
}

TimePowerSolution solve_time_power_convex(const SystemParams& params, const TimePowerInputs& in,
                                          const conic::Settings& settings) {
  const int kc = static_cast<int>(in.gains.size());
  const double tmax = params.frame_time;
  std::vector<int> active;
  for (int k = 0; k < kc; ++k)
    if (in.harvest_rate(k) > 0.0 && in.power_cap(k) > 0.0) active.push_back(k);
  const int na = static_cast<int>(active.size());

  TimePowerSolution sol;
  sol.tau = RVector::Zero(kc);
  sol.energy = RVector::Zero(kc);
  if (na == 0) {
    sol.status = conic::Status::kOptimal;
    sol.gap = 0.0;
    return sol;
  }

  const double tau0_init = 0.45 * tmax;
  double e_unit = 0.0;
  for (int k : active) e_unit = std::max(e_unit, tau0_init * in.harvest_rate(k));

  // x = [tau0 | tau (na) | f / e_unit (na)]
  conic::Program prog(1 + 2 * na);
  prog.add_upper_bound(0, 0.0, -1.0);
  std::vector<conic::LinearTerm> time_terms{{0, 1.0}};
  for (int j = 0; j < na; ++j) {
    const int k = active[j];
    const int ti = 1 + j;
    const int fi = 1 + na + j;
    prog.add_perspective_log({ti, fi, params.weights[k] / kLn2, in.gains(k) * e_unit});
    prog.add_upper_bound(ti, 0.0, -1.0);
    prog.add_upper_bound(fi, 0.0, -1.0);
    prog.add_linear({{{fi, e_unit}, {0, -in.harvest_rate(k)}}, 0.0});
    if (std::isfinite(in.power_cap(k))) prog.add_linear({{{fi, e_unit}, {ti, -in.power_cap(k)}}, 0.0});
    time_terms.push_back({ti, 1.0});
  }
  prog.add_linear({std::move(time_terms), tmax});

  RVector x0(1 + 2 * na);
  x0(0) = tau0_init;
  for (int j = 0; j < na; ++j) {
    const int k = active[j];
    const double tau = 0.45 * tmax / na;
    x0(1 + j) = tau;
    x0(1 + na + j) = 0.5 * std::min(tau0_init * in.harvest_rate(k), in.power_cap(k) * tau) / e_unit;
  }

  const auto res = conic::maximize(prog, x0, settings);
  sol.status = res.status;
  sol.gap = res.gap;
  if (res.status == conic::Status::kInfeasible) return sol;
  sol.tau0 = res.x(0);
  for (int j = 0; j < na; ++j) {
    sol.tau(active[j]) = res.x(1 + j);
    sol.energy(active[j]) = res.x(1 + na + j) * e_unit;
  }
  sol.objective = res.objective;
  return sol;
}

double qcqp_vk_objective(const SystemParams& params, const DerivedChannel& ch, int k, const CVector& v,
                         cplx iota) {
  const double denom = params.noise_irs_ul * ch.q1.dot(v.cwiseAbs2()) + params.noise_receiver_ul;
  return 2.0 * (std::conj(iota) * ch.effective_gain(k, v)).real() - std::norm(iota) * denom;
}

ReflectionSolve solve_qcqp_vk(const SystemParams& params, const DerivedChannel& ch, int k, double power,
                              cplx iota, const conic::Settings& settings) {
  if (power < 0.0) throw std::invalid_argument("solve_qcqp_vk: power must be >= 0");
  const int n = ch.num_elements;
  ReflectionSolve out;
  out.v = ReflectionVector::zeros(n);
  if (iota == cplx(0.0)) {
    out.objective = qcqp_vk_objective(params, ch, k, out.v.coeffs(), iota);
    out.status = conic::Status::kOptimal;
    return out;
  }
  conic::Program prog(2 * n);
  prog.add_linear_objective(real_linear(iota * ch.cascade[k]));
  prog.add_concave_quadratic(real_diag(std::norm(iota) * params.noise_irs_ul * ch.q1));
  prog.add_objective_constant(2.0 * (std::conj(iota) * ch.direct_conj(k)).real() -
                              std::norm(iota) * params.noise_receiver_ul);
  add_uplink_budget(prog, params, ch, k, power);
  add_amplitude_caps(prog, n, params.max_amplitude);

  const auto res = conic::maximize(prog, RVector::Zero(2 * n), settings);
  out.status = res.status;
  if (res.status == conic::Status::kInfeasible) return out;
  out.v = ReflectionVector(to_complex(res.x));
  out.objective = res.objective;
  return out;
}

double shared_qcqp_objective(const SystemParams& params, const DerivedChannel& ch, const SharedQcqpInputs& in,
                             const CVector& v) {
  const double q1v = ch.q1.dot(v.cwiseAbs2());
  double total = 0.0;
  for (int k = 0; k < ch.num_devices; ++k) {
    const double w = params.weights[k];
    const double tau = in.allocation.tau(k);
    const double p = in.allocation.power(k);
    const double chi = in.chi(k);
    const cplx z = ch.effective_gain(k, v);
    const double s = std::sqrt(w * tau * (1.0 + chi) * p);
    const double u = 2.0 * (std::conj(in.iota(k)) * s * z).real() -
                     std::norm(in.iota(k)) * (p * std::norm(z) + params.noise_irs_ul * q1v + params.noise_receiver_ul);
    total += w * tau * std::log2(1.0 + chi) - w * tau * chi + u;
  }
  return total;
}

ReflectionSolve solve_qcqp_shared(const SystemParams& params, const DerivedChannel& ch,
                                  const SharedQcqpInputs& in, const conic::Settings& settings) {
  const int n = ch.num_elements;
  const int kc = ch.num_devices;
  if (in.chi.size() != kc || in.iota.size() != kc || in.current.size() != n)
    throw std::invalid_argument("solve_qcqp_shared: inconsistent input sizes");
  const auto& alloc = in.allocation;
  ReflectionSolve out;

  if (in.iota.cwiseAbs().maxCoeff() == 0.0) {
    // Objective is constant in v. The static setup keeps its expansion point,
    // which already satisfies energy causality; the uplink setup returns zero.
    out.v = in.kind == SharedKind::kStatic ? ReflectionVector(in.current) : ReflectionVector::zeros(n);
    out.objective = shared_qcqp_objective(params, ch, in, out.v.coeffs());
    out.status = conic::Status::kOptimal;
    return out;
  }

  conic::Program prog(2 * n);
  CMatrix quad = CMatrix::Zero(n, n);
  CVector lin = CVector::Zero(n);
  double constant = 0.0;
  for (int k = 0; k < kc; ++k) {
    const double w = params.weights[k];
    const double tau = alloc.tau(k);
    const double p = alloc.power(k);
    const double chi = in.chi(k);
    const cplx io = in.iota(k);
    const double mag2 = std::norm(io);
    const double s = std::sqrt(w * tau * (1.0 + chi) * p);
    const cplx d = ch.direct_conj(k);
    const CVector& b = ch.cascade[k];
    quad += mag2 * p * (b * b.adjoint());
    quad.diagonal() += (mag2 * params.noise_irs_ul * ch.q1).cast<cplx>();
    lin += io * s * b - mag2 * p * d * b;
    constant += w * tau * std::log2(1.0 + chi) - w * tau * chi + 2.0 * s * (std::conj(io) * d).real() -
                mag2 * (p * std::norm(d) + params.noise_receiver_ul);
  }
  prog.add_concave_quadratic(real_embedding(quad));
  prog.add_linear_objective(real_linear(lin));
  prog.add_objective_constant(constant);

  for (int k = 0; k < kc; ++k) add_uplink_budget(prog, params, ch, k, alloc.power(k));
  add_amplitude_caps(prog, n, params.max_amplitude);

  if (in.kind == SharedKind::kStatic) {
    const CVector& vh = in.current;
    for (int k = 0; k < kc; ++k) {
      const double spent = alloc.power(k) * alloc.tau(k);
      if (!(spent > 0.0)) continue;
      // p_k tau_k <= tau0 eta q_k(v), q_k(v) = c0 + 2 Re{c^H v}
      const cplx zh = ch.effective_gain(k, vh);
      const CVector c = params.noise_irs_dl * ch.q2[k].cwiseProduct(vh) + params.hap_power * zh * ch.cascade[k];
      const double c0 = -params.noise_irs_dl * ch.q2[k].dot(vh.cwiseAbs2()) - params.hap_power * std::norm(zh) +
                        2.0 * params.hap_power * (std::conj(zh) * ch.direct_conj(k)).real();
      const double scale = alloc.tau0 * params.efficiency;
      const RVector l = real_linear(c);
      conic::LinearConstraint row;
      for (int i = 0; i < 2 * n; ++i)
        if (l(i) != 0.0) row.terms.push_back({i, -scale * l(i)});
      row.rhs = scale * c0 - spent;
      prog.add_linear(std::move(row));
    }
    if (std::isfinite(params.amplify_budget)) {
      const RVector d = params.hap_power * ch.q1.array() + params.noise_irs_dl;
      prog.add_quadratic({real_diag(d), RVector::Zero(2 * n), params.amplify_budget});
    }
  }

  RVector x0 = to_real(in.current);
  if (!prog.strictly_feasible(x0)) {
    const RVector zero = RVector::Zero(2 * n);
    if (in.kind == SharedKind::kUplink && prog.strictly_feasible(zero)) {
      x0 = zero;
    } else {
      auto found = conic::find_strictly_feasible(prog, x0, settings);
      if (!found) {
        out.v = ReflectionVector(in.current);
        out.objective = shared_qcqp_objective(params, ch, in, in.current);
        out.status = conic::Status::kInfeasible;
        return out;
      }
      x0 = *found;
    }
  }
  const auto res = conic::maximize(prog, x0, settings);
  out.status = res.status;
  out.v = ReflectionVector(to_complex(res.x));
  out.objective = res.objective;
  return out;
}

double sca_surrogate_qk(const SystemParams& params, const DerivedChannel& ch, int k, const CVector& v,
                        const CVector& expansion) {
  const RVector& q2 = ch.q2[k];
  const cplx zh = ch.effective_gain(k, expansion);
  const cplx z = ch.effective_gain(k, v);
  const double s2 = params.noise_irs_dl;
  const double pa = params.hap_power;
  const cplx cross = (expansion.conjugate().cwiseProduct(q2.cast<cplx>()).cwiseProduct(v)).sum();
  return -s2 * q2.dot(expansion.cwiseAbs2()) + 2.0 * s2 * cross.real() - pa * std::norm(zh) +
         2.0 * pa * (std::conj(zh) * z).real();
}

}  // namespace irswpcn
