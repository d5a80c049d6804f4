#include "irswpcn/conic.hpp"

#include <algorithm>
#include <cmath>

namespace irswpcn::conic {

namespace {

// One rank-one piece c * e_row e_col^T of a Hermitian basis matrix.
struct BasisTerm {
  int row;
  int col;
  cplx coeff;
};

struct BasisElement {
  BasisTerm terms[2];
  int count;
};

std::vector<BasisElement> basis_of(const HermitianBlock& b) {
  std::vector<BasisElement> basis(b.size());
  for (int i = 0; i < b.dim; ++i) basis[i] = {{{i, i, 1.0}, {}}, 1};
  for (int i = 0; i < b.dim; ++i) {
    for (int j = i + 1; j < b.dim; ++j) {
      const int re = b.upper_re(i, j) - b.offset;
      basis[re] = {{{i, j, 1.0}, {j, i, 1.0}}, 2};
      basis[re + 1] = {{{i, j, cplx(0, 1)}, {j, i, cplx(0, -1)}}, 2};
    }
  }
  return basis;
}

}  // namespace

std::string to_string(Status status) {
  switch (status) {
    case Status::kOptimal: return "optimal";
    case Status::kMaxIterations: return "max-iterations";
    case Status::kInfeasible: return "infeasible";
  }
  return "?";
}

int HermitianBlock::upper_re(int i, int j) const {
  const int k = i * dim - i * (i + 1) / 2 + (j - i - 1);
  return offset + dim + 2 * k;
}

CMatrix HermitianBlock::unpack(const RVector& x) const {
  CMatrix w(dim, dim);
  for (int i = 0; i < dim; ++i) {
    w(i, i) = x(diag(i));
    for (int j = i + 1; j < dim; ++j) {
      const cplx z(x(upper_re(i, j)), x(upper_im(i, j)));
      w(i, j) = z;
      w(j, i) = std::conj(z);
    }
  }
  return w;
}

void HermitianBlock::pack(const CMatrix& w, RVector& x) const {
  for (int i = 0; i < dim; ++i) {
    x(diag(i)) = w(i, i).real();
    for (int j = i + 1; j < dim; ++j) {
      x(upper_re(i, j)) = w(i, j).real();
      x(upper_im(i, j)) = w(i, j).imag();
    }
  }
}

std::vector<LinearTerm> HermitianBlock::functional(const CMatrix& m) const {
  // Re tr(M W) = sum_i M_ii W_ii + sum_{i<j} 2 (Re M_ij Re W_ij + Im M_ij Im W_ij)
  std::vector<LinearTerm> terms;
  for (int i = 0; i < dim; ++i)
    if (m(i, i).real() != 0.0) terms.push_back({diag(i), m(i, i).real()});
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      if (m(i, j).real() != 0.0) terms.push_back({upper_re(i, j), 2.0 * m(i, j).real()});
      if (m(i, j).imag() != 0.0) terms.push_back({upper_im(i, j), 2.0 * m(i, j).imag()});
    }
  }
  return terms;
}

Program::Program(int num_vars)
    : n_(num_vars), lin_obj_(RVector::Zero(num_vars)), quad_obj_(RMatrix::Zero(num_vars, num_vars)) {}

void Program::add_concave_quadratic(const RMatrix& p) {
  quad_obj_ += p;
  has_quad_obj_ = true;
}

void Program::add_perspective_log(PerspectiveLog term) {
  if (term.weight == 0.0 || term.gain == 0.0) return;
  logs_.push_back(term);
}

void Program::add_quadratic(QuadraticConstraint c) {
  if (c.quad.rows() != n_ || c.lin.size() != n_) throw std::invalid_argument("quadratic constraint size mismatch");
  quadratic_.push_back(std::move(c));
}

HermitianBlock Program::add_hermitian_block(int offset, int dim) {
  HermitianBlock b{offset, dim};
  if (offset < 0 || offset + b.size() > n_) throw std::invalid_argument("Hermitian block out of range");
  blocks_.push_back(b);
  return b;
}

double Program::objective(const RVector& x) const {
  double f = constant_ + lin_obj_.dot(x);
  if (has_quad_obj_) f -= x.dot(quad_obj_ * x);
  for (const auto& l : logs_) {
    const double tau = x(l.time);
    if (tau <= 0.0) continue;
    f += l.weight * tau * std::log1p(l.gain * x(l.energy) / tau);
  }
  return f;
}

double Program::barrier_degree() const {
  double m = static_cast<double>(linear_.size() + quadratic_.size());
  for (const auto& b : blocks_) m += b.dim;
  return m;
}

bool Program::strictly_feasible(const RVector& x) const {
  double phi = 0.0;
  return add_barrier(x, phi, nullptr, nullptr);
}

bool Program::add_barrier(const RVector& x, double& phi, RVector* grad, RMatrix* hess) const {
  for (const auto& c : linear_) {
    double lhs = 0.0;
    for (const auto& t : c.terms) lhs += t.coeff * x(t.index);
    const double s = c.rhs - lhs;
    if (!(s > 0.0)) return false;
    phi -= std::log(s);
    if (grad) {
      for (const auto& t : c.terms) (*grad)(t.index) += t.coeff / s;
    }
    if (hess) {
      const double inv2 = 1.0 / (s * s);
      for (const auto& a : c.terms)
        for (const auto& b : c.terms)
          if (a.index >= b.index) (*hess)(a.index, b.index) += a.coeff * b.coeff * inv2;
    }
  }
  for (const auto& c : quadratic_) {
    const RVector qx = c.quad * x;
    const double s = c.rhs - x.dot(qx) - c.lin.dot(x);
    if (!(s > 0.0)) return false;
    phi -= std::log(s);
    if (grad || hess) {
      const RVector dg = 2.0 * qx + c.lin;
      if (grad) *grad += dg / s;
      if (hess) {
        hess->triangularView<Eigen::Lower>() += (2.0 / s) * c.quad;
        hess->selfadjointView<Eigen::Lower>().rankUpdate(dg, 1.0 / (s * s));
      }
    }
  }
  for (const auto& b : blocks_) {
    const CMatrix w = b.unpack(x);
    Eigen::LLT<CMatrix> llt(w);
    if (llt.info() != Eigen::Success) return false;
    const RVector diag = llt.matrixLLT().diagonal().real();
    double logdet = 0.0;
    for (int i = 0; i < b.dim; ++i) {
      const double d = diag(i);
      if (!(d > 0.0)) return false;
      logdet += 2.0 * std::log(d);
    }
    phi -= logdet;
    if (!grad && !hess) continue;
    const CMatrix z = llt.solve(CMatrix::Identity(b.dim, b.dim));
    const auto basis = basis_of(b);
    const int sz = b.size();
    if (grad) {
      for (int p = 0; p < sz; ++p) {
        cplx tr = 0.0;
        for (int s = 0; s < basis[p].count; ++s) {
          const auto& t = basis[p].terms[s];
          tr += t.coeff * z(t.col, t.row);
        }
        (*grad)(b.offset + p) -= tr.real();
      }
    }
    if (hess) {
      // d^2(-logdet)/dx_p dx_q = Re tr(Z E_p Z E_q)
      for (int p = 0; p < sz; ++p) {
        for (int q = p; q < sz; ++q) {
          cplx acc = 0.0;
          for (int s = 0; s < basis[p].count; ++s) {
            const auto& ts = basis[p].terms[s];
            for (int u = 0; u < basis[q].count; ++u) {
              const auto& tu = basis[q].terms[u];
              acc += ts.coeff * tu.coeff * z(ts.col, tu.row) * z(tu.col, ts.row);
            }
          }
          (*hess)(b.offset + q, b.offset + p) += acc.real();
        }
      }
    }
  }
  return true;
}

bool Program::evaluate(const RVector& x, double t, double& phi, RVector* grad, RMatrix* hess) const {
  phi = 0.0;
  if (grad) grad->setZero(n_);
  if (hess) hess->setZero(n_, n_);

  for (const auto& l : logs_) {
    const double tau = x(l.time);
    const double e = x(l.energy);
    if (!(tau > 0.0)) return false;
    const double u = l.gain * e / tau;
    if (!(1.0 + u > 0.0)) return false;
    phi -= t * l.weight * tau * std::log1p(u);
    if (grad) {
      (*grad)(l.time) -= t * l.weight * (std::log1p(u) - u / (1.0 + u));
      (*grad)(l.energy) -= t * l.weight * l.gain / (1.0 + u);
    }
    if (hess) {
      // Hessian of tau ln(1 + g e / tau) is -(1/(tau (1+u)^2)) w w', w = (u, -g).
      const double c = t * l.weight / (tau * (1.0 + u) * (1.0 + u));
      (*hess)(l.time, l.time) += c * u * u;
      (*hess)(l.energy, l.energy) += c * l.gain * l.gain;
      const double cross = -c * u * l.gain;
      if (l.time > l.energy) (*hess)(l.time, l.energy) += cross;
      else (*hess)(l.energy, l.time) += cross;
    }
  }

  phi -= t * (constant_ + lin_obj_.dot(x));
  if (grad) *grad -= t * lin_obj_;
  if (has_quad_obj_) {
    const RVector px = quad_obj_ * x;
    phi += t * x.dot(px);
    if (grad) *grad += 2.0 * t * px;
    if (hess) hess->triangularView<Eigen::Lower>() += 2.0 * t * quad_obj_;
  }

  if (!add_barrier(x, phi, grad, hess)) return false;

  // Everything above accumulates into the lower triangle.
  if (hess) hess->triangularView<Eigen::StrictlyUpper>() = hess->transpose();
  return std::isfinite(phi);
}

namespace {

// Solves H dx = -g with symmetric Jacobi scaling. Returns false if H is not
// numerically positive definite even after a small ridge.
bool newton_direction(const RMatrix& h, const RVector& g, RVector& dx) {
  const int n = static_cast<int>(g.size());
  RVector d(n);
  for (int i = 0; i < n; ++i) d(i) = 1.0 / std::sqrt(std::max(h(i, i), 1e-300));
  RMatrix hs = d.asDiagonal() * h * d.asDiagonal();
  const RVector gs = d.cwiseProduct(g);
  for (double ridge : {0.0, 1e-12, 1e-9, 1e-6}) {
    if (ridge > 0.0) hs.diagonal().array() += ridge;
    Eigen::LLT<RMatrix> llt(hs);
    if (llt.info() != Eigen::Success) continue;
    dx = d.cwiseProduct(llt.solve(-gs));
    if (dx.allFinite()) return true;
  }
  return false;
}

}  // namespace

Result maximize(const Program& program, const RVector& x0, const Settings& settings,
                const std::function<bool(const RVector&)>& stop_when) {
  Result res;
  res.x = x0;
  if (!program.strictly_feasible(x0)) {
    res.status = Status::kInfeasible;
    res.objective = program.objective(x0);
    return res;
  }

  const int n = program.num_vars();
  const double m = program.barrier_degree();
  RVector x = x0;
  RVector grad(n);
  RMatrix hess(n, n);
  RVector dx(n);

  double t = settings.initial_barrier;
  if (m > 0.0) t = std::max(t, m / std::max(1.0, std::abs(program.objective(x0))));

  int steps = 0;
  bool exhausted = false;
  while (true) {
    // Centering.
    for (int inner = 0; inner < 200; ++inner) {
      if (steps >= settings.max_newton_steps) {
        exhausted = true;
        break;
      }
      double phi = 0.0;
      if (!program.evaluate(x, t, phi, &grad, &hess)) break;
      if (!newton_direction(hess, grad, dx)) break;
      ++steps;
      const double slope = grad.dot(dx);
      const double decrement = -slope;
      if (decrement / 2.0 <= 1e-10) break;
      double step = 1.0;
      bool moved = false;
      while (step > 1e-14) {
        const RVector xn = x + step * dx;
        double phin = 0.0;
        if (program.evaluate(xn, t, phin, nullptr, nullptr) &&
            phin <= phi + 0.25 * step * slope + 1e-14 * std::abs(phi)) {
          x = xn;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }

    const double obj = program.objective(x);
    const double gap = m / t;
    res.x = x;
    res.objective = obj;
    res.gap = gap;
    res.newton_steps = steps;
    if (stop_when && stop_when(x)) {
      res.status = Status::kOptimal;
      return res;
    }
    if (m == 0.0 || gap <= std::max(settings.abs_gap, settings.rel_gap * std::abs(obj))) {
      res.status = Status::kOptimal;
      return res;
    }
    if (exhausted) {
      res.status = Status::kMaxIterations;
      return res;
    }
    t *= settings.barrier_growth;
  }
}

std::optional<RVector> find_strictly_feasible(const Program& program, const RVector& x0,
                                              const Settings& settings) {
  if (program.strictly_feasible(x0)) return x0;
  const int n = program.num_vars();
  const int s_idx = n;
  Program phase1(n + 1);
  for (const auto& b : program.blocks()) phase1.add_hermitian_block(b.offset, b.dim);

  RVector y0(n + 1);
  y0.head(n) = x0;
  double worst = -kInf;
  // Rows are normalised at x0 so that the common slack s is relative.
  for (const auto& c : program.linear()) {
    double lhs = 0.0;
    for (const auto& t : c.terms) lhs += t.coeff * x0(t.index);
    const double scale = std::max({std::abs(c.rhs), std::abs(lhs), 1e-300});
    LinearConstraint row;
    for (const auto& t : c.terms) row.terms.push_back({t.index, t.coeff / scale});
    row.terms.push_back({s_idx, -1.0});
    row.rhs = c.rhs / scale;
    worst = std::max(worst, (lhs - c.rhs) / scale);
    phase1.add_linear(std::move(row));
  }
  for (const auto& c : program.quadratic()) {
    const double lhs = x0.dot(c.quad * x0) + c.lin.dot(x0);
    const double scale = std::max({std::abs(c.rhs), std::abs(lhs), 1e-300});
    QuadraticConstraint q;
    q.quad = RMatrix::Zero(n + 1, n + 1);
    q.quad.topLeftCorner(n, n) = c.quad / scale;
    q.lin = RVector::Zero(n + 1);
    q.lin.head(n) = c.lin / scale;
    q.lin(s_idx) = -1.0;
    q.rhs = c.rhs / scale;
    worst = std::max(worst, (lhs - c.rhs) / scale);
    phase1.add_quadratic(std::move(q));
  }
  phase1.add_upper_bound(s_idx, 1.0, -1.0);  // s >= -1 keeps the phase I bounded
  phase1.add_linear_objective(s_idx, -1.0);
  y0(s_idx) = worst + 1.0;

  Settings ps = settings;
  ps.rel_gap = 1e-9;
  ps.abs_gap = 1e-9;
  const auto res = maximize(phase1, y0, ps, [&](const RVector& y) { return y(s_idx) < -1e-3; });
  if (res.status == Status::kInfeasible) return std::nullopt;
  const RVector x = res.x.head(n);
  if (res.x(s_idx) < 0.0 && program.strictly_feasible(x)) return x;
  return std::nullopt;
}

}  // namespace irswpcn::conic
