#pragma once

#include "irswpcn/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

// Dense primal log-barrier method for the small concave programs the
// alternating optimization produces:
//
//   maximize   c'x - x'Px + const + sum_j w_j t_j ln(1 + g_j e_j / t_j)
//   subject to a_i'x <= b_i,  x'Q_i x + l_i'x <= r_i,  W_b(x) >= 0 (Hermitian)
//
// where the W_b are Hermitian matrices stored as real parameters in x.
namespace irswpcn::conic {

enum class Status { kOptimal, kMaxIterations, kInfeasible };

std::string to_string(Status status);

struct Settings {
  double rel_gap = 1e-8;        // stop when m/t <= max(abs_gap, rel_gap * |objective|)
  double abs_gap = 1e-12;
  int max_newton_steps = 800;
  double barrier_growth = 16.0;
  double initial_barrier = 1.0;
};

struct LinearTerm {
  int index;
  double coeff;
};

struct LinearConstraint {
  std::vector<LinearTerm> terms;
  double rhs = 0.0;
};

struct QuadraticConstraint {
  RMatrix quad;  // symmetric PSD
  RVector lin;
  double rhs = 0.0;
};

/// weight * x[time] * ln(1 + gain * x[energy] / x[time])
struct PerspectiveLog {
  int time;
  int energy;
  double weight;
  double gain;
};

/// A (dim x dim) Hermitian matrix occupying dim*dim consecutive entries of x:
/// first the real diagonal, then (re, im) of each strictly-upper entry in
/// row-major order.
struct HermitianBlock {
  int offset = 0;
  int dim = 0;

  int size() const { return dim * dim; }
  int diag(int i) const { return offset + i; }
  int upper_re(int i, int j) const;  // i < j
  int upper_im(int i, int j) const { return upper_re(i, j) + 1; }

  CMatrix unpack(const RVector& x) const;
  void pack(const CMatrix& w, RVector& x) const;
  /// Coefficients c with c'x = Re tr(M W) for Hermitian M.
  std::vector<LinearTerm> functional(const CMatrix& m) const;
};

class Program {
 public:
  explicit Program(int num_vars);

  int num_vars() const { return n_; }

  void add_linear_objective(int index, double coeff) { lin_obj_(index) += coeff; }
  void add_linear_objective(const RVector& c) { lin_obj_ += c; }
  /// Adds -x'Px to the objective (P symmetric PSD).
  void add_concave_quadratic(const RMatrix& p);
  void add_objective_constant(double c) { constant_ += c; }
  void add_perspective_log(PerspectiveLog term);

  void add_linear(LinearConstraint c) { linear_.push_back(std::move(c)); }
  void add_upper_bound(int index, double rhs, double coeff = 1.0) { linear_.push_back({{{index, coeff}}, rhs}); }
  void add_quadratic(QuadraticConstraint c);
  HermitianBlock add_hermitian_block(int offset, int dim);

  double objective(const RVector& x) const;
  /// Number of barrier terms; m/t bounds the suboptimality of a central point.
  double barrier_degree() const;
  bool strictly_feasible(const RVector& x) const;

  const std::vector<LinearConstraint>& linear() const { return linear_; }
  const std::vector<QuadraticConstraint>& quadratic() const { return quadratic_; }
  const std::vector<HermitianBlock>& blocks() const { return blocks_; }

  /// phi_t(x) = -t * objective(x) + barrier(x). Returns false outside the domain.
  bool evaluate(const RVector& x, double t, double& phi, RVector* grad, RMatrix* hess) const;

 private:
  bool add_barrier(const RVector& x, double& phi, RVector* grad, RMatrix* hess) const;

  int n_;
  RVector lin_obj_;
  RMatrix quad_obj_;
  bool has_quad_obj_ = false;
  double constant_ = 0.0;
  std::vector<PerspectiveLog> logs_;
  std::vector<LinearConstraint> linear_;
  std::vector<QuadraticConstraint> quadratic_;
  std::vector<HermitianBlock> blocks_;
};

struct Result {
  RVector x;
  double objective = 0.0;
  double gap = kInf;
  Status status = Status::kInfeasible;
  int newton_steps = 0;
};

/// Path-following barrier method from a strictly feasible x0. `stop_when`
/// (optional) ends the solve early once it returns true for a central point.
Result maximize(const Program& program, const RVector& x0, const Settings& settings = {},
                const std::function<bool(const RVector&)>& stop_when = {});

/// Phase I: searches for a point strictly inside every linear and quadratic
/// constraint, starting from x0 (Hermitian blocks must already be positive
/// definite at x0). Returns nullopt when the constraint set has no interior.
std::optional<RVector> find_strictly_feasible(const Program& program, const RVector& x0,
                                              const Settings& settings = {});

}  // namespace irswpcn::conic
