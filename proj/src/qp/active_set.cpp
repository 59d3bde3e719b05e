#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "lesvote/linalg.hpp"
#include "lesvote/qp.hpp"
#include "lesvote/simd/kernels.hpp"

namespace lesvote::qp {

double BoundedQp::objective(std::span<const double> x) const {
  const auto hx = hessian * x;
  return 0.5 * simd::dot(x, hx) + simd::dot(linear, x);
}

std::vector<double> BoundedQp::gradient(std::span<const double> x) const {
  auto g = hessian * x;
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += linear[i];
  return g;
}

void BoundedQp::validate() const {
  const std::size_t n = dim();
  require(n >= 1, ErrorKind::dimension, "QP needs at least one variable");
  require(hessian.rows() == n && hessian.cols() == n, ErrorKind::dimension,
          "QP Hessian shape does not match the linear term");
  require(eq_coeffs.size() == n && lower.size() == n && upper.size() == n, ErrorKind::dimension,
          "QP constraint vectors have the wrong length");
  require(is_symmetric(hessian), ErrorKind::symmetry, "QP Hessian must be symmetric");
  for (std::size_t i = 0; i < n; ++i) {
    require(eq_coeffs[i] != 0.0, ErrorKind::parameter, "equality coefficients must be non-zero");
    require(lower[i] <= upper[i] && std::isfinite(lower[i]), ErrorKind::parameter,
            "each variable needs a finite lower bound not above its upper bound");
  }
}

double QpProblem::objective(std::span<const double> w) const {
  const auto hw = hessian * w;
  return 0.5 * simd::dot(w, hw) + simd::dot(linear, w);
}

BoundedQp QpProblem::as_bounded() const {
  const std::size_t n = dim();
  return BoundedQp{hessian,
                   linear,
                   std::vector<double>(n, 1.0),
                   eq_sum,
                   std::vector<double>(n, 0.0),
                   std::vector<double>(n, kInf)};
}

QpProblem least_squares_problem(const Matrix& labels, std::span<const double> target) {
  require(labels.rows() == target.size(), ErrorKind::dimension,
          "label matrix rows must match the target length");
  QpProblem p{gram_of_columns(labels), transpose_times(labels, target), 1.0};
  for (double& c : p.linear) c = -c;
  return p;
}

std::string to_json_line(const IterationRecord& record) {
  nlohmann::json j;
  j["iteration"] = record.iteration;
  j["objective"] = record.objective;
  j["working_set"] = record.working_set;
  return j.dump();
}

namespace {

enum class State : signed char { free = 0, at_lower = -1, at_upper = 1 };

// Orthonormal basis of the complement of `a` (length n >= 2) as an
// n x (n-1) matrix, from the Householder reflector mapping a to ±‖a‖e₀.
Matrix nullspace_basis(std::span<const double> a) {
  const std::size_t n = a.size();
  const double norm = norm2(a);
  std::vector<double> v(a.begin(), a.end());
  for (double& x : v) x /= norm;
  v[0] += v[0] >= 0.0 ? 1.0 : -1.0;
  const double vv = simd::dot(v, v);
  Matrix z(n, n - 1);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 1; c < n; ++c) {
      const double id = r == c ? 1.0 : 0.0;
      z(r, c - 1) = id - 2.0 * v[r] * v[c] / vv;
    }
  }
  return z;
}

struct Step {
  std::vector<double> direction;  // over free variables
  bool unbounded = false;         // zero-curvature descent: no unit-step cap
};

// Equality-constrained subproblem on the free variables. Solves the reduced
// Newton system with a pseudo-inverse (least-norm step); when the gradient
// has a component in the Hessian's null space, returns that pure
// zero-curvature descent direction instead.
Step subproblem_step(const BoundedQp& qp, const std::vector<std::size_t>& free,
                     std::span<const double> x, std::span<const double> g) {
  const std::size_t nf = free.size();
  Step step;
  step.direction.assign(nf, 0.0);
  if (nf < 2) return step;

  std::vector<double> a_f(nf), g_f(nf);
  for (std::size_t i = 0; i < nf; ++i) {
    a_f[i] = qp.eq_coeffs[free[i]];
    g_f[i] = g[free[i]];
  }
  const Matrix z = nullspace_basis(a_f);
  Matrix h_ff(nf, nf);
  for (std::size_t i = 0; i < nf; ++i)
    for (std::size_t j = 0; j < nf; ++j) h_ff(i, j) = qp.hessian(free[i], free[j]);

  const Matrix zt = z.transpose();
  Matrix reduced = zt * (h_ff * z);
  for (std::size_t i = 0; i < reduced.rows(); ++i)
    for (std::size_t j = i + 1; j < reduced.cols(); ++j) {
      const double s = 0.5 * (reduced(i, j) + reduced(j, i));
      reduced(i, j) = s;
      reduced(j, i) = s;
    }
  const auto g_r = zt * std::span<const double>(g_f);

  const auto eig = sym_eig(reduced, true);
  const Matrix& vecs = *eig.eigenvectors;
  const std::size_t k = reduced.rows();
  // Both tolerances are relative to the whole problem, not the reduced
  // matrix: a reduced Hessian made only of rounding noise must read as zero.
  const double h_scale = qp.hessian.max_abs();
  const double curvature_tol = 1e-11 * std::max(h_scale * static_cast<double>(nf), 1e-300);
  double x_scale = 1.0, c_scale = 0.0;
  for (double v : x) x_scale = std::max(x_scale, std::abs(v));
  for (double v : qp.linear) c_scale = std::max(c_scale, std::abs(v));
  const double gradient_tol =
      1e-11 * std::max({1.0, h_scale * x_scale * static_cast<double>(qp.dim()), c_scale});

  std::vector<double> newton(k, 0.0), null_descent(k, 0.0);
  bool has_null_descent = false;
  for (std::size_t e = 0; e < k; ++e) {
    double proj = 0.0;
    for (std::size_t r = 0; r < k; ++r) proj += vecs(r, e) * g_r[r];
    if (eig.eigenvalues[e] > curvature_tol) {
      for (std::size_t r = 0; r < k; ++r) newton[r] -= proj / eig.eigenvalues[e] * vecs(r, e);
    } else if (std::abs(proj) > gradient_tol) {
      has_null_descent = true;
      for (std::size_t r = 0; r < k; ++r) null_descent[r] -= proj * vecs(r, e);
    }
  }
  const auto& y = has_null_descent ? null_descent : newton;
  step.direction = z * std::span<const double>(y);
  step.unbounded = has_null_descent;
  return step;
}

double equality_multiplier(const BoundedQp& qp, const std::vector<std::size_t>& free,
                           std::span<const double> g) {
  double ag = 0.0, aa = 0.0;
  for (std::size_t i : free) {
    ag += qp.eq_coeffs[i] * g[i];
    aa += qp.eq_coeffs[i] * qp.eq_coeffs[i];
  }
  return aa > 0.0 ? -ag / aa : 0.0;
}

}  // namespace

QpSolution solve_bounded_qp(const BoundedQp& qp, std::span<const double> x0,
                            const SolverOptions& options) {
  qp.validate();
  const std::size_t n = qp.dim();
  require(x0.size() == n, ErrorKind::dimension, "start point has the wrong length");

  double scale = std::max(1.0, std::abs(qp.eq_rhs));
  for (std::size_t i = 0; i < n; ++i) {
    require(std::isfinite(x0[i]) && x0[i] >= qp.lower[i] - 1e-12 && x0[i] <= qp.upper[i] + 1e-12,
            ErrorKind::feasibility, "start point violates a bound at index " + std::to_string(i));
  }
  require(std::abs(simd::dot(qp.eq_coeffs, x0) - qp.eq_rhs) <= 1e-10 * scale,
          ErrorKind::feasibility, "start point violates the equality constraint");

  std::vector<double> x(x0.begin(), x0.end());
  for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i], qp.lower[i], qp.upper[i]);
  std::vector<State> state(n, State::free);

  const std::size_t max_iter = options.max_iterations ? options.max_iterations : 100 * n;

  auto working_set = [&] {
    std::vector<std::size_t> ws;
    for (std::size_t i = 0; i < n; ++i)
      if (state[i] != State::free) ws.push_back(i);
    return ws;
  };
  auto free_set = [&] {
    std::vector<std::size_t> fs;
    for (std::size_t i = 0; i < n; ++i)
      if (state[i] == State::free) fs.push_back(i);
    return fs;
  };
  auto snapshot = [&](std::size_t iterations) {
    QpSolution s;
    s.w = x;
    s.objective = qp.objective(x);
    s.iterations = iterations;
    const auto g = qp.gradient(x);
    s.eq_multiplier = equality_multiplier(qp, free_set(), g);
    for (std::size_t i = 0; i < n; ++i) {
      if (state[i] == State::free) continue;
      const double r = g[i] + s.eq_multiplier * qp.eq_coeffs[i];
      s.active_set.push_back({i, state[i] == State::at_lower ? Bound::lower : Bound::upper,
                              state[i] == State::at_lower ? r : -r});
    }
    return s;
  };
  auto trace = [&](std::size_t iteration) {
    if (options.trace) options.trace({iteration, qp.objective(x), working_set()});
  };

  trace(0);
  for (std::size_t iter = 1; iter <= max_iter; ++iter) {
    const auto g = qp.gradient(x);
    const auto free = free_set();
    const Step step = subproblem_step(qp, free, x, g);

    double x_scale = 1.0;
    for (double v : x) x_scale = std::max(x_scale, std::abs(v));
    double p_max = 0.0;
    for (double v : step.direction) p_max = std::max(p_max, std::abs(v));

    if (p_max <= 1e-14 * x_scale) {
      const double mu = equality_multiplier(qp, free, g);
      std::size_t drop = n;
      double most_negative = -options.multiplier_tol;
      for (std::size_t i = 0; i < n; ++i) {
        if (state[i] == State::free) continue;
        const double r = g[i] + mu * qp.eq_coeffs[i];
        const double lambda = state[i] == State::at_lower ? r : -r;
        if (lambda < most_negative) {
          most_negative = lambda;
          drop = i;
        }
      }
      if (drop == n) {
        trace(iter);
        return snapshot(iter);
      }
      state[drop] = State::free;
      trace(iter);
      continue;
    }

    double alpha = step.unbounded ? kInf : 1.0;
    std::size_t blocking = n;
    State blocking_state = State::free;
    for (std::size_t f = 0; f < free.size(); ++f) {
      const std::size_t i = free[f];
      const double p = step.direction[f];
      double ratio = kInf;
      State hit = State::free;
      if (p < 0.0) {
        ratio = (qp.lower[i] - x[i]) / p;
        hit = State::at_lower;
      } else if (p > 0.0 && std::isfinite(qp.upper[i])) {
        ratio = (qp.upper[i] - x[i]) / p;
        hit = State::at_upper;
      }
      ratio = std::max(ratio, 0.0);
      if (ratio < alpha) {
        alpha = ratio;
        blocking = i;
        blocking_state = hit;
      }
    }
    if (!std::isfinite(alpha)) {
      fail(ErrorKind::convergence, "QP is unbounded below along a feasible direction");
    }
    for (std::size_t f = 0; f < free.size(); ++f) x[free[f]] += alpha * step.direction[f];
    if (blocking != n) {
      state[blocking] = blocking_state;
      x[blocking] = blocking_state == State::at_lower ? qp.lower[blocking] : qp.upper[blocking];
    }
    trace(iter);
  }
  throw ConvergenceError("active-set iteration cap (" + std::to_string(max_iter) + ") exceeded",
                         snapshot(max_iter));
}

QpSolution solve_simplex_qp(const QpProblem& problem, std::span<const double> w0,
                            const SolverOptions& options) {
  require(problem.eq_sum > 0.0, ErrorKind::parameter, "simplex sum must be positive");
  return solve_bounded_qp(problem.as_bounded(), w0, options);
}

QpSolution solve_simplex_qp(const QpProblem& problem, const SolverOptions& options) {
  const std::size_t m = problem.dim();
  require(m >= 1, ErrorKind::dimension, "QP needs at least one variable");
  const std::vector<double> w0(m, problem.eq_sum / static_cast<double>(m));
  return solve_simplex_qp(problem, w0, options);
}

std::vector<double> solve_unconstrained(const Matrix& labels, std::span<const double> target) {
  require(labels.rows() == target.size(), ErrorKind::dimension,
          "label matrix rows must match the target length");
  const Matrix normal = gram_of_columns(labels);
  const auto rhs = transpose_times(labels, target);
  return solve_linear(normal, rhs);
}

KktReport check_kkt(const BoundedQp& qp, std::span<const double> x, double tol) {
  KktReport report;
  const std::size_t n = qp.dim();
  require(x.size() == n, ErrorKind::dimension, "KKT point has the wrong length");
  const auto g = qp.gradient(x);

  double g_scale = 1.0;
  for (double v : g) g_scale = std::max(g_scale, std::abs(v));

  std::vector<std::size_t> free;
  std::vector<State> state(n, State::free);
  for (std::size_t i = 0; i < n; ++i) {
    report.primal_infeasibility =
        std::max({report.primal_infeasibility, qp.lower[i] - x[i], x[i] - qp.upper[i]});
    if (x[i] <= qp.lower[i] + tol) {
      state[i] = State::at_lower;
    } else if (x[i] >= qp.upper[i] - tol) {
      state[i] = State::at_upper;
    } else {
      free.push_back(i);
    }
  }
  report.primal_infeasibility =
      std::max(report.primal_infeasibility, std::abs(simd::dot(qp.eq_coeffs, x) - qp.eq_rhs));

  if (free.empty()) {
    // Pick the equality multiplier that best balances the bound multipliers.
    for (std::size_t i = 0; i < n; ++i) free.push_back(i);
    report.eq_multiplier = equality_multiplier(qp, free, g);
    free.clear();
  } else {
    report.eq_multiplier = equality_multiplier(qp, free, g);
  }
  for (std::size_t i : free) {
    report.stationarity =
        std::max(report.stationarity, std::abs(g[i] + report.eq_multiplier * qp.eq_coeffs[i]));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (state[i] == State::free) continue;
    report.active.push_back(i);
    const double r = g[i] + report.eq_multiplier * qp.eq_coeffs[i];
    report.min_multiplier = std::min(report.min_multiplier, state[i] == State::at_lower ? r : -r);
  }
  report.pass = report.primal_infeasibility <= tol && report.stationarity <= tol * g_scale &&
                report.min_multiplier >= -tol * g_scale;
  return report;
}

KktReport check_kkt(const QpProblem& problem, std::span<const double> w, double tol) {
  return check_kkt(problem.as_bounded(), w, tol);
}

}  // namespace lesvote::qp
