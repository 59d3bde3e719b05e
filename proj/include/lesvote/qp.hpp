#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lesvote/error.hpp"
#include "lesvote/matrix.hpp"

namespace lesvote::qp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// min ½ xᵀHx + cᵀx  subject to  aᵀx = b  and  lower ≤ x ≤ upper.
///
/// The general-bounds form. Every coefficient of `a` must be non-zero; the
/// simplex problem and the SVM dual are both instances.
struct BoundedQp {
  Matrix hessian;
  std::vector<double> linear;
  std::vector<double> eq_coeffs;
  double eq_rhs = 0.0;
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t dim() const noexcept { return linear.size(); }
  double objective(std::span<const double> x) const;
  std::vector<double> gradient(std::span<const double> x) const;
  void validate() const;
};

/// min ½ wᵀHw + cᵀw  subject to  w ≥ 0,  Σw = eq_sum.
struct QpProblem {
  Matrix hessian;
  std::vector<double> linear;
  double eq_sum = 1.0;

  std::size_t dim() const noexcept { return linear.size(); }
  double objective(std::span<const double> w) const;
  BoundedQp as_bounded() const;
};

/// H = LᵀL, c = -Lᵀl*: the quadratic part of ½‖Lw - l*‖².
QpProblem least_squares_problem(const Matrix& labels, std::span<const double> target);

enum class Bound { lower, upper };

struct ActiveConstraint {
  std::size_t index;
  Bound bound;
  double multiplier;
};

struct QpSolution {
  std::vector<double> w;
  double objective = 0.0;
  std::vector<ActiveConstraint> active_set;
  double eq_multiplier = 0.0;
  std::size_t iterations = 0;
};

struct IterationRecord {
  std::size_t iteration = 0;
  double objective = 0.0;
  std::vector<std::size_t> working_set;  // variables held at a bound
};

using TraceHook = std::function<void(const IterationRecord&)>;

/// One JSON object per line: {"iteration":..,"objective":..,"working_set":[..]}.
std::string to_json_line(const IterationRecord& record);

struct SolverOptions {
  std::size_t max_iterations = 0;  // 0 means 100 * dim
  double multiplier_tol = 1e-10;   // multipliers above -tol are treated as non-negative
  TraceHook trace;
};

/// Raised when the iteration cap is hit; carries the best iterate reached.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, QpSolution best)
      : Error(ErrorKind::convergence, what), best_(std::move(best)) {}
  const QpSolution& best() const noexcept { return best_; }

 private:
  QpSolution best_;
};

/// Primal active-set method. Starts from feasible x0 with an empty bound
/// working set; blocking-constraint ties and multiplier ties go to the lowest
/// variable index. Throws ErrorKind::feasibility for an infeasible start.
QpSolution solve_bounded_qp(const BoundedQp& problem, std::span<const double> x0,
                            const SolverOptions& options = {});

QpSolution solve_simplex_qp(const QpProblem& problem, std::span<const double> w0,
                            const SolverOptions& options = {});

/// Starts from the uniform point eq_sum / m.
QpSolution solve_simplex_qp(const QpProblem& problem, const SolverOptions& options = {});

/// Normal-equation solution w = (LᵀL)⁻¹Lᵀl*. Rank deficiency surfaces as
/// ErrorKind::singular.
std::vector<double> solve_unconstrained(const Matrix& labels, std::span<const double> target);

struct KktReport {
  double stationarity = 0.0;          // ‖g_F + μ a_F‖∞ over free variables
  double primal_infeasibility = 0.0;  // worst bound or equality violation
  double min_multiplier = 0.0;        // most negative bound multiplier (0 if none)
  double eq_multiplier = 0.0;
  std::vector<std::size_t> active;    // variables treated as at a bound
  bool pass = false;
};

KktReport check_kkt(const BoundedQp& problem, std::span<const double> x, double tol = 1e-8);
KktReport check_kkt(const QpProblem& problem, std::span<const double> w, double tol = 1e-8);

}  // namespace lesvote::qp
