#pragma once

// Newton line-search local optimizer with exact AD Hessians. Steps satisfy
// the weak Wolfe conditions; with a bound box, the quadratic subproblem is
// solved by a log-barrier interior-point method so iterates stay strictly
// inside the box.

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "memetic/autodiff.hpp"
#include "memetic/bounds.hpp"

namespace memetic {

enum class StopRule {
  Absolute,  // ||grad||_inf <= grad_tol or ||d|| <= step_tol
  Delta,     // also stop when both norms change by at most the delta tolerances
};

struct SQPConfig {
  double grad_tol = 1e-6;
  double step_tol = 1e-6;
  std::size_t max_iter = 200;
  double c1 = 1e-4;
  double c2 = 0.9;
  double lambda_min = 1e-8;
  StopRule stop_rule = StopRule::Absolute;
  double delta_grad_tol = 1e-3;
  double delta_step_tol = 1e-3;
  std::size_t max_line_search_evals = 50;
  /// Use d = -g throughout. Only useful as a contrast to Newton steps.
  bool force_steepest_descent = false;

  void validate() const;
};

inline constexpr double kSteepestDescentLambda = std::numeric_limits<double>::infinity();

struct NewtonDirection {
  Eigen::VectorXd d;
  double lambda = 0.0;  // kSteepestDescentLambda when the ladder gave up
};

/// Solves (H + lambda I) d = -g for the smallest lambda in
/// {0, lambda_min, 10 lambda_min, ..., 1e8 lambda_min} whose Cholesky
/// factorization succeeds and gives d'g < 0. Falls back to d = -g.
NewtonDirection newton_direction(const Eigen::VectorXd& g, const Eigen::MatrixXd& H,
                                 double lambda_min);

struct LineSearchResult {
  double alpha = 0.0;
  double phi = 0.0;
  double dphi = 0.0;
  bool sufficient_decrease = false;
  bool curvature = false;
  std::size_t evaluations = 0;
  bool failed = false;
  bool exhausted = false;  // evaluation cap hit; best sufficient-decrease trial returned

  bool wolfe() const noexcept { return sufficient_decrease && curvature; }
};

/// phi(alpha) and phi'(alpha) along the search direction.
using LineFunction = std::function<std::pair<double, double>(double)>;

/// Weak Wolfe step in (0, 1]. alpha = 1 is taken when it already satisfies
/// both conditions; otherwise a bracket on [0, 1] is narrowed by safeguarded
/// quadratic interpolation. After max_evals trials the best sufficient-decrease
/// step is returned, or `failed` is set. Throws std::invalid_argument unless
/// dphi0 < 0.
LineSearchResult wolfe_line_search(const LineFunction& phi, double phi0, double dphi0, double c1,
                                   double c2, std::size_t max_evals = 50);

struct IpmOptions {
  double mu_final = 1e-8;
  double mu_factor = 10.0;
  double tau = 0.995;
  std::size_t max_newton_per_mu = 50;
};

struct IpmResult {
  Eigen::VectorXd step;
  bool fallback = false;  // barrier iterations failed; clipped Newton step used
  std::size_t newton_iterations = 0;
};

/// Approximately minimizes g's + s'Hs/2 subject to lo < s < hi with a
/// log-barrier, mu shrinking tenfold down to mu_final. Requires H positive
/// definite and lo < 0 < hi, so s = 0 is strictly feasible.
IpmResult ipm_qp_solve(const Eigen::VectorXd& g, const Eigen::MatrixXd& H,
                       const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                       const IpmOptions& opt = {});

struct NewtonIterate {
  std::size_t iteration = 0;
  Eigen::VectorXd x;
  double f = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  Eigen::VectorXd direction;
  double alpha = 0.0;
  double lambda = 0.0;
  double f_next = 0.0;
  double directional_derivative = 0.0;       // grad' d at x
  double next_directional_derivative = 0.0;  // grad(x + alpha d)' d
  bool wolfe = false;
  bool line_search_exhausted = false;
  bool used_ipm = false;
  std::size_t evaluations = 0;  // cumulative AD sweeps once the step was accepted
};

enum class SqpStopReason {
  GradientTolerance,
  StepTolerance,
  DeltaCriteria,
  MaxIterations,
  LineSearchFailure,
};

std::string_view stop_reason_name(SqpStopReason r) noexcept;

struct SqpResult {
  std::vector<double> x;
  double f = 0.0;
  std::vector<NewtonIterate> trace;  // one entry per accepted step
  SqpStopReason stop_reason = SqpStopReason::MaxIterations;
  std::size_t evaluations = 0;  // AD sweeps, each yielding value, gradient and Hessian
  double initial_f = 0.0;

  std::size_t iterations() const noexcept { return trace.size(); }
};

/// Moves coordinates on or outside the box inward by 1e-6 of the range.
std::vector<double> project_inward(std::span<const double> x, const BoundBox& box);

/// Minimizes f from x0. With a box, x0 is projected inward first and every
/// iterate stays strictly inside. AD domain errors propagate as
/// ad::EvaluationError with the iteration noted in the message.
SqpResult sqp_run(const ad::ADFunction& f, std::span<const double> x0,
                  const std::optional<BoundBox>& box, const SQPConfig& cfg = {});

}  // namespace memetic
