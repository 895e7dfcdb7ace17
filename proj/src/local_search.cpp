#include "memetic/local_search.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace memetic {

void SQPConfig::validate() const {
  if (!(grad_tol > 0.0) || !(step_tol > 0.0)) {
    throw std::invalid_argument("SQPConfig: tolerances must be > 0");
  }
  if (!(c1 > 0.0 && c1 < c2 && c2 < 1.0)) {
    throw std::invalid_argument("SQPConfig: need 0 < c1 < c2 < 1");
  }
  if (!(lambda_min > 0.0)) throw std::invalid_argument("SQPConfig: lambda_min must be > 0");
  if (max_iter == 0) throw std::invalid_argument("SQPConfig: max_iter must be >= 1");
  if (max_line_search_evals == 0) {
    throw std::invalid_argument("SQPConfig: max_line_search_evals must be >= 1");
  }
}

NewtonDirection newton_direction(const Eigen::VectorXd& g, const Eigen::MatrixXd& H,
                                 double lambda_min) {
  const Eigen::Index n = g.size();
  if (H.rows() != n || H.cols() != n) {
    throw std::invalid_argument("newton_direction: Hessian shape mismatch");
  }
  if (!g.allFinite() || !H.allFinite()) {
    throw std::invalid_argument("newton_direction: non-finite gradient or Hessian");
  }
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  double lambda = 0.0;
  while (lambda <= 1e8 * lambda_min * (1.0 + 1e-12)) {
    Eigen::LLT<Eigen::MatrixXd> llt(H + lambda * I);
    if (llt.info() == Eigen::Success) {
      Eigen::VectorXd d = llt.solve(-g);
      if (d.allFinite() && d.dot(g) < 0.0) return {std::move(d), lambda};
    }
    lambda = lambda == 0.0 ? lambda_min : lambda * 10.0;
  }
  return {-g, kSteepestDescentLambda};
}

LineSearchResult wolfe_line_search(const LineFunction& phi, double phi0, double dphi0, double c1,
                                   double c2, std::size_t max_evals) {
  if (!(dphi0 < 0.0)) {
    throw std::invalid_argument("wolfe_line_search: phi'(0) must be negative");
  }
  LineSearchResult best;  // best sufficient-decrease trial so far
  bool have_best = false;
  std::size_t evals = 0;

  auto armijo = [&](double a, double v) { return v <= phi0 + c1 * a * dphi0; };
  auto finish = [&](double a, double v, double dv) {
    LineSearchResult r;
    r.alpha = a;
    r.phi = v;
    r.dphi = dv;
    r.sufficient_decrease = armijo(a, v);
    r.curvature = dv >= c2 * dphi0;
    r.evaluations = evals;
    return r;
  };
  auto remember = [&](double a, double v, double dv) {
    if (armijo(a, v) && (!have_best || v < best.phi)) {
      best = finish(a, v, dv);
      have_best = true;
    }
  };

  ++evals;
  auto [v1, d1] = phi(1.0);
  if (std::isfinite(v1) && armijo(1.0, v1)) {
    // alpha = 1 is either Wolfe or too short; the step may not grow past 1.
    return finish(1.0, v1, d1);
  }

  double lo = 0.0, phi_lo = phi0, dphi_lo = dphi0;
  double hi = 1.0, phi_hi = std::isfinite(v1) ? v1 : std::numeric_limits<double>::infinity();
  while (evals < max_evals) {
    const double width = hi - lo;
    double a = 0.5 * (lo + hi);
    if (std::isfinite(phi_hi)) {
      const double curv = phi_hi - phi_lo - dphi_lo * width;
      if (curv > 0.0) a = lo - dphi_lo * width * width / (2.0 * curv);
    }
    a = std::clamp(a, lo + 0.1 * width, hi - 0.1 * width);

    ++evals;
    auto [va, da] = phi(a);
    if (!std::isfinite(va) || !armijo(a, va) || va >= phi_lo) {
      hi = a;
      phi_hi = std::isfinite(va) ? va : std::numeric_limits<double>::infinity();
      continue;
    }
    remember(a, va, da);
    if (da >= c2 * dphi0) return finish(a, va, da);
    lo = a;
    phi_lo = va;
    dphi_lo = da;
  }
  if (have_best) {
    best.evaluations = evals;
    best.exhausted = true;
    return best;
  }
  LineSearchResult r;
  r.failed = true;
  r.evaluations = evals;
  return r;
}

namespace {

double max_feasible_fraction(const Eigen::VectorXd& s, const Eigen::VectorXd& ds,
                             const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  double t = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (ds[i] > 0.0) t = std::min(t, (hi[i] - s[i]) / ds[i]);
    if (ds[i] < 0.0) t = std::min(t, (lo[i] - s[i]) / ds[i]);
  }
  return t;
}

double barrier_objective(const Eigen::VectorXd& g, const Eigen::MatrixXd& H,
                         const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                         const Eigen::VectorXd& s, double mu) {
  double v = g.dot(s) + 0.5 * s.dot(H * s);
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    v -= mu * (std::log(s[i] - lo[i]) + std::log(hi[i] - s[i]));
  }
  return v;
}

Eigen::VectorXd clipped_newton_step(const Eigen::VectorXd& g, const Eigen::MatrixXd& H,
                                    const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                                    double tau) {
  Eigen::VectorXd s = H.llt().solve(-g);
  if (!s.allFinite()) s = -g;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(g.size());
  const double t = max_feasible_fraction(zero, s, lo, hi);
  if (t < 1.0 / tau) s *= tau * t;
  return s;
}

}  // namespace

IpmResult ipm_qp_solve(const Eigen::VectorXd& g, const Eigen::MatrixXd& H,
                       const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                       const IpmOptions& opt) {
  const Eigen::Index n = g.size();
  if (H.rows() != n || H.cols() != n || lo.size() != n || hi.size() != n) {
    throw std::invalid_argument("ipm_qp_solve: dimension mismatch");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(lo[i] < 0.0 && 0.0 < hi[i])) {
      throw std::invalid_argument("ipm_qp_solve: the current point must be strictly interior");
    }
  }
  IpmResult res;
  Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
  // Start with the barrier comparable to the linear term across the box.
  const double width = (hi - lo).minCoeff();
  double mu = std::max(opt.mu_final, 0.1 * std::max(1.0, g.lpNorm<Eigen::Infinity>()) * width);

  bool ok = true;
  while (ok) {
    for (std::size_t it = 0; it < opt.max_newton_per_mu; ++it) {
      Eigen::VectorXd grad = g + H * s;
      Eigen::MatrixXd hess = H;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double a = 1.0 / (s[i] - lo[i]);
        const double b = 1.0 / (hi[i] - s[i]);
        grad[i] += mu * (b - a);
        hess(i, i) += mu * (a * a + b * b);
      }
      Eigen::LLT<Eigen::MatrixXd> llt(hess);
      if (llt.info() != Eigen::Success) {
        ok = false;
        break;
      }
      const Eigen::VectorXd ds = llt.solve(-grad);
      if (!ds.allFinite()) {
        ok = false;
        break;
      }
      ++res.newton_iterations;
      const double decrement = -grad.dot(ds);
      if (decrement <= 1e-14 * (1.0 + std::abs(g.dot(s)))) break;

      double t = std::min(1.0, opt.tau * max_feasible_fraction(s, ds, lo, hi));
      const double f0 = barrier_objective(g, H, lo, hi, s, mu);
      while (t > 1e-12) {
        const Eigen::VectorXd trial = s + t * ds;
        const double ft = barrier_objective(g, H, lo, hi, trial, mu);
        if (std::isfinite(ft) && ft <= f0 - 1e-4 * t * decrement) break;
        t *= 0.5;
      }
      if (t <= 1e-12) break;  // no progress possible at this mu
      s += t * ds;
    }
    if (!ok || mu <= opt.mu_final) break;
    mu = std::max(opt.mu_final, mu / opt.mu_factor);
  }

  bool feasible = s.allFinite();
  for (Eigen::Index i = 0; feasible && i < n; ++i) feasible = s[i] > lo[i] && s[i] < hi[i];
  if (!ok || !feasible) {
    res.step = clipped_newton_step(g, H, lo, hi, opt.tau);
    res.fallback = true;
    return res;
  }
  res.step = std::move(s);
  return res;
}

std::string_view stop_reason_name(SqpStopReason r) noexcept {
  switch (r) {
    case SqpStopReason::GradientTolerance:
      return "gradient-tolerance";
    case SqpStopReason::StepTolerance:
      return "step-tolerance";
    case SqpStopReason::DeltaCriteria:
      return "delta-criteria";
    case SqpStopReason::MaxIterations:
      return "max-iterations";
    case SqpStopReason::LineSearchFailure:
      return "line-search-failure";
  }
  return "unknown";
}

std::vector<double> project_inward(std::span<const double> x, const BoundBox& box) {
  if (x.size() != box.size()) throw std::invalid_argument("project_inward: dimension mismatch");
  std::vector<double> out(x.begin(), x.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double margin = 1e-6 * (box.upper[i] - box.lower[i]);
    out[i] = std::clamp(out[i], box.lower[i] + margin, box.upper[i] - margin);
  }
  return out;
}

namespace {

struct Point {
  Eigen::VectorXd x;
  ad::Derivatives d;
};

Eigen::Map<const Eigen::VectorXd> grad_of(const ad::Derivatives& d) {
  return {d.grad.data(), static_cast<Eigen::Index>(d.grad.size())};
}

Eigen::MatrixXd hess_of(const ad::Derivatives& d) {
  const auto n = static_cast<Eigen::Index>(d.grad.size());
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      d.hess.data(), n, n);
}

}  // namespace

SqpResult sqp_run(const ad::ADFunction& f, std::span<const double> x0,
                  const std::optional<BoundBox>& box, const SQPConfig& cfg) {
  cfg.validate();
  if (x0.empty()) throw std::invalid_argument("sqp_run: empty starting point");
  if (box && box->size() != x0.size()) throw std::invalid_argument("sqp_run: box dimension mismatch");

  SqpResult res;
  std::size_t iteration = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++res.evaluations;
    try {
      return ad::evaluate(f, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
    } catch (const ad::EvaluationError& e) {
      throw ad::EvaluationError(e.op() + " (sqp iteration " + std::to_string(iteration) + ")",
                                e.value());
    }
  };

  Point cur;
  if (box) {
    const auto start = project_inward(x0, *box);
    cur.x = Eigen::Map<const Eigen::VectorXd>(start.data(), static_cast<Eigen::Index>(start.size()));
  } else {
    cur.x = Eigen::Map<const Eigen::VectorXd>(x0.data(), static_cast<Eigen::Index>(x0.size()));
  }
  cur.d = eval(cur.x);
  res.initial_f = cur.d.value;

  Eigen::VectorXd lower, upper;
  if (box) {
    lower = Eigen::Map<const Eigen::VectorXd>(box->lower.data(), static_cast<Eigen::Index>(box->size()));
    upper = Eigen::Map<const Eigen::VectorXd>(box->upper.data(), static_cast<Eigen::Index>(box->size()));
  }

  double prev_gnorm = std::numeric_limits<double>::quiet_NaN();
  double prev_dnorm = std::numeric_limits<double>::quiet_NaN();
  res.stop_reason = SqpStopReason::MaxIterations;

  for (;;) {
    const Eigen::VectorXd g = grad_of(cur.d);
    const double gnorm = g.lpNorm<Eigen::Infinity>();
    if (gnorm <= cfg.grad_tol) {
      res.stop_reason = SqpStopReason::GradientTolerance;
      break;
    }
    if (iteration >= cfg.max_iter) {
      res.stop_reason = SqpStopReason::MaxIterations;
      break;
    }
    const Eigen::MatrixXd H = hess_of(cur.d);

    NewtonDirection nd = cfg.force_steepest_descent
                             ? NewtonDirection{-g, kSteepestDescentLambda}
                             : newton_direction(g, H, cfg.lambda_min);
    Eigen::VectorXd d = nd.d;
    bool used_ipm = false;
    if (box) {
      const Eigen::VectorXd lo = lower - cur.x;
      const Eigen::VectorXd hi = upper - cur.x;
      const Eigen::VectorXd zero = Eigen::VectorXd::Zero(d.size());
      const bool inside = max_feasible_fraction(zero, d, lo, hi) * 0.995 > 1.0;
      if (!inside) {
        if (std::isinf(nd.lambda)) {
          // No usable curvature: take the steepest-descent ray up to the boundary.
          d *= 0.995 * max_feasible_fraction(zero, d, lo, hi);
        } else {
          const Eigen::MatrixXd Hreg =
              H + nd.lambda * Eigen::MatrixXd::Identity(H.rows(), H.cols());
          d = ipm_qp_solve(g, Hreg, lo, hi).step;
          used_ipm = true;
          if (!(d.dot(g) < 0.0)) {
            d = -g;
            d *= 0.995 * std::min(1.0 / 0.995, max_feasible_fraction(zero, d, lo, hi));
          }
        }
      }
    }

    const double dnorm = d.norm();
    if (dnorm <= cfg.step_tol) {
      res.stop_reason = SqpStopReason::StepTolerance;
      break;
    }
    const double dphi0 = g.dot(d);
    if (!(dphi0 < 0.0)) {
      res.stop_reason = SqpStopReason::LineSearchFailure;
      break;
    }

    Point trial;
    auto line = [&](double a) {
      trial.x = cur.x + a * d;
      trial.d = eval(trial.x);
      return std::pair{trial.d.value, grad_of(trial.d).dot(d)};
    };
    // Keep the derivatives of the returned step to avoid a re-evaluation.
    std::vector<std::pair<double, Point>> seen;
    auto memo_line = [&](double a) {
      auto r = line(a);
      seen.emplace_back(a, trial);
      return r;
    };
    const LineSearchResult ls = wolfe_line_search(memo_line, cur.d.value, dphi0, cfg.c1, cfg.c2,
                                                  cfg.max_line_search_evals);
    if (ls.failed) {
      res.stop_reason = SqpStopReason::LineSearchFailure;
      break;
    }
    Point next;
    for (auto& [a, p] : seen) {
      if (a == ls.alpha) next = std::move(p);
    }

    NewtonIterate it;
    it.iteration = iteration;
    it.x = cur.x;
    it.f = cur.d.value;
    it.grad = g;
    it.hess = H;
    it.direction = d;
    it.alpha = ls.alpha;
    it.lambda = nd.lambda;
    it.f_next = ls.phi;
    it.directional_derivative = dphi0;
    it.next_directional_derivative = ls.dphi;
    it.wolfe = ls.wolfe();
    it.line_search_exhausted = ls.exhausted;
    it.used_ipm = used_ipm;
    it.evaluations = res.evaluations;
    res.trace.push_back(std::move(it));

    cur = std::move(next);
    ++iteration;

    if (cfg.stop_rule == StopRule::Delta) {
      const double new_gnorm = grad_of(cur.d).lpNorm<Eigen::Infinity>();
      const double step_norm = dnorm;
      if (!std::isnan(prev_gnorm) &&
          std::abs(new_gnorm - prev_gnorm) <= cfg.delta_grad_tol &&
          std::abs(step_norm - prev_dnorm) <= cfg.delta_step_tol) {
        res.stop_reason = SqpStopReason::DeltaCriteria;
        break;
      }
      prev_gnorm = new_gnorm;
      prev_dnorm = step_norm;
    }
  }

  res.x.assign(cur.x.data(), cur.x.data() + cur.x.size());
  res.f = cur.d.value;
  return res;
}

}  // namespace memetic
