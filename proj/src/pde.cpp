#include "hardymu/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hardymu/errors.hpp"
#include "hardymu/measure.hpp"

namespace hardymu {

namespace {

double sgn_pow(double v, double q) {
  if (v == 0.0) return 0.0;
  return (v > 0.0 ? 1.0 : -1.0) * std::pow(std::abs(v), q);
}

double mu_norm(const Grid1D& grid, const Eigen::VectorXd& u) {
  return std::sqrt((grid.mu_weights.array() * u.array().square()).sum());
}

// rho on a sub-interval by composite midpoint, refined until stable.
double cell_mass(const ProblemParams& params, double a, double b) {
  double prev = 0.0;
  for (int k = 4; k <= 4096; k *= 2) {
    double sum = 0.0;
    const double h = (b - a) / k;
    for (int j = 0; j < k; ++j) sum += eval_density(params, a + (j + 0.5) * h);
    sum *= h;
    if (k > 4 && std::abs(sum - prev) <= 1e-12 * std::abs(sum)) return sum;
    prev = sum;
  }
  return prev;
}

double flux_coefficient(double du, double p, double delta) {
  return std::pow(du * du + delta, 0.5 * (p - 2.0));
}

// Tridiagonal solve (Thomas), diag/lower/upper are modified copies.
Eigen::VectorXd solve_tridiagonal(Eigen::VectorXd lower, Eigen::VectorXd diag,
                                  Eigen::VectorXd upper, Eigen::VectorXd rhs) {
  const int n = static_cast<int>(diag.size());
  for (int i = 1; i < n; ++i) {
    const double w = lower(i) / diag(i - 1);
    diag(i) -= w * upper(i - 1);
    rhs(i) -= w * rhs(i - 1);
  }
  Eigen::VectorXd x(n);
  x(n - 1) = rhs(n - 1) / diag(n - 1);
  for (int i = n - 2; i >= 0; --i) x(i) = (rhs(i) - upper(i) * x(i + 1)) / diag(i);
  return x;
}

// Flux differences of the finite-volume p-Laplacian, zero flux at both ends.
Eigen::VectorXd diffusion(const Eigen::VectorXd& u, const PdeConfig& cfg,
                          const Grid1D& grid) {
  const int n = grid.size();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  double flux_left = 0.0;
  for (int i = 0; i < n - 1; ++i) {
    const double h = grid.x(i + 1) - grid.x(i);
    const double du = (u(i + 1) - u(i)) / h;
    const double flux = grid.face_rho(i) * flux_coefficient(du, cfg.p, cfg.delta) * du;
    out(i) = flux - flux_left;
    flux_left = flux;
  }
  out(n - 1) = -flux_left;
  return out;
}

void check_finite(const Eigen::VectorXd& v, const char* where) {
  if (!v.allFinite())
    throw OverflowError(std::string("overflow: non-finite values in ") + where);
}

int snap_time_index(const std::vector<double>& times, double t, const char* what) {
  for (std::size_t i = 0; i < times.size(); ++i)
    if (std::abs(times[i] - t) <= 1e-9 * std::max(1.0, std::abs(t)))
      return static_cast<int>(i);
  throw PreconditionError(std::string(what) + ": time not on the recorded grid");
}

}  // namespace

double Grid1D::max_spacing() const {
  double h = 0.0;
  for (int i = 0; i + 1 < size(); ++i) h = std::max(h, x(i + 1) - x(i));
  return h;
}

Grid1D make_graded_grid(const ProblemParams& params, double x_min, double x_max,
                        int nodes, double grading) {
  if (params.d() != 1) throw PreconditionError("make_graded_grid: the solver is 1-D");
  if (!(x_min > 0.0) || !(x_max > x_min))
    throw PreconditionError("make_graded_grid: need 0 < x_min < x_max");
  if (nodes < 4) throw PreconditionError("make_graded_grid: need at least 4 nodes");
  if (!(grading >= 1.0)) throw PreconditionError("make_graded_grid: grading must be >= 1");

  Grid1D grid;
  grid.grading = grading;
  grid.x.resize(nodes);
  for (int i = 0; i < nodes; ++i) {
    const double s = static_cast<double>(i) / (nodes - 1);
    grid.x(i) = x_min + (x_max - x_min) * std::pow(s, grading);
  }
  grid.face_rho.resize(nodes - 1);
  for (int i = 0; i < nodes - 1; ++i)
    grid.face_rho(i) = eval_density(params, 0.5 * (grid.x(i) + grid.x(i + 1)));
  grid.mu_weights.resize(nodes);
  for (int i = 0; i < nodes; ++i) {
    const double a = i == 0 ? grid.x(0) : 0.5 * (grid.x(i - 1) + grid.x(i));
    const double b = i == nodes - 1 ? grid.x(nodes - 1) : 0.5 * (grid.x(i) + grid.x(i + 1));
    grid.mu_weights(i) = cell_mass(params, a, b);
  }
  return grid;
}

void PdeConfig::validate() const {
  if (!(p > 1.0)) throw PreconditionError("PdeConfig: p must be > 1");
  if (!(lambda >= 0.0)) throw PreconditionError("PdeConfig: lambda must be >= 0");
  if (!(m > 0.0)) throw PreconditionError("PdeConfig: truncation level m must be > 0");
  if (!(delta >= 0.0)) throw PreconditionError("PdeConfig: delta must be >= 0");
  if (!(dt > 0.0)) throw PreconditionError("PdeConfig: dt must be > 0");
  if (!(T >= dt)) throw PreconditionError("PdeConfig: T must be >= dt");
  if (!(theta >= 0.0 && theta <= 1.0))
    throw PreconditionError("PdeConfig: theta must lie in [0, 1]");
  if (bc != "dirichlet-left" && bc != "zero-flux")
    throw PreconditionError("PdeConfig: unknown bc tag: " + bc);
  if (!(blowup_factor > 1.0)) throw PreconditionError("PdeConfig: blowup_factor must be > 1");
}

double truncated_potential(double lambda, double p, double m, double x) {
  if (!(x > 0.0)) throw PreconditionError("truncated_potential: x must be > 0");
  return std::min(lambda * std::pow(x, -p), m);
}

PdeState step(const PdeState& state, const PdeConfig& cfg, const Grid1D& grid,
              const ForcingFn& f) {
  cfg.validate();
  const int n = grid.size();
  if (static_cast<int>(state.u.size()) != n)
    throw PreconditionError("step: state size does not match the grid");
  check_finite(state.u, "the incoming state");

  const double dt = cfg.dt;
  const Eigen::VectorXd& u_old = state.u;

  // Explicit reaction and forcing at time t_n; the forcing is truncated at
  // the same level as the potential.
  Eigen::VectorXd react(n);
  for (int i = 0; i < n; ++i)
    react(i) = truncated_potential(cfg.lambda, cfg.p, cfg.m, grid.x(i)) *
                   sgn_pow(u_old(i), cfg.p - 1.0) +
               std::min(f(grid.x(i), state.t), cfg.m);

  const Eigen::VectorXd diff_old = diffusion(u_old, cfg, grid);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i)
    rhs(i) = grid.mu_weights(i) / dt * u_old(i) + (1.0 - cfg.theta) * diff_old(i) +
             grid.mu_weights(i) * react(i);
  check_finite(rhs, "the step right-hand side");

  const bool pin_left = cfg.bc == "dirichlet-left";
  Eigen::VectorXd u_new;
  if (cfg.theta == 0.0) {
    u_new = rhs.array() * dt / grid.mu_weights.array();
    if (pin_left) u_new(0) = 0.0;
    check_finite(u_new, "the explicit update");
  } else {
    // Frozen-coefficient iteration on the implicit diffusion part.
    const double scale = rhs.norm() + std::numeric_limits<double>::min();
    u_new = u_old;
    double omega = 1.0, prev_res = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (int it = 0; it < cfg.max_fp_iters; ++it) {
      Eigen::VectorXd lower = Eigen::VectorXd::Zero(n);
      Eigen::VectorXd upper = Eigen::VectorXd::Zero(n);
      Eigen::VectorXd diag = grid.mu_weights / dt;
      Eigen::VectorXd sys_rhs = rhs;
      for (int i = 0; i < n - 1; ++i) {
        const double h = grid.x(i + 1) - grid.x(i);
        const double du = (u_new(i + 1) - u_new(i)) / h;
        const double a = grid.face_rho(i) * flux_coefficient(du, cfg.p, cfg.delta) / h;
        diag(i) += cfg.theta * a;
        diag(i + 1) += cfg.theta * a;
        upper(i) = -cfg.theta * a;
        lower(i + 1) = -cfg.theta * a;
      }
      if (pin_left) {
        diag(0) = 1.0;
        upper(0) = 0.0;
        lower(1) = 0.0;
        sys_rhs(0) = 0.0;
      }
      const Eigen::VectorXd candidate = solve_tridiagonal(lower, diag, upper, sys_rhs);
      check_finite(candidate, "the nonlinear iteration");
      u_new = u_new + omega * (candidate - u_new);

      Eigen::VectorXd residual = grid.mu_weights.array() / dt *
                                     (u_new - u_old).array() -
                                 grid.mu_weights.array() * react.array();
      residual -= cfg.theta * diffusion(u_new, cfg, grid) + (1.0 - cfg.theta) * diff_old;
      if (pin_left) residual(0) = u_new(0);
      const double res = residual.norm() / scale;
      if (res <= cfg.fp_tol) {
        converged = true;
        break;
      }
      if (res > prev_res) omega = std::max(0.1, 0.5 * omega);
      prev_res = res;
    }
    if (!converged)
      throw StepRejected("nonlinear solver did not reach the residual target, retry with dt/2");
  }

  PdeState next;
  next.t = state.t + dt;
  next.u = std::move(u_new);
  next.norm_l2mu = mu_norm(grid, next.u);
  next.history = state.history;
  next.history.emplace_back(next.t, next.norm_l2mu);
  return next;
}

SolveReport solve(const PdeConfig& cfg, const Grid1D& grid, const Eigen::VectorXd& u0,
                  const ForcingFn& f, StateHistory* snapshots) {
  cfg.validate();
  if (static_cast<int>(u0.size()) != grid.size())
    throw PreconditionError("solve: u0 size does not match the grid");
  if ((u0.array() < 0.0).any())
    throw PreconditionError("solve: u0 must be nonnegative nodewise");
  const Eigen::VectorXd u0m = u0.cwiseMin(cfg.m);  // truncated initial datum

  SolveReport report;
  report.u0_norm = mu_norm(grid, u0m);
  report.note = "domain ]0,inf[ truncated to [" + std::to_string(grid.x(0)) + "," +
                std::to_string(grid.x(grid.size() - 1)) + "]; left boundary " +
                (cfg.bc == "dirichlet-left" ? "pinned to zero" : "zero-flux") +
                ", right boundary zero-flux";
  if (cfg.p >= 2.0 && cfg.lambda > hardy_constant(1, cfg.p))
    report.note += "; exploratory: p >= 2 supercritical run, no dichotomy claim";
  {
    std::ostringstream tag;
    tag << "nodes=" << grid.size() << ";grading=" << grid.grading << ";dt=" << cfg.dt;
    report.refinement_tag = tag.str();
  }

  PdeState state;
  state.t = 0.0;
  state.u = u0m;
  state.norm_l2mu = report.u0_norm;
  state.history.emplace_back(0.0, state.norm_l2mu);
  report.history = state.history;
  report.bound_history.emplace_back(0.0, report.u0_norm);

  auto f_norm = [&](double t) {
    Eigen::VectorXd fv(grid.size());
    for (int i = 0; i < grid.size(); ++i) fv(i) = f(grid.x(i), t);
    return mu_norm(grid, fv);
  };

  if (snapshots) {
    snapshots->times.clear();
    snapshots->states.clear();
    snapshots->times.push_back(0.0);
    snapshots->states.push_back(u0m);
  }

  double bound = report.u0_norm;
  double fn_prev = f_norm(0.0);
  double dt_cur = cfg.dt;
  const double dt_floor = cfg.dt / 1024.0;
  long steps = 0;

  while (state.t < cfg.T - 1e-12 * cfg.T) {
    PdeConfig step_cfg = cfg;
    step_cfg.dt = std::min(dt_cur, cfg.T - state.t);
    PdeState next;
    try {
      next = step(state, step_cfg, grid, f);
    } catch (const StepRejected&) {
      dt_cur *= 0.5;
      if (dt_cur < dt_floor) {
        report.aborted = true;
        report.note += "; aborted: dt halving floor reached at t=" +
                       std::to_string(state.t);
        break;
      }
      continue;
    } catch (const OverflowError&) {
      report.overflow = true;
      report.blowup = true;
      report.blowup_time = state.t + step_cfg.dt;
      break;
    }

    for (int i = 0; i < next.u.size(); ++i) {
      if (next.u(i) < 0.0) {
        report.max_clip = std::max(report.max_clip, -next.u(i));
        ++report.clipped_nodes;
        next.u(i) = 0.0;
      }
    }
    next.norm_l2mu = mu_norm(grid, next.u);
    next.history.back() = {next.t, next.norm_l2mu};

    const double fn_next = f_norm(next.t);
    bound += 0.5 * step_cfg.dt * (fn_prev + fn_next);
    fn_prev = fn_next;

    state = std::move(next);
    ++steps;
    report.history.emplace_back(state.t, state.norm_l2mu);
    report.bound_history.emplace_back(state.t, bound);
    if (snapshots && cfg.snapshot_stride > 0 && steps % cfg.snapshot_stride == 0) {
      snapshots->times.push_back(state.t);
      snapshots->states.push_back(state.u);
    }

    if (state.norm_l2mu > cfg.blowup_factor * std::max(report.u0_norm, bound)) {
      report.blowup = true;
      report.blowup_time = state.t;
      break;
    }
  }
  return report;
}

double growth_bound(double t, double u0_norm, const std::function<double(double)>& f_norm) {
  if (!(t >= 0.0)) throw PreconditionError("growth_bound: t must be >= 0");
  if (t == 0.0) return u0_norm;
  // Adaptive Simpson on the forcing norm profile.
  std::function<double(double, double, double, double, double, double, int)> simpson =
      [&](double a, double b, double fa, double fm, double fb, double whole,
          int depth) -> double {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f_norm(lm), frm = f_norm(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 1e-10 * (std::abs(left + right) + 1e-300))
      return left + right;
    return simpson(a, m, fa, flm, fm, left, depth - 1) +
           simpson(m, b, fm, frm, fb, right, depth - 1);
  };
  const double fa = f_norm(0.0), fb = f_norm(t), fm = f_norm(0.5 * t);
  const double whole = t / 6.0 * (fa + 4.0 * fm + fb);
  return u0_norm + simpson(0.0, t, fa, fm, fb, whole, 24);
}

std::optional<double> detect_blowup(const SolveReport& report, double threshold_factor) {
  if (!(threshold_factor > 1.0))
    throw PreconditionError("detect_blowup: threshold factor must be > 1");
  for (std::size_t i = 0; i < report.history.size(); ++i) {
    const double bound = i < report.bound_history.size() ? report.bound_history[i].second
                                                         : report.u0_norm;
    if (report.history[i].second > threshold_factor * std::max(report.u0_norm, bound))
      return report.history[i].first;
  }
  if (report.overflow) {
    if (report.blowup_time) return report.blowup_time;
    if (!report.history.empty()) return report.history.back().first;
  }
  return std::nullopt;
}

StateHistory steklov_average(const StateHistory& series, double h) {
  if (series.times.size() < 2)
    throw PreconditionError("steklov_average: need at least two samples");
  const double span = series.times.back() - series.times.front();
  if (!(h > 0.0) || !(h < span))
    throw PreconditionError("steklov_average: need 0 < h < series span");

  StateHistory out;
  const auto& t = series.times;
  for (std::size_t j = 0; j < t.size(); ++j) {
    const double t_end = t[j] + h;
    if (t_end > t.back() + 1e-12 * std::max(1.0, t.back())) break;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(series.states[j].size());
    std::size_t k = j;
    while (k + 1 < t.size() && t[k + 1] <= t_end + 1e-15) {
      acc += 0.5 * (t[k + 1] - t[k]) * (series.states[k] + series.states[k + 1]);
      ++k;
    }
    if (t[k] < t_end && k + 1 < t.size()) {
      const double s = (t_end - t[k]) / (t[k + 1] - t[k]);
      const Eigen::VectorXd v_end =
          (1.0 - s) * series.states[k] + s * series.states[k + 1];
      acc += 0.5 * (t_end - t[k]) * (series.states[k] + v_end);
    }
    out.times.push_back(t[j]);
    out.states.push_back(acc / h);
  }
  return out;
}

double weak_residual(const StateHistory& states, const PdeConfig& cfg, const Grid1D& grid,
                     const SpaceTimeTestFn& phi, double t1, double t2) {
  const int n = grid.size();
  if (!(phi.support_lo > grid.x(0)) || !(phi.support_hi < grid.x(n - 1)))
    throw PreconditionError(
        "weak_residual: phi must be supported strictly inside the spatial grid");
  const int i1 = snap_time_index(states.times, t1, "weak_residual");
  const int i2 = snap_time_index(states.times, t2, "weak_residual");
  if (i1 >= i2) throw PreconditionError("weak_residual: need t1 < t2");

  // -u d_t phi + |u_x|^{p-2} u_x phi_x - (lambda/x^p) |u|^{p-2} u phi - f phi,
  // all against d-mu; space derivatives are face difference quotients to
  // mirror the flux form.
  auto spatial = [&](int k) {
    const double t = states.times[k];
    const Eigen::VectorXd& u = states.states[k];
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double ph = phi.value(grid.x(i), t);
      const double react =
          cfg.lambda > 0.0
              ? cfg.lambda * std::pow(grid.x(i), -cfg.p) * sgn_pow(u(i), cfg.p - 1.0)
              : 0.0;
      sum += grid.mu_weights(i) *
             (-u(i) * phi.time_derivative(grid.x(i), t) - react * ph);
    }
    for (int i = 0; i < n - 1; ++i) {
      const double h = grid.x(i + 1) - grid.x(i);
      const double du = (u(i + 1) - u(i)) / h;
      const double dphi = (phi.value(grid.x(i + 1), t) - phi.value(grid.x(i), t)) / h;
      sum += grid.face_rho(i) * flux_coefficient(du, cfg.p, cfg.delta) * du * dphi * h;
    }
    return sum;
  };

  double integral = 0.0;
  for (int k = i1; k < i2; ++k) {
    const double dt = states.times[k + 1] - states.times[k];
    integral += 0.5 * dt * (spatial(k) + spatial(k + 1));
  }

  double boundary = 0.0;
  for (int i = 0; i < n; ++i) {
    boundary += grid.mu_weights(i) *
                (states.states[i2](i) * phi.value(grid.x(i), states.times[i2]) -
                 states.states[i1](i) * phi.value(grid.x(i), states.times[i1]));
  }
  return boundary + integral;
}

GkProbe gk_nonexistence_probe(const StateHistory& states, const PdeConfig& cfg,
                              const Grid1D& grid, const TestFunction& phi, int k, double t) {
  if (!(cfg.p > 1.0 && cfg.p < 2.0))
    throw PreconditionError("gk_nonexistence_probe: requires 1 < p < 2");
  if (k < 1) throw PreconditionError("gk_nonexistence_probe: k must be >= 1");
  if (!phi.compact_support() || !(phi.support_lo() > grid.x(0)) ||
      !(phi.support_hi() < grid.x(grid.size() - 1)))
    throw PreconditionError(
        "gk_nonexistence_probe: phi must be supported strictly inside the grid");
  const int it = snap_time_index(states.times, t, "gk_nonexistence_probe");

  const double p = cfg.p;
  const double inv_k = 1.0 / k;
  const int n = grid.size();

  auto lhs_at = [&](int idx) {
    const Eigen::VectorXd& u = states.states[idx];
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double ph = std::abs(phi.value(grid.x(i)));
      if (ph == 0.0) continue;
      const double ui = std::max(u(i), 0.0);
      sum += grid.mu_weights(i) * cfg.lambda * std::pow(grid.x(i), -p) *
             std::pow(ui, p - 1.0) * std::pow(ui + inv_k, 1.0 - p) * std::pow(ph, p);
    }
    return sum;
  };

  GkProbe probe;
  for (int j = 0; j < it; ++j) {
    const double dt = states.times[j + 1] - states.times[j];
    probe.lhs_growth += 0.5 * dt * (lhs_at(j) + lhs_at(j + 1));
  }

  double grad_mass = 0.0, cap = 0.0;
  const Eigen::VectorXd& ut = states.states[it];
  for (int i = 0; i < n; ++i) {
    grad_mass += grid.mu_weights(i) * std::pow(std::abs(phi.derivative(grid.x(i))), p);
    const double ph = std::abs(phi.value(grid.x(i)));
    if (ph > 0.0)
      cap += grid.mu_weights(i) * std::pow(std::max(ut(i), 0.0) + inv_k, 2.0 - p) *
             std::pow(ph, p);
  }
  probe.rhs_cap = t * grad_mass + cap / (2.0 - p);
  return probe;
}

}  // namespace hardymu
