#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hardymu/params.hpp"
#include "hardymu/test_function.hpp"

namespace hardymu {

using ForcingFn = std::function<double(double x, double t)>;

// Graded spatial mesh on [x_min, x_max] inside ]0, inf[ with the dual-cell
// mu masses and the face densities needed by the flux form.
struct Grid1D {
  Eigen::VectorXd x;           // strictly increasing nodes
  Eigen::VectorXd mu_weights;  // per-node mu lumps (composite midpoint)
  Eigen::VectorXd face_rho;    // density at cell interfaces
  double grading = 1.0;
  int size() const { return static_cast<int>(x.size()); }
  double max_spacing() const;
};

// x_i = x_min + (x_max - x_min) (i/(n-1))^grading: nodes cluster near x_min.
Grid1D make_graded_grid(const ProblemParams& params, double x_min, double x_max,
                        int nodes, double grading = 2.0);

struct PdeConfig {
  double p = 1.5;
  double lambda = 0.0;
  double m = 1e4;        // potential truncation level
  double delta = 1e-8;   // gradient regularization in (|Du|^2 + delta)^{(p-2)/2}
  double dt = 1e-4;
  double T = 1.0;
  double theta = 1.0;    // implicitness; reaction and forcing stay explicit
  std::string bc = "dirichlet-left";
  double blowup_factor = 10.0;
  double fp_tol = 1e-10;
  int max_fp_iters = 50;
  int snapshot_stride = 1;  // 0 disables state snapshots
  void validate() const;
};

struct PdeState {
  double t = 0.0;
  Eigen::VectorXd u;
  double norm_l2mu = 0.0;
  std::vector<std::pair<double, double>> history;  // (t, norm) so far
};

struct SolveReport {
  std::vector<std::pair<double, double>> history;        // (t, norm)
  std::vector<std::pair<double, double>> bound_history;  // (t, norm bound)
  bool blowup = false;
  std::optional<double> blowup_time;
  std::string refinement_tag;
  bool aborted = false;   // dt halving floor hit
  bool overflow = false;  // non-finite values encountered
  std::string note;       // boundary-treatment flag and warnings
  long clipped_nodes = 0;
  double max_clip = 0.0;  // largest negative value clipped to 0
  double u0_norm = 0.0;
};

struct StateHistory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
};

// Phi_m(x) = min(lambda / x^p, m)
double truncated_potential(double lambda, double p, double m, double x);

// One theta-scheme step of the finite-volume discretization of
//   du/dt = rho^{-1} d/dx ( rho |du/dx|^{p-2} du/dx ) + Phi_m |u|^{p-2} u + f,
// zero flux at both ends, reaction and forcing explicit.  The nonlinear
// diffusion system is solved by damped frozen-coefficient iteration to
// residual fp_tol; non-convergence raises StepRejected, non-finite values
// raise Error with an overflow message.
PdeState step(const PdeState& state, const PdeConfig& cfg, const Grid1D& grid,
              const ForcingFn& f);

// March to T, blow-up (norm beyond blowup_factor * max(|u0|, bound)) or
// abort.  u0 and f must be nonnegative.  Pass a StateHistory to keep
// snapshots every cfg.snapshot_stride accepted steps.
SolveReport solve(const PdeConfig& cfg, const Grid1D& grid, const Eigen::VectorXd& u0,
                  const ForcingFn& f, StateHistory* snapshots = nullptr);

// |u0| + integral_0^t f_norm(s) ds, f_norm supplying the forcing norm profile.
double growth_bound(double t, double u0_norm, const std::function<double(double)>& f_norm);

// First recorded time with norm > factor * max(|u0|, bound); also fires on
// overflow.  Requires factor > 1.
std::optional<double> detect_blowup(const SolveReport& report, double threshold_factor);

// Steklov average v_h(t) = (1/h) integral_t^{t+h} v(s) ds by trapezoid on
// the stored time grid; defined where t + h stays inside the series.
StateHistory steklov_average(const StateHistory& series, double h);

// Space-time test function for the weak form; must vanish outside
// [support_lo, support_hi], strictly inside the spatial grid.
struct SpaceTimeTestFn {
  std::function<double(double x, double t)> value;
  std::function<double(double x, double t)> time_derivative;
  double support_lo = 0.0;
  double support_hi = 0.0;
};

// Discrete weak-form residual of the recorded solution between t1 and t2
// (both snapped to recorded times): left side minus right side of the
// variational identity, O(dx + dt) on smooth runs.
double weak_residual(const StateHistory& states, const PdeConfig& cfg, const Grid1D& grid,
                     const SpaceTimeTestFn& phi, double t1, double t2);

struct GkProbe {
  double lhs_growth = 0.0;  // potential term against g_k(u) = (u + 1/k)^{1-p}
  double rhs_cap = 0.0;     // t |phi'|^p mass + (u(t) + 1/k)^{2-p} cap
};

// Both sides of the truncation-test inequality with g_k(s) = (s+1/k)^{1-p};
// requires 1 < p < 2, a nonnegative recorded solution and a spatial test
// function phi supported strictly inside the grid.
GkProbe gk_nonexistence_probe(const StateHistory& states, const PdeConfig& cfg,
                              const Grid1D& grid, const TestFunction& phi, int k, double t);

}  // namespace hardymu
