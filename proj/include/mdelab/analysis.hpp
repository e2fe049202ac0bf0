#pragma once

// Verification instruments: weak-form residuals, closed-form reference
// solutions, convergence studies and the stability checks the scheme is
// expected to satisfy.

#include "mdelab/fiber_metric.hpp"
#include "mdelab/las.hpp"
#include "mdelab/measure.hpp"
#include "mdelab/pvf.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mdelab {

/// Smooth bump exp(1 - 1/(1 - |x-c|^2/r^2)) supported in B(c, r).
struct TestFunction {
  Point center;
  double radius = 1.0;

  double value(const Point& x) const;
  Point gradient(const Point& x) const;
};

/// Five bumps covering B(0, reach): one wide, one narrow at the origin, two
/// offset along the first axis and one at the barycenter of mu0.
std::vector<TestFunction> test_family(const DiscreteMeasure& mu0, double reach);

/// Measures and their PVF values on a time grid.
struct SampledSolution {
  std::vector<double> times;
  std::vector<DiscreteMeasure> measures;
  std::vector<LiftedMeasure> fields;  // fields[k] = V[measures[k]]
};

/// Step-time samples of a LAS run, with V evaluated (unbinned) at each step.
SampledSolution sample_trajectory(const Trajectory& traj);

/// mu(t) = mu for t on a uniform grid of `intervals` steps over [0, horizon].
SampledSolution stationary_solution(const DiscreteMeasure& mu, const PvfSpec& spec, double horizon,
                                    int intervals);

/// |int f dmu(t) - int f dmu0 - int_0^t int grad f . v dV[mu(s)] ds|, time
/// integral by the trapezoid rule on the grid. t must be a grid time.
double weak_residual(const SampledSolution& sol, const TestFunction& f, double t);

/// Same identity tested against g(s, x) = a(s) f(x), a polynomial with
/// coefficients in increasing degree. Boundary terms at 0 and t included.
double distributional_residual(const SampledSolution& sol, const TestFunction& f,
                               const std::vector<double>& a, double t);

/// Max over the family of weak_residual at every grid time.
std::vector<double> residual_profile(const SampledSolution& sol,
                                     const std::vector<TestFunction>& family);

/// Max of weak_residual over the family and over all grid times.
double max_weak_residual(const SampledSolution& sol, const std::vector<TestFunction>& family);

// ---------------------------------------------------------------------------
// Closed-form references.

DiscreteMeasure median_split_delta(double x0, double t);
/// Uniform on [a, b] under the median split: halves of the interval drift
/// apart at unit speed. Discretized with `atoms` midpoint atoms.
DiscreteMeasure median_split_uniform(double a, double b, double t, int atoms);
DiscreteMeasure constant_drift(const DiscreteMeasure& mu0,
                               const std::vector<std::pair<Point, double>>& fiber, double t);
/// Push-forward along x' = v(x), adaptive Dormand-Prince, tolerance 1e-10.
DiscreteMeasure ode_flow(const DiscreteMeasure& mu0, const VelocityField& v, double t);
/// phi(alpha) = alpha - 1/2 from delta_{x0}: uniform on [x0 - t/2, x0 + t/2].
DiscreteMeasure phi_linear(double x0, double t, int atoms);
/// Characteristics of x' = -sgn(x) sqrt|x|: extinction at t = 2 sqrt|x0|.
double one_sided_position(double x0, double t);
DiscreteMeasure one_sided_collapse(const DiscreteMeasure& mu0, double t);

struct OracleParams {
  double x0 = 0.0;
  double a = 0.0;
  double b = 1.0;
  int atoms = 200;
  std::optional<DiscreteMeasure> initial;
  std::vector<std::pair<Point, double>> fiber;
  VelocityField field;
};

using Oracle = std::function<DiscreteMeasure(double)>;

/// Dispatch by name: median_split_delta, median_split_uniform, constant_drift,
/// ode_flow, phi_linear, one_sided_collapse.
DiscreteMeasure oracle(std::string_view name, const OracleParams& params, double t);
Oracle make_oracle(std::string name, OracleParams params);

// ---------------------------------------------------------------------------
// Convergence and stability.

struct ConvergenceRow {
  int n_param = 0;
  double error = 0.0;
  double seconds = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  /// Convergence order: minus the least-squares slope of log(error) against
  /// log(N). Present only with >= 3 positive errors.
  std::optional<double> slope;
};

/// Worker count: MDE_LAB_THREADS if set and positive, else the hardware count.
unsigned worker_threads();

/// Error at each N is the max over t in {0, T/4, T/2, 3T/4, T} of
/// W(interpolate(LAS, t), reference(t)). Runs the N values in parallel.
ConvergenceReport convergence_study(const PvfSpec& spec, const DiscreteMeasure& mu0,
                                    const Oracle& reference, double horizon,
                                    const std::vector<int>& n_grid);

/// Least-squares order from (N, error) pairs with error > 0.
std::optional<double> fitted_order(const std::vector<ConvergenceRow>& rows);

struct GronwallReport {
  bool pass = true;
  double worst_margin = 0.0;  // min over steps of bound - distance
  std::vector<double> distance;
  std::vector<double> bound;
};

/// W(mu_l, nu_l) <= e^{K l/N} (W(mu0, nu0) + 1/N^2 + 1/(K N)) at every step.
GronwallReport gronwall_check(const PvfSpec& spec, const DiscreteMeasure& mu0,
                              const DiscreteMeasure& nu0, int n_param, double horizon, double k);

/// W between floor(Ns)+floor(Nt) steps from mu0 and floor(Nt) steps from
/// the floor(Ns)-step result. Zero for a deterministic recursion.
double semigroup_check(const PvfSpec& spec, const DiscreteMeasure& mu0, int n_param, double s,
                       double t);

struct BoundCheck {
  bool pass = true;
  double margin = 0.0;  // min of bound - observed
};

/// W(mu(t), mu(s)) <= C e^{CT}(R+1)|t - s| + 1e-12 over all pairs of `times`.
BoundCheck time_lipschitz_check(const Trajectory& traj, const std::vector<double>& times);

/// radius_l <= e^{C l/N}(R+1) at every stored step.
BoundCheck support_bound_check(const Trajectory& traj);

/// Fiber cost of the selected kind under the monotone base coupling of two
/// 1D lifted measures. An upper bound for constrained_fiber_cost whenever
/// the optimal base plan is not unique.
double monotone_fiber_cost_1d(const LiftedMeasure& V1, const LiftedMeasure& V2,
                              FiberCostKind kind);

/// V[mu] = mu (x) delta at sin(2 pi x / Var(mu)).
LiftedMeasure variance_sin_lift(const DiscreteMeasure& mu);

/// Lifts of mu_m (uniform on [0, 1/m], `atoms` midpoints) and of its
/// translate by 1/(24 m^2).
std::pair<LiftedMeasure, LiftedMeasure> variance_sin_pair(int atoms, double m = 1.0);

}  // namespace mdelab
