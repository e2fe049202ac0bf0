#include "mdelab/analysis.hpp"

#include "mdelab/error.hpp"
#include "mdelab/transport.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <numbers>
#include <string>
#include <thread>

namespace mdelab {

double TestFunction::value(const Point& x) const {
  const double s2 = (x - center).squaredNorm() / (radius * radius);
  if (s2 >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s2));
}

Point TestFunction::gradient(const Point& x) const {
  const Point d = x - center;
  const double s2 = d.squaredNorm() / (radius * radius);
  if (s2 >= 1.0) return Point::Zero(x.size());
  const double f = std::exp(1.0 - 1.0 / (1.0 - s2));
  const double q = 1.0 - s2;
  return (-2.0 * f / (radius * radius * q * q)) * d;
}

std::vector<TestFunction> test_family(const DiscreteMeasure& mu0, double reach) {
  if (!(reach > 0.0) || !std::isfinite(reach)) {
    throw ValidationError("test family needs a finite positive reach", "reach");
  }
  const int n = mu0.dim();
  Point axis = Point::Zero(n);
  axis[0] = 1.0;
  Point bary = Point::Zero(n);
  for (const auto& a : mu0.atoms()) bary += a.mass * a.position;
  return {
      {Point::Zero(n), 1.25 * reach},
      {Point::Zero(n), 0.625 * reach},
      {0.5 * reach * axis, 0.75 * reach},
      {-0.5 * reach * axis, 0.75 * reach},
      {bary, 0.75 * reach},
  };
}

SampledSolution sample_trajectory(const Trajectory& traj) {
  SampledSolution sol;
  const int n = traj.config.n_param;
  for (std::size_t l = 0; l < traj.steps.size(); ++l) {
    sol.times.push_back(traj.time(l));
    sol.measures.push_back(traj.steps[l].to_measure());
    sol.fields.push_back(evaluate(traj.pvf, sol.measures.back(), n));
  }
  return sol;
}

SampledSolution stationary_solution(const DiscreteMeasure& mu, const PvfSpec& spec, double horizon,
                                    int intervals) {
  if (intervals < 1) throw ValidationError("need at least one interval", "intervals");
  SampledSolution sol;
  const LiftedMeasure V = evaluate(spec, mu);
  for (int k = 0; k <= intervals; ++k) {
    sol.times.push_back(horizon * k / intervals);
    sol.measures.push_back(mu);
    sol.fields.push_back(V);
  }
  return sol;
}

namespace {

double integral_of(const DiscreteMeasure& mu, const TestFunction& f) {
  std::vector<double> terms;
  terms.reserve(mu.size());
  for (const auto& a : mu.atoms()) terms.push_back(a.mass * f.value(a.position));
  return compensated_sum(terms);
}

// int grad f . v dV
double transport_term(const LiftedMeasure& V, const TestFunction& f) {
  std::vector<double> terms;
  terms.reserve(V.size());
  for (const auto& a : V.atoms()) terms.push_back(a.mass * f.gradient(a.position).dot(a.velocity));
  return compensated_sum(terms);
}

std::size_t grid_index(const SampledSolution& sol, double t) {
  if (sol.times.empty()) throw ValidationError("empty time grid", "t");
  if (t < -1e-12 || t > sol.times.back() + 1e-9) {
    throw ValidationError("time " + std::to_string(t) + " beyond the trajectory horizon", "t");
  }
  for (std::size_t k = 0; k < sol.times.size(); ++k) {
    if (std::abs(sol.times[k] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return k;
  }
  throw ValidationError("time " + std::to_string(t) + " is not a grid time", "t");
}

double polynomial(const std::vector<double>& c, double s) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * s + *it;
  return acc;
}

double derivative(const std::vector<double>& c, double s) {
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) acc = acc * s + static_cast<double>(k) * c[k];
  return acc;
}

}  // namespace

double weak_residual(const SampledSolution& sol, const TestFunction& f, double t) {
  const std::size_t last = grid_index(sol, t);
  std::vector<double> terms;
  double previous = transport_term(sol.fields[0], f);
  for (std::size_t k = 1; k <= last; ++k) {
    const double current = transport_term(sol.fields[k], f);
    terms.push_back(0.5 * (sol.times[k] - sol.times[k - 1]) * (previous + current));
    previous = current;
  }
  const double rhs = compensated_sum(terms);
  const double lhs = integral_of(sol.measures[last], f) - integral_of(sol.measures[0], f);
  return std::abs(lhs - rhs);
}

double distributional_residual(const SampledSolution& sol, const TestFunction& f,
                               const std::vector<double>& a, double t) {
  const std::size_t last = grid_index(sol, t);
  auto integrand = [&](std::size_t k) {
    const double s = sol.times[k];
    return derivative(a, s) * integral_of(sol.measures[k], f) +
           polynomial(a, s) * transport_term(sol.fields[k], f);
  };
  std::vector<double> terms;
  double previous = integrand(0);
  for (std::size_t k = 1; k <= last; ++k) {
    const double current = integrand(k);
    terms.push_back(0.5 * (sol.times[k] - sol.times[k - 1]) * (previous + current));
    previous = current;
  }
  terms.push_back(-polynomial(a, sol.times[last]) * integral_of(sol.measures[last], f));
  terms.push_back(polynomial(a, sol.times[0]) * integral_of(sol.measures[0], f));
  return std::abs(compensated_sum(terms));
}

std::vector<double> residual_profile(const SampledSolution& sol,
                                     const std::vector<TestFunction>& family) {
  std::vector<double> worst(sol.times.size(), 0.0);
  for (const auto& f : family) {
    // One cumulative pass per test function instead of re-integrating from 0.
    double accumulated = 0.0;
    const double base = integral_of(sol.measures[0], f);
    double previous = transport_term(sol.fields[0], f);
    for (std::size_t k = 1; k < sol.times.size(); ++k) {
      const double current = transport_term(sol.fields[k], f);
      accumulated += 0.5 * (sol.times[k] - sol.times[k - 1]) * (previous + current);
      previous = current;
      worst[k] = std::max(worst[k], std::abs(integral_of(sol.measures[k], f) - base - accumulated));
    }
  }
  return worst;
}

double max_weak_residual(const SampledSolution& sol, const std::vector<TestFunction>& family) {
  const auto profile = residual_profile(sol, family);
  return profile.empty() ? 0.0 : *std::max_element(profile.begin(), profile.end());
}

// ---------------------------------------------------------------------------

DiscreteMeasure median_split_delta(double x0, double t) {
  if (t < 0.0) throw ValidationError("t must be >= 0", "t");
  return make_measure({{make_point({x0 - t}), 0.5}, {make_point({x0 + t}), 0.5}});
}

DiscreteMeasure median_split_uniform(double a, double b, double t, int atoms) {
  if (!(b > a)) throw ValidationError("need a < b", "b");
  if (atoms < 2) throw ValidationError("need at least 2 atoms", "atoms");
  if (t < 0.0) throw ValidationError("t must be >= 0", "t");
  const double mid = 0.5 * (a + b);
  const int left = atoms / 2;
  const int right = atoms - left;
  std::vector<Atom> out;
  out.reserve(static_cast<std::size_t>(atoms));
  const auto lower = uniform_atoms(a - t, mid - t, left);
  const auto upper = uniform_atoms(mid + t, b + t, right);
  for (const auto& x : lower.atoms()) out.push_back({x.position, 0.5 * x.mass});
  for (const auto& x : upper.atoms()) out.push_back({x.position, 0.5 * x.mass});
  return make_measure(std::move(out));
}

DiscreteMeasure constant_drift(const DiscreteMeasure& mu0,
                               const std::vector<std::pair<Point, double>>& fiber, double t) {
  Point mean = Point::Zero(mu0.dim());
  for (const auto& [u, p] : fiber) {
    if (u.size() != mu0.dim()) throw ValidationError("fiber velocity dimension mismatch", "fiber");
    mean += p * u;
  }
  return push_forward(mu0, [&](const Point& x) -> Point { return x + t * mean; });
}

DiscreteMeasure ode_flow(const DiscreteMeasure& mu0, const VelocityField& v, double t) {
  namespace odeint = boost::numeric::odeint;
  using State = std::vector<double>;
  if (t < 0.0) throw ValidationError("t must be >= 0", "t");
  const auto n = static_cast<Eigen::Index>(mu0.dim());
  auto rhs = [&](const State& x, State& dxdt, double) {
    const Point p = Eigen::Map<const Point>(x.data(), n);
    const Point w = v(p);
    dxdt.assign(w.data(), w.data() + n);
  };
  std::vector<Atom> out;
  out.reserve(mu0.size());
  for (const auto& a : mu0.atoms()) {
    State x(a.position.data(), a.position.data() + n);
    if (t > 0.0) {
      auto stepper = odeint::make_controlled(1e-10, 1e-10, odeint::runge_kutta_dopri5<State>());
      odeint::integrate_adaptive(stepper, rhs, x, 0.0, t, std::min(1e-3, t));
    }
    Point p = Eigen::Map<const Point>(x.data(), n);
    if (!p.allFinite()) throw NumericalError("ODE flow blew up before t = " + std::to_string(t));
    out.push_back({std::move(p), a.mass});
  }
  return DiscreteMeasure(mu0.dim(), std::move(out));
}

DiscreteMeasure phi_linear(double x0, double t, int atoms) {
  if (t < 0.0) throw ValidationError("t must be >= 0", "t");
  if (t == 0.0) return DiscreteMeasure::dirac(make_point({x0}));
  return uniform_atoms(x0 - 0.5 * t, x0 + 0.5 * t, atoms);
}

double one_sided_position(double x0, double t) {
  const double root = std::sqrt(std::abs(x0)) - 0.5 * t;
  if (root <= 0.0) return 0.0;
  return (x0 > 0.0 ? 1.0 : -1.0) * root * root;
}

DiscreteMeasure one_sided_collapse(const DiscreteMeasure& mu0, double t) {
  if (mu0.dim() != 1) throw ValidationError("one-sided collapse is one-dimensional", "dim");
  if (t < 0.0) throw ValidationError("t must be >= 0", "t");
  return push_forward(mu0, [&](const Point& x) { return make_point({one_sided_position(x[0], t)}); });
}

DiscreteMeasure oracle(std::string_view name, const OracleParams& p, double t) {
  auto initial = [&]() -> const DiscreteMeasure& {
    if (!p.initial) throw ValidationError("oracle '" + std::string(name) + "' needs an initial measure", "init");
    return *p.initial;
  };
  if (name == "median_split_delta") return median_split_delta(p.x0, t);
  if (name == "median_split_uniform") return median_split_uniform(p.a, p.b, t, p.atoms);
  if (name == "constant_drift") return constant_drift(initial(), p.fiber, t);
  if (name == "ode_flow") return ode_flow(initial(), p.field, t);
  if (name == "phi_linear") return phi_linear(p.x0, t, p.atoms);
  if (name == "one_sided_collapse") return one_sided_collapse(initial(), t);
  throw ValidationError("unknown oracle '" + std::string(name) + "'", "oracle");
}

Oracle make_oracle(std::string name, OracleParams params) {
  oracle(name, params, 0.0);  // validate eagerly
  return [name = std::move(name), params = std::move(params)](double t) { return oracle(name, params, t); };
}

// ---------------------------------------------------------------------------

unsigned worker_threads() {
  if (const char* env = std::getenv("MDE_LAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::optional<double> fitted_order(const std::vector<ConvergenceRow>& rows) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows) {
    if (r.error > 0.0) pts.emplace_back(std::log(static_cast<double>(r.n_param)), std::log(r.error));
  }
  if (pts.size() < 3) return std::nullopt;
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [x, y] : pts) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  if (sxx == 0.0) return std::nullopt;
  return -sxy / sxx;
}

ConvergenceReport convergence_study(const PvfSpec& spec, const DiscreteMeasure& mu0,
                                    const Oracle& reference, double horizon,
                                    const std::vector<int>& n_grid) {
  ConvergenceReport report;
  report.rows.resize(n_grid.size());
  std::vector<std::exception_ptr> failures(n_grid.size());
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t i = next++; i < n_grid.size(); i = next++) {
      try {
        const auto start = std::chrono::steady_clock::now();
        const auto traj = las_solve(mu0, spec, n_grid[i], horizon);
        double err = 0.0;
        for (double frac : {0.0, 0.25, 0.5, 0.75, 1.0}) {
          const double t = frac * horizon;
          const auto approx = interpolate(traj, std::min(t, traj.final_time()));
          err = std::max(err, wasserstein(approx, reference(t)).distance);
        }
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        report.rows[i] = {n_grid[i], err, elapsed.count()};
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };

  const unsigned workers = std::min<unsigned>(worker_threads(), static_cast<unsigned>(n_grid.size()));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  report.slope = fitted_order(report.rows);
  return report;
}

GronwallReport gronwall_check(const PvfSpec& spec, const DiscreteMeasure& mu0,
                              const DiscreteMeasure& nu0, int n_param, double horizon, double k) {
  if (!(k > 0.0)) throw ValidationError("K must be > 0", "k");
  const auto a = las_solve(mu0, spec, n_param, horizon);
  const auto b = las_solve(nu0, spec, n_param, horizon);
  const double w0 = wasserstein(mu0, nu0).distance;
  const double n = n_param;
  const double offset = w0 + 1.0 / (n * n) + 1.0 / (k * n);
  GronwallReport report;
  report.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < a.steps.size(); ++l) {
    const double d = wasserstein(a.steps[l].to_measure(), b.steps[l].to_measure()).distance;
    const double bound = std::exp(k * static_cast<double>(l) / n) * offset;
    report.distance.push_back(d);
    report.bound.push_back(bound);
    report.worst_margin = std::min(report.worst_margin, bound - d);
  }
  report.pass = report.worst_margin >= 0.0;
  return report;
}

namespace {

int aligned_steps(double s, int n_param, const char* field) {
  const double steps = s * n_param;
  const double r = std::round(steps);
  if (s < 0.0 || std::abs(steps - r) > 1e-9 * std::max(1.0, steps)) {
    throw ValidationError(std::string(field) + " must be a nonnegative multiple of 1/N", field);
  }
  return static_cast<int>(r);
}

}  // namespace

double semigroup_check(const PvfSpec& spec, const DiscreteMeasure& mu0, int n_param, double s,
                       double t) {
  const int ls = aligned_steps(s, n_param, "s");
  const int lt = aligned_steps(t, n_param, "t");
  const double radius = support_radius(mu0).radius;
  const auto start = ax_discretize(mu0, n_param);
  const auto whole = las_run(start, spec, ls + lt, radius);
  const auto first = las_run(start, spec, ls, radius);
  const auto& mid = first.steps.back();
  const auto rest = las_run(mid, spec, lt, support_radius(mid).radius);
  return wasserstein(whole.steps.back().to_measure(), rest.steps.back().to_measure()).distance;
}

BoundCheck time_lipschitz_check(const Trajectory& traj, const std::vector<double>& times) {
  const double c = traj.h1;
  const double horizon = traj.final_time();
  const double lip = c * std::exp(c * horizon) * (traj.initial_radius + 1.0);
  std::vector<DiscreteMeasure> samples;
  samples.reserve(times.size());
  for (double t : times) samples.push_back(interpolate(traj, t));
  BoundCheck check;
  check.margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < times.size(); ++i) {
    for (std::size_t j = i + 1; j < times.size(); ++j) {
      const double w = wasserstein(samples[i], samples[j]).distance;
      check.margin = std::min(check.margin, lip * std::abs(times[i] - times[j]) + 1e-12 - w);
    }
  }
  check.pass = check.margin >= 0.0;
  return check;
}

BoundCheck support_bound_check(const Trajectory& traj) {
  BoundCheck check;
  check.margin = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < traj.support_radius.size(); ++l) {
    const double bound = std::exp(traj.h1 * traj.time(l)) * (traj.initial_radius + 1.0);
    check.margin = std::min(check.margin, bound - traj.support_radius[l]);
  }
  check.pass = check.margin >= 0.0;
  return check;
}

// ---------------------------------------------------------------------------

namespace {

// Base atoms of a lifted measure with the conditional velocity law at each.
struct FiberBlocks {
  DiscreteMeasure base;
  std::vector<DiscreteMeasure> fibers;
  std::vector<double> mean_velocity;
};

FiberBlocks split_fibers(const LiftedMeasure& V) {
  std::vector<Atom> base;
  std::vector<DiscreteMeasure> fibers;
  std::vector<double> means;
  const auto& atoms = V.atoms();
  for (std::size_t i = 0; i < atoms.size();) {
    std::size_t j = i;
    std::vector<double> masses;
    while (j < atoms.size() && exactly_equal(atoms[j].position, atoms[i].position)) {
      masses.push_back(atoms[j].mass);
      ++j;
    }
    const double total = compensated_sum(masses);
    std::vector<Atom> fiber;
    double mean = 0.0;
    for (std::size_t k = i; k < j; ++k) {
      fiber.push_back({atoms[k].velocity, atoms[k].mass / total});
      mean += atoms[k].velocity[0] * atoms[k].mass / total;
    }
    base.push_back({atoms[i].position, total});
    fibers.emplace_back(V.dim(), std::move(fiber));
    means.push_back(mean);
    i = j;
  }
  return {DiscreteMeasure(V.dim(), std::move(base)), std::move(fibers), std::move(means)};
}

}  // namespace

double monotone_fiber_cost_1d(const LiftedMeasure& V1, const LiftedMeasure& V2,
                              FiberCostKind kind) {
  if (V1.dim() != 1 || V2.dim() != 1) {
    throw ValidationError("monotone fiber cost is one-dimensional", "dim");
  }
  const auto a = split_fibers(V1);
  const auto b = split_fibers(V2);
  const auto plan = monotone_plan_1d(a.base, b.base);
  std::vector<double> terms;
  terms.reserve(plan.entries.size());
  for (const auto& e : plan.entries) {
    const double x = a.base[e.source].position[0];
    const double y = b.base[e.target].position[0];
    switch (kind) {
      case FiberCostKind::Fiber:
        terms.push_back(e.weight * wasserstein(a.fibers[e.source], b.fibers[e.target]).distance);
        break;
      case FiberCostKind::Combined:
        terms.push_back(e.weight * (std::abs(x - y) +
                                    wasserstein(a.fibers[e.source], b.fibers[e.target]).distance));
        break;
      case FiberCostKind::OneSided: {
        // Linear in (v, w): every fiber coupling gives the same value.
        const double sign = x > y ? 1.0 : (x < y ? -1.0 : 0.0);
        terms.push_back(e.weight * sign * (a.mean_velocity[e.source] - b.mean_velocity[e.target]));
        break;
      }
    }
  }
  return compensated_sum(terms);
}

LiftedMeasure variance_sin_lift(const DiscreteMeasure& mu) {
  if (mu.dim() != 1) throw ValidationError("variance-sin field is one-dimensional", "dim");
  std::vector<double> first, second;
  for (const auto& a : mu.atoms()) first.push_back(a.mass * a.position[0]);
  const double mean = compensated_sum(first);
  for (const auto& a : mu.atoms()) {
    const double d = a.position[0] - mean;
    second.push_back(a.mass * d * d);
  }
  const double var = compensated_sum(second);
  if (!(var > 0.0)) throw ValidationError("variance-sin field needs positive variance", "atoms");
  return lift_deterministic(mu, [var](const Point& x) {
    return make_point({std::sin(2.0 * std::numbers::pi * x[0] / var)});
  });
}

std::pair<LiftedMeasure, LiftedMeasure> variance_sin_pair(int atoms, double m) {
  if (!(m > 0.0)) throw ValidationError("m must be > 0", "m");
  const auto mu = uniform_atoms(0.0, 1.0 / m, atoms);
  const double shift = 1.0 / (24.0 * m * m);
  const auto moved = push_forward(mu, [shift](const Point& x) -> Point { return x.array() + shift; });
  return {variance_sin_lift(mu), variance_sin_lift(moved)};
}

}  // namespace mdelab
