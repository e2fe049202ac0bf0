#include "mdelab/las.hpp"

#include "mdelab/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mdelab {

std::int64_t lattice_floor(double y) {
  const double r = std::round(y);
  if (std::abs(y - r) <= 1e-9 * std::max(1.0, std::abs(y))) return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::floor(y));
}

int LatticeConfig::step_count() const {
  return static_cast<int>(lattice_floor(static_cast<double>(n_param) * horizon));
}

namespace {

double squared(int n) { return static_cast<double>(n) * static_cast<double>(n); }

LatticePoint lattice_coords(const Point& x, int n_param) {
  const double scale = squared(n_param);
  LatticePoint c(x.size());
  for (Eigen::Index d = 0; d < x.size(); ++d) c[d] = lattice_floor(x[d] * scale);
  return c;
}

LatticePoint exact_lattice_coords(const Point& x, int n_param) {
  const double scale = squared(n_param);
  LatticePoint c(x.size());
  for (Eigen::Index d = 0; d < x.size(); ++d) {
    const double y = x[d] * scale;
    const double r = std::round(y);
    if (std::abs(y - r) > 1e-9 * std::max(1.0, std::abs(y))) {
      throw ValidationError("position " + std::to_string(x[d]) + " is not on the lattice Z/N^2",
                            "position");
    }
    c[d] = static_cast<std::int64_t>(r);
  }
  return c;
}

LatticePoint velocity_index(const Point& v, int n_param) {
  LatticePoint k(v.size());
  for (Eigen::Index d = 0; d < v.size(); ++d) {
    if (!(v[d] >= -n_param && v[d] < n_param)) {
      throw NumericalError("velocity " + std::to_string(v[d]) + " outside [-N, N) for N = " +
                           std::to_string(n_param) + "; increase N");
    }
    k[d] = lattice_floor(v[d] * n_param);
  }
  return k;
}

Point lattice_position(const LatticePoint& c, int n_param) {
  return c.cast<double>() / squared(n_param);
}

}  // namespace

LatticeMeasure ax_discretize(const DiscreteMeasure& mu, int n_param) {
  if (n_param < 1) throw ValidationError("N must be >= 1", "n");
  std::vector<LatticeAtom> atoms;
  atoms.reserve(mu.size());
  for (const auto& a : mu.atoms()) {
    if ((a.position.array() < -n_param).any() || (a.position.array() >= n_param).any()) {
      throw ValidationError("support leaves [-N, N)^n for N = " + std::to_string(n_param) +
                                "; choose a larger N",
                            "n");
    }
    atoms.push_back({lattice_coords(a.position, n_param), a.mass});
  }
  return LatticeMeasure(n_param, mu.dim(), std::move(atoms));
}

LiftedMeasure av_discretize(const LiftedMeasure& V, int n_param) {
  if (n_param < 1) throw ValidationError("N must be >= 1", "n");
  std::vector<LiftedAtom> atoms;
  atoms.reserve(V.size());
  for (const auto& a : V.atoms()) {
    const LatticePoint c = exact_lattice_coords(a.position, n_param);
    const LatticePoint k = velocity_index(a.velocity, n_param);
    atoms.push_back({lattice_position(c, n_param), k.cast<double>() / n_param, a.mass});
  }
  return LiftedMeasure(V.dim(), std::move(atoms));
}

LasStepResult las_step_detailed(const LatticeMeasure& mu, const PvfSpec& spec) {
  const int n = mu.n_param();
  const LiftedMeasure V = evaluate(spec, mu.to_measure(), n);
  std::vector<LiftedAtom> binned;
  std::vector<LatticeAtom> moved;
  binned.reserve(V.size());
  moved.reserve(V.size());
  for (const auto& a : V.atoms()) {
    const LatticePoint c = exact_lattice_coords(a.position, n);
    const LatticePoint k = velocity_index(a.velocity, n);
    binned.push_back({a.position, k.cast<double>() / n, a.mass});
    // dt * (k / N) = k / N^2: a shift by k lattice cells.
    moved.push_back({c + k, a.mass});
  }
  for (const auto& m : moved) {
    if ((m.coords.array().abs() > mu.box_limit()).any()) {
      throw NumericalError("lattice box [-N, N]^n overflowed at N = " + std::to_string(n) +
                           "; the support grew past the box, increase N");
    }
  }
  return {LatticeMeasure(n, mu.dim(), std::move(moved)), LiftedMeasure(mu.dim(), std::move(binned))};
}

LatticeMeasure las_step(const LatticeMeasure& mu, const PvfSpec& spec) {
  return las_step_detailed(mu, spec).next;
}

namespace {

void check_support_bound(const Trajectory& traj, std::size_t step) {
  const double t = traj.time(step);
  const double bound = std::exp(traj.h1 * t) * (traj.initial_radius + 1.0);
  const double r = traj.support_radius[step];
  if (r > bound * (1.0 + 1e-12)) {
    throw NumericalError("support radius " + std::to_string(r) + " at step " +
                         std::to_string(step) + " exceeds e^{C l dt}(R + 1) = " +
                         std::to_string(bound) + "; the field's growth constant is misdeclared");
  }
}

}  // namespace

Trajectory las_run(const LatticeMeasure& start, const PvfSpec& spec, int steps,
                   double initial_radius) {
  if (steps < 0) throw ValidationError("step count must be >= 0", "steps");
  Trajectory traj;
  traj.config.n_param = start.n_param();
  traj.config.horizon = static_cast<double>(steps) / start.n_param();
  traj.pvf = spec;
  traj.initial_radius = initial_radius;
  traj.h1 = spec.h1_constant(start.dim());
  traj.steps.reserve(static_cast<std::size_t>(steps) + 1);
  traj.steps.push_back(start);
  traj.support_radius.push_back(support_radius(start).radius);
  check_support_bound(traj, 0);
  for (int l = 0; l < steps; ++l) {
    auto step = las_step_detailed(traj.steps.back(), spec);
    traj.binned.push_back(std::move(step.binned));
    traj.steps.push_back(std::move(step.next));
    traj.support_radius.push_back(support_radius(traj.steps.back()).radius);
    check_support_bound(traj, traj.steps.size() - 1);
  }
  return traj;
}

Trajectory las_solve(const DiscreteMeasure& mu0, const PvfSpec& spec, int n_param, double horizon) {
  if (n_param < 1) throw ValidationError("N must be >= 1", "n");
  if (!(horizon > 0.0)) throw ValidationError("horizon must be > 0", "horizon");
  const double radius = support_radius(mu0).radius;
  const double c = spec.h1_constant(mu0.dim());
  if (!std::isfinite(c)) {
    throw ValidationError("the field has no finite growth constant; declare h1_constant",
                          "h1_constant");
  }
  const double required = std::exp(c * horizon) * (radius + 1.0);
  if (required > n_param) {
    throw ValidationError("N = " + std::to_string(n_param) + " is too small: e^{CT}(R + 1) = " +
                              std::to_string(required),
                          "n");
  }
  LatticeConfig config{n_param, horizon};
  auto traj = las_run(ax_discretize(mu0, n_param), spec, config.step_count(), radius);
  traj.config = config;
  return traj;
}

DiscreteMeasure interpolate(const Trajectory& traj, double t) {
  const int n = traj.config.n_param;
  const double last = traj.final_time();
  if (!(t >= 0.0) || t > last + 1e-12) {
    throw ValidationError("time " + std::to_string(t) + " outside [0, " + std::to_string(last) + "]",
                          "t");
  }
  const double y = t * n;
  auto l = lattice_floor(y);
  if (l < 0) l = 0;
  const auto step = static_cast<std::size_t>(l);
  // a snapped step time is the step itself, not a 1e-17 offset from it
  const double frac = y - static_cast<double>(l);
  const double s = frac <= 1e-9 * std::max(1.0, std::abs(y)) ? 0.0 : frac / n;
  if (step + 1 >= traj.steps.size() || s <= 0.0) {
    return traj.steps[std::min(step, traj.steps.size() - 1)].to_measure();
  }
  std::vector<Atom> atoms;
  atoms.reserve(traj.binned[step].size());
  for (const auto& a : traj.binned[step].atoms()) atoms.push_back({a.position + s * a.velocity, a.mass});
  return DiscreteMeasure(traj.steps[step].dim(), std::move(atoms));
}

}  // namespace mdelab
