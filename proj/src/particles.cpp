#include "mdelab/particles.hpp"

#include "mdelab/error.hpp"
#include "mdelab/las.hpp"
#include "mdelab/pvf.hpp"
#include "mdelab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mdelab {

void validate(const ParticleState& state) {
  if (state.positions.empty()) throw ValidationError("need at least one particle", "positions");
  if (state.dim < 1) throw ValidationError("dim must be >= 1", "dim");
  for (const auto& x : state.positions) {
    if (x.size() != state.dim) throw ValidationError("particle dimension mismatch", "positions");
    if (!x.allFinite()) throw ValidationError("non-finite particle coordinate", "positions");
  }
}

std::vector<Point> particle_velocities(const ParticleState& state, const InteractionKernel& kernel) {
  const std::size_t m = state.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return lex_less(state.positions[a], state.positions[b]);
  });
  std::vector<Point> v(m);
  for (std::size_t i = 0; i < m; ++i) {
    Point acc = Point::Zero(state.dim);
    for (std::size_t j : order) acc += kernel(state.positions[j] - state.positions[i]);
    v[i] = acc / static_cast<double>(m);
  }
  return v;
}

namespace {

ParticleState shifted(const ParticleState& s, const std::vector<Point>& k, double h) {
  ParticleState out = s;
  for (std::size_t i = 0; i < s.size(); ++i) out.positions[i] += h * k[i];
  return out;
}

ParticleState rk4_step(const ParticleState& s, const InteractionKernel& kernel, double h) {
  const auto k1 = particle_velocities(s, kernel);
  const auto k2 = particle_velocities(shifted(s, k1, 0.5 * h), kernel);
  const auto k3 = particle_velocities(shifted(s, k2, 0.5 * h), kernel);
  const auto k4 = particle_velocities(shifted(s, k3, h), kernel);
  ParticleState out = s;
  for (std::size_t i = 0; i < s.size(); ++i) {
    out.positions[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (!out.positions[i].allFinite()) {
      throw NumericalError("particle system blew up near t = " + std::to_string(s.time + h));
    }
  }
  out.time = s.time + h;
  return out;
}

}  // namespace

std::vector<ParticleState> integrate(const ParticleState& state0, const InteractionKernel& kernel,
                                     double horizon, double dt_ode) {
  validate(state0);
  if (!(dt_ode > 0.0)) throw ValidationError("dt_ode must be > 0", "dt_ode");
  if (horizon < 0.0) throw ValidationError("horizon must be >= 0", "horizon");
  const auto steps = static_cast<long>(std::ceil(horizon / dt_ode - 1e-9));
  std::vector<ParticleState> out{state0};
  if (steps <= 0) return out;
  const double h = horizon / static_cast<double>(steps);
  out.reserve(static_cast<std::size_t>(steps) + 1);
  for (long k = 0; k < steps; ++k) out.push_back(rk4_step(out.back(), kernel, h));
  out.back().time = state0.time + horizon;
  return out;
}

DiscreteMeasure empirical(const ParticleState& state) {
  validate(state);
  const double w = 1.0 / static_cast<double>(state.size());
  std::vector<Atom> atoms;
  atoms.reserve(state.size());
  for (const auto& x : state.positions) atoms.push_back({x, w});
  return DiscreteMeasure(state.dim, std::move(atoms));
}

namespace {

// Particle states at each requested time, integrating segment by segment.
std::vector<ParticleState> states_at(const ParticleState& state0, const InteractionKernel& kernel,
                                     const std::vector<double>& times, double dt_ode) {
  std::vector<ParticleState> out;
  ParticleState current = state0;
  double now = 0.0;
  for (double t : times) {
    if (t > now) {
      current = integrate(current, kernel, t - now, dt_ode).back();
      now = t;
    }
    out.push_back(current);
  }
  return out;
}

}  // namespace

MeanFieldReport meanfield_compare(const ParticleState& state0, const InteractionKernel& kernel,
                                  int n_param, double horizon, std::optional<double> h1) {
  validate(state0);
  const auto mu0 = empirical(state0);
  const auto traj = las_solve(mu0, PvfSpec::interaction(kernel, h1), n_param, horizon);
  MeanFieldReport report;
  for (double frac : {0.0, 0.25, 0.5, 0.75, 1.0}) report.times.push_back(frac * horizon);
  const double dt_ode = 0.1 / n_param;
  const auto states = states_at(state0, kernel, report.times, dt_ode);
  for (std::size_t k = 0; k < states.size(); ++k) {
    const double t = std::min(report.times[k], traj.final_time());
    const double gap = wasserstein(empirical(states[k]), interpolate(traj, t)).distance;
    report.gaps.push_back(gap);
    report.max_gap = std::max(report.max_gap, gap);
  }
  return report;
}

BoundCheck dobrushin_check(const ParticleState& a, const ParticleState& b,
                           const InteractionKernel& kernel, double horizon, double dt_ode) {
  if (a.size() != b.size() || a.dim != b.dim) {
    throw ValidationError("states must have equal size and dimension", "positions");
  }
  const auto ta = integrate(a, kernel, horizon, dt_ode);
  const auto tb = integrate(b, kernel, horizon, dt_ode);
  const double w0 = wasserstein(empirical(a), empirical(b)).distance;
  const double rate = 2.0 * kernel.lipschitz();
  BoundCheck check;
  check.margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < ta.size(); ++k) {
    const double w = wasserstein(empirical(ta[k]), empirical(tb[k])).distance;
    const double bound = std::exp(rate * (ta[k].time - a.time)) * w0 * (1.0 + 1e-12) + 1e-12;
    check.margin = std::min(check.margin, bound - w);
  }
  check.pass = check.margin >= 0.0;
  return check;
}

}  // namespace mdelab
