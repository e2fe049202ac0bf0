#pragma once

// Lattice approximate solutions: bin the measure to Z^n/N^2, bin the
// velocities of V[mu] to Z^n/N, move every atom by dt * v. Since
// dt * v = k / N^2, the scheme never leaves the spatial lattice and runs on
// integer coordinates.

#include "mdelab/measure.hpp"
#include "mdelab/pvf.hpp"

#include <cstdint>
#include <vector>

namespace mdelab {

struct LatticeConfig {
  int n_param = 1;
  double horizon = 1.0;

  double dt() const { return 1.0 / n_param; }
  double dv() const { return 1.0 / n_param; }
  double dx() const { return 1.0 / (static_cast<double>(n_param) * n_param); }
  /// floor(N T).
  int step_count() const;
};

/// floor(y), except that y within 1e-9 (relative) of an integer snaps to it.
std::int64_t lattice_floor(double y);

/// Bins mu into the half-open cells x_i + [0, 1/N^2)^n. Requires
/// Supp(mu) in [-N, N)^n.
LatticeMeasure ax_discretize(const DiscreteMeasure& mu, int n_param);

/// Bins velocities to v_j + [0, 1/N)^n. Positions must already be lattice
/// points and velocities must lie in [-N, N)^n.
LiftedMeasure av_discretize(const LiftedMeasure& V, int n_param);

/// One step of the scheme, plus the binned lifted measure it used.
struct LasStepResult {
  LatticeMeasure next;
  LiftedMeasure binned;
};

LasStepResult las_step_detailed(const LatticeMeasure& mu, const PvfSpec& spec);

LatticeMeasure las_step(const LatticeMeasure& mu, const PvfSpec& spec);

struct Trajectory {
  LatticeConfig config;
  PvfSpec pvf;
  std::vector<LatticeMeasure> steps;
  /// binned[l] is A^v_N(V[mu_l]); one entry per step transition.
  std::vector<LiftedMeasure> binned;
  std::vector<double> support_radius;
  double initial_radius = 0.0;  // R of the un-binned initial datum
  double h1 = 0.0;              // C used for the support bound

  double final_time() const { return (static_cast<double>(steps.size()) - 1) * config.dt(); }
  double time(std::size_t step) const { return static_cast<double>(step) * config.dt(); }
};

/// Runs floor(N T) steps from A^x_N(mu0). Checks the a priori requirement
/// e^{CT} (R + 1) <= N and, at every step, the support bound
/// radius_l <= e^{C l / N} (R + 1).
Trajectory las_solve(const DiscreteMeasure& mu0, const PvfSpec& spec, int n_param, double horizon);

/// Continues the recursion for `steps` steps from a lattice measure.
Trajectory las_run(const LatticeMeasure& start, const PvfSpec& spec, int steps,
                   double initial_radius);

/// mu^N(l dt + s) = sum m_ij delta_{x_i + s v_j}, 0 <= s < dt.
DiscreteMeasure interpolate(const Trajectory& traj, double t);

}  // namespace mdelab
