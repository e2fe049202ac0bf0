#pragma once

// First-order interacting particle systems x_i' = (1/m) sum_j phi(x_j - x_i)
// and their comparison with the LAS of the interaction field.

#include "mdelab/analysis.hpp"
#include "mdelab/fields.hpp"
#include "mdelab/measure.hpp"

#include <optional>
#include <vector>

namespace mdelab {

struct ParticleState {
  int dim = 1;
  std::vector<Point> positions;
  double time = 0.0;

  std::size_t size() const noexcept { return positions.size(); }
};

/// Validates dimensions and finiteness. Throws ValidationError.
void validate(const ParticleState& state);

/// Velocities (1/m) sum_j phi(x_j - x_i), self term included. The sum runs
/// over particles in lexicographic position order so relabeling the state
/// permutes the result bit for bit.
std::vector<Point> particle_velocities(const ParticleState& state, const InteractionKernel& kernel);

/// Classical RK4 from state0.time to state0.time + horizon with steps of at
/// most dt_ode. Returns every intermediate state, the initial one first.
std::vector<ParticleState> integrate(const ParticleState& state0, const InteractionKernel& kernel,
                                     double horizon, double dt_ode);

/// (1/m) sum delta_{x_i}, coincident particles merged.
DiscreteMeasure empirical(const ParticleState& state);

struct MeanFieldReport {
  std::vector<double> times;
  std::vector<double> gaps;
  double max_gap = 0.0;
};

/// W(empirical(t), LAS(t)) at t in {0, T/4, T/2, 3T/4, T}. The reference
/// ODE uses steps of dt/10. `h1` overrides the kernel's growth constant.
MeanFieldReport meanfield_compare(const ParticleState& state0, const InteractionKernel& kernel,
                                  int n_param, double horizon,
                                  std::optional<double> h1 = std::nullopt);

/// W(emp1(t), emp2(t)) <= e^{2 L t} W(emp1(0), emp2(0)) along both
/// trajectories, L the kernel's Lipschitz constant.
BoundCheck dobrushin_check(const ParticleState& a, const ParticleState& b,
                           const InteractionKernel& kernel, double horizon, double dt_ode);

}  // namespace mdelab
