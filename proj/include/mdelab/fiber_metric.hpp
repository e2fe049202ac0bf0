#pragma once

// Constrained fiber costs between lifted measures and the fiber monoid
// operations (convolution and scalar action on velocities).

#include "mdelab/measure.hpp"
#include "mdelab/transport.hpp"

#include <string_view>
#include <vector>

namespace mdelab {

enum class FiberCostKind {
  Fiber,     // |v - w|
  Combined,  // |x - y| + |v - w|
  OneSided,  // <v - w, x - y> / |x - y|, and 0 when x == y
};

FiberCostKind parse_fiber_cost_kind(std::string_view name);
std::string_view to_string(FiberCostKind kind);

/// Integrand of the selected cost for atoms (x, v) and (y, w).
double fiber_integrand(FiberCostKind kind, const Point& x, const Point& v, const Point& y,
                       const Point& w);

struct LiftedPlanEntry {
  std::size_t source = 0;  // index into V1 atoms
  std::size_t target = 0;  // index into V2 atoms
  double weight = 0.0;
};

struct LiftedPlan {
  std::vector<LiftedPlanEntry> entries;
  double base_cost = 0.0;
  double fiber_cost = 0.0;
};

struct FiberCostResult {
  double value = 0.0;
  /// W between the base marginals (the stage-one optimum).
  double base_distance = 0.0;
  LiftedPlan plan;
};

/// Largest number of coupling variables the stage-two LP accepts.
inline constexpr std::size_t kMaxCouplingVariables = 250000;

/// Two-stage solve. Stage one solves the base transportation problem and
/// keeps its optimal duals; stage two minimizes the selected cost over
/// couplings of V1 and V2 supported on base cells of zero reduced cost
/// (tolerance 1e-9 relative), which is the set of optimal base plans.
FiberCostResult constrained_fiber_cost(const LiftedMeasure& V1, const LiftedMeasure& V2,
                                       FiberCostKind kind);

/// pi_13 # T as a coupling between the two base marginals.
TransportPlan induced_base_plan(const LiftedPlan& plan, const LiftedMeasure& V1,
                                const LiftedMeasure& V2);

/// W on TR^n, atoms viewed as points (x, v) of R^{2n} with the Euclidean norm.
WassersteinResult lifted_wasserstein(const LiftedMeasure& V1, const LiftedMeasure& V2);

/// W^{TR^n}(V1, V2) <= W_fiber(V1, V2) + W(base1, base2), within 1e-8.
bool wt_bound_check(const LiftedMeasure& V1, const LiftedMeasure& V2);

/// Per base point, convolution of the conditional velocity distributions.
/// Requires identical base marginals.
LiftedMeasure fiber_convolution(const LiftedMeasure& V1, const LiftedMeasure& V2);

/// Scales every velocity by lambda.
LiftedMeasure scalar_action(double lambda, const LiftedMeasure& V);

/// mu (x) delta_0.
LiftedMeasure zero_lift(const DiscreteMeasure& mu);

}  // namespace mdelab
