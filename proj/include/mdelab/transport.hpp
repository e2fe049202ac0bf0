#pragma once

// Exact discrete optimal transport with Euclidean distance cost.

#include "mdelab/measure.hpp"

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace mdelab {

inline constexpr double kMarginalTolerance = 1e-10;

struct PlanEntry {
  std::size_t source = 0;
  std::size_t target = 0;
  double weight = 0.0;
};

/// Sparse coupling between two atomic measures. Only strictly positive
/// weights are stored.
struct TransportPlan {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<PlanEntry> entries;
  double cost = 0.0;
  /// Optimal duals u, v (cost_ij - u_i - v_j >= 0, with equality on the
  /// plan's support). Filled by solve_transportation only.
  std::vector<double> row_potential;
  std::vector<double> col_potential;
};

struct WassersteinResult {
  double distance = 0.0;
  TransportPlan plan;
};

/// Solves min <cost, plan> over couplings of `supply` and `demand` with the
/// transportation simplex (spanning-tree bases, u/v potentials). Dantzig
/// pricing; Bland's rule while pivots are degenerate. The returned plan is a
/// basic solution, so it has at most rows + cols - 1 entries.
TransportPlan solve_transportation(const std::vector<double>& supply,
                                   const std::vector<double>& demand,
                                   const Eigen::MatrixXd& cost);

/// Pairwise Euclidean distances between atom positions.
Eigen::MatrixXd distance_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// Monotone (sorted quantile) coupling of two 1D measures.
TransportPlan monotone_plan_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// W(mu, nu): 1D inputs take the monotone fast path, everything else the
/// transportation simplex.
WassersteinResult wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// Always uses the transportation simplex, regardless of dimension.
WassersteinResult wasserstein_lp(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

using Witness = std::function<double(const Point&)>;

/// W(mu, nu) minus the best lower bound |int f d(mu - nu)| over the given
/// witnesses (f and -f). Each witness must be 1-Lipschitz on the union of the atoms.
double kr_dual_gap(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                   const std::vector<Witness>& witnesses);

/// Throws ValidationError unless plan's marginals are mu and nu.
void check_marginals(const TransportPlan& plan, const std::vector<double>& supply,
                     const std::vector<double>& demand, double tol = kMarginalTolerance);

bool plan_is_optimal(const TransportPlan& plan, const DiscreteMeasure& mu,
                     const DiscreteMeasure& nu);

/// Recomputes sum weight * cost(i, k).
double plan_cost(const TransportPlan& plan, const Eigen::MatrixXd& cost);

std::vector<double> masses_of(const DiscreteMeasure& mu);

}  // namespace mdelab
