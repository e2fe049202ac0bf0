#include "mdelab/fiber_metric.hpp"

#include "mdelab/error.hpp"
#include "mdelab/simplex.hpp"

#include <cmath>
#include <map>
#include <string>

namespace mdelab {

FiberCostKind parse_fiber_cost_kind(std::string_view name) {
  if (name == "fiber") return FiberCostKind::Fiber;
  if (name == "combined") return FiberCostKind::Combined;
  if (name == "one-sided" || name == "one_sided") return FiberCostKind::OneSided;
  throw ValidationError("unknown fiber cost kind '" + std::string(name) + "'", "kind");
}

std::string_view to_string(FiberCostKind kind) {
  switch (kind) {
    case FiberCostKind::Fiber:
      return "fiber";
    case FiberCostKind::Combined:
      return "combined";
    case FiberCostKind::OneSided:
      return "one-sided";
  }
  return "fiber";
}

double fiber_integrand(FiberCostKind kind, const Point& x, const Point& v, const Point& y,
                       const Point& w) {
  switch (kind) {
    case FiberCostKind::Fiber:
      return (v - w).norm();
    case FiberCostKind::Combined:
      return (x - y).norm() + (v - w).norm();
    case FiberCostKind::OneSided: {
      const Point dx = x - y;
      const double len = dx.norm();
      if (len == 0.0) return 0.0;
      return (v - w).dot(dx) / len;
    }
  }
  return 0.0;
}

namespace {

void check_same_dim(const LiftedMeasure& V1, const LiftedMeasure& V2) {
  if (V1.dim() != V2.dim()) throw ValidationError("lifted measures differ in dimension", "dim");
}

// Index of each lifted atom's base point in base_marginal(V).
std::vector<std::size_t> base_index(const LiftedMeasure& V, const DiscreteMeasure& base) {
  std::vector<std::size_t> index(V.size());
  std::size_t b = 0;
  for (std::size_t i = 0; i < V.size(); ++i) {
    while (!exactly_equal(base[b].position, V[i].position)) ++b;
    index[i] = b;
  }
  return index;
}

}  // namespace

FiberCostResult constrained_fiber_cost(const LiftedMeasure& V1, const LiftedMeasure& V2,
                                       FiberCostKind kind) {
  check_same_dim(V1, V2);
  const std::size_t n1 = V1.size();
  const std::size_t n2 = V2.size();
  if (n1 * n2 > kMaxCouplingVariables) {
    throw ValidationError("coupling LP too large (" + std::to_string(n1 * n2) +
                              " variables); use the 1D monotone evaluator",
                          "atoms");
  }
  const auto base1 = base_marginal(V1);
  const auto base2 = base_marginal(V2);
  const Eigen::MatrixXd base_cost = distance_matrix(base1, base2);
  const auto base_plan = solve_transportation(masses_of(base1), masses_of(base2), base_cost);
  const double optimum = base_plan.cost;

  // Complementary slackness: the optimal base plans are exactly the plans
  // supported on cells of zero reduced cost under one optimal dual pair.
  const double tolerance = 1e-9 * (1.0 + base_cost.maxCoeff());
  const auto index1 = base_index(V1, base1);
  const auto index2 = base_index(V2, base2);
  auto on_optimal_face = [&](std::size_t i, std::size_t k) {
    const std::size_t a = index1[i];
    const std::size_t b = index2[k];
    const double reduced = base_cost(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) -
                           base_plan.row_potential[a] - base_plan.col_potential[b];
    return reduced <= tolerance;
  };

  LinearProgram lp;
  for (const auto& a : V1.atoms()) lp.add_row(a.mass, RowKind::Equal);
  // The last target marginal is implied by the others and total mass 1.
  for (std::size_t k = 0; k + 1 < n2; ++k) lp.add_row(V2[k].mass, RowKind::Equal);

  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t k = 0; k < n2; ++k) {
      if (!on_optimal_face(i, k)) continue;
      cells.emplace_back(i, k);
      std::vector<std::pair<int, double>> entries{{static_cast<int>(i), 1.0}};
      if (k + 1 < n2) entries.emplace_back(static_cast<int>(n1 + k), 1.0);
      lp.add_variable(
          fiber_integrand(kind, V1[i].position, V1[i].velocity, V2[k].position, V2[k].velocity),
          std::move(entries));
    }
  }
  const auto solution = solve_lp(lp);

  FiberCostResult result;
  result.base_distance = optimum;
  std::vector<double> base_terms;
  std::vector<double> fiber_terms;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const double w = solution.x[c];
    if (w <= 0.0) continue;
    const auto [i, k] = cells[c];
    result.plan.entries.push_back({i, k, w});
    base_terms.push_back(w * (V1[i].position - V2[k].position).norm());
    fiber_terms.push_back(w * (V1[i].velocity - V2[k].velocity).norm());
  }
  result.plan.base_cost = compensated_sum(base_terms);
  result.plan.fiber_cost = compensated_sum(fiber_terms);
  result.value = solution.objective;
  return result;
}

TransportPlan induced_base_plan(const LiftedPlan& plan, const LiftedMeasure& V1,
                                const LiftedMeasure& V2) {
  const auto base1 = base_marginal(V1);
  const auto base2 = base_marginal(V2);
  const auto index1 = base_index(V1, base1);
  const auto index2 = base_index(V2, base2);
  std::map<std::pair<std::size_t, std::size_t>, double> merged;
  for (const auto& e : plan.entries) merged[{index1[e.source], index2[e.target]}] += e.weight;
  TransportPlan result;
  result.rows = base1.size();
  result.cols = base2.size();
  for (const auto& [key, w] : merged) result.entries.push_back({key.first, key.second, w});
  result.cost = plan_cost(result, distance_matrix(base1, base2));
  return result;
}

WassersteinResult lifted_wasserstein(const LiftedMeasure& V1, const LiftedMeasure& V2) {
  check_same_dim(V1, V2);
  const int n = V1.dim();
  auto flatten = [n](const LiftedMeasure& V) {
    std::vector<Atom> atoms;
    atoms.reserve(V.size());
    for (const auto& a : V.atoms()) {
      Point p(2 * n);
      p << a.position, a.velocity;
      atoms.push_back({p, a.mass});
    }
    return DiscreteMeasure(2 * n, std::move(atoms));
  };
  return wasserstein(flatten(V1), flatten(V2));
}

bool wt_bound_check(const LiftedMeasure& V1, const LiftedMeasure& V2) {
  const double lifted = lifted_wasserstein(V1, V2).distance;
  const auto fiber = constrained_fiber_cost(V1, V2, FiberCostKind::Fiber);
  return lifted <= fiber.value + fiber.base_distance + 1e-8;
}

LiftedMeasure fiber_convolution(const LiftedMeasure& V1, const LiftedMeasure& V2) {
  check_same_dim(V1, V2);
  const auto base1 = base_marginal(V1);
  const auto base2 = base_marginal(V2);
  if (!approx_equal(base1, base2, 1e-10)) {
    throw ValidationError("fiber convolution needs identical base marginals", "base");
  }
  // Atoms of a lifted measure are sorted by position first, so each base
  // point owns a contiguous block.
  std::vector<LiftedAtom> out;
  std::size_t i = 0;
  std::size_t k = 0;
  for (std::size_t b = 0; b < base1.size(); ++b) {
    const Point& x = base1[b].position;
    std::size_t i_end = i;
    while (i_end < V1.size() && exactly_equal(V1[i_end].position, x)) ++i_end;
    std::size_t k_end = k;
    while (k_end < V2.size() && exactly_equal(V2[k_end].position, x)) ++k_end;
    for (std::size_t p = i; p < i_end; ++p) {
      for (std::size_t q = k; q < k_end; ++q) {
        const double weight = V1[p].mass * (V2[q].mass / base2[b].mass);
        out.push_back({x, V1[p].velocity + V2[q].velocity, weight});
      }
    }
    i = i_end;
    k = k_end;
  }
  return LiftedMeasure(V1.dim(), std::move(out));
}

LiftedMeasure scalar_action(double lambda, const LiftedMeasure& V) {
  std::vector<LiftedAtom> out;
  out.reserve(V.size());
  for (const auto& a : V.atoms()) out.push_back({a.position, lambda * a.velocity, a.mass});
  return LiftedMeasure(V.dim(), std::move(out));
}

LiftedMeasure zero_lift(const DiscreteMeasure& mu) {
  return lift_deterministic(mu, [&](const Point&) { return Point::Zero(mu.dim()); });
}

}  // namespace mdelab
