#include "mdelab/transport.hpp"

#include "mdelab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <string>

namespace mdelab {

namespace {

struct BasicCell {
  std::size_t row;
  std::size_t col;
  double flow;
};

// Spanning-tree basis over m row nodes and n column nodes. Column node k is
// stored as m + k.
class TransportationSimplex {
 public:
  TransportationSimplex(const std::vector<double>& supply, const std::vector<double>& demand,
                        const Eigen::MatrixXd& cost)
      : m_(supply.size()),
        n_(demand.size()),
        cost_(cost),
        adjacency_(m_ + n_),
        is_basic_(m_ * n_, 0),
        potential_(m_ + n_, 0.0) {
    northwest_corner(supply, demand);
    const double scale = 1.0 + cost_.cwiseAbs().maxCoeff();
    reduced_tolerance_ = 1e-12 * scale;
  }

  TransportPlan run() {
    const std::size_t max_iterations = 50 * m_ * n_ + 1000;
    bool bland = false;
    for (std::size_t iter = 0; iter < max_iterations; ++iter) {
      compute_potentials();
      const auto entering = price(bland);
      if (!entering) return extract();
      bland = pivot(entering->first, entering->second) <= 0.0;
    }
    throw NumericalError("transportation simplex exceeded its iteration limit");
  }

 private:
  void add_basic(std::size_t row, std::size_t col, double flow) {
    const std::size_t id = cells_.size();
    cells_.push_back({row, col, flow});
    adjacency_[row].push_back(id);
    adjacency_[m_ + col].push_back(id);
    is_basic_[row * n_ + col] = 1;
  }

  // Staircase initial basis: exactly m + n - 1 cells forming a spanning tree.
  void northwest_corner(std::vector<double> supply, std::vector<double> demand) {
    std::size_t i = 0;
    std::size_t j = 0;
    while (true) {
      const double x = std::min(supply[i], demand[j]);
      add_basic(i, j, x);
      supply[i] -= x;
      demand[j] -= x;
      if (i == m_ - 1 && j == n_ - 1) break;
      if (i == m_ - 1) {
        ++j;
      } else if (j == n_ - 1) {
        ++i;
      } else if (supply[i] <= demand[j]) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  std::size_t other_end(std::size_t cell, std::size_t node) const {
    const auto& c = cells_[cell];
    return node < m_ ? m_ + c.col : c.row;
  }

  void compute_potentials() {
    std::vector<char> seen(m_ + n_, 0);
    std::vector<std::size_t> stack{0};
    potential_[0] = 0.0;
    seen[0] = 1;
    while (!stack.empty()) {
      const std::size_t node = stack.back();
      stack.pop_back();
      for (std::size_t id : adjacency_[node]) {
        const std::size_t next = other_end(id, node);
        if (seen[next]) continue;
        seen[next] = 1;
        const double c = cost_(cells_[id].row, cells_[id].col);
        potential_[next] = c - potential_[node];
        stack.push_back(next);
      }
    }
  }

  std::optional<std::pair<std::size_t, std::size_t>> price(bool bland) const {
    std::optional<std::pair<std::size_t, std::size_t>> best;
    double best_value = -reduced_tolerance_;
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        if (is_basic_[i * n_ + j]) continue;
        const double reduced = cost_(i, j) - potential_[i] - potential_[m_ + j];
        if (reduced < best_value) {
          best = {i, j};
          if (bland) return best;
          best_value = reduced;
        }
      }
    }
    return best;
  }

  // Tree path from row node `from` to column node `to`, as a list of cells.
  std::vector<std::size_t> tree_path(std::size_t from, std::size_t to) const {
    constexpr auto none = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> via(m_ + n_, none);
    std::vector<char> seen(m_ + n_, 0);
    std::queue<std::size_t> queue;
    queue.push(from);
    seen[from] = 1;
    while (!queue.empty() && !seen[to]) {
      const std::size_t node = queue.front();
      queue.pop();
      for (std::size_t id : adjacency_[node]) {
        const std::size_t next = other_end(id, node);
        if (seen[next]) continue;
        seen[next] = 1;
        via[next] = id;
        queue.push(next);
      }
    }
    std::vector<std::size_t> path;
    for (std::size_t node = to; node != from;) {
      const std::size_t id = via[node];
      path.push_back(id);
      node = other_end(id, node);
    }
    std::reverse(path.begin(), path.end());
    return path;
  }

  // Returns the step length (0 for a degenerate pivot).
  double pivot(std::size_t row, std::size_t col) {
    const auto path = tree_path(row, m_ + col);
    // path[0] touches the entering row and loses flow; signs alternate.
    double theta = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < path.size(); k += 2) theta = std::min(theta, cells_[path[k]].flow);
    std::size_t leaving = path[0];
    std::size_t leaving_index = std::numeric_limits<std::size_t>::max();
    for (std::size_t k = 0; k < path.size(); k += 2) {
      const auto& c = cells_[path[k]];
      if (c.flow - theta <= 1e-15) {
        const std::size_t index = c.row * n_ + c.col;
        if (index < leaving_index) {
          leaving_index = index;
          leaving = path[k];
        }
      }
    }
    theta = cells_[leaving].flow;
    for (std::size_t k = 0; k < path.size(); ++k) {
      auto& c = cells_[path[k]];
      c.flow = (k % 2 == 0) ? std::max(0.0, c.flow - theta) : c.flow + theta;
    }
    replace_cell(leaving, row, col, theta);
    return theta;
  }

  void replace_cell(std::size_t id, std::size_t row, std::size_t col, double flow) {
    auto& old = cells_[id];
    is_basic_[old.row * n_ + old.col] = 0;
    auto drop = [id](std::vector<std::size_t>& list) {
      list.erase(std::find(list.begin(), list.end(), id));
    };
    drop(adjacency_[old.row]);
    drop(adjacency_[m_ + old.col]);
    old = {row, col, flow};
    adjacency_[row].push_back(id);
    adjacency_[m_ + col].push_back(id);
    is_basic_[row * n_ + col] = 1;
  }

  TransportPlan extract() const {
    TransportPlan plan;
    plan.rows = m_;
    plan.cols = n_;
    for (const auto& c : cells_) {
      if (c.flow > 0.0) plan.entries.push_back({c.row, c.col, c.flow});
    }
    std::sort(plan.entries.begin(), plan.entries.end(), [](const auto& a, const auto& b) {
      return a.source != b.source ? a.source < b.source : a.target < b.target;
    });
    plan.cost = plan_cost(plan, cost_);
    plan.row_potential.assign(potential_.begin(), potential_.begin() + static_cast<std::ptrdiff_t>(m_));
    plan.col_potential.assign(potential_.begin() + static_cast<std::ptrdiff_t>(m_), potential_.end());
    return plan;
  }

  std::size_t m_;
  std::size_t n_;
  const Eigen::MatrixXd& cost_;
  std::vector<BasicCell> cells_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<char> is_basic_;
  std::vector<double> potential_;
  double reduced_tolerance_ = 0.0;
};

void check_same_dim(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.dim() != nu.dim()) {
    throw ValidationError("dimension mismatch: " + std::to_string(mu.dim()) + " vs " +
                              std::to_string(nu.dim()),
                          "dim");
  }
}

}  // namespace

std::vector<double> masses_of(const DiscreteMeasure& mu) {
  std::vector<double> m;
  m.reserve(mu.size());
  for (const auto& a : mu.atoms()) m.push_back(a.mass);
  return m;
}

double plan_cost(const TransportPlan& plan, const Eigen::MatrixXd& cost) {
  std::vector<double> terms;
  terms.reserve(plan.entries.size());
  for (const auto& e : plan.entries) {
    terms.push_back(e.weight * cost(static_cast<Eigen::Index>(e.source),
                                    static_cast<Eigen::Index>(e.target)));
  }
  return compensated_sum(terms);
}

TransportPlan solve_transportation(const std::vector<double>& supply,
                                   const std::vector<double>& demand,
                                   const Eigen::MatrixXd& cost) {
  if (supply.empty() || demand.empty()) {
    throw ValidationError("transportation problem needs nonempty marginals");
  }
  if (cost.rows() != static_cast<Eigen::Index>(supply.size()) ||
      cost.cols() != static_cast<Eigen::Index>(demand.size())) {
    throw ValidationError("cost matrix shape does not match marginals");
  }
  TransportationSimplex simplex(supply, demand, cost);
  return simplex.run();
}

Eigen::MatrixXd distance_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  Eigen::MatrixXd d(static_cast<Eigen::Index>(mu.size()), static_cast<Eigen::Index>(nu.size()));
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t k = 0; k < nu.size(); ++k) {
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          (mu[i].position - nu[k].position).norm();
    }
  }
  return d;
}

TransportPlan monotone_plan_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.dim() != 1 || nu.dim() != 1) throw ValidationError("monotone plan needs dim = 1", "dim");
  TransportPlan plan;
  plan.rows = mu.size();
  plan.cols = nu.size();
  std::size_t i = 0;
  std::size_t k = 0;
  double left = mu[0].mass;
  double right = nu[0].mass;
  std::vector<double> terms;
  while (i < mu.size() && k < nu.size()) {
    if (left <= right) {
      if (left > 0.0) plan.entries.push_back({i, k, left});
      right -= left;
      if (++i < mu.size()) left = mu[i].mass;
    } else {
      if (right > 0.0) plan.entries.push_back({i, k, right});
      left -= right;
      if (++k < nu.size()) right = nu[k].mass;
    }
  }
  for (const auto& e : plan.entries) {
    terms.push_back(e.weight * std::abs(mu[e.source].position[0] - nu[e.target].position[0]));
  }
  plan.cost = compensated_sum(terms);
  return plan;
}

WassersteinResult wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  check_same_dim(mu, nu);
  if (mu.dim() == 1) {
    auto plan = monotone_plan_1d(mu, nu);
    const double d = plan.cost;
    return {d, std::move(plan)};
  }
  return wasserstein_lp(mu, nu);
}

WassersteinResult wasserstein_lp(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  check_same_dim(mu, nu);
  const Eigen::MatrixXd cost = distance_matrix(mu, nu);
  auto plan = solve_transportation(masses_of(mu), masses_of(nu), cost);
  const double d = plan.cost;
  return {d, std::move(plan)};
}

double kr_dual_gap(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                   const std::vector<Witness>& witnesses) {
  check_same_dim(mu, nu);
  std::vector<Point> points;
  for (const auto& a : mu.atoms()) points.push_back(a.position);
  for (const auto& a : nu.atoms()) points.push_back(a.position);

  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t w = 0; w < witnesses.size(); ++w) {
    const auto& f = witnesses[w];
    std::vector<double> values;
    values.reserve(points.size());
    for (const auto& p : points) values.push_back(f(p));
    for (std::size_t a = 0; a < points.size(); ++a) {
      for (std::size_t b = a + 1; b < points.size(); ++b) {
        const double d = (points[a] - points[b]).norm();
        if (std::abs(values[a] - values[b]) > d * (1.0 + 1e-12) + 1e-12) {
          throw ValidationError("witness " + std::to_string(w) + " is not 1-Lipschitz on the atoms",
                                "witness");
        }
      }
    }
    std::vector<double> terms;
    for (std::size_t i = 0; i < mu.size(); ++i) terms.push_back(mu[i].mass * values[i]);
    for (std::size_t k = 0; k < nu.size(); ++k) terms.push_back(-nu[k].mass * values[mu.size() + k]);
    // -f is a witness whenever f is
    best = std::max(best, std::abs(compensated_sum(terms)));
  }
  const double distance = wasserstein(mu, nu).distance;
  if (witnesses.empty()) return distance;
  return distance - best;
}

void check_marginals(const TransportPlan& plan, const std::vector<double>& supply,
                     const std::vector<double>& demand, double tol) {
  if (plan.rows != supply.size() || plan.cols != demand.size()) {
    throw ValidationError("plan shape does not match the measures", "plan");
  }
  std::vector<double> rows(supply.size(), 0.0);
  std::vector<double> cols(demand.size(), 0.0);
  for (const auto& e : plan.entries) {
    if (e.source >= rows.size() || e.target >= cols.size()) {
      throw ValidationError("plan entry index out of range", "plan");
    }
    if (!(e.weight > 0.0)) throw ValidationError("plan weights must be positive", "plan");
    rows[e.source] += e.weight;
    cols[e.target] += e.weight;
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (std::abs(rows[i] - supply[i]) > tol) {
      throw ValidationError("plan row " + std::to_string(i) + " does not match source mass",
                            "plan");
    }
  }
  for (std::size_t k = 0; k < cols.size(); ++k) {
    if (std::abs(cols[k] - demand[k]) > tol) {
      throw ValidationError("plan column " + std::to_string(k) + " does not match target mass",
                            "plan");
    }
  }
}

bool plan_is_optimal(const TransportPlan& plan, const DiscreteMeasure& mu,
                     const DiscreteMeasure& nu) {
  check_same_dim(mu, nu);
  check_marginals(plan, masses_of(mu), masses_of(nu));
  const double cost = plan_cost(plan, distance_matrix(mu, nu));
  const double optimum = wasserstein(mu, nu).distance;
  return cost <= optimum + 1e-7 * (1.0 + optimum);
}

}  // namespace mdelab
