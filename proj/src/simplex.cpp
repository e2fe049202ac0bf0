#include "mdelab/simplex.hpp"

#include "mdelab/error.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mdelab {

namespace {

using Column = std::vector<std::pair<int, double>>;

class RevisedSimplex {
 public:
  RevisedSimplex(const LinearProgram& lp, const SimplexOptions& options)
      : options_(options), rows_(static_cast<int>(lp.row_count())) {
    structural_ = lp.variable_count();
    for (const auto& col : lp.columns) {
      for (const auto& [r, v] : col) {
        if (r < 0 || r >= rows_) throw ValidationError("LP column references a missing row");
        (void)v;
      }
    }
    std::vector<double> sign(static_cast<std::size_t>(rows_), 1.0);
    rhs_ = Eigen::VectorXd(rows_);
    for (int r = 0; r < rows_; ++r) {
      if (lp.rhs[static_cast<std::size_t>(r)] < 0.0) sign[static_cast<std::size_t>(r)] = -1.0;
      rhs_[r] = sign[static_cast<std::size_t>(r)] * lp.rhs[static_cast<std::size_t>(r)];
    }
    for (std::size_t j = 0; j < structural_; ++j) {
      Column col = lp.columns[j];
      for (auto& [r, v] : col) v *= sign[static_cast<std::size_t>(r)];
      columns_.push_back(std::move(col));
      cost_.push_back(lp.cost[j]);
    }

    basis_.assign(static_cast<std::size_t>(rows_), -1);
    for (int r = 0; r < rows_; ++r) {
      const double s = sign[static_cast<std::size_t>(r)];
      if (lp.kinds[static_cast<std::size_t>(r)] == RowKind::LessEqual) {
        const int slack = push_column({{r, s}}, 0.0);
        if (s > 0.0) basis_[static_cast<std::size_t>(r)] = slack;
      }
    }
    first_artificial_ = columns_.size();
    for (int r = 0; r < rows_; ++r) {
      if (basis_[static_cast<std::size_t>(r)] < 0) {
        basis_[static_cast<std::size_t>(r)] = push_column({{r, 1.0}}, 0.0);
      }
    }
    in_basis_.assign(columns_.size(), 0);
    for (int b : basis_) in_basis_[static_cast<std::size_t>(b)] = 1;
    inverse_ = Eigen::MatrixXd::Identity(rows_, rows_);
    values_ = rhs_;
    if (options_.max_iterations == 0) {
      options_.max_iterations = 50 * (static_cast<std::size_t>(rows_) + columns_.size()) + 10000;
    }
  }

  LpSolution solve() {
    if (first_artificial_ < columns_.size()) {
      std::vector<double> phase_one(columns_.size(), 0.0);
      for (std::size_t j = first_artificial_; j < columns_.size(); ++j) phase_one[j] = 1.0;
      iterate(phase_one, /*allow_artificial=*/true);
      double infeasibility = 0.0;
      for (int r = 0; r < rows_; ++r) {
        if (is_artificial(basis_[static_cast<std::size_t>(r)])) infeasibility += values_[r];
      }
      const double scale = 1.0 + rhs_.cwiseAbs().maxCoeff();
      if (infeasibility > options_.feasibility_tolerance * scale) {
        throw NumericalError("linear program is infeasible (phase one residual " +
                             std::to_string(infeasibility) + ")");
      }
      drive_out_artificials();
    }
    std::vector<double> phase_two = cost_;
    phase_two.resize(columns_.size(), 0.0);
    iterate(phase_two, /*allow_artificial=*/false);

    LpSolution solution;
    solution.x.assign(structural_, 0.0);
    for (int r = 0; r < rows_; ++r) {
      const int b = basis_[static_cast<std::size_t>(r)];
      if (static_cast<std::size_t>(b) < structural_) {
        solution.x[static_cast<std::size_t>(b)] = std::max(0.0, values_[r]);
      }
    }
    double objective = 0.0;
    for (std::size_t j = 0; j < structural_; ++j) objective += cost_[j] * solution.x[j];
    solution.objective = objective;
    solution.iterations = iterations_;
    return solution;
  }

 private:
  int push_column(Column col, double c) {
    columns_.push_back(std::move(col));
    cost_.push_back(c);
    return static_cast<int>(columns_.size()) - 1;
  }

  bool is_artificial(int j) const { return static_cast<std::size_t>(j) >= first_artificial_; }

  Eigen::VectorXd basic_direction(std::size_t j) const {
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(rows_);
    for (const auto& [r, v] : columns_[j]) alpha += v * inverse_.col(r);
    return alpha;
  }

  void refactor() {
    Eigen::MatrixXd basis_matrix = Eigen::MatrixXd::Zero(rows_, rows_);
    for (int r = 0; r < rows_; ++r) {
      for (const auto& [row, v] : columns_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])]) {
        basis_matrix(row, r) = v;
      }
    }
    inverse_ = basis_matrix.partialPivLu().inverse();
    values_ = inverse_ * rhs_;
    for (int r = 0; r < rows_; ++r) {
      if (values_[r] < 0.0 && values_[r] > -options_.feasibility_tolerance) values_[r] = 0.0;
    }
  }

  void pivot(int row, std::size_t entering, const Eigen::VectorXd& alpha) {
    const double theta = values_[row] / alpha[row];
    values_ -= theta * alpha;
    values_[row] = theta;
    for (int r = 0; r < rows_; ++r) {
      if (values_[r] < 0.0) values_[r] = 0.0;
    }
    const Eigen::RowVectorXd pivot_row = inverse_.row(row) / alpha[row];
    for (int r = 0; r < rows_; ++r) {
      if (r == row || alpha[r] == 0.0) continue;
      inverse_.row(r) -= alpha[r] * pivot_row;
    }
    inverse_.row(row) = pivot_row;
    in_basis_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(row)])] = 0;
    basis_[static_cast<std::size_t>(row)] = static_cast<int>(entering);
    in_basis_[entering] = 1;
    if (++since_refactor_ >= options_.refactor_interval) {
      refactor();
      since_refactor_ = 0;
    }
  }

  void iterate(const std::vector<double>& cost, bool allow_artificial) {
    bool bland = false;
    const double cost_scale =
        1.0 + std::abs(*std::max_element(cost.begin(), cost.end(),
                                         [](double a, double b) { return std::abs(a) < std::abs(b); }));
    const double reduced_tol = options_.optimality_tolerance * cost_scale;
    while (true) {
      if (++iterations_ > options_.max_iterations) {
        throw NumericalError("simplex iteration limit reached");
      }
      Eigen::VectorXd basic_cost(rows_);
      for (int r = 0; r < rows_; ++r) {
        basic_cost[r] = cost[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])];
      }
      const Eigen::RowVectorXd duals = basic_cost.transpose() * inverse_;

      std::size_t entering = columns_.size();
      double best = -reduced_tol;
      for (std::size_t j = 0; j < columns_.size(); ++j) {
        if (in_basis_[j]) continue;
        if (!allow_artificial && is_artificial(static_cast<int>(j))) continue;
        double reduced = cost[j];
        for (const auto& [r, v] : columns_[j]) reduced -= duals[r] * v;
        if (reduced < best) {
          entering = j;
          if (bland) break;
          best = reduced;
        }
      }
      if (entering == columns_.size()) return;

      const Eigen::VectorXd alpha = basic_direction(entering);
      int leaving = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int r = 0; r < rows_; ++r) {
        if (alpha[r] <= kPivotTolerance) continue;
        const double ratio = std::max(0.0, values_[r]) / alpha[r];
        const bool tie = leaving >= 0 && std::abs(ratio - best_ratio) <= 1e-14 * (1.0 + best_ratio);
        if (tie) {
          if (basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(leaving)]) {
            leaving = r;
          }
        } else if (ratio < best_ratio) {
          best_ratio = ratio;
          leaving = r;
        }
      }
      if (leaving < 0) throw NumericalError("linear program is unbounded");
      bland = best_ratio <= 1e-14;
      pivot(leaving, entering, alpha);
    }
  }

  void drive_out_artificials() {
    for (int r = 0; r < rows_; ++r) {
      if (!is_artificial(basis_[static_cast<std::size_t>(r)])) continue;
      const Eigen::RowVectorXd row = inverse_.row(r);
      for (std::size_t j = 0; j < first_artificial_; ++j) {
        if (in_basis_[j]) continue;
        double entry = 0.0;
        for (const auto& [i, v] : columns_[j]) entry += row[i] * v;
        if (std::abs(entry) > 1e-7) {
          pivot(r, j, basic_direction(j));
          break;
        }
      }
      // A row with no candidate is redundant; its artificial stays basic at zero.
    }
  }

  static constexpr double kPivotTolerance = 1e-9;

  SimplexOptions options_;
  int rows_;
  std::size_t structural_ = 0;
  std::size_t first_artificial_ = 0;
  std::vector<Column> columns_;
  std::vector<double> cost_;
  Eigen::VectorXd rhs_;
  std::vector<int> basis_;
  std::vector<char> in_basis_;
  Eigen::MatrixXd inverse_;
  Eigen::VectorXd values_;
  std::size_t iterations_ = 0;
  std::size_t since_refactor_ = 0;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options) {
  if (lp.cost.size() != lp.columns.size() || lp.rhs.size() != lp.kinds.size()) {
    throw ValidationError("inconsistent linear program dimensions");
  }
  if (lp.row_count() == 0) throw ValidationError("linear program has no constraints");
  RevisedSimplex simplex(lp, options);
  return simplex.solve();
}

}  // namespace mdelab
