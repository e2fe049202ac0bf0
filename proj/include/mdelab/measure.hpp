#pragma once

// Atomic probability measures on R^n, on the tangent bundle TR^n, and on the
// integer lattice Z^n/N^2 used by the lattice scheme.

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <vector>

namespace mdelab {

using Point = Eigen::VectorXd;
using LatticePoint = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

// Tolerances shared by every measure type.
inline constexpr double kMassSumTolerance = 1e-12;
inline constexpr double kRenormalizeTolerance = 1e-9;

/// Strict lexicographic order on equal-length vectors.
template <typename Derived>
bool lex_less(const Eigen::MatrixBase<Derived>& a, const Eigen::MatrixBase<Derived>& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (b[i] < a[i]) return false;
  }
  return false;
}

template <typename Derived>
bool exactly_equal(const Eigen::MatrixBase<Derived>& a, const Eigen::MatrixBase<Derived>& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

/// Neumaier-compensated sum.
double compensated_sum(const std::vector<double>& values);

struct Atom {
  Point position;
  double mass = 0.0;
};

struct LiftedAtom {
  Point position;
  Point velocity;
  double mass = 0.0;
};

struct LatticeAtom {
  LatticePoint coords;
  double mass = 0.0;
};

/// Finite sum of weighted Dirac masses on R^n.
///
/// Construction merges atoms at bitwise-equal positions, sorts them
/// lexicographically and renormalizes the masses when their sum is within
/// 1e-9 of one. Anything further from one is rejected.
class DiscreteMeasure {
 public:
  DiscreteMeasure(int dim, std::vector<Atom> atoms);

  static DiscreteMeasure dirac(const Point& x);

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  const Atom& operator[](std::size_t i) const { return atoms_[i]; }

  double total_mass() const;
  /// Integral of f against the measure.
  double integrate(const std::function<double(const Point&)>& f) const;

  friend bool operator==(const DiscreteMeasure& a, const DiscreteMeasure& b);

 private:
  int dim_;
  std::vector<Atom> atoms_;
};

/// Finite atomic probability measure on TR^n. Atoms are (position, velocity)
/// pairs, merged and sorted like DiscreteMeasure atoms.
class LiftedMeasure {
 public:
  LiftedMeasure(int dim, std::vector<LiftedAtom> atoms);

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  const std::vector<LiftedAtom>& atoms() const noexcept { return atoms_; }
  const LiftedAtom& operator[](std::size_t i) const { return atoms_[i]; }

  friend bool operator==(const LiftedMeasure& a, const LiftedMeasure& b);

 private:
  int dim_;
  std::vector<LiftedAtom> atoms_;
};

/// Probability measure supported on Z^n / N^2, stored in integer lattice
/// coordinates. Position of an atom is coords / N^2.
class LatticeMeasure {
 public:
  LatticeMeasure(int n_param, int dim, std::vector<LatticeAtom> atoms);

  int n_param() const noexcept { return n_param_; }
  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  const std::vector<LatticeAtom>& atoms() const noexcept { return atoms_; }

  /// Largest admissible |coordinate|, N^3 (position N).
  std::int64_t box_limit() const noexcept;
  Point position(std::size_t i) const;
  DiscreteMeasure to_measure() const;

  friend bool operator==(const LatticeMeasure& a, const LatticeMeasure& b);

 private:
  int n_param_;
  int dim_;
  std::vector<LatticeAtom> atoms_;
};

struct CompactSupportInfo {
  double radius = 0.0;
};

/// Builds a measure from raw atoms; the dimension is taken from the first atom.
DiscreteMeasure make_measure(std::vector<Atom> atoms);

DiscreteMeasure push_forward(const DiscreteMeasure& mu,
                             const std::function<Point(const Point&)>& map);

DiscreteMeasure base_marginal(const LiftedMeasure& V);

CompactSupportInfo support_radius(const DiscreteMeasure& mu);
CompactSupportInfo support_radius(const LatticeMeasure& mu);

/// mu (x) delta_{v(x)}.
LiftedMeasure lift_deterministic(const DiscreteMeasure& mu,
                                 const std::function<Point(const Point&)>& v);

/// M equal-mass atoms at the midpoints of M equal subintervals of [a, b].
DiscreteMeasure uniform_atoms(double a, double b, int count);

/// Atom-for-atom comparison: identical positions (and velocities), masses
/// within mass_tol.
bool approx_equal(const DiscreteMeasure& a, const DiscreteMeasure& b, double mass_tol);
bool approx_equal(const LiftedMeasure& a, const LiftedMeasure& b, double mass_tol,
                  double coord_tol = 0.0);

Point make_point(std::initializer_list<double> values);

}  // namespace mdelab
