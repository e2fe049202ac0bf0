#include "mdelab/measure.hpp"

#include "mdelab/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mdelab {

double compensated_sum(const std::vector<double>& values) {
  double sum = 0.0;
  double carry = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  return sum + carry;
}

namespace {

void check_mass(double mass) {
  if (!std::isfinite(mass) || mass <= 0.0) {
    throw ValidationError("atom mass must be finite and > 0, got " + std::to_string(mass),
                          "mass");
  }
}

void check_vector(const Point& p, int dim, const char* field) {
  if (p.size() != dim) {
    throw ValidationError(std::string(field) + " has length " + std::to_string(p.size()) +
                              ", expected " + std::to_string(dim),
                          field);
  }
  if (!p.allFinite()) throw ValidationError(std::string(field) + " is not finite", field);
}

// Sorts with `less`, merges runs that are `equal`, and rescales the merged
// masses to sum to one (or throws if they are too far off).
template <typename AtomT, typename Less, typename Equal>
std::vector<AtomT> canonicalize(std::vector<AtomT> atoms, Less less, Equal equal) {
  if (atoms.empty()) throw ValidationError("measure has no atoms", "atoms");
  std::stable_sort(atoms.begin(), atoms.end(), less);
  std::vector<AtomT> merged;
  merged.reserve(atoms.size());
  for (auto& a : atoms) {
    if (!merged.empty() && equal(merged.back(), a)) {
      merged.back().mass += a.mass;
    } else {
      merged.push_back(std::move(a));
    }
  }
  std::vector<double> masses;
  masses.reserve(merged.size());
  for (const auto& a : merged) masses.push_back(a.mass);
  const double total = compensated_sum(masses);
  if (std::abs(total - 1.0) > kRenormalizeTolerance) {
    throw ValidationError("masses sum to " + std::to_string(total) + ", expected 1", "mass");
  }
  if (total != 1.0) {
    for (auto& a : merged) a.mass /= total;
  }
  return merged;
}

}  // namespace

// ---------------------------------------------------------------------------
// DiscreteMeasure

DiscreteMeasure::DiscreteMeasure(int dim, std::vector<Atom> atoms) : dim_(dim) {
  if (dim < 1) throw ValidationError("dimension must be >= 1", "dim");
  for (const auto& a : atoms) {
    check_vector(a.position, dim, "position");
    check_mass(a.mass);
  }
  atoms_ = canonicalize(
      std::move(atoms),
      [](const Atom& a, const Atom& b) { return lex_less(a.position, b.position); },
      [](const Atom& a, const Atom& b) { return exactly_equal(a.position, b.position); });
}

DiscreteMeasure DiscreteMeasure::dirac(const Point& x) {
  return DiscreteMeasure(static_cast<int>(x.size()), {{x, 1.0}});
}

double DiscreteMeasure::total_mass() const {
  std::vector<double> masses;
  masses.reserve(atoms_.size());
  for (const auto& a : atoms_) masses.push_back(a.mass);
  return compensated_sum(masses);
}

double DiscreteMeasure::integrate(const std::function<double(const Point&)>& f) const {
  std::vector<double> terms;
  terms.reserve(atoms_.size());
  for (const auto& a : atoms_) terms.push_back(a.mass * f(a.position));
  return compensated_sum(terms);
}

bool operator==(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  if (a.dim_ != b.dim_ || a.atoms_.size() != b.atoms_.size()) return false;
  for (std::size_t i = 0; i < a.atoms_.size(); ++i) {
    if (!exactly_equal(a.atoms_[i].position, b.atoms_[i].position)) return false;
    if (a.atoms_[i].mass != b.atoms_[i].mass) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// LiftedMeasure

namespace {

bool lifted_less(const LiftedAtom& a, const LiftedAtom& b) {
  if (lex_less(a.position, b.position)) return true;
  if (lex_less(b.position, a.position)) return false;
  return lex_less(a.velocity, b.velocity);
}

bool lifted_equal(const LiftedAtom& a, const LiftedAtom& b) {
  return exactly_equal(a.position, b.position) && exactly_equal(a.velocity, b.velocity);
}

}  // namespace

LiftedMeasure::LiftedMeasure(int dim, std::vector<LiftedAtom> atoms) : dim_(dim) {
  if (dim < 1) throw ValidationError("dimension must be >= 1", "dim");
  for (const auto& a : atoms) {
    check_vector(a.position, dim, "position");
    check_vector(a.velocity, dim, "velocity");
    check_mass(a.mass);
  }
  atoms_ = canonicalize(std::move(atoms), lifted_less, lifted_equal);
}

bool operator==(const LiftedMeasure& a, const LiftedMeasure& b) {
  if (a.dim_ != b.dim_ || a.atoms_.size() != b.atoms_.size()) return false;
  for (std::size_t i = 0; i < a.atoms_.size(); ++i) {
    if (!lifted_equal(a.atoms_[i], b.atoms_[i])) return false;
    if (a.atoms_[i].mass != b.atoms_[i].mass) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// LatticeMeasure

LatticeMeasure::LatticeMeasure(int n_param, int dim, std::vector<LatticeAtom> atoms)
    : n_param_(n_param), dim_(dim) {
  if (n_param < 1) throw ValidationError("lattice parameter N must be >= 1", "n");
  if (dim < 1) throw ValidationError("dimension must be >= 1", "dim");
  const std::int64_t limit = box_limit();
  for (const auto& a : atoms) {
    if (a.coords.size() != dim) throw ValidationError("lattice coords length mismatch", "coords");
    if ((a.coords.array().abs() > limit).any()) {
      throw NumericalError("lattice atom outside the box [-N, N]^n (N = " +
                           std::to_string(n_param) + ")");
    }
    check_mass(a.mass);
  }
  atoms_ = canonicalize(
      std::move(atoms),
      [](const LatticeAtom& a, const LatticeAtom& b) { return lex_less(a.coords, b.coords); },
      [](const LatticeAtom& a, const LatticeAtom& b) {
        return exactly_equal(a.coords, b.coords);
      });
}

std::int64_t LatticeMeasure::box_limit() const noexcept {
  const auto n = static_cast<std::int64_t>(n_param_);
  return n * n * n;
}

Point LatticeMeasure::position(std::size_t i) const {
  const double scale = static_cast<double>(n_param_) * static_cast<double>(n_param_);
  return atoms_[i].coords.cast<double>() / scale;
}

DiscreteMeasure LatticeMeasure::to_measure() const {
  std::vector<Atom> atoms;
  atoms.reserve(atoms_.size());
  for (std::size_t i = 0; i < atoms_.size(); ++i) atoms.push_back({position(i), atoms_[i].mass});
  return DiscreteMeasure(dim_, std::move(atoms));
}

bool operator==(const LatticeMeasure& a, const LatticeMeasure& b) {
  if (a.n_param_ != b.n_param_ || a.dim_ != b.dim_ || a.atoms_.size() != b.atoms_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.atoms_.size(); ++i) {
    if (!exactly_equal(a.atoms_[i].coords, b.atoms_[i].coords)) return false;
    if (a.atoms_[i].mass != b.atoms_[i].mass) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Free functions

DiscreteMeasure make_measure(std::vector<Atom> atoms) {
  if (atoms.empty()) throw ValidationError("measure has no atoms", "atoms");
  const int dim = static_cast<int>(atoms.front().position.size());
  return DiscreteMeasure(dim, std::move(atoms));
}

DiscreteMeasure push_forward(const DiscreteMeasure& mu,
                             const std::function<Point(const Point&)>& map) {
  std::vector<Atom> moved;
  moved.reserve(mu.size());
  for (const auto& a : mu.atoms()) moved.push_back({map(a.position), a.mass});
  return DiscreteMeasure(mu.dim(), std::move(moved));
}

DiscreteMeasure base_marginal(const LiftedMeasure& V) {
  std::vector<Atom> atoms;
  atoms.reserve(V.size());
  for (const auto& a : V.atoms()) atoms.push_back({a.position, a.mass});
  return DiscreteMeasure(V.dim(), std::move(atoms));
}

CompactSupportInfo support_radius(const DiscreteMeasure& mu) {
  double r = 0.0;
  for (const auto& a : mu.atoms()) r = std::max(r, a.position.norm());
  return {r};
}

CompactSupportInfo support_radius(const LatticeMeasure& mu) {
  double r = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) r = std::max(r, mu.position(i).norm());
  return {r};
}

LiftedMeasure lift_deterministic(const DiscreteMeasure& mu,
                                 const std::function<Point(const Point&)>& v) {
  std::vector<LiftedAtom> atoms;
  atoms.reserve(mu.size());
  for (const auto& a : mu.atoms()) atoms.push_back({a.position, v(a.position), a.mass});
  return LiftedMeasure(mu.dim(), std::move(atoms));
}

DiscreteMeasure uniform_atoms(double a, double b, int count) {
  if (count < 1) throw ValidationError("uniform generator needs at least one atom", "atoms");
  if (!(b > a)) throw ValidationError("uniform generator needs a < b", "b");
  std::vector<Atom> atoms;
  atoms.reserve(static_cast<std::size_t>(count));
  const double width = (b - a) / count;
  for (int k = 0; k < count; ++k) {
    Point x(1);
    x[0] = a + (k + 0.5) * width;
    atoms.push_back({x, 1.0 / count});
  }
  return DiscreteMeasure(1, std::move(atoms));
}

bool approx_equal(const DiscreteMeasure& a, const DiscreteMeasure& b, double mass_tol) {
  if (a.dim() != b.dim() || a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!exactly_equal(a[i].position, b[i].position)) return false;
    if (std::abs(a[i].mass - b[i].mass) > mass_tol) return false;
  }
  return true;
}

bool approx_equal(const LiftedMeasure& a, const LiftedMeasure& b, double mass_tol,
                  double coord_tol) {
  if (a.dim() != b.dim() || a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i].position - b[i].position).cwiseAbs().maxCoeff() > coord_tol) return false;
    if ((a[i].velocity - b[i].velocity).cwiseAbs().maxCoeff() > coord_tol) return false;
    if (std::abs(a[i].mass - b[i].mass) > mass_tol) return false;
  }
  return true;
}

Point make_point(std::initializer_list<double> values) {
  Point p(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) p[i++] = v;
  return p;
}

}  // namespace mdelab
