#pragma once

// Named velocity fields v: R^n -> R^n and interaction kernels phi: R^n -> R^n.
// Both are plain values so configurations stay reproducible.

#include "mdelab/measure.hpp"

#include <limits>
#include <string>
#include <vector>

namespace mdelab {

/// One primitive term of a velocity field. All non-constant terms act
/// componentwise.
struct FieldTerm {
  enum class Kind {
    Constant,    // offset
    Linear,      // scale * x + offset
    SgnSqrt,     // -scale * sgn(x) sqrt|x|
    Sinusoidal,  // scale * sin(frequency * x + phase)
    Polynomial,  // sum_k coefficients[k] x^k
  };
  Kind kind = Kind::Constant;
  double scale = 1.0;
  Point offset;  // empty means zero
  double frequency = 1.0;
  double phase = 0.0;
  std::vector<double> coefficients;
};

/// Sum of primitive terms, so v1 + v2 and lambda v stay inside the catalog.
class VelocityField {
 public:
  VelocityField() = default;
  explicit VelocityField(std::vector<FieldTerm> terms) : terms_(std::move(terms)) {}

  static VelocityField zero();
  static VelocityField constant(const Point& c);
  static VelocityField linear(double a, const Point& b = Point());
  static VelocityField sgn_sqrt(double scale = 1.0);
  static VelocityField sinusoidal(double amplitude, double frequency, double phase = 0.0);
  static VelocityField polynomial(std::vector<double> coefficients);

  Point operator()(const Point& x) const;

  /// Smallest C (known in closed form) with |v(x)| <= C (1 + |x|) in
  /// dimension `dim`; +inf for superlinear polynomials.
  double growth_constant(int dim) const;

  /// Global Lipschitz constant where one exists in closed form, +inf otherwise.
  double lipschitz_constant() const;

  const std::vector<FieldTerm>& terms() const noexcept { return terms_; }

  friend VelocityField operator+(const VelocityField& a, const VelocityField& b);
  friend VelocityField operator*(double lambda, const VelocityField& v);

 private:
  std::vector<FieldTerm> terms_;
};

/// Pairwise interaction kernel phi with its declared constants.
struct InteractionKernel {
  enum class Kind {
    Zero,               // phi = 0
    Linear,             // phi(z) = -alpha z, unbounded
    BoundedAttraction,  // phi(z) = -alpha z / (1 + |z|^2)
    BumpAlignment,      // phi(z) = alpha z b(|z| / radius), b a smooth bump on [0, 1)
  };
  Kind kind = Kind::Zero;
  double alpha = 1.0;
  double radius = 1.0;

  static InteractionKernel zero() { return {}; }
  static InteractionKernel linear(double alpha) { return {Kind::Linear, alpha, 1.0}; }
  static InteractionKernel bounded_attraction(double alpha) {
    return {Kind::BoundedAttraction, alpha, 1.0};
  }
  static InteractionKernel bump_alignment(double alpha, double radius) {
    return {Kind::BumpAlignment, alpha, radius};
  }

  Point operator()(const Point& z) const;

  /// sup |phi|; +inf for the linear kernel.
  double bound() const;
  /// Global Lipschitz constant of phi.
  double lipschitz() const;
  std::string name() const;
};

/// exp(1 - 1/(1 - s^2)) on [0, 1), 0 beyond.
double bump_profile(double s);

}  // namespace mdelab
