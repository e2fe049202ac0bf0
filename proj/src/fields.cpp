#include "mdelab/fields.hpp"

#include "mdelab/error.hpp"

#include <algorithm>
#include <cmath>

namespace mdelab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

Point offset_or_zero(const FieldTerm& t, Eigen::Index n) {
  if (t.offset.size() == 0) return Point::Zero(n);
  if (t.offset.size() != n) throw ValidationError("field offset length mismatch", "field");
  return t.offset;
}

Point evaluate_term(const FieldTerm& t, const Point& x) {
  const Eigen::Index n = x.size();
  switch (t.kind) {
    case FieldTerm::Kind::Constant:
      return offset_or_zero(t, n);
    case FieldTerm::Kind::Linear:
      return t.scale * x + offset_or_zero(t, n);
    case FieldTerm::Kind::SgnSqrt:
      return x.unaryExpr([&](double c) { return -t.scale * sgn(c) * std::sqrt(std::abs(c)); });
    case FieldTerm::Kind::Sinusoidal:
      return x.unaryExpr([&](double c) { return t.scale * std::sin(t.frequency * c + t.phase); });
    case FieldTerm::Kind::Polynomial:
      return x.unaryExpr([&](double c) {
        double acc = 0.0;
        for (auto it = t.coefficients.rbegin(); it != t.coefficients.rend(); ++it) {
          acc = acc * c + *it;
        }
        return acc;
      });
  }
  return Point::Zero(n);
}

double offset_norm(const FieldTerm& t) { return t.offset.size() == 0 ? 0.0 : t.offset.norm(); }

}  // namespace

VelocityField VelocityField::zero() { return VelocityField(std::vector<FieldTerm>{}); }

VelocityField VelocityField::constant(const Point& c) {
  FieldTerm t;
  t.kind = FieldTerm::Kind::Constant;
  t.offset = c;
  return VelocityField({t});
}

VelocityField VelocityField::linear(double a, const Point& b) {
  FieldTerm t;
  t.kind = FieldTerm::Kind::Linear;
  t.scale = a;
  t.offset = b;
  return VelocityField({t});
}

VelocityField VelocityField::sgn_sqrt(double scale) {
  FieldTerm t;
  t.kind = FieldTerm::Kind::SgnSqrt;
  t.scale = scale;
  return VelocityField({t});
}

VelocityField VelocityField::sinusoidal(double amplitude, double frequency, double phase) {
  FieldTerm t;
  t.kind = FieldTerm::Kind::Sinusoidal;
  t.scale = amplitude;
  t.frequency = frequency;
  t.phase = phase;
  return VelocityField({t});
}

VelocityField VelocityField::polynomial(std::vector<double> coefficients) {
  FieldTerm t;
  t.kind = FieldTerm::Kind::Polynomial;
  t.coefficients = std::move(coefficients);
  return VelocityField({t});
}

Point VelocityField::operator()(const Point& x) const {
  Point v = Point::Zero(x.size());
  for (const auto& t : terms_) v += evaluate_term(t, x);
  return v;
}

double VelocityField::growth_constant(int dim) const {
  const double root_n = std::sqrt(static_cast<double>(dim));
  double c = 0.0;
  for (const auto& t : terms_) {
    switch (t.kind) {
      case FieldTerm::Kind::Constant:
        c += offset_norm(t);
        break;
      case FieldTerm::Kind::Linear:
        c += std::max(std::abs(t.scale), offset_norm(t));
        break;
      case FieldTerm::Kind::SgnSqrt:
        // sqrt|x_i| <= 1 + |x_i| componentwise.
        c += std::abs(t.scale) * root_n;
        break;
      case FieldTerm::Kind::Sinusoidal:
        c += std::abs(t.scale) * root_n;
        break;
      case FieldTerm::Kind::Polynomial: {
        std::size_t length = t.coefficients.size();
        while (length > 0 && t.coefficients[length - 1] == 0.0) --length;
        if (length > 2) return kInf;
        const double c0 = length > 0 ? std::abs(t.coefficients[0]) : 0.0;
        const double c1 = length > 1 ? std::abs(t.coefficients[1]) : 0.0;
        c += std::max(c0 * root_n, c1);
        break;
      }
    }
  }
  return c;
}

double VelocityField::lipschitz_constant() const {
  double l = 0.0;
  for (const auto& t : terms_) {
    switch (t.kind) {
      case FieldTerm::Kind::Constant:
        break;
      case FieldTerm::Kind::Linear:
        l += std::abs(t.scale);
        break;
      case FieldTerm::Kind::SgnSqrt:
        if (t.scale != 0.0) return kInf;
        break;
      case FieldTerm::Kind::Sinusoidal:
        l += std::abs(t.scale * t.frequency);
        break;
      case FieldTerm::Kind::Polynomial: {
        std::size_t length = t.coefficients.size();
        while (length > 0 && t.coefficients[length - 1] == 0.0) --length;
        if (length > 2) return kInf;
        if (length == 2) l += std::abs(t.coefficients[1]);
        break;
      }
    }
  }
  return l;
}

VelocityField operator+(const VelocityField& a, const VelocityField& b) {
  std::vector<FieldTerm> terms = a.terms_;
  terms.insert(terms.end(), b.terms_.begin(), b.terms_.end());
  return VelocityField(std::move(terms));
}

VelocityField operator*(double lambda, const VelocityField& v) {
  std::vector<FieldTerm> terms = v.terms_;
  for (auto& t : terms) {
    switch (t.kind) {
      case FieldTerm::Kind::Constant:
        if (t.offset.size() > 0) t.offset *= lambda;
        break;
      case FieldTerm::Kind::Linear:
        t.scale *= lambda;
        if (t.offset.size() > 0) t.offset *= lambda;
        break;
      case FieldTerm::Kind::SgnSqrt:
      case FieldTerm::Kind::Sinusoidal:
        t.scale *= lambda;
        break;
      case FieldTerm::Kind::Polynomial:
        for (double& c : t.coefficients) c *= lambda;
        break;
    }
  }
  return VelocityField(std::move(terms));
}

// ---------------------------------------------------------------------------

double bump_profile(double s) {
  if (s >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

namespace {

// sup over s in [0,1) of s b(s) and of |d/ds (s b(s))|, by dense sampling.
struct BumpConstants {
  double peak = 0.0;
  double slope = 0.0;
};

const BumpConstants& bump_constants() {
  static const BumpConstants constants = [] {
    BumpConstants c;
    constexpr int samples = 200000;
    double previous = 0.0;
    for (int k = 1; k <= samples; ++k) {
      const double s = static_cast<double>(k) / samples;
      const double value = s * bump_profile(s);
      c.peak = std::max(c.peak, value);
      c.slope = std::max(c.slope, std::abs(value - previous) * samples);
      previous = value;
    }
    return c;
  }();
  return constants;
}

}  // namespace

Point InteractionKernel::operator()(const Point& z) const {
  switch (kind) {
    case Kind::Zero:
      return Point::Zero(z.size());
    case Kind::Linear:
      return -alpha * z;
    case Kind::BoundedAttraction:
      return -alpha * z / (1.0 + z.squaredNorm());
    case Kind::BumpAlignment:
      return alpha * z * bump_profile(z.norm() / radius);
  }
  return Point::Zero(z.size());
}

double InteractionKernel::bound() const {
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::Linear:
      return alpha == 0.0 ? 0.0 : kInf;
    case Kind::BoundedAttraction:
      return 0.5 * std::abs(alpha);
    case Kind::BumpAlignment:
      return std::abs(alpha) * radius * bump_constants().peak;
  }
  return kInf;
}

double InteractionKernel::lipschitz() const {
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::Linear:
    case Kind::BoundedAttraction:
      return std::abs(alpha);
    case Kind::BumpAlignment:
      return std::abs(alpha) * bump_constants().slope;
  }
  return kInf;
}

std::string InteractionKernel::name() const {
  switch (kind) {
    case Kind::Zero:
      return "zero";
    case Kind::Linear:
      return "linear";
    case Kind::BoundedAttraction:
      return "bounded_attraction";
    case Kind::BumpAlignment:
      return "bump_alignment";
  }
  return "zero";
}

}  // namespace mdelab
