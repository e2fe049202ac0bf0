#include "mdelab/pvf.hpp"

#include "mdelab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mdelab {

std::string to_string(PvfKind kind) {
  switch (kind) {
    case PvfKind::OdeLift:
      return "ode_lift";
    case PvfKind::Constant:
      return "constant";
    case PvfKind::MedianSplit:
      return "median_split";
    case PvfKind::PhiDiffusion:
      return "phi_diffusion";
    case PvfKind::Interaction:
      return "interaction";
    case PvfKind::OneSidedOde:
      return "one_sided_ode";
  }
  return "ode_lift";
}

double RankSpeed::operator()(double alpha) const {
  const double c = alpha - 0.5;
  switch (kind) {
    case Kind::CenteredLinear:
      return scale * c;
    case Kind::SignedSquare:
      return scale * (c > 0.0 ? 1.0 : (c < 0.0 ? -1.0 : 0.0)) * c * c;
  }
  return 0.0;
}

double RankSpeed::bound() const {
  return std::max(std::abs((*this)(0.0)), std::abs((*this)(1.0)));
}

PvfSpec PvfSpec::ode_lift(VelocityField v, std::optional<double> h1) {
  PvfSpec s;
  s.kind = PvfKind::OdeLift;
  s.field = std::move(v);
  s.declared_h1 = h1;
  return s;
}

PvfSpec PvfSpec::constant(std::vector<std::pair<Point, double>> fiber) {
  PvfSpec s;
  s.kind = PvfKind::Constant;
  s.fiber = std::move(fiber);
  return s;
}

PvfSpec PvfSpec::median_split() {
  PvfSpec s;
  s.kind = PvfKind::MedianSplit;
  return s;
}

PvfSpec PvfSpec::phi_diffusion(RankSpeed phi, int sub_atoms) {
  PvfSpec s;
  s.kind = PvfKind::PhiDiffusion;
  s.phi = phi;
  s.sub_atoms = sub_atoms;
  return s;
}

PvfSpec PvfSpec::interaction(InteractionKernel kernel, std::optional<double> h1) {
  PvfSpec s;
  s.kind = PvfKind::Interaction;
  s.kernel = kernel;
  s.declared_h1 = h1;
  return s;
}

PvfSpec PvfSpec::one_sided_ode() {
  PvfSpec s;
  s.kind = PvfKind::OneSidedOde;
  s.field = VelocityField::sgn_sqrt(1.0);
  return s;
}

double PvfSpec::h1_constant(int dim) const {
  if (declared_h1) return *declared_h1;
  switch (kind) {
    case PvfKind::OdeLift:
    case PvfKind::OneSidedOde:
      return field.growth_constant(dim);
    case PvfKind::Constant: {
      double c = 0.0;
      for (const auto& [u, p] : fiber) c = std::max(c, u.norm());
      return c;
    }
    case PvfKind::MedianSplit:
      return 1.0;
    case PvfKind::PhiDiffusion:
      return phi.bound();
    case PvfKind::Interaction:
      // |sum_j m_j phi(x_j - x_i)| <= alpha |x_i - xbar| <= 2 alpha sup|x| for the linear kernel.
      if (kernel.kind == InteractionKernel::Kind::Linear) return 2.0 * std::abs(kernel.alpha);
      return kernel.bound();
  }
  return std::numeric_limits<double>::infinity();
}

MedianSplitPoint median_split_point(const DiscreteMeasure& mu) {
  if (mu.dim() != 1) throw ValidationError("median split is defined in dimension 1 only", "dim");
  // Compensated running sums of the cumulative distribution F.
  double sum = 0.0;
  double carry = 0.0;
  double previous = 0.0;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const double m = mu[k].mass;
    const double t = sum + m;
    carry += std::abs(sum) >= std::abs(m) ? (sum - t) + m : (m - t) + sum;
    sum = t;
    const double cumulative = sum + carry;
    if (cumulative > 0.5 + kMassSumTolerance || k + 1 == mu.size()) {
      const double below = std::abs(previous - 0.5) <= kMassSumTolerance ? 0.5 : previous;
      MedianSplitPoint b;
      b.atom = k;
      b.position = mu[k].position[0];
      b.left_weight = std::clamp((0.5 - below) / m, 0.0, 1.0);
      b.right_weight = 1.0 - b.left_weight;
      return b;
    }
    previous = cumulative;
  }
  throw ValidationError("empty measure", "atoms");
}

std::vector<Point> interaction_velocities(const InteractionKernel& kernel,
                                          const DiscreteMeasure& mu) {
  std::vector<Point> v;
  v.reserve(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    Point acc = Point::Zero(mu.dim());
    for (std::size_t j = 0; j < mu.size(); ++j) {
      acc += mu[j].mass * kernel(mu[j].position - mu[i].position);
    }
    v.push_back(std::move(acc));
  }
  return v;
}

namespace {

void require_1d(const DiscreteMeasure& mu, PvfKind kind) {
  if (mu.dim() != 1) {
    throw ValidationError(to_string(kind) + " is defined in dimension 1 only", "dim");
  }
}

Point scalar_point(double v) {
  Point p(1);
  p[0] = v;
  return p;
}

}  // namespace

LiftedMeasure evaluate_unchecked(const PvfSpec& spec, const DiscreteMeasure& mu,
                                 int default_sub_atoms) {
  std::vector<LiftedAtom> atoms;
  switch (spec.kind) {
    case PvfKind::OdeLift:
    case PvfKind::OneSidedOde:
      for (const auto& a : mu.atoms()) atoms.push_back({a.position, spec.field(a.position), a.mass});
      break;

    case PvfKind::Constant: {
      if (spec.fiber.empty()) throw ValidationError("constant field needs a fiber", "fiber");
      for (const auto& [u, p] : spec.fiber) {
        if (u.size() != mu.dim()) throw ValidationError("fiber velocity dimension mismatch", "fiber");
        if (!(p > 0.0)) throw ValidationError("fiber weights must be positive", "fiber");
      }
      for (const auto& a : mu.atoms()) {
        for (const auto& [u, p] : spec.fiber) atoms.push_back({a.position, u, a.mass * p});
      }
      break;
    }

    case PvfKind::MedianSplit: {
      require_1d(mu, spec.kind);
      const auto b = median_split_point(mu);
      for (std::size_t k = 0; k < mu.size(); ++k) {
        const auto& a = mu[k];
        if (k < b.atom) {
          atoms.push_back({a.position, scalar_point(-1.0), a.mass});
        } else if (k > b.atom) {
          atoms.push_back({a.position, scalar_point(1.0), a.mass});
        } else {
          if (b.right_weight > 0.0) {
            atoms.push_back({a.position, scalar_point(1.0), a.mass * b.right_weight});
          }
          if (b.left_weight > 0.0) {
            atoms.push_back({a.position, scalar_point(-1.0), a.mass * b.left_weight});
          }
        }
      }
      break;
    }

    case PvfKind::PhiDiffusion: {
      require_1d(mu, spec.kind);
      const int k = spec.sub_atoms > 0 ? spec.sub_atoms : default_sub_atoms;
      if (k < 1) throw ValidationError("sub_atoms must be >= 1", "sub_atoms");
      std::vector<double> prefix;
      prefix.reserve(mu.size());
      for (const auto& a : mu.atoms()) {
        const double below = compensated_sum(prefix);
        for (int r = 1; r <= k; ++r) {
          const double rank = below + (r - 0.5) * a.mass / k;
          atoms.push_back({a.position, scalar_point(spec.phi(rank)), a.mass / k});
        }
        prefix.push_back(a.mass);
      }
      break;
    }

    case PvfKind::Interaction: {
      const auto v = interaction_velocities(spec.kernel, mu);
      for (std::size_t i = 0; i < mu.size(); ++i) atoms.push_back({mu[i].position, v[i], mu[i].mass});
      break;
    }
  }
  return LiftedMeasure(mu.dim(), std::move(atoms));
}

namespace {

bool satisfies_h1(const PvfSpec& spec, const DiscreteMeasure& mu, const LiftedMeasure& V) {
  const double c = spec.h1_constant(mu.dim());
  double speed = 0.0;
  for (const auto& a : V.atoms()) speed = std::max(speed, a.velocity.norm());
  const double bound = c * (1.0 + support_radius(mu).radius);
  return speed <= bound * (1.0 + 1e-12) + 1e-12;
}

}  // namespace

LiftedMeasure evaluate(const PvfSpec& spec, const DiscreteMeasure& mu, int default_sub_atoms) {
  auto V = evaluate_unchecked(spec, mu, default_sub_atoms);
  if (!satisfies_h1(spec, mu, V)) {
    throw ValidationError(to_string(spec.kind) + ": velocity exceeds the declared growth bound C = " +
                              std::to_string(spec.h1_constant(mu.dim())),
                          "h1_constant");
  }
  return V;
}

bool check_h1(const PvfSpec& spec, const DiscreteMeasure& mu, int default_sub_atoms) {
  return satisfies_h1(spec, mu, evaluate_unchecked(spec, mu, default_sub_atoms));
}

}  // namespace mdelab
