#pragma once

// Probability vector fields: maps sending a measure mu on R^n to a lifted
// measure on TR^n whose base marginal is mu.

#include "mdelab/fields.hpp"
#include "mdelab/measure.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mdelab {

enum class PvfKind { OdeLift, Constant, MedianSplit, PhiDiffusion, Interaction, OneSidedOde };

std::string to_string(PvfKind kind);

/// Rank-speed function phi: [0, 1] -> R used by the rank diffusion field.
struct RankSpeed {
  enum class Kind {
    CenteredLinear,  // scale (alpha - 1/2)
    SignedSquare,    // scale sgn(alpha - 1/2) (alpha - 1/2)^2
  };
  Kind kind = Kind::CenteredLinear;
  double scale = 1.0;

  double operator()(double alpha) const;
  /// sup |phi| over [0, 1].
  double bound() const;
};

/// Declarative description of one catalog field.
struct PvfSpec {
  PvfKind kind = PvfKind::OdeLift;

  VelocityField field;                         // OdeLift, OneSidedOde
  std::vector<std::pair<Point, double>> fiber;  // Constant: sum_r p_r delta_{u_r}
  RankSpeed phi;                               // PhiDiffusion
  int sub_atoms = 0;                           // PhiDiffusion; 0 picks the caller's default
  InteractionKernel kernel;                    // Interaction

  /// Declared sublinear growth constant; when absent the closed-form
  /// constant of the kind is used.
  std::optional<double> declared_h1;

  static PvfSpec ode_lift(VelocityField v, std::optional<double> h1 = std::nullopt);
  static PvfSpec constant(std::vector<std::pair<Point, double>> fiber);
  static PvfSpec median_split();
  static PvfSpec phi_diffusion(RankSpeed phi, int sub_atoms = 0);
  static PvfSpec interaction(InteractionKernel kernel, std::optional<double> h1 = std::nullopt);
  static PvfSpec one_sided_ode();

  /// The constant C of sup|v| <= C (1 + sup|x|) in dimension `dim`.
  double h1_constant(int dim) const;
};

inline constexpr int kDefaultSubAtoms = 16;

/// Evaluates V[mu] and validates the growth bound against h1_constant.
/// Throws ValidationError on a 1D-only kind in higher dimension or when the
/// declared constant is violated.
LiftedMeasure evaluate(const PvfSpec& spec, const DiscreteMeasure& mu,
                       int default_sub_atoms = kDefaultSubAtoms);

/// Same as evaluate, without the growth-bound check.
LiftedMeasure evaluate_unchecked(const PvfSpec& spec, const DiscreteMeasure& mu,
                                 int default_sub_atoms = kDefaultSubAtoms);

/// True iff sup |v| over V[mu] <= C (1 + sup |x| over mu).
bool check_h1(const PvfSpec& spec, const DiscreteMeasure& mu,
              int default_sub_atoms = kDefaultSubAtoms);

/// Median point B(mu) = sup{x : mu(]-inf, x]) <= 1/2} together with the
/// split weights of the atom sitting at B.
struct MedianSplitPoint {
  std::size_t atom = 0;
  double position = 0.0;
  double right_weight = 0.0;  // conditional weight of velocity +1
  double left_weight = 0.0;   // conditional weight of velocity -1
};

MedianSplitPoint median_split_point(const DiscreteMeasure& mu);

/// Interaction velocity sum_j m_j phi(x_j - x_i) at every atom (j = i included).
std::vector<Point> interaction_velocities(const InteractionKernel& kernel,
                                          const DiscreteMeasure& mu);

}  // namespace mdelab
