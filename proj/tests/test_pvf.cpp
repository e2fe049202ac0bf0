#include "mdelab/error.hpp"
#include "mdelab/pvf.hpp"
#include "reference.hpp"

#include <doctest.h>

using namespace mdelab;
using ref::p1;
using ref::p2;

namespace {

std::vector<PvfSpec> catalog_1d() {
  return {PvfSpec::ode_lift(VelocityField::linear(-1.0)),
          PvfSpec::constant({{p1(1), 0.5}, {p1(-1), 0.5}}),
          PvfSpec::median_split(),
          PvfSpec::phi_diffusion(RankSpeed{}),
          PvfSpec::interaction(InteractionKernel::bounded_attraction(1.0)),
          PvfSpec::one_sided_ode()};
}

}  // namespace

TEST_CASE("median split at a Dirac") {
  const auto V = evaluate(PvfSpec::median_split(), DiscreteMeasure::dirac(p1(3.0)));
  CHECK(V == LiftedMeasure(1, {{p1(3), p1(1), 0.5}, {p1(3), p1(-1), 0.5}}));
}

TEST_CASE("median split point of an even atom count") {
  const auto mu = make_measure({{p1(0), 0.25}, {p1(1), 0.25}, {p1(2), 0.25}, {p1(3), 0.25}});
  const auto b = median_split_point(mu);
  // F = 1/2 on [1, 2), so B = 2 and F(B-) = 1/2 leaves nothing to send left
  CHECK(b.position == 2.0);
  CHECK(b.right_weight == 1.0);
  const auto V = evaluate(PvfSpec::median_split(), mu);
  for (const auto& a : V.atoms()) CHECK(a.velocity[0] == (a.position[0] <= 1.0 ? -1.0 : 1.0));
}

TEST_CASE("ode lift is deterministic") {
  SplitMix64 rng(1);
  const auto mu = ref::random_measure(rng, 7, 1);
  const auto V = evaluate(PvfSpec::ode_lift(VelocityField::linear(-1.0)), mu);
  REQUIRE(V.size() == mu.size());
  for (const auto& a : V.atoms()) CHECK(a.velocity[0] == -a.position[0]);
}

TEST_CASE("interaction velocities") {
  const auto mu = make_measure({{p1(0), 0.5}, {p1(2), 0.5}});
  const auto v = interaction_velocities(InteractionKernel::linear(1.0), mu);
  // 1/2 phi(0) + 1/2 phi(2) at x = 0
  CHECK(v[0][0] == -1.0);
  CHECK(v[1][0] == 1.0);
}

TEST_CASE("interaction matches a direct kernel sum") {
  SplitMix64 rng(12);
  const auto kernel = InteractionKernel::bounded_attraction(0.7);
  const auto mu = ref::random_measure(rng, 6, 2);
  const auto v = interaction_velocities(kernel, mu);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    Point expected = Point::Zero(2);
    for (std::size_t j = 0; j < mu.size(); ++j) {
      const Point z = mu[j].position - mu[i].position;
      expected += mu[j].mass * (-0.7 * z / (1.0 + z.squaredNorm()));
    }
    CHECK((v[i] - expected).norm() <= 1e-12);
  }
}

TEST_CASE("check_h1 examples") {
  CHECK(check_h1(PvfSpec::constant({{p1(0.5), 1.0}}), DiscreteMeasure::dirac(p1(100))));
  CHECK(check_h1(PvfSpec::median_split(), make_measure({{p1(-1), 0.5}, {p1(4), 0.5}})));
  CHECK_FALSE(check_h1(PvfSpec::ode_lift(VelocityField::polynomial({0, 0, 1}), 1.0),
                       DiscreteMeasure::dirac(p1(5))));
  CHECK_THROWS_AS(evaluate(PvfSpec::ode_lift(VelocityField::polynomial({0, 0, 1}), 1.0),
                           DiscreteMeasure::dirac(p1(5))),
                  ValidationError);
}

TEST_CASE("every kind preserves the base marginal") {
  SplitMix64 rng(42);
  for (const auto& spec : catalog_1d()) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto mu = ref::random_measure(rng, 1 + static_cast<int>(rng.below(8)), 1);
      const auto V = evaluate(spec, mu);
      CHECK(approx_equal(base_marginal(V), mu, 1e-12));
      CHECK(check_h1(spec, mu));
    }
  }
}

TEST_CASE("1D-only kinds reject higher dimensions") {
  const auto mu = DiscreteMeasure::dirac(p2(0, 0));
  CHECK_THROWS_AS(evaluate(PvfSpec::median_split(), mu), ValidationError);
  CHECK_THROWS_AS(evaluate(PvfSpec::phi_diffusion(RankSpeed{}), mu), ValidationError);
}

TEST_CASE("rank speed") {
  const RankSpeed lin{};
  CHECK(lin(0.0) == -0.5);
  CHECK(lin(1.0) == 0.5);
  CHECK(lin.bound() == 0.5);
  const RankSpeed sq{RankSpeed::Kind::SignedSquare, 4.0};
  CHECK(sq(0.0) == -1.0);
  CHECK(sq(0.75) == doctest::Approx(0.25));
}

TEST_CASE("phi diffusion at a Dirac spreads monotonically") {
  const auto V = evaluate(PvfSpec::phi_diffusion(RankSpeed{}, 8), DiscreteMeasure::dirac(p1(0)));
  REQUIRE(V.size() == 8);
  double prev = -1.0;
  for (const auto& a : V.atoms()) {
    CHECK(a.velocity[0] > prev);
    CHECK(std::abs(a.velocity[0]) <= 0.5);
    CHECK(a.mass == doctest::Approx(0.125));
    prev = a.velocity[0];
  }
}

TEST_CASE("one-sided field") {
  const auto V = evaluate(PvfSpec::one_sided_ode(), make_measure({{p1(-4), 0.5}, {p1(0.25), 0.5}}));
  CHECK(V[0].velocity[0] == 2.0);
  CHECK(V[1].velocity[0] == -0.5);
}
