#include "mdelab/error.hpp"
#include "mdelab/measure.hpp"
#include "reference.hpp"

#include <doctest.h>

using namespace mdelab;
using ref::p1;

TEST_CASE("make_measure merges coincident atoms") {
  const auto mu = make_measure({{p1(0.0), 0.5}, {p1(0.0), 0.5}});
  REQUIRE(mu.size() == 1);
  CHECK(mu[0].mass == 1.0);
  CHECK(mu[0].position[0] == 0.0);
}

TEST_CASE("make_measure sorts atoms") {
  const auto mu = make_measure({{p1(1.0), 0.5}, {p1(-1.0), 0.5}});
  REQUIRE(mu.size() == 2);
  CHECK(mu[0].position[0] == -1.0);
  CHECK(mu[1].position[0] == 1.0);
}

TEST_CASE("make_measure rejects bad mass") {
  CHECK_THROWS_AS(make_measure({{p1(0.0), 0.3}, {p1(1.0), 0.3}}), ValidationError);
  CHECK_THROWS_AS(make_measure({}), ValidationError);
  CHECK_THROWS_AS(make_measure({{p1(0.0), -0.5}, {p1(1.0), 1.5}}), ValidationError);
}

TEST_CASE("renormalization within 1e-9") {
  const auto mu = make_measure({{p1(0.0), 0.5 + 4e-10}, {p1(1.0), 0.5}});
  CHECK(std::abs(mu.total_mass() - 1.0) <= 1e-12);
}

TEST_CASE("push_forward examples") {
  const auto shifted = push_forward(DiscreteMeasure::dirac(p1(0.0)), [](const Point& x) -> Point { return x.array() + 1.0; });
  CHECK(shifted == DiscreteMeasure::dirac(p1(1.0)));

  const auto sym = make_measure({{p1(-1.0), 0.5}, {p1(1.0), 0.5}});
  const auto squared = push_forward(sym, [](const Point& x) -> Point { return x.array().square(); });
  CHECK(squared == DiscreteMeasure::dirac(p1(1.0)));

  const auto pair = make_measure({{p1(0.0), 0.5}, {p1(1.0), 0.5}});
  const auto doubled = push_forward(pair, [](const Point& x) -> Point { return 2.0 * x; });
  CHECK(doubled == make_measure({{p1(0.0), 0.5}, {p1(2.0), 0.5}}));
}

TEST_CASE("push_forward keeps total mass") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto mu = ref::random_measure(rng, 7, 2);
    const auto img = push_forward(mu, [](const Point& x) -> Point { return x.array().round(); });
    CHECK(std::abs(img.total_mass() - mu.total_mass()) <= 1e-15);
  }
}

TEST_CASE("base_marginal examples") {
  LiftedMeasure split(1, {{p1(0.0), p1(1.0), 0.5}, {p1(0.0), p1(-1.0), 0.5}});
  CHECK(base_marginal(split) == DiscreteMeasure::dirac(p1(0.0)));

  LiftedMeasure two(1, {{p1(0.0), p1(1.0), 0.5}, {p1(1.0), p1(3.0), 0.5}});
  CHECK(base_marginal(two) == make_measure({{p1(0.0), 0.5}, {p1(1.0), 0.5}}));

  SplitMix64 rng(5);
  const auto mu = ref::random_measure(rng, 9, 2);
  const auto V = lift_deterministic(mu, [](const Point& x) -> Point { return x.array().sin(); });
  CHECK(approx_equal(base_marginal(V), mu, 1e-12));
}

TEST_CASE("base_marginal is invariant under atom order") {
  std::vector<LiftedAtom> atoms{{p1(0.0), p1(1.0), 0.25}, {p1(2.0), p1(-1.0), 0.25},
                                {p1(0.0), p1(-3.0), 0.25}, {p1(1.0), p1(0.0), 0.25}};
  const auto forward = base_marginal(LiftedMeasure(1, atoms));
  std::reverse(atoms.begin(), atoms.end());
  CHECK(base_marginal(LiftedMeasure(1, atoms)) == forward);
}

TEST_CASE("support_radius") {
  CHECK(support_radius(DiscreteMeasure::dirac(p1(0.0))).radius == 0.0);
  CHECK(support_radius(make_measure({{p1(-2.0), 0.5}, {p1(1.0), 0.5}})).radius == 2.0);
  const auto u = uniform_atoms(0.0, 1.0, 10);
  CHECK(support_radius(u).radius == doctest::Approx(0.95).epsilon(1e-15));
}

TEST_CASE("uniform generator uses midpoints") {
  const auto u = uniform_atoms(0.0, 1.0, 4);
  REQUIRE(u.size() == 4);
  CHECK(u[0].position[0] == doctest::Approx(0.125));
  CHECK(u[3].position[0] == doctest::Approx(0.875));
  CHECK(u[2].mass == 0.25);
}

TEST_CASE("lattice measure") {
  LatticeMeasure m(4, 1, {{LatticePoint::Constant(1, 3), 0.5}, {LatticePoint::Constant(1, -5), 0.5}});
  CHECK(m.box_limit() == 64);
  CHECK(m.atoms()[0].coords[0] == -5);
  CHECK(m.position(1)[0] == 3.0 / 16.0);
  CHECK_THROWS_AS(LatticeMeasure(2, 1, {{LatticePoint::Constant(1, 9), 1.0}}), NumericalError);
}

TEST_CASE("constructed measures satisfy invariants") {
  SplitMix64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const auto mu = ref::random_measure(rng, 1 + static_cast<int>(rng.below(10)), 2);
    std::vector<double> m;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      CHECK(mu[i].mass > 0.0);
      if (i > 0) CHECK(lex_less(mu[i - 1].position, mu[i].position));
      m.push_back(mu[i].mass);
    }
    CHECK(std::abs(compensated_sum(m) - 1.0) <= 1e-12);
  }
}
