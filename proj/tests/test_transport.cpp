#include "mdelab/error.hpp"
#include "mdelab/transport.hpp"
#include "reference.hpp"

#include <doctest.h>

using namespace mdelab;
using ref::p1;
using ref::p2;

namespace {

DiscreteMeasure halves(const Point& a, const Point& b) { return make_measure({{a, 0.5}, {b, 0.5}}); }

}  // namespace

TEST_CASE("W between Diracs") {
  CHECK(wasserstein(DiscreteMeasure::dirac(p1(-1.5)), DiscreteMeasure::dirac(p1(2.0))).distance == 3.5);
  CHECK(wasserstein_lp(DiscreteMeasure::dirac(p2(0, 0)), DiscreteMeasure::dirac(p2(3, 4))).distance ==
        doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("2D example has a unique optimal plan") {
  const auto mu1 = halves(p2(0, 0), p2(1, 0));
  const auto mu2 = halves(p2(0, 1), p2(1, -1));
  const auto r = wasserstein(mu1, mu2);
  CHECK(r.distance == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(r.plan.entries.size() == 2);
  // sorted: mu1 = [(0,0), (1,0)], mu2 = [(0,1), (1,-1)]
  for (const auto& e : r.plan.entries) CHECK(e.source == e.target);
}

TEST_CASE("shifted pair costs 2") {
  const auto mu = halves(p1(0), p1(1));
  const auto nu = halves(p1(2), p1(3));
  CHECK(wasserstein(mu, nu).distance == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(wasserstein_lp(mu, nu).distance == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("kr_dual_gap examples") {
  const Witness identity = [](const Point& x) { return x[0]; };
  const Witness zero = [](const Point&) { return 0.0; };
  CHECK(kr_dual_gap(DiscreteMeasure::dirac(p1(0)), DiscreteMeasure::dirac(p1(1)), {identity}) ==
        doctest::Approx(0.0).epsilon(1e-14));
  const auto mu = halves(p1(0), p1(2));
  CHECK(kr_dual_gap(mu, mu, {identity, zero}) == doctest::Approx(0.0));
  CHECK(kr_dual_gap(mu, DiscreteMeasure::dirac(p1(1)), {zero}) == doctest::Approx(1.0));
}

TEST_CASE("plan_is_optimal examples") {
  const auto mu = halves(p1(0), p1(2));
  TransportPlan identity{2, 2, {{0, 0, 0.5}, {1, 1, 0.5}}, 0.0, {}, {}};
  CHECK(plan_is_optimal(identity, mu, mu));
  TransportPlan crossing{2, 2, {{0, 1, 0.5}, {1, 0, 0.5}}, 2.0, {}, {}};
  CHECK_FALSE(plan_is_optimal(crossing, mu, mu));

  const auto a = halves(p1(0), p1(1));
  const auto b = halves(p1(2), p1(3));
  TransportPlan anti{2, 2, {{0, 1, 0.5}, {1, 0, 0.5}}, 2.0, {}, {}};
  CHECK(plan_is_optimal(anti, a, b));
}

TEST_CASE("check_marginals rejects wrong plans") {
  TransportPlan bad{2, 2, {{0, 0, 0.7}, {1, 1, 0.3}}, 0.0, {}, {}};
  CHECK_THROWS_AS(check_marginals(bad, {0.5, 0.5}, {0.5, 0.5}), ValidationError);
}

TEST_CASE("1D fast path matches the CDF integral and the LP") {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const auto mu = ref::random_measure(rng, 1 + static_cast<int>(rng.below(9)), 1);
    const auto nu = ref::random_measure(rng, 1 + static_cast<int>(rng.below(9)), 1);
    const double fast = wasserstein(mu, nu).distance;
    CHECK(fast == doctest::Approx(ref::cdf_w1(mu, nu)).epsilon(1e-10));
    CHECK(fast == doctest::Approx(wasserstein_lp(mu, nu).distance).epsilon(1e-9));
  }
}

TEST_CASE("brute force over permutations") {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const int k = 1 + static_cast<int>(rng.below(4));
    const auto xs = ref::random_points(rng, k, 2);
    const auto ys = ref::random_points(rng, k, 2);
    const double expected = ref::permutation_w(xs, ys);
    CHECK(wasserstein(ref::equal_mass(xs), ref::equal_mass(ys)).distance ==
          doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("plans and potentials") {
  SplitMix64 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const auto mu = ref::random_measure(rng, 2 + static_cast<int>(rng.below(8)), 2);
    const auto nu = ref::random_measure(rng, 2 + static_cast<int>(rng.below(8)), 2);
    const auto cost = distance_matrix(mu, nu);
    const auto plan = solve_transportation(masses_of(mu), masses_of(nu), cost);

    CHECK_NOTHROW(check_marginals(plan, masses_of(mu), masses_of(nu)));
    CHECK(plan.entries.size() <= mu.size() + nu.size() - 1);
    CHECK(plan_cost(plan, cost) == doctest::Approx(plan.cost).epsilon(1e-10));
    for (const auto& e : plan.entries) CHECK(e.weight > 0.0);

    // dual feasibility, complementary slackness and zero duality gap
    REQUIRE(plan.row_potential.size() == mu.size());
    REQUIRE(plan.col_potential.size() == nu.size());
    double dual = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      dual += plan.row_potential[i] * mu[i].mass;
      for (std::size_t k = 0; k < nu.size(); ++k)
        CHECK(cost(i, k) - plan.row_potential[i] - plan.col_potential[k] >= -1e-9);
    }
    for (std::size_t k = 0; k < nu.size(); ++k) dual += plan.col_potential[k] * nu[k].mass;
    CHECK(dual == doctest::Approx(plan.cost).epsilon(1e-9));
    for (const auto& e : plan.entries)
      CHECK(std::abs(cost(e.source, e.target) - plan.row_potential[e.source] -
                     plan.col_potential[e.target]) <= 1e-9);
  }
}

TEST_CASE("metric axioms") {
  SplitMix64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = ref::random_measure(rng, 4, 2);
    const auto b = ref::random_measure(rng, 5, 2);
    const auto c = ref::random_measure(rng, 3, 2);
    const double ab = wasserstein(a, b).distance;
    CHECK(wasserstein(a, a).distance == doctest::Approx(0.0));
    CHECK(ab == doctest::Approx(wasserstein(b, a).distance).epsilon(1e-10));
    CHECK(ab <= wasserstein(a, c).distance + wasserstein(c, b).distance + 1e-10);
  }
}

TEST_CASE("degenerate instances") {
  // identical equal-mass grids produce many degenerate pivots
  std::vector<Atom> grid;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) grid.push_back({p2(i, j), 1.0 / 36.0});
  const auto mu = make_measure(grid);
  CHECK(wasserstein(mu, mu).distance == doctest::Approx(0.0));
  const auto shifted = push_forward(mu, [](const Point& x) -> Point { return x.array() + 1.0; });
  CHECK(wasserstein(mu, shifted).distance == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
}
