#include "mdelab/error.hpp"
#include "mdelab/fiber_metric.hpp"
#include "mdelab/fields.hpp"
#include "reference.hpp"

#include <doctest.h>

using namespace mdelab;
using ref::p1;
using ref::p2;

namespace {

LiftedMeasure triple(int which) {
  switch (which) {
    case 1: return LiftedMeasure(2, {{p2(0, 0), p2(1, 0), 0.5}, {p2(1, 0), p2(3, 0), 0.5}});
    case 2: return LiftedMeasure(2, {{p2(0, 1), p2(1, 0), 0.5}, {p2(1, -1), p2(3, 0), 0.5}});
    default: return LiftedMeasure(2, {{p2(1, 1), p2(1, 0), 0.5}, {p2(0, -1), p2(3, 0), 0.5}});
  }
}

LiftedMeasure random_lifted(SplitMix64& rng, int count, int dim) {
  const auto mu = ref::random_measure(rng, count, dim);
  const auto vs = ref::random_points(rng, count, dim, 2.0);
  std::vector<LiftedAtom> atoms;
  for (std::size_t i = 0; i < mu.size(); ++i) atoms.push_back({mu[i].position, vs[i], mu[i].mass});
  return LiftedMeasure(dim, std::move(atoms));
}

// Random field built from the catalog so that sums stay representable.
VelocityField random_field(SplitMix64& rng) {
  const double a = rng.uniform(-2, 2);
  const double b = rng.uniform(-1, 1);
  const double s = rng.uniform(-1, 1);
  const double w = rng.uniform(0.5, 3);
  return VelocityField::linear(a, p1(b)) + VelocityField::sinusoidal(s, w, 0.3);
}

}  // namespace

TEST_CASE("combined cost on the triple") {
  const auto kind = FiberCostKind::Combined;
  CHECK(constrained_fiber_cost(triple(1), triple(2), kind).value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(constrained_fiber_cost(triple(2), triple(3), kind).value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(constrained_fiber_cost(triple(1), triple(3), kind).value == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("fiber cost of identical lifts is zero") {
  SplitMix64 rng(3);
  const auto mu = ref::random_measure(rng, 6, 2);
  const auto V = lift_deterministic(mu, [](const Point& x) -> Point { return x.array().cos(); });
  for (auto kind : {FiberCostKind::Fiber, FiberCostKind::Combined, FiberCostKind::OneSided})
    CHECK(std::abs(constrained_fiber_cost(V, V, kind).value) <= 1e-12);
}

TEST_CASE("constant fiber shift costs |c|") {
  SplitMix64 rng(4);
  const auto mu = ref::random_measure(rng, 5, 2);
  const Point c = p2(0.6, -0.8);
  const auto r = constrained_fiber_cost(zero_lift(mu), lift_deterministic(mu, [&](const Point&) { return c; }),
                                        FiberCostKind::Fiber);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.base_distance == doctest::Approx(0.0));
}

TEST_CASE("lifted plan marginals and induced base plan") {
  SplitMix64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const auto V1 = random_lifted(rng, 4, 2);
    const auto V2 = random_lifted(rng, 5, 2);
    const auto r = constrained_fiber_cost(V1, V2, FiberCostKind::Fiber);
    std::vector<double> row(V1.size(), 0.0), col(V2.size(), 0.0);
    for (const auto& e : r.plan.entries) {
      row[e.source] += e.weight;
      col[e.target] += e.weight;
    }
    for (std::size_t i = 0; i < V1.size(); ++i) CHECK(std::abs(row[i] - V1[i].mass) <= 1e-10);
    for (std::size_t k = 0; k < V2.size(); ++k) CHECK(std::abs(col[k] - V2[k].mass) <= 1e-10);

    const auto b1 = base_marginal(V1);
    const auto b2 = base_marginal(V2);
    const auto base = induced_base_plan(r.plan, V1, V2);
    CHECK_NOTHROW(check_marginals(base, masses_of(b1), masses_of(b2)));
    CHECK(plan_cost(base, distance_matrix(b1, b2)) == doctest::Approx(r.base_distance).epsilon(1e-8));
  }
}

TEST_CASE("one-sided cost never exceeds the fiber cost") {
  SplitMix64 rng(21);
  for (int trial = 0; trial < 15; ++trial) {
    const auto V1 = random_lifted(rng, 4, 1);
    const auto V2 = random_lifted(rng, 4, 1);
    const double fiber = constrained_fiber_cost(V1, V2, FiberCostKind::Fiber).value;
    const double one_sided = constrained_fiber_cost(V1, V2, FiberCostKind::OneSided).value;
    CHECK(one_sided <= fiber + 1e-9);
  }
}

TEST_CASE("wt bound") {
  CHECK(wt_bound_check(triple(1), triple(1)));
  for (int a = 1; a <= 3; ++a)
    for (int b = 1; b <= 3; ++b) CHECK(wt_bound_check(triple(a), triple(b)));
  SplitMix64 rng(17);
  for (int trial = 0; trial < 20; ++trial)
    CHECK(wt_bound_check(random_lifted(rng, 1 + static_cast<int>(rng.below(5)), 2),
                         random_lifted(rng, 1 + static_cast<int>(rng.below(5)), 2)));
}

TEST_CASE("fiber convolution at one base atom") {
  const LiftedMeasure pm(1, {{p1(0), p1(1), 0.5}, {p1(0), p1(-1), 0.5}});
  const LiftedMeasure expected(1, {{p1(0), p1(2), 0.25}, {p1(0), p1(0), 0.5}, {p1(0), p1(-2), 0.25}});
  CHECK(approx_equal(fiber_convolution(pm, pm), expected, 1e-15));
}

TEST_CASE("zero lift is neutral") {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto V = random_lifted(rng, 5, 2);
    CHECK(approx_equal(fiber_convolution(V, zero_lift(base_marginal(V))), V, 1e-15));
  }
}

TEST_CASE("convolution is commutative and associative") {
  const LiftedMeasure a(1, {{p1(0), p1(1), 0.25}, {p1(0), p1(-1), 0.25}, {p1(1), p1(0.5), 0.5}});
  const LiftedMeasure b(1, {{p1(0), p1(2), 0.5}, {p1(1), p1(-3), 0.3}, {p1(1), p1(1), 0.2}});
  const LiftedMeasure c(1, {{p1(0), p1(0.25), 0.5}, {p1(1), p1(4), 0.25}, {p1(1), p1(-4), 0.25}});
  CHECK(approx_equal(fiber_convolution(a, b), fiber_convolution(b, a), 1e-15, 1e-15));
  CHECK(approx_equal(fiber_convolution(fiber_convolution(a, b), c),
                     fiber_convolution(a, fiber_convolution(b, c)), 1e-14, 1e-14));
}

TEST_CASE("convolution requires equal bases") {
  const LiftedMeasure a(1, {{p1(0), p1(1), 1.0}});
  const LiftedMeasure b(1, {{p1(1), p1(1), 1.0}});
  CHECK_THROWS_AS(fiber_convolution(a, b), ValidationError);
}

TEST_CASE("monoid morphism on deterministic lifts") {
  SplitMix64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const auto mu = ref::random_measure(rng, 6, 1);
    const auto v1 = random_field(rng);
    const auto v2 = random_field(rng);
    const auto lhs = fiber_convolution(lift_deterministic(mu, v1), lift_deterministic(mu, v2));
    const auto rhs = lift_deterministic(mu, [&](const Point& x) -> Point { return v1(x) + v2(x); });
    CHECK(approx_equal(lhs, rhs, 1e-12, 1e-12));
  }
}

TEST_CASE("scalar action") {
  SplitMix64 rng(6);
  const auto mu = ref::random_measure(rng, 5, 1);
  const auto v = random_field(rng);
  const auto V = lift_deterministic(mu, v);
  CHECK(scalar_action(0.0, V) == zero_lift(mu));
  CHECK(scalar_action(1.0, V) == V);
  for (double lambda : {-2.0, 0.5}) {
    const auto expected = lift_deterministic(mu, [&](const Point& x) -> Point { return lambda * v(x); });
    CHECK(approx_equal(scalar_action(lambda, V), expected, 1e-12, 1e-12));
  }
}

TEST_CASE("cost kind names round-trip") {
  for (auto kind : {FiberCostKind::Fiber, FiberCostKind::Combined, FiberCostKind::OneSided})
    CHECK(parse_fiber_cost_kind(to_string(kind)) == kind);
  CHECK_THROWS_AS(parse_fiber_cost_kind("bogus"), ValidationError);
}
