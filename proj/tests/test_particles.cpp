#include "mdelab/error.hpp"
#include "mdelab/particles.hpp"
#include "mdelab/pvf.hpp"
#include "mdelab/transport.hpp"
#include "reference.hpp"

#include <doctest.h>

#include <algorithm>
#include <limits>

using namespace mdelab;
using ref::p1;
using ref::p2;

namespace {

ParticleState random_state(SplitMix64& rng, int m, int dim) {
  return ParticleState{dim, ref::random_points(rng, m, dim, 1.5), 0.0};
}

}  // namespace

TEST_CASE("zero kernel keeps particles still") {
  SplitMix64 rng(1);
  const auto s0 = random_state(rng, 4, 2);
  const auto states = integrate(s0, InteractionKernel::zero(), 1.0, 0.1);
  CHECK(states.back().time == doctest::Approx(1.0));
  for (std::size_t i = 0; i < s0.size(); ++i) CHECK(states.back().positions[i] == s0.positions[i]);
}

TEST_CASE("linear pair against the closed form") {
  // x' = (1/2) sum_j -(x_j - x_i) pushes the pair apart: x = 1 -/+ e^t
  const ParticleState s0{1, {p1(0), p1(2)}, 0.0};
  const auto states = integrate(s0, InteractionKernel::linear(1.0), 1.0, 1e-3);
  for (const auto& s : states) {
    CHECK(s.positions[0][0] == doctest::Approx(1 - std::exp(s.time)).epsilon(1e-11));
    CHECK(s.positions[1][0] == doctest::Approx(1 + std::exp(s.time)).epsilon(1e-11));
  }
}

TEST_CASE("relabeling permutes the trajectory bit for bit") {
  SplitMix64 rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    const auto s0 = random_state(rng, 5, 2);
    std::vector<std::size_t> perm{3, 0, 4, 1, 2};
    ParticleState shuffled = s0;
    for (std::size_t i = 0; i < perm.size(); ++i) shuffled.positions[i] = s0.positions[perm[i]];
    const auto kernel = InteractionKernel::bounded_attraction(1.3);
    const auto a = integrate(s0, kernel, 1.0, 0.01).back();
    const auto b = integrate(shuffled, kernel, 1.0, 0.01).back();
    for (std::size_t i = 0; i < perm.size(); ++i)
      CHECK((b.positions[i].array() == a.positions[perm[i]].array()).all());
  }
}

TEST_CASE("empirical measures") {
  CHECK(empirical({1, {p1(3)}, 0.0}) == DiscreteMeasure::dirac(p1(3)));
  CHECK(empirical({1, {p1(2), p1(0)}, 0.0}) == make_measure({{p1(0), 0.5}, {p1(2), 0.5}}));
  CHECK(empirical({1, {p1(1), p1(1)}, 0.0}) == DiscreteMeasure::dirac(p1(1)));
}

TEST_CASE("particle velocities match the interaction field") {
  SplitMix64 rng(5);
  const auto s = random_state(rng, 6, 2);
  const auto kernel = InteractionKernel::bump_alignment(0.8, 1.2);
  const auto v = particle_velocities(s, kernel);
  const auto V = evaluate(PvfSpec::interaction(kernel), empirical(s));
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto it = std::find_if(V.atoms().begin(), V.atoms().end(),
                                 [&](const LiftedAtom& a) { return exactly_equal(a.position, s.positions[i]); });
    REQUIRE(it != V.atoms().end());
    CHECK((it->velocity - v[i]).norm() <= 1e-12);
  }
}

TEST_CASE("support stays within R + T sup|phi|") {
  SplitMix64 rng(9);
  const auto s0 = random_state(rng, 6, 2);
  const auto kernel = InteractionKernel::bounded_attraction(1.0);
  const double R = support_radius(empirical(s0)).radius;
  for (const auto& s : integrate(s0, kernel, 2.0, 0.05)) {
    const auto mu = empirical(s);
    CHECK(std::abs(mu.total_mass() - 1.0) <= 1e-12);
    CHECK(support_radius(mu).radius <= R + s.time * kernel.bound() + 1e-12);
  }
}

TEST_CASE("mean field with the zero kernel only sees the initial binning") {
  const ParticleState s0{1, {p1(0.1), p1(-0.33), p1(0.7)}, 0.0};
  const int n = 10;
  const auto report = meanfield_compare(s0, InteractionKernel::zero(), n, 1.0);
  for (double g : report.gaps) CHECK(g <= 1.0 / (n * n) + 1e-15);
}

TEST_CASE("mean field for the linear pair") {
  const ParticleState s0{1, {p1(0), p1(2)}, 0.0};
  for (int n : {20, 80}) {
    const auto report = meanfield_compare(s0, InteractionKernel::linear(1.0), n, 1.0, 1.0);
    CHECK(report.max_gap <= 10.0 / n);
  }
}

TEST_CASE("Dobrushin stability on random pairs") {
  SplitMix64 rng(13);
  for (int trial = 0; trial < 8; ++trial) {
    const auto a = random_state(rng, 4, 2);
    auto b = a;
    for (auto& p : b.positions) p += p2(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2));
    CHECK(dobrushin_check(a, b, InteractionKernel::bounded_attraction(1.0), 1.0, 0.01).pass);
  }
}

TEST_CASE("invalid states are rejected") {
  CHECK_THROWS_AS(validate({1, {}, 0.0}), ValidationError);
  CHECK_THROWS_AS(validate({1, {p2(0, 0)}, 0.0}), ValidationError);
  CHECK_THROWS_AS(validate({1, {p1(std::numeric_limits<double>::quiet_NaN())}, 0.0}), ValidationError);
  CHECK_THROWS_AS(integrate({1, {p1(0)}, 0.0}, InteractionKernel::zero(), 1.0, 0.0), ValidationError);
}
