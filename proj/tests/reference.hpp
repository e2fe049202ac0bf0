#pragma once

// Reference computations that share no code with the library's solvers.

#include "mdelab/measure.hpp"
#include "mdelab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace ref {

using mdelab::Atom;
using mdelab::DiscreteMeasure;
using mdelab::Point;

inline Point p1(double x) {
  Point p(1);
  p[0] = x;
  return p;
}

inline Point p2(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

/// W1 on the line as the integral of |F - G| between consecutive breakpoints.
inline double cdf_w1(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  std::vector<std::pair<double, double>> events;  // (x, signed mass)
  for (const auto& a : mu.atoms()) events.emplace_back(a.position[0], a.mass);
  for (const auto& a : nu.atoms()) events.emplace_back(a.position[0], -a.mass);
  std::sort(events.begin(), events.end());
  double diff = 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < events.size(); ++k) {
    diff += events[k].second;
    total += std::abs(diff) * (events[k + 1].first - events[k].first);
  }
  return total;
}

/// Equal-mass, equal-count instances: the optimal coupling is a permutation.
inline double permutation_w(const std::vector<Point>& xs, const std::vector<Point>& ys) {
  std::vector<std::size_t> perm(ys.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) c += (xs[i] - ys[perm[i]]).norm();
    best = std::min(best, c / static_cast<double>(xs.size()));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline DiscreteMeasure equal_mass(const std::vector<Point>& xs) {
  std::vector<Atom> atoms;
  for (const auto& x : xs) atoms.push_back({x, 1.0 / static_cast<double>(xs.size())});
  return DiscreteMeasure(static_cast<int>(xs.front().size()), std::move(atoms));
}

inline std::vector<Point> random_points(mdelab::SplitMix64& rng, int count, int dim, double scale = 3.0) {
  std::vector<Point> out;
  for (int i = 0; i < count; ++i) {
    Point p(dim);
    for (int d = 0; d < dim; ++d) p[d] = rng.uniform(-scale, scale);
    out.push_back(p);
  }
  return out;
}

/// Random measure with `count` atoms, masses bounded away from 0.
inline DiscreteMeasure random_measure(mdelab::SplitMix64& rng, int count, int dim, double scale = 3.0) {
  const auto pts = random_points(rng, count, dim, scale);
  std::vector<double> w;
  for (int i = 0; i < count; ++i) w.push_back(0.2 + rng.uniform());
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  std::vector<Atom> atoms;
  for (int i = 0; i < count; ++i) atoms.push_back({pts[static_cast<std::size_t>(i)], w[static_cast<std::size_t>(i)] / total});
  return DiscreteMeasure(dim, std::move(atoms));
}

}  // namespace ref
