#pragma once

// Independent reference implementations used to judge library results.
// Nothing here shares code with the library: the diffusion reference sums
// cosine series directly, the spanning-tree oracle enumerates Pruefer
// sequences, and the modularity oracle evaluates the definition verbatim
// over every partition.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>
#include <vector>

namespace crunch::testing {

// 1-D zero-flux diffusion of rho0 on [0, L], solved by direct cosine sums on
// the sample grid, with tracer advection under v = -rho_x / max(rho, floor)
// where the floor is 1e-4 of the mean (the production rule). Tracers advance
// by RK4 over the same doubling time schedule the solver uses.
struct Reference1D {
  int n;
  double length;
  std::vector<double> coeff;
  double mean = 0.0;
  double floor = 0.0;

  Reference1D(const std::vector<double>& rho0, double len)
      : n(static_cast<int>(rho0.size())), length(len), coeff(rho0.size()) {
    const double pi = std::numbers::pi;
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i)
        s += rho0[static_cast<std::size_t>(i)] *
             std::cos(k * pi * (i + 0.5) / n);
      coeff[static_cast<std::size_t>(k)] = s * ((k == 0 ? 1.0 : 2.0) / n);
    }
    mean = coeff[0];
    floor = 1e-4 * mean;
  }

  double lambda(int k) const {
    const double w = k * std::numbers::pi / length;
    return w * w;
  }

  double rho(double x, double t) const {
    const double pi = std::numbers::pi;
    double s = 0.0;
    for (int k = 0; k < n; ++k)
      s += coeff[static_cast<std::size_t>(k)] * std::exp(-lambda(k) * t) *
           std::cos(k * pi * x / length);
    return s;
  }

  double velocity(double x, double t) const {
    const double pi = std::numbers::pi;
    double g = 0.0;
    for (int k = 1; k < n; ++k)
      g += -coeff[static_cast<std::size_t>(k)] * std::exp(-lambda(k) * t) *
           (k * pi / length) * std::sin(k * pi * x / length);
    return -g / std::max(rho(x, t), floor);
  }

  double residual(double t) const {
    double r = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = (i + 0.5) * length / n;
      r = std::max(r, std::abs(rho(x, t) - mean));
    }
    return r / mean;
  }

  std::vector<double> advect(std::vector<double> xs, double tol) const {
    const double h = length / n;
    const double t0 = h * h;
    double t_prev = 0.0;
    for (int interval = 0; interval < 64; ++interval) {
      const double t_end = t0 * std::ldexp(1.0, interval);
      const int steps = 16;
      const double dt = (t_end - t_prev) / steps;
      for (int s = 0; s < steps; ++s) {
        const double ts = t_prev + s * dt;
        for (double& x : xs) {
          const double k1 = velocity(x, ts);
          const double k2 = velocity(x + 0.5 * dt * k1, ts + 0.5 * dt);
          const double k3 = velocity(x + 0.5 * dt * k2, ts + 0.5 * dt);
          const double k4 = velocity(x + dt * k3, ts + dt);
          x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
          x = std::min(std::max(x, 0.0), length);
        }
      }
      t_prev = t_end;
      if (residual(t_end) < tol) break;
    }
    return xs;
  }
};

// Decodes a Pruefer sequence into the n-1 edges of the labeled tree it
// encodes. Iterating over all n^(n-2) sequences enumerates every spanning
// tree of the complete graph exactly once (Cayley's bijection).
inline std::vector<std::pair<int, int>> prufer_decode(
    const std::vector<int>& seq, int n) {
  std::vector<int> degree(static_cast<std::size_t>(n), 1);
  for (const int s : seq) degree[static_cast<std::size_t>(s)]++;
  std::vector<std::pair<int, int>> edges;
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  for (const int s : seq) {
    for (int leaf = 0; leaf < n; ++leaf) {
      if (degree[static_cast<std::size_t>(leaf)] == 1 &&
          !used[static_cast<std::size_t>(leaf)]) {
        edges.push_back({leaf, s});
        used[static_cast<std::size_t>(leaf)] = 1;
        degree[static_cast<std::size_t>(s)]--;
        break;
      }
    }
  }
  int first = -1;
  for (int i = 0; i < n; ++i) {
    if (degree[static_cast<std::size_t>(i)] == 1 &&
        !used[static_cast<std::size_t>(i)]) {
      if (first < 0) {
        first = i;
      } else {
        edges.push_back({first, i});
      }
    }
  }
  return edges;
}

// Minimum spanning weight of the complete graph on d(i, j), by trying every
// spanning tree. d is addressed as a callable d(i, j).
template <class Dist>
double min_spanning_weight_by_enumeration(int n, Dist&& d) {
  if (n == 2) return d(0, 1);
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> seq(static_cast<std::size_t>(n - 2), 0);
  while (true) {
    double total = 0.0;
    for (const auto& [a, b] : prufer_decode(seq, n)) total += d(a, b);
    best = std::min(best, total);
    int pos = n - 3;
    while (pos >= 0 && seq[static_cast<std::size_t>(pos)] == n - 1) {
      seq[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++seq[static_cast<std::size_t>(pos)];
  }
  return best;
}

// Direct evaluation of Q = sum_c [ internal_c / m - (total_c / 2m)^2 ] over
// an index-edge list.
inline double oracle_modularity(
    int n, const std::vector<std::tuple<int, int, int>>& edges,
    const std::vector<int>& assign) {
  double m = 0.0;
  for (const auto& [a, b, w] : edges) m += static_cast<double>(w);
  if (m == 0.0) return 0.0;
  std::vector<double> internal(static_cast<std::size_t>(n), 0.0);
  std::vector<double> total(static_cast<std::size_t>(n), 0.0);
  for (const auto& [a, b, w] : edges) {
    const double wd = static_cast<double>(w);
    if (assign[static_cast<std::size_t>(a)] ==
        assign[static_cast<std::size_t>(b)])
      internal[static_cast<std::size_t>(
          assign[static_cast<std::size_t>(a)])] += wd;
    total[static_cast<std::size_t>(assign[static_cast<std::size_t>(a)])] += wd;
    total[static_cast<std::size_t>(assign[static_cast<std::size_t>(b)])] += wd;
  }
  double q = 0.0;
  for (int c = 0; c < n; ++c) {
    q += internal[static_cast<std::size_t>(c)] / m -
         (total[static_cast<std::size_t>(c)] / (2.0 * m)) *
             (total[static_cast<std::size_t>(c)] / (2.0 * m));
  }
  return q;
}

// Best modularity over every partition of n nodes, enumerated as restricted
// growth strings (each node joins an existing block or opens the next one).
inline double best_modularity_exhaustive(
    int n, const std::vector<std::tuple<int, int, int>>& edges) {
  std::vector<int> assign(static_cast<std::size_t>(n), 0);
  double best = -1.0;
  const auto walk = [&](auto&& self, int i, int blocks) -> void {
    if (i == n) {
      best = std::max(best, oracle_modularity(n, edges, assign));
      return;
    }
    for (int c = 0; c <= blocks; ++c) {
      assign[static_cast<std::size_t>(i)] = c;
      self(self, i + 1, std::max(blocks, c + 1));
    }
  };
  walk(walk, 0, 0);
  return best;
}

}  // namespace crunch::testing
