#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "error.hpp"

namespace vacant {

struct TorusGeometry {
  int d = 3;
  int n = 2;

  TorusGeometry() = default;
  TorusGeometry(int dim, int side) : d(dim), n(side) {
    require(d >= 1, "dimension must be >= 1");
    require(n >= 2, "side length must be >= 2");
    std::uint64_t v = 1;
    for (int j = 0; j < d; ++j) {
      require(v <= std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(n),
              "n^d overflows 64 bits");
      v *= static_cast<std::uint64_t>(n);
    }
    vertices_ = v;
  }

  std::uint64_t vertex_count() const { return vertices_; }
  double volume() const { return static_cast<double>(vertices_); }
  // Octant side: reduced coordinates min(x, n-x) lie in [0, n/2].
  int half() const { return n / 2 + 1; }

  friend bool operator==(const TorusGeometry& a, const TorusGeometry& b) {
    return a.d == b.d && a.n == b.n;
  }

 private:
  std::uint64_t vertices_ = 0;
};

using TorusPoint = std::vector<int>;

// Caps the number of vertices any table or visit map may allocate.
struct VertexBudget {
  std::uint64_t max_vertices = std::uint64_t{1} << 26;

  void check(const TorusGeometry& g, const std::string& what) const {
    if (g.vertex_count() > max_vertices)
      fail(errc::budget_exceeded, what + ": n^d = " + std::to_string(g.vertex_count()) +
                                      " exceeds budget " + std::to_string(max_vertices));
  }
};

inline int mod(long long x, int n) {
  const long long r = x % n;
  return static_cast<int>(r < 0 ? r + n : r);
}

inline TorusPoint reduce(const std::vector<long long>& coords, const TorusGeometry& g) {
  require(static_cast<int>(coords.size()) == g.d, "point has wrong dimension");
  TorusPoint p(coords.size());
  for (std::size_t j = 0; j < coords.size(); ++j) p[j] = mod(coords[j], g.n);
  return p;
}

inline bool valid(const TorusPoint& p, const TorusGeometry& g) {
  if (static_cast<int>(p.size()) != g.d) return false;
  return std::all_of(p.begin(), p.end(), [&](int x) { return x >= 0 && x < g.n; });
}

// Row-major: sum_j coords_j * n^{d-1-j}.
inline std::uint64_t index_of(const TorusPoint& p, const TorusGeometry& g) {
  std::uint64_t idx = 0;
  for (int j = 0; j < g.d; ++j) idx = idx * g.n + static_cast<std::uint64_t>(p[j]);
  return idx;
}

inline TorusPoint point_at(std::uint64_t idx, const TorusGeometry& g) {
  TorusPoint p(g.d);
  for (int j = g.d - 1; j >= 0; --j) {
    p[j] = static_cast<int>(idx % g.n);
    idx /= g.n;
  }
  return p;
}

inline std::vector<std::uint64_t> strides(const TorusGeometry& g) {
  std::vector<std::uint64_t> s(g.d);
  std::uint64_t v = 1;
  for (int j = g.d - 1; j >= 0; --j) {
    s[j] = v;
    v *= g.n;
  }
  return s;
}

inline int reduced(int x, int n) { return std::min(x, n - x); }

// Sorted per-coordinate distances; labels the hyperoctahedral orbit of p.
inline TorusPoint canonical(const TorusPoint& p, const TorusGeometry& g) {
  TorusPoint c(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) c[j] = reduced(mod(p[j], g.n), g.n);
  std::sort(c.begin(), c.end());
  return c;
}

inline double norm_p(const TorusPoint& p, const TorusGeometry& g, double q) {
  double s = 0;
  for (int x : p) s += std::pow(static_cast<double>(reduced(mod(x, g.n), g.n)), q);
  return std::pow(s, 1.0 / q);
}

inline double norm2(const TorusPoint& p, const TorusGeometry& g) {
  double s = 0;
  for (int x : p) {
    const double r = reduced(mod(x, g.n), g.n);
    s += r * r;
  }
  return std::sqrt(s);
}

inline long double factorial(int k) {
  long double f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// Number of distinct coordinate permutations of a sorted tuple.
inline double permutation_count(const TorusPoint& sorted) {
  long double c = factorial(static_cast<int>(sorted.size()));
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    c /= factorial(static_cast<int>(j - i));
    i = j;
  }
  return static_cast<double>(c);
}

// Number of torus points with reduced coordinate r along one axis.
inline int axis_multiplicity(int r, int n) { return (r == 0 || 2 * r == n) ? 1 : 2; }

struct Orbit {
  TorusPoint rep;  // sorted reduced coordinates
  double size = 0;
};

// One representative per orbit of the coordinate permutation / sign-flip group
// acting on Z_n^d. Sizes sum to n^d.
inline std::vector<Orbit> torus_orbits(const TorusGeometry& g) {
  std::vector<Orbit> out;
  TorusPoint cur(g.d, 0);
  const int top = g.n / 2;
  for (;;) {
    Orbit o{cur, permutation_count(cur)};
    for (int r : cur) o.size *= axis_multiplicity(r, g.n);
    out.push_back(o);
    int j = g.d - 1;
    while (j >= 0 && cur[j] == top) --j;
    if (j < 0) break;
    const int v = cur[j] + 1;
    for (int k = j; k < g.d; ++k) cur[k] = v;
  }
  return out;
}

// Orbits of Z^d (sorted absolute coordinates) inside the Euclidean ball of
// radius R, with the number of lattice points in each.
inline std::vector<Orbit> lattice_orbits(int d, double radius) {
  std::vector<Orbit> out;
  const int top = static_cast<int>(std::floor(radius));
  const double r2 = radius * radius;
  TorusPoint cur(d, 0);
  auto sq = [](const TorusPoint& p) {
    double s = 0;
    for (int x : p) s += static_cast<double>(x) * x;
    return s;
  };
  for (;;) {
    if (sq(cur) <= r2) {
      Orbit o{cur, permutation_count(cur)};
      for (int x : cur)
        if (x != 0) o.size *= 2;
      out.push_back(o);
    }
    // Next non-decreasing tuple whose norm may still fit.
    int j = d - 1;
    for (; j >= 0; --j) {
      if (cur[j] >= top) continue;
      TorusPoint trial = cur;
      for (int k = j; k < d; ++k) trial[k] = cur[j] + 1;
      if (sq(trial) <= r2) break;
    }
    if (j < 0) break;
    const int v = cur[j] + 1;
    for (int k = j; k < d; ++k) cur[k] = v;
  }
  return out;
}

}  // namespace vacant
