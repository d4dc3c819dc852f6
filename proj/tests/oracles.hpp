#pragma once

// Independent reference computations used by the tests. None of these go
// through the spectral or partial-fraction machinery.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include <vacant/torus.hpp>

namespace oracle {

using vacant::TorusGeometry;
using vacant::TorusPoint;

inline std::vector<std::vector<std::uint64_t>> neighbours(const TorusGeometry& g) {
  std::vector<std::vector<std::uint64_t>> nb(g.vertex_count());
  for (std::uint64_t i = 0; i < g.vertex_count(); ++i) {
    const TorusPoint p = vacant::point_at(i, g);
    for (int j = 0; j < g.d; ++j)
      for (int s : {1, -1}) {
        TorusPoint q = p;
        q[j] = vacant::mod(q[j] + s, g.n);
        nb[i].push_back(vacant::index_of(q, g));
      }
  }
  return nb;
}

// One application of the 1/2-lazy kernel to a mass vector (the kernel is symmetric).
inline std::vector<long double> apply_kernel(const std::vector<long double>& p,
                                             const std::vector<std::vector<std::uint64_t>>& nb, int d) {
  std::vector<long double> out(p.size());
  const long double w = 1.0L / (4.0L * d);
  for (std::size_t i = 0; i < p.size(); ++i) {
    long double s = 0.5L * p[i];
    for (auto j : nb[i]) s += w * p[j];
    out[i] = s;
  }
  return out;
}

// Pr(tau(A) > t) for t = 0..T from a uniform start, iterating the kernel on
// the complement of A.
inline std::vector<double> absorbing_tail(const TorusGeometry& g, const std::vector<TorusPoint>& targets,
                                          std::uint64_t T) {
  const auto nb = neighbours(g);
  std::vector<bool> absorb(g.vertex_count(), false);
  for (const auto& a : targets) absorb[vacant::index_of(a, g)] = true;
  std::vector<long double> p(g.vertex_count());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = absorb[i] ? 0 : 1.0L / g.vertex_count();
  std::vector<double> out;
  for (std::uint64_t t = 0;; ++t) {
    long double s = 0;
    for (auto x : p) s += x;
    out.push_back(static_cast<double>(s));
    if (t == T) break;
    p = apply_kernel(p, nb, g.d);
    for (std::size_t i = 0; i < p.size(); ++i)
      if (absorb[i]) p[i] = 0;
  }
  return out;
}

struct GreenPair {
  std::vector<double> g, gprime;  // over all xi, row-major
};

// g(xi) = sum_t (P^t(0,xi) - 1/N) and g'(xi) = sum_t t (P^t(0,xi) - 1/N),
// summed until the geometric remainder falls below tol.
inline GreenPair matrix_power_green(const TorusGeometry& g, double tol = 1e-12) {
  const auto nb = neighbours(g);
  const std::uint64_t N = g.vertex_count();
  const double s = std::sin(M_PI / g.n);
  const double rho = 1.0 - s * s / g.d;  // largest nontrivial kernel eigenvalue
  std::vector<long double> p(N, 0), acc(N, 0), accp(N, 0);
  p[0] = 1;
  const long double inv = 1.0L / N;
  for (std::uint64_t t = 0;; ++t) {
    for (std::uint64_t i = 0; i < N; ++i) {
      acc[i] += p[i] - inv;
      accp[i] += static_cast<long double>(t) * (p[i] - inv);
    }
    // Remainders: sum_{s>t} rho^s and sum_{s>t} s rho^s.
    const double r0 = std::pow(rho, t + 1) / (1 - rho);
    const double r1 = std::pow(rho, t + 1) * ((t + 1) / (1 - rho) + rho / ((1 - rho) * (1 - rho)));
    if (r0 < tol && r1 < tol) break;
    p = apply_kernel(p, nb, g.d);
  }
  GreenPair out;
  for (std::uint64_t i = 0; i < N; ++i) {
    out.g.push_back(static_cast<double>(acc[i]));
    out.gprime.push_back(static_cast<double>(accp[i]));
  }
  return out;
}

// All length-t lazy trajectories from every start, as (visited set, probability).
struct Trajectory {
  std::vector<std::uint64_t> visited;
  long double prob;
};

inline std::vector<Trajectory> all_trajectories(const TorusGeometry& g, int t) {
  const auto nb = neighbours(g);
  std::vector<Trajectory> out;
  const long double start = 1.0L / g.vertex_count();
  const long double hold = 0.5L, move = 1.0L / (4.0L * g.d);
  std::vector<std::uint64_t> path;
  auto rec = [&](auto&& self, std::uint64_t x, int left, long double pr) -> void {
    path.push_back(x);
    if (left == 0) {
      std::vector<std::uint64_t> v = path;
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
      out.push_back({v, pr});
    } else {
      self(self, x, left - 1, pr * hold);
      for (auto y : nb[x]) self(self, y, left - 1, pr * move);
    }
    path.pop_back();
  };
  for (std::uint64_t x = 0; x < g.vertex_count(); ++x) rec(rec, x, t, start);
  return out;
}

struct Moments {
  long double mean = 0, variance = 0;
};

// Exact mean and variance of V for ell in {1, 2} walks by enumerating start
// configurations and trajectories.
inline Moments enumerate_vacant(const TorusGeometry& g, int ell, int t) {
  const auto tr = all_trajectories(g, t);
  const long double N = g.vertex_count();
  long double m1 = 0, m2 = 0;
  if (ell == 1) {
    for (const auto& a : tr) {
      const long double v = N - a.visited.size();
      m1 += a.prob * v;
      m2 += a.prob * v * v;
    }
  } else {
    std::vector<char> mark(g.vertex_count(), 0);
    for (const auto& a : tr)
      for (const auto& b : tr) {
        std::size_t u = a.visited.size();
        for (auto x : a.visited) mark[x] = 1;
        for (auto x : b.visited) u += mark[x] ? 0 : 1;
        for (auto x : a.visited) mark[x] = 0;
        const long double v = N - u;
        const long double pr = a.prob * b.prob;
        m1 += pr * v;
        m2 += pr * v * v;
      }
  }
  return {m1, m2 - m1 * m1};
}

// Polynomial helpers for the companion-matrix and expansion oracles.
template <typename T>
std::vector<T> poly_mul(const std::vector<T>& a, const std::vector<T>& b) {
  std::vector<T> c(a.size() + b.size() - 1, T(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] = c[i + j] + a[i] * b[j];
  return c;
}

template <typename T>
std::vector<T> poly_add(std::vector<T> a, const std::vector<T>& b) {
  if (a.size() < b.size()) a.resize(b.size(), T(0));
  for (std::size_t i = 0; i < b.size(); ++i) a[i] = a[i] + b[i];
  return a;
}

// First T+1 power-series coefficients of num/den (den[0] != 0).
inline std::vector<long double> series_divide(const std::vector<long double>& num,
                                              const std::vector<long double>& den, std::size_t T) {
  std::vector<long double> q(T + 1, 0);
  for (std::size_t t = 0; t <= T; ++t) {
    long double s = t < num.size() ? num[t] : 0;
    for (std::size_t j = 1; j <= t && j < den.size(); ++j) s -= den[j] * q[t - j];
    q[t] = s / den[0];
  }
  return q;
}

// theta_{k,r,m}(a) read off as the coefficient of b^{k+r-m} in (1 - 2a + b)^k (a - b)^r.
template <typename T>
T theta_by_expansion(int k, int r, int m, const T& a) {
  std::vector<T> p{T(1)};
  for (int i = 0; i < k; ++i) p = poly_mul(p, std::vector<T>{T(1) - T(2) * a, T(1)});
  for (int i = 0; i < r; ++i) p = poly_mul(p, std::vector<T>{a, T(-1)});
  return p[k + r - m];
}

}  // namespace oracle
