#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <vector>

#include "error.hpp"
#include "numeric.hpp"
#include "torus.hpp"

namespace vacant {

inline double eigenvalue(const TorusPoint& v, const TorusGeometry& g) {
  double s = 0;
  for (int x : v) {
    const double sn = std::sin(pi * static_cast<double>(mod(x, g.n)) / g.n);
    s += sn * sn;
  }
  return s / g.d;
}

// cos(2 pi a b / n) with the argument reduced exactly before scaling.
inline long double cos_frac(long long a, long long b, int n) {
  const long long k = mod(a * b, n);
  return std::cos(2.0L * std::numbers::pi_v<long double> * k / n);
}

// Points r in [0, n/2]^d stand for the 2^d sign images of a torus point; the
// multiplicity counts how many distinct torus points each one represents.
class Octant {
 public:
  explicit Octant(const TorusGeometry& g) : g_(g), h_(g.half()) {
    size_ = 1;
    for (int j = 0; j < g.d; ++j) size_ *= static_cast<std::size_t>(h_);
  }

  int h() const { return h_; }
  std::size_t size() const { return size_; }

  TorusPoint coords(std::size_t idx) const {
    TorusPoint r(g_.d);
    for (int j = g_.d - 1; j >= 0; --j) {
      r[j] = static_cast<int>(idx % h_);
      idx /= h_;
    }
    return r;
  }

  std::size_t index(const TorusPoint& p) const {
    std::size_t idx = 0;
    for (int x : p) idx = idx * h_ + static_cast<std::size_t>(reduced(mod(x, g_.n), g_.n));
    return idx;
  }

  double multiplicity(std::size_t idx) const {
    double m = 1;
    for (int r : coords(idx)) m *= axis_multiplicity(r, g_.n);
    return m;
  }

 private:
  TorusGeometry g_;
  int h_;
  std::size_t size_;
};

struct LambdaGroup {
  double lambda = 0;
  double size = 0;                      // number of torus points in the group
  std::vector<std::uint32_t> members;   // octant indices
};

class EigenTable {
 public:
  static constexpr double merge_tolerance = 1e-12;

  explicit EigenTable(const TorusGeometry& g) : g_(g), oct_(g) {
    require(oct_.size() < (std::size_t{1} << 32), "octant too large");
    sin2_.resize(oct_.h());
    for (int r = 0; r < oct_.h(); ++r) {
      const double s = std::sin(pi * r / g.n);
      sin2_[r] = s * s;
    }
    lambda_.resize(oct_.size());
    mult_.resize(oct_.size());
    for (std::size_t i = 0; i < oct_.size(); ++i) {
      const TorusPoint r = oct_.coords(i);
      double s = 0;
      for (int x : r) s += sin2_[x];
      lambda_[i] = s / g.d;
      mult_[i] = oct_.multiplicity(i);
    }
    std::vector<std::uint32_t> order(oct_.size());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](auto a, auto b) { return lambda_[a] < lambda_[b]; });
    for (auto i : order) {
      if (i == 0) continue;  // v = 0 is the only point with lambda = 0
      if (groups_.empty() || lambda_[i] - groups_.back().lambda > merge_tolerance)
        groups_.push_back({lambda_[i], 0.0, {}});
      groups_.back().members.push_back(i);
      groups_.back().size += mult_[i];
    }
  }

  const TorusGeometry& geometry() const { return g_; }
  const Octant& octant() const { return oct_; }
  const std::vector<double>& octant_lambda() const { return lambda_; }
  const std::vector<double>& octant_multiplicity() const { return mult_; }
  // Distinct nonzero eigenvalues in increasing order.
  const std::vector<LambdaGroup>& groups() const { return groups_; }

  double operator()(const TorusPoint& v) const { return lambda_[oct_.index(v)]; }

  std::vector<double> full(const VertexBudget& budget = {}) const {
    budget.check(g_, "eigenvalue table");
    std::vector<double> out(g_.vertex_count());
    for (std::uint64_t i = 0; i < out.size(); ++i) out[i] = lambda_[oct_.index(point_at(i, g_))];
    return out;
  }

 private:
  TorusGeometry g_;
  Octant oct_;
  std::vector<double> sin2_, lambda_, mult_;
  std::vector<LambdaGroup> groups_;
};

inline double green_weight(double lambda) { return 1.0 / lambda; }
inline double green_deriv_weight(double lambda) { return (1.0 - lambda) / (lambda * lambda); }

// prod_j cos(2 pi xi_j r_j / n) for every octant point r.
inline std::vector<long double> octant_character(const TorusPoint& xi, const EigenTable& eig) {
  const TorusGeometry& g = eig.geometry();
  require(static_cast<int>(xi.size()) == g.d, "xi has wrong dimension");
  const int h = eig.octant().h();
  std::vector<std::vector<long double>> c(g.d, std::vector<long double>(h));
  for (int j = 0; j < g.d; ++j)
    for (int r = 0; r < h; ++r) c[j][r] = cos_frac(xi[j], r, g.n);
  std::vector<long double> out(eig.octant().size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::size_t idx = i;
    long double p = 1;
    for (int j = g.d - 1; j >= 0; --j) {
      p *= c[j][idx % h];
      idx /= h;
    }
    out[i] = p;
  }
  return out;
}

struct GreenTables {
  TorusGeometry geom;
  std::vector<double> g;       // row-major over the torus (empty for octant-only tables)
  std::vector<double> gprime;
  double g0 = 0;
  double gprime0 = 0;
  // Same values on the octant, indexed by reduced coordinates.
  std::vector<double> g_octant;
  std::vector<double> gprime_octant;

  double g_at(const TorusPoint& xi) const { return g_octant[Octant(geom).index(xi)]; }
  double gprime_at(const TorusPoint& xi) const { return gprime_octant[Octant(geom).index(xi)]; }
};

namespace detail {

// In-place separable cosine transform on the octant: out(xi) = sum_r in(r) prod cos.
inline void octant_cosine_transform(std::vector<long double>& a, const TorusGeometry& g) {
  const int h = g.half();
  std::vector<long double> c(static_cast<std::size_t>(h) * h);
  for (int x = 0; x < h; ++x)
    for (int r = 0; r < h; ++r) c[x * h + r] = cos_frac(x, r, g.n);
  std::vector<long double> line(h), res(h);
  std::size_t stride = 1;
  for (int axis = g.d - 1; axis >= 0; --axis) {
    const std::size_t block = stride * h;
    for (std::size_t base = 0; base < a.size(); base += block) {
      for (std::size_t off = 0; off < stride; ++off) {
        for (int r = 0; r < h; ++r) line[r] = a[base + off + r * stride];
        for (int x = 0; x < h; ++x) {
          CompensatedSum s;
          for (int r = 0; r < h; ++r) s += c[x * h + r] * line[r];
          res[x] = s.value();
        }
        for (int x = 0; x < h; ++x) a[base + off + x * stride] = res[x];
      }
    }
    stride = block;
  }
}

inline std::vector<double> expand_octant(const std::vector<double>& oct, const TorusGeometry& g) {
  const Octant o(g);
  std::vector<double> out(g.vertex_count());
  for (std::uint64_t i = 0; i < out.size(); ++i) out[i] = oct[o.index(point_at(i, g))];
  return out;
}

}  // namespace detail

// g_n and g_n' on the octant only; memory O((n/2+1)^d).
inline GreenTables build_green_octant(const TorusGeometry& g) {
  const EigenTable eig(g);
  const auto& lam = eig.octant_lambda();
  const auto& mult = eig.octant_multiplicity();
  std::vector<long double> w(lam.size()), wp(lam.size());
  for (std::size_t i = 1; i < lam.size(); ++i) {
    w[i] = mult[i] * static_cast<long double>(green_weight(lam[i]));
    wp[i] = mult[i] * static_cast<long double>(green_deriv_weight(lam[i]));
  }
  detail::octant_cosine_transform(w, g);
  detail::octant_cosine_transform(wp, g);
  GreenTables t;
  t.geom = g;
  const long double inv = 1.0L / g.vertex_count();
  t.g_octant.resize(w.size());
  t.gprime_octant.resize(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    t.g_octant[i] = static_cast<double>(w[i] * inv);
    t.gprime_octant[i] = static_cast<double>(wp[i] * inv);
  }
  t.g0 = t.g_octant[0];
  t.gprime0 = t.gprime_octant[0];
  return t;
}

inline GreenTables build_green_tables(const TorusGeometry& g, const VertexBudget& budget = {}) {
  budget.check(g, "green tables");
  GreenTables t = build_green_octant(g);
  t.g = detail::expand_octant(t.g_octant, g);
  t.gprime = detail::expand_octant(t.gprime_octant, g);
  return t;
}

// Direct O(n^{2d}) complex character sum, kept as a self-check for n <= 5.
inline GreenTables build_green_tables_naive(const TorusGeometry& g) {
  require(g.n <= 5 && g.vertex_count() <= 4096, "naive green tables limited to n <= 5");
  const std::uint64_t N = g.vertex_count();
  std::vector<TorusPoint> pts(N);
  std::vector<double> lam(N);
  for (std::uint64_t i = 0; i < N; ++i) {
    pts[i] = point_at(i, g);
    lam[i] = eigenvalue(pts[i], g);
  }
  GreenTables t;
  t.geom = g;
  t.g.resize(N);
  t.gprime.resize(N);
  const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  for (std::uint64_t x = 0; x < N; ++x) {
    std::complex<long double> s{0, 0}, sp{0, 0};
    for (std::uint64_t v = 1; v < N; ++v) {
      long long dot = 0;
      for (int j = 0; j < g.d; ++j) dot += static_cast<long long>(pts[x][j]) * pts[v][j];
      const long double ang = two_pi * mod(dot, g.n) / g.n;
      const std::complex<long double> e(std::cos(ang), std::sin(ang));
      s += e * static_cast<long double>(green_weight(lam[v]));
      sp += e * static_cast<long double>(green_deriv_weight(lam[v]));
    }
    if (std::fabs(s.imag()) / N > 1e-10 || std::fabs(sp.imag()) / N > 1e-10)
      fail(errc::non_convergence, "imaginary part of green sum did not cancel");
    t.g[x] = static_cast<double>(s.real() / N);
    t.gprime[x] = static_cast<double>(sp.real() / N);
  }
  t.g0 = t.g[0];
  t.gprime0 = t.gprime[0];
  const Octant o(g);
  t.g_octant.assign(o.size(), 0);
  t.gprime_octant.assign(o.size(), 0);
  for (std::size_t i = 0; i < o.size(); ++i) {
    const auto idx = index_of(o.coords(i), g);
    t.g_octant[i] = t.g[idx];
    t.gprime_octant[i] = t.gprime[idx];
  }
  return t;
}

// Single-point evaluation of g_n(xi) (or g_n'(xi)) without building tables.
inline double green_value_at(const TorusPoint& xi, const EigenTable& eig, bool deriv = false) {
  const auto ch = octant_character(xi, eig);
  const auto& lam = eig.octant_lambda();
  const auto& mult = eig.octant_multiplicity();
  CompensatedSum s;
  for (std::size_t i = 1; i < ch.size(); ++i)
    s += mult[i] * ch[i] * (deriv ? green_deriv_weight(lam[i]) : green_weight(lam[i]));
  return static_cast<double>(s.value() / eig.geometry().vertex_count());
}

inline double green_generating(const TorusPoint& xi, double z, const EigenTable& eig) {
  const auto ch = octant_character(xi, eig);
  const auto& lam = eig.octant_lambda();
  const auto& mult = eig.octant_multiplicity();
  CompensatedSum s;
  for (std::size_t i = 1; i < ch.size(); ++i) {
    const long double den = 1.0L - static_cast<long double>(z) * (1.0L - lam[i]);
    if (std::fabs(den) < 1e-12) fail(errc::pole_proximity, "z is within 1e-12 of a pole");
    s += mult[i] * ch[i] / den;
  }
  return static_cast<double>(s.value() / eig.geometry().vertex_count());
}

// Lower bound for f_n on tori with n >= 3, calibrated as half the smallest
// value observed over n in 6..12.
inline double f_floor(int d) {
  if (d == 3) return 0.6113;
  if (d == 4) return 0.5961;
  return 0.5740;
}

struct TwoPoint {
  double f = 0;
  double fprime = 0;
};

inline TwoPoint two_point_f(const TorusPoint& xi, const GreenTables& t) {
  TwoPoint out{0.5 * (t.g0 + t.g_at(xi)), 0.5 * (t.gprime0 + t.gprime_at(xi))};
  if (t.geom.d >= 3 && t.geom.n >= 3 && out.f < f_floor(t.geom.d))
    fail(errc::floor_violation, "f_n(xi) below the calibrated floor");
  const double tol = 1e-12 * std::max(1.0, t.gprime0);
  if (out.fprime < -tol || out.fprime > t.gprime0 + tol)
    fail(errc::floor_violation, "f_n'(xi) outside [0, f_n'(0)]");
  return out;
}

// n^{-d} sum_{v != 0} lambda_v^{-k}
inline double moment_sum(int k, const EigenTable& eig) {
  require(k >= 1, "moment order must be >= 1");
  const auto& lam = eig.octant_lambda();
  const auto& mult = eig.octant_multiplicity();
  CompensatedSum s;
  for (std::size_t i = 1; i < lam.size(); ++i) s += mult[i] * std::pow(static_cast<long double>(lam[i]), -k);
  return static_cast<double>(s.value() / eig.geometry().vertex_count());
}

}  // namespace vacant
