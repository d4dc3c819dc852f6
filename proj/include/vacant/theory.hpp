#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "error.hpp"
#include "lattice_green.hpp"
#include "numeric.hpp"
#include "rational_series.hpp"
#include "spectral.hpp"
#include "torus.hpp"

namespace vacant {

// t with (t+1)/n^d as close to u as possible; an exact half goes to the even t.
inline std::uint64_t t_from_u(double u, const TorusGeometry& g) {
  require(u >= 0 && std::isfinite(u), "u must be a finite nonnegative number");
  const double x = u * g.volume();
  const double fl = std::floor(x);
  double t1;
  if (x - fl == 0.5)
    t1 = std::fmod(fl - 1, 2.0) == 0 ? fl : fl + 1;  // t = t1 - 1 even
  else
    t1 = std::nearbyint(x);
  return t1 < 1 ? 0 : static_cast<std::uint64_t>(t1) - 1;
}

inline double u_from_t(std::uint64_t t, const TorusGeometry& g) {
  return (static_cast<double>(t) + 1.0) / g.volume();
}

// h_d(n): extra variance scale in low dimensions.
inline double variance_scale(const TorusGeometry& g) {
  if (g.d == 3) return g.n;
  if (g.d == 4) return std::log(static_cast<double>(g.n));
  return 1.0;
}

inline double exact_mean_vacant(const EigenTable& eig, int ell, std::uint64_t t) {
  require(ell >= 1, "walk count must be >= 1");
  const double a = exact_tail(eig, TorusPoint(eig.geometry().d, 0), t);
  return eig.geometry().volume() * std::pow(a, ell);
}

// N e^{-l u/g} + l e^{-l u/g} (u g'/g^3 + u/(2 g^2) - g'/g^2), u = (t+1)/N
inline double mean_expansion(const GreenTables& tab, int ell, std::uint64_t t) {
  const double N = tab.geom.volume(), u = (static_cast<double>(t) + 1) / N;
  const double g = tab.g0, gp = tab.gprime0;
  const double e = std::exp(-ell * u / g);
  return N * e + ell * e * (u * gp / (g * g * g) + u / (2 * g * g) - gp / (g * g));
}

// Exact hitting tails for one representative per hyperoctahedral orbit of xi.
class OrbitTailTable {
 public:
  explicit OrbitTailTable(const EigenTable& eig, unsigned width = default_width())
      : geom_(eig.geometry()), orbits_(torus_orbits(eig.geometry())) {
    std::vector<std::unique_ptr<TailDistribution>> built(orbits_.size());
    parallel_for(orbits_.size(), width, [&](std::size_t i) {
      built[i] = std::make_unique<TailDistribution>(eig, orbits_[i].rep);
    });
    for (auto& b : built) tails_.push_back(std::move(*b));
  }

  const TorusGeometry& geometry() const { return geom_; }
  const std::vector<Orbit>& orbits() const { return orbits_; }
  const std::vector<TailDistribution>& tails() const { return tails_; }
  // orbits_[0] is xi = 0.
  double tail_at_zero(std::uint64_t t) const { return tails_[0](t); }

 private:
  TorusGeometry geom_;
  std::vector<Orbit> orbits_;
  std::vector<TailDistribution> tails_;
};

// var V = N sum_xi (b(xi)^l - a^{2l}); zero walks give zero variance.
inline double exact_variance(const OrbitTailTable& tab, int ell, std::uint64_t t) {
  require(ell >= 0, "walk count must be >= 0");
  if (ell == 0) return 0;
  const long double a2 = std::pow(static_cast<long double>(tab.tail_at_zero(t)), 2 * ell);
  CompensatedSum s;
  for (std::size_t i = 0; i < tab.orbits().size(); ++i) {
    const long double b = tab.tails()[i](t);
    s += tab.orbits()[i].size * (std::pow(b, ell) - a2);
  }
  return static_cast<double>(tab.geometry().volume() * s.value());
}

inline double exact_variance(const TorusGeometry& g, int ell, std::uint64_t t) {
  return exact_variance(OrbitTailTable(EigenTable(g)), ell, t);
}

template <typename Scalar>
Scalar binomial(int n, int k) {
  if (k < 0 || k > n) return Scalar(0);
  Scalar c(1);
  for (int i = 1; i <= k; ++i) c = c * Scalar(n - k + i) / Scalar(i);
  return c;
}

template <typename Scalar>
Scalar int_pow(const Scalar& x, int e) {
  Scalar r(1);
  for (int i = 0; i < e; ++i) r = r * x;
  return r;
}

// theta_{k,r,m}(a) = sum_{j=(m-k)_+}^{min(r,m)} C(k,m-j) C(r,j) (1-2a)^{m-j} (-1)^{r-j} a^j
template <typename Scalar>
Scalar theta(int k, int r, int m, const Scalar& a) {
  require(k >= 0 && r >= 0 && m >= 0 && m <= k + r, "theta: need 0 <= m <= k + r");
  Scalar s(0);
  const Scalar b = Scalar(1) - Scalar(2) * a;
  for (int j = std::max(0, m - k); j <= std::min(r, m); ++j) {
    Scalar term = binomial<Scalar>(k, m - j) * binomial<Scalar>(r, j) * int_pow(b, m - j) * int_pow(a, j);
    if ((r - j) % 2) term = -term;
    s = s + term;
  }
  return s;
}

struct CovarianceQuery {
  unsigned I = 0;
  unsigned J = 0;

  int k() const { return std::popcount(I & J); }
  int r() const { return std::popcount(I ^ J); }
};

inline void check_query(const CovarianceQuery& q, int ell) {
  require(ell >= 1 && ell <= 16, "walk count must be in [1, 16]");
  const unsigned all = (1u << ell) - 1;
  require((q.I & ~all) == 0 && (q.J & ~all) == 0, "subset outside [ell]");
}

// cov(R^I, R^J) = sum_m theta_{k,r,m}(a) var_{l-m}, a = Pr(tau(0) > t).
inline double exact_covariance(const OrbitTailTable& tab, int ell, std::uint64_t t, const CovarianceQuery& q) {
  check_query(q, ell);
  const double a = tab.tail_at_zero(t);
  CompensatedSum s;
  for (int m = 0; m <= q.k() + q.r(); ++m) {
    if (ell - m <= 0) continue;
    s += theta<double>(q.k(), q.r(), m, a) * exact_variance(tab, ell - m, t);
  }
  return static_cast<double>(s.value());
}

struct AsymptoticParams {
  int d = 5;
  int ell = 1;
  double u = 1;
  double G0 = 0;

  static AsymptoticParams make(int d, int ell, double u) {
    require(d >= 3, "asymptotics need d >= 3");
    require(ell >= 1, "walk count must be >= 1");
    require(u > 0, "u must be positive");
    return {d, ell, u, lattice_green(TorusPoint(d, 0), d).value};
  }

  double w() const { return 2.0 * ell * u / G0; }
};

// nu_d(w) = 1/2 alpha_d w^2 e^{-w}, d = 3, 4.
inline double nu_low_d(double w, int d) {
  if (d != 3 && d != 4) fail(errc::dimension_unsupported, "nu_low_d needs d = 3 or 4");
  return 0.5 * alpha_constant(d).value * w * w * std::exp(-w);
}

struct NuResult {
  double value = 0;
  double bound = 0;
  double radius = 0;
  std::size_t orbits = 0;
};

struct NuOptions {
  double tolerance = 1e-6;
  double start_radius = 6;
  double radius_step = 2;
  double max_radius = 48;
  double fixed_radius = 0;  // > 0 evaluates at this radius only
};

// nu_d(w) for d >= 5:
//   e^{-w} [ w^2 (G0 + G'0) / (2 G0^2) + sum_xi r(xi) ]
//   r = rho(x) + (w^2/2) G^2 ((G0+G)^{-2} - G0^{-2}) + w G^2 (G - [xi=0]) / (G0^2 (G0+G))
// with x = w G / (G0 + G) and rho(x) = e^x - 1 - x - x^2/2. This equals the
// direct sum of e^x - 1 - x + w G^2 (G - [xi=0]) / (G0^2 (G0+G)) once
// sum_xi G^2 = G0 + G'0 is used; r = O(G^3) so the truncated tail is small.
inline NuResult nu_high_d(double w, int d, NuOptions opt = {}) {
  if (d < 5) fail(errc::dimension_unsupported, "nu_high_d needs d >= 5");
  require(w >= 0, "w must be >= 0");
  if (w == 0) return {};
  const double rmax = opt.fixed_radius > 0 ? opt.fixed_radius : opt.max_radius;
  const BesselGreen bg(d, static_cast<int>(rmax) + 1);
  const double G0 = bg.value(TorusPoint(d, 0)).value;
  const double Gp0 = bg.deriv(TorusPoint(d, 0)).value;
  auto summand = [&](double G, bool origin) {
    const double x = w * G / (G0 + G);
    const double rho = std::expm1(x) - x - 0.5 * x * x;
    return rho + 0.5 * w * w * G * G * (1 / ((G0 + G) * (G0 + G)) - 1 / (G0 * G0)) +
           w * G * G * (G - (origin ? 1.0 : 0.0)) / (G0 * G0 * (G0 + G));
  };
  // Tail of sum |r| over |xi| > R, using |r| <= K G^3 and G <= C |xi|^{2-d}.
  const double K = (w * w * w / 6) * std::exp(w) / std::pow(G0, 3) + 1.5 * w * w / std::pow(G0, 3) + w / std::pow(G0, 3);
  const double q = 3.0 * (d - 2);
  const double sphere = 2 * std::pow(pi, 0.5 * d) / std::tgamma(0.5 * d);
  const double asym_const = d * std::tgamma(0.5 * d - 1) / std::pow(pi, 0.5 * d);

  CompensatedSum total;
  double prev_radius = -1;
  std::size_t count = 0;
  for (double R = opt.fixed_radius > 0 ? opt.fixed_radius : opt.start_radius;; R += opt.radius_step) {
    double C = asym_const;
    for (const auto& o : lattice_orbits(d, R)) {
      double r2 = 0;
      for (int x : o.rep) r2 += static_cast<double>(x) * x;
      const double rad = std::sqrt(r2);
      if (rad <= prev_radius) continue;
      const double G = bg.value(o.rep).value;
      total += o.size * summand(G, r2 == 0);
      ++count;
      if (rad > R - 1) C = std::max(C, G * std::pow(rad, d - 2));
    }
    prev_radius = R;
    const double lo = R - 0.5 * std::sqrt(static_cast<double>(d));
    const double tail = K * C * C * C * std::pow(1 + std::sqrt(static_cast<double>(d)) / (2 * R), q) * sphere *
                        std::pow(lo, d - q) / (q - d);
    const double pre = std::exp(-w);
    if (pre * tail < opt.tolerance || opt.fixed_radius > 0) {
      const double head = w * w * (G0 + Gp0) / (2 * G0 * G0);
      return {static_cast<double>(pre * (head + total.value())), pre * tail, R, count};
    }
    if (R + opt.radius_step > opt.max_radius)
      fail(errc::non_convergence, "nu_high_d tail bound above tolerance at the maximum radius");
  }
}

inline double nu(double w, int d) {
  if (w <= 0) return 0;
  return d >= 5 ? nu_high_d(w, d).value : nu_low_d(w, d);
}

// sum_m theta_{k,r,m}(e^{-u/G0}) nu_d(2 (l - m) u / G0), with nu(0) = 0.
inline double covariance_limit(const AsymptoticParams& p, const CovarianceQuery& q) {
  check_query(q, p.ell);
  const double a = std::exp(-p.u / p.G0);
  CompensatedSum s;
  for (int m = 0; m <= q.k() + q.r(); ++m) {
    if (p.ell - m <= 0) continue;
    s += theta<double>(q.k(), q.r(), m, a) * nu(2.0 * (p.ell - m) * p.u / p.G0, p.d);
  }
  return static_cast<double>(s.value());
}

}  // namespace vacant
