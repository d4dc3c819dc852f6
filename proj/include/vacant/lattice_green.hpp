#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "csv.hpp"
#include "error.hpp"
#include "numeric.hpp"
#include "torus.hpp"

namespace vacant {

struct LatticeValue {
  double value = 0;
  double bound = 0;
  std::string method;
  double radius = 0;
};

// e^{-tau} I_m(tau) for m = 0..mmax by Miller's backward recurrence,
// normalized with e^{-tau}(I_0 + 2 sum_k I_k) = 1.
inline std::vector<double> scaled_bessel_i(double tau, int mmax) {
  std::vector<double> out(mmax + 1, 0.0);
  if (tau == 0) {
    out[0] = 1;
    return out;
  }
  const int start = mmax + 30 + static_cast<int>(std::sqrt(90.0 * tau)) + static_cast<int>(tau < 1 ? 0 : 10);
  std::vector<long double> v(start + 2, 0.0L);
  v[start + 1] = 0;
  v[start] = 1e-300L;
  for (int k = start; k >= 1; --k) {
    v[k - 1] = v[k + 1] + (2.0L * k / tau) * v[k];
    if (v[k - 1] > 1e300L) {
      for (int j = k - 1; j <= start; ++j) v[j] *= 1e-300L;
    }
  }
  long double norm = v[0];
  for (int k = start; k >= 1; --k) norm += 2 * v[k];
  for (int m = 0; m <= mmax; ++m) out[m] = static_cast<double>(v[m] / norm);
  return out;
}

// Large-argument coefficients: e^{-tau} I_m(tau) sqrt(2 pi tau) ~ sum_k (-1)^k a_k(m) tau^{-k}.
inline std::vector<long double> bessel_asymptotic_coefficients(int m, int terms) {
  std::vector<long double> a(terms, 0);
  a[0] = 1;
  const long double mu = 4.0L * m * m;
  for (int k = 1; k < terms; ++k) {
    const long double odd = 2.0L * k - 1;
    a[k] = -a[k - 1] * (mu - odd * odd) / (8.0L * k);
  }
  return a;  // signs already folded in
}

// G(xi) = 2d int_0^inf prod_j e^{-tau} I_{xi_j}(tau) dtau for the 1/2-lazy walk,
// and G'(xi) = (2d)^2 int tau prod_j ... dtau - G(xi) (finite for d >= 5).
class BesselGreen {
 public:
  static constexpr double cutoff = 65536.0;
  static constexpr int tail_terms = 10;

  BesselGreen(int d, int mmax) : d_(d), mmax_(mmax) {
    require(d >= 3, "lattice Green function needs d >= 3");
    build(fine_, boost::math::quadrature::gauss<long double, 30>::abscissa(),
          boost::math::quadrature::gauss<long double, 30>::weights());
    build(coarse_, boost::math::quadrature::gauss<long double, 20>::abscissa(),
          boost::math::quadrature::gauss<long double, 20>::weights());
  }

  int dimension() const { return d_; }
  int max_coordinate() const { return mmax_; }

  LatticeValue value(const TorusPoint& xi) const { return evaluate(xi, false); }

  LatticeValue deriv(const TorusPoint& xi) const {
    if (d_ < 5) fail(errc::dimension_unsupported, "G' diverges for d < 5");
    return evaluate(xi, true);
  }

 private:
  struct Rule {
    std::vector<double> tau, weight;
    std::vector<std::vector<double>> table;  // table[m][node]
  };

  template <typename A, typename W>
  void build(Rule& rule, const A& abscissa, const W& weights) {
    std::vector<std::pair<double, double>> panels{{0.0, 1.0}};
    for (double a = 1; a < cutoff; a *= 2) panels.emplace_back(a, 2 * a);
    for (auto [a, b] : panels) {
      const long double mid = 0.5L * (a + b), half = 0.5L * (b - a);
      for (std::size_t i = 0; i < abscissa.size(); ++i) {
        const long double x = abscissa[i];
        for (int sgn : {-1, 1}) {
          if (x == 0 && sgn < 0) continue;
          rule.tau.push_back(static_cast<double>(mid + sgn * half * x));
          rule.weight.push_back(static_cast<double>(half * weights[i]));
        }
      }
    }
    rule.table.assign(mmax_ + 1, std::vector<double>(rule.tau.size()));
    for (std::size_t q = 0; q < rule.tau.size(); ++q) {
      const auto col = scaled_bessel_i(rule.tau[q], mmax_);
      for (int m = 0; m <= mmax_; ++m) rule.table[m][q] = col[m];
    }
  }

  long double integrate(const Rule& rule, const std::vector<int>& m, bool weighted) const {
    CompensatedSum s;
    for (std::size_t q = 0; q < rule.tau.size(); ++q) {
      long double p = rule.weight[q];
      for (int mj : m) p *= rule.table[mj][q];
      if (weighted) p *= rule.tau[q];
      s += p;
    }
    return s.value();
  }

  // int_T^inf tau^e prod_j e^{-tau} I_{m_j}(tau) dtau from the product of the
  // asymptotic series; returns the value and the size of its last term.
  std::pair<long double, long double> tail(const std::vector<int>& m, bool weighted) const {
    std::vector<long double> q(tail_terms, 0);
    q[0] = 1;
    for (int mj : m) {
      const auto a = bessel_asymptotic_coefficients(mj, tail_terms);
      std::vector<long double> r(tail_terms, 0);
      for (int i = 0; i < tail_terms; ++i)
        for (int j = 0; i + j < tail_terms; ++j) r[i + j] += q[i] * a[j];
      q = r;
    }
    const long double T = cutoff, e = weighted ? 1 : 0, half_d = 0.5L * d_;
    const long double pref = std::pow(2.0L * std::numbers::pi_v<long double>, -half_d);
    long double sum = 0, last = 0;
    for (int k = 0; k < tail_terms; ++k) {
      const long double p = half_d + k - e - 1;
      last = pref * q[k] * std::pow(T, -p) / p;
      sum += last;
    }
    return {sum, std::fabs(last)};
  }

  LatticeValue evaluate(const TorusPoint& xi, bool deriv) const {
    require(static_cast<int>(xi.size()) == d_, "xi has wrong dimension");
    std::vector<int> m(d_);
    for (int j = 0; j < d_; ++j) {
      m[j] = std::abs(xi[j]);
      require(m[j] <= mmax_, "coordinate exceeds Bessel table range");
    }
    const long double s2d = 2.0L * d_;
    auto [t0, t0err] = tail(m, false);
    const long double g_fine = s2d * (integrate(fine_, m, false) + t0);
    const long double g_coarse = s2d * (integrate(coarse_, m, false) + t0);
    LatticeValue out;
    out.method = "bessel";
    out.radius = cutoff;
    if (!deriv) {
      out.value = static_cast<double>(g_fine);
      out.bound = static_cast<double>(std::fabs(g_fine - g_coarse) + s2d * t0err + 1e-14L * g_fine);
      return out;
    }
    auto [t1, t1err] = tail(m, true);
    const long double w_fine = s2d * s2d * (integrate(fine_, m, true) + t1);
    const long double w_coarse = s2d * s2d * (integrate(coarse_, m, true) + t1);
    out.value = static_cast<double>(w_fine - g_fine);
    out.bound = static_cast<double>(std::fabs(w_fine - w_coarse) + std::fabs(g_fine - g_coarse) +
                                    s2d * s2d * t1err + s2d * t0err + 1e-14L * w_fine);
    return out;
  }

  int d_;
  int mmax_;
  Rule fine_, coarse_;
};

// Canonical key: sorted absolute coordinates.
inline std::vector<int> lattice_canonical(const TorusPoint& xi) {
  std::vector<int> c(xi.size());
  for (std::size_t j = 0; j < xi.size(); ++j) c[j] = std::abs(xi[j]);
  std::sort(c.begin(), c.end());
  return c;
}

// Shared store of computed G / G' values keyed by (d, canonical xi).
class LatticeGreenCache {
 public:
  struct Entry {
    LatticeValue g;
    bool has_deriv = false;
    LatticeValue gprime;
  };

  static LatticeGreenCache& global() {
    static LatticeGreenCache cache;
    return cache;
  }

  LatticeValue green(const TorusPoint& xi, int d) { return lookup(xi, d, false); }
  LatticeValue green_deriv(const TorusPoint& xi, int d) {
    if (d < 5) fail(errc::dimension_unsupported, "G' diverges for d < 5");
    return lookup(xi, d, true);
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
  }

  // CSV: d, canonical xi, G, Gprime-or-NA, bound, method, radius
  void write_csv(std::ostream& os) const {
    std::shared_lock lock(mutex_);
    CsvWriter w(os);
    w.row({"d", "xi", "G", "Gprime", "bound", "method", "radius"});
    for (const auto& [key, e] : entries_) {
      std::string xi;
      for (std::size_t j = 0; j < key.second.size(); ++j) xi += (j ? " " : "") + std::to_string(key.second[j]);
      const double bound = e.has_deriv ? std::max(e.g.bound, e.gprime.bound) : e.g.bound;
      w.row({std::to_string(key.first), xi, format_double(e.g.value),
             e.has_deriv ? format_double(e.gprime.value) : "NA", format_double(bound), e.g.method,
             format_double(e.g.radius)});
    }
  }

 private:
  using Key = std::pair<int, std::vector<int>>;

  LatticeValue lookup(const TorusPoint& xi, int d, bool deriv) {
    require(static_cast<int>(xi.size()) == d, "xi has wrong dimension");
    Key key{d, lattice_canonical(xi)};
    {
      std::shared_lock lock(mutex_);
      auto it = entries_.find(key);
      if (it != entries_.end() && (!deriv || it->second.has_deriv))
        return deriv ? it->second.gprime : it->second.g;
    }
    std::unique_lock lock(mutex_);
    const int need = key.second.empty() ? 0 : key.second.back();
    auto& solver = solvers_[d];
    if (!solver || solver->max_coordinate() < need)
      solver = std::make_shared<BesselGreen>(d, std::max(64, 2 * need));
    Entry& e = entries_[key];
    e.g = solver->value(key.second);
    if (d >= 5) {
      e.gprime = solver->deriv(key.second);
      e.has_deriv = true;
    }
    return deriv ? e.gprime : e.g;
  }

  mutable std::shared_mutex mutex_;
  std::map<Key, Entry> entries_;
  std::map<int, std::shared_ptr<BesselGreen>> solvers_;
};

inline LatticeValue lattice_green(const TorusPoint& xi, int d) {
  require(d >= 3, "lattice Green function needs d >= 3");
  return LatticeGreenCache::global().green(xi, d);
}

inline LatticeValue lattice_green_deriv(const TorusPoint& xi, int d) {
  return LatticeGreenCache::global().green_deriv(xi, d);
}

// g_n(xi) (or g_n'(xi)) by streaming the octant sum; memory O(d n).
inline long double torus_green_streamed(const TorusPoint& xi, int d, int n, bool deriv) {
  require(static_cast<int>(xi.size()) == d, "xi has wrong dimension");
  const int h = n / 2 + 1;
  std::vector<std::vector<long double>> lam(d, std::vector<long double>(h)),
      amp(d, std::vector<long double>(h));
  for (int j = 0; j < d; ++j)
    for (int r = 0; r < h; ++r) {
      const long double s = std::sin(std::numbers::pi_v<long double> * r / n);
      lam[j][r] = s * s / d;
      const long long k = mod(static_cast<long long>(xi[j]) * r, n);
      amp[j][r] = axis_multiplicity(r, n) * std::cos(2.0L * std::numbers::pi_v<long double> * k / n);
    }
  CompensatedSum total;
  std::vector<int> r(d, 0);
  std::vector<long double> lpre(d + 1, 0), apre(d + 1, 1);
  // Iterate the octant with prefix sums over the first d-1 axes.
  for (;;) {
    for (int j = 0; j < d - 1; ++j) {
      lpre[j + 1] = lpre[j] + lam[j][r[j]];
      apre[j + 1] = apre[j] * amp[j][r[j]];
    }
    long double line = 0;
    for (int x = 0; x < h; ++x) {
      const long double l = lpre[d - 1] + lam[d - 1][x];
      if (l == 0) continue;
      const long double w = deriv ? (1 - l) / (l * l) : 1 / l;
      line += apre[d - 1] * amp[d - 1][x] * w;
    }
    total += line;
    int j = d - 2;
    while (j >= 0 && r[j] == h - 1) r[j--] = 0;
    if (j < 0) break;
    ++r[j];
  }
  return total.value() / std::pow(static_cast<long double>(n), d);
}

struct ExtrapolationOptions {
  int n0 = 0;     // 0 picks 16 for d <= 4 and 8 otherwise
  int n_max = 0;  // 0 picks 512 / 256 / 128 / 64 for d = 3 / 4 / 5 / 6+
  double tolerance = 1e-7;
};

// Richardson extrapolation of g_n(xi) along n0, 2 n0, 4 n0, ... with error
// terms n^{-p}, n^{-p-2}, ...; p = d - 2 for G and d - 4 for G'.
inline LatticeValue lattice_green_extrapolated(const TorusPoint& xi, int d, bool deriv = false,
                                               ExtrapolationOptions opt = {}) {
  require(d >= 3, "lattice Green function needs d >= 3");
  if (deriv && d < 5) fail(errc::dimension_unsupported, "G' diverges for d < 5");
  if (opt.n0 == 0) opt.n0 = d <= 4 ? 16 : 8;
  if (opt.n_max == 0) opt.n_max = d == 3 ? 512 : d == 4 ? 256 : d == 5 ? 128 : 64;
  int maxc = 0;
  for (int x : xi) maxc = std::max(maxc, std::abs(x));
  require(2 * maxc < opt.n0, "xi does not fit on the starting torus");
  const double p = deriv ? d - 4 : d - 2;
  std::vector<double> ns, vals, exps;
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int n = opt.n0; n <= opt.n_max; n *= 2) {
    ns.push_back(n);
    vals.push_back(static_cast<double>(torus_green_streamed(xi, d, n, deriv)));
    if (ns.size() >= 2) exps.push_back(p + 2.0 * (ns.size() - 2));
    const double est = richardson(ns, vals, exps);
    if (ns.size() >= 3 && std::fabs(est - prev) < opt.tolerance)
      return {est, 10 * std::fabs(est - prev), "torus-richardson", static_cast<double>(n)};
    prev = est;
  }
  fail(errc::non_convergence, "torus extrapolation did not settle by n = " + std::to_string(opt.n_max));
}

// sum over Z^3 \ {0} of |v|^{-4} from the theta-function representation of
// the Epstein zeta function at s = 2.
inline LatticeValue epstein_inverse_fourth_3d() {
  using boost::math::quadrature::gauss_kronrod;
  const long double pi_l = std::numbers::pi_v<long double>;
  auto integrand = [&](long double t) {
    long double eps = 0;
    for (int k = 1; k <= 12; ++k) eps += 2 * std::exp(-pi_l * k * k * t);
    const long double theta3 = std::expm1(3 * std::log1p(eps));
    return (t + std::pow(t, -1.5L)) * theta3;  // t^{s-1} + t^{d/2-s-1}
  };
  long double err = 0;
  const long double I = gauss_kronrod<long double, 61>::integrate(
      integrand, 1.0L, std::numeric_limits<long double>::infinity(), 15, 1e-18L, &err);
  const long double z = pi_l * pi_l * (1.5L + I);
  return {static_cast<double>(z), static_cast<double>(pi_l * pi_l * err + 1e-13L), "epstein-theta", 0};
}

struct ShellSum {
  double partial = 0;  // sum over 0 < |v| <= R
  double lower = 0;    // partial + 4 pi / (R + sqrt 3)
  double upper = 0;    // partial + 4 pi / (R - sqrt 3)
};

inline ShellSum shell_sum_inverse_fourth_3d(int R) {
  require(R >= 2, "shell radius must be >= 2");
  CompensatedSum s;
  const long long R2 = static_cast<long long>(R) * R;
  for (int x = -R; x <= R; ++x)
    for (int y = -R; y <= R; ++y) {
      const long long xy = static_cast<long long>(x) * x + static_cast<long long>(y) * y;
      if (xy > R2) continue;
      for (int z = -R; z <= R; ++z) {
        const long long q = xy + static_cast<long long>(z) * z;
        if (q == 0 || q > R2) continue;
        s += 1.0L / (static_cast<long double>(q) * q);
      }
    }
  const double part = static_cast<double>(s.value());
  const double r3 = std::sqrt(3.0);
  return {part, part + 4 * pi / (R + r3), part + 4 * pi / (R - r3)};
}

// Number of representations of m as a sum of four squares, for m <= limit:
// r_4(m) = 8 * sum of divisors of m not divisible by 4.
inline std::vector<std::uint64_t> four_square_counts(std::uint64_t limit) {
  std::vector<std::uint32_t> s(limit + 1, 0);
  for (std::uint64_t q = 1; q <= limit; ++q) {
    if (q % 4 == 0) continue;
    for (std::uint64_t m = q; m <= limit; m += q) s[m] += static_cast<std::uint32_t>(q);
  }
  std::vector<std::uint64_t> r(limit + 1);
  r[0] = 1;
  for (std::uint64_t m = 1; m <= limit; ++m) r[m] = 8ull * s[m];
  return r;
}

struct LogSlopeFit {
  double slope = 0;
  double intercept = 0;
  double half_range_slope = 0;
  std::vector<double> radii, sums;
};

// S(n) = sum_{0 < |v| <= n} |v|^{-4} over Z^4 at n = 2^6..2^12, fitted to
// c log n + b by least squares.
inline LogSlopeFit inverse_fourth_log_fit_4d(int log2_min = 6, int log2_max = 12) {
  const std::uint64_t nmax = std::uint64_t{1} << log2_max;
  const auto r4 = four_square_counts(nmax * nmax);
  LogSlopeFit fit;
  CompensatedSum s;
  std::uint64_t m = 1;
  for (int e = log2_min; e <= log2_max; ++e) {
    const std::uint64_t n = std::uint64_t{1} << e;
    for (; m <= n * n; ++m) s += static_cast<long double>(r4[m]) / (static_cast<long double>(m) * m);
    fit.radii.push_back(static_cast<double>(n));
    fit.sums.push_back(static_cast<double>(s.value()));
  }
  auto ls = [&](std::size_t from) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double k = static_cast<double>(fit.radii.size() - from);
    for (std::size_t i = from; i < fit.radii.size(); ++i) {
      const double x = std::log(fit.radii[i]), y = fit.sums[i];
      sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    return std::pair{slope, (sy - slope * sx) / k};
  };
  std::tie(fit.slope, fit.intercept) = ls(0);
  fit.half_range_slope = ls(fit.radii.size() / 2).first;
  return fit;
}

// alpha_3 = 9/(pi^4 G(0)^2) sum |v|^{-4};  alpha_4 = 16/(pi^4 G(0)^2) lim S(n)/log n.
inline LatticeValue alpha_constant(int d) {
  if (d != 3 && d != 4) fail(errc::dimension_unsupported, "alpha_d is defined for d = 3, 4");
  static std::mutex m;
  static std::map<int, LatticeValue> memo;
  std::lock_guard lock(m);
  if (auto it = memo.find(d); it != memo.end()) return it->second;
  const LatticeValue g0 = lattice_green(TorusPoint(d, 0), d);
  const double scale = 1.0 / (std::pow(pi, 4) * g0.value * g0.value);
  LatticeValue out;
  if (d == 3) {
    const LatticeValue z = epstein_inverse_fourth_3d();
    out.value = 9 * scale * z.value;
    out.bound = 9 * scale * z.bound + out.value * 2 * g0.bound / g0.value;
    out.method = "epstein-theta";
  } else {
    const LogSlopeFit fit = inverse_fourth_log_fit_4d();
    out.value = 16 * scale * fit.slope;
    out.bound = 16 * scale * std::fabs(fit.slope - fit.half_range_slope) +
                out.value * 2 * g0.bound / g0.value;
    out.method = "jacobi-r4-fit";
    out.radius = fit.radii.back();
  }
  memo[d] = out;
  return out;
}

}  // namespace vacant
