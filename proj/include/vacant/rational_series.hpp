#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "error.hpp"
#include "numeric.hpp"
#include "spectral.hpp"
#include "torus.hpp"

namespace vacant {

// f(z) = c + sum_i alpha_i / (zeta_i - z) with zeta_i = 1 + sigma_i. Poles are
// stored as offsets from 1 so that zeta_i - 1 keeps full relative precision.
class PoleSum {
 public:
  PoleSum() = default;

  // Drops zero weights; rejects negative weights and non-increasing poles.
  PoleSum(double c, const std::vector<double>& alpha, const std::vector<double>& sigma) : c_(c) {
    require(alpha.size() == sigma.size(), "pole sum: weight/pole count mismatch");
    require(c >= 0, "pole sum: constant must be >= 0");
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      require(alpha[i] >= 0, "pole sum: weights must be >= 0");
      require(sigma[i] > 0, "pole sum: poles must exceed 1");
      require(i == 0 || sigma[i] > sigma[i - 1], "pole sum: poles must increase");
      if (alpha[i] > 0) {
        alpha_.push_back(alpha[i]);
        sigma_.push_back(sigma[i]);
      }
    }
  }

  static PoleSum from_poles(double c, const std::vector<double>& alpha,
                            const std::vector<double>& zeta) {
    std::vector<double> s(zeta.size());
    for (std::size_t i = 0; i < zeta.size(); ++i) s[i] = zeta[i] - 1.0;
    return PoleSum(c, alpha, s);
  }

  std::size_t size() const { return alpha_.size(); }
  double constant() const { return c_; }
  const std::vector<double>& weights() const { return alpha_; }
  const std::vector<double>& offsets() const { return sigma_; }
  double zeta(std::size_t i) const { return 1.0 + sigma_[i]; }

  // f(1 + s)
  long double at_offset(long double s) const {
    long double acc = c_;
    for (std::size_t i = 0; i < alpha_.size(); ++i) acc += alpha_[i] / (sigma_[i] - s);
    return acc;
  }

  long double deriv_at_offset(long double s) const {
    long double acc = 0;
    for (std::size_t i = 0; i < alpha_.size(); ++i) {
      const long double q = sigma_[i] - s;
      acc += alpha_[i] / (q * q);
    }
    return acc;
  }

  double operator()(double z) const { return static_cast<double>(at_offset(static_cast<long double>(z) - 1.0L)); }

 private:
  double c_ = 0;
  std::vector<double> alpha_;
  std::vector<double> sigma_;
};

// A numerator fhat sharing the poles of f; weights may have any sign.
struct PoleNumerator {
  double c = 0;
  std::vector<double> alpha;

  long double at_offset(const PoleSum& f, long double s) const {
    long double acc = c;
    for (std::size_t i = 0; i < alpha.size(); ++i) acc += alpha[i] / (f.offsets()[i] - s);
    return acc;
  }

  static PoleNumerator same_as(const PoleSum& f) { return {f.constant(), f.weights()}; }
};

// Roots of alpha_0 + (1 - z) f(z) and the partial-fraction weights of
// fhat / (alpha_0 + (1 - z) f).
struct RootSet {
  std::vector<double> s;        // gamma_i - 1, increasing
  std::vector<double> weight;   // a_i
  double error_coefficient = 0; // max_i |fhat(gamma_i) / f(gamma_i)|
  double first_pole_offset = std::numeric_limits<double>::infinity();  // zeta_1 - 1
  double polynomial_part = 0;   // constant term when the rational function is not proper

  std::size_t size() const { return s.size(); }
  double gamma(std::size_t i) const { return 1.0 + s[i]; }
};

namespace detail {

// Zero of phi(s) = f(s) - alpha0 / s on (lo, hi), where phi rises from -inf
// to +inf (or to a positive limit on the last interval).
inline double solve_interval(const PoleSum& f, long double alpha0, long double lo, long double hi,
                             long double start) {
  auto phi = [&](long double s) { return f.at_offset(s) - alpha0 / s; };
  auto dphi = [&](long double s) { return f.deriv_at_offset(s) + alpha0 / (s * s); };
  const long double lo0 = lo, hi0 = hi;
  long double s = std::clamp(start, lo, hi);
  if (!(s > lo && s < hi)) s = 0.5L * (lo + hi);
  for (int iter = 0; iter < 400; ++iter) {
    const long double v = phi(s);
    if (!std::isfinite(static_cast<double>(v))) break;
    if (v == 0) return static_cast<double>(s);
    if (v > 0)
      hi = s;
    else
      lo = s;
    long double next = s - v / dphi(s);
    if (!(next > lo && next < hi) || !std::isfinite(static_cast<double>(next))) next = 0.5L * (lo + hi);
    const long double step = std::fabs(next - s);
    s = next;
    if (step <= 1e-15L * std::fabs(s) || hi - lo <= 1e-15L * std::fabs(s)) break;
  }
  if (!(s > lo0 && s < hi0) || !std::isfinite(static_cast<double>(s)))
    fail(errc::bracket_failure, "root did not stay inside its pole interval");
  return static_cast<double>(s);
}

}  // namespace detail

inline RootSet find_roots(const PoleSum& f, double alpha0, const PoleNumerator& fhat) {
  require(alpha0 > 0, "alpha_0 must be positive");
  require(fhat.alpha.size() == f.size(), "numerator must share the poles of f");
  const auto& sig = f.offsets();
  const std::size_t k = f.size();
  RootSet rs;
  if (k > 0) rs.first_pole_offset = sig[0];

  auto sign_check = [&](long double lo, long double hi) {
    // phi is -inf at lo+ and +inf at hi-; probe just inside both ends.
    const long double w = hi - lo;
    const long double a = lo + 1e-9L * w, b = hi - 1e-9L * w;
    const long double pa = f.at_offset(a) - alpha0 / a, pb = f.at_offset(b) - alpha0 / b;
    if (!(pa < pb)) fail(errc::bracket_failure, "no sign change across pole interval");
  };

  for (std::size_t i = 0; i < k; ++i) {
    long double lo = i == 0 ? 0.0L : sig[i - 1];
    long double hi = sig[i];
    sign_check(lo, hi);
    long double start = 0.5L * (lo + hi);
    if (i == 0) {
      const long double sbar = alpha0 / f.at_offset(0.0L);
      if (sbar < hi) {
        const long double low = alpha0 / f.at_offset(sbar);
        start = 0.5L * (low + sbar);
        lo = std::max(lo, low * (1 - 1e-15L));
        hi = std::min(hi, sbar * (1 + 1e-15L));
        if (!(lo < hi)) {
          lo = 0;
          hi = sig[0];
        }
      }
    }
    rs.s.push_back(detail::solve_interval(f, alpha0, lo, hi, start));
  }
  // With c > 0, phi tends to c > 0 beyond the last pole: one more root.
  if (f.constant() > 0) {
    const long double lo = k ? sig[k - 1] : 0.0L;
    long double hi = std::max<long double>(2 * lo, alpha0 / f.constant());
    if (hi <= lo) hi = lo + 1;
    int grow = 0;
    while (f.at_offset(hi) - alpha0 / hi <= 0) {
      hi = 2 * hi + 1;
      if (++grow > 200) fail(errc::bracket_failure, "no root beyond the last pole");
    }
    rs.s.push_back(detail::solve_interval(f, alpha0, lo, hi, 0.5L * (lo + hi)));
  }
  if (rs.s.empty()) fail(errc::degenerate_spectrum, "pole sum has no poles and no constant");

  for (double s : rs.s) {
    const long double fv = f.at_offset(s);
    const long double num = fhat.at_offset(f, s);
    rs.weight.push_back(static_cast<double>(num / (fv + s * f.deriv_at_offset(s))));
    rs.error_coefficient = std::max(rs.error_coefficient, static_cast<double>(std::fabs(num / fv)));
  }
  if (f.constant() == 0 && fhat.c != 0) {
    long double den = alpha0;
    for (double a : f.weights()) den += a;
    rs.polynomial_part = static_cast<double>(fhat.c / den);
  }
  return rs;
}

inline RootSet find_roots(const PoleSum& f, double alpha0) {
  return find_roots(f, alpha0, PoleNumerator::same_as(f));
}

struct Coefficient {
  double full = 0;      // sum_i a_i gamma_i^{-t-1}
  double one_term = 0;  // a_1 gamma_1^{-t-1}
  double bound = 0;     // max|fhat/f| zeta_1^{-t}
};

inline Coefficient coefficient_at(const RootSet& rs, std::uint64_t t) {
  Coefficient out;
  const long double e = static_cast<long double>(t) + 1.0L;
  CompensatedSum s;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const long double term = rs.weight[i] * std::exp(-e * std::log1p(static_cast<long double>(rs.s[i])));
    s += term;
    if (i == 0) out.one_term = static_cast<double>(term);
  }
  if (t == 0) s += rs.polynomial_part;
  out.full = static_cast<double>(s.value());
  out.bound = std::isfinite(rs.first_pole_offset)
                  ? rs.error_coefficient *
                        static_cast<double>(std::exp(-static_cast<long double>(t) *
                                                     std::log1p(static_cast<long double>(rs.first_pole_offset))))
                  : 0.0;
  return out;
}

// Weights whose cosine sum falls below this fraction of the group size are
// treated as exact zeros.
inline constexpr double pole_drop_tolerance = 1e-12;

// f_n(xi; z) = 1/2 (g_n(0; z) + g_n(xi; z)) as a pole sum.
inline PoleSum pole_sum_of_f(const TorusPoint& xi, const EigenTable& eig) {
  const auto ch = octant_character(xi, eig);
  const auto& mult = eig.octant_multiplicity();
  const long double inv = 1.0L / eig.geometry().vertex_count();
  long double c = 0;
  std::vector<double> alpha, sigma;
  for (const auto& grp : eig.groups()) {
    CompensatedSum w;
    for (auto m : grp.members) w += 0.5L * mult[m] * (1.0L + ch[m]);
    const long double W = w.value();
    if (W <= pole_drop_tolerance * grp.size) continue;
    const long double lhat = 1.0L - grp.lambda;
    if (std::fabs(lhat) < EigenTable::merge_tolerance) {
      c += W * inv;
      continue;
    }
    alpha.push_back(static_cast<double>(W * inv / lhat));
    sigma.push_back(static_cast<double>(grp.lambda / lhat));
  }
  if (alpha.empty()) fail(errc::degenerate_spectrum, "all pole weights vanish");
  return PoleSum(static_cast<double>(c), alpha, sigma);
}

// Survival function of the hitting time of {0, xi} from a uniform start.
class TailDistribution {
 public:
  TailDistribution(const EigenTable& eig, const TorusPoint& xi)
      : geom_(eig.geometry()), xi_(xi), ps_(pole_sum_of_f(xi, eig)),
        roots_(find_roots(ps_, 1.0 / eig.geometry().volume())) {}

  Coefficient coefficient(std::uint64_t t) const { return coefficient_at(roots_, t); }

  // Clamped to [0,1] only when within 1e-9 of the boundary.
  double operator()(std::uint64_t t) const {
    double v = coefficient_at(roots_, t).full;
    if (v < 0 && v > -1e-9) v = 0;
    if (v > 1 && v < 1 + 1e-9) v = 1;
    return v;
  }

  const PoleSum& pole_sum() const { return ps_; }
  const RootSet& roots() const { return roots_; }
  const TorusPoint& xi() const { return xi_; }
  const TorusGeometry& geometry() const { return geom_; }

 private:
  TorusGeometry geom_;
  TorusPoint xi_;
  PoleSum ps_;
  RootSet roots_;
};

inline double exact_tail(const EigenTable& eig, const TorusPoint& xi, std::uint64_t t) {
  return TailDistribution(eig, xi)(t);
}

inline double exact_tail(const TorusGeometry& g, const TorusPoint& xi, std::uint64_t t) {
  return exact_tail(EigenTable(g), xi, t);
}

// e^{-u/f} (1 + (u/N)(f'/f^3 + 1/(2f^2)) - f'/(N f^2)), u = (t+1)/N
inline double asymptotic_tail(const TwoPoint& fp, double volume, std::uint64_t t) {
  const double u = (static_cast<double>(t) + 1.0) / volume;
  const double f = fp.f, f1 = fp.fprime;
  return std::exp(-u / f) *
         (1.0 + (u / volume) * (f1 / (f * f * f) + 1.0 / (2 * f * f)) - f1 / (volume * f * f));
}

inline double asymptotic_tail(const GreenTables& tables, const TorusPoint& xi, std::uint64_t t) {
  return asymptotic_tail(two_point_f(xi, tables), tables.geom.volume(), t);
}

}  // namespace vacant
