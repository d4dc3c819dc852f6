#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "error.hpp"
#include "numeric.hpp"
#include "random.hpp"
#include "torus.hpp"
#include "walk.hpp"

namespace vacant {

struct ExperimentConfig {
  TorusGeometry geom;
  int ell = 1;
  std::uint64_t t = 0;
  std::uint64_t reps = 1000;
  std::uint64_t seed = 0;
  unsigned width = 1;
  std::vector<std::pair<unsigned, unsigned>> pairs;  // (I, J) covariances to accumulate
  VertexBudget budget;
};

// Exact integer power sums of x - pivot up to fourth order.
struct PowerSums {
  std::int64_t pivot = 0;
  std::uint64_t m = 0;
  __int128 s1 = 0, s2 = 0, s3 = 0, s4 = 0;

  void add(std::int64_t x) {
    if (m == 0) pivot = x;
    const __int128 y = x - pivot;
    s1 += y;
    s2 += y * y;
    s3 += y * y * y;
    s4 += y * y * y * y;
    ++m;
  }

  long double mean() const { return pivot + static_cast<long double>(s1) / m; }

  // (m S2 - S1^2) / (m (m-1)), numerator exact.
  long double variance() const {
    if (m < 2) return 0;
    const __int128 num = static_cast<__int128>(m) * s2 - s1 * s1;
    return static_cast<long double>(num) / (static_cast<long double>(m) * (m - 1));
  }

  // Biased central moments.
  long double central(int k) const {
    const long double mm = m, c = static_cast<long double>(s1) / mm;
    const long double e1 = c, e2 = static_cast<long double>(s2) / mm, e3 = static_cast<long double>(s3) / mm,
                      e4 = static_cast<long double>(s4) / mm;
    if (k == 2) return e2 - e1 * e1;
    if (k == 3) return e3 - 3 * e1 * e2 + 2 * e1 * e1 * e1;
    return e4 - 4 * e1 * e3 + 6 * e1 * e1 * e2 - 3 * e1 * e1 * e1 * e1;
  }
};

struct CovarianceEstimate {
  unsigned I = 0, J = 0;
  __int128 numerator = 0;  // m sum x y - sum x sum y, pivoted
  double covariance = 0;
  double stderr_ = 0;
};

struct ExperimentStats {
  std::uint64_t m = 0;
  PowerSums vacant;
  double mean = 0, variance = 0;
  double mean_stderr = 0, variance_stderr = 0;
  double skewness = 0, excess_kurtosis = 0;
  std::vector<std::uint64_t> values;  // V per replicate, replicate order
  std::vector<CovarianceEstimate> covariances;
};

inline void summarize(ExperimentStats& st) {
  const auto& p = st.vacant;
  st.m = p.m;
  st.mean = static_cast<double>(p.mean());
  st.variance = static_cast<double>(p.variance());
  st.mean_stderr = p.m ? std::sqrt(st.variance / p.m) : 0;
  const long double m2 = p.central(2), m4 = p.central(4);
  if (p.m >= 4) {
    const long double mm = p.m;
    // Var(s^2) = mu4/m - sigma^4 (m-3)/(m(m-1))
    const long double s4 = static_cast<long double>(st.variance) * st.variance;
    const long double v = m4 / mm - s4 * (mm - 3) / (mm * (mm - 1));
    st.variance_stderr = static_cast<double>(std::sqrt(std::max<long double>(v, 0)));
  }
  if (m2 > 0) {
    st.skewness = static_cast<double>(p.central(3) / std::pow(m2, 1.5L));
    st.excess_kurtosis = static_cast<double>(m4 / (m2 * m2) - 3);
  }
}

inline ExperimentStats run_experiment(const ExperimentConfig& cfg) {
  require(cfg.reps >= 1, "replicate count must be >= 1");
  require(cfg.ell >= 1 && cfg.ell <= max_walks, "walk count must be in [1, 16]");
  cfg.budget.check(cfg.geom, "run_experiment");
  const unsigned full = 1u << cfg.ell;
  for (auto [I, J] : cfg.pairs) require(I < full && J < full, "covariance subset outside [ell]");
  const bool keep_ranges = !cfg.pairs.empty();
  std::vector<std::uint64_t> values(cfg.reps);
  std::vector<std::vector<std::uint64_t>> ranges(keep_ranges ? cfg.reps : 0);
  parallel_for(cfg.reps, cfg.width, [&](std::size_t i) {
    const RandomSource rng(cfg.seed, i);
    auto obs = run_replicate(cfg.geom, cfg.ell, cfg.t, rng, cfg.budget);
    values[i] = obs.vacant;
    if (keep_ranges) ranges[i] = std::move(obs.range);
  });
  ExperimentStats st;
  for (auto v : values) st.vacant.add(static_cast<std::int64_t>(v));
  summarize(st);
  st.values = std::move(values);
  const std::uint64_t m = cfg.reps;
  for (auto [I, J] : cfg.pairs) {
    CovarianceEstimate c{I, J};
    const auto pi = static_cast<std::int64_t>(ranges[0][I]), pj = static_cast<std::int64_t>(ranges[0][J]);
    __int128 sx = 0, sy = 0, sxy = 0;
    for (std::uint64_t r = 0; r < m; ++r) {
      const __int128 x = static_cast<std::int64_t>(ranges[r][I]) - pi;
      const __int128 y = static_cast<std::int64_t>(ranges[r][J]) - pj;
      sx += x;
      sy += y;
      sxy += x * y;
    }
    c.numerator = static_cast<__int128>(m) * sxy - sx * sy;
    if (m >= 2) {
      const long double mm = m;
      c.covariance = static_cast<double>(static_cast<long double>(c.numerator) / (mm * (mm - 1)));
      const long double mx = static_cast<long double>(sx) / mm, my = static_cast<long double>(sy) / mm;
      long double acc = 0;
      for (std::uint64_t r = 0; r < m; ++r) {
        const long double dx = static_cast<std::int64_t>(ranges[r][I]) - pi - mx;
        const long double dy = static_cast<std::int64_t>(ranges[r][J]) - pj - my;
        acc += dx * dx * dy * dy;
      }
      const long double v = (acc / mm - static_cast<long double>(c.covariance) * c.covariance) / mm;
      c.stderr_ = static_cast<double>(std::sqrt(std::max<long double>(v, 0)));
    }
    st.covariances.push_back(c);
  }
  return st;
}

// All (I, J) pairs over the 2^ell subsets.
inline std::vector<std::pair<unsigned, unsigned>> all_subset_pairs(int ell) {
  require(ell >= 1 && ell <= 8, "full covariance matrix needs ell <= 8");
  std::vector<std::pair<unsigned, unsigned>> out;
  for (unsigned I = 0; I < (1u << ell); ++I)
    for (unsigned J = 0; J < (1u << ell); ++J) out.emplace_back(I, J);
  return out;
}

struct CovarianceMatrix {
  int ell = 0;
  std::vector<double> cov, stderr_;  // row-major 2^ell x 2^ell
  std::vector<__int128> numerator;

  std::size_t dim() const { return std::size_t{1} << ell; }
  double at(unsigned I, unsigned J) const { return cov[I * dim() + J]; }
};

inline CovarianceMatrix covariance_matrix(ExperimentConfig cfg) {
  cfg.pairs = all_subset_pairs(cfg.ell);
  const ExperimentStats st = run_experiment(cfg);
  CovarianceMatrix cm;
  cm.ell = cfg.ell;
  for (const auto& c : st.covariances) {
    cm.cov.push_back(c.covariance);
    cm.stderr_.push_back(c.stderr_);
    cm.numerator.push_back(c.numerator);
  }
  return cm;
}

struct Histogram {
  std::vector<double> left, right;
  std::vector<std::uint64_t> count;
  double width = 1;
};

inline double quantile_sorted(const std::vector<std::uint64_t>& v, double p) {
  const double pos = p * (v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - lo) * (static_cast<double>(v[hi]) - static_cast<double>(v[lo]));
}

// Bin width 2 IQR m^{-1/3}, at least 1 and integral; bins are [left, right).
inline Histogram histogram(std::vector<std::uint64_t> values) {
  require(!values.empty(), "histogram needs at least one value");
  std::sort(values.begin(), values.end());
  const double iqr = quantile_sorted(values, 0.75) - quantile_sorted(values, 0.25);
  Histogram h;
  h.width = std::max(1.0, std::ceil(2 * iqr * std::pow(static_cast<double>(values.size()), -1.0 / 3)));
  const double lo = static_cast<double>(values.front());
  const auto nb = static_cast<std::size_t>(std::floor((values.back() - lo) / h.width)) + 1;
  h.count.assign(nb, 0);
  for (auto v : values) ++h.count[static_cast<std::size_t>(std::floor((v - lo) / h.width))];
  for (std::size_t b = 0; b < nb; ++b) {
    h.left.push_back(lo + b * h.width);
    h.right.push_back(lo + (b + 1) * h.width);
  }
  return h;
}

}  // namespace vacant
