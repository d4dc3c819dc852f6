#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>

#include <random>

#include <vacant/theory.hpp>

#include "oracles.hpp"

using namespace vacant;
using boost::multiprecision::cpp_rational;

namespace {

// N sum_xi [(1-2a+b)^k (a-b)^r b^{l-k-r} - (1-a)^{2k+r} a^{2l-2k-r}] with
// b(xi) = Pr(tau({0,xi}) > t) taken from the absorbing chain.
double bsum_covariance(const TorusGeometry& g, int ell, std::uint64_t t, unsigned I, unsigned J) {
  const int k = std::popcount(I & J), r = std::popcount(I ^ J);
  const double a = oracle::absorbing_tail(g, {TorusPoint(g.d, 0)}, t)[t];
  long double s = 0;
  for (std::uint64_t i = 0; i < g.vertex_count(); ++i) {
    std::vector<TorusPoint> targets{TorusPoint(g.d, 0)};
    if (i) targets.push_back(point_at(i, g));
    const long double b = oracle::absorbing_tail(g, targets, t)[t];
    s += std::pow(1 - 2 * a + b, k) * std::pow(a - b, r) * std::pow(b, ell - k - r) -
         std::pow(1.0L - a, 2 * k + r) * std::pow(static_cast<long double>(a), 2 * ell - 2 * k - r);
  }
  return static_cast<double>(g.volume() * s);
}

}  // namespace

TEST(TimeMapping, RoundsToNearestWithEvenTies) {
  EXPECT_EQ(t_from_u(1.0, TorusGeometry(3, 8)), 511u);
  EXPECT_EQ(t_from_u(0.0, TorusGeometry(3, 8)), 0u);
  EXPECT_EQ(t_from_u(4.5 / 8, TorusGeometry(3, 2)), 4u);
  EXPECT_EQ(t_from_u(5.5 / 8, TorusGeometry(3, 2)), 4u);
  EXPECT_EQ(t_from_u(5.4 / 8, TorusGeometry(3, 2)), 4u);
  EXPECT_DOUBLE_EQ(u_from_t(511, TorusGeometry(3, 8)), 1.0);
  EXPECT_THROW(t_from_u(-1, TorusGeometry(3, 8)), vacant::error);
}

TEST(MeanVacant, TimeZero) {
  for (int ell : {1, 2, 5}) {
    const TorusGeometry g(3, 6);
    EXPECT_NEAR(exact_mean_vacant(EigenTable(g), ell, 0), g.volume() * std::pow(1 - 1 / g.volume(), ell), 1e-9);
  }
}

TEST(MeanVacant, MatchesEnumeration) {
  const TorusGeometry g(3, 3);
  const EigenTable eig(g);
  for (int t : {1, 2, 3}) {
    EXPECT_NEAR(exact_mean_vacant(eig, 1, t), static_cast<double>(oracle::enumerate_vacant(g, 1, t).mean), 1e-10);
  }
  EXPECT_NEAR(exact_mean_vacant(eig, 2, 2), static_cast<double>(oracle::enumerate_vacant(g, 2, 2).mean), 1e-10);
}

TEST(MeanVacant, MatchesAbsorbingChain) {
  const TorusGeometry g(3, 5);
  const auto a = oracle::absorbing_tail(g, {{0, 0, 0}}, 300);
  for (std::uint64_t t : {10, 124, 300})
    EXPECT_NEAR(exact_mean_vacant(EigenTable(g), 3, t), g.volume() * std::pow(a[t], 3), 1e-9);
}

TEST(MeanExpansion, ResidualOrder) {
  for (int ell : {1, 2}) {
    std::vector<double> ns, res;
    for (int n : {6, 8, 10, 12}) {
      const TorusGeometry g(3, n);
      const std::uint64_t t = t_from_u(1.0, g);
      res.push_back(std::fabs(exact_mean_vacant(EigenTable(g), ell, t) - mean_expansion(build_green_tables(g), ell, t)));
      ns.push_back(n);
    }
    const double order = -log_log_slope(ns, res);
    EXPECT_GE(order, -0.5) << "ell=" << ell;
    EXPECT_LE(order, 0.5) << "ell=" << ell;
  }
}

TEST(MeanExpansion, LeadingTermScalesWithEll) {
  const TorusGeometry g(5, 4);
  auto tab = build_green_tables(g);
  tab.gprime0 = 0;  // leave only the leading exponential and the u/(2g^2) term
  const std::uint64_t t = 700;
  const double N = g.volume(), u = (t + 1) / N, g0 = tab.g0;
  const double lead1 = mean_expansion(tab, 1, t) - std::exp(-u / g0) * u / (2 * g0 * g0);
  const double lead2 = mean_expansion(tab, 2, t) - 2 * std::exp(-2 * u / g0) * u / (2 * g0 * g0);
  EXPECT_NEAR(lead2, lead1 * lead1 / N, 1e-10 * lead2);
}

TEST(Variance, TimeZeroAndZeroWalks) {
  const TorusGeometry g(3, 4);
  const OrbitTailTable tab{EigenTable(g)};
  EXPECT_NEAR(exact_variance(tab, 1, 0), 0.0, 1e-10);
  EXPECT_EQ(exact_variance(tab, 0, 10), 0.0);
}

TEST(Variance, MatchesEnumeration) {
  const TorusGeometry g(3, 3);
  const OrbitTailTable tab{EigenTable(g)};
  for (int t : {0, 1, 2, 3})
    EXPECT_NEAR(exact_variance(tab, 1, t), static_cast<double>(oracle::enumerate_vacant(g, 1, t).variance), 1e-9)
        << "t=" << t;
  for (int t : {0, 1, 2})
    EXPECT_NEAR(exact_variance(tab, 2, t), static_cast<double>(oracle::enumerate_vacant(g, 2, t).variance), 1e-9)
        << "t=" << t;
}

TEST(Variance, OrbitReductionMatchesFullSum) {
  const TorusGeometry g(3, 5);
  const EigenTable eig(g);
  const std::uint64_t t = 80;
  const double a = exact_tail(eig, {0, 0, 0}, t);
  long double s = 0;
  for (std::uint64_t i = 0; i < g.vertex_count(); ++i) {
    const double b = exact_tail(eig, point_at(i, g), t);
    s += std::pow(static_cast<long double>(b), 2) - std::pow(static_cast<long double>(a), 4);
  }
  EXPECT_NEAR(exact_variance(OrbitTailTable(eig), 2, t), static_cast<double>(g.volume() * s), 1e-8);
}

TEST(Theta, SpecialValues) {
  for (double a : {0.1, 0.5, 0.93}) {
    EXPECT_EQ(theta<double>(0, 0, 0, a), 1.0);
    EXPECT_EQ(theta<double>(0, 1, 0, a), -1.0);
    EXPECT_EQ(theta<double>(0, 1, 1, a), a);
  }
  EXPECT_THROW(theta<double>(1, 1, 3, 0.5), vacant::error);
}

TEST(Theta, MatchesPolynomialExpansionExactly) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> num(1, 9999);
  for (int trial = 0; trial < 100; ++trial) {
    const cpp_rational a(num(rng), 10000);
    for (int k = 0; k <= 4; ++k)
      for (int r = 0; k + r <= 4; ++r)
        for (int m = 0; m <= k + r; ++m) {
          ASSERT_EQ(theta<cpp_rational>(k, r, m, a), oracle::theta_by_expansion(k, r, m, a))
              << k << "," << r << "," << m << " a=" << a;
          const double af = static_cast<double>(a);
          EXPECT_NEAR(theta<double>(k, r, m, af), static_cast<double>(oracle::theta_by_expansion(k, r, m, a)), 1e-12);
        }
  }
}

TEST(Covariance, MatchesDirectPairSum) {
  const TorusGeometry g(3, 4);
  const OrbitTailTable tab{EigenTable(g)};
  const int ell = 3;
  const std::uint64_t t = 63;
  for (unsigned I = 0; I < 8; ++I)
    for (unsigned J = I; J < 8; ++J) {
      const double ref = bsum_covariance(g, ell, t, I, J);
      EXPECT_NEAR(exact_covariance(tab, ell, t, {I, J}), ref, 1e-10 * std::max(1.0, std::fabs(ref)))
          << "I=" << I << " J=" << J;
    }
}

TEST(Covariance, DiagonalOfEmptySetIsVariance) {
  const TorusGeometry g(3, 5);
  const OrbitTailTable tab{EigenTable(g)};
  EXPECT_DOUBLE_EQ(exact_covariance(tab, 2, 100, {0, 0}), exact_variance(tab, 2, 100));
  // cov(V, R^{1}) = -var V for one walk
  EXPECT_NEAR(exact_covariance(tab, 1, 100, {0, 1}), -exact_variance(tab, 1, 100), 1e-9);
}

TEST(Covariance, RowsSumToZero) {
  const TorusGeometry g(3, 5);
  const OrbitTailTable tab{EigenTable(g)};
  for (int ell : {2, 3})
    for (unsigned I = 0; I < (1u << ell); ++I) {
      double s = 0, scale = 0;
      for (unsigned J = 0; J < (1u << ell); ++J) {
        const double c = exact_covariance(tab, ell, 120, {I, J});
        s += c;
        scale += std::fabs(c);
      }
      EXPECT_NEAR(s, 0.0, 1e-10 * scale);
    }
}

TEST(Covariance, RejectsBadSubsets) {
  const OrbitTailTable tab{EigenTable(TorusGeometry(3, 3))};
  EXPECT_THROW(exact_covariance(tab, 2, 5, {4, 0}), vacant::error);
}

TEST(Nu, ZeroAndPositivity) {
  for (int d : {3, 4, 5, 6}) {
    EXPECT_EQ(nu(0.0, d), 0.0);
    const double G0 = lattice_green(TorusPoint(d, 0), d).value;
    for (double u : {0.5, 1.0, 2.0}) EXPECT_GT(nu(2 * u / G0, d), 0.0) << "d=" << d << " u=" << u;
  }
}

TEST(Nu, LowDimensionMaximizer) {
  for (int d : {3, 4}) {
    EXPECT_LT(nu_low_d(1.9, d), nu_low_d(2.0, d));
    EXPECT_LT(nu_low_d(2.1, d), nu_low_d(2.0, d));
  }
  EXPECT_THROW(nu_low_d(1.0, 5), vacant::error);
}

TEST(Nu, TruncationStability) {
  const double G0 = lattice_green(TorusPoint(5, 0), 5).value;
  const double w = 2 / G0;
  NuOptions a, b;
  a.fixed_radius = 12;
  b.fixed_radius = 16;
  const auto ra = nu_high_d(w, 5, a), rb = nu_high_d(w, 5, b);
  EXPECT_NEAR(ra.value, rb.value, 1e-5);
  EXPECT_GE(ra.bound, std::fabs(ra.value - rb.value));
  const auto r = nu_high_d(w, 5);
  EXPECT_LT(r.bound, 1e-6);
  EXPECT_NEAR(r.value, rb.value, 1e-5);
}

TEST(CovarianceLimit, ReducesToNu) {
  const auto p = AsymptoticParams::make(5, 2, 1.0);
  EXPECT_NEAR(covariance_limit(p, {0, 0}), nu(p.w(), 5), 1e-12);
  double s = 0;
  for (unsigned J = 0; J < 4; ++J) s += covariance_limit(p, {1, J});
  EXPECT_NEAR(s, 0.0, 1e-9);
}

TEST(CovarianceLimit, FiniteSizeTrend) {
  const auto p = AsymptoticParams::make(5, 2, 1.0);
  const double limit = covariance_limit(p, {1, 2});
  std::vector<double> gaps;
  for (int n : {6, 8, 10}) {
    const TorusGeometry g(5, n);
    const OrbitTailTable tab{EigenTable(g)};
    gaps.push_back(std::fabs(exact_covariance(tab, 2, t_from_u(1.0, g), {1, 2}) / g.volume() - limit));
  }
  EXPECT_LT(gaps[1], gaps[0]);
  EXPECT_LT(gaps[2], gaps[1]);
}
