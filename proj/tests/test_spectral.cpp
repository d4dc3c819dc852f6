#include <gtest/gtest.h>

#include <complex>

#include <vacant/spectral.hpp>

#include "oracles.hpp"

using namespace vacant;

TEST(Eigenvalue, KnownValues) {
  EXPECT_EQ(eigenvalue({0, 0, 0}, TorusGeometry(3, 7)), 0.0);
  EXPECT_NEAR(eigenvalue({2, 0, 0}, TorusGeometry(3, 4)), 1.0 / 3, 1e-15);
  EXPECT_NEAR(eigenvalue({1, 1, 1}, TorusGeometry(3, 2)), 1.0, 1e-15);
}

TEST(Eigenvalue, SymmetriesAndTable) {
  const TorusGeometry g(3, 7);
  const EigenTable eig(g);
  const auto full = eig.full();
  for (std::uint64_t i = 0; i < g.vertex_count(); ++i) {
    const TorusPoint v = point_at(i, g);
    TorusPoint neg(v.size()), perm{v[2], v[0], v[1]};
    for (int j = 0; j < 3; ++j) neg[j] = mod(-v[j], g.n);
    EXPECT_NEAR(full[i], eigenvalue(v, g), 1e-15);
    EXPECT_EQ(eig(v), eig(neg));
    EXPECT_EQ(eig(v), eig(perm));
  }
}

TEST(Eigenvalue, GroupsCoverNonzeroSpectrum) {
  const TorusGeometry g(4, 6);
  const EigenTable eig(g);
  double total = 0, prev = 0;
  for (const auto& grp : eig.groups()) {
    EXPECT_GT(grp.lambda, prev);
    prev = grp.lambda;
    total += grp.size;
  }
  EXPECT_DOUBLE_EQ(total, g.volume() - 1);
}

TEST(GreenTables, MatchesMatrixPowerOracle) {
  for (int n : {2, 3, 4}) {
    const TorusGeometry g(3, n);
    const auto t = build_green_tables(g);
    const auto o = oracle::matrix_power_green(g, 1e-13);
    for (std::uint64_t i = 0; i < g.vertex_count(); ++i) {
      EXPECT_NEAR(t.g[i], o.g[i], 1e-10) << "n=" << n << " i=" << i;
      EXPECT_NEAR(t.gprime[i], o.gprime[i], 1e-10) << "n=" << n << " i=" << i;
    }
  }
}

TEST(GreenTables, OracleOnOtherShapes) {
  for (auto [d, n] : {std::pair{3, 5}, {4, 3}, {2, 6}}) {
    const TorusGeometry g(d, n);
    const auto t = build_green_tables(g);
    const auto o = oracle::matrix_power_green(g, 1e-13);
    for (std::uint64_t i = 0; i < g.vertex_count(); ++i) {
      EXPECT_NEAR(t.g[i], o.g[i], 1e-9);
      EXPECT_NEAR(t.gprime[i], o.gprime[i], 1e-8 * std::max(1.0, std::fabs(o.gprime[i])));
    }
  }
}

TEST(GreenTables, FastMatchesNaive) {
  for (auto [d, n] : {std::pair{3, 4}, {3, 5}, {4, 5}, {5, 3}}) {
    const TorusGeometry g(d, n);
    const auto a = build_green_tables(g), b = build_green_tables_naive(g);
    for (std::uint64_t i = 0; i < g.vertex_count(); ++i) {
      EXPECT_NEAR(a.g[i], b.g[i], 1e-12);
      EXPECT_NEAR(a.gprime[i], b.gprime[i], 1e-11);
    }
  }
}

TEST(GreenTables, ZeroSumAndPlancherel) {
  for (int d : {3, 4, 5})
    for (int n : {4, 5, 8, 9}) {
      const TorusGeometry g(d, n);
      const auto t = build_green_tables(g);
      CompensatedSum s, sp, sq;
      for (std::uint64_t i = 0; i < g.vertex_count(); ++i) {
        s += t.g[i];
        sp += t.gprime[i];
        sq += static_cast<long double>(t.g[i]) * t.g[i];
      }
      EXPECT_LE(std::fabs(static_cast<double>(s.value())), 1e-10 * std::pow(n, d / 2.0));
      EXPECT_LE(std::fabs(static_cast<double>(sp.value())), 1e-10 * g.volume() * t.gprime0);
      const double lhs = static_cast<double>(sq.value()), rhs = t.g0 + t.gprime0;
      EXPECT_LE(std::fabs(lhs - rhs) / rhs, 1e-8);
    }
}

TEST(GreenTables, SymmetryAndBound) {
  const TorusGeometry g(3, 5);
  const auto t = build_green_tables(g);
  for (std::uint64_t i = 0; i < g.vertex_count(); ++i) {
    const TorusPoint p = point_at(i, g);
    const TorusPoint neg{mod(-p[0], 5), mod(-p[1], 5), mod(-p[2], 5)};
    const TorusPoint perm{p[1], p[2], p[0]};
    EXPECT_NEAR(t.g[i], t.g[index_of(neg, g)], 1e-12);
    EXPECT_NEAR(t.g[i], t.g[index_of(perm, g)], 1e-12);
    EXPECT_LE(std::fabs(t.g[i]), t.g0);
  }
}

TEST(GreenTables, SinglePointEvaluation) {
  const TorusGeometry g(3, 6);
  const EigenTable eig(g);
  const auto t = build_green_tables(g);
  for (const TorusPoint& xi : {TorusPoint{0, 0, 0}, {1, 0, 0}, {3, 2, 5}}) {
    EXPECT_NEAR(green_value_at(xi, eig), t.g[index_of(xi, g)], 1e-12);
    EXPECT_NEAR(green_value_at(xi, eig, true), t.gprime[index_of(xi, g)], 1e-11);
  }
}

TEST(GreenTables, OctantMatchesExpanded) {
  const TorusGeometry g(4, 7);
  const auto a = build_green_octant(g), b = build_green_tables(g);
  EXPECT_TRUE(a.g.empty());
  for (std::uint64_t i = 0; i < g.vertex_count(); ++i) EXPECT_EQ(a.g_at(point_at(i, g)), b.g[i]);
}

TEST(GreenTables, BudgetEnforced) {
  EXPECT_THROW(build_green_tables(TorusGeometry(3, 64), VertexBudget{1000}), vacant::error);
}

TEST(GreenTables, DecayInDimensionFive) {
  double prev = std::numeric_limits<double>::infinity();
  for (int n : {8, 16, 32}) {
    const TorusGeometry g(5, n);
    const auto t = build_green_octant(g);
    const Octant o(g);
    double m = 0;
    for (std::size_t i = 0; i < o.size(); ++i)
      if (norm2(o.coords(i), g) >= n / 4.0) m = std::max(m, std::fabs(t.g_octant[i]));
    EXPECT_LT(m, prev) << "n=" << n;
    prev = m;
  }
}

TEST(GreenGenerating, EndpointsAndOrthogonality) {
  const TorusGeometry g(3, 5);
  const EigenTable eig(g);
  const auto t = build_green_tables(g);
  double sum = 0;
  for (std::uint64_t i = 0; i < g.vertex_count(); ++i) {
    const TorusPoint xi = point_at(i, g);
    EXPECT_NEAR(green_generating(xi, 1.0, eig), t.g[i], 1e-10);
    EXPECT_NEAR(green_generating(xi, 0.0, eig), (i == 0 ? 1.0 : 0.0) - 1.0 / 125, 1e-14);
    sum += green_generating(xi, 0.5, eig);
  }
  EXPECT_NEAR(sum, 0.0, 1e-12);
}

TEST(GreenGenerating, PowerSeriesOracle) {
  // Sum_t z^t (P^t(0,xi) - 1/N) by iterating the kernel.
  const TorusGeometry g(3, 4);
  const EigenTable eig(g);
  const auto nb = oracle::neighbours(g);
  const double z = 0.7;
  std::vector<long double> p(g.vertex_count(), 0), acc(g.vertex_count(), 0);
  p[0] = 1;
  long double zt = 1;
  for (int t = 0; t < 400; ++t, zt *= z) {
    for (std::size_t i = 0; i < p.size(); ++i) acc[i] += zt * (p[i] - 1.0L / 64);
    p = oracle::apply_kernel(p, nb, 3);
  }
  for (std::uint64_t i = 0; i < g.vertex_count(); ++i)
    EXPECT_NEAR(green_generating(point_at(i, g), z, eig), static_cast<double>(acc[i]), 1e-12);
}

TEST(GreenGenerating, PoleProximityRejected) {
  const TorusGeometry g(3, 4);
  const EigenTable eig(g);
  const double pole = 1.0 / (1.0 - eig.groups().front().lambda);
  try {
    green_generating({1, 0, 0}, pole, eig);
    FAIL();
  } catch (const vacant::error& e) {
    EXPECT_EQ(e.code(), errc::pole_proximity);
  }
}

TEST(TwoPointF, OriginAndDerivativeMean) {
  const TorusGeometry g(3, 7);
  const auto t = build_green_tables(g);
  const auto f0 = two_point_f({0, 0, 0}, t);
  EXPECT_DOUBLE_EQ(f0.f, t.g0);
  EXPECT_DOUBLE_EQ(f0.fprime, t.gprime0);
  CompensatedSum s;
  for (std::uint64_t i = 0; i < g.vertex_count(); ++i) s += two_point_f(point_at(i, g), t).fprime;
  EXPECT_NEAR(static_cast<double>(s.value()) / g.volume(), 0.5 * t.gprime0, 1e-10);
}

TEST(TwoPointF, MatchesMatrixPowerOracle) {
  const TorusGeometry g(3, 5);
  const auto t = build_green_tables(g);
  const auto o = oracle::matrix_power_green(g, 1e-13);
  const auto f = two_point_f({1, 0, 0}, t);
  EXPECT_NEAR(f.f, 0.5 * (o.g[0] + o.g[index_of({1, 0, 0}, g)]), 1e-10);
  EXPECT_NEAR(f.fprime, 0.5 * (o.gprime[0] + o.gprime[index_of({1, 0, 0}, g)]), 1e-9);
}

TEST(TwoPointF, FloorHoldsAcrossSizes) {
  for (int d : {3, 4, 5})
    for (int n = 3; n <= (d == 3 ? 24 : d == 4 ? 14 : 10); ++n) {
      const auto t = build_green_octant(TorusGeometry(d, n));
      const double m = *std::min_element(t.g_octant.begin(), t.g_octant.end());
      EXPECT_GE(0.5 * (t.g0 + m), f_floor(d)) << "d=" << d << " n=" << n;
    }
}

TEST(MomentSum, FirstMomentIsGreenAtOrigin) {
  const EigenTable eig(TorusGeometry(3, 9));
  EXPECT_NEAR(moment_sum(1, eig), green_value_at({0, 0, 0}, eig), 1e-13);
}

TEST(MomentSum, GrowthRates) {
  std::vector<double> r3;
  for (int n : {8, 16, 32}) r3.push_back(moment_sum(2, EigenTable(TorusGeometry(3, n))) / n);
  EXPECT_LT(std::fabs(r3[2] - r3[1]), std::fabs(r3[1] - r3[0]));
  EXPECT_LT(r3[0] / r3[2], 1.2);

  std::vector<double> r4;
  for (int n : {8, 16, 32, 64}) r4.push_back(moment_sum(2, EigenTable(TorusGeometry(4, n))) / std::log(n));
  const auto [lo, hi] = std::minmax_element(r4.begin(), r4.end());
  EXPECT_LT(*hi / *lo, 1.5);
}
