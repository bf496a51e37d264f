#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "ttss/errors.hpp"
#include "ttss/superconsistency.hpp"

using namespace ttss;

TEST_CASE("superconsistent nodes are roots of eps P' - beta P") {
  for (int n : {4, 7, 16, 63}) {
    for (double eps : {1.0, 1e-2, 1e-5}) {
      auto z = superconsistent_nodes(n, eps, 1.0);
      REQUIRE(static_cast<int>(z.size()) == n - 1);
      for (std::size_t j = 0; j < z.size(); ++j) {
        auto v = legendre_eval(n, z[j]);
        const double scale = eps * std::abs(v.dp) + std::abs(v.p) + 1.0;
        CHECK(std::abs(eps * v.dp - v.p) < 1e-11 * scale * n * n);
        if (j > 0) CHECK(z[j] > z[j - 1]);
        CHECK(std::abs(z[j]) < 1.0);
      }
    }
  }
}

TEST_CASE("beta = 0 gives interior gll nodes") {
  auto z = superconsistent_nodes(9, 0.3, 0.0);
  auto x = gll_nodes(9);
  for (int j = 0; j < 8; ++j) CHECK(z[j] == doctest::Approx(x[j + 1]).epsilon(1e-15));
}

TEST_CASE("mirror symmetry for negative beta") {
  for (double eps : {1.0, 1e-3, 1e-9}) {
    auto zp = superconsistent_nodes(11, eps, 2.0);
    auto zm = superconsistent_nodes(11, eps, -2.0);
    for (std::size_t j = 0; j < zp.size(); ++j) CHECK(std::abs(zm[j] + zp[zp.size() - 1 - j]) < 1e-12);
  }
}

TEST_CASE("nodes migrate monotonically from gll to gauss as eps decreases") {
  const int n = 9;
  std::vector<std::vector<double>> sets;
  for (int k = 0; k <= 12; ++k) sets.push_back(superconsistent_nodes(n, std::pow(10.0, -k), 1.0));
  auto gl = gll_nodes(n);
  auto ga = gauss_nodes(n);
  for (int j = 0; j < n - 1; ++j) {
    const double dir = ga[j] - gl[j + 1];
    for (std::size_t k = 1; k < sets.size(); ++k) CHECK((sets[k][j] - sets[k - 1][j]) * dir >= -1e-15);
    CHECK(std::abs(sets.front()[j] - gl[j + 1]) < std::abs(sets.back()[j] - gl[j + 1]));
  }
}

TEST_CASE("limits: large eps near gll, tiny eps near gauss") {
  // For large eps the root of eps P' - beta P next to an interior GLL node x
  // shifts by beta P/(eps P'') = -beta (1 - x^2) / (eps n (n+1)) to first order.
  const int n = 7;
  auto gl = gll_nodes(n);
  auto ga = gauss_nodes(n);
  for (double eps : {1e2, 1e3, 1e4}) {
    auto zd = superconsistent_nodes(n, eps, 1.0);
    for (int j = 0; j < n - 1; ++j) {
      const double x = gl[j + 1];
      const double shift = -(1 - x * x) / (eps * n * (n + 1));
      CHECK(zd[j] - x == doctest::Approx(shift).epsilon(50.0 / eps));
    }
  }
  auto zc = superconsistent_nodes(n, 1e-12, 1.0);
  for (int j = 0; j < n - 1; ++j) CHECK(std::abs(zc[j] - ga[j]) < 1e-6);
}

TEST_CASE("collocated operator is exact on polynomials") {
  std::mt19937_64 rng(11);
  const int n = 20;
  const double eps = 1e-3, beta = 1.5, rho = 0.7;
  auto g = sc_grid(n, eps, beta);
  auto p = testutil::random_poly(n, rng);
  Vector f(n + 1);
  for (int i = 0; i <= n; ++i) f[i] = p(g.base.rep_nodes[i]);
  Vector lf = beta * (g.c1 * f) - eps * (g.c2 * f) + rho * (g.c0 * f);
  for (int j = 0; j < n - 1; ++j) {
    const double z = g.coll_nodes[j];
    const double exact = beta * p(z, 1) - eps * p(z, 2) + rho * p(z);
    CHECK(std::abs(lf[j] - exact) <= 1e-8 * (std::abs(exact) + 1.0));
  }
  // partition of unity
  CHECK((g.c0 * Vector::Ones(n + 1) - Vector::Ones(n - 1)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("superconsistency: exact one degree beyond the interpolation space") {
  // p - I_n p = c (x^2 - 1) P_n' and beta q' - eps q'' for that q is
  // n (n+1) (beta P_n - eps P_n'), which vanishes at the collocation nodes.
  std::mt19937_64 rng(5);
  const int n = 16;
  for (double eps : {1.0, 1e-2, 1e-6}) {
    const double beta = 1.3;
    auto g = sc_grid(n, eps, beta);
    auto p = testutil::random_poly(n + 1, rng);
    Vector f(n + 1);
    for (int i = 0; i <= n; ++i) f[i] = p(g.base.rep_nodes[i]);
    Vector lf = beta * (g.c1 * f) - eps * (g.c2 * f);
    for (int j = 0; j < n - 1; ++j) {
      const double z = g.coll_nodes[j];
      const double exact = beta * p(z, 1) - eps * p(z, 2);
      CHECK(std::abs(lf[j] - exact) <= 1e-9 * (std::abs(exact) + 1.0));
    }
    // plain nodes are not exact at degree n+1
    if (eps == 1e-2) {
      auto pg = plain_grid(n);
      Vector lp = beta * (pg.c1 * f) - eps * (pg.c2 * f);
      double worst = 0.0;
      for (int j = 0; j < n - 1; ++j) {
        const double z = pg.coll_nodes[j];
        worst = std::max(worst, std::abs(lp[j] - (beta * p(z, 1) - eps * p(z, 2))));
      }
      CHECK(worst > 1e-6);
    }
  }
}

TEST_CASE("1-D operator: identity boundary rows and the Poisson parabola") {
  const int n = 10;
  const double eps = 0.25;
  auto g = sc_grid(n, eps, 0.0);
  Matrix a = assemble_sc_1d_operator(g, 0.0);
  CHECK(a.rows() == n + 1);
  CHECK(a(0, 0) == 1.0);
  CHECK(a.row(0).cwiseAbs().sum() == 1.0);
  CHECK(a(n, n) == 1.0);
  Vector b = rhs_collocator(g, [](double) { return 1.0; });
  CHECK(b[0] == 0.0);
  CHECK(b[n] == 0.0);
  Vector f = a.partialPivLu().solve(b);
  for (int i = 0; i <= n; ++i) {
    const double x = g.base.rep_nodes[i];
    CHECK(f[i] == doctest::Approx((1 - x * x) / (2 * eps)).epsilon(1e-10));
  }
  Vector bg = rhs_collocator(g, [](double) { return 0.0; }, 2.0, -1.0);
  CHECK(bg[0] == 2.0);
  CHECK(bg[n] == -1.0);
}

TEST_CASE("embed_rows and plain grids") {
  auto pg = plain_grid(6);
  auto x = gll_nodes(6);
  for (int j = 0; j < 5; ++j) CHECK(pg.coll_nodes[j] == x[j + 1]);
  CHECK(pg.plain);
  Matrix e = embed_rows(pg.c0, true);
  CHECK((e - Matrix::Identity(7, 7)).norm() < 1e-14);
  Matrix z = embed_rows(pg.c1, false);
  CHECK(z.row(0).norm() == 0.0);
  CHECK(z.row(6).norm() == 0.0);
}

TEST_CASE("invalid superconsistency inputs") {
  CHECK_THROWS_AS(superconsistent_nodes(1, 1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(superconsistent_nodes(5, 0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(superconsistent_nodes(5, -1.0, 1.0), InvalidArgument);
}
