#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "ttss/errors.hpp"
#include "ttss/spectral1d.hpp"

using namespace ttss;

TEST_CASE("legendre recurrence matches closed forms") {
  for (double x : {-0.9, -0.3, 0.0, 0.41, 1.0}) {
    auto v3 = legendre_eval(3, x);
    CHECK(v3.p == doctest::Approx(0.5 * (5 * x * x * x - 3 * x)).epsilon(1e-14));
    CHECK(v3.dp == doctest::Approx(0.5 * (15 * x * x - 3)).epsilon(1e-14));
    auto v4 = legendre_eval(4, x);
    CHECK(v4.p == doctest::Approx((35 * std::pow(x, 4) - 30 * x * x + 3) / 8).epsilon(1e-14));
  }
  CHECK(legendre_eval(0, 0.3).p == 1.0);
  CHECK(legendre_eval(25, 1.0).p == doctest::Approx(1.0));
  CHECK(legendre_eval(25, 1.0).dp == doctest::Approx(25.0 * 26.0 / 2.0));
}

TEST_CASE("gll and gauss nodes: known values") {
  auto g4 = gll_nodes(4);
  REQUIRE(g4.size() == 5);
  CHECK(g4[0] == -1.0);
  CHECK(g4[4] == 1.0);
  CHECK(g4[2] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(g4[3] == doctest::Approx(std::sqrt(3.0 / 7.0)).epsilon(1e-15));
  auto q3 = gauss_nodes(3);
  REQUIRE(q3.size() == 3);
  CHECK(q3[2] == doctest::Approx(std::sqrt(0.6)).epsilon(1e-15));
  CHECK(q3[0] == doctest::Approx(-std::sqrt(0.6)).epsilon(1e-15));
}

TEST_CASE("gll nodes are zeros of P_n', sorted and antisymmetric") {
  for (int n : {2, 5, 16, 63, 300}) {
    auto x = gll_nodes(n);
    REQUIRE(static_cast<int>(x.size()) == n + 1);
    for (int i = 1; i < n; ++i) {
      CHECK(x[i] > x[i - 1]);
      CHECK(std::abs(legendre_eval(n, x[i]).dp) < 1e-9 * n * n);
      CHECK(x[i] == -x[n - i]);
    }
    auto g = gauss_nodes(n);
    // Newton step size, not |P|, since |P'| grows like n^1.5 at the zeros
    for (double z : g) CHECK(std::abs(legendre_eval(n, z).p / legendre_eval(n, z).dp) < 1e-14);
  }
}

TEST_CASE("differentiation matrix is exact on polynomials") {
  std::mt19937_64 rng(3);
  for (int n : {4, 8, 16, 40}) {
    auto x = gll_nodes(n);
    Matrix d = diff_matrix(x);
    CHECK(d(0, 0) == doctest::Approx(-n * (n + 1) / 4.0));
    CHECK(d(n, n) == doctest::Approx(n * (n + 1) / 4.0));
    auto p = testutil::random_poly(n, rng);
    Vector f(n + 1), df(n + 1);
    for (int i = 0; i <= n; ++i) {
      f[i] = p(x[i]);
      df[i] = p(x[i], 1);
    }
    CHECK(testutil::rel(d * f, df) < 1e-10);
    // rows sum to zero: constants have zero derivative
    CHECK((d * Vector::Ones(n + 1)).cwiseAbs().maxCoeff() < 1e-10 * n * n);
  }
}

TEST_CASE("evaluation and derivative rows at arbitrary targets") {
  std::mt19937_64 rng(5);
  const int n = 12;
  auto x = gll_nodes(n);
  auto p = testutil::random_poly(n, rng);
  std::vector<double> t{-0.97, -0.5, 0.013, 0.33, 0.8};
  Vector f(n + 1);
  for (int i = 0; i <= n; ++i) f[i] = p(x[i]);
  Matrix e = eval_matrix(x, t), e1 = deriv_eval_matrix(x, t, 1), e2 = deriv_eval_matrix(x, t, 2);
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK((e * f)[i] == doctest::Approx(p(t[i])).epsilon(1e-12));
    CHECK((e1 * f)[i] == doctest::Approx(p(t[i], 1)).epsilon(1e-10));
    CHECK((e2 * f)[i] == doctest::Approx(p(t[i], 2)).epsilon(1e-9));
  }
  // targets on a node give unit rows
  Matrix en = eval_matrix(x, std::vector<double>{x[3]});
  CHECK(en(0, 3) == 1.0);
  CHECK(en.row(0).cwiseAbs().sum() == 1.0);
}

TEST_CASE("grid bundles first and second derivative") {
  auto g = make_grid(10);
  CHECK(g.degree == 10);
  CHECK((g.d2 - g.d1 * g.d1).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((diff2_matrix(g) - g.d2).norm() == 0.0);
}

TEST_CASE("invalid degrees are rejected") {
  CHECK_THROWS_AS(gll_nodes(1), InvalidArgument);
  CHECK_THROWS_AS(gauss_nodes(0), InvalidArgument);
  CHECK_THROWS_AS(deriv_eval_matrix(gll_nodes(4), std::vector<double>{0.1}, 3), InvalidArgument);
  CHECK_THROWS_AS(eval_matrix(std::vector<double>{0.0, 0.0, 1.0}, std::vector<double>{0.5}), InvalidArgument);
}
