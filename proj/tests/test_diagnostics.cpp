#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "ttss/diagnostics.hpp"
#include "ttss/errors.hpp"
#include "ttss/spectral1d.hpp"

using namespace ttss;

TEST_CASE("oscillation_count on hand-made sequences") {
  CHECK(oscillation_count({}) == 0);
  CHECK(oscillation_count({1.0, 2.0}) == 0);
  CHECK(oscillation_count({0, 1, 2, 3, 4}) == 0);
  CHECK(oscillation_count({0, 1, 0}) == 1);
  CHECK(oscillation_count({0, 1, 0, 1, 0}) == 3);
  // flat stretches carry the previous direction
  CHECK(oscillation_count({0, 1, 1, 1, 2}) == 0);
  CHECK(oscillation_count({0, 1, 1, 1, 0}) == 1);
}

TEST_CASE("oscillation_count floor hides tiny wiggles") {
  const std::vector<double> v{0.0, 1.0, 1.0 + 1e-14, 1.0, 2.0};
  CHECK(oscillation_count(v) == 0);
  CHECK(oscillation_count(v, 0.0) == 2);
  const std::vector<double> w{0.0, 1.0, 1.0 + 1e-6, 1.0, 2.0};
  CHECK(oscillation_count(w) == 2);
  CHECK(oscillation_count(w, 1e-3) == 0);
}

TEST_CASE("relative_error and max_abs_difference match dense arithmetic") {
  std::mt19937_64 rng(3);
  const std::vector<int> modes{4, 5, 3};
  TTVector a = testutil::random_tt(modes, 2, rng);
  TTVector b = testutil::random_tt(modes, 3, rng);
  const Vector fa = testutil::flat(a), fb = testutil::flat(b);
  CHECK(relative_error(a, b) == doctest::Approx((fa - fb).norm() / fb.norm()).epsilon(1e-10));
  CHECK(max_abs_difference(a, b) == doctest::Approx((fa - fb).cwiseAbs().maxCoeff()).epsilon(1e-10));
  // sampled path never exceeds the exact maximum
  const double sampled = max_abs_difference(a, b, 10, 500);
  CHECK(sampled <= (fa - fb).cwiseAbs().maxCoeff() * (1 + 1e-12));
  CHECK(sampled > 0.0);
  CHECK_THROWS_AS(relative_error(a, tt_zeros(modes)), InvalidArgument);
  CHECK_THROWS_AS(relative_error(a, tt_ones({4, 5})), ShapeError);
}

TEST_CASE("tt_interpolate is exact for polynomials inside the node degree") {
  const auto x0 = gll_nodes(6), x1 = gll_nodes(4);
  auto p = [](double x) { return 1 - 2 * x + 0.5 * x * x * x; };
  auto q = [](double y) { return 3 + y * y; };
  std::vector<double> f0, f1;
  for (double x : x0) f0.push_back(p(x));
  for (double y : x1) f1.push_back(q(y));
  const TTVector v = tt_rank1({f0, f1});
  const std::vector<double> t0{-0.9, -0.1, 0.33, 0.8}, t1{-0.5, 0.25, 0.7};
  const TTVector w = tt_interpolate(v, {x0, x1}, {t0, t1});
  CHECK(w.modes() == std::vector<int>{4, 3});
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) {
      const int idx[2] = {i, j};
      CHECK(tt_entry(w, idx) == doctest::Approx(p(t0[i]) * q(t1[j])).epsilon(1e-12));
    }
  CHECK_THROWS_AS(tt_interpolate(v, {x0}, {t0, t1}), ShapeError);
  CHECK_THROWS_AS(tt_interpolate(v, {x1, x1}, {t0, t1}), ShapeError);
}

TEST_CASE("midline reads the line through the center") {
  const auto x0 = gll_nodes(8), x1 = gll_nodes(8);
  std::vector<double> f0, f1;
  for (double x : x0) f0.push_back(std::cos(x));  // value 1 at the center
  for (double y : x1) f1.push_back(1 + y * y);  // value 1 at the center
  const TTVector v = tt_rank1({f0, f1});
  const auto line = midline(v, {x0, x1}, 0);
  REQUIRE(line.size() == x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) CHECK(line[i] == doctest::Approx(std::cos(x0[i])).epsilon(1e-12));
  const auto col = midline(v, {x0, x1}, 1);
  for (std::size_t i = 0; i < x1.size(); ++i) CHECK(col[i] == doctest::Approx(1 + x1[i] * x1[i]).epsilon(1e-12));
}

TEST_CASE("fit_interface recovers a synthetic n^-2 boundary") {
  SweepTable t;
  t.dims = 2;
  t.degrees = {8, 16, 32, 64};
  // powers of two so the boundaries land exactly between grid points
  for (int k = 0; k <= 16; ++k) t.epsilons.push_back(std::ldexp(1.0, -k));
  // oscillatory exactly when eps < 1/n^2
  for (int n : t.degrees)
    for (double e : t.epsilons) {
      SweepCell c;
      c.degree = n;
      c.epsilon = e;
      c.flag = e < 1.0 / (n * n) ? 1 : 0;
      t.cells.push_back(c);
    }
  const InterfaceFit f = fit_interface(t);
  REQUIRE(f.ok);
  CHECK(f.degrees.size() == 4);
  CHECK(f.slope == doctest::Approx(-2.0).epsilon(1e-12));
  for (std::size_t k = 0; k < f.degrees.size(); ++k)
    CHECK(f.epsilons[k] == doctest::Approx(1.0 / (std::sqrt(2.0) * f.degrees[k] * f.degrees[k])).epsilon(1e-12));
  CHECK(t.flags_csv().find("degree,") == 0);
  CHECK(t.cells_csv().find("method,dims,degree,epsilon") == 0);
}

TEST_CASE("fit_interface needs two located boundaries") {
  SweepTable t;
  t.degrees = {8, 16};
  t.epsilons = {1e-1, 1e-2};
  for (int i = 0; i < 4; ++i) t.cells.push_back(SweepCell{});
  CHECK_FALSE(fit_interface(t).ok);
}

TEST_CASE("CountCache keys on dims, degree and epsilon") {
  CountCache c;
  CHECK_FALSE(c.find(2, 8, 1e-3).has_value());
  c.store(2, 8, 1e-3, 5);
  REQUIRE(c.find(2, 8, 1e-3).has_value());
  CHECK(*c.find(2, 8, 1e-3) == 5);
  CHECK(*c.find(2, 8, 1e-3 * (1 + 1e-12)) == 5);
  CHECK_FALSE(c.find(3, 8, 1e-3).has_value());
  CHECK_FALSE(c.find(2, 9, 1e-3).has_value());
  CHECK_FALSE(c.find(2, 8, 1.1e-3).has_value());
}

TEST_CASE("stability sweep smoke: smooth cells at large epsilon") {
  SweepOptions o;
  o.solver.max_sweeps = 10;
  const SweepTable t = stability_sweep(2, {6}, {1.0, 0.5}, SweepMethod::T2S2, o);
  REQUIRE(t.cells.size() == 2);
  for (const auto& c : t.cells) {
    CHECK(c.flag == 0);
    CHECK(c.residual < 1e-6);
  }
}
