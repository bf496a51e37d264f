#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "ttss/errors.hpp"
#include "ttss/tensor_train.hpp"
#include "ttss/tt_io.hpp"

using namespace ttss;
using testutil::flat;

TEST_CASE("tt_svd reconstructs low-rank tensors and respects the bound") {
  std::mt19937_64 rng(1);
  auto x = testutil::random_tt({4, 5, 3, 6}, 2, rng);
  auto dense = tt_full(x);
  auto y = tt_svd(dense, 1e-12);
  CHECK(y.max_rank() <= 2);
  CHECK(testutil::rel(flat(y), flat(x)) < 1e-12);

  auto a = testutil::random_dense({5, 4, 6, 3, 4}, rng);
  Eigen::Map<Vector> av(a.data.data(), a.data.size());
  for (double tol : {0.5, 0.2, 0.05}) {
    auto t = tt_svd(a, tol);
    CHECK((flat(t) - av).norm() <= tol * av.norm() * (1 + 1e-12));
  }
  auto capped = tt_svd(a, 0.0, 3);
  CHECK(capped.max_rank() <= 3);
}

TEST_CASE("tt_round compresses redundant sums") {
  std::mt19937_64 rng(2);
  auto x = testutil::random_tt({3, 4, 5, 3}, 3, rng);
  auto s = tt_add(x, x);
  CHECK(s.max_rank() == 6);
  auto r = tt_round(s, 1e-12);
  CHECK(r.max_rank() <= 3);
  CHECK(testutil::rel(flat(r), 2 * flat(x)) < 1e-12);
  auto big = testutil::random_tt({4, 4, 4, 4}, 5, rng);
  for (double tol : {0.3, 0.1}) {
    auto rr = tt_round(big, tol);
    CHECK((flat(rr) - flat(big)).norm() <= tol * flat(big).norm() * (1 + 1e-12));
  }
}

TEST_CASE("exact arithmetic matches dense oracles") {
  std::mt19937_64 rng(3);
  const std::vector<int> m{3, 4, 2, 5};
  auto a = testutil::random_tt(m, 3, rng), b = testutil::random_tt(m, 2, rng);
  Vector fa = flat(a), fb = flat(b);
  CHECK(testutil::rel(flat(tt_add(a, b)), fa + fb) < 1e-13);
  CHECK(testutil::rel(flat(tt_sub(a, b)), fa - fb) < 1e-13);
  CHECK(testutil::rel(flat(tt_scale(a, -2.5)), -2.5 * fa) < 1e-14);
  CHECK(testutil::rel(flat(tt_hadamard(a, b)), fa.cwiseProduct(fb)) < 1e-13);
  CHECK(tt_dot(a, b) == doctest::Approx(fa.dot(fb)).epsilon(1e-12));
  CHECK(tt_norm(a) == doctest::Approx(fa.norm()).epsilon(1e-13));
  auto op = testutil::random_op(m, 2, rng);
  Matrix dense = op_full(op);
  CHECK(testutil::rel(flat(tt_apply(op, a)), dense * fa) < 1e-12);
  std::vector<int> idx{2, 1, 0, 3};
  CHECK(tt_entry(a, idx) == doctest::Approx(fa[2 + 3 * (1 + 4 * (0 + 2 * 3))]).epsilon(1e-13));
}

TEST_CASE("operator algebra") {
  std::mt19937_64 rng(4);
  const std::vector<int> m{3, 2, 4};
  auto a = testutil::random_op(m, 2, rng), b = testutil::random_op(m, 3, rng);
  Matrix da = op_full(a), db = op_full(b);
  CHECK((op_full(op_add(a, b)) - (da + db)).norm() < 1e-12 * (da + db).norm());
  CHECK((op_full(op_compose(a, b)) - da * db).norm() < 1e-12 * (da * db).norm());
  CHECK((op_full(op_transpose(a)) - da.transpose()).norm() < 1e-13 * da.norm());
  CHECK((op_full(op_scale(a, 3.0)) - 3.0 * da).norm() < 1e-13 * da.norm());
  auto r = op_round(op_add(a, a), 1e-12);
  CHECK(r.max_rank() <= 2);
  CHECK((op_full(r) - 2 * da).norm() < 1e-11 * da.norm());
  CHECK((op_full(op_identity(m)) - Matrix::Identity(24, 24)).norm() == 0.0);

  std::vector<Matrix> f{Matrix::Random(3, 3), Matrix::Random(2, 2), Matrix::Random(4, 4)};
  CHECK((op_full(op_kron(f)) - testutil::kron_modes(f)).norm() < 1e-13);

  auto v = testutil::random_tt(m, 2, rng);
  Vector fv = flat(v);
  CHECK((op_full(op_diag(v)) - Matrix(fv.asDiagonal())).norm() < 1e-13);
  std::vector<std::vector<double>> mask{{0, 1, 1}, {1, 0}, {1, 1, 1, 0}};
  Vector mv = flat(tt_rank1(mask));
  CHECK((op_full(op_mask_rows(a, mask)) - mv.asDiagonal() * da).norm() < 1e-13 * da.norm());
}

TEST_CASE("reverse and orthogonalization keep values") {
  std::mt19937_64 rng(5);
  auto x = testutil::random_tt({2, 3, 4}, 2, rng);
  auto r = tt_reverse(x);
  CHECK(r.modes() == std::vector<int>{4, 3, 2});
  std::vector<int> i{1, 2, 3}, j{3, 2, 1};
  CHECK(tt_entry(r, j) == doctest::Approx(tt_entry(x, i)));
  auto y = x;
  orthogonalize_left(y, 2);
  CHECK(testutil::rel(flat(y), flat(x)) < 1e-13);
  const auto& c0 = y.core(0);
  CHECK((Matrix(c0.left()).transpose() * c0.left() - Matrix::Identity(c0.r1(), c0.r1())).norm() < 1e-13);
  auto z = x;
  orthogonalize_right(z, 0);
  const auto& c2 = z.core(2);
  CHECK((c2.right() * Matrix(c2.right()).transpose() - Matrix::Identity(c2.r0(), c2.r0())).norm() < 1e-13);
}

TEST_CASE("separable constructors and compression") {
  std::vector<std::vector<double>> f{{1, 2}, {3, 4, 5}};
  auto r1 = tt_rank1(f);
  std::vector<int> idx{1, 2};
  CHECK(tt_entry(r1, idx) == 10.0);
  SeparableTerm t1{2.0, f}, t2{-1.0, {{1, 1}, {1, 1, 1}}};
  auto s = tt_from_separable({t1, t2});
  CHECK(tt_entry(s, idx) == 19.0);
  CHECK(tt_norm(tt_ones({3, 3})) == doctest::Approx(3.0));
  CHECK(tt_norm(tt_zeros({3, 3})) == 0.0);
  CHECK(compression_ratio(r1) == doctest::Approx(5.0 / 6.0));
}

TEST_CASE("maxvol returns a dominant submatrix") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> nd;
  Matrix m(60, 5);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = nd(rng);
  auto rows = maxvol(m, 1e-2);
  REQUIRE(rows.size() == 5);
  Matrix sub(5, 5);
  for (int k = 0; k < 5; ++k) sub.row(k) = m.row(rows[k]);
  Matrix b = m * sub.inverse();
  CHECK(b.cwiseAbs().maxCoeff() <= 1.0 + 1e-2 + 1e-10);
}

TEST_CASE("tt_cross recovers a smooth function") {
  const std::vector<int> modes{12, 12, 12, 12};
  auto x = [](int i) { return -1.0 + 2.0 * i / 11.0; };
  EntryOracle f = [&](std::span<const int> idx) {
    double s = 0;
    for (int k = 0; k < 4; ++k) s += x(idx[k]) * (k + 1) * 0.2;
    return 1.0 / (3.0 + s);
  };
  auto res = tt_cross(f, modes, 1e-10, 20);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> u(0, 11);
  double worst = 0;
  for (int s = 0; s < 300; ++s) {
    std::vector<int> idx{u(rng), u(rng), u(rng), u(rng)};
    worst = std::max(worst, std::abs(tt_entry(res.tt, idx) - f(idx)));
  }
  CHECK(worst < 1e-8);
  CHECK(res.evaluations < 12u * 12 * 12 * 12);
}

TEST_CASE("TTS2 round trip and corrupt input") {
  std::mt19937_64 rng(8);
  auto x = testutil::random_tt({3, 4, 2}, 2, rng);
  std::stringstream ss;
  write_tt(ss, x);
  auto y = read_tt_vector(ss);
  CHECK(y.ranks() == x.ranks());
  CHECK((flat(y) - flat(x)).norm() == 0.0);
  auto op = testutil::random_op({2, 3}, 2, rng);
  std::stringstream so;
  write_tt(so, op);
  auto op2 = read_tt_operator(so);
  CHECK((op_full(op2) - op_full(op)).norm() == 0.0);
  std::stringstream bad("XXXX garbage");
  CHECK_THROWS_AS(read_tt_vector(bad), Error);
  std::stringstream wrong_kind;
  write_tt(wrong_kind, op);
  CHECK_THROWS_AS(read_tt_vector(wrong_kind), Error);
  std::stringstream trunc;
  {
    std::stringstream full;
    write_tt(full, x);
    std::string bytes = full.str();
    trunc.str(bytes.substr(0, bytes.size() - 5));
  }
  CHECK_THROWS_AS(read_tt_vector(trunc), Error);
}

TEST_CASE("shape errors and dense refusal") {
  std::mt19937_64 rng(9);
  auto a = testutil::random_tt({3, 4}, 2, rng), b = testutil::random_tt({4, 3}, 2, rng);
  CHECK_THROWS_AS(tt_add(a, b), ShapeError);
  CHECK_THROWS_AS(tt_hadamard(a, b), ShapeError);
  CHECK_THROWS_AS(tt_round(a, -1.0), InvalidArgument);
  auto big = tt_ones({100, 100, 100});
  CHECK_THROWS_AS(tt_full(big, 1000), RefusalError);
  auto op = testutil::random_op({4, 3}, 1, rng);
  CHECK_THROWS_AS(tt_apply(op, a), ShapeError);
}
