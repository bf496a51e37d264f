#include <cmath>

#include "ttss/errors.hpp"
#include "ttss/tensor_train.hpp"
#include "tt_internal.hpp"

namespace ttss {

namespace {

Eigen::BDCSVD<Matrix> thin_svd(const Matrix& a) {
  return Eigen::BDCSVD<Matrix>(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
}

}  // namespace

TTVector tt_svd(const DenseTensor& dense, double tol, int max_rank) {
  if (tol < 0) throw InvalidArgument("tt_svd: negative tolerance");
  if (max_rank < 1) throw InvalidArgument("tt_svd: max_rank must be >= 1");
  const int d = static_cast<int>(dense.modes.size());
  if (d == 0) throw ShapeError("tt_svd: zero-dimensional input");
  const double delta = d > 1 ? tol / std::sqrt(double(d - 1)) * dense.norm() : 0.0;

  std::vector<Core3> cores;
  Matrix c = Eigen::Map<const Matrix>(dense.data.data(), dense.modes[0],
                                      Eigen::Index(dense.size() / dense.modes[0]));
  int r_prev = 1;
  for (int k = 0; k + 1 < d; ++k) {
    const int n = dense.modes[k];
    const Eigen::Index rest = c.size() / (Eigen::Index(r_prev) * n);
    Matrix unf = Eigen::Map<Matrix>(c.data(), Eigen::Index(r_prev) * n, rest);
    auto svd = thin_svd(unf);
    const Vector& s = svd.singularValues();
    int r = detail::truncation_rank(s, delta, max_rank);
    cores.push_back(Core3::from_left(svd.matrixU().leftCols(r), r_prev, n));
    c = s.head(r).asDiagonal() * svd.matrixV().leftCols(r).transpose();
    r_prev = r;
  }
  cores.push_back(Core3::from_right(c, dense.modes[d - 1], 1));
  return TTVector(std::move(cores));
}

TTVector tt_round(const TTVector& v, double tol, int max_rank) {
  if (tol < 0) throw InvalidArgument("tt_round: negative tolerance");
  if (max_rank < 1) throw InvalidArgument("tt_round: max_rank must be >= 1");
  const int d = v.dims();
  TTVector w = v;
  if (d == 1) return w;
  orthogonalize_right(w, 0);
  const double nrm = w.core(0).left().norm();
  const double delta = tol / std::sqrt(double(d - 1)) * nrm;
  for (int k = 0; k + 1 < d; ++k) {
    Core3& c = w.core(k);
    auto svd = thin_svd(c.left());
    const Vector& s = svd.singularValues();
    int r = detail::truncation_rank(s, delta, max_rank);
    Matrix sv = s.head(r).asDiagonal() * svd.matrixV().leftCols(r).transpose();
    Core3& next = w.core(k + 1);
    Matrix nr = sv * next.right();
    const int r0 = c.r0(), n = c.n();
    c = Core3::from_left(svd.matrixU().leftCols(r), r0, n);
    next = Core3::from_right(nr, next.n(), next.r1());
  }
  return w;
}

}  // namespace ttss
