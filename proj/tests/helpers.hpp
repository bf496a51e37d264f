#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "ttss/spectral1d.hpp"
#include "ttss/tensor_train.hpp"

namespace testutil {

using ttss::Matrix;
using ttss::Vector;

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return k;
}

// Dense operator for first-index-fastest multi-indices: mode 0 is innermost,
// so the Kronecker product runs from the last factor to the first.
inline Matrix kron_modes(const std::vector<Matrix>& f) {
  Matrix k = f.back();
  for (int i = static_cast<int>(f.size()) - 2; i >= 0; --i) k = kron(k, f[i]);
  return k;
}

inline Vector flat(const ttss::TTVector& v) {
  auto d = ttss::tt_full(v);
  return Eigen::Map<Vector>(d.data.data(), static_cast<Eigen::Index>(d.data.size()));
}

inline ttss::TTVector random_tt(const std::vector<int>& modes, int rank, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::vector<ttss::Core3> cores;
  const int d = static_cast<int>(modes.size());
  for (int k = 0; k < d; ++k) {
    ttss::Core3 c(k == 0 ? 1 : rank, modes[k], k == d - 1 ? 1 : rank);
    for (double& x : c.storage()) x = nd(rng);
    cores.push_back(std::move(c));
  }
  return ttss::TTVector(std::move(cores));
}

inline ttss::TTOperator random_op(const std::vector<int>& modes, int rank, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::vector<ttss::Core4> cores;
  const int d = static_cast<int>(modes.size());
  for (int k = 0; k < d; ++k) {
    ttss::Core4 c(k == 0 ? 1 : rank, modes[k], modes[k], k == d - 1 ? 1 : rank);
    for (double& x : c.storage()) x = nd(rng);
    cores.push_back(std::move(c));
  }
  return ttss::TTOperator(std::move(cores));
}

inline ttss::DenseTensor random_dense(const std::vector<int>& modes, std::mt19937_64& rng) {
  ttss::DenseTensor t(modes);
  std::normal_distribution<double> nd;
  for (double& x : t.data) x = nd(rng);
  return t;
}

inline double rel(const Vector& a, const Vector& b) { return (a - b).norm() / b.norm(); }

// Random polynomial coefficients in the Legendre-free monomial basis, scaled
// so that values on [-1,1] stay O(1).
struct Poly {
  std::vector<double> c;
  double operator()(double x, int deriv = 0) const {
    std::vector<double> d = c;
    for (int m = 0; m < deriv && !d.empty(); ++m) {
      for (std::size_t j = 1; j < d.size(); ++j) d[j - 1] = double(j) * d[j];
      d.pop_back();
    }
    double v = 0.0;
    for (std::size_t j = d.size(); j-- > 0;) v = v * x + d[j];
    return v;
  }
};

inline Poly random_poly(int degree, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Poly p;
  for (int j = 0; j <= degree; ++j) p.c.push_back(u(rng));
  return p;
}

}  // namespace testutil
