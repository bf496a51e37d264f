#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ttss {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using MatrixMap = Eigen::Map<Matrix>;
using ConstMatrixMap = Eigen::Map<const Matrix>;

inline constexpr int kNoRankCap = std::numeric_limits<int>::max();
inline constexpr std::size_t kDefaultDenseCap = 100'000'000;

// Dense d-way array, first index fastest.
struct DenseTensor {
  std::vector<int> modes;
  std::vector<double> data;

  DenseTensor() = default;
  explicit DenseTensor(std::vector<int> m);

  std::size_t size() const { return data.size(); }
  std::size_t offset(std::span<const int> idx) const;
  double& at(std::span<const int> idx) { return data[offset(idx)]; }
  double at(std::span<const int> idx) const { return data[offset(idx)]; }
  double norm() const;
};

// Order-3 core, entry (a, i, b) stored at a + r0*(i + n*b).  Both the left
// unfolding (r0*n x r1) and the right unfolding (r0 x n*r1) are plain
// column-major views of the same buffer.
class Core3 {
 public:
  Core3() = default;
  Core3(int r0, int n, int r1) : r0_(r0), n_(n), r1_(r1), data_(std::size_t(r0) * n * r1, 0.0) {}

  int r0() const { return r0_; }
  int n() const { return n_; }
  int r1() const { return r1_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(int a, int i, int b) { return data_[a + std::size_t(r0_) * (i + std::size_t(n_) * b)]; }
  double operator()(int a, int i, int b) const { return data_[a + std::size_t(r0_) * (i + std::size_t(n_) * b)]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& storage() { return data_; }
  const std::vector<double>& storage() const { return data_; }

  MatrixMap left() { return {data_.data(), Eigen::Index(r0_) * n_, r1_}; }
  ConstMatrixMap left() const { return {data_.data(), Eigen::Index(r0_) * n_, r1_}; }
  MatrixMap right() { return {data_.data(), r0_, Eigen::Index(n_) * r1_}; }
  ConstMatrixMap right() const { return {data_.data(), r0_, Eigen::Index(n_) * r1_}; }

  static Core3 from_left(const Matrix& m, int r0, int n);
  static Core3 from_right(const Matrix& m, int n, int r1);

 private:
  int r0_ = 0, n_ = 0, r1_ = 0;
  std::vector<double> data_;
};

// Order-4 operator core, entry (a, i, j, b) (i row mode, j column mode)
// stored at a + r0*(i + m*(j + n*b)).
class Core4 {
 public:
  Core4() = default;
  Core4(int r0, int m, int n, int r1)
      : r0_(r0), m_(m), n_(n), r1_(r1), data_(std::size_t(r0) * m * n * r1, 0.0) {}

  int r0() const { return r0_; }
  int m() const { return m_; }
  int n() const { return n_; }
  int r1() const { return r1_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(int a, int i, int j, int b) {
    return data_[a + std::size_t(r0_) * (i + std::size_t(m_) * (j + std::size_t(n_) * b))];
  }
  double operator()(int a, int i, int j, int b) const {
    return data_[a + std::size_t(r0_) * (i + std::size_t(m_) * (j + std::size_t(n_) * b))];
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& storage() { return data_; }
  const std::vector<double>& storage() const { return data_; }

  // Slice (a, b) as an m x n matrix.
  Matrix slice(int a, int b) const;
  void set_slice(int a, int b, const Matrix& s);

 private:
  int r0_ = 0, m_ = 0, n_ = 0, r1_ = 0;
  std::vector<double> data_;
};

class TTVector {
 public:
  TTVector() = default;
  explicit TTVector(std::vector<Core3> cores);

  int dims() const { return static_cast<int>(cores_.size()); }
  std::vector<int> modes() const;
  std::vector<int> ranks() const;  // d+1 entries, first and last are 1
  int max_rank() const;
  std::size_t storage() const;     // sum of r0*n*r1

  Core3& core(int k) { return cores_[k]; }
  const Core3& core(int k) const { return cores_[k]; }
  std::vector<Core3>& cores() { return cores_; }
  const std::vector<Core3>& cores() const { return cores_; }

  // Throws ShapeError when the chain is inconsistent.
  void validate() const;

 private:
  std::vector<Core3> cores_;
};

class TTOperator {
 public:
  TTOperator() = default;
  explicit TTOperator(std::vector<Core4> cores);

  int dims() const { return static_cast<int>(cores_.size()); }
  std::vector<int> row_modes() const;
  std::vector<int> col_modes() const;
  std::vector<int> ranks() const;
  int max_rank() const;

  Core4& core(int k) { return cores_[k]; }
  const Core4& core(int k) const { return cores_[k]; }
  std::vector<Core4>& cores() { return cores_; }
  const std::vector<Core4>& cores() const { return cores_; }

  void validate() const;

 private:
  std::vector<Core4> cores_;
};

struct SeparableTerm {
  double scale = 1.0;
  std::vector<std::vector<double>> factors;  // one vector per dimension
};

// Decomposition and rounding.  Each of the d-1 unfoldings is truncated with
// absolute tail threshold tol/sqrt(d-1)*||A||_F.
TTVector tt_svd(const DenseTensor& dense, double tol, int max_rank = kNoRankCap);
TTVector tt_round(const TTVector& v, double tol, int max_rank = kNoRankCap);

// Exact arithmetic.
TTVector tt_add(const TTVector& a, const TTVector& b);
TTVector tt_sub(const TTVector& a, const TTVector& b);
TTVector tt_scale(const TTVector& a, double s);
TTVector tt_hadamard(const TTVector& a, const TTVector& b);
double tt_dot(const TTVector& a, const TTVector& b);
double tt_norm(const TTVector& a);
TTVector tt_apply(const TTOperator& op, const TTVector& v);

TTVector tt_from_separable(const std::vector<SeparableTerm>& terms);
TTVector tt_rank1(const std::vector<std::vector<double>>& factors);
TTVector tt_ones(const std::vector<int>& modes);
TTVector tt_zeros(const std::vector<int>& modes);

double tt_entry(const TTVector& v, std::span<const int> idx);
double compression_ratio(const TTVector& v);
DenseTensor tt_full(const TTVector& v, std::size_t cap = kDefaultDenseCap);

// Gauge helpers.  After orthogonalize_left(v, k) cores 0..k-1 are left
// orthonormal; after orthogonalize_right(v, k) cores k+1..d-1 are right
// orthonormal.  Values are unchanged.
void orthogonalize_left(TTVector& v, int upto);
void orthogonalize_right(TTVector& v, int downto);

// Reversed dimension order (core k -> core d-1-k, bond indices swapped).
TTVector tt_reverse(const TTVector& v);
TTOperator op_reverse(const TTOperator& op);
TTOperator op_transpose(const TTOperator& op);

// Operators.
TTOperator op_identity(const std::vector<int>& modes);
TTOperator op_kron(const std::vector<Matrix>& factors);  // rank 1, factors[k] acts on mode k
TTOperator op_diag(const TTVector& v);
TTOperator op_add(const TTOperator& a, const TTOperator& b);
TTOperator op_scale(const TTOperator& a, double s);
TTOperator op_compose(const TTOperator& a, const TTOperator& b);  // a * b
TTOperator op_round(const TTOperator& a, double tol, int max_rank = kNoRankCap);
// Row mask: multiplies row i of mode k by mask[k][i] (left product with a
// rank-1 diagonal).
TTOperator op_mask_rows(const TTOperator& a, const std::vector<std::vector<double>>& mask);
// Dense matrix, row/column multi-indices first-index-fastest.
Matrix op_full(const TTOperator& a, std::size_t cap = 50'000'000);

// Row indices of a dominant r x r submatrix of the tall N x r matrix m:
// all entries of m * m(rows,:)^{-1} are bounded by 1 + delta.  Sorted.
std::vector<int> maxvol(const Matrix& m, double delta = 1e-2, int max_iters = 0);

struct CrossOptions {
  int max_sweeps = 12;
  int enrichment = 2;
  int init_rank = 2;
  int sample_size = 512;
  std::uint64_t seed = 12345;
};

struct CrossResult {
  TTVector tt;
  double error_estimate = 0.0;  // relative, on a random entry sample
  bool converged = false;
  int sweeps = 0;
  std::size_t evaluations = 0;
};

using EntryOracle = std::function<double(std::span<const int>)>;

CrossResult tt_cross(const EntryOracle& oracle, const std::vector<int>& modes, double tol,
                     int max_rank, const CrossOptions& opts = {});

}  // namespace ttss
