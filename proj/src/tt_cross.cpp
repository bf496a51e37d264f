#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "ttss/errors.hpp"
#include "ttss/tensor_train.hpp"
#include "tt_internal.hpp"

namespace ttss {

std::vector<int> maxvol(const Matrix& m, double delta, int max_iters) {
  const Eigen::Index n = m.rows(), r = m.cols();
  if (n < r) throw InvalidArgument("maxvol: matrix must be tall");
  if (r == 0) return {};
  const double scale = m.cwiseAbs().maxCoeff();
  if (!(scale > 0)) throw NumericalRankError("maxvol: zero matrix");

  // Initial rows from Gaussian elimination with row pivoting.
  Matrix w = m;
  std::vector<int> rows;
  std::vector<char> used(n, 0);
  for (Eigen::Index c = 0; c < r; ++c) {
    Eigen::Index p = -1;
    double best = -1.0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (!used[i] && std::abs(w(i, c)) > best) {
        best = std::abs(w(i, c));
        p = i;
      }
    if (best <= 1e-12 * scale) throw NumericalRankError("maxvol: matrix is numerically rank deficient");
    rows.push_back(static_cast<int>(p));
    used[p] = 1;
    if (c + 1 < r) {
      Vector col = w.col(c) / w(p, c);
      w.rightCols(r - c - 1) -= col * w.row(p).tail(r - c - 1);
    }
  }

  Matrix sub(r, r);
  for (Eigen::Index j = 0; j < r; ++j) sub.row(j) = m.row(rows[j]);
  Matrix b = m * sub.partialPivLu().inverse();
  if (max_iters <= 0) max_iters = 100 * static_cast<int>(r) + 100;
  for (int it = 0; it < max_iters; ++it) {
    Eigen::Index i, j;
    const double v = b.cwiseAbs().maxCoeff(&i, &j);
    if (v <= 1.0 + delta) break;
    rows[j] = static_cast<int>(i);
    Vector bj = b.col(j);
    Eigen::RowVectorXd bi = b.row(i);
    bi(j) -= 1.0;
    b.noalias() -= bj * (bi / bj(i));
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

namespace {

using MultiIndex = std::vector<int>;

struct CrossState {
  const EntryOracle& oracle;
  const std::vector<int>& modes;
  std::size_t evaluations = 0;
  MultiIndex scratch;

  // Fiber tensor (|I| x n_k x |J|) with entries f(I[a], i, J[b]).
  Core3 fiber(int k, const std::vector<MultiIndex>& left, const std::vector<MultiIndex>& right) {
    const int n = modes[k];
    Core3 c(static_cast<int>(left.size()), n, static_cast<int>(right.size()));
    scratch.resize(modes.size());
    for (std::size_t b = 0; b < right.size(); ++b)
      for (int i = 0; i < n; ++i)
        for (std::size_t a = 0; a < left.size(); ++a) {
          std::copy(left[a].begin(), left[a].end(), scratch.begin());
          scratch[k] = i;
          std::copy(right[b].begin(), right[b].end(), scratch.begin() + k + 1);
          c(static_cast<int>(a), i, static_cast<int>(b)) = oracle(scratch);
          ++evaluations;
        }
    return c;
  }
};

// Orthonormal basis for the dominant column space of `m` plus `extra` random
// directions, at most `cap` columns.
Matrix enriched_basis(const Matrix& m, double rel_tol, int extra, int cap, std::mt19937_64& rng) {
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  const double total = s.norm();
  int q = detail::truncation_rank(s, rel_tol * total, cap);
  const int cols = std::min<int>({q + extra, cap, static_cast<int>(m.rows())});
  Matrix basis(m.rows(), cols);
  basis.leftCols(q) = svd.matrixU().leftCols(q);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int j = q; j < cols; ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) basis(i, j) = nd(rng);
  Matrix qm, rm;
  detail::thin_qr(basis, qm, rm);
  return qm;
}

}  // namespace

CrossResult tt_cross(const EntryOracle& oracle, const std::vector<int>& modes, double tol,
                     int max_rank, const CrossOptions& opts) {
  if (modes.empty()) throw ShapeError("tt_cross: no modes");
  for (int n : modes)
    if (n < 1) throw ShapeError("tt_cross: mode sizes must be >= 1");
  if (tol < 0) throw InvalidArgument("tt_cross: negative tolerance");
  if (max_rank < 1) throw InvalidArgument("tt_cross: max_rank must be >= 1");

  const int d = static_cast<int>(modes.size());
  std::mt19937_64 rng(opts.seed);
  CrossState st{oracle, modes, 0, {}};

  auto random_index = [&](int from, int to) {
    MultiIndex idx(to - from);
    for (int k = from; k < to; ++k) idx[k - from] = std::uniform_int_distribution<int>(0, modes[k] - 1)(rng);
    return idx;
  };

  // Random sample for the error estimate.
  std::vector<MultiIndex> sample;
  std::vector<double> sample_val;
  for (int s = 0; s < opts.sample_size; ++s) {
    sample.push_back(random_index(0, d));
    sample_val.push_back(oracle(sample.back()));
    ++st.evaluations;
  }
  double sample_norm = 0.0;
  for (double v : sample_val) sample_norm += v * v;
  sample_norm = std::sqrt(sample_norm);

  std::vector<std::vector<MultiIndex>> left(d + 1), right(d + 1);
  left[0] = {MultiIndex{}};
  right[d] = {MultiIndex{}};
  for (int k = d - 1; k >= 1; --k) {
    double avail = 1.0;
    for (int j = k; j < d; ++j) avail *= modes[j];
    const int r = static_cast<int>(std::min<double>({double(opts.init_rank), avail, double(max_rank)}));
    std::set<MultiIndex> seen;
    while (static_cast<int>(seen.size()) < r) seen.insert(random_index(k, d));
    right[k].assign(seen.begin(), seen.end());
  }

  const double rel_tol = 0.1 * tol / std::sqrt(std::max(1.0, double(d - 1)));
  CrossResult result;
  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    std::vector<Core3> cores;
    for (int k = 0; k + 1 < d; ++k) {
      Core3 c = st.fiber(k, left[k], right[k + 1]);
      const int rows = c.r0() * c.n();
      Matrix q = enriched_basis(c.left(), rel_tol, opts.enrichment, max_rank, rng);
      std::vector<int> sel = maxvol(q);
      Matrix sub(sel.size(), q.cols());
      for (std::size_t j = 0; j < sel.size(); ++j) sub.row(j) = q.row(sel[j]);
      Matrix interp = q * sub.partialPivLu().inverse();
      cores.push_back(Core3::from_left(interp, c.r0(), c.n()));
      std::vector<MultiIndex> next;
      for (int s : sel) {
        MultiIndex idx = left[k][s % c.r0()];
        idx.push_back(s / c.r0());
        next.push_back(std::move(idx));
      }
      left[k + 1] = std::move(next);
      (void)rows;
    }
    cores.push_back(st.fiber(d - 1, left[d - 1], right[d]));
    result.tt = TTVector(std::move(cores));
    result.sweeps = sweep;

    double err = 0.0;
    for (std::size_t s = 0; s < sample.size(); ++s) {
      double e = tt_entry(result.tt, sample[s]) - sample_val[s];
      err += e * e;
    }
    err = std::sqrt(err) / (sample_norm > 0 ? sample_norm : 1.0);
    result.error_estimate = err;
    if (err <= tol) {
      result.converged = true;
      break;
    }
    if (sweep == opts.max_sweeps) break;

    for (int k = d - 1; k >= 1; --k) {
      Core3 c = st.fiber(k, left[k], right[k + 1]);
      Matrix t = c.right().transpose();  // (n*|J|) x |I|
      Matrix q = enriched_basis(t, rel_tol, opts.enrichment, max_rank, rng);
      std::vector<int> sel = maxvol(q);
      std::vector<MultiIndex> next;
      for (int s : sel) {
        MultiIndex idx{s % c.n()};
        const MultiIndex& tail = right[k + 1][s / c.n()];
        idx.insert(idx.end(), tail.begin(), tail.end());
        next.push_back(std::move(idx));
      }
      right[k] = std::move(next);
    }
  }
  result.tt = tt_round(result.tt, 0.1 * tol);
  result.evaluations = st.evaluations;
  return result;
}

}  // namespace ttss
