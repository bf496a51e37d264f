#include "ttss/tensor_train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ttss/errors.hpp"
#include "tt_internal.hpp"

namespace ttss {

DenseTensor::DenseTensor(std::vector<int> m) : modes(std::move(m)) {
  std::size_t n = 1;
  for (int k : modes) {
    if (k < 1) throw ShapeError("DenseTensor: mode sizes must be >= 1");
    n *= std::size_t(k);
  }
  data.assign(n, 0.0);
}

std::size_t DenseTensor::offset(std::span<const int> idx) const {
  std::size_t off = 0, stride = 1;
  for (std::size_t k = 0; k < modes.size(); ++k) {
    off += stride * std::size_t(idx[k]);
    stride *= std::size_t(modes[k]);
  }
  return off;
}

double DenseTensor::norm() const {
  double s = 0.0;
  for (double v : data) s += v * v;
  return std::sqrt(s);
}

Core3 Core3::from_left(const Matrix& m, int r0, int n) {
  if (m.rows() != Eigen::Index(r0) * n) throw ShapeError("Core3::from_left: row count mismatch");
  Core3 c(r0, n, static_cast<int>(m.cols()));
  std::copy(m.data(), m.data() + m.size(), c.data());
  return c;
}

Core3 Core3::from_right(const Matrix& m, int n, int r1) {
  if (m.cols() != Eigen::Index(n) * r1) throw ShapeError("Core3::from_right: column count mismatch");
  Core3 c(static_cast<int>(m.rows()), n, r1);
  std::copy(m.data(), m.data() + m.size(), c.data());
  return c;
}

Matrix Core4::slice(int a, int b) const {
  Matrix s(m_, n_);
  for (int j = 0; j < n_; ++j)
    for (int i = 0; i < m_; ++i) s(i, j) = (*this)(a, i, j, b);
  return s;
}

void Core4::set_slice(int a, int b, const Matrix& s) {
  for (int j = 0; j < n_; ++j)
    for (int i = 0; i < m_; ++i) (*this)(a, i, j, b) = s(i, j);
}

TTVector::TTVector(std::vector<Core3> cores) : cores_(std::move(cores)) { validate(); }

std::vector<int> TTVector::modes() const {
  std::vector<int> m;
  for (const auto& c : cores_) m.push_back(c.n());
  return m;
}

std::vector<int> TTVector::ranks() const {
  std::vector<int> r;
  if (cores_.empty()) return r;
  r.push_back(cores_.front().r0());
  for (const auto& c : cores_) r.push_back(c.r1());
  return r;
}

int TTVector::max_rank() const {
  int r = 1;
  for (const auto& c : cores_) r = std::max(r, c.r1());
  return r;
}

std::size_t TTVector::storage() const {
  std::size_t s = 0;
  for (const auto& c : cores_) s += c.size();
  return s;
}

void TTVector::validate() const {
  if (cores_.empty()) throw ShapeError("TTVector: no cores");
  if (cores_.front().r0() != 1 || cores_.back().r1() != 1)
    throw ShapeError("TTVector: boundary ranks must be 1");
  for (std::size_t k = 0; k < cores_.size(); ++k) {
    if (cores_[k].n() < 1) throw ShapeError("TTVector: mode sizes must be >= 1");
    if (cores_[k].r0() < 1 || cores_[k].r1() < 1) throw ShapeError("TTVector: ranks must be >= 1");
    if (k + 1 < cores_.size() && cores_[k].r1() != cores_[k + 1].r0())
      throw ShapeError("TTVector: rank mismatch at bond " + std::to_string(k + 1));
  }
}

TTOperator::TTOperator(std::vector<Core4> cores) : cores_(std::move(cores)) { validate(); }

std::vector<int> TTOperator::row_modes() const {
  std::vector<int> m;
  for (const auto& c : cores_) m.push_back(c.m());
  return m;
}

std::vector<int> TTOperator::col_modes() const {
  std::vector<int> m;
  for (const auto& c : cores_) m.push_back(c.n());
  return m;
}

std::vector<int> TTOperator::ranks() const {
  std::vector<int> r;
  if (cores_.empty()) return r;
  r.push_back(cores_.front().r0());
  for (const auto& c : cores_) r.push_back(c.r1());
  return r;
}

int TTOperator::max_rank() const {
  int r = 1;
  for (const auto& c : cores_) r = std::max(r, c.r1());
  return r;
}

void TTOperator::validate() const {
  if (cores_.empty()) throw ShapeError("TTOperator: no cores");
  if (cores_.front().r0() != 1 || cores_.back().r1() != 1)
    throw ShapeError("TTOperator: boundary ranks must be 1");
  for (std::size_t k = 0; k < cores_.size(); ++k) {
    if (cores_[k].m() < 1 || cores_[k].n() < 1) throw ShapeError("TTOperator: empty mode");
    if (k + 1 < cores_.size() && cores_[k].r1() != cores_[k + 1].r0())
      throw ShapeError("TTOperator: rank mismatch at bond " + std::to_string(k + 1));
  }
}

namespace detail {

void thin_qr(const Matrix& a, Matrix& q, Matrix& r) {
  const Eigen::Index k = std::min(a.rows(), a.cols());
  Eigen::HouseholderQR<Matrix> qr(a);
  q = qr.householderQ() * Matrix::Identity(a.rows(), k);
  r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
}

int truncation_rank(const Vector& s, double abs_tol, int max_rank) {
  int r = static_cast<int>(s.size());
  double tail = 0.0;
  const double tol2 = abs_tol * abs_tol;
  while (r > 1 && tail + s(r - 1) * s(r - 1) <= tol2) {
    tail += s(r - 1) * s(r - 1);
    --r;
  }
  return std::max(1, std::min(r, max_rank));
}

void check_same_modes(const std::vector<int>& a, const std::vector<int>& b, const char* what) {
  if (a != b) throw ShapeError(std::string(what) + ": mode sizes differ");
}

TTVector as_vector(const TTOperator& op) {
  std::vector<Core3> cores;
  for (const auto& c : op.cores()) {
    Core3 v(c.r0(), c.m() * c.n(), c.r1());
    v.storage() = c.storage();
    cores.push_back(std::move(v));
  }
  return TTVector(std::move(cores));
}

TTOperator as_operator(const TTVector& v, const std::vector<int>& m, const std::vector<int>& n) {
  std::vector<Core4> cores;
  for (int k = 0; k < v.dims(); ++k) {
    const Core3& c = v.core(k);
    Core4 o(c.r0(), m[k], n[k], c.r1());
    o.storage() = c.storage();
    cores.push_back(std::move(o));
  }
  return TTOperator(std::move(cores));
}

}  // namespace detail

using detail::check_same_modes;
using detail::thin_qr;

TTVector tt_add(const TTVector& a, const TTVector& b) {
  check_same_modes(a.modes(), b.modes(), "tt_add");
  const int d = a.dims();
  std::vector<Core3> out;
  out.reserve(d);
  if (d == 1) {
    Core3 c = a.core(0);
    for (std::size_t i = 0; i < c.size(); ++i) c.storage()[i] += b.core(0).storage()[i];
    out.push_back(std::move(c));
    return TTVector(std::move(out));
  }
  for (int k = 0; k < d; ++k) {
    const Core3& x = a.core(k);
    const Core3& y = b.core(k);
    const int n = x.n();
    const bool first = k == 0, last = k == d - 1;
    const int r0 = first ? 1 : x.r0() + y.r0();
    const int r1 = last ? 1 : x.r1() + y.r1();
    Core3 c(r0, n, r1);
    const int ya = first ? 0 : x.r0();
    const int yb = last ? 0 : x.r1();
    for (int bb = 0; bb < x.r1(); ++bb)
      for (int i = 0; i < n; ++i)
        for (int aa = 0; aa < x.r0(); ++aa) c(aa, i, bb) = x(aa, i, bb);
    for (int bb = 0; bb < y.r1(); ++bb)
      for (int i = 0; i < n; ++i)
        for (int aa = 0; aa < y.r0(); ++aa) c(ya + aa, i, yb + bb) = y(aa, i, bb);
    out.push_back(std::move(c));
  }
  return TTVector(std::move(out));
}

TTVector tt_scale(const TTVector& a, double s) {
  TTVector out = a;
  for (double& v : out.core(0).storage()) v *= s;
  return out;
}

TTVector tt_sub(const TTVector& a, const TTVector& b) { return tt_add(a, tt_scale(b, -1.0)); }

TTVector tt_hadamard(const TTVector& a, const TTVector& b) {
  check_same_modes(a.modes(), b.modes(), "tt_hadamard");
  std::vector<Core3> out;
  for (int k = 0; k < a.dims(); ++k) {
    const Core3& x = a.core(k);
    const Core3& y = b.core(k);
    Core3 c(x.r0() * y.r0(), x.n(), x.r1() * y.r1());
    for (int yb = 0; yb < y.r1(); ++yb)
      for (int xb = 0; xb < x.r1(); ++xb)
        for (int i = 0; i < x.n(); ++i)
          for (int ya = 0; ya < y.r0(); ++ya) {
            const double yv = y(ya, i, yb);
            for (int xa = 0; xa < x.r0(); ++xa)
              c(xa + x.r0() * ya, i, xb + x.r1() * yb) = x(xa, i, xb) * yv;
          }
    out.push_back(std::move(c));
  }
  return TTVector(std::move(out));
}

double tt_dot(const TTVector& a, const TTVector& b) {
  check_same_modes(a.modes(), b.modes(), "tt_dot");
  Matrix m = Matrix::Ones(1, 1);
  for (int k = 0; k < a.dims(); ++k) {
    const Core3& x = a.core(k);
    const Core3& y = b.core(k);
    Matrix w = m * y.right();  // ra0 x (n*rb1)
    ConstMatrixMap wl(w.data(), Eigen::Index(x.r0()) * x.n(), y.r1());
    m = x.left().transpose() * wl;
  }
  return m(0, 0);
}

void orthogonalize_left(TTVector& v, int upto) {
  Matrix q, r;
  for (int k = 0; k < upto && k + 1 < v.dims(); ++k) {
    Core3& c = v.core(k);
    thin_qr(c.left(), q, r);
    Core3& next = v.core(k + 1);
    Matrix nr = r * next.right();
    const int n = c.n(), r0 = c.r0();
    c = Core3::from_left(q, r0, n);
    next = Core3::from_right(nr, next.n(), next.r1());
  }
}

void orthogonalize_right(TTVector& v, int downto) {
  Matrix q, r;
  for (int k = v.dims() - 1; k > downto && k > 0; --k) {
    Core3& c = v.core(k);
    thin_qr(c.right().transpose(), q, r);
    Core3& prev = v.core(k - 1);
    Matrix pl = prev.left() * r.transpose();
    const int n = c.n(), r1 = c.r1();
    c = Core3::from_right(q.transpose(), n, r1);
    prev = Core3::from_left(pl, prev.r0(), prev.n());
  }
}

double tt_norm(const TTVector& a) {
  TTVector v = a;
  orthogonalize_left(v, v.dims() - 1);
  const auto& s = v.core(v.dims() - 1).storage();
  double acc = 0.0;
  for (double x : s) acc += x * x;
  return std::sqrt(acc);
}

TTVector tt_apply(const TTOperator& op, const TTVector& v) {
  check_same_modes(op.col_modes(), v.modes(), "tt_apply");
  std::vector<Core3> out;
  for (int k = 0; k < v.dims(); ++k) {
    const Core4& A = op.core(k);
    const Core3& x = v.core(k);
    const int ra0 = A.r0(), ra1 = A.r1(), m = A.m(), n = A.n();
    Core3 y(ra0 * x.r0(), m, ra1 * x.r1());
    for (int xb = 0; xb < x.r1(); ++xb)
      for (int ab = 0; ab < ra1; ++ab)
        for (int j = 0; j < n; ++j)
          for (int xa = 0; xa < x.r0(); ++xa) {
            const double xv = x(xa, j, xb);
            if (xv == 0.0) continue;
            for (int i = 0; i < m; ++i)
              for (int aa = 0; aa < ra0; ++aa)
                y(aa + ra0 * xa, i, ab + ra1 * xb) += A(aa, i, j, ab) * xv;
          }
    out.push_back(std::move(y));
  }
  return TTVector(std::move(out));
}

TTVector tt_from_separable(const std::vector<SeparableTerm>& terms) {
  if (terms.empty()) throw ShapeError("tt_from_separable: no terms");
  const std::size_t d = terms.front().factors.size();
  if (d == 0) throw ShapeError("tt_from_separable: zero dimensions");
  std::vector<int> modes;
  for (const auto& f : terms.front().factors) modes.push_back(static_cast<int>(f.size()));
  for (const auto& t : terms) {
    if (t.factors.size() != d) throw ShapeError("tt_from_separable: inconsistent dimension count");
    for (std::size_t k = 0; k < d; ++k)
      if (static_cast<int>(t.factors[k].size()) != modes[k])
        throw ShapeError("tt_from_separable: inconsistent factor length");
  }
  const int r = static_cast<int>(terms.size());
  std::vector<Core3> cores;
  for (std::size_t k = 0; k < d; ++k) {
    const bool first = k == 0, last = k + 1 == d;
    Core3 c(first ? 1 : r, modes[k], last ? 1 : r);
    for (int t = 0; t < r; ++t) {
      const double s = first ? terms[t].scale : 1.0;
      for (int i = 0; i < modes[k]; ++i)
        c(first ? 0 : t, i, last ? 0 : t) = s * terms[t].factors[k][i];
    }
    cores.push_back(std::move(c));
  }
  return TTVector(std::move(cores));
}

TTVector tt_rank1(const std::vector<std::vector<double>>& factors) {
  return tt_from_separable({SeparableTerm{1.0, factors}});
}

TTVector tt_ones(const std::vector<int>& modes) {
  std::vector<std::vector<double>> f;
  for (int n : modes) f.emplace_back(n, 1.0);
  return tt_rank1(f);
}

TTVector tt_zeros(const std::vector<int>& modes) {
  std::vector<Core3> cores;
  for (int n : modes) cores.emplace_back(1, n, 1);
  return TTVector(std::move(cores));
}

double tt_entry(const TTVector& v, std::span<const int> idx) {
  Vector row = Vector::Ones(1);
  for (int k = 0; k < v.dims(); ++k) {
    const Core3& c = v.core(k);
    Vector next = Vector::Zero(c.r1());
    for (int b = 0; b < c.r1(); ++b)
      for (int a = 0; a < c.r0(); ++a) next(b) += row(a) * c(a, idx[k], b);
    row = std::move(next);
  }
  return row(0);
}

double compression_ratio(const TTVector& v) {
  double dense = 1.0;
  for (int n : v.modes()) dense *= n;
  return double(v.storage()) / dense;
}

DenseTensor tt_full(const TTVector& v, std::size_t cap) {
  double total = 1.0;
  for (int n : v.modes()) total *= n;
  if (total > double(cap))
    throw RefusalError("tt_full: " + std::to_string(total) + " entries exceed the dense cap");
  Matrix state = Matrix::Ones(1, 1);  // prefix x rank
  for (int k = 0; k < v.dims(); ++k) {
    const Core3& c = v.core(k);
    Matrix prod = state * c.right();
    const Eigen::Index p = state.rows();
    state = Eigen::Map<Matrix>(prod.data(), p * c.n(), c.r1());
  }
  DenseTensor out(v.modes());
  std::copy(state.data(), state.data() + state.size(), out.data.begin());
  return out;
}

TTVector tt_reverse(const TTVector& v) {
  std::vector<Core3> cores;
  for (int k = v.dims() - 1; k >= 0; --k) {
    const Core3& c = v.core(k);
    Core3 r(c.r1(), c.n(), c.r0());
    for (int b = 0; b < c.r1(); ++b)
      for (int i = 0; i < c.n(); ++i)
        for (int a = 0; a < c.r0(); ++a) r(b, i, a) = c(a, i, b);
    cores.push_back(std::move(r));
  }
  return TTVector(std::move(cores));
}

TTOperator op_reverse(const TTOperator& op) {
  std::vector<Core4> cores;
  for (int k = op.dims() - 1; k >= 0; --k) {
    const Core4& c = op.core(k);
    Core4 r(c.r1(), c.m(), c.n(), c.r0());
    for (int b = 0; b < c.r1(); ++b)
      for (int j = 0; j < c.n(); ++j)
        for (int i = 0; i < c.m(); ++i)
          for (int a = 0; a < c.r0(); ++a) r(b, i, j, a) = c(a, i, j, b);
    cores.push_back(std::move(r));
  }
  return TTOperator(std::move(cores));
}

TTOperator op_transpose(const TTOperator& op) {
  std::vector<Core4> cores;
  for (int k = 0; k < op.dims(); ++k) {
    const Core4& c = op.core(k);
    Core4 t(c.r0(), c.n(), c.m(), c.r1());
    for (int b = 0; b < c.r1(); ++b)
      for (int j = 0; j < c.n(); ++j)
        for (int i = 0; i < c.m(); ++i)
          for (int a = 0; a < c.r0(); ++a) t(a, j, i, b) = c(a, i, j, b);
    cores.push_back(std::move(t));
  }
  return TTOperator(std::move(cores));
}

TTOperator op_identity(const std::vector<int>& modes) {
  std::vector<Matrix> f;
  for (int n : modes) f.push_back(Matrix::Identity(n, n));
  return op_kron(f);
}

TTOperator op_kron(const std::vector<Matrix>& factors) {
  std::vector<Core4> cores;
  for (const auto& f : factors) {
    Core4 c(1, static_cast<int>(f.rows()), static_cast<int>(f.cols()), 1);
    c.set_slice(0, 0, f);
    cores.push_back(std::move(c));
  }
  return TTOperator(std::move(cores));
}

TTOperator op_diag(const TTVector& v) {
  std::vector<Core4> cores;
  for (const auto& c : v.cores()) {
    Core4 o(c.r0(), c.n(), c.n(), c.r1());
    for (int b = 0; b < c.r1(); ++b)
      for (int i = 0; i < c.n(); ++i)
        for (int a = 0; a < c.r0(); ++a) o(a, i, i, b) = c(a, i, b);
    cores.push_back(std::move(o));
  }
  return TTOperator(std::move(cores));
}

TTOperator op_add(const TTOperator& a, const TTOperator& b) {
  check_same_modes(a.row_modes(), b.row_modes(), "op_add");
  check_same_modes(a.col_modes(), b.col_modes(), "op_add");
  return detail::as_operator(tt_add(detail::as_vector(a), detail::as_vector(b)), a.row_modes(),
                             a.col_modes());
}

TTOperator op_scale(const TTOperator& a, double s) {
  TTOperator out = a;
  for (double& v : out.core(0).storage()) v *= s;
  return out;
}

TTOperator op_compose(const TTOperator& a, const TTOperator& b) {
  check_same_modes(a.col_modes(), b.row_modes(), "op_compose");
  std::vector<Core4> cores;
  for (int k = 0; k < a.dims(); ++k) {
    const Core4& x = a.core(k);
    const Core4& y = b.core(k);
    const int m = x.m(), l = x.n(), n = y.n();
    Core4 c(x.r0() * y.r0(), m, n, x.r1() * y.r1());
    for (int yb = 0; yb < y.r1(); ++yb)
      for (int xb = 0; xb < x.r1(); ++xb)
        for (int ya = 0; ya < y.r0(); ++ya)
          for (int xa = 0; xa < x.r0(); ++xa) {
            Matrix s = x.slice(xa, xb) * y.slice(ya, yb);
            for (int j = 0; j < n; ++j)
              for (int i = 0; i < m; ++i) c(xa + x.r0() * ya, i, j, xb + x.r1() * yb) = s(i, j);
          }
    (void)l;
    cores.push_back(std::move(c));
  }
  return TTOperator(std::move(cores));
}

TTOperator op_round(const TTOperator& a, double tol, int max_rank) {
  return detail::as_operator(tt_round(detail::as_vector(a), tol, max_rank), a.row_modes(),
                             a.col_modes());
}

TTOperator op_mask_rows(const TTOperator& a, const std::vector<std::vector<double>>& mask) {
  if (static_cast<int>(mask.size()) != a.dims()) throw ShapeError("op_mask_rows: dimension count");
  TTOperator out = a;
  for (int k = 0; k < a.dims(); ++k) {
    Core4& c = out.core(k);
    if (static_cast<int>(mask[k].size()) != c.m()) throw ShapeError("op_mask_rows: mask length");
    for (int b = 0; b < c.r1(); ++b)
      for (int j = 0; j < c.n(); ++j)
        for (int i = 0; i < c.m(); ++i)
          for (int aa = 0; aa < c.r0(); ++aa) c(aa, i, j, b) *= mask[k][i];
  }
  return out;
}

Matrix op_full(const TTOperator& a, std::size_t cap) {
  double rows = 1.0, cols = 1.0;
  for (int m : a.row_modes()) rows *= m;
  for (int n : a.col_modes()) cols *= n;
  if (rows * cols > double(cap))
    throw RefusalError("op_full: dense operator exceeds the cap");
  std::vector<Matrix> state{Matrix::Ones(1, 1)};
  for (int k = 0; k < a.dims(); ++k) {
    const Core4& c = a.core(k);
    const Eigen::Index pm = state[0].rows(), pn = state[0].cols();
    std::vector<Matrix> next(c.r1(), Matrix::Zero(pm * c.m(), pn * c.n()));
    for (int b = 0; b < c.r1(); ++b)
      for (int aa = 0; aa < c.r0(); ++aa)
        for (int j = 0; j < c.n(); ++j)
          for (int i = 0; i < c.m(); ++i) {
            const double v = c(aa, i, j, b);
            if (v == 0.0) continue;
            next[b].block(pm * i, pn * j, pm, pn) += v * state[aa];
          }
    state = std::move(next);
  }
  return state[0];
}

}  // namespace ttss
