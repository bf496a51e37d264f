#include "ttss/tt_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "gmres.hpp"
#include "ttss/errors.hpp"
#include "tt_internal.hpp"

namespace ttss {

void SolverConfig::validate() const {
  if (max_sweeps < 1) throw InvalidArgument("solver: max_sweeps must be >= 1");
  if (!(residual_tol > 0)) throw InvalidArgument("solver: residual_tol must be positive");
  if (!(rounding_tol > 0)) throw InvalidArgument("solver: rounding_tol must be positive");
  if (enrichment_rank < 0) throw InvalidArgument("solver: enrichment_rank must be >= 0");
  if (max_rank < 1) throw InvalidArgument("solver: max_rank must be >= 1");
  if (stagnation_window < 1) throw InvalidArgument("solver: stagnation_window must be >= 1");
  if (!(divergence_factor > 1)) throw InvalidArgument("solver: divergence_factor must be > 1");
}

namespace {

// Bond interface p x R x q, entry (a, s, b) at a + p*(s + R*b).
struct Iface {
  int p = 1, r = 1, q = 1;
  Matrix m = Matrix::Ones(1, 1);  // (p*R) x q view of the same layout

  double operator()(int a, int s, int b) const { return m.data()[a + p * (s + r * b)]; }
};

Core3 flip(const Core3& c) {
  Core3 f(c.r1(), c.n(), c.r0());
  for (int b = 0; b < c.r1(); ++b)
    for (int i = 0; i < c.n(); ++i)
      for (int a = 0; a < c.r0(); ++a) f(b, i, a) = c(a, i, b);
  return f;
}

Core4 flip(const Core4& c) {
  Core4 f(c.r1(), c.m(), c.n(), c.r0());
  for (int b = 0; b < c.r1(); ++b)
    for (int j = 0; j < c.n(); ++j)
      for (int i = 0; i < c.m(); ++i)
        for (int a = 0; a < c.r0(); ++a) f(b, i, j, a) = c(a, i, j, b);
  return f;
}

// T2(a, i, s1, b') = sum_{s0, j} sum_{a'} phi(a, s0, a') A(s0, i, j, s1) u(a', j, b'),
// returned as (p*m) x (R1*t).
Matrix contract_left_op(const Iface& phi, const Core4& A, const Core3& u) {
  const int p = phi.p, r0 = A.r0(), r1 = A.r1(), m = A.m(), n = A.n(), t = u.r1();
  Matrix t1 = phi.m * u.right();  // (p*R0) x (n*t)
  Matrix t2 = Matrix::Zero(Eigen::Index(p) * m, Eigen::Index(r1) * t);
  for (int bt = 0; bt < t; ++bt)
    for (int s1 = 0; s1 < r1; ++s1) {
      auto out = t2.col(s1 + r1 * bt);
      for (int j = 0; j < n; ++j) {
        auto in = t1.col(j + n * bt);
        for (int s0 = 0; s0 < r0; ++s0)
          for (int i = 0; i < m; ++i) {
            const double av = A(s0, i, j, s1);
            if (av == 0.0) continue;
            out.segment(Eigen::Index(p) * i, p) += av * in.segment(Eigen::Index(p) * s0, p);
          }
      }
    }
  return t2;
}

Iface left_update(const Iface& phi, const Core3& x, const Core4& A, const Core3& y) {
  Matrix t2 = contract_left_op(phi, A, y);
  Iface out;
  out.p = x.r1();
  out.r = A.r1();
  out.q = y.r1();
  Matrix prod = x.left().transpose() * t2;  // r1 x (R1 * t)
  out.m = Eigen::Map<Matrix>(prod.data(), Eigen::Index(out.p) * out.r, out.q);
  return out;
}

Iface right_update(const Iface& phi, const Core3& x, const Core4& A, const Core3& y) {
  return left_update(phi, flip(x), flip(A), flip(y));
}

Matrix left_vec(const Matrix& psi, const Core3& x, const Core3& b) {
  Matrix t = psi * b.right();
  ConstMatrixMap tv(t.data(), Eigen::Index(x.r0()) * x.n(), b.r1());
  return x.left().transpose() * tv;
}

Matrix right_vec(const Matrix& psi, const Core3& x, const Core3& b) {
  return left_vec(psi, flip(x), flip(b));
}

// Local right-hand side (p*n) x s.
Matrix local_rhs(const Matrix& psi_l, const Core3& b, const Matrix& psi_r) {
  Matrix t = psi_l * b.right();
  ConstMatrixMap tv(t.data(), psi_l.rows() * b.n(), b.r1());
  return tv * psi_r.transpose();
}

// Local operator applied to u: (p*m) x s.
Matrix apply_local(const Iface& l, const Core4& A, const Iface& r, const Core3& u) {
  Matrix t2 = contract_left_op(l, A, u);
  ConstMatrixMap rm(r.m.data(), r.p, Eigen::Index(r.r) * r.q);
  return t2 * rm.transpose();
}

Matrix dense_local(const Iface& l, const Core4& A, const Iface& r) {
  const int p = l.p, n = A.n(), s = r.p;
  const Eigen::Index inner = Eigen::Index(p) * n;
  const Eigen::Index size = inner * s;
  Matrix out = Matrix::Zero(size, size);
  Matrix al(inner, inner);
  for (int b = 0; b < A.r1(); ++b) {
    al.setZero();
    for (int a = 0; a < A.r0(); ++a)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          const double av = A(a, i, j, b);
          if (av == 0.0) continue;
          for (int ap = 0; ap < p; ++ap)
            for (int aa = 0; aa < p; ++aa) al(aa + p * i, ap + p * j) += av * l(aa, a, ap);
        }
    for (int bp = 0; bp < s; ++bp)
      for (int bb = 0; bb < s; ++bb) {
        const double rv = r(bb, b, bp);
        if (rv == 0.0) continue;
        out.block(inner * bb, inner * bp, inner, inner) += rv * al;
      }
  }
  return out;
}

struct BlockJacobi {
  int p = 0, n = 0, s = 0;
  std::vector<Eigen::PartialPivLU<Matrix>> lus;

  BlockJacobi(const Iface& l, const Core4& A, const Iface& r) : p(l.p), n(A.n()), s(r.p) {
    lus.reserve(std::size_t(p) * s);
    Matrix blk(n, n);
    for (int bb = 0; bb < s; ++bb)
      for (int aa = 0; aa < p; ++aa) {
        blk.setZero();
        for (int b = 0; b < A.r1(); ++b)
          for (int a = 0; a < A.r0(); ++a) {
            const double c = l(aa, a, aa) * r(bb, b, bb);
            if (c == 0.0) continue;
            for (int j = 0; j < n; ++j)
              for (int i = 0; i < n; ++i) blk(i, j) += c * A(a, i, j, b);
          }
        // Guard against an all-zero diagonal block.
        if (blk.cwiseAbs().maxCoeff() == 0.0) blk.setIdentity();
        lus.emplace_back(blk);
      }
  }

  void apply(const Vector& in, Vector& out) const {
    out.resize(in.size());
    Vector tmp(n);
    for (int bb = 0; bb < s; ++bb)
      for (int aa = 0; aa < p; ++aa) {
        for (int i = 0; i < n; ++i) tmp(i) = in(aa + std::size_t(p) * (i + std::size_t(n) * bb));
        Vector y = lus[std::size_t(aa) + std::size_t(p) * bb].solve(tmp);
        for (int i = 0; i < n; ++i) out(aa + std::size_t(p) * (i + std::size_t(n) * bb)) = y(i);
      }
  }
};

Core3 core_from(const Vector& v, int r0, int n, int r1) {
  Core3 c(r0, n, r1);
  std::copy(v.data(), v.data() + v.size(), c.data());
  return c;
}

Vector local_solve(const Iface& l, const Core4& A, const Iface& r, const Matrix& f,
                   const Core3& guess, const SolverConfig& cfg, double inner_tol,
                   SolveReport& rep) {
  const Eigen::Index size = f.size();
  const bool direct = cfg.local_solver == LocalSolver::Direct ||
                      (cfg.local_solver == LocalSolver::Auto && size <= cfg.local_direct_max);
  Vector rhs = Eigen::Map<const Vector>(f.data(), size);
  if (direct) {
    ++rep.local_direct_solves;
    Matrix b = dense_local(l, A, r);
    return b.partialPivLu().solve(rhs);
  }
  ++rep.local_iterative_solves;
  const int p = l.p, n = A.n(), s = r.p;
  BlockJacobi prec(l, A, r);
  auto op = [&](const Vector& in, Vector& out) {
    Matrix y = apply_local(l, A, r, core_from(in, p, n, s));
    out = Eigen::Map<const Vector>(y.data(), y.size());
  };
  auto pc = [&](const Vector& in, Vector& out) { prec.apply(in, out); };
  Vector x = Eigen::Map<const Vector>(guess.data(), static_cast<Eigen::Index>(guess.size()));
  if (x.size() != size) x = Vector::Zero(size);
  detail::gmres(op, pc, rhs, x, inner_tol, cfg.gmres_restart, cfg.gmres_max_iters);
  return x;
}

TTVector random_tt(const std::vector<int>& modes, int rank, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<Core3> cores;
  const int d = static_cast<int>(modes.size());
  for (int k = 0; k < d; ++k) {
    Core3 c(k == 0 ? 1 : rank, modes[k], k == d - 1 ? 1 : rank);
    for (double& v : c.storage()) v = nd(rng);
    cores.push_back(std::move(c));
  }
  return TTVector(std::move(cores));
}

// One left-to-right pass: local solve, truncation, enrichment.
void half_sweep(const TTOperator& A, const TTVector& b, TTVector& x, TTVector& z,
                const SolverConfig& cfg, double inner_tol, SolveReport& rep) {
  const int d = x.dims();
  const bool use_z = cfg.enrichment_rank > 0 && d > 1;
  orthogonalize_right(x, 0);
  if (use_z) orthogonalize_right(z, 0);

  std::vector<Iface> xax(d + 1), zax(d + 1);
  std::vector<Matrix> xb(d + 1, Matrix::Ones(1, 1)), zb(d + 1, Matrix::Ones(1, 1));
  for (int k = d - 1; k >= 1; --k) {
    xax[k] = right_update(xax[k + 1], x.core(k), A.core(k), x.core(k));
    xb[k] = right_vec(xb[k + 1], x.core(k), b.core(k));
    if (use_z) {
      zax[k] = right_update(zax[k + 1], z.core(k), A.core(k), x.core(k));
      zb[k] = right_vec(zb[k + 1], z.core(k), b.core(k));
    }
  }

  for (int k = 0; k < d; ++k) {
    const Core4& ak = A.core(k);
    Core3& xk = x.core(k);
    const int r0 = xk.r0(), n = xk.n(), r1 = xk.r1();
    Matrix f = local_rhs(xb[k], b.core(k), xb[k + 1]);
    Vector u = local_solve(xax[k], ak, xax[k + 1], f, xk, cfg, inner_tol, rep);
    if (k == d - 1) {
      xk = core_from(u, r0, n, r1);
      break;
    }

    Eigen::Map<const Matrix> um(u.data(), Eigen::Index(r0) * n, r1);
    Eigen::BDCSVD<Matrix> svd(um, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();
    const int r = detail::truncation_rank(sv, cfg.rounding_tol * sv.norm(), cfg.max_rank);
    Matrix ut = svd.matrixU().leftCols(r) * sv.head(r).asDiagonal() *
                svd.matrixV().leftCols(r).transpose();
    Matrix basis = svd.matrixU().leftCols(r);

    if (use_z) {
      Core3 utc = Core3::from_left(ut, r0, n);
      Matrix enr = local_rhs(xb[k], b.core(k), zb[k + 1]) - apply_local(xax[k], ak, zax[k + 1], utc);
      const int extra = std::min<int>(cfg.max_rank - r, static_cast<int>(enr.cols()));
      if (extra > 0) {
        Matrix wide(basis.rows(), r + extra);
        wide << basis, enr.leftCols(extra);
        basis = std::move(wide);
      }
      Core3& zk = z.core(k);
      Matrix zc = local_rhs(zb[k], b.core(k), zb[k + 1]) - apply_local(zax[k], ak, zax[k + 1], utc);
      Matrix qz, rz;
      detail::thin_qr(zc, qz, rz);
      const int zr0 = zk.r0();
      zk = Core3::from_left(qz, zr0, n);
      Core3& zn = z.core(k + 1);
      Matrix znr = rz * zn.right();
      zn = Core3::from_right(znr, zn.n(), zn.r1());
    }

    Matrix q, rq;
    detail::thin_qr(basis, q, rq);
    Matrix coef = q.transpose() * ut;
    xk = Core3::from_left(q, r0, n);
    Core3& xn = x.core(k + 1);
    Matrix xnr = coef * xn.right();
    xn = Core3::from_right(xnr, xn.n(), xn.r1());

    xax[k + 1] = left_update(xax[k], x.core(k), ak, x.core(k));
    xb[k + 1] = left_vec(xb[k], x.core(k), b.core(k));
    if (use_z) {
      zax[k + 1] = left_update(zax[k], z.core(k), ak, x.core(k));
      zb[k + 1] = left_vec(zb[k], z.core(k), b.core(k));
    }
  }
}

void normal_system(const TTOperator& a, const TTVector& rhs, TTOperator& ata, TTVector& atb) {
  const TTOperator at = op_transpose(a);
  ata = op_round(op_compose(at, a), 1e-14);
  atb = tt_round(tt_apply(at, rhs), 1e-14);
}

}  // namespace

double residual(const TTOperator& a, const TTVector& x, const TTVector& rhs) {
  const double bn = tt_norm(rhs);
  const double rn = tt_norm(tt_sub(tt_apply(a, x), rhs));
  return bn > 0 ? rn / bn : rn;
}

SolveResult solve(const TTOperator& a, const TTVector& rhs, const std::optional<TTVector>& x0,
                  const SolverConfig& cfg) {
  cfg.validate();
  detail::check_same_modes(a.col_modes(), rhs.modes(), "solve");
  detail::check_same_modes(a.row_modes(), rhs.modes(), "solve");
  const double rhs_norm = tt_norm(rhs);
  if (!std::isfinite(rhs_norm)) throw InvalidArgument("solve: right-hand side is not finite");
  if (rhs_norm == 0.0) throw InvalidArgument("solve: right-hand side is zero");

  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(cfg.seed);
  TTVector x = x0 ? *x0 : tt_round(rhs, 0.0, 1);
  detail::check_same_modes(x.modes(), rhs.modes(), "solve: initial guess");
  if (x.max_rank() > cfg.max_rank) x = tt_round(x, 0.0, cfg.max_rank);
  TTVector z = random_tt(rhs.modes(), std::max(1, cfg.enrichment_rank), rng);

  bool minres = cfg.projection == Projection::MinRes;
  TTOperator aw = a;
  TTVector bw = rhs;
  if (minres) normal_system(a, rhs, aw, bw);
  bool reversed = false;

  SolveResult out;
  SolveReport& rep = out.report;
  rep.rounding_tol = cfg.rounding_tol;
  if (minres) rep.minres_from_sweep = 1;
  double best = std::numeric_limits<double>::infinity();
  double current = residual(a, x, rhs);
  out.x = x;
  rep.best_residual = current;

  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    const double inner_tol = std::max(0.1 * current, 1e-13);
    half_sweep(aw, bw, x, z, cfg, inner_tol, rep);
    TTVector xo = reversed ? tt_reverse(x) : x;
    current = residual(a, xo, rhs);
    rep.residual_history.push_back(current);
    rep.rank_history.push_back(xo.max_rank());
    rep.compression_history.push_back(compression_ratio(xo));
    if (cfg.verbose)
      std::fprintf(stderr, "sweep %3d  residual %.3e  rank %3d\n", sweep, current, xo.max_rank());
    if (current < best) {
      best = current;
      out.x = std::move(xo);
      rep.best_sweep = sweep;
      rep.best_residual = current;
    }
    if (current <= cfg.residual_tol) {
      rep.converged = true;
      break;
    }
    const int w = cfg.stagnation_window;
    const auto& h = rep.residual_history;
    const auto since = h.begin() + std::max(0, rep.minres_from_sweep - 1);
    bool stalled = false;
    if (h.end() - since > w) {
      double before = *std::min_element(since, h.end() - w);
      double recent = *std::min_element(h.end() - w, h.end());
      stalled = recent > cfg.stagnation_factor * before;
    }
    if (cfg.projection == Projection::Auto && !minres &&
        ((stalled && best > cfg.stall_switch_factor * cfg.rounding_tol) ||
         current > cfg.divergence_factor * best)) {
      minres = true;
      rep.minres_from_sweep = sweep + 1;
      if (cfg.verbose) std::fprintf(stderr, "switching to minimal-residual local systems\n");
      normal_system(a, rhs, aw, bw);
      x = out.x;
      if (reversed) z = tt_reverse(z);
      reversed = false;
      continue;
    }
    if (stalled) {
      rep.stagnated = true;
      break;
    }
    x = tt_reverse(x);
    z = tt_reverse(z);
    aw = op_reverse(aw);
    bw = tt_reverse(bw);
    reversed = !reversed;
  }
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace ttss
