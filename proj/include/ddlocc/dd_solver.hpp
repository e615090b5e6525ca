#pragma once

// Local-unitary reduction of a bipartite Hermitian operator to dd-form.
//
// Stage 1 minimizes the commutator objective sum_{j<l} ||[D_j, D_l]||_F^2 of the diagonal
// blocks of (U, I).M over U in SU(m) (or SO(m)). Stage 2 jointly diagonalizes the resulting
// blocks to obtain V. If the dd-residual of (U, V).M is still above tolerance, a joint polish
// over (U, V) follows. All stages use damped Gauss-Newton (Levenberg-Marquardt) steps in the Lie
// algebra with the exponential retraction U <- exp(X) U; derivatives are analytic
// (d/dt N = [X (x) I, N]).

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "ddlocc/errors.hpp"
#include "ddlocc/joint_diag.hpp"
#include "ddlocc/lie_groups.hpp"
#include "ddlocc/linalg.hpp"

namespace ddlocc {

struct SolverOptions {
  int max_starts = 50;
  int max_iters = 200;
  double tol_residual = 1e-8;
  double tol_gradient = 1e-14;
  std::uint64_t seed = 0;
  bool real_mode = false;
  // Try the identity and a fixed angle grid before the Haar-random starts.
  bool deterministic_seeds = true;

  void validate() const {
    if (!(tol_residual > 0.0)) throw PreconditionError("tol_residual must be positive");
    if (max_starts < 1) throw PreconditionError("max_starts must be at least 1");
    if (max_iters < 1) throw PreconditionError("max_iters must be at least 1");
  }
};

struct DDCertificate {
  CMatrix u;  // Alice-side factor, SU(m) or SO(m)
  CMatrix v;  // block-side factor, SU(k) or SO(k)
  double residual = std::numeric_limits<double>::infinity();
  bool converged = false;
  bool real = false;
  int starts_used = 0;
  int best_start = -1;
  std::vector<double> objective_trace;  // stage-1 objective per iteration, then polish objective
};

namespace detail {

inline double anti_hermitian_pack(const CMatrix& c, std::vector<double>& out) {
  // Isometric coordinates of an anti-Hermitian matrix.
  double sq = 0.0;
  const auto n = c.rows();
  for (Eigen::Index p = 0; p < n; ++p) {
    out.push_back(c(p, p).imag());
    sq += std::norm(c(p, p));
  }
  const double s = std::sqrt(2.0);
  for (Eigen::Index p = 0; p < n; ++p)
    for (Eigen::Index q = p + 1; q < n; ++q) {
      out.push_back(s * c(p, q).real());
      out.push_back(s * c(p, q).imag());
      sq += 2.0 * std::norm(c(p, q));
    }
  return sq;
}

inline void off_diag_pack(const CMatrix& d, std::vector<double>& out) {
  const double s = std::sqrt(2.0);
  for (Eigen::Index p = 0; p < d.rows(); ++p)
    for (Eigen::Index q = p + 1; q < d.cols(); ++q) {
      out.push_back(s * d(p, q).real());
      out.push_back(s * d(p, q).imag());
    }
}

inline RVector to_rvector(const std::vector<double>& v) {
  return Eigen::Map<const RVector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

class DDProblem {
 public:
  DDProblem(const CMatrix& m, int dim_a, int dim_b, bool real)
      : m_(m), dim_a_(dim_a), dim_b_(dim_b), real_(real) {
    const auto gens_a = real ? so_basis(dim_a) : su_basis(dim_a);
    const auto gens_b = real ? so_basis(dim_b) : su_basis(dim_b);
    const CMatrix ia = CMatrix::Identity(dim_a, dim_a), ib = CMatrix::Identity(dim_b, dim_b);
    for (const auto& t : gens_a) {
      gen_a_.push_back(t);
      lift_a_.push_back(kron(t, ib));
    }
    for (const auto& t : gens_b) {
      gen_b_.push_back(t);
      lift_b_.push_back(kron(ia, t));
    }
  }

  CMatrix conjugate(const CMatrix& u, const CMatrix& v) const {
    const CMatrix k = kron(u, v);
    return k * m_ * k.adjoint();
  }

  CMatrix conjugate_a(const CMatrix& u) const {
    return conjugate(u, CMatrix::Identity(dim_b_, dim_b_));
  }

  CMatrix diag_block(const CMatrix& n, int j) const {
    return n.block(j * dim_b_, j * dim_b_, dim_b_, dim_b_);
  }

  /// Residual vector of the commutator objective and its Jacobian over the Alice generators.
  double commutator_system(const CMatrix& u, RVector* r, RMatrix* jac) const {
    const CMatrix n = conjugate_a(u);
    std::vector<CMatrix> d(dim_a_);
    for (int j = 0; j < dim_a_; ++j) d[j] = diag_block(n, j);
    std::vector<double> res;
    double f = 0.0;
    for (int j = 0; j < dim_a_; ++j)
      for (int l = j + 1; l < dim_a_; ++l) f += anti_hermitian_pack(d[j] * d[l] - d[l] * d[j], res);
    if (r) *r = to_rvector(res);
    if (jac) {
      jac->resize(static_cast<Eigen::Index>(res.size()), static_cast<Eigen::Index>(lift_a_.size()));
      for (std::size_t g = 0; g < lift_a_.size(); ++g) {
        const CMatrix dn = lift_a_[g] * n - n * lift_a_[g];
        std::vector<CMatrix> dd(dim_a_);
        for (int j = 0; j < dim_a_; ++j) dd[j] = diag_block(dn, j);
        std::vector<double> col;
        for (int j = 0; j < dim_a_; ++j)
          for (int l = j + 1; l < dim_a_; ++l)
            anti_hermitian_pack(dd[j] * d[l] + d[j] * dd[l] - dd[l] * d[j] - d[l] * dd[j], col);
        jac->col(static_cast<Eigen::Index>(g)) = to_rvector(col);
      }
    }
    return f;
  }

  /// Residual vector of the dd-residual and its Jacobian over Alice then block generators.
  double dd_system(const CMatrix& u, const CMatrix& v, RVector* r, RMatrix* jac) const {
    const CMatrix n = conjugate(u, v);
    std::vector<double> res;
    for (int j = 0; j < dim_a_; ++j) off_diag_pack(diag_block(n, j), res);
    const RVector rv = to_rvector(res);
    if (r) *r = rv;
    if (jac) {
      const auto cols = lift_a_.size() + lift_b_.size();
      jac->resize(rv.size(), static_cast<Eigen::Index>(cols));
      for (std::size_t g = 0; g < cols; ++g) {
        const CMatrix& lift = g < lift_a_.size() ? lift_a_[g] : lift_b_[g - lift_a_.size()];
        const CMatrix dn = lift * n - n * lift;
        std::vector<double> col;
        for (int j = 0; j < dim_a_; ++j) off_diag_pack(diag_block(dn, j), col);
        jac->col(static_cast<Eigen::Index>(g)) = to_rvector(col);
      }
    }
    return rv.squaredNorm();
  }

  CMatrix retract(const std::vector<CMatrix>& gens, const RVector& step, const CMatrix& u) const {
    CMatrix x = CMatrix::Zero(u.rows(), u.cols());
    for (std::size_t i = 0; i < gens.size(); ++i) x += step(static_cast<Eigen::Index>(i)) * gens[i];
    CMatrix out = expm_skew(x) * u;
    if (real_) out = out.real().cast<Complex>();
    return out;
  }

  const std::vector<CMatrix>& gen_a() const { return gen_a_; }
  const std::vector<CMatrix>& gen_b() const { return gen_b_; }
  int dim_a() const { return dim_a_; }
  int dim_b() const { return dim_b_; }
  bool real() const { return real_; }

 private:
  CMatrix m_;
  int dim_a_, dim_b_;
  bool real_;
  std::vector<CMatrix> gen_a_, gen_b_, lift_a_, lift_b_;
};

/// Levenberg-Marquardt on a Lie group. `system(point, r, J)` returns ||r||^2; `apply(point, step)`
/// retracts. Stops on `f <= f_target`, gradient below `tol_gradient`, stagnation or `max_iters`.
template <class Point, class System, class Apply>
double lm_minimize(Point& point, System&& system, Apply&& apply, int max_iters, double f_target,
                   double tol_gradient, std::vector<double>& trace) {
  RVector r;
  RMatrix jac;
  double f = system(point, &r, &jac);
  double lambda = -1.0;
  int stagnant = 0;
  for (int it = 0; it < max_iters; ++it) {
    trace.push_back(f);
    if (f <= f_target) break;
    const RVector g = jac.transpose() * r;
    if (g.norm() <= tol_gradient) break;
    const RMatrix a = jac.transpose() * jac;
    if (lambda < 0) lambda = 1e-3 * std::max(a.diagonal().maxCoeff(), 1e-300);
    bool accepted = false;
    while (lambda < 1e16) {
      RMatrix damped = a;
      damped.diagonal().array() += lambda;
      const RVector step = damped.ldlt().solve(-g);
      Point trial = apply(point, step);
      const double f_trial = system(trial, nullptr, nullptr);
      if (std::isfinite(f_trial) && f_trial < f) {
        stagnant = (f - f_trial) <= 1e-12 * f ? stagnant + 1 : 0;
        point = std::move(trial);
        f = system(point, &r, &jac);
        lambda = std::max(lambda / 5.0, 1e-15);
        accepted = true;
        break;
      }
      lambda *= 4.0;
    }
    if (!accepted || stagnant >= 5) break;
  }
  return f;
}

struct UVPair {
  CMatrix u, v;
};

}  // namespace detail

/// Sum of squared Frobenius norms of pairwise commutators of the diagonal blocks of (U, I).M.
inline double commutator_objective(const CMatrix& u, const BipartiteOperator& m) {
  if (u.rows() != m.dim_a() || u.cols() != m.dim_a()) throw StructuralError("U does not match dimA");
  const detail::DDProblem problem(m.matrix(), m.dim_a(), m.dim_b(), false);
  return problem.commutator_system(u, nullptr, nullptr);
}

namespace detail {

inline std::vector<CMatrix> deterministic_starts(int dim_a, bool real) {
  std::vector<CMatrix> out{CMatrix::Identity(dim_a, dim_a)};
  if (dim_a != 3) return out;
  if (real) {
    for (double a : {kPi / 4, 3 * kPi / 4})
      for (double b : {kPi / 3, 2 * kPi / 3}) out.push_back(so3_chart({a, b, kPi / 4}).cast<Complex>());
  } else {
    for (double t1 : {kPi / 6, kPi / 3})
      for (double t2 : {kPi / 6, kPi / 3})
        for (double t3 : {kPi / 6, kPi / 3}) {
          SU3Angles a;
          a.theta = {t1, t2, t3};
          a.phi = {0.7, 1.4, 2.1, 2.8, 3.5};
          out.push_back(su3_chart(a));
        }
  }
  return out;
}

inline DDCertificate solve_normalized(const BipartiteOperator& original, bool real, const SolverOptions& opts) {
  opts.validate();
  const int da = original.dim_a(), db = original.dim_b();
  // Subtracting M_A (x) I / dimB leaves every commutator and dd-residual unchanged.
  const Marginals marg = marginals(original);
  CMatrix shifted = original.matrix() - kron(marg.a, CMatrix::Identity(db, db)) / static_cast<double>(db);
  const double scale = shifted.norm();
  const CMatrix id_a = CMatrix::Identity(da, da), id_b = CMatrix::Identity(db, db);

  DDCertificate best;
  best.real = real;
  best.u = id_a;
  best.v = id_b;
  if (scale == 0.0) {
    best.residual = dd_residual(original.matrix(), da, db);
    best.converged = best.residual <= opts.tol_residual;
    best.starts_used = 1;
    best.best_start = 0;
    return best;
  }
  shifted /= scale;
  const DDProblem problem(shifted, da, db, real);
  const double target = opts.tol_residual / scale;

  auto commutator_sys = [&](const CMatrix& u, RVector* r, RMatrix* j) {
    return problem.commutator_system(u, r, j);
  };
  auto apply_a = [&](const CMatrix& u, const RVector& step) { return problem.retract(problem.gen_a(), step, u); };
  auto dd_sys = [&](const UVPair& p, RVector* r, RMatrix* j) { return problem.dd_system(p.u, p.v, r, j); };
  const auto na = static_cast<Eigen::Index>(problem.gen_a().size());
  const auto nb = static_cast<Eigen::Index>(problem.gen_b().size());
  auto apply_uv = [&](const UVPair& p, const RVector& step) {
    return UVPair{problem.retract(problem.gen_a(), step.head(na), p.u),
                  problem.retract(problem.gen_b(), step.tail(nb), p.v)};
  };

  const auto seeds = opts.deterministic_seeds ? deterministic_starts(da, real) : std::vector<CMatrix>{};
  for (int start = 0; start < opts.max_starts; ++start) {
    CMatrix u;
    if (start < static_cast<int>(seeds.size())) {
      u = seeds[start];
    } else {
      auto rng = make_rng(opts.seed, static_cast<std::uint64_t>(start));
      u = real ? random_special_orthogonal(da, rng).cast<Complex>() : random_special_unitary(da, rng);
    }
    std::vector<double> trace;
    lm_minimize(u, commutator_sys, apply_a, opts.max_iters, 1e-32, opts.tol_gradient, trace);

    std::vector<CMatrix> blocks;
    const CMatrix n = problem.conjugate_a(u);
    for (int j = 0; j < da; ++j) blocks.push_back(problem.diag_block(n, j));
    UVPair uv{u, joint_diagonalize(blocks, real).v};
    double res = std::sqrt(problem.dd_system(uv.u, uv.v, nullptr, nullptr));
    if (res > 0.01 * target) {
      lm_minimize(uv, dd_sys, apply_uv, opts.max_iters, 1e-4 * target * target, opts.tol_gradient, trace);
    }
    if (real) {
      uv.u = project_special_orthogonal(uv.u.real()).cast<Complex>();
      uv.v = project_special_orthogonal(uv.v.real()).cast<Complex>();
    } else {
      uv.u = project_special_unitary(uv.u);
      uv.v = project_special_unitary(uv.v);
    }
    const CMatrix k = kron(uv.u, uv.v);
    res = dd_residual(k * original.matrix() * k.adjoint(), da, db);
    if (res < best.residual) {
      best.u = uv.u;
      best.v = uv.v;
      best.residual = res;
      best.best_start = start;
      best.objective_trace = std::move(trace);
    }
    best.starts_used = start + 1;
    if (best.residual <= opts.tol_residual) break;
  }
  best.converged = best.residual <= opts.tol_residual;
  return best;
}

}  // namespace detail

/// Finds (U, V) in SU(dimA) x SU(dimB) with (U, V).M a dd-matrix. Unconverged runs return the
/// best certificate with converged == false.
inline DDCertificate solve_dd(const BipartiteOperator& m, const SolverOptions& opts = {}) {
  if (opts.real_mode) {
    if (m.matrix().imag().cwiseAbs().maxCoeff() > 0.0) {
      throw PreconditionError("real_mode needs a real symmetric operator");
    }
    return detail::solve_normalized(m, true, opts);
  }
  return detail::solve_normalized(m, false, opts);
}

/// LO version over SO(dimA) x SO(dimB). The operator is replaced by (M + M^{Gamma_B}) / 2, which
/// has identical diagonal blocks and symmetric blocks throughout.
inline DDCertificate solve_dd_real(const RealSymmetricOperator& m, SolverOptions opts = {}) {
  opts.real_mode = true;
  RealSymmetricOperator sym = m;
  if (!m.blocks_symmetric()) {
    for (int i = 0; i < m.dim_a; ++i)
      for (int j = 0; j < m.dim_a; ++j) {
        const RMatrix b = m.block(i, j);
        sym.matrix.block(i * m.dim_b, j * m.dim_b, m.dim_b, m.dim_b) = (b + b.transpose()) / 2.0;
      }
  }
  DDCertificate cert = detail::solve_normalized(sym.to_complex(), true, opts);
  // Report the residual against the operator actually supplied.
  const CMatrix k = kron(cert.u, cert.v);
  const CMatrix mc = m.matrix.cast<Complex>();
  cert.residual = dd_residual(k * mc * k.adjoint(), m.dim_a, m.dim_b);
  cert.converged = cert.residual <= opts.tol_residual;
  return cert;
}

/// Certificates for the same operator are equivalent when they differ by a pair of monomial
/// matrices acting on the left: c2.U c1.U^dagger and c2.V c1.V^dagger monomial within tol.
inline bool orbit_equivalent(const DDCertificate& c1, const DDCertificate& c2, double tol = 1e-6) {
  auto near_monomial = [tol](const CMatrix& g) {
    if (g.rows() == 3) return nearest_monomial(g).distance <= tol;
    return is_monomial(g, tol).monomial;
  };
  return near_monomial(c2.u * c1.u.adjoint()) && near_monomial(c2.v * c1.v.adjoint());
}

}  // namespace ddlocc
