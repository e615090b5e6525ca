#pragma once

// Capacity protocols built on Stinespring dilations, quantum-classical conversion of two-qutrit
// states, entanglement of pure states and of subspaces, and the four-dimensional counterexample.

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "ddlocc/dd_solver.hpp"
#include "ddlocc/dimensions.hpp"
#include "ddlocc/errors.hpp"
#include "ddlocc/json_io.hpp"
#include "ddlocc/lie_groups.hpp"
#include "ddlocc/linalg.hpp"
#include "ddlocc/protocol.hpp"

namespace ddlocc {

/// J maps C^dIn into C^dEnv (x) C^dSys, environment first.
struct StinespringIsometry {
  int d_in = 0;
  int d_env = 0;
  int d_sys = 0;
  CMatrix j;

  StinespringIsometry() = default;
  StinespringIsometry(int din, int denv, int dsys, CMatrix jm, double tol = 1e-10)
      : d_in(din), d_env(denv), d_sys(dsys), j(std::move(jm)) {
    if (din <= 0 || denv <= 0 || dsys <= 0) throw StructuralError("isometry dimensions must be positive");
    if (j.rows() != static_cast<Eigen::Index>(denv) * dsys || j.cols() != din) {
      throw StructuralError("J must be (dEnv*dSys) x dIn");
    }
    if (detail::max_abs(j.adjoint() * j - CMatrix::Identity(din, din)) > tol) {
      throw PreconditionError("J is not an isometry");
    }
  }

  /// Channel output tr_env(J rho J^dagger).
  CMatrix apply(const CMatrix& rho) const {
    const CMatrix big = j * rho * j.adjoint();
    CMatrix out = CMatrix::Zero(d_sys, d_sys);
    for (int e = 0; e < d_env; ++e) out += big.block(e * d_sys, e * d_sys, d_sys, d_sys);
    return out;
  }
};

/// Reorders the rows of a (sys (x) env) matrix into (env (x) sys).
inline CMatrix swap_factors(const CMatrix& m, int first, int second) {
  CMatrix out(m.rows(), m.cols());
  for (int a = 0; a < first; ++a)
    for (int b = 0; b < second; ++b) out.row(b * first + a) = m.row(a * second + b);
  return out;
}

inline StinespringIsometry random_stinespring(int d_in, int d_env, int d_sys, std::mt19937_64& rng) {
  return {d_in, d_env, d_sys, random_isometry(static_cast<Eigen::Index>(d_env) * d_sys, d_in, rng)};
}

/// Embeds the environment into a larger one (extra levels never populated).
inline StinespringIsometry pad_environment(const StinespringIsometry& iso, int d_env) {
  if (d_env < iso.d_env) throw StructuralError("cannot shrink the environment");
  CMatrix j = CMatrix::Zero(static_cast<Eigen::Index>(d_env) * iso.d_sys, iso.d_in);
  j.topRows(iso.j.rows()) = iso.j;
  return {iso.d_in, d_env, iso.d_sys, j};
}

struct CapacityProtocol {
  DiscriminationProtocol protocol;
  double capacity_bits = 0.0;
  double min_success = 0.0;  // exact, over the three codewords
  bool converged = false;
};

namespace detail {

inline CapacityProtocol finish_capacity(DiscriminationProtocol p) {
  CapacityProtocol out;
  out.min_success = 1.0;
  for (int c = 0; c < p.codeword_count(); ++c) out.min_success = std::min(out.min_success, simulate(p, c));
  out.converged = p.converged;
  out.capacity_bits = std::log2(3.0);
  out.protocol = std::move(p);
  return out;
}

}  // namespace detail

/// The environment (dimension 3) measures first and tells the receiver which basis to use.
/// Inputs default to the first three computational vectors of C^dIn.
inline CapacityProtocol environment_assisted_protocol(const StinespringIsometry& iso,
                                                      std::vector<CVector> inputs = {},
                                                      const SolverOptions& opts = {}) {
  if (iso.d_env != 3) throw UnsupportedError("environment-assisted protocol needs dEnv = 3");
  if (inputs.empty()) {
    if (iso.d_in < 3) throw PreconditionError("need at least three input dimensions");
    for (int i = 0; i < 3; ++i) inputs.push_back(CVector::Unit(iso.d_in, i));
  }
  if (inputs.size() != 3) throw StructuralError("need exactly three input vectors");
  CMatrix in(iso.d_in, 3);
  for (int i = 0; i < 3; ++i) {
    if (inputs[i].size() != iso.d_in) throw StructuralError("input vector has wrong dimension");
    in.col(i) = inputs[i];
  }
  if (detail::max_abs(in.adjoint() * in - CMatrix::Identity(3, 3)) > 1e-10) {
    throw PreconditionError("input vectors are not orthonormal");
  }
  const CMatrix image = iso.j * in;
  std::vector<CVector> vecs;
  for (int i = 0; i < 3; ++i) vecs.push_back(image.col(i));
  return detail::finish_capacity(build_protocol(subspace_from_vectors(vecs, 3), opts));
}

/// The output system (dimension 3) measures first, the environment decodes.
inline CapacityProtocol environment_assisting_protocol(const StinespringIsometry& iso, const SolverOptions& opts = {}) {
  if (iso.d_in != 3 || iso.d_sys != 3) throw UnsupportedError("environment-assisting protocol needs dIn = dSys = 3");
  const CMatrix image = swap_factors(iso.j, iso.d_env, iso.d_sys);
  std::vector<CVector> vecs;
  for (int i = 0; i < 3; ++i) vecs.push_back(image.col(i));
  return detail::finish_capacity(build_protocol(subspace_from_vectors(vecs, 3), opts));
}

struct QCConversionResult {
  std::vector<CVector> alice_basis;  // columns of U^dagger
  BipartiteOperator beta;            // dephased state
  CMatrix frame;                     // F, dimB x r
  std::vector<CMatrix> diagonals;    // D_j, r x r
  bool classical_a = false;
  bool generalized_classical_b = false;
  bool fully_classical = false;
  bool support_restricted = false;
  double residual = 0.0;              // off-diagonal norm of the D_j
  double congruence_residual = 0.0;   // max_j max|block_j - F D_j F^dagger|
  double frame_gram_defect = 0.0;     // max|F^dagger F / mean - I|
  DDCertificate certificate;
  std::vector<std::string> warnings;
};

/// Alice measures in a basis chosen so that every conditional state of B is diagonal in one
/// common (generally non-orthogonal) frame.
inline QCConversionResult qc_convert(const BipartiteOperator& alpha, double tol = 1e-8, const SolverOptions& opts = {}) {
  const int da = alpha.dim_a(), db = alpha.dim_b();
  const CMatrix& a = alpha.matrix();
  const double scale = std::max(1.0, detail::max_abs(a));
  if (min_eigenvalue(a) < -1e-10 * scale) throw PreconditionError("state is not positive semidefinite");
  if (std::abs(a.trace().real() - 1.0) > 1e-8) throw PreconditionError("state does not have unit trace");

  QCConversionResult out;
  const CMatrix ab = marginals(alpha).b;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(ab);
  const RVector lam = es.eigenvalues();
  const double cut = 1e-12 * std::max(lam.maxCoeff(), 1e-300);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < lam.size(); ++i)
    if (lam(i) > cut) keep.push_back(i);
  const auto r = static_cast<Eigen::Index>(keep.size());
  if (r < db) {
    out.support_restricted = true;
    out.warnings.push_back("alpha_B is singular; restricted to its support of dimension " + std::to_string(r));
    detail::warn(out.warnings.back());
  }
  // W: orthonormal support basis (columns `keep`), T = Lambda^{-1/2} W^dagger, F0 = W Lambda^{1/2}.
  CMatrix t(r, db), f0(db, r);
  for (Eigen::Index k = 0; k < r; ++k) {
    const CVector w = es.eigenvectors().col(keep[k]);
    t.row(k) = w.adjoint() / std::sqrt(lam(keep[k]));
    f0.col(k) = w * std::sqrt(lam(keep[k]));
  }
  if (r == db) {
    // Full rank: T = alpha_B^{-1/2}, F0 = alpha_B^{1/2}.
    const CMatrix w = es.eigenvectors();
    t = w * t;
    f0 = f0 * w.adjoint();
  }
  const CMatrix lift = kron(CMatrix::Identity(da, da), t);
  const BipartiteOperator normalized(da, static_cast<int>(r), lift * a * lift.adjoint());
  out.certificate = solve_dd(normalized, opts);
  const CMatrix& u = out.certificate.u;
  const CMatrix& v = out.certificate.v;
  for (int j = 0; j < da; ++j) out.alice_basis.push_back(u.adjoint().col(j));

  out.frame = f0 * v.adjoint();
  const CMatrix f_pinv = out.frame.completeOrthogonalDecomposition().pseudoInverse();
  const CMatrix rotated = kron(u, CMatrix::Identity(db, db)) * a * kron(u, CMatrix::Identity(db, db)).adjoint();
  double off = 0.0;
  for (int j = 0; j < da; ++j) {
    const CMatrix block = rotated.block(j * db, j * db, db, db);
    const CMatrix d = f_pinv * block * f_pinv.adjoint();
    off += off_diagonal_norm2(d);
    const CMatrix dd = d.diagonal().asDiagonal();
    out.congruence_residual =
        std::max(out.congruence_residual, detail::max_abs(block - out.frame * dd * out.frame.adjoint()));
    out.diagonals.push_back(d);
  }
  out.residual = std::sqrt(off);

  // beta = sum_j (P_j (x) I) alpha (P_j (x) I), with P_j = |a_j><a_j|.
  CMatrix beta = CMatrix::Zero(a.rows(), a.cols());
  CMatrix label = CMatrix::Zero(da, da);
  for (int j = 0; j < da; ++j) {
    const CMatrix pj = out.alice_basis[j] * out.alice_basis[j].adjoint();
    const CMatrix big = kron(pj, CMatrix::Identity(db, db));
    beta += big * a * big;
    label += static_cast<double>(j + 1) * pj;
  }
  out.beta = BipartiteOperator(da, db, beta);
  const CMatrix lab = kron(label, CMatrix::Identity(db, db));
  out.classical_a = detail::max_abs(lab * beta - beta * lab) <= 1e-12 * scale;

  out.generalized_classical_b = out.certificate.converged && out.residual <= tol;
  const CMatrix fg = out.frame.adjoint() * out.frame;
  const double mean = fg.trace().real() / static_cast<double>(r);
  out.frame_gram_defect = detail::max_abs(fg / mean - CMatrix::Identity(r, r));
  const bool b_maximally_mixed =
      !out.support_restricted && detail::max_abs(ab - CMatrix::Identity(db, db) / static_cast<double>(db)) <= tol;
  out.fully_classical = out.classical_a && out.generalized_classical_b && b_maximally_mixed;
  return out;
}

/// Von Neumann entropy (base 2) of the reduced state of a unit vector in C^dimA (x) C^dimB.
inline double entanglement_entropy(const CVector& psi, int dim_a, double norm_tol = 1e-10) {
  if (dim_a <= 0 || psi.size() % dim_a != 0) throw StructuralError("vector length not divisible by dimA");
  if (std::abs(psi.norm() - 1.0) > norm_tol) throw PreconditionError("state is not normalized");
  const Eigen::Index db = psi.size() / dim_a;
  CMatrix m(dim_a, db);
  for (int a = 0; a < dim_a; ++a) m.row(a) = psi.segment(a * db, db).transpose();
  const RVector s = Eigen::JacobiSVD<CMatrix>(m).singularValues();
  double h = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double p = s(i) * s(i);
    if (p > 1e-300) h -= p * std::log2(p);
  }
  return std::max(h, 0.0);
}

struct SpanEntanglement {
  double value = 0.0;
  CVector coefficients;
  double best_sample = 0.0;  // before refinement
};

namespace detail {

struct SpanObjective {
  const std::vector<CVector>* basis;
  int dim_a;

  CVector coefficients(const gsl_vector* x) const {
    const auto k = static_cast<Eigen::Index>(basis->size());
    CVector c(k);
    for (Eigen::Index i = 0; i < k; ++i) c(i) = Complex(gsl_vector_get(x, 2 * i), gsl_vector_get(x, 2 * i + 1));
    return c;
  }

  double operator()(const CVector& c) const {
    CVector psi = CVector::Zero(basis->front().size());
    for (std::size_t i = 0; i < basis->size(); ++i) psi += c(static_cast<Eigen::Index>(i)) * (*basis)[i];
    const double n = psi.norm();
    if (n < 1e-12) return 1e300;
    return entanglement_entropy(psi / n, dim_a, 1e-6);
  }

  static double eval(const gsl_vector* x, void* self) {
    const auto* obj = static_cast<const SpanObjective*>(self);
    return (*obj)(obj->coefficients(x));
  }
};

}  // namespace detail

/// Upper bound on the minimal entanglement over unit vectors of span(basis): Haar sampling on the
/// coefficient sphere, then Nelder-Mead from the best `refine` samples.
inline SpanEntanglement span_min_entanglement(const std::vector<CVector>& basis, int dim_a = 3, int samples = 10000,
                                              int refine = 10, std::uint64_t seed = 0) {
  if (basis.empty()) throw StructuralError("empty basis");
  const auto k = static_cast<Eigen::Index>(basis.size());
  CMatrix b(basis.front().size(), k);
  for (Eigen::Index i = 0; i < k; ++i) b.col(i) = basis[i];
  if (detail::max_abs(b.adjoint() * b - CMatrix::Identity(k, k)) > 1e-8) {
    throw PreconditionError("basis is not orthonormal");
  }
  const detail::SpanObjective obj{&basis, dim_a};
  auto rng = make_rng(seed, stream_id("span-entanglement"));

  std::vector<std::pair<double, CVector>> pool;
  // Basis elements are candidates too.
  for (Eigen::Index i = 0; i < k; ++i) pool.emplace_back(obj(CVector::Unit(k, i)), CVector::Unit(k, i));
  for (int s = 0; s < samples; ++s) {
    CVector c = gaussian_cmatrix(k, 1, rng).col(0);
    c /= c.norm();
    pool.emplace_back(obj(c), c);
  }
  std::stable_sort(pool.begin(), pool.end(), [](const auto& x, const auto& y) { return x.first < y.first; });

  SpanEntanglement out{pool.front().first, pool.front().second, pool.front().first};
  const std::size_t dim = 2 * static_cast<std::size_t>(k);
  gsl_multimin_function fn{&detail::SpanObjective::eval, dim, const_cast<detail::SpanObjective*>(&obj)};
  gsl_vector* x = gsl_vector_alloc(dim);
  gsl_vector* step = gsl_vector_alloc(dim);
  gsl_multimin_fminimizer* nm = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dim);
  for (int r = 0; r < std::min<int>(refine, static_cast<int>(pool.size())); ++r) {
    for (Eigen::Index i = 0; i < k; ++i) {
      gsl_vector_set(x, 2 * i, pool[r].second(i).real());
      gsl_vector_set(x, 2 * i + 1, pool[r].second(i).imag());
    }
    gsl_vector_set_all(step, 0.05);
    gsl_multimin_fminimizer_set(nm, &fn, x, step);
    for (int it = 0; it < 4000; ++it) {
      if (gsl_multimin_fminimizer_iterate(nm) != GSL_SUCCESS) break;
      if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(nm), 1e-10) == GSL_SUCCESS) break;
    }
    if (nm->fval < out.value) {
      out.value = nm->fval;
      out.coefficients = obj.coefficients(nm->x);
      out.coefficients /= out.coefficients.norm();
    }
  }
  gsl_multimin_fminimizer_free(nm);
  gsl_vector_free(step);
  gsl_vector_free(x);
  return out;
}

struct FourDimReport {
  int dim_domain = 0;
  int dim_target = 0;
  CMatrix k;
  double epsilon = 0.0;
  std::vector<CVector> states;  // Phi_1..Phi_4 in C^3 (x) C^12
  bool orthonormal = false;
  double gram_deviation = 0.0;
  double k_min_eigenvalue = 0.0;
  double residual_floor = 0.0;
  bool solver_converged = false;
  int starts_used = 0;
  std::string label = "non-certifying";
};

/// Four orthonormal states in C^3 (x) C^12 whose Gram operator K = I/3 + eps K0 (K0 random in
/// M00 for 3 (x) 4) is a generic point outside the image of the dd-map, plus the best dd-residual
/// the solver finds for K. The residual floor is evidence, not a proof.
inline FourDimReport four_dim_counterexample(std::uint64_t seed = 42, int starts = 100) {
  constexpr int da = 3, db = 4;
  FourDimReport rep;
  const ComplexSpaces spaces = complex_spaces(da, db);
  rep.dim_target = static_cast<int>(spaces.m00.cols());
  rep.dim_domain = su_dimension(da) + su_dimension(db) + static_cast<int>(spaces.d00.cols());

  auto rng = make_rng(seed, stream_id("four-dim-counterexample"));
  std::normal_distribution<double> normal(0.0, 1.0);
  RVector coeff(spaces.m00.cols());
  for (Eigen::Index i = 0; i < coeff.size(); ++i) coeff(i) = normal(rng);
  const RVector x = spaces.m00 * coeff.normalized();
  const CMatrix k0 = real_to_hermitian(x, da * db);
  rep.epsilon = 0.9 / std::abs(min_eigenvalue(k0)) / 3.0;
  rep.k = CMatrix::Identity(da * db, da * db) / 3.0 + rep.epsilon * k0;
  rep.k_min_eigenvalue = min_eigenvalue(rep.k);
  const CMatrix p = psd_sqrt(rep.k);

  for (int s = 0; s < db; ++s) {
    CVector phi(da * da * db);
    for (int j = 0; j < da; ++j) phi.segment(j * da * db, da * db) = p.col(s + db * j);
    rep.states.push_back(phi);
  }
  CMatrix gram(db, db);
  for (int s = 0; s < db; ++s)
    for (int t = 0; t < db; ++t) gram(s, t) = rep.states[s].dot(rep.states[t]);
  rep.gram_deviation = detail::max_abs(gram - CMatrix::Identity(db, db));
  rep.orthonormal = rep.gram_deviation <= 1e-10;

  SolverOptions opts;
  opts.max_starts = starts;
  opts.seed = seed;
  const DDCertificate cert = solve_dd(gram_operator(rep.states, da), opts);
  rep.residual_floor = cert.residual;
  rep.solver_converged = cert.converged;
  rep.starts_used = cert.starts_used;
  return rep;
}

namespace io {

inline json to_json(const StinespringIsometry& s) {
  return {{"dIn", s.d_in}, {"dEnv", s.d_env}, {"dSys", s.d_sys}, {"J", to_json(s.j)}, {"axisOrder", json::array({"env", "sys"})}};
}

/// axisOrder is ["env","sys"] (default) or ["sys","env"]; stored internally as env (x) sys.
inline StinespringIsometry isometry_from_json(const json& j) {
  const int din = require_int(j, "dIn"), denv = require_int(j, "dEnv"), dsys = require_int(j, "dSys");
  CMatrix m = cmatrix_from_json(require(j, "J"));
  if (j.contains("axisOrder")) {
    const auto order = j["axisOrder"].get<std::vector<std::string>>();
    if (order == std::vector<std::string>{"sys", "env"}) {
      if (m.rows() != static_cast<Eigen::Index>(denv) * dsys) throw StructuralError("J has wrong row count");
      m = swap_factors(m, dsys, denv);
    } else if (order != std::vector<std::string>{"env", "sys"}) {
      throw StructuralError("axisOrder must be [\"env\",\"sys\"] or [\"sys\",\"env\"]");
    }
  }
  return {din, denv, dsys, m};
}

inline json to_json(const CapacityProtocol& c) {
  return {{"protocol", to_json(c.protocol)},
          {"capacityBits", c.capacity_bits},
          {"minSuccess", c.min_success},
          {"converged", c.converged}};
}

inline json to_json(const QCConversionResult& r) {
  json alice = json::array(), diag = json::array();
  for (const auto& a : r.alice_basis) alice.push_back(to_json(a));
  for (const auto& d : r.diagonals) diag.push_back(to_json(d));
  return {{"aliceBasis", alice},
          {"beta", to_json(r.beta)},
          {"frame", to_json(r.frame)},
          {"diagonals", diag},
          {"classicalA", r.classical_a},
          {"generalizedClassicalB", r.generalized_classical_b},
          {"fullyClassical", r.fully_classical},
          {"supportRestricted", r.support_restricted},
          {"residual", r.residual},
          {"congruenceResidual", r.congruence_residual},
          {"frameGramDefect", r.frame_gram_defect}};
}

inline json to_json(const FourDimReport& r) {
  json states = json::array();
  for (const auto& s : r.states) states.push_back(to_json(s));
  return {{"dimDomain", r.dim_domain},
          {"dimTarget", r.dim_target},
          {"K", to_json(r.k)},
          {"epsilon", r.epsilon},
          {"states", states},
          {"orthonormal", r.orthonormal},
          {"gramDeviation", r.gram_deviation},
          {"kMinEigenvalue", r.k_min_eigenvalue},
          {"residualFloor", r.residual_floor},
          {"solverConverged", r.solver_converged},
          {"startsUsed", r.starts_used},
          {"label", r.label}};
}

}  // namespace io

}  // namespace ddlocc
