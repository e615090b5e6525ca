#pragma once

// One-way LOCC discrimination protocols for subspaces of C^dimA (x) C^n: Alice measures in a
// fixed basis, announces the outcome, Bob measures in an outcome-dependent basis.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "ddlocc/dd_solver.hpp"
#include "ddlocc/errors.hpp"
#include "ddlocc/json_io.hpp"
#include "ddlocc/lie_groups.hpp"
#include "ddlocc/linalg.hpp"

namespace ddlocc {

inline constexpr double kExactResidual = 1e-10;
inline constexpr double kReorthogonalizeLimit = 1e-6;

/// Orthonormal basis of a subspace of C^dimA (x) C^dimB.
struct Subspace {
  int dim_a = 3;
  int dim_b = 0;
  std::vector<CVector> basis;
};

/// Gram-Schmidt in the given order. Throws StructuralError when the vectors have rank below
/// their count (relative tolerance 1e-8).
inline Subspace subspace_from_vectors(const std::vector<CVector>& raw, int dim_a = 3, double rank_tol = 1e-8) {
  if (raw.empty()) throw StructuralError("subspace needs at least one vector");
  const auto len = raw.front().size();
  if (dim_a <= 0 || len == 0 || len % dim_a != 0) throw StructuralError("vector length not divisible by dimA");
  Subspace s{dim_a, static_cast<int>(len / dim_a), {}};
  for (const auto& v : raw) {
    if (v.size() != len) throw StructuralError("vectors have inconsistent lengths");
    const double scale = v.norm();
    CVector w = v;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : s.basis) w -= b.dot(w) * b;
    if (scale == 0.0 || w.norm() <= rank_tol * scale) {
      throw StructuralError("vectors are linearly dependent; subspace dimension too small");
    }
    s.basis.push_back(w / w.norm());
  }
  return s;
}

/// One measurement direction of Bob's conditional basis and the codewords it reports.
struct BobOutcome {
  CVector direction;
  std::vector<int> candidates;  // empty for completion vectors
};

struct DiscriminationProtocol {
  int dim_a = 3;
  int dim_b = 0;
  std::vector<CVector> alice_basis;                 // a_j
  std::vector<CVector> codewords;                   // Psi'_c
  std::vector<std::vector<CVector>> conditional;    // conditional[j][c] = h_{j,c}
  std::vector<std::vector<BobOutcome>> decoders;    // decoders[j] = Bob's basis after outcome j
  double residual = 0.0;
  bool converged = true;
  DDCertificate certificate;
  std::vector<std::string> warnings;

  int codeword_count() const { return static_cast<int>(codewords.size()); }
};

namespace detail {

/// Bob's basis after outcome j: normalized non-zero h_{j,c} (re-orthogonalized in codeword
/// order), a direction parallel to an earlier one merges into it, then an orthonormal
/// completion of C^dimB.
inline std::vector<BobOutcome> build_decoder(const std::vector<CVector>& h, int dim_b, double zero_tol,
                                            std::vector<std::string>& warnings) {
  std::vector<BobOutcome> out;
  for (int c = 0; c < static_cast<int>(h.size()); ++c) {
    const double norm = h[c].norm();
    if (norm <= zero_tol) continue;
    const CVector dir = h[c] / norm;
    bool merged = false;
    for (auto& o : out)
      if (std::abs(o.direction.dot(dir)) >= 1.0 - 1e-9) {
        o.candidates.push_back(c);
        merged = true;
        break;
      }
    if (merged) {
      warnings.push_back("conditional vectors coincide; Bob cannot separate codewords");
      continue;
    }
    CVector w = dir;
    double overlap = 0.0;
    for (const auto& o : out) {
      const Complex p = o.direction.dot(w);
      overlap = std::max(overlap, std::abs(p));
      w -= p * o.direction;
    }
    if (overlap > kExactResidual) {
      warnings.push_back("re-orthogonalized conditional vector (overlap " + std::to_string(overlap) + ")");
    }
    if (w.norm() <= 1e-12) continue;
    out.push_back({w / w.norm(), {c}});
  }
  // Orthonormal completion: Gram-Schmidt over the standard basis.
  for (int e = 0; e < dim_b && static_cast<int>(out.size()) < dim_b; ++e) {
    CVector w = CVector::Zero(dim_b);
    w(e) = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& o : out) w -= o.direction.dot(w) * o.direction;
    if (w.norm() > 1e-6) out.push_back({w / w.norm(), {}});
  }
  return out;
}

}  // namespace detail

/// Builds a protocol from Alice's basis and the conditional Bob vectors h_{j,c}; codewords are
/// reconstructed as sum_j a_j (x) h_{j,c}.
inline DiscriminationProtocol assemble_protocol(std::vector<CVector> alice_basis,
                                                std::vector<std::vector<CVector>> conditional,
                                                double residual = 0.0) {
  DiscriminationProtocol p;
  p.dim_a = static_cast<int>(alice_basis.size());
  if (p.dim_a == 0 || conditional.size() != alice_basis.size() || conditional.front().empty()) {
    throw StructuralError("protocol needs one conditional family per Alice outcome");
  }
  p.dim_b = static_cast<int>(conditional.front().front().size());
  const auto ncode = conditional.front().size();
  for (const auto& fam : conditional) {
    if (fam.size() != ncode) throw StructuralError("conditional families have different sizes");
    for (const auto& h : fam)
      if (h.size() != p.dim_b) throw StructuralError("conditional vectors have inconsistent dimension");
  }
  for (const auto& a : alice_basis)
    if (a.size() != p.dim_a) throw StructuralError("Alice basis vectors have wrong dimension");
  p.alice_basis = std::move(alice_basis);
  p.conditional = std::move(conditional);
  p.residual = residual;
  for (std::size_t c = 0; c < ncode; ++c) {
    CVector psi = CVector::Zero(static_cast<Eigen::Index>(p.dim_a) * p.dim_b);
    for (int j = 0; j < p.dim_a; ++j) psi += kron(p.alice_basis[j], p.conditional[j][c]);
    p.codewords.push_back(psi);
  }
  const double zero_tol = std::max(1e-9, 10.0 * residual);
  if (residual > kReorthogonalizeLimit) {
    p.warnings.push_back("residual " + std::to_string(residual) + " above re-orthogonalization limit");
  }
  for (int j = 0; j < p.dim_a; ++j) {
    p.decoders.push_back(detail::build_decoder(p.conditional[j], p.dim_b, zero_tol, p.warnings));
  }
  return p;
}

/// Alice basis from the certificate's U: a_j has entries U(j, k) (rows of U, unconjugated).
/// This is the basis for which <a_j| (x) I maps the Gram-frame columns onto the rows of (U (x) V)
/// applied to G^dagger G.
inline DiscriminationProtocol build_protocol(const Subspace& s, const SolverOptions& opts = {}) {
  const BipartiteOperator gram = gram_operator(s.basis, s.dim_a);
  const CMatrix frame = gram_frame(s.basis, s.dim_a);
  const Marginals marg = marginals(gram);
  const int k = static_cast<int>(s.basis.size());
  if (detail::max_abs(marg.b - CMatrix::Identity(k, k)) > 1e-8) {
    throw PreconditionError("subspace basis is not orthonormal");
  }
  DDCertificate cert = solve_dd(gram, opts);
  const CMatrix transformed = frame * kron(cert.u, cert.v).adjoint();
  std::vector<CVector> alice;
  std::vector<std::vector<CVector>> cond(s.dim_a);
  for (int j = 0; j < s.dim_a; ++j) {
    alice.push_back(cert.u.row(j).transpose());
    for (int c = 0; c < k; ++c) cond[j].push_back(transformed.col(j * k + c));
  }
  DiscriminationProtocol p = assemble_protocol(std::move(alice), std::move(cond), cert.residual);
  p.converged = cert.converged;
  if (!cert.converged) p.warnings.push_back("solver did not reach the residual tolerance");
  p.certificate = std::move(cert);
  return p;
}

struct SimulationMode {
  bool exact = true;
  long shots = 0;
  std::uint64_t seed = 0;

  static SimulationMode exact_mode() { return {}; }
  static SimulationMode sampled(long n, std::uint64_t seed) { return {false, n, seed}; }
};

/// Success probability of recovering codeword `c`. Bob's outcome d is mapped to a candidate set;
/// he guesses uniformly inside it (empty sets count as failure).
inline double simulate(const DiscriminationProtocol& p, int c, const SimulationMode& mode = {}) {
  if (c < 0 || c >= p.codeword_count()) throw StructuralError("codeword index out of range");
  const CVector& psi = p.codewords[c];
  std::vector<double> alice_prob(p.dim_a);
  std::vector<std::vector<double>> bob_prob(p.dim_a);
  for (int j = 0; j < p.dim_a; ++j) {
    CVector bob = CVector::Zero(p.dim_b);
    for (int a = 0; a < p.dim_a; ++a) bob += std::conj(p.alice_basis[j](a)) * psi.segment(a * p.dim_b, p.dim_b);
    alice_prob[j] = bob.squaredNorm();
    for (const auto& o : p.decoders[j]) bob_prob[j].push_back(std::norm(o.direction.dot(bob)));
  }
  auto credit = [&](int j, std::size_t d) {
    const auto& cand = p.decoders[j][d].candidates;
    if (std::find(cand.begin(), cand.end(), c) == cand.end()) return 0.0;
    return 1.0 / static_cast<double>(cand.size());
  };
  if (mode.exact) {
    double success = 0.0;
    for (int j = 0; j < p.dim_a; ++j)
      for (std::size_t d = 0; d < p.decoders[j].size(); ++d) success += bob_prob[j][d] * credit(j, d);
    return success;
  }
  if (mode.shots <= 0) throw PreconditionError("shot count must be positive");
  auto rng = make_rng(mode.seed, stream_id("simulate") + static_cast<std::uint64_t>(c));
  std::discrete_distribution<int> alice(alice_prob.begin(), alice_prob.end());
  std::vector<std::discrete_distribution<int>> bob;
  for (int j = 0; j < p.dim_a; ++j) {
    if (alice_prob[j] > 0.0) {
      bob.emplace_back(bob_prob[j].begin(), bob_prob[j].end());
    } else {
      bob.emplace_back();
    }
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  long wins = 0;
  for (long shot = 0; shot < mode.shots; ++shot) {
    const int j = alice(rng);
    const int d = bob[j](rng);
    const auto& cand = p.decoders[j][d].candidates;
    if (cand.empty()) continue;
    const auto pick = static_cast<std::size_t>(unit(rng) * static_cast<double>(cand.size()));
    if (cand[std::min(pick, cand.size() - 1)] == c) ++wins;
  }
  return static_cast<double>(wins) / static_cast<double>(mode.shots);
}

struct ProtocolAudit {
  double reconstruction = 0.0;  // max_c || sum_j a_j (x) h_{j,c} - Psi'_c ||
  double orthogonality = 0.0;   // max_j max_{c != c'} |<h_{j,c}|h_{j,c'}>|
  double normalization = 0.0;   // max_c | sum_j ||h_{j,c}||^2 - 1 |
  double alice_unitarity = 0.0;
};

/// Audits the invariants by direct inner products.
inline ProtocolAudit audit_protocol(const DiscriminationProtocol& p) {
  ProtocolAudit a;
  CMatrix alice(p.dim_a, p.dim_a);
  for (int j = 0; j < p.dim_a; ++j) alice.col(j) = p.alice_basis[j];
  a.alice_unitarity = unitarity_defect(alice);
  for (int c = 0; c < p.codeword_count(); ++c) {
    CVector psi = CVector::Zero(p.codewords[c].size());
    double norm = 0.0;
    for (int j = 0; j < p.dim_a; ++j) {
      psi += kron(p.alice_basis[j], p.conditional[j][c]);
      norm += p.conditional[j][c].squaredNorm();
    }
    a.reconstruction = std::max(a.reconstruction, (psi - p.codewords[c]).norm());
    a.normalization = std::max(a.normalization, std::abs(norm - 1.0));
  }
  for (int j = 0; j < p.dim_a; ++j)
    for (int c = 0; c < p.codeword_count(); ++c)
      for (int d = c + 1; d < p.codeword_count(); ++d)
        a.orthogonality = std::max(a.orthogonality, std::abs(p.conditional[j][c].dot(p.conditional[j][d])));
  return a;
}

struct MultipartiteReport {
  std::vector<int> dims;  // d2 .. dn
  double ebits_cost = 0.0;
  DiscriminationProtocol protocol;
};

/// Groups parties A2..An into one receiver. A2..A_{n-1} teleport their shares to An, consuming
/// log2(d2 ... d_{n-1}) ebits; teleportation is accounted, not simulated.
inline MultipartiteReport multipartite_reduce(const std::vector<int>& dims, const Subspace& s,
                                              const SolverOptions& opts = {}) {
  if (dims.empty()) throw StructuralError("need at least one receiving party");
  long product = 1;
  for (int d : dims) {
    if (d <= 0) throw StructuralError("party dimensions must be positive");
    product *= d;
  }
  if (product != s.dim_b) throw StructuralError("party dimensions do not multiply to the receiver dimension");
  double relayed = 1.0;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) relayed *= dims[i];
  return {dims, std::log2(relayed), build_protocol(s, opts)};
}

namespace io {

inline json to_json(const DDCertificate& c) {
  json trace = json::array();
  for (double f : c.objective_trace) trace.push_back(f);
  return {{"U", to_json(c.u)},
          {"V", to_json(c.v)},
          {"residual", c.residual},
          {"converged", c.converged},
          {"real", c.real},
          {"startsUsed", c.starts_used},
          {"bestStart", c.best_start},
          {"objectiveTrace", trace}};
}

inline json to_json(const DiscriminationProtocol& p) {
  json alice = json::array(), code = json::array(), cond = json::array();
  for (const auto& a : p.alice_basis) alice.push_back(to_json(a));
  for (const auto& c : p.codewords) code.push_back(to_json(c));
  for (const auto& fam : p.conditional) {
    json f = json::array();
    for (const auto& h : fam) f.push_back(to_json(h));
    cond.push_back(f);
  }
  return {{"dimA", p.dim_a},         {"dimB", p.dim_b},       {"aliceBasis", alice},
          {"codewords", code},       {"bobConditional", cond}, {"residual", p.residual},
          {"converged", p.converged}};
}

/// Rebuilds Bob's decoders from `bobConditional`; codewords are taken from the file.
inline DiscriminationProtocol protocol_from_json(const json& j) {
  std::vector<CVector> alice;
  for (const auto& a : require(j, "aliceBasis")) alice.push_back(cvector_from_json(a));
  std::vector<std::vector<CVector>> cond;
  for (const auto& fam : require(j, "bobConditional")) {
    std::vector<CVector> f;
    for (const auto& h : fam) f.push_back(cvector_from_json(h));
    cond.push_back(std::move(f));
  }
  const double residual = j.value("residual", 0.0);
  DiscriminationProtocol p = assemble_protocol(std::move(alice), std::move(cond), residual);
  if (j.contains("codewords")) {
    std::vector<CVector> code;
    for (const auto& c : j["codewords"]) code.push_back(cvector_from_json(c));
    if (code.size() != p.codewords.size()) throw StructuralError("codeword count mismatch");
    for (std::size_t c = 0; c < code.size(); ++c)
      if (code[c].size() != p.codewords[c].size()) throw StructuralError("codeword dimension mismatch");
    p.codewords = std::move(code);
  }
  p.converged = j.value("converged", true);
  return p;
}

inline json to_json(const Subspace& s) {
  json basis = json::array();
  for (const auto& v : s.basis) basis.push_back(to_json(v));
  return {{"dimA", s.dim_a}, {"dimB", s.dim_b}, {"basis", basis}};
}

/// Accepts any spanning vectors; they are orthonormalized in order.
inline Subspace subspace_from_json(const json& j) {
  const int dim_a = require_int(j, "dimA");
  std::vector<CVector> raw;
  for (const auto& v : require(j, "basis")) raw.push_back(cvector_from_json(v));
  Subspace s = subspace_from_vectors(raw, dim_a);
  if (j.contains("dimB") && j["dimB"].get<int>() != s.dim_b) throw StructuralError("dimB does not match vectors");
  return s;
}

}  // namespace io

}  // namespace ddlocc
