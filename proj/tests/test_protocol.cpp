#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace ddlocc;

namespace {

CMatrix projector(const std::vector<CVector>& basis) {
  CMatrix p = CMatrix::Zero(basis.front().size(), basis.front().size());
  for (const auto& v : basis) p += v * v.adjoint();
  return p;
}

// Every vector has exactly one entry of modulus one.
bool is_computational_up_to_phase(const std::vector<CVector>& basis, double tol = 1e-8) {
  for (const auto& v : basis) {
    int big = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (std::abs(std::abs(v(i)) - 1.0) < tol) ++big;
      else if (std::abs(v(i)) > tol) return false;
    }
    if (big != 1) return false;
  }
  return true;
}

void expect_perfect(const DiscriminationProtocol& p, double tol = 1e-9) {
  for (int c = 0; c < p.codeword_count(); ++c) EXPECT_NEAR(simulate(p, c), 1.0, tol) << "codeword " << c;
  const ProtocolAudit a = audit_protocol(p);
  EXPECT_LE(a.reconstruction, 1e-9);
  EXPECT_LE(a.orthogonality, 1e-8);
  EXPECT_LE(a.normalization, 1e-9);
  EXPECT_LE(a.alice_unitarity, 1e-9);
}

Subspace product_subspace() {
  std::vector<CVector> v;
  for (int j = 0; j < 3; ++j) v.push_back(kron(CVector::Unit(3, j), CVector::Unit(3, j)).col(0));
  return subspace_from_vectors(v);
}

Subspace unique_subspace() { return subspace_from_vectors(constants::unique_basis()); }

}  // namespace

// ---------------------------------------------------------------- subspaces

TEST(Subspace, OrthonormalInputIsUnchanged) {
  const auto raw = constants::unique_basis();
  const Subspace s = subspace_from_vectors(raw);
  EXPECT_EQ(s.dim_a, 3);
  EXPECT_EQ(s.dim_b, 9);
  for (int i = 0; i < 3; ++i) EXPECT_LT(detail::max_abs(s.basis[i] - raw[i]), 1e-12);
}

TEST(Subspace, ScaledCopiesSpanTheSameSpace) {
  const auto raw = constants::unique_basis();
  const Subspace s = subspace_from_vectors({2.0 * raw[0], 3.0 * raw[1], raw[2]});
  CMatrix b(27, 3);
  for (int i = 0; i < 3; ++i) b.col(i) = s.basis[i];
  EXPECT_LT(detail::max_abs(b.adjoint() * b - CMatrix::Identity(3, 3)), 1e-12);
  EXPECT_LT(detail::max_abs(projector(s.basis) - projector(raw)), 1e-12);
}

TEST(Subspace, DependentVectorsAreRejected) {
  const auto raw = constants::unique_basis();
  EXPECT_THROW(subspace_from_vectors({raw[0], raw[0], raw[1]}), StructuralError);
  EXPECT_THROW(subspace_from_vectors({CVector::Unit(8, 0), CVector::Unit(8, 1), CVector::Unit(8, 2)}),
               StructuralError);
}

TEST(Subspace, JsonRoundTrip) {
  const Subspace s = unique_subspace();
  const Subspace back = io::subspace_from_json(io::json::parse(io::to_json(s).dump()));
  for (int i = 0; i < 3; ++i) EXPECT_EQ(detail::max_abs(back.basis[i] - s.basis[i]), 0.0);
}

// ---------------------------------------------------------------- protocols

TEST(BuildProtocol, UniqueBasisUsesComputationalMeasurement) {
  const DiscriminationProtocol p = build_protocol(unique_subspace());
  EXPECT_TRUE(p.converged);
  EXPECT_TRUE(is_monomial(p.certificate.u, 1e-6).monomial);
  EXPECT_TRUE(is_monomial(p.certificate.v, 1e-6).monomial);
  EXPECT_TRUE(is_computational_up_to_phase(p.alice_basis, 1e-6));
  expect_perfect(p);
}

TEST(BuildProtocol, ProductSubspace) {
  const DiscriminationProtocol p = build_protocol(product_subspace());
  EXPECT_TRUE(p.converged);
  EXPECT_TRUE(is_computational_up_to_phase(p.alice_basis));
  // Each codeword sits on a single Alice outcome, where Bob's state is a computational vector.
  for (int c = 0; c < 3; ++c) {
    int live = 0;
    for (int j = 0; j < 3; ++j) {
      const CVector& h = p.conditional[j][c];
      if (h.norm() < 1e-9) continue;
      ++live;
      EXPECT_NEAR(h.norm(), 1.0, 1e-12);
      EXPECT_TRUE(is_computational_up_to_phase({h}));
    }
    EXPECT_EQ(live, 1);
  }
  expect_perfect(p);
}

TEST(BuildProtocol, RandomSubspacesOfThreeByFive) {
  auto rng = make_rng(40);
  for (int i = 0; i < 5; ++i) {
    const Subspace s = subspace_from_vectors(ddlocc::testing::random_orthonormal_triple(15, rng));
    EXPECT_EQ(s.dim_b, 5);
    const DiscriminationProtocol p = build_protocol(s);
    EXPECT_TRUE(p.converged);
    EXPECT_LE(p.residual, 1e-8);
    expect_perfect(p);
    // Codewords are the subspace basis after the change of basis.
    EXPECT_LT(detail::max_abs(projector(p.codewords) - projector(s.basis)), 1e-9);
  }
}

TEST(BuildProtocol, RejectsNonOrthonormalSubspace) {
  Subspace s = unique_subspace();
  s.basis[0] *= 2.0;
  EXPECT_THROW(build_protocol(s), PreconditionError);
}

TEST(Simulate, InjectedTieHalvesSuccess) {
  const DiscriminationProtocol p = build_protocol(unique_subspace());
  std::vector<std::vector<CVector>> cond = p.conditional;
  for (auto& row : cond) row[1] = row[0];
  const DiscriminationProtocol tie = assemble_protocol(p.alice_basis, cond, 0.0);
  EXPECT_NEAR(simulate(tie, 0), 0.5, 1e-12);
  EXPECT_NEAR(simulate(tie, 1), 0.5, 1e-12);
}

TEST(Simulate, GlobalPhaseDoesNotMatter) {
  const DiscriminationProtocol p = build_protocol(product_subspace());
  std::vector<std::vector<CVector>> cond = p.conditional;
  for (auto& row : cond) row[2] *= std::polar(1.0, 1.234);
  const DiscriminationProtocol q = assemble_protocol(p.alice_basis, cond, 0.0);
  for (int c = 0; c < 3; ++c) EXPECT_NEAR(simulate(q, c), simulate(p, c), 1e-14);
  const auto mode = SimulationMode::sampled(1000, 3);
  EXPECT_EQ(simulate(q, 2, mode), simulate(p, 2, mode));
}

TEST(Simulate, ShotsAreDeterministicAndAccurate) {
  const DiscriminationProtocol p = build_protocol(unique_subspace());
  for (int c = 0; c < 3; ++c) {
    const double a = simulate(p, c, SimulationMode::sampled(10000, 9));
    EXPECT_GE(a, 0.999);
    EXPECT_EQ(a, simulate(p, c, SimulationMode::sampled(10000, 9)));
  }
  EXPECT_THROW(simulate(p, 3), StructuralError);
}

TEST(Simulate, ShotsTrackExactValueForTies) {
  const DiscriminationProtocol p = build_protocol(unique_subspace());
  std::vector<std::vector<CVector>> cond = p.conditional;
  for (auto& row : cond) row[1] = row[0];
  const DiscriminationProtocol tie = assemble_protocol(p.alice_basis, cond, 0.0);
  // Binomial(10^4, 1/2) has standard deviation 0.005.
  EXPECT_NEAR(simulate(tie, 0, SimulationMode::sampled(10000, 1)), 0.5, 0.025);
}

TEST(Protocol, JsonRoundTripPreservesBehaviour) {
  auto rng = make_rng(41);
  const DiscriminationProtocol p = build_protocol(subspace_from_vectors(ddlocc::testing::random_orthonormal_triple(12, rng)));
  const auto j = io::to_json(p);
  for (const char* key : {"aliceBasis", "codewords", "bobConditional", "residual"}) EXPECT_TRUE(j.contains(key)) << key;
  const DiscriminationProtocol back = io::protocol_from_json(io::json::parse(j.dump()));
  for (int c = 0; c < 3; ++c) EXPECT_NEAR(simulate(back, c), simulate(p, c), 1e-14);
  EXPECT_LE(audit_protocol(back).reconstruction, 1e-9);
}

TEST(Multipartite, EbitCosts) {
  auto rng = make_rng(42);
  const Subspace s3 = unique_subspace();
  const MultipartiteReport two = multipartite_reduce({9}, s3);
  EXPECT_EQ(two.ebits_cost, 0.0);
  expect_perfect(two.protocol);

  const Subspace s4 = subspace_from_vectors(ddlocc::testing::random_orthonormal_triple(12, rng));
  const MultipartiteReport tri = multipartite_reduce({2, 2}, s4);
  EXPECT_EQ(tri.ebits_cost, 1.0);
  expect_perfect(tri.protocol);

  const Subspace s18 = subspace_from_vectors(ddlocc::testing::random_orthonormal_triple(54, rng));
  const MultipartiteReport four = multipartite_reduce({3, 3, 2}, s18);
  EXPECT_EQ(four.ebits_cost, std::log2(9.0));
  EXPECT_TRUE(four.protocol.converged);

  EXPECT_THROW(multipartite_reduce({2, 3}, s4), StructuralError);
  EXPECT_THROW(multipartite_reduce({}, s4), StructuralError);
}

// ---------------------------------------------------------------- capacity

TEST(Stinespring, Validation) {
  EXPECT_THROW(StinespringIsometry(3, 3, 3, CMatrix::Identity(8, 3)), StructuralError);
  EXPECT_THROW(StinespringIsometry(3, 3, 3, 2.0 * CMatrix::Identity(9, 3)), PreconditionError);
  auto rng = make_rng(43);
  const StinespringIsometry iso = random_stinespring(3, 3, 4, rng);
  const CMatrix rho = ddlocc::testing::random_state(rng).matrix().block(0, 0, 3, 3);
  const CMatrix out = iso.apply(rho / rho.trace());
  EXPECT_NEAR(out.trace().real(), 1.0, 1e-12);
  EXPECT_GE(min_eigenvalue(out), -1e-12);
}

TEST(Stinespring, SwapFactorsReordersKroneckerProducts) {
  auto rng = make_rng(44);
  const CMatrix x = gaussian_cmatrix(3, 1, rng), y = gaussian_cmatrix(5, 1, rng);
  EXPECT_LT(detail::max_abs(swap_factors(kron(x, y), 3, 5) - kron(y, x)), 1e-15);
  const CMatrix m = gaussian_cmatrix(15, 2, rng);
  EXPECT_EQ(detail::max_abs(swap_factors(swap_factors(m, 3, 5), 5, 3) - m), 0.0);
}

TEST(Capacity, IdentityEmbeddingIsTriviallyDistinguishable) {
  CMatrix j = CMatrix::Zero(9, 3);
  for (int i = 0; i < 3; ++i) j(i, i) = 1.0;  // |e0> (x) |i>
  const CapacityProtocol c = environment_assisted_protocol(StinespringIsometry(3, 3, 3, j));
  EXPECT_TRUE(c.converged);
  EXPECT_EQ(c.min_success, 1.0);
  EXPECT_EQ(c.capacity_bits, std::log2(3.0));
}

TEST(Capacity, AssistedRandomIsometries) {
  auto rng = make_rng(45);
  for (int i = 0; i < 5; ++i) {
    const CapacityProtocol c = environment_assisted_protocol(random_stinespring(3, 3, 4, rng));
    EXPECT_TRUE(c.converged);
    EXPECT_LE(c.protocol.residual, 1e-8);
    EXPECT_NEAR(c.min_success, 1.0, 1e-9);
    EXPECT_NEAR(c.capacity_bits, std::log2(3.0), 1e-15);
  }
}

TEST(Capacity, AssistedWithCustomInputs) {
  auto rng = make_rng(46);
  const StinespringIsometry iso = random_stinespring(4, 3, 3, rng);
  const CMatrix q = random_isometry(4, 3, rng);
  const CapacityProtocol c = environment_assisted_protocol(iso, {q.col(0), q.col(1), q.col(2)});
  EXPECT_NEAR(c.min_success, 1.0, 1e-9);
  EXPECT_THROW(environment_assisted_protocol(iso, {q.col(0), q.col(0), q.col(2)}), PreconditionError);
}

TEST(Capacity, PaddedRankTwoEnvironment) {
  auto rng = make_rng(47);
  const StinespringIsometry small = random_stinespring(3, 2, 4, rng);
  EXPECT_THROW(environment_assisted_protocol(small), UnsupportedError);
  const StinespringIsometry padded = pad_environment(small, 3);
  EXPECT_EQ(padded.d_env, 3);
  EXPECT_LT(detail::max_abs(padded.apply(CMatrix::Identity(3, 3) / 3.0) - small.apply(CMatrix::Identity(3, 3) / 3.0)),
            1e-14);
  const CapacityProtocol c = environment_assisted_protocol(padded);
  EXPECT_TRUE(c.converged);
  EXPECT_NEAR(c.min_success, 1.0, 1e-9);
}

TEST(Capacity, AssistingUnitaryChannel) {
  auto rng = make_rng(48);
  const CMatrix w = random_unitary(3, rng);
  for (int env : {1, 3}) {
    const StinespringIsometry iso = pad_environment(StinespringIsometry(3, 1, 3, w), env);
    const CapacityProtocol c = environment_assisting_protocol(iso);
    EXPECT_TRUE(c.converged);
    EXPECT_NEAR(c.min_success, 1.0, 1e-9);
    // The image is all of C^3, so a computational measurement already separates a basis of it.
    EXPECT_TRUE(is_computational_up_to_phase(c.protocol.alice_basis, 1e-8));
  }
}

TEST(Capacity, AssistingRandomIsometries) {
  auto rng = make_rng(49);
  for (int env : {5, 9}) {
    const CapacityProtocol c = environment_assisting_protocol(random_stinespring(3, env, 3, rng));
    EXPECT_TRUE(c.converged);
    EXPECT_LE(c.protocol.residual, 1e-8);
    EXPECT_NEAR(c.min_success, 1.0, 1e-9);
    EXPECT_EQ(c.protocol.dim_b, env);
  }
  EXPECT_THROW(environment_assisting_protocol(random_stinespring(2, 3, 3, rng)), UnsupportedError);
  EXPECT_THROW(environment_assisting_protocol(random_stinespring(3, 3, 4, rng)), UnsupportedError);
}

TEST(Capacity, IsometryJsonAxisOrder) {
  auto rng = make_rng(50);
  const StinespringIsometry iso = random_stinespring(3, 5, 3, rng);
  io::json j = io::to_json(iso);
  const StinespringIsometry back = io::isometry_from_json(io::json::parse(j.dump()));
  EXPECT_EQ(detail::max_abs(back.j - iso.j), 0.0);
  j["axisOrder"] = io::json::array({"sys", "env"});
  j["J"] = io::to_json(swap_factors(iso.j, 5, 3));
  const StinespringIsometry swapped = io::isometry_from_json(j);
  EXPECT_LT(detail::max_abs(swapped.j - iso.j), 1e-15);
}

// ---------------------------------------------------------------- quantum-classical conversion

namespace {

void expect_qc_invariants(const BipartiteOperator& alpha, const QCConversionResult& r) {
  // Dephasing oracle from the reported Alice basis.
  CMatrix beta = CMatrix::Zero(9, 9);
  for (const auto& a : r.alice_basis) {
    const CMatrix p = kron(a * a.adjoint(), CMatrix::Identity(3, 3));
    beta += p * alpha.matrix() * p;
  }
  EXPECT_LT(detail::max_abs(beta - r.beta.matrix()), 1e-14);
  CMatrix label = CMatrix::Zero(3, 3);
  for (int j = 0; j < 3; ++j) label += (j + 1.0) * r.alice_basis[j] * r.alice_basis[j].adjoint();
  const CMatrix lab = kron(label, CMatrix::Identity(3, 3));
  EXPECT_LT(detail::max_abs(lab * beta - beta * lab), 1e-12);
  EXPECT_TRUE(r.classical_a);
  // Block congruence oracle: block_j of (U (x) I) alpha (U (x) I)^dagger against F D_j F^dagger.
  const CMatrix u = r.certificate.u;
  const CMatrix k = kron(u, CMatrix::Identity(3, 3));
  const CMatrix rot = k * alpha.matrix() * k.adjoint();
  for (int j = 0; j < 3; ++j) {
    const CMatrix d = r.diagonals[j].diagonal().asDiagonal();
    EXPECT_LT(detail::max_abs(rot.block(3 * j, 3 * j, 3, 3) - r.frame * d * r.frame.adjoint()), 1e-8);
  }
}

}  // namespace

TEST(QCConvert, MaximallyMixedIsFullyClassical) {
  const BipartiteOperator alpha(3, 3, CMatrix::Identity(9, 9) / 9.0);
  const QCConversionResult r = qc_convert(alpha);
  EXPECT_TRUE(r.fully_classical);
  EXPECT_LE(r.frame_gram_defect, 1e-8);
  expect_qc_invariants(alpha, r);
}

TEST(QCConvert, UniqueBasisGram) {
  const CMatrix g = constants::frame_g();
  const BipartiteOperator alpha(3, 3, g.adjoint() * g / 3.0);
  const QCConversionResult r = qc_convert(alpha);
  EXPECT_TRUE(r.classical_a);
  EXPECT_TRUE(r.generalized_classical_b);
  EXPECT_LE(r.residual, 1e-8);
  expect_qc_invariants(alpha, r);
}

TEST(QCConvert, IsotropicState) {
  CVector phi = CVector::Zero(9);
  for (int i = 0; i < 3; ++i) phi(4 * i) = 1.0 / std::sqrt(3.0);
  const CMatrix rho = 0.5 * phi * phi.adjoint() + 0.5 * CMatrix::Identity(9, 9) / 9.0;
  const BipartiteOperator alpha(3, 3, rho);
  EXPECT_LT(detail::max_abs(marginals(alpha).b - CMatrix::Identity(3, 3) / 3.0), 1e-15);
  const QCConversionResult r = qc_convert(alpha);
  EXPECT_TRUE(r.fully_classical);
  EXPECT_LE(r.frame_gram_defect, 1e-8);
  expect_qc_invariants(alpha, r);
}

TEST(QCConvert, RandomStates) {
  auto rng = make_rng(51);
  for (int i = 0; i < 5; ++i) {
    const BipartiteOperator alpha = ddlocc::testing::random_state(rng);
    const QCConversionResult r = qc_convert(alpha);
    EXPECT_TRUE(r.generalized_classical_b);
    EXPECT_FALSE(r.fully_classical);
    EXPECT_LE(r.congruence_residual, 1e-8);
    expect_qc_invariants(alpha, r);
  }
}

TEST(QCConvert, MaximallyMixedMarginalGivesOrthogonalFrame) {
  for (std::uint64_t i = 0; i < 5; ++i) {
    const BipartiteOperator alpha = ddlocc::testing::random_b_maximally_mixed_state(52, i);
    const QCConversionResult r = qc_convert(alpha);
    EXPECT_TRUE(r.fully_classical);
    EXPECT_LE(r.frame_gram_defect, 1e-8);
  }
}

TEST(QCConvert, SingularMarginalRestrictsToSupport) {
  CMatrix rho_a = CMatrix::Identity(3, 3) / 3.0;
  CMatrix rho_b = CMatrix::Zero(3, 3);
  rho_b(0, 0) = 0.5;
  rho_b(1, 1) = 0.5;
  const QCConversionResult r = qc_convert(BipartiteOperator(3, 3, kron(rho_a, rho_b)));
  EXPECT_TRUE(r.support_restricted);
  EXPECT_FALSE(r.warnings.empty());
  EXPECT_EQ(r.frame.cols(), 2);
  EXPECT_TRUE(r.generalized_classical_b);
  EXPECT_FALSE(r.fully_classical);
}

TEST(QCConvert, InvalidStates) {
  CMatrix neg = CMatrix::Identity(9, 9) / 9.0;
  neg(0, 0) = -0.1;
  neg(1, 1) += 0.1 + 1.0 / 9.0;
  EXPECT_THROW(qc_convert(BipartiteOperator(3, 3, neg)), PreconditionError);
  EXPECT_THROW(qc_convert(BipartiteOperator(3, 3, CMatrix::Identity(9, 9))), PreconditionError);
}

// ---------------------------------------------------------------- entanglement

TEST(Entropy, ProductAndMaximallyEntangled) {
  EXPECT_NEAR(entanglement_entropy(kron(CVector::Unit(3, 1), CVector::Unit(4, 2)).col(0), 3), 0.0, 1e-12);
  CVector phi = CVector::Zero(9);
  for (int i = 0; i < 3; ++i) phi(4 * i) = 1.0 / std::sqrt(3.0);
  EXPECT_NEAR(entanglement_entropy(phi, 3), std::log2(3.0), 1e-12);
}

TEST(Entropy, FirstUniqueBasisVector) {
  const double s = entanglement_entropy(constants::unique_basis()[0], 3);
  EXPECT_NEAR(s, 1.53, 0.01);
}

TEST(Entropy, LocalUnitaryInvariance) {
  auto rng = make_rng(53);
  for (int i = 0; i < 20; ++i) {
    CVector psi = gaussian_cmatrix(12, 1, rng).col(0);
    psi /= psi.norm();
    const CVector moved = kron(random_unitary(3, rng), random_unitary(4, rng)) * psi;
    EXPECT_NEAR(entanglement_entropy(moved, 3), entanglement_entropy(psi, 3), 1e-10);
    const double s = entanglement_entropy(psi, 3);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, std::log2(3.0) + 1e-12);
  }
}

TEST(Entropy, RejectsBadInput) {
  EXPECT_THROW(entanglement_entropy(2.0 * CVector::Unit(9, 0), 3), PreconditionError);
  EXPECT_THROW(entanglement_entropy(CVector::Unit(10, 0), 3), StructuralError);
}

TEST(SpanEntanglement, ProductBasis) {
  std::vector<CVector> basis;
  for (int j = 0; j < 3; ++j) basis.push_back(kron(CVector::Unit(3, j), CVector::Unit(3, 0)).col(0));
  EXPECT_NEAR(span_min_entanglement(basis, 3, 200, 2).value, 0.0, 1e-12);
}

TEST(SpanEntanglement, MixedBasisContainsProductCandidate) {
  auto rng = make_rng(54);
  const CMatrix q = random_isometry(8, 2, rng);
  // One product vector |0>|0>, two entangled vectors orthogonal to it.
  std::vector<CVector> basis{CVector::Unit(9, 0)};
  for (int i = 0; i < 2; ++i) {
    CVector v = CVector::Zero(9);
    v.tail(8) = q.col(i);
    basis.push_back(v);
  }
  const SpanEntanglement s = span_min_entanglement(basis, 3, 200, 2);
  EXPECT_LE(s.value, 1e-12);
}

TEST(SpanEntanglement, UniqueBasisStaysAboveBound) {
  const SpanEntanglement s = span_min_entanglement(constants::unique_basis(), 3, 2000, 5, 7);
  EXPECT_GE(s.value, 1.52);
  EXPECT_LE(s.value, entanglement_entropy(constants::unique_basis()[0], 3) + 1e-12);
  EXPECT_NEAR(s.coefficients.norm(), 1.0, 1e-12);
  CVector psi = CVector::Zero(27);
  const auto basis = constants::unique_basis();
  for (int i = 0; i < 3; ++i) psi += s.coefficients(i) * basis[i];
  EXPECT_NEAR(entanglement_entropy(psi, 3), s.value, 1e-9);
}

TEST(SpanEntanglement, RejectsNonOrthonormalBasis) {
  auto basis = constants::unique_basis();
  basis[1] = basis[0];
  EXPECT_THROW(span_min_entanglement(basis, 3, 10, 1), PreconditionError);
}

// ---------------------------------------------------------------- counterexample and dimensions

TEST(Counterexample, StructureForFixedSeed) {
  const FourDimReport r = four_dim_counterexample(42, 5);
  EXPECT_EQ(r.dim_domain, 119);
  EXPECT_EQ(r.dim_target, 120);
  ASSERT_EQ(r.states.size(), 4u);
  EXPECT_TRUE(r.orthonormal);
  CMatrix phi(36, 4);
  for (int i = 0; i < 4; ++i) phi.col(i) = r.states[i];
  EXPECT_LT(detail::max_abs(phi.adjoint() * phi - CMatrix::Identity(4, 4)), 1e-10);
  const BipartiteOperator k(3, 4, r.k);
  EXPECT_LT(detail::max_abs(marginals(k).b - CMatrix::Identity(4, 4)), 1e-10);
  EXPECT_GE(min_eigenvalue(r.k), -1e-12);
  // K = I/3 + eps K0 with K0 in M00(3 (x) 4), unit norm.
  const CMatrix k0 = (r.k - CMatrix::Identity(12, 12) / 3.0) / r.epsilon;
  EXPECT_NEAR(k0.norm(), 1.0, 1e-9);
  const Marginals m0 = marginals(BipartiteOperator(3, 4, k0));
  EXPECT_LT(detail::max_abs(m0.a), 1e-9);
  EXPECT_LT(detail::max_abs(m0.b), 1e-9);
  EXPECT_NEAR(r.epsilon, 0.9 / std::abs(min_eigenvalue(k0)) / 3.0, 1e-12);
  EXPECT_GT(r.residual_floor, 0.0);
  EXPECT_FALSE(r.solver_converged);
  EXPECT_EQ(r.label, "non-certifying");
  // The Gram operator of the four states is K.
  EXPECT_LT(detail::max_abs(gram_operator(r.states, 3).matrix() - r.k), 1e-10);
}

TEST(Counterexample, Deterministic) {
  const FourDimReport a = four_dim_counterexample(42, 2), b = four_dim_counterexample(42, 2);
  EXPECT_EQ(detail::max_abs(a.k - b.k), 0.0);
  EXPECT_EQ(a.residual_floor, b.residual_floor);
}

TEST(Dimensions, ThreeByThree) {
  const ComplexDims c = complex_dimensions(3, 3);
  EXPECT_EQ(c.m0, 72);
  EXPECT_EQ(c.m00, 64);
  EXPECT_EQ(c.d00, 52);
  EXPECT_EQ(2 * su_dimension(3) + c.d00, 68);
  const RealDims r = real_dimensions(3, 3);
  EXPECT_EQ(r.m2, 25);
  EXPECT_EQ(r.d2, 19);
  EXPECT_EQ(2 * so_dimension(3) + r.d2, r.m2);
}

TEST(Dimensions, ClosedFormsForThreeByN) {
  for (int n = 2; n <= 4; ++n) {
    const ComplexDims c = complex_dimensions(3, n);
    EXPECT_EQ(c.m0, 9 * n * n - n * n) << n;
    EXPECT_EQ(c.m00, 9 * n * n - n * n - 9 + 1) << n;
    EXPECT_EQ(c.d00, c.m00 - 2 * n * (n - 1)) << n;
  }
  const ComplexDims c34 = complex_dimensions(3, 4);
  EXPECT_EQ(c34.m00, 120);
  EXPECT_EQ(c34.d00, 96);
  EXPECT_EQ(su_dimension(3) + su_dimension(4) + c34.d00, 119);
}

TEST(Dimensions, SpacesSatisfyTheirConstraints) {
  const ComplexSpaces s = complex_spaces(3, 3);
  for (Eigen::Index i = 0; i < s.d00.cols(); ++i) {
    const BipartiteOperator m(3, 3, real_to_hermitian(s.d00.col(i), 9));
    const Marginals g = marginals(m);
    EXPECT_LT(detail::max_abs(g.a), 1e-10);
    EXPECT_LT(detail::max_abs(g.b), 1e-10);
    EXPECT_LT(is_dd(m).residual, 1e-10);
  }
  const RealSpaces r = real_spaces(3, 3);
  for (Eigen::Index i = 0; i < r.m2.cols(); ++i) {
    const RealSymmetricOperator m(3, 3, real_to_symmetric(r.m2.col(i), 9));
    EXPECT_TRUE(m.blocks_symmetric(1e-10));
  }
}

// ---------------------------------------------------------------- verification checks

TEST(Verify, GIdentity) {
  const VerificationReport r = verify_g_identity();
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.check, "g_identity");
  EXPECT_FALSE(r.to_json().contains("runtimeSeconds"));
  EXPECT_TRUE(r.to_json(true).contains("runtimeSeconds"));
}

TEST(Verify, ComplexJacobianRank) { EXPECT_TRUE(verify_jacobian_rank_complex().pass); }

TEST(Verify, RealJacobianDeterminant) { EXPECT_TRUE(verify_jacobian_real().pass); }

TEST(Verify, AppendixFormulas) {
  EXPECT_TRUE(verify_appendix_b(20, 3).pass);
  EXPECT_TRUE(verify_appendix_c(20, 3).pass);
}

TEST(Verify, UniquenessSmall) { EXPECT_TRUE(verify_uniqueness_h0(10, 1).pass); }

TEST(Verify, Dimensions) { EXPECT_TRUE(verify_dimensions().pass); }

TEST(Verify, SuiteOrderIsFixed) {
  SuiteOptions o;
  o.threads = 3;
  o.samples = 10;
  o.uniqueness_solves = 10;
  const auto reports = run_verification_suite(o);
  std::vector<std::string> names;
  for (const auto& r : reports) {
    names.push_back(r.check);
    EXPECT_TRUE(r.pass) << r.check;
  }
  const auto again = run_verification_suite(o);
  ASSERT_EQ(again.size(), reports.size());
  for (std::size_t i = 0; i < reports.size(); ++i) {
    EXPECT_EQ(again[i].check, names[i]);
    EXPECT_EQ(again[i].to_json().dump(), reports[i].to_json().dump());
  }
}
