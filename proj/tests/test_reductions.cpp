#include <gtest/gtest.h>

#include "lclh/reductions.hpp"

using namespace lclh;

namespace {

CMatrix basis_proj(Eigen::Index dim, Eigen::Index i) {
  CMatrix m = CMatrix::Zero(dim, dim);
  m(i, i) = 1;
  return m;
}

Verdict truth_of(const LocalConsistencyInstance& inst) {
  const auto r = brute_force_consistency(inst);
  EXPECT_NE(r.status, FeasibilityStatus::Undecided);
  return r.status == FeasibilityStatus::Feasible ? Verdict::Yes : Verdict::No;
}

LocalHamiltonianInstance random_lh(int n, int d, bool stoquastic, double offset, std::uint64_t seed) {
  Rng rng(seed);
  LocalHamiltonianInstance inst;
  inst.shape = SystemShape(n, d);
  const auto subsets = chain_subsets(n, 2);
  inst.terms = stoquastic ? random_stoquastic_terms(inst.shape, subsets, rng) : random_terms(inst.shape, subsets, rng);
  place_thresholds(inst, lh_decide(inst).lambda_min, offset, 0.2);
  return inst;
}

}  // namespace

TEST(ExtractAlphas, MatchesPlantedState) {
  const auto gen = make_consistent_instance(SystemShape(3, 2), chain_subsets(3, 2), 2);
  const auto ex = extract_alphas(gen.instance);
  EXPECT_FALSE(ex.conflict.has_value());
  ASSERT_EQ(ex.basis.size(), 27u);
  const DensityMatrix sigma(gen.instance.shape, gen.sigma);
  for (std::size_t j = 0; j < ex.basis.size(); ++j) {
    EXPECT_NEAR(ex.alpha(static_cast<Eigen::Index>(j)), expectation(ex.basis[j], sigma), 1e-12) << ex.basis[j].name;
  }
}

TEST(ExtractAlphas, ConflictGivesEarlyNo) {
  LocalConsistencyInstance inst;
  inst.shape = SystemShape(3, 2);
  inst.marginals = {{Subset{0, 1}, basis_proj(4, 0)}, {Subset{1, 2}, basis_proj(4, 3)}};
  const auto ex = extract_alphas(inst);
  ASSERT_TRUE(ex.conflict.has_value());
  EXPECT_EQ(ex.conflict->label, "IZI");
  EXPECT_NEAR(std::abs(ex.conflict->first_value - ex.conflict->second_value), 2.0, 1e-12);
  const auto rep = lc_to_lh(inst, exact_lh_oracle());
  EXPECT_EQ(rep.verdict, Verdict::No);
  EXPECT_TRUE(rep.early_no);
  EXPECT_EQ(rep.lh_queries, 0);
}

TEST(DualBody, GeometryCertificates) {
  Rng rng(6);
  for (const auto& [shape, subsets] : std::vector<std::pair<SystemShape, std::vector<Subset>>>{
           {SystemShape(1, 2), {Subset{0}}}, {SystemShape(2, 2), {Subset{0, 1}}}}) {
    const auto gen = make_consistent_instance(shape, subsets, 1);
    const auto body = make_dual_body(gen.instance, extract_alphas(gen.instance));
    const double dd = body.D();
    const auto spec = geometry_of(body);
    EXPECT_NEAR(spec.outer_radius, std::sqrt(dd + (1 + 2 * dd) * (1 + 2 * dd)), 1e-12);
    EXPECT_NEAR(spec.inner_radius, 1.0 / (4 * (dd + 1)), 1e-15);
    EXPECT_LE(body.certify_inner_ball(100, rng), -0.5 + 1e-9);
    // Every query Hamiltonian has unit-bounded terms.
    RVector x = RVector::Constant(body.D(), 0.7);
    const auto h = body.query_instance(x, 3.0, 1e-6);
    EXPECT_NO_THROW(h.validate());
    EXPECT_LE(operator_norm(body.f_matrix(x)), 2 * dd + 1 + 1e-9);
  }
}

TEST(DualBody, ExpectationsMatchDirectTraces) {
  const auto gen = make_consistent_instance(SystemShape(3, 2), chain_subsets(3, 2), 4);
  const auto ex = extract_alphas(gen.instance);
  const auto body = make_dual_body(gen.instance, ex);
  Rng rng(2);
  const CVector v = random_unit_vector<cplx>(8, rng);
  const RVector f = body.expectations_in(v);
  const CMatrix rho = v * v.adjoint();
  const DensityMatrix sigma(gen.instance.shape, rho);
  for (std::size_t j = 0; j < ex.basis.size(); ++j) {
    const double direct = expectation(ex.basis[j], sigma) - ex.alpha(static_cast<Eigen::Index>(j));
    EXPECT_NEAR(f(static_cast<Eigen::Index>(j)), direct, 1e-12) << ex.basis[j].name;
  }
}

TEST(LcToLh, AgreesWithBruteForce) {
  int agree = 0;
  for (int i = 0; i < 6; ++i) {
    const int n = 3 + i % 2;
    const auto subsets = chain_subsets(n, 2);
    const LocalConsistencyInstance inst =
        i % 2 == 0 ? make_consistent_instance(SystemShape(n, 2), subsets, 10 + i).instance
                   : make_inconsistent_instance(SystemShape(n, 2), subsets, 0.5, 10 + i).instance;
    const auto rep = lc_to_lh(inst, exact_lh_oracle());
    EXPECT_LE(rep.max_norm_ratio, 1.0 + 1e-12);
    agree += rep.verdict == truth_of(inst) ? 1 : 0;
  }
  EXPECT_EQ(agree, 6);
}

TEST(LcToLh, StoquasticQueriesStayStoquastic) {
  for (int i = 0; i < 4; ++i) {
    const int n = 3;
    const auto subsets = chain_subsets(n, 2);
    const auto mode = ConsistencyMode::Stoquastic;
    const LocalConsistencyInstance inst =
        i % 2 == 0 ? make_consistent_instance(SystemShape(n, 2), subsets, 30 + i, mode, 0.25).instance
                   : make_inconsistent_instance(SystemShape(n, 2), subsets, 0.25, 30 + i, mode).instance;
    const auto rep = stoq_lc_to_lh(inst, exact_lh_oracle());
    EXPECT_EQ(rep.verdict, truth_of(inst)) << "instance " << i;
    EXPECT_GT(rep.stoquastic_queries, 0);
    EXPECT_EQ(rep.nonstoquastic_queries, 0);
  }
  const auto std_inst = make_consistent_instance(SystemShape(2, 2), {Subset{0, 1}}, 1).instance;
  EXPECT_THROW(stoq_lc_to_lh(std_inst, exact_lh_oracle()), InvalidArgument);
}

TEST(ConsistencyBody, MarginalsAndPullback) {
  const SystemShape shape(3, 2);
  const auto subsets = chain_subsets(3, 2);
  const auto basis = local_basis_set(subsets, shape);
  const ConsistencyBodyK body(shape, subsets, basis);
  Rng rng(8);
  const CMatrix sigma_m = random_density_matrix<cplx>(8, 3, rng);
  const DensityMatrix sigma(shape, sigma_m);
  RVector alpha(body.D());
  for (int j = 0; j < body.D(); ++j) alpha(j) = expectation(basis[static_cast<std::size_t>(j)], sigma);
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    EXPECT_LT((body.marginal(i, alpha) - sigma.reduced(subsets[i])).cwiseAbs().maxCoeff(), 1e-12);
  }
  std::vector<CMatrix> g_local;
  for (std::size_t i = 0; i < subsets.size(); ++i) g_local.push_back(random_hermitian<cplx>(4, rng));
  const auto [g, offset] = body.pullback(g_local);
  double direct = 0.0;
  for (std::size_t i = 0; i < subsets.size(); ++i) direct += (g_local[i] * sigma.reduced(subsets[i])).trace().real();
  EXPECT_NEAR(g.dot(alpha) + offset, direct, 1e-12);
  const auto spec = body.geometry();
  EXPECT_NEAR(spec.outer_radius, std::sqrt(27.0), 1e-12);
  EXPECT_NEAR(spec.inner_radius, 1.0 / std::sqrt(27.0), 1e-12);
}

TEST(LhToLc, AgreesWithDiagonalization) {
  for (int i = 0; i < 4; ++i) {
    const auto inst = random_lh(3 + i % 2, 2, false, i % 2 ? -0.3 : 0.3, 50 + i);
    const auto rep = lh_to_lc_brute_force(inst);
    EXPECT_EQ(rep.verdict, lh_decide(inst).verdict) << "instance " << i;
    EXPECT_GT(rep.lc_queries + rep.box_cuts + rep.psd_cuts, 0);
  }
}

TEST(LhToLc, FrustratedTriangleNeedsLcCuts) {
  // Antiferromagnetic Heisenberg on a triangle: frustrated, so the local
  // optimum per bond is not globally consistent.
  CMatrix heis = CMatrix::Zero(4, 4);
  heis(0, 0) = heis(3, 3) = 0.25;
  heis(1, 1) = heis(2, 2) = -0.25;
  heis(1, 2) = heis(2, 1) = 0.5;
  heis *= 4.0 / 3.0;
  LocalHamiltonianInstance inst;
  inst.shape = SystemShape(3, 2);
  inst.terms = {{Subset{0, 1}, heis}, {Subset{1, 2}, heis}, {Subset{0, 2}, heis}};
  const double lmin = lh_decide(inst).lambda_min;
  EXPECT_NEAR(lmin, -1.0, 1e-12);
  place_thresholds(inst, lmin, -0.3, 0.2);  // NO, but each bond alone could reach -1 each
  const auto rep = lh_to_lc_brute_force(inst);
  EXPECT_EQ(rep.verdict, Verdict::No);
  EXPECT_GT(rep.lc_queries, 0);
}

TEST(LhToLc, StoquasticVariant) {
  for (int i = 0; i < 4; ++i) {
    const auto inst = random_lh(3, 2, true, i % 2 ? -0.3 : 0.3, 70 + i);
    EXPECT_EQ(stoq_lh_to_lc_brute_force(inst).verdict, lh_decide(inst).verdict) << "instance " << i;
  }
  EXPECT_THROW(stoq_lh_to_lc_brute_force(random_lh(3, 2, false, 0.3, 1)), InvalidArgument);
}

TEST(LhToLc, QutritChain) {
  for (int i = 0; i < 2; ++i) {
    const auto inst = random_lh(3, 3, false, i % 2 ? -0.3 : 0.3, 90 + i);
    EXPECT_EQ(lh_to_lc_brute_force(inst).verdict, lh_decide(inst).verdict) << "instance " << i;
  }
}

TEST(Modes, MembershipOnlyMatchesSeparation) {
  const auto inst = random_lh(3, 2, false, -0.3, 5);
  ReductionOptions opt;
  opt.engine.mode = OracleMode::MembershipOnly;
  EXPECT_EQ(lh_to_lc_brute_force(inst, opt).verdict, lh_to_lc_brute_force(inst).verdict);
  const auto lc = make_inconsistent_instance(SystemShape(3, 2), chain_subsets(3, 2), 0.5, 3).instance;
  EXPECT_EQ(lc_to_lh(lc, exact_lh_oracle(), opt).verdict, Verdict::No);
}
