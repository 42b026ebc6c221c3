#include <gtest/gtest.h>

#include "lclh/consistency.hpp"
#include "lclh/hamiltonian.hpp"

using namespace lclh;

namespace {

CMatrix basis_proj(Eigen::Index dim, Eigen::Index i) {
  CMatrix m = CMatrix::Zero(dim, dim);
  m(i, i) = 1;
  return m;
}

LocalConsistencyInstance conflict_instance() {
  LocalConsistencyInstance inst;
  inst.shape = SystemShape(3, 2);
  inst.marginals = {{Subset{0, 1}, basis_proj(4, 0)}, {Subset{1, 2}, basis_proj(4, 3)}};
  return inst;
}

bool monotone(const std::vector<double>& h) {
  for (std::size_t i = 1; i < h.size(); ++i) {
    if (h[i] > h[i - 1] + 1e-15) return false;
  }
  return true;
}

}  // namespace

TEST(Violation, TraceDistanceAndShortfall) {
  const CMatrix rho = basis_proj(2, 0);
  const CMatrix mu = CMatrix::Identity(2, 2) / 2.0;
  EXPECT_NEAR(marginal_violation(mu, rho, ConsistencyMode::Standard), 1.0, 1e-12);
  EXPECT_NEAR(marginal_violation(mu, rho, ConsistencyMode::Stoquastic), 0.5, 1e-12);
  EXPECT_NEAR(marginal_violation(rho, rho, ConsistencyMode::Standard), 0.0, 1e-12);
  // Entrywise domination: mu >= rho everywhere means no violation.
  CMatrix big = rho;
  big(1, 1) = 0.1;
  EXPECT_NEAR(marginal_violation(big, rho, ConsistencyMode::Stoquastic), 0.0, 1e-15);
}

TEST(Instance, Validation) {
  auto inst = conflict_instance();
  EXPECT_NO_THROW(inst.validate());
  inst.marginals.push_back({Subset{0, 1}, basis_proj(4, 1)});
  EXPECT_THROW(inst.validate(), InvalidArgument);  // duplicate subset
  inst = conflict_instance();
  inst.marginals[0].rho *= 2.0;
  EXPECT_THROW(inst.validate(), InvalidArgument);  // trace 2
  inst = conflict_instance();
  inst.beta = 0.2;
  EXPECT_THROW(inst.validate(), InvalidArgument);  // beta < 1/s
  inst = conflict_instance();
  inst.mode = ConsistencyMode::Stoquastic;
  CMatrix plus_i = CMatrix::Identity(4, 4) / 4.0;
  plus_i(0, 1) = cplx(0, 0.1);
  plus_i(1, 0) = cplx(0, -0.1);
  inst.marginals[0].rho = plus_i;
  EXPECT_THROW(inst.validate(), InvalidArgument);  // complex stoquastic marginal
}

TEST(FrankWolfe, ConflictIsCertifiedAtFullStrength) {
  FrankWolfeOptions opt;
  opt.record_history = true;
  const auto r = brute_force_consistency(conflict_instance(), opt);
  EXPECT_EQ(r.status, FeasibilityStatus::Infeasible);
  // Any state has site-1 marginal q with |q - |0><0||_1 + |q - |1><1||_1 >= 2.
  EXPECT_GE(r.violation_lower_bound, 1.0 - 1e-3);
  EXPECT_LE(r.violation_lower_bound, 1.0 + 1e-9);
  EXPECT_TRUE(monotone(r.history));
}

TEST(FrankWolfe, ConsistentInstancesAreFeasibleWithGoodWitness) {
  for (int n : {3, 4}) {
    const auto gen = make_consistent_instance(SystemShape(n, 2), chain_subsets(n, 2), 40 + n);
    FrankWolfeOptions opt;
    opt.record_history = true;
    const auto r = brute_force_consistency(gen.instance, opt);
    ASSERT_EQ(r.status, FeasibilityStatus::Feasible);
    EXPECT_TRUE(monotone(r.history));
    EXPECT_NO_THROW(DensityMatrix::validate_state(r.witness, "witness"));
    EXPECT_LE(violation(r.witness, gen.instance), 2.0 * 1e-4);
    // The planted state itself is an exact solution.
    EXPECT_LT(violation(gen.sigma, gen.instance), 1e-12);
  }
}

TEST(FrankWolfe, StoquasticSemantics) {
  // Real consistent instance: feasible over real states.
  const auto gen = make_consistent_instance(SystemShape(3, 2), chain_subsets(3, 2), 5, ConsistencyMode::Stoquastic,
                                            0.25);
  const auto r = brute_force_consistency(gen.instance);
  EXPECT_EQ(r.status, FeasibilityStatus::Feasible);
  EXPECT_LT(r.witness.imag().norm(), 1e-15);
  // Diagonal marginals disagreeing on the shared site: shortfall at least 1/2.
  auto inst = conflict_instance();
  inst.mode = ConsistencyMode::Stoquastic;
  inst.beta = 0.25;
  inst.s = 4;
  const auto c = brute_force_consistency(inst);
  EXPECT_EQ(c.status, FeasibilityStatus::Infeasible);
  EXPECT_GE(c.violation_lower_bound, 0.5 - 1e-3);
  EXPECT_THROW(FrankWolfe<cplx>(SystemShape(2, 2), {Subset{0, 1}}, ConsistencyMode::Stoquastic), InvalidArgument);
}

TEST(FrankWolfe, PlusStateAgainstZeroOnOneSite) {
  // rho_{01} = |++><++| against rho_{1} = |0><0|: the best compromise sits
  // strictly between, so the instance is inconsistent but far from maximal.
  LocalConsistencyInstance inst;
  inst.shape = SystemShape(2, 2);
  CMatrix pp = CMatrix::Constant(4, 4, cplx(0.25, 0));
  inst.marginals = {{Subset{0, 1}, pp}, {Subset{1}, basis_proj(2, 0)}};
  const auto r = brute_force_consistency(inst);
  EXPECT_EQ(r.status, FeasibilityStatus::Infeasible);
  EXPECT_GT(r.violation_lower_bound, 0.1);
  EXPECT_LE(r.violation_lower_bound, violation(r.witness, inst) + 1e-9);
}

TEST(FrankWolfe, WarmStartHelps) {
  const auto gen = make_consistent_instance(SystemShape(4, 2), chain_subsets(4, 2), 8);
  FrankWolfe<cplx> fw(gen.instance.shape, gen.instance.subsets(), ConsistencyMode::Standard);
  std::vector<CMatrix> targets;
  for (const auto& m : gen.instance.marginals) targets.push_back(m.rho);
  const auto cold = fw.solve(targets);
  const auto warm = fw.solve(targets);
  ASSERT_EQ(cold.status, FeasibilityStatus::Feasible);
  EXPECT_EQ(warm.status, FeasibilityStatus::Feasible);
  EXPECT_LE(warm.iterations, cold.iterations);
  fw.set_start(gen.sigma);
  EXPECT_EQ(fw.solve(targets).iterations, 0);
}

TEST(FrankWolfe, BudgetExhaustionIsUndecided) {
  const auto gen = make_consistent_instance(SystemShape(4, 2), chain_subsets(4, 2), 8);
  FrankWolfeOptions opt;
  opt.max_iters = 3;
  opt.tol = 1e-8;
  EXPECT_EQ(brute_force_consistency(gen.instance, opt).status, FeasibilityStatus::Undecided);
}

TEST(Generators, InconsistentPlantsCertifyBeta) {
  struct Case {
    std::vector<Subset> subsets;
    int n;
    ConsistencyMode mode;
    double beta;
    PlantKind expect;
  };
  const std::vector<Case> cases = {
      {chain_subsets(3, 2), 3, ConsistencyMode::Standard, 0.5, PlantKind::Overlap},
      {{Subset{0, 1}, Subset{1, 2}, Subset{0, 2}}, 3, ConsistencyMode::Standard, 0.5, PlantKind::Frustration},
      {chain_subsets(4, 2), 4, ConsistencyMode::Stoquastic, 0.25, PlantKind::Domination},
  };
  for (const auto& c : cases) {
    const auto gen = make_inconsistent_instance(SystemShape(c.n, 2), c.subsets, c.beta, 3, c.mode);
    EXPECT_EQ(gen.plant, c.expect);
    EXPECT_GE(gen.certified_violation, c.beta);
    EXPECT_NO_THROW(gen.instance.validate());
    // Re-run the oracle independently of the generator.
    const auto r = brute_force_consistency(gen.instance);
    EXPECT_EQ(r.status, FeasibilityStatus::Infeasible);
  }
  EXPECT_THROW(make_inconsistent_instance(SystemShape(3, 2), chain_subsets(3, 2), 2.5, 1), CertificateFailure);
  EXPECT_THROW(make_inconsistent_instance(SystemShape(3, 2), chain_subsets(3, 2), 0.0, 1), CertificateFailure);
}

TEST(Generators, ConsistentInstancesAreDeterministic) {
  const auto a = make_consistent_instance(SystemShape(3, 3), chain_subsets(3, 2), 12);
  const auto b = make_consistent_instance(SystemShape(3, 3), chain_subsets(3, 2), 12);
  EXPECT_EQ((a.sigma - b.sigma).norm(), 0.0);
  EXPECT_NO_THROW(a.instance.validate());
}
