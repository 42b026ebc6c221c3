#include <gtest/gtest.h>

#include "lclh/observables.hpp"
#include "lclh/random.hpp"

using namespace lclh;

namespace {

CMatrix pauli(char c) {
  CMatrix m = CMatrix::Zero(2, 2);
  switch (c) {
    case 'I': m(0, 0) = m(1, 1) = 1; break;
    case 'X': m(0, 1) = m(1, 0) = 1; break;
    case 'Y': m(0, 1) = cplx(0, -1); m(1, 0) = cplx(0, 1); break;
    case 'Z': m(0, 0) = 1; m(1, 1) = -1; break;
  }
  return m;
}

CMatrix pauli_word(const std::string& w) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (char c : w) out = kron(out, pauli(c));
  return out;
}

}  // namespace

TEST(Generators, QubitCodesAreXYZ) {
  EXPECT_EQ(generator_count(2), 3);
  EXPECT_LT((site_matrix(2, 1) - pauli('X')).norm(), 1e-15);
  EXPECT_LT((site_matrix(2, 2) - pauli('Y')).norm(), 1e-15);
  EXPECT_LT((site_matrix(2, 3) - pauli('Z')).norm(), 1e-15);
  EXPECT_LT((site_matrix(2, 0) - pauli('I')).norm(), 1e-15);
}

TEST(Generators, QutritOrderingAndRoundTrip) {
  // X01 X02 X12 Y01 Y02 Y12 Z0 Z1
  const std::vector<std::string> names = {"X01", "X02", "X12", "Y01", "Y02", "Y12", "Z0", "Z1"};
  for (int c = 1; c <= 8; ++c) {
    const auto g = QuditGenerator::from_code(3, c);
    EXPECT_EQ(g.name(), names[static_cast<std::size_t>(c - 1)]);
    EXPECT_EQ(g.code(), c);
  }
  EXPECT_THROW(QuditGenerator::from_code(3, 9), InvalidArgument);
  // Z1 on a qutrit: diag(1/2, 1/2, -1).
  const CMatrix z1 = site_matrix(3, 8);
  EXPECT_NEAR(z1(0, 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(z1(1, 1).real(), 0.5, 1e-15);
  EXPECT_NEAR(z1(2, 2).real(), -1.0, 1e-15);
  for (int c = 1; c <= 8; ++c) EXPECT_NEAR(std::abs(site_matrix(3, c).trace()), 0.0, 1e-15);
}

TEST(Generators, QuditTraceTable) {
  for (int d = 2; d <= 5; ++d) {
    const RMatrix t = orthogonality_table(d);
    for (int a = 0; a < d * d; ++a) {
      for (int b = 0; b < d * d; ++b) {
        double expect = 0.0;
        if (a == b) {
          if (a == 0) {
            expect = d;
          } else {
            const auto g = QuditGenerator::from_code(d, a);
            expect = g.kind == QuditGenerator::Kind::Z ? 1.0 + 1.0 / (g.i + 1) : 2.0;
          }
        }
        EXPECT_NEAR(t(a, b), expect, 1e-12) << "d=" << d << " a=" << a << " b=" << b;
      }
    }
  }
}

TEST(PauliStrings, MatricesMatchExplicitKroneckers) {
  for (const std::string w : {"XI", "IZ", "YY", "XYZ", "ZIX", "IIY"}) {
    const auto p = pauli_from_string(w);
    EXPECT_EQ(p.to_string(), w);
    std::vector<int> all;
    for (int i = 0; i < static_cast<int>(w.size()); ++i) all.push_back(i);
    EXPECT_LT((p.matrix_on(Subset(all)) - pauli_word(w)).norm(), 1e-14) << w;
  }
  EXPECT_THROW(pauli_from_string("XQ"), InvalidArgument);
  const auto p = pauli_from_string("IYZY");
  EXPECT_EQ(p.support(), (Subset{1, 2, 3}));
  EXPECT_EQ(p.y_count(), 2);
  const auto e = make_element(p);
  EXPECT_LT((e.local - pauli_word("YZY")).norm(), 1e-14);
  EXPECT_NEAR(e.tr_sq, 8.0, 1e-12);
  EXPECT_LT((e.restricted(Subset{0, 1, 2, 3}, 2) - pauli_word("IYZY")).norm(), 1e-14);
  EXPECT_NEAR(e.tr_sq_on(Subset{0, 1, 2, 3}, 2), 16.0, 1e-12);
}

TEST(PauliStrings, OrthogonalityUpToThreeQubits) {
  for (int n = 1; n <= 3; ++n) {
    const auto all = all_products(SystemShape(n, 2));
    ASSERT_EQ(all.size(), static_cast<std::size_t>(std::pow(4, n)));
    std::vector<CMatrix> m;
    for (const auto& e : all) {
      ASSERT_EQ(e.name.size(), static_cast<std::size_t>(n));
      m.push_back(pauli_word(e.name));
    }
    for (std::size_t p = 0; p < m.size(); ++p) {
      for (std::size_t q = 0; q < m.size(); ++q) {
        const cplx tr = (m[p] * m[q]).trace();
        EXPECT_NEAR(std::abs(tr - cplx(p == q ? std::pow(2.0, n) : 0.0)), 0.0, 1e-12);
      }
    }
  }
}

TEST(BasisSets, LocalPauliCountsAndOrder) {
  // Two overlapping pairs on 3 qubits: 15 + 15 - 3 shared single-site on qubit 1.
  const auto set = local_pauli_set({Subset{0, 1}, Subset{1, 2}}, 3);
  EXPECT_EQ(set.size(), 27u);
  EXPECT_EQ(set.front().name, "IXI");
  std::set<std::string> names;
  for (const auto& e : set) EXPECT_TRUE(names.insert(e.name).second) << "duplicate " << e.name;
  // Everything from the first subset precedes anything only in the second.
  bool seen_second = false;
  for (const auto& e : set) {
    const bool only_second = !e.support.is_within(Subset{0, 1});
    if (only_second) seen_second = true;
    if (seen_second) {
      EXPECT_TRUE(only_second) << e.name;
    }
  }
  EXPECT_EQ(local_pauli_set({Subset{0}}, 1).size(), 3u);
  EXPECT_EQ(local_pauli_set({Subset{0, 1}, Subset{2, 3}}, 4).size(), 30u);
}

TEST(BasisSets, RealPauliCount) {
  for (int n = 1; n <= 4; ++n) {
    const auto real = real_pauli_subset(all_products(SystemShape(n, 2)));
    EXPECT_EQ(static_cast<int>(real.size()), (static_cast<int>(std::pow(4, n)) + static_cast<int>(std::pow(2, n))) / 2);
    for (const auto& e : real) EXPECT_LT(e.local.imag().norm(), 1e-15) << e.name;
  }
}

TEST(BasisSets, MatrixElements) {
  const SystemShape shape(3, 2);
  const auto set = matrix_element_set({Subset{0, 1}, Subset{1, 2}}, shape);
  EXPECT_EQ(set.size(), 20u);  // 10 entries with s <= t per 4x4 block
  EXPECT_EQ(set[1].name, "X[00,01]@C0");
  EXPECT_NEAR(set[1].local(0, 1).real(), 0.5, 1e-15);
  EXPECT_NEAR(set[1].local(1, 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(set[1].tr_sq, 0.5, 1e-15);
  EXPECT_NEAR(set[0].tr_sq, 1.0, 1e-15);
  EXPECT_THROW(make_element(MatrixElementObservable{0, 2, 1}, Subset{0, 1}, 2), InvalidArgument);
}

TEST(Reconstruction, RecoversRandomMarginals) {
  Rng rng(21);
  for (int d : {2, 3}) {
    const SystemShape shape(3, d);
    const CMatrix sigma_m = random_density_matrix<cplx>(static_cast<Eigen::Index>(shape.dim()), 4, rng);
    const DensityMatrix sigma(shape, sigma_m);
    const std::vector<Subset> subsets = {Subset{0, 1}, Subset{1, 2}};
    const auto set = local_basis_set(subsets, shape);
    RVector alphas(static_cast<Eigen::Index>(set.size()));
    for (std::size_t i = 0; i < set.size(); ++i) alphas(static_cast<Eigen::Index>(i)) = expectation(set[i], sigma);
    for (const auto& c : subsets) {
      const CMatrix rho = reconstruct_local_state(set, alphas, c, shape);
      EXPECT_LT((rho - sigma.reduced(c)).cwiseAbs().maxCoeff(), 1e-12) << "d=" << d << " " << c.to_string();
    }
  }
}

TEST(Reconstruction, MissingKeyThrows) {
  std::map<std::string, double> alphas{{"XI", 0.1}};
  EXPECT_THROW(reconstruct_local_state(alphas, Subset{0}, SystemShape(2, 2)), InvalidArgument);
}
