#pragma once

#include <string>
#include <vector>

#include "lclh/qlinalg.hpp"
#include "lclh/random.hpp"

namespace lclh {

enum class Verdict { Yes, No, GapViolated };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "YES";
    case Verdict::No: return "NO";
    case Verdict::GapViolated: return "GAP_VIOLATED";
  }
  return "?";
}

struct LocalTerm {
  Subset subset;
  CMatrix matrix;
};

struct LocalHamiltonianInstance {
  SystemShape shape;
  std::vector<LocalTerm> terms;
  double a = 0.0;
  double b = 1.0;
  int s = 1;
  int k = 2;

  /// Throws InvalidArgument on any broken invariant.
  void validate() const {
    if (s < 1) throw InvalidArgument("LH instance: s must be >= 1");
    if (b - a < 1.0 / s - 1e-12) throw InvalidArgument("LH instance: need b - a >= 1/s");
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const auto& t = terms[i];
      const std::string where = "LH term " + std::to_string(i);
      t.subset.require_within(shape);
      if (static_cast<int>(t.subset.size()) > k) throw InvalidArgument(where + ": subset larger than k");
      detail::require_square_dim(t.matrix, detail::ipow(static_cast<std::size_t>(shape.d()), t.subset.size()),
                                 where.c_str());
      detail::require_hermitian(t.matrix, where.c_str());
      if (t.matrix.size() > 0 && operator_norm(t.matrix) > 1.0 + tol::term_norm) {
        throw InvalidArgument(where + ": operator norm exceeds 1");
      }
    }
  }
};

inline CMatrix assemble(const LocalHamiltonianInstance& inst, std::size_t cap = kDefaultDimensionCap) {
  inst.shape.require_within_cap(cap);
  const auto dim = static_cast<Eigen::Index>(inst.shape.dim());
  CMatrix h = CMatrix::Zero(dim, dim);
  for (const auto& t : inst.terms) {
    t.subset.require_within(inst.shape);
    SiteIndexer(inst.shape, t.subset).add_embedded(t.matrix, h);
  }
  return h;
}

struct LhDecision {
  Verdict verdict = Verdict::GapViolated;
  double lambda_min = 0.0;
};

inline Verdict classify_energy(double lambda_min, double a, double b) {
  if (lambda_min <= a + 1e-9) return Verdict::Yes;
  if (lambda_min >= b - 1e-9) return Verdict::No;
  return Verdict::GapViolated;
}

/// Exact decision by dense diagonalization.
inline LhDecision lh_decide(const LocalHamiltonianInstance& inst, std::size_t cap = kDefaultDimensionCap) {
  const CMatrix h = assemble(inst, cap);
  LhDecision out;
  out.lambda_min = min_eigenvalue(h);
  out.verdict = classify_energy(out.lambda_min, inst.a, inst.b);
  return out;
}

struct StoquasticViolation {
  std::size_t term = 0;
  Eigen::Index row = 0;
  Eigen::Index col = 0;
  cplx value;
};

struct StoquasticReport {
  bool stoquastic = true;
  std::vector<StoquasticViolation> offending;
};

template <typename Derived>
void collect_stoquastic_violations(const Eigen::MatrixBase<Derived>& m, std::size_t term, StoquasticReport& report) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (r == c) continue;
      const cplx v = m(r, c);
      if (v.real() > 1e-12 || std::abs(v.imag()) > 1e-12) {
        report.stoquastic = false;
        report.offending.push_back({term, r, c, v});
      }
    }
  }
}

inline StoquasticReport is_stoquastic(const LocalHamiltonianInstance& inst) {
  StoquasticReport report;
  for (std::size_t i = 0; i < inst.terms.size(); ++i) collect_stoquastic_violations(inst.terms[i].matrix, i, report);
  return report;
}

inline bool matrix_is_stoquastic(const CMatrix& m) {
  StoquasticReport report;
  collect_stoquastic_violations(m, 0, report);
  return report.stoquastic;
}

struct ShiftedTerm {
  LocalTerm term;
  double shift = 0.0;
};

/// H_i - lambda I with lambda the largest diagonal entry, so every entry is <= 0.
inline ShiftedTerm shift_nonpositive(const LocalTerm& term) {
  StoquasticReport report;
  collect_stoquastic_violations(term.matrix, 0, report);
  if (!report.stoquastic) throw InvalidArgument("shift_nonpositive: term is not stoquastic");
  ShiftedTerm out;
  out.shift = term.matrix.diagonal().real().maxCoeff();
  out.term.subset = term.subset;
  out.term.matrix = term.matrix;
  out.term.matrix.diagonal().array() -= out.shift;
  // Remove the numerically-zero imaginary parts the stoquastic check tolerated.
  out.term.matrix = out.term.matrix.real().cast<cplx>();
  return out;
}

struct PerronCheck {
  bool nonnegative = false;
  bool degenerate = false;
  double lambda_min = 0.0;
  double most_negative = 0.0;  // smallest amplitude (or projector entry) found
};

/// Ground-state sign structure of a stoquastic instance.
inline PerronCheck ground_state_nonneg_check(const LocalHamiltonianInstance& inst,
                                             std::size_t cap = kDefaultDimensionCap) {
  if (!is_stoquastic(inst).stoquastic) throw InvalidArgument("ground_state_nonneg_check: instance is not stoquastic");
  const CMatrix h = assemble(inst, cap);
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
  if (solver.info() != Eigen::Success) throw ConvergenceError("ground_state_nonneg_check: eigensolver failed");
  const RVector& evals = solver.eigenvalues();
  PerronCheck out;
  out.lambda_min = evals(0);
  Eigen::Index mult = 1;
  while (mult < evals.size() && evals(mult) - evals(0) <= 1e-6) ++mult;
  out.degenerate = mult > 1;
  if (out.degenerate) {
    const CMatrix v = solver.eigenvectors().leftCols(mult);
    const CMatrix proj = v * v.adjoint();
    out.most_negative = proj.real().minCoeff();
    const double imag = proj.imag().cwiseAbs().maxCoeff();
    out.nonnegative = out.most_negative >= -1e-8 && imag <= 1e-8;
    return out;
  }
  CVector g = solver.eigenvectors().col(0);
  Eigen::Index big = 0;
  g.cwiseAbs().maxCoeff(&big);
  g *= std::conj(g(big)) / std::abs(g(big));
  out.most_negative = g.real().minCoeff();
  out.nonnegative = out.most_negative >= -1e-8 && g.imag().cwiseAbs().maxCoeff() <= 1e-8;
  return out;
}

// ---------------------------------------------------------------------------
// Interaction graphs and random instances.

inline std::vector<Subset> chain_subsets(int n, int k = 2) {
  if (k < 1 || k > n) throw InvalidArgument("chain_subsets: need 1 <= k <= n");
  std::vector<Subset> out;
  for (int start = 0; start + k <= n; ++start) {
    std::vector<int> sites;
    for (int i = 0; i < k; ++i) sites.push_back(start + i);
    out.emplace_back(std::move(sites));
  }
  return out;
}

/// `m` distinct random k-subsets of n sites (m is clamped to what exists).
inline std::vector<Subset> random_subsets(int n, int k, int m, Rng& rng) {
  if (k < 1 || k > n) throw InvalidArgument("random_subsets: need 1 <= k <= n");
  std::vector<Subset> out;
  std::vector<int> sites(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) sites[static_cast<std::size_t>(i)] = i;
  int attempts = 0;
  while (static_cast<int>(out.size()) < m && attempts++ < 100 * m + 100) {
    std::shuffle(sites.begin(), sites.end(), rng);
    Subset c = Subset::normalized(std::vector<int>(sites.begin(), sites.begin() + k));
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(std::move(c));
  }
  return out;
}

/// Random norm-`norm` Hermitian term on each subset.
inline std::vector<LocalTerm> random_terms(const SystemShape& shape, const std::vector<Subset>& subsets, Rng& rng,
                                           double norm = 1.0) {
  std::vector<LocalTerm> out;
  for (const auto& c : subsets) {
    const auto dim = static_cast<Eigen::Index>(detail::ipow(static_cast<std::size_t>(shape.d()), c.size()));
    out.push_back({c, random_hermitian<cplx>(dim, rng, norm)});
  }
  return out;
}

/// Random real symmetric term with nonpositive off-diagonal entries, norm `norm`.
inline CMatrix random_stoquastic_matrix(Eigen::Index dim, Rng& rng, double norm = 1.0) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::bernoulli_distribution sparse(0.6);
  RMatrix m = RMatrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    m(i, i) = unif(rng);
    for (Eigen::Index j = i + 1; j < dim; ++j) {
      if (sparse(rng)) m(i, j) = m(j, i) = -std::abs(unif(rng));
    }
  }
  Eigen::SelfAdjointEigenSolver<RMatrix> es(m, Eigen::EigenvaluesOnly);
  const double op = es.eigenvalues().cwiseAbs().maxCoeff();
  if (op > 0) m *= norm / op;
  return m.cast<cplx>();
}

inline std::vector<LocalTerm> random_stoquastic_terms(const SystemShape& shape, const std::vector<Subset>& subsets,
                                                      Rng& rng, double norm = 1.0) {
  std::vector<LocalTerm> out;
  for (const auto& c : subsets) {
    const auto dim = static_cast<Eigen::Index>(detail::ipow(static_cast<std::size_t>(shape.d()), c.size()));
    out.push_back({c, random_stoquastic_matrix(dim, rng, norm)});
  }
  return out;
}

/// Centers [a, b] at lambda_min + offset with b - a = gap. With |offset| > gap/2,
/// offset > 0 gives a YES instance and offset < 0 a NO instance.
inline void place_thresholds(LocalHamiltonianInstance& inst, double lambda_min, double offset, double gap) {
  const double mid = lambda_min + offset;
  inst.a = mid - gap / 2;
  inst.b = mid + gap / 2;
  inst.s = std::max(1, static_cast<int>(std::ceil(1.0 / gap - 1e-12)));
}

}  // namespace lclh
