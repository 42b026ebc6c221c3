#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "lclh/qlinalg.hpp"
#include "lclh/random.hpp"

namespace lclh {

enum class ConsistencyMode { Standard, Stoquastic };

struct LocalMarginal {
  Subset subset;
  CMatrix rho;
};

struct LocalConsistencyInstance {
  SystemShape shape;
  std::vector<LocalMarginal> marginals;
  double beta = 0.5;
  int s = 2;
  int k = 2;
  ConsistencyMode mode = ConsistencyMode::Standard;

  std::vector<Subset> subsets() const {
    std::vector<Subset> out;
    for (const auto& m : marginals) out.push_back(m.subset);
    return out;
  }

  void validate() const {
    if (s < 1) throw InvalidArgument("LC instance: s must be >= 1");
    if (beta < 1.0 / s - 1e-12) throw InvalidArgument("LC instance: need beta >= 1/s");
    for (std::size_t i = 0; i < marginals.size(); ++i) {
      const auto& m = marginals[i];
      const std::string where = "LC marginal " + std::to_string(i);
      m.subset.require_within(shape);
      if (static_cast<int>(m.subset.size()) > k) throw InvalidArgument(where + ": subset larger than k");
      for (std::size_t j = 0; j < i; ++j) {
        if (marginals[j].subset == m.subset) throw InvalidArgument(where + ": duplicate subset " + m.subset.to_string());
      }
      detail::require_square_dim(m.rho, detail::ipow(static_cast<std::size_t>(shape.d()), m.subset.size()),
                                 where.c_str());
      DensityMatrix::validate_state(m.rho, where);
      if (mode == ConsistencyMode::Stoquastic && m.rho.imag().cwiseAbs().maxCoeff() > tol::realness) {
        throw InvalidArgument(where + ": stoquastic marginals must be real");
      }
    }
  }
};

namespace detail {

template <typename Scalar>
Mat<Scalar> cast_marginal(const CMatrix& m) {
  if constexpr (std::is_same_v<Scalar, double>) return m.real();
  else return m;
}

}  // namespace detail

/// Violation of marginal i by the local matrix mu (same frame as rho).
template <typename DerivedA, typename DerivedB>
double marginal_violation(const Eigen::MatrixBase<DerivedA>& mu, const Eigen::MatrixBase<DerivedB>& rho,
                          ConsistencyMode mode) {
  if (mode == ConsistencyMode::Standard) {
    using S = typename DerivedA::Scalar;
    const Mat<S> diff = mu - rho.template cast<S>();
    return hermitian_eigenvalues(0.5 * (diff + diff.adjoint())).cwiseAbs().sum();
  }
  double worst = 0.0;
  for (Eigen::Index r = 0; r < mu.rows(); ++r) {
    for (Eigen::Index c = 0; c < mu.cols(); ++c) {
      worst = std::max(worst, detail::real_part(rho(r, c)) - detail::real_part(mu(r, c)));
    }
  }
  return worst;
}

/// Max over marginals of the trace distance (standard) or of the largest
/// entrywise shortfall (stoquastic).
template <typename Derived>
double violation(const Eigen::MatrixBase<Derived>& sigma, const LocalConsistencyInstance& inst) {
  detail::require_square_dim(sigma, inst.shape.dim(), "violation");
  double worst = 0.0;
  for (const auto& m : inst.marginals) {
    const auto mu = partial_trace(sigma, m.subset, inst.shape);
    worst = std::max(worst, marginal_violation(mu, m.rho, inst.mode));
  }
  return worst;
}

enum class FeasibilityStatus { Feasible, Infeasible, Undecided };

inline const char* to_string(FeasibilityStatus s) {
  switch (s) {
    case FeasibilityStatus::Feasible: return "FEASIBLE";
    case FeasibilityStatus::Infeasible: return "INFEASIBLE";
    case FeasibilityStatus::Undecided: return "UNDECIDED";
  }
  return "?";
}

struct FrankWolfeOptions {
  int max_iters = 20000;
  double tol = 1e-4;
  /// INFEASIBLE requires phi - gap > margin; negative means tol^2.
  double infeasible_margin = -1.0;
  bool record_history = false;
  /// Compute the dual-witness violation bound when not FEASIBLE.
  bool certify = true;
};

template <typename Scalar>
struct FrankWolfeResult {
  FeasibilityStatus status = FeasibilityStatus::Undecided;
  Mat<Scalar> witness;
  double phi = 0.0;
  double gap = 0.0;
  double phi_lower = 0.0;  // certified lower bound on the minimum of phi
  int iterations = 0;
  /// Certified lower bound on min over states of the instance's violation.
  double violation_lower_bound = 0.0;
  std::vector<double> history;
  /// d phi / d rho_i at the final iterate, in each marginal's frame.
  std::vector<Mat<Scalar>> target_gradients;
};

/// Conditional-gradient minimization of the marginal mismatch over the
/// spectrahedron. Scalar = cplx for standard semantics, double for the
/// stoquastic (real-state, entrywise-domination) semantics. The object keeps
/// its last iterate so repeated solves on nearby targets warm-start.
template <typename Scalar>
class FrankWolfe {
 public:
  FrankWolfe(SystemShape shape, std::vector<Subset> subsets, ConsistencyMode mode,
             std::size_t cap = kDefaultDimensionCap)
      : shape_(shape), subsets_(std::move(subsets)), mode_(mode) {
    shape_.require_within_cap(cap);
    for (const auto& c : subsets_) indexers_.emplace_back(shape_, c);
    if (mode_ == ConsistencyMode::Stoquastic && !std::is_same_v<Scalar, double>) {
      throw InvalidArgument("FrankWolfe: stoquastic mode runs over real states");
    }
  }

  const SystemShape& shape() const { return shape_; }
  const std::vector<Subset>& subsets() const { return subsets_; }

  void reset() { sigma_.resize(0, 0); }
  void set_start(const Mat<Scalar>& sigma) { sigma_ = sigma; }

  FrankWolfeResult<Scalar> solve(const std::vector<Mat<Scalar>>& targets, const FrankWolfeOptions& opt = {}) {
    if (targets.size() != subsets_.size()) throw InvalidArgument("FrankWolfe: one target per subset required");
    const auto dim = static_cast<Eigen::Index>(shape_.dim());
    const std::size_t m = subsets_.size();
    for (std::size_t i = 0; i < m; ++i) {
      detail::require_square_dim(targets[i], indexers_[i].local_dim(), "FrankWolfe target");
    }
    const double tol_sq = opt.tol * opt.tol;
    const double margin = opt.infeasible_margin < 0 ? tol_sq : opt.infeasible_margin;

    if (sigma_.rows() != dim) sigma_ = Mat<Scalar>::Identity(dim, dim) / static_cast<double>(dim);
    std::vector<Mat<Scalar>> mu(m);
    for (std::size_t i = 0; i < m; ++i) mu[i] = indexers_[i].partial_trace(sigma_);

    FrankWolfeResult<Scalar> res;
    std::vector<Mat<Scalar>> grad(m), nu(m), dir(m);
    Mat<Scalar> g_full(dim, dim);
    double phi = objective(mu, targets, grad);
    int it = 0;
    double gap = 0.0;
    for (;; ++it) {
      if (opt.record_history) res.history.push_back(phi);
      if (phi <= tol_sq) {
        res.status = FeasibilityStatus::Feasible;
        gap = 0.0;
        break;
      }
      g_full.setZero();
      for (std::size_t i = 0; i < m; ++i) indexers_[i].add_embedded(grad[i], g_full);
      Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(g_full);
      if (es.info() != Eigen::Success) throw ConvergenceError("FrankWolfe: eigensolver failed");
      const Vec<Scalar> v = es.eigenvectors().col(0);
      // gap = <G, sigma> - lambda_min(G) >= phi - min phi
      gap = std::max(0.0, detail::inner(g_full, sigma_) - es.eigenvalues()(0));
      if (phi - gap > margin) {
        res.status = FeasibilityStatus::Infeasible;
        break;
      }
      if (it >= opt.max_iters) {
        res.status = FeasibilityStatus::Undecided;
        break;
      }
      for (std::size_t i = 0; i < m; ++i) {
        nu[i] = indexers_[i].partial_trace_pure(v);
        dir[i] = nu[i] - mu[i];
      }
      const double step = line_search(mu, dir, targets);
      if (step <= 0.0) {
        // Rounding has eaten the descent; the gap still bounds phi*.
        res.status = FeasibilityStatus::Undecided;
        break;
      }
      sigma_ *= (1.0 - step);
      sigma_.noalias() += step * (v * v.adjoint());
      for (std::size_t i = 0; i < m; ++i) mu[i] += step * dir[i];
      phi = objective(mu, targets, grad);
    }
    res.iterations = it;
    res.phi = phi;
    res.gap = gap;
    res.phi_lower = std::max(0.0, phi - gap);
    res.witness = sigma_;
    res.target_gradients.resize(m);
    for (std::size_t i = 0; i < m; ++i) res.target_gradients[i] = -grad[i];
    if (opt.certify && res.status != FeasibilityStatus::Feasible) {
      res.violation_lower_bound = certified_bound(mu, targets, res.phi_lower);
    }
    return res;
  }

  /// Certified lower bound on min_sigma max_i violation_i, given current
  /// marginals mu and a lower bound on min phi.
  double certified_bound(const std::vector<Mat<Scalar>>& mu, const std::vector<Mat<Scalar>>& targets,
                         double phi_lower) const {
    std::size_t entries = 0;
    for (const auto& t : targets) entries += static_cast<std::size_t>(t.size());
    double best = 0.0;
    if (mode_ == ConsistencyMode::Standard) {
      best = std::sqrt(std::max(0.0, phi_lower) / static_cast<double>(std::max<std::size_t>(1, targets.size())));
      best = std::max(best, trace_norm_dual_bound(mu, targets));
    } else {
      best = std::sqrt(std::max(0.0, phi_lower) / static_cast<double>(std::max<std::size_t>(1, entries)));
      if constexpr (std::is_same_v<Scalar, double>) best = std::max(best, domination_dual_bound(mu, targets));
    }
    return best;
  }

 private:
  double objective(const std::vector<Mat<Scalar>>& mu, const std::vector<Mat<Scalar>>& targets,
                   std::vector<Mat<Scalar>>& grad) const {
    double phi = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      if (mode_ == ConsistencyMode::Standard) {
        const Mat<Scalar> delta = mu[i] - targets[i];
        phi += delta.squaredNorm();
        grad[i] = 2.0 * delta;
      } else if constexpr (std::is_same_v<Scalar, double>) {
        const Mat<Scalar> shortfall = (targets[i] - mu[i]).cwiseMax(0.0);
        phi += shortfall.squaredNorm();
        grad[i] = -2.0 * shortfall;
      }
    }
    return phi;
  }

  double line_search(const std::vector<Mat<Scalar>>& mu, const std::vector<Mat<Scalar>>& dir,
                     const std::vector<Mat<Scalar>>& targets) const {
    if (mode_ == ConsistencyMode::Standard) {
      double num = 0.0;
      double den = 0.0;
      for (std::size_t i = 0; i < mu.size(); ++i) {
        num -= detail::inner(mu[i] - targets[i], dir[i]);
        den += dir[i].squaredNorm();
      }
      if (den <= 0.0 || num <= 0.0) return 0.0;
      return std::min(1.0, num / den);
    }
    if constexpr (std::is_same_v<Scalar, double>) {
      // h(g) = sum max(0, r - g e)^2 is convex piecewise quadratic; bisect h'.
      auto slope = [&](double g) {
        double out = 0.0;
        for (std::size_t i = 0; i < mu.size(); ++i) {
          const Mat<Scalar> r = targets[i] - mu[i];
          out += -2.0 * (dir[i].array() * (r - g * dir[i]).array().cwiseMax(0.0)).sum();
        }
        return out;
      };
      if (slope(0.0) >= 0.0) return 0.0;
      if (slope(1.0) <= 0.0) return 1.0;
      double lo = 0.0;
      double hi = 1.0;
      for (int k = 0; k < 60; ++k) {
        const double mid = 0.5 * (lo + hi);
        (slope(mid) < 0.0 ? lo : hi) = mid;
      }
      return lo;
    } else {
      return 0.0;
    }
  }

  // For unit-norm W_i and weights lambda in the simplex:
  //   max_i ||mu_i - rho_i||_1 >= lambda_min(sum lambda_i W_i (x) I) - sum lambda_i Tr(W_i rho_i)
  // for every state. W_i is the sign of the current residual.
  double trace_norm_dual_bound(const std::vector<Mat<Scalar>>& mu, const std::vector<Mat<Scalar>>& targets) const {
    const std::size_t m = mu.size();
    if (m == 0) return 0.0;
    std::vector<Mat<Scalar>> w(m);
    std::vector<double> offsets(m);
    RVector l1(m);
    for (std::size_t i = 0; i < m; ++i) {
      Mat<Scalar> delta = mu[i] - targets[i];
      delta = 0.5 * (delta + delta.adjoint()).eval();
      Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(delta);
      Vec<Scalar> signs = es.eigenvalues().unaryExpr([](double x) { return x >= 0 ? 1.0 : -1.0; }).template cast<Scalar>();
      w[i] = es.eigenvectors() * signs.asDiagonal() * es.eigenvectors().adjoint();
      offsets[i] = detail::inner(w[i], targets[i]);
      l1(static_cast<Eigen::Index>(i)) = es.eigenvalues().cwiseAbs().sum();
    }
    const auto dim = static_cast<Eigen::Index>(shape_.dim());
    auto evaluate = [&](const RVector& lambda, Vec<Scalar>* argmin) {
      Mat<Scalar> acc = Mat<Scalar>::Zero(dim, dim);
      double off = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double li = lambda(static_cast<Eigen::Index>(i));
        if (li == 0.0) continue;
        indexers_[i].add_embedded(li * w[i], acc);
        off += li * offsets[i];
      }
      Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(acc);
      if (argmin) *argmin = es.eigenvectors().col(0);
      return es.eigenvalues()(0) - off;
    };
    double best = 0.0;
    std::vector<RVector> candidates;
    candidates.push_back(RVector::Constant(static_cast<Eigen::Index>(m), 1.0 / static_cast<double>(m)));
    if (l1.sum() > 0) candidates.push_back(l1 / l1.sum());
    for (std::size_t i = 0; i < m; ++i) candidates.push_back(RVector::Unit(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(i)));
    RVector start = candidates.front();
    double start_val = -1e300;
    for (const auto& lam : candidates) {
      const double val = evaluate(lam, nullptr);
      if (val > start_val) {
        start_val = val;
        start = lam;
      }
    }
    best = std::max(best, start_val);
    // Exponentiated supergradient ascent on the concave bound.
    RVector lambda = (start.array() + 1e-3).matrix();
    lambda /= lambda.sum();
    double step = 1.0;
    for (int iter = 0; iter < 60; ++iter) {
      Vec<Scalar> u;
      const double val = evaluate(lambda, &u);
      best = std::max(best, val);
      RVector sup(static_cast<Eigen::Index>(m));
      for (std::size_t i = 0; i < m; ++i) {
        const Mat<Scalar> reduced = indexers_[i].partial_trace_pure(u);
        sup(static_cast<Eigen::Index>(i)) = detail::inner(w[i], reduced) - offsets[i];
      }
      lambda = (lambda.array() * (step * sup.array()).exp()).matrix();
      lambda /= lambda.sum();
      step *= 0.95;
    }
    return best;
  }

  // With lambda >= 0 over entries (s <= t) summing to 1 and X_st symmetric:
  //   max shortfall >= sum lambda rho_st - lambda_max(sum lambda X_st (x) I).
  double domination_dual_bound(const std::vector<Mat<Scalar>>& mu, const std::vector<Mat<Scalar>>& targets) const {
    const std::size_t m = mu.size();
    const auto dim = static_cast<Eigen::Index>(shape_.dim());
    auto evaluate = [&](const std::vector<Mat<Scalar>>& weights) {
      Mat<Scalar> acc = Mat<Scalar>::Zero(dim, dim);
      double total = 0.0;
      double gain = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        // weights[i] is upper-triangular incl. diagonal; X_st weight symmetric.
        Mat<Scalar> sym = 0.5 * (weights[i] + weights[i].transpose());
        sym.diagonal() = weights[i].diagonal();
        total += weights[i].sum();
        gain += detail::inner(sym, targets[i]);
        indexers_[i].add_embedded(sym, acc);
      }
      if (total <= 0) return 0.0;
      Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(acc, Eigen::EigenvaluesOnly);
      return (gain - es.eigenvalues()(dim - 1)) / total;
    };
    std::vector<Mat<Scalar>> weights(m);
    double best = 0.0;
    for (int power = 1; power <= 3; ++power) {
      for (std::size_t i = 0; i < m; ++i) {
        Mat<Scalar> r = (targets[i] - mu[i]).cwiseMax(0.0);
        r = r.template triangularView<Eigen::Upper>();
        weights[i] = r.array().pow(power).matrix();
      }
      best = std::max(best, evaluate(weights));
    }
    return best;
  }

  SystemShape shape_;
  std::vector<Subset> subsets_;
  ConsistencyMode mode_;
  std::vector<SiteIndexer> indexers_;
  Mat<Scalar> sigma_;
};

/// Result of the brute-force oracle, independent of the scalar type used.
struct ConsistencyResult {
  FeasibilityStatus status = FeasibilityStatus::Undecided;
  CMatrix witness;
  double phi = 0.0;
  double phi_lower = 0.0;
  double violation_lower_bound = 0.0;
  int iterations = 0;
  std::vector<double> history;
};

inline ConsistencyResult brute_force_consistency(const LocalConsistencyInstance& inst,
                                                 const FrankWolfeOptions& opt = {},
                                                 std::size_t cap = kDefaultDimensionCap) {
  auto run = [&](auto tag) {
    using Scalar = decltype(tag);
    FrankWolfe<Scalar> fw(inst.shape, inst.subsets(), inst.mode, cap);
    std::vector<Mat<Scalar>> targets;
    for (const auto& m : inst.marginals) targets.push_back(detail::cast_marginal<Scalar>(m.rho));
    auto r = fw.solve(targets, opt);
    ConsistencyResult out;
    out.status = r.status;
    out.witness = r.witness.template cast<cplx>();
    out.phi = r.phi;
    out.phi_lower = r.phi_lower;
    out.violation_lower_bound = r.violation_lower_bound;
    out.iterations = r.iterations;
    out.history = std::move(r.history);
    return out;
  };
  if (inst.mode == ConsistencyMode::Stoquastic) return run(double{});
  return run(cplx{});
}

// ---------------------------------------------------------------------------
// Instance generators.

struct GeneratedConsistent {
  LocalConsistencyInstance instance;
  CMatrix sigma;
};

inline GeneratedConsistent make_consistent_instance(const SystemShape& shape, const std::vector<Subset>& subsets,
                                                    std::uint64_t seed,
                                                    ConsistencyMode mode = ConsistencyMode::Standard,
                                                    double beta = 0.5, int rank = 4) {
  shape.require_within_cap();
  Rng rng(seed);
  const auto dim = static_cast<Eigen::Index>(shape.dim());
  const int r = std::max(1, std::min(rank, static_cast<int>(dim)));
  GeneratedConsistent out;
  out.sigma = mode == ConsistencyMode::Stoquastic ? random_density_matrix<double>(dim, r, rng).cast<cplx>().eval()
                                                  : random_density_matrix<cplx>(dim, r, rng);
  auto& inst = out.instance;
  inst.shape = shape;
  inst.mode = mode;
  inst.beta = beta;
  inst.s = std::max(1, static_cast<int>(std::ceil(1.0 / beta - 1e-12)));
  inst.k = 1;
  for (const auto& c : subsets) {
    inst.k = std::max(inst.k, static_cast<int>(c.size()));
    CMatrix rho = partial_trace(out.sigma, c, shape);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    inst.marginals.push_back({c, rho});
  }
  return out;
}

enum class PlantKind { Auto, Overlap, Frustration, Domination };

struct InconsistentOptions {
  PlantKind plant = PlantKind::Auto;
  int retries = 8;
  FrankWolfeOptions certify{4000, 1e-4, 0.0, false, true};
};

struct GeneratedInconsistent {
  LocalConsistencyInstance instance;
  double certified_violation = 0.0;
  PlantKind plant = PlantKind::Auto;
};

namespace detail {

inline CMatrix basis_projector(Eigen::Index dim, Eigen::Index index) {
  CMatrix p = CMatrix::Zero(dim, dim);
  p(index, index) = 1.0;
  return p;
}

// Sites shared by the first overlapping pair of subsets, if any.
inline std::optional<std::pair<std::size_t, std::size_t>> first_overlap(const std::vector<Subset>& subsets) {
  for (std::size_t a = 0; a < subsets.size(); ++a) {
    for (std::size_t b = a + 1; b < subsets.size(); ++b) {
      if (subsets[a].intersects(subsets[b])) return std::make_pair(a, b);
    }
  }
  return std::nullopt;
}

// Three pairwise-overlapping 2-site subsets {i,j},{j,l},{i,l}.
inline std::optional<std::array<std::size_t, 3>> find_triangle(const std::vector<Subset>& subsets) {
  for (std::size_t a = 0; a < subsets.size(); ++a) {
    if (subsets[a].size() != 2) continue;
    for (std::size_t b = a + 1; b < subsets.size(); ++b) {
      if (subsets[b].size() != 2) continue;
      for (std::size_t c = b + 1; c < subsets.size(); ++c) {
        if (subsets[c].size() != 2) continue;
        std::vector<int> all;
        for (auto idx : {a, b, c}) all.insert(all.end(), subsets[idx].sites().begin(), subsets[idx].sites().end());
        std::sort(all.begin(), all.end());
        if (all.size() == 6 && all[0] == all[1] && all[2] == all[3] && all[4] == all[5] && all[1] != all[2] &&
            all[3] != all[4]) {
          return std::array<std::size_t, 3>{a, b, c};
        }
      }
    }
  }
  return std::nullopt;
}

// State on subset c: |bit> on `site`, tau on the remaining sites of c.
inline CMatrix pinned_state(const Subset& c, int site, int value, const CMatrix& tau, int d) {
  const auto d_i = static_cast<Eigen::Index>(d);
  const CMatrix pin = basis_projector(d_i, value);
  // tau lives on c \ {site} in site order; build pin (x) tau then permute.
  std::vector<int> rest;
  for (int s : c.sites()) if (s != site) rest.push_back(s);
  SystemShape local(static_cast<int>(c.size()), d);
  const int pos = c.position(site);
  CMatrix out = embed(pin, Subset{pos}, local);
  if (!rest.empty()) {
    std::vector<int> rest_pos;
    for (int s : rest) rest_pos.push_back(c.position(s));
    out = out * embed(tau, Subset(rest_pos), local);
  }
  return out;
}

}  // namespace detail

/// Plants a contradiction among the marginals and certifies its size with the
/// brute-force oracle. Throws CertificateFailure if beta cannot be certified.
inline GeneratedInconsistent make_inconsistent_instance(const SystemShape& shape, const std::vector<Subset>& subsets,
                                                        double beta, std::uint64_t seed,
                                                        ConsistencyMode mode = ConsistencyMode::Standard,
                                                        const InconsistentOptions& opt = {}) {
  shape.require_within_cap();
  const double ceiling = mode == ConsistencyMode::Standard ? 2.0 : 1.0;
  if (!(beta > 0.0) || beta > ceiling) {
    throw CertificateFailure("make_inconsistent_instance: beta " + std::to_string(beta) + " is not achievable");
  }
  PlantKind plant = opt.plant;
  const auto triangle = detail::find_triangle(subsets);
  const auto overlap = detail::first_overlap(subsets);
  if (plant == PlantKind::Auto) {
    if (mode == ConsistencyMode::Stoquastic) plant = PlantKind::Domination;
    else plant = (triangle && shape.d() == 2) ? PlantKind::Frustration : PlantKind::Overlap;
  }
  if (plant == PlantKind::Frustration && (!triangle || shape.d() != 2 || mode != ConsistencyMode::Standard)) {
    throw InvalidArgument("make_inconsistent_instance: frustration plant needs a qubit triangle of pair subsets");
  }
  if ((plant == PlantKind::Overlap || plant == PlantKind::Domination) && !overlap) {
    throw InvalidArgument("make_inconsistent_instance: no overlapping subsets to plant a conflict on");
  }
  if (plant == PlantKind::Domination && mode != ConsistencyMode::Stoquastic) {
    throw InvalidArgument("make_inconsistent_instance: domination plant is stoquastic-only");
  }

  const int d = shape.d();
  for (int attempt = 0; attempt <= opt.retries; ++attempt) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    const bool real = mode == ConsistencyMode::Stoquastic;
    const auto dim = static_cast<Eigen::Index>(shape.dim());
    const CMatrix background = real ? random_density_matrix<double>(dim, 3, rng).cast<cplx>().eval()
                                    : random_density_matrix<cplx>(dim, 3, rng);
    LocalConsistencyInstance inst;
    inst.shape = shape;
    inst.mode = mode;
    inst.beta = beta;
    inst.s = std::max(1, static_cast<int>(std::ceil(1.0 / beta - 1e-12)));
    inst.k = 1;
    for (const auto& c : subsets) {
      inst.k = std::max(inst.k, static_cast<int>(c.size()));
      CMatrix rho = partial_trace(background, c, shape);
      inst.marginals.push_back({c, 0.5 * (rho + rho.adjoint())});
    }

    if (plant == PlantKind::Overlap || plant == PlantKind::Domination) {
      const auto [a, b] = *overlap;
      const int site = subsets[a].intersection(subsets[b])[0];
      std::uniform_int_distribution<int> pick(0, d - 1);
      const int va = pick(rng);
      const int vb = (va + 1 + std::uniform_int_distribution<int>(0, d - 2)(rng)) % d;
      for (auto [idx, value] : {std::pair{a, va}, std::pair{b, vb}}) {
        const Subset& c = subsets[idx];
        const auto rest_dim = static_cast<Eigen::Index>(detail::ipow(static_cast<std::size_t>(d), c.size() - 1));
        CMatrix tau;
        if (plant == PlantKind::Domination) {
          tau = detail::basis_projector(rest_dim, std::uniform_int_distribution<Eigen::Index>(0, rest_dim - 1)(rng));
        } else {
          tau = random_density_matrix<cplx>(rest_dim, 2, rng);
        }
        inst.marginals[idx].rho = detail::pinned_state(c, site, value, tau, d);
      }
    } else {
      // Rotated singlets on a triangle: each site shares a maximally
      // entangled pair with two different partners, which no state allows.
      const auto tri = *triangle;
      std::vector<CMatrix> local_u;
      for (int i = 0; i < shape.n(); ++i) local_u.push_back(random_unitary<cplx>(2, rng));
      CVector singlet = CVector::Zero(4);
      singlet(1) = 1.0 / std::sqrt(2.0);
      singlet(2) = -1.0 / std::sqrt(2.0);
      for (auto idx : tri) {
        const Subset& c = subsets[idx];
        const CMatrix u = kron(local_u[static_cast<std::size_t>(c[0])], local_u[static_cast<std::size_t>(c[1])]);
        const CVector psi = u * singlet;
        inst.marginals[idx].rho = psi * psi.adjoint();
      }
    }

    GeneratedInconsistent out;
    out.plant = plant;
    const auto check = brute_force_consistency(inst, opt.certify);
    out.certified_violation = check.violation_lower_bound;
    if (check.status != FeasibilityStatus::Feasible && out.certified_violation >= beta) {
      out.instance = std::move(inst);
      return out;
    }
  }
  throw CertificateFailure("make_inconsistent_instance: could not certify violation >= " + std::to_string(beta));
}

}  // namespace lclh
