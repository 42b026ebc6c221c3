#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lclh/consistency.hpp"
#include "lclh/convex_engine.hpp"
#include "lclh/hamiltonian.hpp"
#include "lclh/observables.hpp"

namespace lclh {

// ---------------------------------------------------------------------------
// Oracles consumed by the reductions.

struct LhOracleAnswer {
  Verdict verdict = Verdict::GapViolated;
  double lambda_min = 0.0;
  std::optional<CVector> ground_state;
};

using LhOracle = std::function<LhOracleAnswer(const LocalHamiltonianInstance&)>;

/// Dense diagonalization; also returns a ground state for separation cuts.
inline LhOracle exact_lh_oracle(std::size_t cap = kDefaultDimensionCap) {
  return [cap](const LocalHamiltonianInstance& inst) {
    const CMatrix h = assemble(inst, cap);
    const auto eig = extreme_eigs(h, cap);
    LhOracleAnswer out;
    out.lambda_min = eig.lambda_min;
    out.verdict = classify_energy(eig.lambda_min, inst.a, inst.b);
    out.ground_state = eig.v_min;
    return out;
  };
}

struct LcOracleAnswer {
  FeasibilityStatus status = FeasibilityStatus::Undecided;
  double phi = 0.0;
  double phi_lower = 0.0;
  int iterations = 0;
  /// d Phi / d rho_i, one per subset, when the oracle can supply them.
  std::vector<CMatrix> gradients;
};

/// Decides whether candidate marginals (one per subset, Hermitian, trace 1,
/// PSD) are consistent.
using LcOracle = std::function<LcOracleAnswer(const std::vector<CMatrix>&)>;

/// Brute-force (Frank-Wolfe) LC oracle that warm-starts from its last iterate.
inline LcOracle brute_force_lc_oracle(const SystemShape& shape, const std::vector<Subset>& subsets,
                                      ConsistencyMode mode, FrankWolfeOptions opt,
                                      std::size_t cap = kDefaultDimensionCap) {
  auto wrap = [&](auto tag) -> LcOracle {
    using Scalar = decltype(tag);
    auto fw = std::make_shared<FrankWolfe<Scalar>>(shape, subsets, mode, cap);
    return [fw, opt](const std::vector<CMatrix>& rhos) {
      std::vector<Mat<Scalar>> targets;
      for (const auto& r : rhos) targets.push_back(detail::cast_marginal<Scalar>(r));
      auto res = fw->solve(targets, opt);
      LcOracleAnswer out;
      out.status = res.status;
      out.phi = res.phi;
      out.phi_lower = res.phi_lower;
      out.iterations = res.iterations;
      for (auto& g : res.target_gradients) out.gradients.push_back(g.template cast<cplx>());
      return out;
    };
  };
  if (mode == ConsistencyMode::Stoquastic) return wrap(double{});
  return wrap(cplx{});
}

inline FrankWolfeOptions membership_fw_options() {
  FrankWolfeOptions opt;
  opt.max_iters = 1500;
  opt.tol = 1e-4;
  opt.infeasible_margin = 0.0;
  opt.certify = false;
  return opt;
}

// ---------------------------------------------------------------------------
// Shared reporting.

struct ReductionReport {
  std::string reduction;
  Verdict verdict = Verdict::GapViolated;
  bool early_no = false;
  std::string detail;
  int dimension = 0;
  double outer_radius = 0.0;
  double inner_radius = 0.0;
  double engine_eps = 0.0;
  Transcript transcript;
  int lh_queries = 0;
  int lc_queries = 0;
  int lc_unresolved = 0;
  int lc_fw_iterations = 0;
  int box_cuts = 0;
  int psd_cuts = 0;
  int stoquastic_queries = 0;
  int nonstoquastic_queries = 0;
  double max_norm_ratio = 0.0;  // max ||F(x)|| / (2D+1) over LH queries
  /// Bracket on the primal value p* (dual body) or min f (consistency body).
  double value_lower = -std::numeric_limits<double>::infinity();
  double value_upper = std::numeric_limits<double>::infinity();
};

struct ReductionOptions {
  EngineOptions engine;
  FrankWolfeOptions lc_options = membership_fw_options();
  /// Precision delta handed to the LH oracle in the dual-body reductions.
  double lh_delta = 1e-6;
  bool check_norms = true;
  std::size_t cap = kDefaultDimensionCap;
};

// ---------------------------------------------------------------------------
// LC -> LH: the dual body.

struct OverlapConflict {
  std::string label;
  Subset first;
  Subset second;
  double first_value = 0.0;
  double second_value = 0.0;
};

struct AlphaExtraction {
  std::vector<ObservableElement> basis;
  RVector alpha;
  std::optional<OverlapConflict> conflict;
};

/// alpha_P = Tr(P rho_i) for the first subset containing P; disagreement
/// beyond beta / (2 d^(2k)) between containing subsets is reported.
inline AlphaExtraction extract_alphas(const LocalConsistencyInstance& inst) {
  if (inst.mode != ConsistencyMode::Standard) throw InvalidArgument("extract_alphas: standard mode only");
  const int d = inst.shape.d();
  const double tau = inst.beta / (2.0 * std::pow(static_cast<double>(d * d), inst.k));
  AlphaExtraction out;
  out.basis = local_basis_set(inst.subsets(), inst.shape);
  out.alpha.resize(static_cast<Eigen::Index>(out.basis.size()));
  for (std::size_t j = 0; j < out.basis.size(); ++j) {
    const auto& p = out.basis[j];
    std::optional<std::size_t> first;
    double value = 0.0;
    for (std::size_t i = 0; i < inst.marginals.size(); ++i) {
      const auto& m = inst.marginals[i];
      if (!p.support.is_within(m.subset)) continue;
      const double v = expectation_local(p, m.rho, m.subset, d);
      if (!first) {
        first = i;
        value = v;
      } else if (std::abs(v - value) > tau && !out.conflict) {
        out.conflict = OverlapConflict{p.name, inst.marginals[*first].subset, m.subset, value, v};
      }
    }
    out.alpha(static_cast<Eigen::Index>(j)) = value;
  }
  return out;
}

/// K = {(x, s) : x in the box, s in [1-2D, 1+2D], I + sum x_P (P - alpha_P I) <= s I}.
class DualBodyK {
 public:
  DualBodyK(SystemShape shape, std::vector<Subset> subsets, std::vector<ObservableElement> basis, RVector alpha,
            ConsistencyMode mode)
      : shape_(shape), subsets_(std::move(subsets)), basis_(std::move(basis)), alpha_(std::move(alpha)), mode_(mode) {
    if (static_cast<std::size_t>(alpha_.size()) != basis_.size()) throw InvalidArgument("DualBodyK: alpha size mismatch");
    if (basis_.empty()) throw InvalidArgument("DualBodyK: empty observable family");
    // Each observable is grouped with one subset that contains it.
    for (const auto& p : basis_) {
      int owner = -1;
      if (!p.is_product()) owner = std::get<MatrixElementObservable>(p.label).subset_index;
      for (std::size_t i = 0; owner < 0 && i < subsets_.size(); ++i) {
        if (p.support.is_within(subsets_[i])) owner = static_cast<int>(i);
      }
      if (owner < 0) throw InvalidArgument("DualBodyK: observable " + p.name + " outside every subset");
      owner_.push_back(owner);
      restricted_.push_back(p.restricted(subsets_[static_cast<std::size_t>(owner)], shape_.d()));
    }
    first_group_ = owner_.front();
  }

  int D() const { return static_cast<int>(basis_.size()); }
  int dim() const { return D() + 1; }
  ConsistencyMode mode() const { return mode_; }
  const std::vector<ObservableElement>& basis() const { return basis_; }
  const RVector& alpha() const { return alpha_; }
  const SystemShape& shape() const { return shape_; }
  double box_lower() const { return mode_ == ConsistencyMode::Standard ? -1.0 : 0.0; }

  /// The certified geometry.
  ConvexBodySpec geometry() const {
    const double d = D();
    ConvexBodySpec spec;
    spec.dim = dim();
    spec.outer_radius = std::sqrt(d + (1 + 2 * d) * (1 + 2 * d));
    spec.inner_center = RVector::Zero(dim());
    spec.inner_center(D()) = 2.0;
    if (mode_ == ConsistencyMode::Standard) {
      spec.inner_radius = 1.0 / (4.0 * (d + 1));
    } else {
      spec.inner_center.head(D()).setConstant(1.0 / (3.0 * d));
      spec.inner_radius = 1.0 / (6.0 * (2 * d + 1));
    }
    RVector lo = RVector::Constant(dim(), box_lower());
    RVector hi = RVector::Constant(dim(), 1.0);
    lo(D()) = 1 - 2 * d;
    hi(D()) = 1 + 2 * d;
    spec.box_lower = lo;
    spec.box_upper = hi;
    return spec;
  }

  /// Upper bound on lambda_max(F(y) - (t+2)I) guaranteed on the inner ball.
  double inner_certificate_bound() const { return mode_ == ConsistencyMode::Standard ? -0.5 : -1.0 / 6.0; }

  /// F(x) = I + sum x_P F_P as one local term per subset.
  std::vector<LocalTerm> f_terms(const RVector& x) const {
    std::vector<LocalTerm> terms;
    for (const auto& c : subsets_) {
      const auto ld = static_cast<Eigen::Index>(detail::ipow(static_cast<std::size_t>(shape_.d()), c.size()));
      terms.push_back({c, CMatrix::Zero(ld, ld)});
    }
    double constant = 1.0;
    for (std::size_t j = 0; j < basis_.size(); ++j) {
      const double xj = x(static_cast<Eigen::Index>(j));
      terms[static_cast<std::size_t>(owner_[j])].matrix += xj * restricted_[j];
      constant -= xj * alpha_(static_cast<Eigen::Index>(j));
    }
    auto& first = terms[static_cast<std::size_t>(first_group_)].matrix;
    first.diagonal().array() += constant;
    return terms;
  }

  CMatrix f_matrix(const RVector& x) const {
    LocalHamiltonianInstance h;
    h.shape = shape_;
    h.terms = f_terms(x);
    return assemble(h);
  }

  /// The LH query for point (x, s): H = -F(x)/(2D+1) with thresholds placed
  /// so YES means lambda_max(F) >= s + delta and NO means lambda_max(F) <= s.
  LocalHamiltonianInstance query_instance(const RVector& x, double s, double delta) const {
    const double scale = 2.0 * D() + 1.0;
    LocalHamiltonianInstance h;
    h.shape = shape_;
    h.k = 1;
    for (auto& t : f_terms(x)) {
      h.k = std::max(h.k, static_cast<int>(t.subset.size()));
      t.matrix *= -1.0 / scale;
      h.terms.push_back(std::move(t));
    }
    h.a = (-s - delta) / scale;
    h.b = -s / scale;
    h.s = static_cast<int>(std::min(2e9, std::ceil(scale / delta)));
    return h;
  }

  /// v^dagger F_P v for each coordinate, from the reduced states of v.
  RVector expectations_in(const CVector& v) const {
    std::vector<CMatrix> reduced;
    for (const auto& c : subsets_) reduced.push_back(SiteIndexer(shape_, c).partial_trace_pure(v));
    RVector f(D());
    for (std::size_t j = 0; j < basis_.size(); ++j) {
      f(static_cast<Eigen::Index>(j)) = (restricted_[j] * reduced[static_cast<std::size_t>(owner_[j])]).trace().real() -
                                        alpha_(static_cast<Eigen::Index>(j));
    }
    return f;
  }

  /// Box constraint violated by z, as a cut.
  std::optional<Cut> box_cut(const RVector& z) const {
    const double d = D();
    for (Eigen::Index j = 0; j < D(); ++j) {
      if (z(j) > 1.0) return Cut{RVector::Unit(dim(), j), 1.0};
      if (z(j) < box_lower()) return Cut{-RVector::Unit(dim(), j), -box_lower()};
    }
    if (z(D()) > 1 + 2 * d) return Cut{RVector::Unit(dim(), D()), 1 + 2 * d};
    if (z(D()) < 1 - 2 * d) return Cut{-RVector::Unit(dim(), D()), -(1 - 2 * d)};
    return std::nullopt;
  }

  /// Samples the inner ball and checks the eigenvalue certificate; returns
  /// the worst value seen. Throws CertificateFailure if it is breached.
  double certify_inner_ball(int samples, Rng& rng) const {
    const auto spec = geometry();
    const double bound = inner_certificate_bound();
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
      RVector dir = random_unit_vector<double>(dim(), rng);
      const double radius = spec.inner_radius * std::pow(unif(rng), 1.0 / dim());
      const RVector pt = spec.inner_center + radius * dir;
      const CMatrix f = f_matrix(pt.head(D()));
      const double top = hermitian_eigenvalues(f).maxCoeff() - pt(D());
      worst = std::max(worst, top);
      if (top > bound + 1e-9) {
        throw CertificateFailure("inner ball certificate failed: " + std::to_string(top) + " > " +
                                 std::to_string(bound));
      }
    }
    return worst;
  }

 private:
  SystemShape shape_;
  std::vector<Subset> subsets_;
  std::vector<ObservableElement> basis_;
  RVector alpha_;
  ConsistencyMode mode_;
  std::vector<int> owner_;
  std::vector<CMatrix> restricted_;
  int first_group_ = 0;
};

inline DualBodyK make_dual_body(const LocalConsistencyInstance& inst, const AlphaExtraction& ex) {
  return DualBodyK(inst.shape, inst.subsets(), ex.basis, ex.alpha, ConsistencyMode::Standard);
}

inline DualBodyK make_stoquastic_dual_body(const LocalConsistencyInstance& inst) {
  auto basis = matrix_element_set(inst.subsets(), inst.shape);
  RVector alpha(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const auto& x = std::get<MatrixElementObservable>(basis[j].label);
    alpha(static_cast<Eigen::Index>(j)) =
        inst.marginals[static_cast<std::size_t>(x.subset_index)].rho(static_cast<Eigen::Index>(x.s),
                                                                      static_cast<Eigen::Index>(x.t)).real();
  }
  return DualBodyK(inst.shape, inst.subsets(), std::move(basis), std::move(alpha), ConsistencyMode::Stoquastic);
}

inline ConvexBodySpec geometry_of(const DualBodyK& body) { return body.geometry(); }

namespace detail {

inline ReductionReport run_dual_body(const DualBodyK& body, double beta, const LhOracle& lh,
                                     const ReductionOptions& opt, const std::string& name) {
  ReductionReport rep;
  rep.reduction = name;
  const auto spec = body.geometry();
  rep.dimension = spec.dim;
  rep.outer_radius = spec.outer_radius;
  rep.inner_radius = spec.inner_radius;
  const double scale = 2.0 * body.D() + 1.0;
  const bool stoq = body.mode() == ConsistencyMode::Stoquastic;

  MembershipOracle oracle = [&](const RVector& z) -> OracleAnswer {
    if (auto cut = body.box_cut(z)) {
      ++rep.box_cuts;
      return OracleAnswer{Membership::NotMember, cut};
    }
    const RVector x = z.head(body.D());
    const double s = z(body.D());
    const auto h = body.query_instance(x, s, opt.lh_delta);
    if (stoq) {
      if (is_stoquastic(h).stoquastic) ++rep.stoquastic_queries;
      else ++rep.nonstoquastic_queries;
    }
    if (opt.check_norms) {
      const CMatrix hm = assemble(h, opt.cap);
      rep.max_norm_ratio = std::max(rep.max_norm_ratio, operator_norm(hm));
    }
    ++rep.lh_queries;
    const auto ans = lh(h);
    if (ans.verdict == Verdict::No) return OracleAnswer::member();
    if (!ans.ground_state) return OracleAnswer::not_member();
    // v^dagger F(x') v <= s' for all (x', s') in K.
    const RVector f = body.expectations_in(*ans.ground_state);
    RVector g(body.dim());
    g.head(body.D()) = f;
    g(body.D()) = -1.0;
    return OracleAnswer{Membership::NotMember, Cut{g, -1.0}};
  };

  // Maximize -s: YES for the optimizer means p* <= 1 - beta.
  OptQuery q;
  q.c = -RVector::Unit(body.dim(), body.D());
  q.gamma = -(1.0 - beta / 2.0);
  q.eps = beta / 2.0;
  rep.engine_eps = q.eps;
  auto res = optimize(spec, oracle, q, opt.engine);
  rep.transcript = std::move(res.transcript);
  rep.verdict = res.yes ? Verdict::No : Verdict::Yes;
  rep.value_upper = -rep.transcript.best_value;
  rep.value_lower = -rep.transcript.upper_bound;
  (void)scale;
  return rep;
}

}  // namespace detail

/// Local Consistency decided through an LH oracle.
inline ReductionReport lc_to_lh(const LocalConsistencyInstance& inst, const LhOracle& lh,
                                const ReductionOptions& opt = {}) {
  if (inst.mode != ConsistencyMode::Standard) throw InvalidArgument("lc_to_lh: standard instance required");
  inst.validate();
  const auto ex = extract_alphas(inst);
  if (ex.conflict) {
    ReductionReport rep;
    rep.reduction = "lc_to_lh";
    rep.verdict = Verdict::No;
    rep.early_no = true;
    const auto& c = *ex.conflict;
    rep.detail = "overlap conflict on " + c.label + ": " + std::to_string(c.first_value) + " on " +
                 c.first.to_string() + " vs " + std::to_string(c.second_value) + " on " + c.second.to_string();
    return rep;
  }
  return detail::run_dual_body(make_dual_body(inst, ex), inst.beta, lh, opt, "lc_to_lh");
}

/// Stoquastic Local Consistency decided through a stoquastic LH oracle.
inline ReductionReport stoq_lc_to_lh(const LocalConsistencyInstance& inst, const LhOracle& lh,
                                     const ReductionOptions& opt = {}) {
  if (inst.mode != ConsistencyMode::Stoquastic) throw InvalidArgument("stoq_lc_to_lh: stoquastic instance required");
  inst.validate();
  return detail::run_dual_body(make_stoquastic_dual_body(inst), inst.beta, lh, opt, "stoq_lc_to_lh");
}

// ---------------------------------------------------------------------------
// LH -> LC: the consistency body.

/// Expectation vectors alpha over a local observable family that some global
/// state reproduces. Marginals are rebuilt from alpha by the Fourier formula.
class ConsistencyBodyK {
 public:
  ConsistencyBodyK(SystemShape shape, std::vector<Subset> subsets, std::vector<ObservableElement> basis)
      : shape_(shape), subsets_(std::move(subsets)), basis_(std::move(basis)) {
    if (basis_.empty()) throw InvalidArgument("ConsistencyBodyK: empty observable family");
    for (const auto& c : subsets_) {
      std::vector<std::size_t> members;
      std::vector<CMatrix> mats;
      std::vector<double> norms;
      for (std::size_t j = 0; j < basis_.size(); ++j) {
        if (!basis_[j].support.is_within(c)) continue;
        members.push_back(j);
        mats.push_back(basis_[j].restricted(c, shape_.d()));
        norms.push_back(basis_[j].tr_sq_on(c, shape_.d()));
      }
      members_.push_back(std::move(members));
      restricted_.push_back(std::move(mats));
      tr_sq_.push_back(std::move(norms));
    }
    // Smallest Tr(P^2)/d^n over the family bounds the PSD-safe l1 radius of
    // I/d^n + sum alpha_P P / Tr(P^2).
    min_ratio_ = std::numeric_limits<double>::infinity();
    for (const auto& p : basis_) {
      const double local = static_cast<double>(detail::ipow(static_cast<std::size_t>(shape_.d()), p.support.size()));
      min_ratio_ = std::min(min_ratio_, p.tr_sq / local);
    }
  }

  int D() const { return static_cast<int>(basis_.size()); }
  const std::vector<ObservableElement>& basis() const { return basis_; }
  const std::vector<Subset>& subsets() const { return subsets_; }
  const SystemShape& shape() const { return shape_; }

  ConvexBodySpec geometry() const {
    ConvexBodySpec spec;
    spec.dim = D();
    spec.outer_radius = std::sqrt(static_cast<double>(D()));
    spec.inner_center = RVector::Zero(D());
    spec.inner_radius = min_ratio_ / std::sqrt(static_cast<double>(D()));
    spec.box_lower = RVector::Constant(D(), -1.0);
    spec.box_upper = RVector::Constant(D(), 1.0);
    return spec;
  }

  CMatrix marginal(std::size_t i, const RVector& alpha) const {
    const auto ld = static_cast<Eigen::Index>(detail::ipow(static_cast<std::size_t>(shape_.d()), subsets_[i].size()));
    CMatrix rho = CMatrix::Identity(ld, ld) / static_cast<double>(ld);
    for (std::size_t q = 0; q < members_[i].size(); ++q) {
      rho += alpha(static_cast<Eigen::Index>(members_[i][q])) / tr_sq_[i][q] * restricted_[i][q];
    }
    return rho;
  }

  std::vector<CMatrix> marginals(const RVector& alpha) const {
    std::vector<CMatrix> out;
    for (std::size_t i = 0; i < subsets_.size(); ++i) out.push_back(marginal(i, alpha));
    return out;
  }

  /// Linear functional alpha -> sum_i Re Tr(G_i rho_i(alpha)) as (g, offset).
  std::pair<RVector, double> pullback(const std::vector<CMatrix>& g_local) const {
    RVector g = RVector::Zero(D());
    double offset = 0.0;
    for (std::size_t i = 0; i < subsets_.size(); ++i) {
      offset += g_local[i].trace().real() / static_cast<double>(g_local[i].rows());
      for (std::size_t q = 0; q < members_[i].size(); ++q) {
        g(static_cast<Eigen::Index>(members_[i][q])) += detail::inner(restricted_[i][q], g_local[i]) / tr_sq_[i][q];
      }
    }
    return {g, offset};
  }

 private:
  SystemShape shape_;
  std::vector<Subset> subsets_;
  std::vector<ObservableElement> basis_;
  std::vector<std::vector<std::size_t>> members_;
  std::vector<std::vector<CMatrix>> restricted_;
  std::vector<std::vector<double>> tr_sq_;
  double min_ratio_ = 1.0;
};

namespace detail {

inline std::vector<Subset> distinct_subsets(const std::vector<LocalTerm>& terms) {
  std::vector<Subset> out;
  for (const auto& t : terms) {
    if (std::find(out.begin(), out.end(), t.subset) == out.end()) out.push_back(t.subset);
  }
  return out;
}

inline ReductionReport run_consistency_body(const ConsistencyBodyK& body, const LocalHamiltonianInstance& inst,
                                            const LcOracle& lc, const ReductionOptions& opt,
                                            const std::string& name, double a, double b) {
  ReductionReport rep;
  rep.reduction = name;
  const auto spec = body.geometry();
  rep.dimension = spec.dim;
  rep.outer_radius = spec.outer_radius;
  rep.inner_radius = spec.inner_radius;

  // f(alpha) = c0 + coeff . alpha
  std::vector<CMatrix> h_local;
  for (const auto& c : body.subsets()) {
    const auto ld = static_cast<Eigen::Index>(ipow(static_cast<std::size_t>(inst.shape.d()), c.size()));
    CMatrix acc = CMatrix::Zero(ld, ld);
    for (const auto& t : inst.terms) {
      if (t.subset == c) acc += t.matrix;
    }
    h_local.push_back(acc);
  }
  const auto [coeff, c0] = body.pullback(h_local);
  const double norm = coeff.norm();
  if (norm < 1e-12) {
    rep.verdict = classify_energy(c0, a, b);
    rep.value_lower = rep.value_upper = c0;
    rep.detail = "objective is constant";
    if (rep.verdict == Verdict::GapViolated) rep.verdict = c0 <= 0.5 * (a + b) ? Verdict::Yes : Verdict::No;
    return rep;
  }

  const int d_basis = body.D();
  MembershipOracle oracle = [&](const RVector& alpha) -> OracleAnswer {
    for (Eigen::Index j = 0; j < d_basis; ++j) {
      if (std::abs(alpha(j)) > 1.0) {
        ++rep.box_cuts;
        const double sign = alpha(j) > 0 ? 1.0 : -1.0;
        return OracleAnswer::not_member(sign * RVector::Unit(d_basis, j), 1.0);
      }
    }
    const auto rhos = body.marginals(alpha);
    for (std::size_t i = 0; i < rhos.size(); ++i) {
      Eigen::SelfAdjointEigenSolver<CMatrix> es(rhos[i]);
      if (es.eigenvalues()(0) < -1e-9) {
        // u^dagger rho_i(alpha') u >= 0 on K.
        ++rep.psd_cuts;
        const CVector u = es.eigenvectors().col(0);
        std::vector<CMatrix> g_local(rhos.size());
        for (std::size_t q = 0; q < rhos.size(); ++q) g_local[q] = CMatrix::Zero(rhos[q].rows(), rhos[q].cols());
        g_local[i] = -u * u.adjoint();
        const auto [g, offset] = body.pullback(g_local);
        return OracleAnswer::not_member(g, -offset);
      }
    }
    ++rep.lc_queries;
    const auto ans = lc(rhos);
    rep.lc_fw_iterations += ans.iterations;
    if (ans.status == FeasibilityStatus::Infeasible && !ans.gradients.empty()) {
      // Phi(rho') >= phi_lower + <G, rho' - rho> and Phi = 0 on K.
      const auto [g, offset] = body.pullback(ans.gradients);
      return OracleAnswer::not_member(g, g.dot(alpha) - ans.phi_lower);
    }
    if (ans.status == FeasibilityStatus::Infeasible) return OracleAnswer::not_member();
    if (ans.status == FeasibilityStatus::Undecided) ++rep.lc_unresolved;
    return OracleAnswer::member();
  };

  // Maximize u.alpha with u = -coeff/|coeff|, i.e. minimize f.
  OptQuery q;
  q.c = -coeff / norm;
  q.gamma = (c0 - 0.5 * (a + b)) / norm;
  q.eps = (b - a) / 4.0 / norm;
  rep.engine_eps = (b - a) / 4.0;
  auto res = optimize(spec, oracle, q, opt.engine);
  rep.transcript = std::move(res.transcript);
  rep.verdict = res.yes ? Verdict::Yes : Verdict::No;
  rep.value_upper = c0 - norm * rep.transcript.best_value;
  rep.value_lower = c0 - norm * rep.transcript.upper_bound;
  return rep;
}

}  // namespace detail

/// Local Hamiltonian decided through an LC oracle over the observable family
/// of the instance's subsets.
inline ReductionReport lh_to_lc(const LocalHamiltonianInstance& inst, const LcOracle& lc,
                                const ReductionOptions& opt = {}) {
  inst.validate();
  const auto subsets = detail::distinct_subsets(inst.terms);
  if (subsets.empty()) {
    ReductionReport rep;
    rep.reduction = "lh_to_lc";
    rep.verdict = classify_energy(0.0, inst.a, inst.b);
    rep.detail = "no terms";
    return rep;
  }
  ConsistencyBodyK body(inst.shape, subsets, local_basis_set(subsets, inst.shape));
  return detail::run_consistency_body(body, inst, lc, opt, "lh_to_lc", inst.a, inst.b);
}

inline ReductionReport lh_to_lc_brute_force(const LocalHamiltonianInstance& inst, const ReductionOptions& opt = {}) {
  const auto subsets = detail::distinct_subsets(inst.terms);
  if (subsets.empty()) return lh_to_lc(inst, LcOracle{}, opt);
  return lh_to_lc(inst, brute_force_lc_oracle(inst.shape, subsets, ConsistencyMode::Standard, opt.lc_options, opt.cap),
                  opt);
}

/// Stoquastic LH through the stoquastic (entrywise-domination) LC relaxation.
/// Terms are shifted to be entrywise nonpositive; the shifts move a and b.
inline ReductionReport stoq_lh_to_lc(const LocalHamiltonianInstance& inst, const LcOracle& lc,
                                     const ReductionOptions& opt = {}) {
  inst.validate();
  if (!is_stoquastic(inst).stoquastic) throw InvalidArgument("stoq_lh_to_lc: instance is not stoquastic");
  LocalHamiltonianInstance shifted = inst;
  double total_shift = 0.0;
  for (auto& t : shifted.terms) {
    auto st = shift_nonpositive(t);
    t = st.term;
    total_shift += st.shift;
  }
  const auto subsets = detail::distinct_subsets(shifted.terms);
  if (subsets.empty()) {
    ReductionReport rep;
    rep.reduction = "stoq_lh_to_lc";
    rep.verdict = classify_energy(0.0, inst.a, inst.b);
    return rep;
  }
  ConsistencyBodyK body(inst.shape, subsets, real_pauli_subset(local_basis_set(subsets, inst.shape)));
  auto rep = detail::run_consistency_body(body, shifted, lc, opt, "stoq_lh_to_lc", inst.a - total_shift,
                                          inst.b - total_shift);
  rep.value_lower += total_shift;
  rep.value_upper += total_shift;
  return rep;
}

inline ReductionReport stoq_lh_to_lc_brute_force(const LocalHamiltonianInstance& inst,
                                                 const ReductionOptions& opt = {}) {
  const auto subsets = detail::distinct_subsets(inst.terms);
  if (subsets.empty()) return stoq_lh_to_lc(inst, LcOracle{}, opt);
  return stoq_lh_to_lc(
      inst, brute_force_lc_oracle(inst.shape, subsets, ConsistencyMode::Stoquastic, opt.lc_options, opt.cap), opt);
}

}  // namespace lclh
