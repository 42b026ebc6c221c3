#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lclh/core.hpp"
#include "lclh/random.hpp"

namespace lclh {

/// A convex body K given only through an oracle, with the certified geometry
/// S(p, r) inside K inside S(0, R). An optional coordinate box known to contain
/// K gives a tighter starting ellipsoid.
struct ConvexBodySpec {
  int dim = 1;
  double outer_radius = 1.0;
  RVector inner_center;
  double inner_radius = 1.0;
  std::optional<RVector> box_lower;
  std::optional<RVector> box_upper;

  void validate() const {
    if (dim < 1) throw InvalidArgument("ConvexBodySpec: dim must be >= 1");
    if (inner_center.size() != dim) throw InvalidArgument("ConvexBodySpec: inner center has wrong dimension");
    if (!(inner_radius > 0)) throw InvalidArgument("ConvexBodySpec: inner radius must be positive");
    if (outer_radius < inner_center.norm() + inner_radius - 1e-12) {
      throw InvalidArgument("ConvexBodySpec: need R >= |p| + r");
    }
    if (box_lower.has_value() != box_upper.has_value()) throw InvalidArgument("ConvexBodySpec: incomplete box");
    if (box_lower && (box_lower->size() != dim || box_upper->size() != dim)) {
      throw InvalidArgument("ConvexBodySpec: box has wrong dimension");
    }
  }

  double aspect() const { return outer_radius / inner_radius; }
};

enum class Membership { Member, NotMember };

/// Halfspace g.x <= c.
struct Cut {
  RVector g;
  double c = 0.0;
};

struct OracleAnswer {
  Membership verdict = Membership::Member;
  std::optional<Cut> cut;

  static OracleAnswer member() { return {Membership::Member, std::nullopt}; }
  static OracleAnswer not_member(RVector g, double c) { return {Membership::NotMember, Cut{std::move(g), c}}; }
  static OracleAnswer not_member() { return {Membership::NotMember, std::nullopt}; }
};

using MembershipOracle = std::function<OracleAnswer(const RVector&)>;

/// Decide "some y in K has c.y >= gamma + eps" (YES) versus "every x in K has
/// c.x <= gamma - eps" (NO).
struct OptQuery {
  RVector c;
  double gamma = 0.0;
  double eps = 0.1;
};

enum class OracleMode { Separation, MembershipOnly };

struct EngineOptions {
  OracleMode mode = OracleMode::Separation;
  double budget_constant = 10.0;
  int max_iterations = 0;  // 0: use the budget formula
  bool deep_cuts = true;
  double condition_limit = 1e12;
  bool record_points = false;
  int probes = 8;
  std::uint64_t seed = 1;
};

enum class StepKind { Oracle, Objective };

struct TranscriptRecord {
  int iteration = 0;
  StepKind kind = StepKind::Oracle;
  std::optional<RVector> point;
  Membership verdict = Membership::Member;
  RVector g;
  double c = 0.0;
  double depth = 0.0;
  double log_volume = 0.0;  // log of volume relative to the unit ball
};

struct Transcript {
  std::vector<TranscriptRecord> records;
  int oracle_calls = 0;
  int iterations = 0;
  int budget = 0;
  bool unpromised = false;
  /// Best objective among points the oracle accepted.
  double best_value = -std::numeric_limits<double>::infinity();
  /// Upper bound on the objective over the surviving ellipsoid.
  double upper_bound = std::numeric_limits<double>::infinity();
  /// Smallest amount by which a rejected query violated its own cut.
  double delta_observed = std::numeric_limits<double>::infinity();
  std::string termination;
  double initial_log_volume = 0.0;
  double final_log_volume = 0.0;
};

struct OptimizeResult {
  bool yes = false;
  Transcript transcript;
  std::optional<RVector> witness;
};

namespace detail {

/// Ellipsoid E = {x : (x - z)^T A^{-1} (x - z) <= 1}.
class Ellipsoid {
 public:
  Ellipsoid(RVector center, RMatrix shape) : z_(std::move(center)), a_(std::move(shape)) {}

  const RVector& center() const { return z_; }
  const RMatrix& shape() const { return a_; }
  int dim() const { return static_cast<int>(z_.size()); }

  double support(const RVector& c) const { return c.dot(z_) + std::sqrt(std::max(0.0, c.dot(a_ * c))); }

  double log_volume() const {
    Eigen::LLT<RMatrix> llt(a_);
    if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
    return llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  }

  /// Depth of the cut g.x <= c at the center, in units of the ellipsoid width.
  double depth(const RVector& g, double c) const {
    const double w = std::sqrt(std::max(0.0, g.dot(a_ * g)));
    if (w <= 0) return g.dot(z_) > c ? std::numeric_limits<double>::infinity() : -1.0;
    return (g.dot(z_) - c) / w;
  }

  /// Replaces E by the minimum-volume ellipsoid containing E intersected
  /// with {g.x <= c}. Returns false when that intersection is empty.
  bool cut(const RVector& g, double c, bool deep) {
    const double w = std::sqrt(std::max(0.0, g.dot(a_ * g)));
    if (w <= 0) return g.dot(z_) <= c;
    double alpha = deep ? (g.dot(z_) - c) / w : 0.0;
    if (alpha >= 1.0) return false;
    alpha = std::max(alpha, 0.0);
    const int n = dim();
    const RVector b = a_ * g / w;
    if (n == 1) {
      // Interval [z - h, z + h]; keep the part with g.x <= c.
      const double h = std::sqrt(a_(0, 0));
      double lo = z_(0) - h;
      double hi = z_(0) + h;
      const double bound = std::min(c, g.dot(z_)) / g(0);
      if (g(0) > 0) hi = std::min(hi, bound);
      else lo = std::max(lo, bound);
      if (hi <= lo) return false;
      z_(0) = 0.5 * (lo + hi);
      a_(0, 0) = 0.25 * (hi - lo) * (hi - lo);
      return true;
    }
    const double nn = static_cast<double>(n);
    const double tau = (1.0 + nn * alpha) / (nn + 1.0);
    const double sigma = 2.0 * (1.0 + nn * alpha) / ((nn + 1.0) * (1.0 + alpha));
    const double delta = nn * nn * (1.0 - alpha * alpha) / (nn * nn - 1.0);
    z_ -= tau * b;
    a_ = delta * (a_ - sigma * b * b.transpose());
    a_ = 0.5 * (a_ + a_.transpose()).eval();
    return true;
  }

  double condition_number() const {
    Eigen::SelfAdjointEigenSolver<RMatrix> es(a_, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues()(0);
    const double hi = es.eigenvalues()(dim() - 1);
    if (lo <= 0) return std::numeric_limits<double>::infinity();
    return hi / lo;
  }

 private:
  RVector z_;
  RMatrix a_;
};

inline Ellipsoid starting_ellipsoid(const ConvexBodySpec& body) {
  const auto n = static_cast<Eigen::Index>(body.dim);
  const double ball_log_vol = static_cast<double>(n) * std::log(body.outer_radius);
  if (body.box_lower) {
    // Smallest axis-aligned ellipsoid through the box corners.
    const RVector half = 0.5 * (*body.box_upper - *body.box_lower);
    const RVector mid = 0.5 * (*body.box_upper + *body.box_lower);
    const double box_log_vol = 0.5 * static_cast<double>(n) * std::log(static_cast<double>(n)) +
                               half.array().log().sum();
    if (box_log_vol < ball_log_vol) {
      return Ellipsoid(mid, RMatrix((static_cast<double>(n) * half.array().square()).matrix().asDiagonal()));
    }
  }
  return Ellipsoid(RVector::Zero(n), RMatrix::Identity(n, n) * body.outer_radius * body.outer_radius);
}

inline int iteration_budget(const ConvexBodySpec& body, double eps, const EngineOptions& opt) {
  if (opt.max_iterations > 0) return opt.max_iterations;
  const double n = body.dim;
  const double ratio = std::max(std::exp(1.0), body.outer_radius / (body.inner_radius * eps));
  return static_cast<int>(std::ceil(opt.budget_constant * n * n * std::log(ratio)));
}

}  // namespace detail

/// Synthesizes a separating halfspace from membership answers alone: bisect
/// the segment from the inner center p to the rejected point y, take the
/// normal along y - p, then probe just beyond the hyperplane and push it out
/// until no probe is accepted.
inline Cut membership_to_cut(const ConvexBodySpec& body, const MembershipOracle& oracle, const RVector& y,
                             int probes = 8, std::uint64_t seed = 1, int* calls = nullptr) {
  const RVector& p = body.inner_center;
  const RVector span = y - p;
  const double len = span.norm();
  if (len <= body.inner_radius) throw OracleContractViolation("membership_to_cut: rejected point inside inner ball");
  const RVector g = span / len;
  const double delta_line = body.inner_radius * 1e-3;
  double lo = 0.0;  // fraction along [p, y] known inside
  double hi = 1.0;  // known outside
  auto ask = [&](const RVector& x) {
    if (calls) ++*calls;
    return oracle(x).verdict;
  };
  while ((hi - lo) * len > delta_line) {
    const double mid = 0.5 * (lo + hi);
    (ask(p + mid * span) == Membership::Member ? lo : hi) = mid;
  }
  const double g_y = g.dot(y);
  const double g_b = g.dot(p + hi * span);
  const double kappa = delta_line * body.aspect();
  double c = std::min(g_b + kappa, 0.5 * (g_b + g_y));
  Rng rng(seed);
  for (int round = 0; round < 4; ++round) {
    bool moved = false;
    for (int q = 0; q < probes; ++q) {
      // A point on the far side of the hyperplane, displaced sideways.
      RVector lateral = random_unit_vector<double>(static_cast<Eigen::Index>(body.dim), rng);
      lateral -= lateral.dot(g) * g;
      if (lateral.norm() > 0) lateral.normalize();
      const double scale = body.inner_radius * (0.25 + 0.75 * static_cast<double>(q) / std::max(1, probes - 1));
      const RVector probe = p + (c - g.dot(p) + delta_line) * g + scale * lateral;
      if (ask(probe) == Membership::Member) {
        c = g.dot(probe) + kappa;
        moved = true;
      }
    }
    if (!moved) break;
  }
  if (g_y <= c) throw ConvergenceError("membership_to_cut: no cut separates the query from accepted probes");
  if (g.dot(p) > c - body.inner_radius / 2) throw OracleContractViolation("membership_to_cut: cut clips the inner ball");
  return Cut{g, c};
}

/// Ellipsoid method for the weak optimization problem over K.
inline OptimizeResult optimize(const ConvexBodySpec& body, const MembershipOracle& oracle, const OptQuery& query,
                               const EngineOptions& opt = {}) {
  body.validate();
  if (query.c.size() != body.dim) throw InvalidArgument("optimize: objective has wrong dimension");
  if (std::abs(query.c.norm() - 1.0) > 1e-12) throw InvalidArgument("optimize: objective must be a unit vector");
  if (!(query.eps > 0)) throw InvalidArgument("optimize: eps must be positive");

  OptimizeResult result;
  Transcript& tr = result.transcript;
  detail::Ellipsoid ell = detail::starting_ellipsoid(body);
  const int n = body.dim;
  tr.budget = detail::iteration_budget(body, query.eps, opt);
  tr.initial_log_volume = ell.log_volume();
  const double threshold = query.gamma - query.eps;
  // A YES witness y drags a ball of this radius (around a point of the
  // segment toward p) into K, entirely above the threshold.
  const double rho = query.eps * body.inner_radius / (2.0 * body.outer_radius);
  const double min_log_volume = static_cast<double>(n) * std::log(rho);
  const double r_outer_sq = body.outer_radius * body.outer_radius;

  auto finish = [&](bool yes, const std::string& why) {
    result.yes = yes;
    tr.termination = why;
    tr.upper_bound = ell.support(query.c);
    tr.final_log_volume = ell.log_volume();
    if (yes) tr.unpromised = tr.best_value < query.gamma + query.eps;
    else tr.unpromised = tr.upper_bound > query.gamma - query.eps;
    return result;
  };

  for (int it = 0;; ++it) {
    tr.iterations = it;
    if (ell.support(query.c) < query.gamma + query.eps) return finish(false, "objective bound");
    const double log_vol = ell.log_volume();
    if (log_vol < min_log_volume) return finish(false, "volume");
    if (it >= tr.budget) {
      tr.termination = "budget";
      throw BudgetExhausted("optimize: iteration budget " + std::to_string(tr.budget) + " exhausted");
    }
    if (n > 1 && it > 0 && it % n == 0 && ell.condition_number() > opt.condition_limit) {
      throw NumericalBreakdown("optimize: ellipsoid condition number exceeds " + std::to_string(opt.condition_limit));
    }
    const RVector z = ell.center();
    TranscriptRecord rec;
    rec.iteration = it;
    rec.log_volume = log_vol;
    if (opt.record_points) rec.point = z;
    RVector g;
    double c = 0.0;
    if (query.c.dot(z) <= threshold) {
      rec.kind = StepKind::Objective;
      rec.verdict = Membership::NotMember;
      g = -query.c;
      c = -threshold;
    } else {
      rec.kind = StepKind::Oracle;
      ++tr.oracle_calls;
      OracleAnswer ans = oracle(z);
      rec.verdict = ans.verdict;
      if (ans.verdict == Membership::Member) {
        if (z.squaredNorm() > r_outer_sq * (1 + 1e-9) + 1e-9) {
          throw OracleContractViolation("optimize: oracle accepted a point outside S(0,R)");
        }
        tr.best_value = std::max(tr.best_value, query.c.dot(z));
        tr.records.push_back(rec);
        result.witness = z;
        return finish(true, "member above threshold");
      }
      if (opt.mode == OracleMode::MembershipOnly || !ans.cut) {
        int calls = 0;
        ans.cut = membership_to_cut(body, oracle, z, opt.probes, derive_seed(opt.seed, static_cast<std::uint64_t>(it)),
                                    &calls);
        tr.oracle_calls += calls;
      }
      g = ans.cut->g;
      c = ans.cut->c;
      const double norm = g.norm();
      if (!(norm > 0)) throw OracleContractViolation("optimize: zero cut normal");
      g /= norm;
      c /= norm;
      const double excess = g.dot(z) - c;
      if (excess < -1e-12) throw OracleContractViolation("optimize: cut does not exclude the query point");
      if (g.dot(body.inner_center) > c - body.inner_radius / 2) {
        throw OracleContractViolation("optimize: cut removes part of the inner ball");
      }
      tr.delta_observed = std::min(tr.delta_observed, excess);
    }
    rec.g = g;
    rec.c = c;
    rec.depth = ell.depth(g, c);
    tr.records.push_back(std::move(rec));
    if (!ell.cut(g, c, opt.deep_cuts)) return finish(false, "empty ellipsoid");
  }
}

struct MaximizeResult {
  double lower = -std::numeric_limits<double>::infinity();  // achieved by an accepted point
  double upper = std::numeric_limits<double>::infinity();
  std::optional<RVector> witness;
  Transcript transcript;
};

/// Brackets max c.x over K to within `eps` (or until the budget runs out).
/// Accepted points raise the objective cut instead of stopping.
inline MaximizeResult maximize(const ConvexBodySpec& body, const MembershipOracle& oracle, const RVector& c_obj,
                               double eps, const EngineOptions& opt = {}) {
  body.validate();
  if (std::abs(c_obj.norm() - 1.0) > 1e-12) throw InvalidArgument("maximize: objective must be a unit vector");
  MaximizeResult out;
  Transcript& tr = out.transcript;
  detail::Ellipsoid ell = detail::starting_ellipsoid(body);
  tr.budget = detail::iteration_budget(body, eps, opt);
  tr.initial_log_volume = ell.log_volume();
  for (int it = 0; it < tr.budget; ++it) {
    tr.iterations = it + 1;
    out.upper = std::max(out.lower, ell.support(c_obj));
    if (out.upper - out.lower <= eps) break;
    const RVector z = ell.center();
    TranscriptRecord rec;
    rec.iteration = it;
    rec.log_volume = ell.log_volume();
    if (opt.record_points) rec.point = z;
    RVector g;
    double c = 0.0;
    if (c_obj.dot(z) <= out.lower) {
      rec.kind = StepKind::Objective;
      g = -c_obj;
      c = -out.lower;
    } else {
      ++tr.oracle_calls;
      OracleAnswer ans = oracle(z);
      rec.verdict = ans.verdict;
      if (ans.verdict == Membership::Member) {
        out.lower = c_obj.dot(z);
        out.witness = z;
        rec.kind = StepKind::Objective;
        g = -c_obj;
        c = -out.lower;
      } else {
        if (opt.mode == OracleMode::MembershipOnly || !ans.cut) {
          int calls = 0;
          ans.cut = membership_to_cut(body, oracle, z, opt.probes, derive_seed(opt.seed, static_cast<std::uint64_t>(it)),
                                      &calls);
          tr.oracle_calls += calls;
        }
        const double norm = ans.cut->g.norm();
        g = ans.cut->g / norm;
        c = ans.cut->c / norm;
      }
    }
    rec.g = g;
    rec.c = c;
    rec.depth = ell.depth(g, c);
    tr.records.push_back(std::move(rec));
    if (!ell.cut(g, c, opt.deep_cuts)) {
      out.upper = out.lower;
      break;
    }
  }
  tr.best_value = out.lower;
  tr.upper_bound = out.upper;
  tr.final_log_volume = ell.log_volume();
  return out;
}

}  // namespace lclh
