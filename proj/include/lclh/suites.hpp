#pragma once

#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "lclh/alternatives.hpp"
#include "lclh/generate.hpp"
#include "lclh/observables.hpp"
#include "lclh/reductions.hpp"

namespace lclh {

/// One checked quantity in a verification suite.
struct SuiteRow {
  std::string quantity;
  std::string expected;
  std::string observed;
  bool ok = true;
};

struct SuiteReport {
  std::string name;
  std::vector<SuiteRow> rows;
  double seconds = 0.0;

  bool passed() const {
    for (const auto& r : rows) {
      if (!r.ok) return false;
    }
    return true;
  }
  void add(std::string quantity, std::string expected, std::string observed, bool ok) {
    rows.push_back({std::move(quantity), std::move(expected), std::move(observed), ok});
  }
};

struct SuiteOptions {
  int n_max = 3;
  std::uint64_t seed = 1;
};

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

inline std::string ratio(int good, int total) { return std::to_string(good) + "/" + std::to_string(total); }

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace detail

/// Expected Tr(AB) over {I} and the generators, written out from the
/// generator definitions rather than computed from matrices.
inline double expected_generator_trace(int d, int code_a, int code_b) {
  if (code_a == 0 || code_b == 0) return code_a == code_b ? d : 0.0;
  if (code_a != code_b) return 0.0;
  const auto g = QuditGenerator::from_code(d, code_a);
  if (g.kind == QuditGenerator::Kind::Z) return 1.0 + 1.0 / (g.i + 1);
  return 2.0;
}

inline SuiteReport verify_orthogonality(const SuiteOptions& opt) {
  detail::Stopwatch watch;
  SuiteReport rep;
  rep.name = "orthogonality";
  for (int n = 1; n <= std::min(opt.n_max, 3); ++n) {
    const auto all = all_products(SystemShape(n, 2));
    std::vector<int> sites;
    for (int i = 0; i < n; ++i) sites.push_back(i);
    const Subset full(sites);
    std::vector<CMatrix> mats;
    for (const auto& p : all) mats.push_back(p.restricted(full, 2));
    double worst = 0.0;
    for (std::size_t p = 0; p < mats.size(); ++p) {
      for (std::size_t q = 0; q < mats.size(); ++q) {
        const double expect = p == q ? std::pow(2.0, n) : 0.0;
        worst = std::max(worst, std::abs((mats[p] * mats[q]).trace() - cplx(expect, 0)));
      }
    }
    rep.add("max |Tr(PQ) - 2^n [P=Q]|, n=" + std::to_string(n), "<= 1e-12", detail::fmt(worst), worst <= 1e-12);
  }
  for (int d = 2; d <= 5; ++d) {
    const RMatrix table = orthogonality_table(d);
    double worst = 0.0;
    for (int a = 0; a < d * d; ++a) {
      for (int b = 0; b < d * d; ++b) worst = std::max(worst, std::abs(table(a, b) - expected_generator_trace(d, a, b)));
    }
    rep.add("qudit table deviation, d=" + std::to_string(d), "<= 1e-12", detail::fmt(worst), worst <= 1e-12);
    rep.add("generator count, d=" + std::to_string(d), std::to_string(d * d - 1), std::to_string(generator_count(d)),
            generator_count(d) == d * d - 1);
  }
  for (int n = 1; n <= 4; ++n) {
    const auto all = all_products(SystemShape(n, 2));
    const auto real = real_pauli_subset(all);
    const int expect = (static_cast<int>(std::pow(4, n)) + static_cast<int>(std::pow(2, n))) / 2;
    rep.add("real Pauli count, n=" + std::to_string(n), std::to_string(expect), std::to_string(real.size()),
            static_cast<int>(real.size()) == expect);
  }
  rep.seconds = watch.seconds();
  return rep;
}

/// The observable-family sizes 3, 15 and 30: one qubit, one pair, two
/// disjoint pairs.
inline std::vector<std::pair<SystemShape, std::vector<Subset>>> geometry_cases() {
  return {{SystemShape(1, 2), {Subset{0}}},
          {SystemShape(2, 2), {Subset{0, 1}}},
          {SystemShape(4, 2), {Subset{0, 1}, Subset{2, 3}}}};
}

inline SuiteReport verify_geometry(const SuiteOptions& opt) {
  detail::Stopwatch watch;
  SuiteReport rep;
  rep.name = "geometry";
  Rng rng(opt.seed);
  for (const auto& [shape, subsets] : geometry_cases()) {
    auto gen = make_consistent_instance(shape, subsets, derive_seed(opt.seed, shape.n()));
    const auto ex = extract_alphas(gen.instance);
    const DualBodyK body = make_dual_body(gen.instance, ex);
    const int dd = body.D();
    const auto spec = geometry_of(body);
    const double expect_r_outer = std::sqrt(dd + (1.0 + 2 * dd) * (1.0 + 2 * dd));
    const std::string tag = ", D=" + std::to_string(dd);
    rep.add("R" + tag, detail::fmt(expect_r_outer), detail::fmt(spec.outer_radius),
            std::abs(spec.outer_radius - expect_r_outer) <= 1e-12);
    rep.add("r" + tag, detail::fmt(1.0 / (4.0 * (dd + 1))), detail::fmt(spec.inner_radius),
            std::abs(spec.inner_radius - 1.0 / (4.0 * (dd + 1))) <= 1e-15);
    double worst = 0.0;
    bool ok = true;
    try {
      worst = body.certify_inner_ball(100, rng);
    } catch (const CertificateFailure&) {
      ok = false;
    }
    rep.add("max lambda_max(F(y)-(t+2)I) on 100 inner-ball samples" + tag, "<= -0.5", detail::fmt(worst), ok);
    const auto red = lc_to_lh(gen.instance, exact_lh_oracle());
    rep.add("max ||F(x)||/(2D+1) over LH queries" + tag, "<= 1", detail::fmt(red.max_norm_ratio),
            red.max_norm_ratio <= 1.0 + 1e-12);
  }
  rep.seconds = watch.seconds();
  return rep;
}

inline SuiteReport verify_perron(const SuiteOptions& opt, int count = 100) {
  detail::Stopwatch watch;
  SuiteReport rep;
  rep.name = "perron";
  const int n_hi = std::max(3, std::min(opt.n_max, 12));
  int good = 0;
  double floor = 0.0;
  for (int i = 0; i < count; ++i) {
    const int n = 3 + i % (n_hi - 2);
    Rng rng(derive_seed(opt.seed, static_cast<std::uint64_t>(i)));
    LocalHamiltonianInstance inst;
    inst.shape = SystemShape(n, 2);
    inst.terms = random_stoquastic_terms(inst.shape, random_subsets(n, 2, n + 1, rng), rng);
    const auto check = ground_state_nonneg_check(inst);
    floor = std::min(floor, check.most_negative);
    if (check.nonnegative) ++good;
  }
  rep.add("stoquastic ground states nonnegative, n in [3," + std::to_string(n_hi) + "]", detail::ratio(count, count),
          detail::ratio(good, count), good == count);
  rep.add("most negative amplitude", ">= -1e-8", detail::fmt(floor), floor >= -1e-8);
  rep.seconds = watch.seconds();
  return rep;
}

/// A reduced version of the round-trip protocols: a few instances of each
/// reduction against its exact or brute-force reference.
inline SuiteReport verify_roundtrip(const SuiteOptions& opt, int per_kind = 4) {
  detail::Stopwatch watch;
  SuiteReport rep;
  rep.name = "roundtrip";
  const int n_hi = std::max(3, std::min(opt.n_max, 4));
  auto count = [&](const std::string& what, auto&& body) {
    int good = 0;
    for (int i = 0; i < per_kind; ++i) good += body(i) ? 1 : 0;
    rep.add(what, detail::ratio(per_kind, per_kind), detail::ratio(good, per_kind), good == per_kind);
  };
  count("lh_to_lc vs lh_decide", [&](int i) {
    GenSpec g;
    g.kind = "lh";
    g.n = 3 + i % (n_hi - 2);
    g.offset = i % 2 ? 0.3 : -0.3;
    g.seed = derive_seed(opt.seed, 100 + i);
    const auto inst = std::get<LocalHamiltonianInstance>(generate_instance(g));
    return lh_to_lc_brute_force(inst).verdict == lh_decide(inst).verdict;
  });
  count("lc_to_lh vs brute_force_consistency", [&](int i) {
    GenSpec g;
    g.kind = "lc";
    g.n = 3 + i % (n_hi - 2);
    g.consistent = i % 2 == 0;
    g.seed = derive_seed(opt.seed, 200 + i);
    const auto inst = std::get<LocalConsistencyInstance>(generate_instance(g));
    const auto truth = brute_force_consistency(inst);
    const Verdict expect = truth.status == FeasibilityStatus::Feasible ? Verdict::Yes : Verdict::No;
    return lc_to_lh(inst, exact_lh_oracle()).verdict == expect;
  });
  count("stoq_lh_to_lc vs lh_decide", [&](int i) {
    GenSpec g;
    g.kind = "lh";
    g.stoquastic = true;
    g.n = 3 + i % (n_hi - 2);
    g.offset = i % 2 ? 0.3 : -0.3;
    g.seed = derive_seed(opt.seed, 300 + i);
    const auto inst = std::get<LocalHamiltonianInstance>(generate_instance(g));
    return stoq_lh_to_lc_brute_force(inst).verdict == lh_decide(inst).verdict;
  });
  count("stoq_lc_to_lh vs brute_force_consistency", [&](int i) {
    GenSpec g;
    g.kind = "lc";
    g.stoquastic = true;
    g.beta = 0.25;
    g.n = 3 + i % (n_hi - 2);
    g.consistent = i % 2 == 0;
    g.seed = derive_seed(opt.seed, 400 + i);
    const auto inst = std::get<LocalConsistencyInstance>(generate_instance(g));
    const auto truth = brute_force_consistency(inst);
    const Verdict expect = truth.status == FeasibilityStatus::Feasible ? Verdict::Yes : Verdict::No;
    const auto red = stoq_lc_to_lh(inst, exact_lh_oracle());
    return red.verdict == expect && red.nonstoquastic_queries == 0;
  });
  rep.seconds = watch.seconds();
  return rep;
}

inline SuiteReport verify_alternatives(const SuiteOptions& opt, int families = 30) {
  detail::Stopwatch watch;
  SuiteReport rep;
  rep.name = "alternatives";
  int good = 0;
  for (int i = 0; i < families; ++i) {
    Rng rng(derive_seed(opt.seed, static_cast<std::uint64_t>(i)));
    const int n_dim = std::uniform_int_distribution<int>(2, 8)(rng);
    const int count = std::uniform_int_distribution<int>(1, 4)(rng);
    const auto plant = i % 2 ? AlternativeFamily::Plant::Point : AlternativeFamily::Plant::State;
    const auto fam = make_alternative_family(n_dim, count, 0.1, plant, derive_seed(opt.seed, 1000 + i));
    const bool one = certify_alternative_one(fam).has_value();
    const bool two = certify_alternative_two(fam).has_value();
    if (one != two) ++good;
  }
  rep.add("families with exactly one certified alternative", detail::ratio(families, families),
          detail::ratio(good, families), good == families);
  rep.seconds = watch.seconds();
  return rep;
}

}  // namespace lclh
