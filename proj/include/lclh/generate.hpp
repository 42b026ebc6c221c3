#pragma once

#include <cstdint>
#include <string>

#include "lclh/consistency.hpp"
#include "lclh/hamiltonian.hpp"
#include "lclh/instance_io.hpp"

namespace lclh {

enum class Topology { Chain, Random };

struct GenSpec {
  std::string kind = "lh";  // "lh" or "lc"
  int n = 3;
  int d = 2;
  Topology topology = Topology::Chain;
  int k = 2;
  int terms = 0;  // random topology: number of subsets (0 means n)
  bool stoquastic = false;
  bool consistent = true;
  double beta = 0.5;
  double gap = 0.2;
  double offset = 0.3;  // LH: thresholds centered at lambda_min + offset
  PlantKind plant = PlantKind::Auto;
  std::uint64_t seed = 1;
};

inline std::vector<Subset> generate_subsets(const GenSpec& spec, Rng& rng) {
  if (spec.topology == Topology::Chain) return chain_subsets(spec.n, spec.k);
  return random_subsets(spec.n, spec.k, spec.terms > 0 ? spec.terms : spec.n, rng);
}

/// Deterministic in (spec, seed).
inline Instance generate_instance(const GenSpec& spec) {
  const SystemShape shape(spec.n, spec.d);
  shape.require_within_cap();
  if (spec.k < 1 || spec.k > spec.n) throw InvalidArgument("gen: need 1 <= k <= n");
  Rng rng(spec.seed);
  const auto subsets = generate_subsets(spec, rng);
  if (spec.kind == "lh") {
    if (!(spec.gap > 0)) throw InvalidArgument("gen: gap must be positive");
    LocalHamiltonianInstance inst;
    inst.shape = shape;
    inst.k = spec.k;
    inst.terms = spec.stoquastic ? random_stoquastic_terms(shape, subsets, rng) : random_terms(shape, subsets, rng);
    place_thresholds(inst, lh_decide(inst).lambda_min, spec.offset, spec.gap);
    return inst;
  }
  if (spec.kind == "lc") {
    const auto mode = spec.stoquastic ? ConsistencyMode::Stoquastic : ConsistencyMode::Standard;
    const double ceiling = spec.stoquastic ? 1.0 : 2.0;
    if (!(spec.beta > 0) || spec.beta > ceiling) {
      throw InvalidArgument("gen: beta " + std::to_string(spec.beta) + " outside (0, " + std::to_string(ceiling) + "]");
    }
    const auto seed = derive_seed(spec.seed, 1);
    if (spec.consistent) return make_consistent_instance(shape, subsets, seed, mode, spec.beta).instance;
    InconsistentOptions opt;
    opt.plant = spec.plant;
    return make_inconsistent_instance(shape, subsets, spec.beta, seed, mode, opt).instance;
  }
  throw InvalidArgument("gen: kind must be lh or lc");
}

}  // namespace lclh
