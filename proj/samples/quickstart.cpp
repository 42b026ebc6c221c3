// Decide a small LH instance directly and through the consistency body, then
// decide an LC instance through an exact LH oracle.

#include <iostream>

#include "lclh/lclh.hpp"

using namespace lclh;

int main() {
  GenSpec spec;
  spec.kind = "lh";
  spec.n = 4;
  spec.offset = -0.3;  // NO instance: lambda_min sits 0.3 above the window center
  spec.seed = 12;
  const auto lh = std::get<LocalHamiltonianInstance>(generate_instance(spec));

  const auto direct = lh_decide(lh);
  const auto via_lc = lh_to_lc_brute_force(lh);
  std::cout << "LH  lambda_min=" << direct.lambda_min << "  exact=" << to_string(direct.verdict)
            << "  via LC=" << to_string(via_lc.verdict) << "  (" << via_lc.lc_queries << " LC queries, "
            << via_lc.psd_cuts << " PSD cuts)\n";

  // Two marginals that disagree about the shared qubit.
  const auto lc = make_inconsistent_instance(SystemShape(3, 2), chain_subsets(3, 2), 0.5, 7).instance;
  const auto truth = brute_force_consistency(lc);
  const auto via_lh = lc_to_lh(lc, exact_lh_oracle());
  std::cout << "LC  brute force=" << to_string(truth.status) << " (violation >= " << truth.violation_lower_bound
            << ")  via LH=" << to_string(via_lh.verdict) << "  (" << via_lh.lh_queries << " LH queries)\n";

  std::cout << to_json(via_lh).dump(2) << "\n";
}
