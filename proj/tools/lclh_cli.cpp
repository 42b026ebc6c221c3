// Command-line front end: generate instances, solve them directly or through
// the reductions, and run the verification suites.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "lclh/lclh.hpp"

namespace {

using namespace lclh;

enum ExitCode { kYes = 0, kNo = 1, kInputError = 2, kCapError = 3 };

struct GenArgs {
  GenSpec spec;
  std::string topology = "chain";
  std::string plant = "auto";
  bool inconsistent = false;
  std::string out;
};

struct SolveArgs {
  std::string file;
  std::string method = "exact";
  std::string trace;
  std::string mode = "separation";
  bool verify = false;
  bool standard = false;
  int max_iterations = 0;
};

struct VerifyArgs {
  std::string suite = "all";
  int n_max = 3;
  std::uint64_t seed = 1;
  int jobs = 1;
};

int run_gen(GenArgs& args) {
  if (args.topology == "chain") args.spec.topology = Topology::Chain;
  else if (args.topology == "random") args.spec.topology = Topology::Random;
  else throw InvalidArgument("--topology must be chain or random");
  if (args.plant == "auto") args.spec.plant = PlantKind::Auto;
  else if (args.plant == "overlap") args.spec.plant = PlantKind::Overlap;
  else if (args.plant == "frustration") args.spec.plant = PlantKind::Frustration;
  else if (args.plant == "domination") args.spec.plant = PlantKind::Domination;
  else throw InvalidArgument("--plant must be auto, overlap, frustration or domination");
  if (args.inconsistent) args.spec.consistent = false;
  const Instance inst = generate_instance(args.spec);
  const std::string text = serialize(inst);
  if (args.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(args.out);
    if (!out) throw InvalidArgument("cannot write " + args.out);
    out << text;
    std::cerr << "wrote " << args.out << " (digest " << instance_digest(inst) << ")\n";
  }
  return kYes;
}

Verdict consistency_verdict(const ConsistencyResult& r) {
  if (r.status == FeasibilityStatus::Feasible) return Verdict::Yes;
  if (r.status == FeasibilityStatus::Infeasible) return Verdict::No;
  throw BudgetExhausted("brute-force consistency oracle undecided after " + std::to_string(r.iterations) +
                        " iterations (phi " + std::to_string(r.phi) + ", lower bound " + std::to_string(r.phi_lower) +
                        ")");
}

int exit_for(Verdict v) { return v == Verdict::Yes ? kYes : kNo; }

int run_solve(const SolveArgs& args) {
  const Instance inst = read_instance_file(args.file);
  const bool is_lh = std::holds_alternative<LocalHamiltonianInstance>(inst);
  ReductionOptions ropt;
  if (args.mode == "membership") ropt.engine.mode = OracleMode::MembershipOnly;
  else if (args.mode != "separation") throw InvalidArgument("--mode must be separation or membership");
  ropt.engine.max_iterations = args.max_iterations;
  ropt.engine.record_points = !args.trace.empty();

  json report;
  report["instance_digest"] = instance_digest(inst);
  report["kind"] = is_lh ? "lh" : "lc";
  report["method"] = args.method;
  const auto start = std::chrono::steady_clock::now();
  Verdict verdict = Verdict::GapViolated;
  std::optional<ReductionReport> reduction;

  auto exact = [&]() -> Verdict {
    if (is_lh) {
      const auto d = lh_decide(std::get<LocalHamiltonianInstance>(inst));
      report["lambda_min"] = d.lambda_min;
      return d.verdict;
    }
    const auto r = brute_force_consistency(std::get<LocalConsistencyInstance>(inst));
    report["brute_force"] = {{"status", to_string(r.status)},
                             {"phi", r.phi},
                             {"phi_lower", r.phi_lower},
                             {"iterations", r.iterations},
                             {"violation_lower_bound", r.violation_lower_bound}};
    return consistency_verdict(r);
  };

  if (args.method == "exact" || args.method == "brute-force") {
    verdict = exact();
  } else if (args.method == "via-lc") {
    if (!is_lh) throw InvalidArgument("--method via-lc needs an lh instance");
    const auto& lh = std::get<LocalHamiltonianInstance>(inst);
    const bool stoq = !args.standard && is_stoquastic(lh).stoquastic;
    reduction = stoq ? stoq_lh_to_lc_brute_force(lh, ropt) : lh_to_lc_brute_force(lh, ropt);
    verdict = reduction->verdict;
  } else if (args.method == "via-lh") {
    if (is_lh) throw InvalidArgument("--method via-lh needs an lc instance");
    const auto& lc = std::get<LocalConsistencyInstance>(inst);
    reduction = lc.mode == ConsistencyMode::Stoquastic ? stoq_lc_to_lh(lc, exact_lh_oracle(), ropt)
                                                       : lc_to_lh(lc, exact_lh_oracle(), ropt);
    verdict = reduction->verdict;
  } else {
    throw InvalidArgument("--method must be exact, via-lc, via-lh or brute-force");
  }
  if (reduction) {
    report["reduction"] = to_json(*reduction);
    report["oracle_calls"] = reduction->transcript.oracle_calls;
  }
  if (args.verify && reduction) {
    const Verdict reference = exact();
    report["cross_check"] = {{"reference", to_string(reference)}, {"agree", reference == verdict}};
  }
  report["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!args.trace.empty()) {
    std::ofstream out(args.trace);
    if (!out) throw InvalidArgument("cannot write trace " + args.trace);
    out << (reduction ? to_json(reduction->transcript) : json::object()).dump(1) << "\n";
  }
  std::cout << "VERDICT " << to_string(verdict) << "\n" << report.dump(2) << "\n";
  return exit_for(verdict);
}

int run_verify(const VerifyArgs& args) {
  SuiteOptions opt;
  opt.n_max = args.n_max;
  opt.seed = args.seed;
  std::vector<SuiteReport> reports;
  const bool all = args.suite == "all";
  bool known = all;
  if (all || args.suite == "orthogonality") known = true, reports.push_back(verify_orthogonality(opt));
  if (all || args.suite == "geometry") known = true, reports.push_back(verify_geometry(opt));
  if (all || args.suite == "perron") known = true, reports.push_back(verify_perron(opt));
  if (all || args.suite == "roundtrip") known = true, reports.push_back(verify_roundtrip(opt));
  if (all || args.suite == "alternatives") known = true, reports.push_back(verify_alternatives(opt));
  if (!known) throw InvalidArgument("unknown suite " + args.suite);
  bool ok = true;
  for (const auto& rep : reports) {
    std::cout << "== " << rep.name << " (" << std::fixed << std::setprecision(2) << rep.seconds << " s)\n";
    std::cout.unsetf(std::ios::fixed);
    for (const auto& row : rep.rows) {
      std::cout << "  " << (row.ok ? "ok  " : "FAIL") << "  " << std::left << std::setw(64) << row.quantity
                << " expected " << std::setw(12) << row.expected << " observed " << row.observed << "\n";
    }
    ok = ok && rep.passed();
  }
  std::cout << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? kYes : kNo;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local Hamiltonian / Local Consistency toolkit"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate an instance file");
  gen_cmd->add_option("--kind", gen.spec.kind, "lh or lc")->check(CLI::IsMember({"lh", "lc"}));
  gen_cmd->add_option("--n", gen.spec.n, "Number of sites");
  gen_cmd->add_option("--d", gen.spec.d, "Local dimension");
  gen_cmd->add_option("--topology", gen.topology, "chain or random");
  gen_cmd->add_option("--k", gen.spec.k, "Locality");
  gen_cmd->add_option("--terms", gen.spec.terms, "Number of subsets for random topology (default n)");
  gen_cmd->add_flag("--stoquastic", gen.spec.stoquastic, "Stoquastic terms / stoquastic consistency semantics");
  auto* consistent_flag = gen_cmd->add_flag("--consistent", "Consistent LC instance (default)");
  auto* inconsistent_flag = gen_cmd->add_flag("--inconsistent", gen.inconsistent, "Certified-inconsistent LC instance");
  consistent_flag->excludes(inconsistent_flag);
  gen_cmd->add_option("--beta", gen.spec.beta, "LC promise gap");
  gen_cmd->add_option("--gap", gen.spec.gap, "LH promise gap b - a");
  gen_cmd->add_option("--offset", gen.spec.offset, "LH threshold center minus lambda_min (positive: YES)");
  gen_cmd->add_option("--plant", gen.plant, "Inconsistency plant: auto, overlap, frustration, domination");
  gen_cmd->add_option("--seed", gen.spec.seed, "Random seed");
  gen_cmd->add_option("--out", gen.out, "Output path (default stdout)");

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Decide an instance");
  solve_cmd->add_option("file", solve.file, "Instance file")->required();
  solve_cmd->add_option("--method", solve.method, "exact, via-lc, via-lh or brute-force");
  solve_cmd->add_option("--trace", solve.trace, "Write the engine transcript to this path");
  solve_cmd->add_option("--mode", solve.mode, "separation or membership");
  solve_cmd->add_option("--max-iterations", solve.max_iterations, "Override the engine iteration budget");
  solve_cmd->add_flag("--verify", solve.verify, "Cross-check against the direct method");
  solve_cmd->add_flag("--standard", solve.standard, "Use standard semantics even for stoquastic LH input");

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "Run a verification suite");
  verify_cmd->add_option("--suite", verify.suite, "orthogonality, geometry, perron, roundtrip, alternatives or all");
  verify_cmd->add_option("--n-max", verify.n_max, "Largest system size");
  verify_cmd->add_option("--seed", verify.seed, "Random seed");
  verify_cmd->add_option("--jobs", verify.jobs, "Accepted for compatibility; suites run sequentially");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*solve_cmd) return run_solve(solve);
    if (*verify_cmd) return run_verify(verify);
  } catch (const InvalidArgument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const CertificateFailure& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCapError;
  }
  return kInputError;
}
