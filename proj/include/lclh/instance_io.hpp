#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>

#include <json.hpp>

#include "lclh/consistency.hpp"
#include "lclh/hamiltonian.hpp"
#include "lclh/reductions.hpp"

namespace lclh {

using json = nlohmann::json;

inline constexpr const char* kFormatVersion = "1.0";

using Instance = std::variant<LocalHamiltonianInstance, LocalConsistencyInstance>;

namespace io {

inline json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json vector_to_json(const RVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

class FieldError : public InvalidArgument {
 public:
  FieldError(const std::string& path, const std::string& what) : InvalidArgument(path + ": " + what) {}
};

inline const json& field(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw FieldError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw FieldError(path + "." + key, "missing field");
  return *it;
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw FieldError(path, "expected a number");
  return j.get<double>();
}

inline int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw FieldError(path, "expected an integer");
  return j.get<int>();
}

inline CMatrix matrix_from_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw FieldError(path, "expected a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  CMatrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    const std::string rp = path + "[" + std::to_string(r) + "]";
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) throw FieldError(rp, "row length mismatch");
    for (Eigen::Index c = 0; c < n; ++c) {
      const auto& e = row[static_cast<std::size_t>(c)];
      const std::string ep = rp + "[" + std::to_string(c) + "]";
      if (!e.is_array() || e.size() != 2) throw FieldError(ep, "expected [re, im]");
      m(r, c) = cplx(number(e[0], ep + "[0]"), number(e[1], ep + "[1]"));
    }
  }
  return m;
}

inline Subset subset_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) throw FieldError(path, "expected an array of site indices");
  std::vector<int> sites;
  for (std::size_t i = 0; i < j.size(); ++i) sites.push_back(integer(j[i], path + "[" + std::to_string(i) + "]"));
  try {
    return Subset(sites);
  } catch (const InvalidArgument& e) {
    throw FieldError(path, e.what());
  }
}

inline json subset_to_json(const Subset& c) { return json(c.sites()); }

inline void require_local_dim(const CMatrix& m, const Subset& c, const SystemShape& shape, const std::string& path) {
  const auto want = detail::ipow(static_cast<std::size_t>(shape.d()), c.size());
  if (static_cast<std::size_t>(m.rows()) != want) {
    throw FieldError(path, "expected " + std::to_string(want) + "x" + std::to_string(want) + " for subset " +
                               c.to_string() + ", got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

// Instance-level checks (norms, PSD, thresholds) reported against the root.
template <typename Inst>
void validated(const Inst& inst) {
  try {
    inst.validate();
  } catch (const InvalidArgument& e) {
    throw FieldError("$", e.what());
  }
}

}  // namespace io

inline json to_json(const LocalHamiltonianInstance& inst) {
  json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "lh";
  j["shape"] = {{"n", inst.shape.n()}, {"d", inst.shape.d()}};
  j["stoquastic"] = is_stoquastic(inst).stoquastic;
  j["k"] = inst.k;
  j["a"] = inst.a;
  j["b"] = inst.b;
  j["s"] = inst.s;
  json terms = json::array();
  for (const auto& t : inst.terms) terms.push_back({{"subset", io::subset_to_json(t.subset)}, {"matrix", io::matrix_to_json(t.matrix)}});
  j["terms"] = std::move(terms);
  return j;
}

inline json to_json(const LocalConsistencyInstance& inst) {
  json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "lc";
  j["shape"] = {{"n", inst.shape.n()}, {"d", inst.shape.d()}};
  j["stoquastic"] = inst.mode == ConsistencyMode::Stoquastic;
  j["k"] = inst.k;
  j["beta"] = inst.beta;
  j["s"] = inst.s;
  json marginals = json::array();
  for (const auto& m : inst.marginals) {
    marginals.push_back({{"subset", io::subset_to_json(m.subset)}, {"matrix", io::matrix_to_json(m.rho)}});
  }
  j["marginals"] = std::move(marginals);
  return j;
}

inline json to_json(const Instance& inst) {
  return std::visit([](const auto& i) { return to_json(i); }, inst);
}

/// Parses and validates; every failure names the offending field.
inline Instance instance_from_json(const json& j) {
  using io::field;
  const auto& version = field(j, "format_version", "$");
  if (!version.is_string() || version.get<std::string>() != kFormatVersion) {
    throw io::FieldError("$.format_version", std::string("unsupported version, expected ") + kFormatVersion);
  }
  const auto& kind_j = field(j, "kind", "$");
  if (!kind_j.is_string()) throw io::FieldError("$.kind", "expected a string");
  const std::string kind = kind_j.get<std::string>();
  const auto& shape_j = field(j, "shape", "$");
  SystemShape shape;
  try {
    shape = SystemShape(io::integer(field(shape_j, "n", "$.shape"), "$.shape.n"),
                        io::integer(field(shape_j, "d", "$.shape.d"), "$.shape.d"));
  } catch (const io::FieldError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw io::FieldError("$.shape", e.what());
  }
  bool stoquastic = false;
  if (j.contains("stoquastic")) {
    if (!j["stoquastic"].is_boolean()) throw io::FieldError("$.stoquastic", "expected a boolean");
    stoquastic = j["stoquastic"].get<bool>();
  }
  const int k = io::integer(field(j, "k", "$"), "$.k");
  const int s = io::integer(field(j, "s", "$"), "$.s");

  if (kind == "lh") {
    LocalHamiltonianInstance inst;
    inst.shape = shape;
    inst.k = k;
    inst.s = s;
    inst.a = io::number(field(j, "a", "$"), "$.a");
    inst.b = io::number(field(j, "b", "$"), "$.b");
    const auto& terms = field(j, "terms", "$");
    if (!terms.is_array()) throw io::FieldError("$.terms", "expected an array");
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const std::string p = "$.terms[" + std::to_string(i) + "]";
      inst.terms.push_back({io::subset_from_json(field(terms[i], "subset", p), p + ".subset"),
                            io::matrix_from_json(field(terms[i], "matrix", p), p + ".matrix")});
      io::require_local_dim(inst.terms.back().matrix, inst.terms.back().subset, shape, p + ".matrix");
    }
    io::validated(inst);
    if (stoquastic && !is_stoquastic(inst).stoquastic) {
      throw io::FieldError("$.stoquastic", "flag set but a term has positive or complex off-diagonal entries");
    }
    return inst;
  }
  if (kind == "lc") {
    LocalConsistencyInstance inst;
    inst.shape = shape;
    inst.k = k;
    inst.s = s;
    inst.beta = io::number(field(j, "beta", "$"), "$.beta");
    inst.mode = stoquastic ? ConsistencyMode::Stoquastic : ConsistencyMode::Standard;
    const auto& marginals = field(j, "marginals", "$");
    if (!marginals.is_array()) throw io::FieldError("$.marginals", "expected an array");
    for (std::size_t i = 0; i < marginals.size(); ++i) {
      const std::string p = "$.marginals[" + std::to_string(i) + "]";
      inst.marginals.push_back({io::subset_from_json(field(marginals[i], "subset", p), p + ".subset"),
                                io::matrix_from_json(field(marginals[i], "matrix", p), p + ".matrix")});
      io::require_local_dim(inst.marginals.back().rho, inst.marginals.back().subset, shape, p + ".matrix");
    }
    io::validated(inst);
    return inst;
  }
  throw io::FieldError("$.kind", "expected \"lh\" or \"lc\"");
}

inline Instance parse_instance(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("parse error: ") + e.what());
  }
  return instance_from_json(j);
}

inline Instance read_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

inline std::string serialize(const Instance& inst) { return to_json(inst).dump(2) + "\n"; }

/// FNV-1a over the canonical (compact) serialization.
inline std::string instance_digest(const Instance& inst) {
  const std::string text = to_json(inst).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

inline json to_json(const Transcript& tr) {
  json j;
  j["iterations"] = tr.iterations;
  j["oracle_calls"] = tr.oracle_calls;
  j["budget"] = tr.budget;
  j["termination"] = tr.termination;
  j["unpromised"] = tr.unpromised;
  auto finite = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  j["best_value"] = finite(tr.best_value);
  j["upper_bound"] = finite(tr.upper_bound);
  j["delta_observed"] = finite(tr.delta_observed);
  j["initial_log_volume"] = finite(tr.initial_log_volume);
  j["final_log_volume"] = finite(tr.final_log_volume);
  json records = json::array();
  for (const auto& r : tr.records) {
    json rec;
    rec["iteration"] = r.iteration;
    rec["kind"] = r.kind == StepKind::Oracle ? "oracle" : "objective";
    rec["verdict"] = r.verdict == Membership::Member ? "MEMBER" : "NOT_MEMBER";
    if (r.point) rec["point"] = io::vector_to_json(*r.point);
    if (r.g.size() > 0) {
      rec["cut"] = {{"g", io::vector_to_json(r.g)}, {"c", r.c}};
      rec["depth"] = finite(r.depth);
    }
    rec["log_volume"] = finite(r.log_volume);
    records.push_back(std::move(rec));
  }
  j["records"] = std::move(records);
  return j;
}

inline json to_json(const ReductionReport& rep, bool with_transcript = false) {
  auto finite = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json j;
  j["reduction"] = rep.reduction;
  j["verdict"] = to_string(rep.verdict);
  j["early_no"] = rep.early_no;
  if (!rep.detail.empty()) j["detail"] = rep.detail;
  j["dimension"] = rep.dimension;
  j["outer_radius"] = rep.outer_radius;
  j["inner_radius"] = rep.inner_radius;
  j["engine_eps"] = rep.engine_eps;
  j["lh_queries"] = rep.lh_queries;
  j["lc_queries"] = rep.lc_queries;
  j["lc_unresolved"] = rep.lc_unresolved;
  j["lc_fw_iterations"] = rep.lc_fw_iterations;
  j["box_cuts"] = rep.box_cuts;
  j["psd_cuts"] = rep.psd_cuts;
  j["stoquastic_queries"] = rep.stoquastic_queries;
  j["nonstoquastic_queries"] = rep.nonstoquastic_queries;
  j["max_norm_ratio"] = rep.max_norm_ratio;
  j["value_lower"] = finite(rep.value_lower);
  j["value_upper"] = finite(rep.value_upper);
  j["engine_iterations"] = rep.transcript.iterations;
  j["termination"] = rep.transcript.termination;
  j["unpromised"] = rep.transcript.unpromised;
  if (with_transcript) j["transcript"] = to_json(rep.transcript);
  return j;
}

}  // namespace lclh
