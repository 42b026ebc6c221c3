#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "lclh/qlinalg.hpp"

namespace lclh {

/// Single-site generator of the qudit basis. For d = 2, X_01, Y_01 and Z_0 are
/// the Pauli matrices X, Y, Z.
struct QuditGenerator {
  enum class Kind { X, Y, Z };
  Kind kind = Kind::Z;
  int i = 0;
  int j = 1;  // unused for Z
  int d = 2;

  /// Codes number {I} followed by all generators: 0 = I, then X_ij in
  /// lexicographic (i,j) order, then Y_ij, then Z_0 .. Z_{d-2}.
  static QuditGenerator from_code(int d, int code);
  int code() const;
  std::string name() const;

  friend bool operator==(const QuditGenerator&, const QuditGenerator&) = default;
};

inline int generator_count(int d) { return d * d - 1; }

inline QuditGenerator QuditGenerator::from_code(int d, int code) {
  if (d < 2) throw InvalidArgument("QuditGenerator: d must be >= 2");
  if (code < 1 || code > generator_count(d)) {
    throw InvalidArgument("QuditGenerator: code " + std::to_string(code) + " out of range for d=" + std::to_string(d));
  }
  const int pairs = d * (d - 1) / 2;
  int c = code - 1;
  QuditGenerator g;
  g.d = d;
  if (c < 2 * pairs) {
    g.kind = c < pairs ? Kind::X : Kind::Y;
    c %= pairs;
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j, --c) {
        if (c == 0) {
          g.i = i;
          g.j = j;
          return g;
        }
      }
    }
  }
  g.kind = Kind::Z;
  g.i = c - 2 * pairs;
  g.j = 0;
  return g;
}

inline int QuditGenerator::code() const {
  const int pairs = d * (d - 1) / 2;
  if (kind == Kind::Z) return 1 + 2 * pairs + i;
  // offset of pair (i,j) in lexicographic order
  int offset = 0;
  for (int a = 0; a < i; ++a) offset += d - 1 - a;
  offset += j - i - 1;
  return 1 + (kind == Kind::Y ? pairs : 0) + offset;
}

inline std::string QuditGenerator::name() const {
  switch (kind) {
    case Kind::X: return "X" + std::to_string(i) + std::to_string(j);
    case Kind::Y: return "Y" + std::to_string(i) + std::to_string(j);
    case Kind::Z: return "Z" + std::to_string(i);
  }
  return "?";
}

inline CMatrix qudit_generator_matrix(const QuditGenerator& g) {
  const int d = g.d;
  if (d < 2) throw InvalidArgument("qudit_generator_matrix: d must be >= 2");
  CMatrix m = CMatrix::Zero(d, d);
  if (g.kind == QuditGenerator::Kind::Z) {
    if (g.i < 0 || g.i > d - 2) throw InvalidArgument("qudit_generator_matrix: Z index out of range");
    for (int a = 0; a <= g.i; ++a) m(a, a) = 1.0 / (g.i + 1);
    m(g.i + 1, g.i + 1) = -1.0;
    return m;
  }
  if (g.i < 0 || g.j <= g.i || g.j >= d) throw InvalidArgument("qudit_generator_matrix: (i,j) out of range");
  if (g.kind == QuditGenerator::Kind::X) {
    m(g.j, g.i) = 1.0;
    m(g.i, g.j) = 1.0;
  } else {
    m(g.j, g.i) = cplx(0, 1);
    m(g.i, g.j) = cplx(0, -1);
  }
  return m;
}

/// Matrix for a single-site code (0 = identity).
inline CMatrix site_matrix(int d, int code) {
  if (code == 0) return CMatrix::Identity(d, d);
  return qudit_generator_matrix(QuditGenerator::from_code(d, code));
}

/// Tensor product of single-site generators, one code per site (0 = I).
/// For qubits this is a Pauli string over {I, X, Y, Z}.
struct ProductLabel {
  int d = 2;
  std::vector<int> codes;

  Subset support() const {
    std::vector<int> sites;
    for (std::size_t i = 0; i < codes.size(); ++i) {
      if (codes[i] != 0) sites.push_back(static_cast<int>(i));
    }
    return Subset(std::move(sites));
  }
  bool is_identity() const { return support().empty(); }

  /// Number of Y-type factors (the matrix is real iff this is even).
  int y_count() const {
    int count = 0;
    for (int c : codes) {
      if (c != 0 && QuditGenerator::from_code(d, c).kind == QuditGenerator::Kind::Y) ++count;
    }
    return count;
  }

  /// "IXZY" for qubits; "X01@0*Z1@2" for d > 2 (identity: "I").
  std::string to_string() const {
    if (d == 2) {
      static const char letters[] = {'I', 'X', 'Y', 'Z'};
      std::string out;
      for (int c : codes) out += letters[c];
      return out;
    }
    std::string out;
    for (std::size_t i = 0; i < codes.size(); ++i) {
      if (codes[i] == 0) continue;
      if (!out.empty()) out += "*";
      out += QuditGenerator::from_code(d, codes[i]).name() + "@" + std::to_string(i);
    }
    return out.empty() ? "I" : out;
  }

  /// Realized matrix on the sites of `frame` (which must contain the support).
  CMatrix matrix_on(const Subset& frame) const {
    CMatrix out = CMatrix::Identity(1, 1);
    for (int site : frame.sites()) out = kron(out, site_matrix(d, codes[static_cast<std::size_t>(site)]));
    return out;
  }

  friend bool operator==(const ProductLabel&, const ProductLabel&) = default;
  friend auto operator<=>(const ProductLabel& a, const ProductLabel& b) { return a.codes <=> b.codes; }
};

using PauliString = ProductLabel;

inline PauliString pauli_from_string(const std::string& s) {
  PauliString p;
  p.d = 2;
  for (char ch : s) {
    switch (ch) {
      case 'I': p.codes.push_back(0); break;
      case 'X': p.codes.push_back(1); break;
      case 'Y': p.codes.push_back(2); break;
      case 'Z': p.codes.push_back(3); break;
      default: throw InvalidArgument(std::string("pauli_from_string: bad character '") + ch + "'");
    }
  }
  return p;
}

/// X^(i)_st = (|s><t| + |t><s|)/2 on subset C_i, with s <= t as local basis indices.
struct MatrixElementObservable {
  int subset_index = 0;
  std::size_t s = 0;
  std::size_t t = 0;

  std::string to_string(int d, std::size_t k) const {
    auto digits = [&](std::size_t v) {
      std::string out(k, '0');
      for (std::size_t p = k; p-- > 0;) {
        out[p] = static_cast<char>('0' + v % static_cast<std::size_t>(d));
        v /= static_cast<std::size_t>(d);
      }
      return out;
    };
    return "X[" + digits(s) + "," + digits(t) + "]@C" + std::to_string(subset_index);
  }

  friend bool operator==(const MatrixElementObservable&, const MatrixElementObservable&) = default;
};

/// One coordinate of the observable family a reduction is parameterized by.
struct ObservableElement {
  std::variant<ProductLabel, MatrixElementObservable> label;
  Subset support;  // sites the local matrix acts on
  CMatrix local;   // realized matrix on `support`
  double tr_sq = 0.0;
  std::string name;

  bool is_product() const { return std::holds_alternative<ProductLabel>(label); }

  /// P|_C for a frame C containing the support.
  CMatrix restricted(const Subset& frame, int d) const {
    if (frame == support) return local;
    if (!support.is_within(frame)) throw InvalidArgument("ObservableElement: support not inside frame");
    if (is_product()) return std::get<ProductLabel>(label).matrix_on(frame);
    SystemShape frame_shape(static_cast<int>(frame.size()), d);
    std::vector<int> pos;
    for (int site : support.sites()) pos.push_back(frame.position(site));
    return embed(local, Subset(std::move(pos)), frame_shape);
  }

  /// Tr((P|_C)^2); differs from tr_sq by d^(|C| - |support|).
  double tr_sq_on(const Subset& frame, int d) const {
    return tr_sq * static_cast<double>(detail::ipow(static_cast<std::size_t>(d), frame.size() - support.size()));
  }
};

inline ObservableElement make_element(const ProductLabel& p) {
  ObservableElement e;
  e.label = p;
  e.support = p.support();
  e.local = p.matrix_on(e.support);
  e.tr_sq = detail::inner(e.local, e.local);
  e.name = p.to_string();
  return e;
}

inline ObservableElement make_element(const MatrixElementObservable& x, const Subset& c, int d) {
  const std::size_t dim = detail::ipow(static_cast<std::size_t>(d), c.size());
  if (x.s > x.t || x.t >= dim) throw InvalidArgument("MatrixElementObservable: need s <= t < d^|C|");
  ObservableElement e;
  e.label = x;
  e.support = c;
  e.local = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  const auto s = static_cast<Eigen::Index>(x.s);
  const auto t = static_cast<Eigen::Index>(x.t);
  e.local(s, t) += 0.5;
  e.local(t, s) += 0.5;
  e.tr_sq = detail::inner(e.local, e.local);
  e.name = x.to_string(d, c.size());
  return e;
}

namespace detail {

// Every code assignment on `c` (row-major, site order of c), identity first.
inline std::vector<ProductLabel> products_on(const Subset& c, const SystemShape& shape) {
  const int d = shape.d();
  const int per_site = d * d;
  const std::size_t total = ipow(static_cast<std::size_t>(per_site), c.size());
  std::vector<ProductLabel> out;
  out.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    ProductLabel p;
    p.d = d;
    p.codes.assign(static_cast<std::size_t>(shape.n()), 0);
    std::size_t rem = idx;
    for (std::size_t pos = c.size(); pos-- > 0;) {
      p.codes[static_cast<std::size_t>(c[pos])] = static_cast<int>(rem % static_cast<std::size_t>(per_site));
      rem /= static_cast<std::size_t>(per_site);
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace detail

/// The non-identity products supported inside some C_i, each listed once, in
/// order of the first subset containing them, then lexicographically.
inline std::vector<ObservableElement> local_basis_set(const std::vector<Subset>& subsets, const SystemShape& shape) {
  std::vector<ObservableElement> out;
  std::set<std::vector<int>> seen;
  for (const auto& c : subsets) {
    c.require_within(shape);
    for (auto& p : detail::products_on(c, shape)) {
      if (p.is_identity()) continue;
      if (!seen.insert(p.codes).second) continue;
      out.push_back(make_element(p));
    }
  }
  return out;
}

inline std::vector<ObservableElement> local_pauli_set(const std::vector<Subset>& subsets, int n) {
  return local_basis_set(subsets, SystemShape(n, 2));
}

/// Keeps the elements whose realized matrix is real (even number of Y factors).
inline std::vector<ObservableElement> real_pauli_subset(const std::vector<ObservableElement>& set) {
  std::vector<ObservableElement> out;
  for (const auto& e : set) {
    if (!e.is_product()) throw InvalidArgument("real_pauli_subset: expects product observables");
    if (std::get<ProductLabel>(e.label).y_count() % 2 == 0) out.push_back(e);
  }
  return out;
}

/// All d^(2n) products on n sites, identity included.
inline std::vector<ObservableElement> all_products(const SystemShape& shape) {
  std::vector<int> all(static_cast<std::size_t>(shape.n()));
  for (int i = 0; i < shape.n(); ++i) all[static_cast<std::size_t>(i)] = i;
  std::vector<ObservableElement> out;
  for (auto& p : detail::products_on(Subset(all), shape)) out.push_back(make_element(p));
  return out;
}

/// Stoquastic coordinates: X^(i)_st for every subset and every s <= t. No
/// merging across subsets.
inline std::vector<ObservableElement> matrix_element_set(const std::vector<Subset>& subsets, const SystemShape& shape) {
  std::vector<ObservableElement> out;
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    subsets[i].require_within(shape);
    const std::size_t dim = detail::ipow(static_cast<std::size_t>(shape.d()), subsets[i].size());
    for (std::size_t s = 0; s < dim; ++s) {
      for (std::size_t t = s; t < dim; ++t) {
        out.push_back(make_element(MatrixElementObservable{static_cast<int>(i), s, t}, subsets[i], shape.d()));
      }
    }
  }
  return out;
}

/// Tr(AB) over {I} followed by the d^2 - 1 generators, indexed by code.
inline RMatrix orthogonality_table(int d) {
  const int count = d * d;
  std::vector<CMatrix> mats;
  for (int c = 0; c < count; ++c) mats.push_back(site_matrix(d, c));
  RMatrix table(count, count);
  for (int a = 0; a < count; ++a) {
    for (int b = 0; b < count; ++b) table(a, b) = (mats[a] * mats[b]).trace().real();
  }
  return table;
}

/// Tr(P sigma) for P supported inside sigma's system.
inline double expectation(const ObservableElement& p, const DensityMatrix& sigma) {
  p.support.require_within(sigma.shape());
  if (p.support.empty()) return detail::real_part(p.local(0, 0));
  const CMatrix reduced = sigma.reduced(p.support);
  return (p.local * reduced).trace().real();
}

/// Local-state version: Tr(P|_C rho_C).
inline double expectation_local(const ObservableElement& p, const CMatrix& rho_c, const Subset& c, int d) {
  return (p.restricted(c, d) * rho_c).trace().real();
}

/// rho_C = I/d^|C| + sum_P alpha_P P|_C / Tr((P|_C)^2) over the non-identity
/// products supported in C. `alphas` is keyed by label name; every product
/// supported in C must be present.
inline CMatrix reconstruct_local_state(const std::map<std::string, double>& alphas, const Subset& c,
                                       const SystemShape& shape) {
  c.require_within(shape);
  const auto dim = static_cast<Eigen::Index>(detail::ipow(static_cast<std::size_t>(shape.d()), c.size()));
  CMatrix rho = CMatrix::Identity(dim, dim) / static_cast<double>(dim);
  for (const auto& p : detail::products_on(c, shape)) {
    if (p.is_identity()) continue;
    const std::string key = p.to_string();
    auto it = alphas.find(key);
    if (it == alphas.end()) throw InvalidArgument("reconstruct_local_state: missing expectation for " + key);
    const CMatrix m = p.matrix_on(c);
    rho += it->second / detail::inner(m, m) * m;
  }
  return rho;
}

/// Same reconstruction with coordinates aligned to `set`.
inline CMatrix reconstruct_local_state(const std::vector<ObservableElement>& set, const RVector& alphas,
                                       const Subset& c, const SystemShape& shape) {
  if (static_cast<std::size_t>(alphas.size()) != set.size()) {
    throw InvalidArgument("reconstruct_local_state: coordinate count mismatch");
  }
  std::map<std::string, double> keyed;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set[i].support.is_within(c)) keyed[set[i].name] = alphas(static_cast<Eigen::Index>(i));
  }
  return reconstruct_local_state(keyed, c, shape);
}

}  // namespace lclh
