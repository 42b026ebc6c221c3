#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "lclh/core.hpp"

namespace lclh {

/// n sites of uniform local dimension d. Sites are numbered 0..n-1 and site 0
/// is the leftmost (most significant) tensor factor.
class SystemShape {
 public:
  SystemShape() = default;
  SystemShape(int n, int d = 2) : n_(n), d_(d) {
    if (n < 1) throw InvalidArgument("SystemShape: n must be >= 1");
    if (d < 2) throw InvalidArgument("SystemShape: d must be >= 2");
  }

  int n() const { return n_; }
  int d() const { return d_; }
  std::size_t dim() const { return detail::ipow(static_cast<std::size_t>(d_), static_cast<std::size_t>(n_)); }

  void require_within_cap(std::size_t cap = kDefaultDimensionCap) const {
    // d^n can overflow long before it is computed, so compare in log space first.
    if (n_ * std::log(static_cast<double>(d_)) > std::log(static_cast<double>(cap)) + 1e-9 || dim() > cap) {
      std::ostringstream os;
      os << "dimension " << d_ << "^" << n_ << " exceeds cap " << cap;
      throw DimensionCapExceeded(os.str());
    }
  }

  friend bool operator==(const SystemShape&, const SystemShape&) = default;

 private:
  int n_ = 1;
  int d_ = 2;
};

/// Sorted set of distinct site indices.
class Subset {
 public:
  Subset() = default;
  explicit Subset(std::vector<int> sites) : sites_(std::move(sites)) {
    for (std::size_t i = 0; i < sites_.size(); ++i) {
      if (sites_[i] < 0) throw InvalidArgument("Subset: negative site index");
      if (i > 0 && sites_[i] <= sites_[i - 1]) throw InvalidArgument("Subset: sites must be strictly ascending");
    }
  }
  Subset(std::initializer_list<int> sites) : Subset(std::vector<int>(sites)) {}

  /// Sorts and deduplicates instead of rejecting.
  static Subset normalized(std::vector<int> sites) {
    std::sort(sites.begin(), sites.end());
    sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
    return Subset(std::move(sites));
  }

  const std::vector<int>& sites() const { return sites_; }
  std::size_t size() const { return sites_.size(); }
  bool empty() const { return sites_.empty(); }
  int operator[](std::size_t i) const { return sites_[i]; }

  bool contains(int site) const { return std::binary_search(sites_.begin(), sites_.end(), site); }

  bool is_within(const Subset& outer) const {
    return std::includes(outer.sites_.begin(), outer.sites_.end(), sites_.begin(), sites_.end());
  }

  bool intersects(const Subset& other) const {
    auto a = sites_.begin();
    auto b = other.sites_.begin();
    while (a != sites_.end() && b != other.sites_.end()) {
      if (*a == *b) return true;
      if (*a < *b) ++a; else ++b;
    }
    return false;
  }

  Subset intersection(const Subset& other) const {
    std::vector<int> out;
    std::set_intersection(sites_.begin(), sites_.end(), other.sites_.begin(), other.sites_.end(),
                          std::back_inserter(out));
    return Subset(std::move(out));
  }

  /// Position of `site` inside this subset; -1 when absent.
  int position(int site) const {
    auto it = std::lower_bound(sites_.begin(), sites_.end(), site);
    if (it == sites_.end() || *it != site) return -1;
    return static_cast<int>(it - sites_.begin());
  }

  void require_within(const SystemShape& shape) const {
    if (!sites_.empty() && sites_.back() >= shape.n()) {
      throw InvalidArgument("Subset: site " + std::to_string(sites_.back()) + " outside system of " +
                            std::to_string(shape.n()) + " sites");
    }
  }

  std::string to_string() const {
    std::string out = "{";
    for (std::size_t i = 0; i < sites_.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(sites_[i]);
    }
    return out + "}";
  }

  friend bool operator==(const Subset&, const Subset&) = default;
  friend auto operator<=>(const Subset&, const Subset&) = default;

 private:
  std::vector<int> sites_;
};

/// Index bookkeeping for splitting the full basis into (kept sites, remaining
/// sites). full(rest, local) returns the full basis index whose digits on the
/// kept sites spell `local` and on the other sites spell `rest`.
class SiteIndexer {
 public:
  SiteIndexer() = default;
  SiteIndexer(const SystemShape& shape, const Subset& keep) {
    keep.require_within(shape);
    const auto d = static_cast<std::size_t>(shape.d());
    local_dim_ = detail::ipow(d, keep.size());
    rest_dim_ = detail::ipow(d, static_cast<std::size_t>(shape.n()) - keep.size());
    const std::size_t full_dim = local_dim_ * rest_dim_;
    table_.assign(full_dim, 0);
    std::vector<int> digits(static_cast<std::size_t>(shape.n()));
    for (std::size_t z = 0; z < full_dim; ++z) {
      std::size_t rem = z;
      for (int site = shape.n() - 1; site >= 0; --site) {
        digits[static_cast<std::size_t>(site)] = static_cast<int>(rem % d);
        rem /= d;
      }
      std::size_t local = 0;
      std::size_t rest = 0;
      for (int site = 0; site < shape.n(); ++site) {
        const auto digit = static_cast<std::size_t>(digits[static_cast<std::size_t>(site)]);
        if (keep.contains(site)) local = local * d + digit;
        else rest = rest * d + digit;
      }
      table_[rest * local_dim_ + local] = z;
    }
  }

  std::size_t local_dim() const { return local_dim_; }
  std::size_t rest_dim() const { return rest_dim_; }
  std::size_t full(std::size_t rest, std::size_t local) const { return table_[rest * local_dim_ + local]; }

  template <typename Derived>
  Mat<typename Derived::Scalar> embed(const Eigen::MatrixBase<Derived>& local) const {
    using Scalar = typename Derived::Scalar;
    const auto full_dim = static_cast<Eigen::Index>(local_dim_ * rest_dim_);
    Mat<Scalar> out = Mat<Scalar>::Zero(full_dim, full_dim);
    add_embedded(local, out);
    return out;
  }

  /// out += local (x) identity, without materializing the embedding.
  template <typename Derived, typename Scalar>
  void add_embedded(const Eigen::MatrixBase<Derived>& local, Mat<Scalar>& out) const {
    for (std::size_t r = 0; r < rest_dim_; ++r) {
      for (std::size_t b = 0; b < local_dim_; ++b) {
        const auto col = static_cast<Eigen::Index>(full(r, b));
        for (std::size_t a = 0; a < local_dim_; ++a) {
          out(static_cast<Eigen::Index>(full(r, a)), col) +=
              local(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        }
      }
    }
  }

  template <typename Derived>
  Mat<typename Derived::Scalar> partial_trace(const Eigen::MatrixBase<Derived>& rho) const {
    using Scalar = typename Derived::Scalar;
    const auto ld = static_cast<Eigen::Index>(local_dim_);
    Mat<Scalar> out = Mat<Scalar>::Zero(ld, ld);
    for (std::size_t r = 0; r < rest_dim_; ++r) {
      for (std::size_t b = 0; b < local_dim_; ++b) {
        const auto col = static_cast<Eigen::Index>(full(r, b));
        for (std::size_t a = 0; a < local_dim_; ++a) {
          out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) +=
              rho(static_cast<Eigen::Index>(full(r, a)), col);
        }
      }
    }
    return out;
  }

  /// Partial trace of the rank-one matrix v v^dagger.
  template <typename Derived>
  Mat<typename Derived::Scalar> partial_trace_pure(const Eigen::MatrixBase<Derived>& v) const {
    using Scalar = typename Derived::Scalar;
    const auto ld = static_cast<Eigen::Index>(local_dim_);
    Mat<Scalar> block(ld, static_cast<Eigen::Index>(rest_dim_));
    for (std::size_t r = 0; r < rest_dim_; ++r) {
      for (std::size_t a = 0; a < local_dim_; ++a) {
        block(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(r)) = v(static_cast<Eigen::Index>(full(r, a)));
      }
    }
    return block * block.adjoint();
  }

 private:
  std::size_t local_dim_ = 1;
  std::size_t rest_dim_ = 1;
  std::vector<std::size_t> table_;
};

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& a, double tolerance = tol::hermitian) {
  if (a.rows() != a.cols()) return false;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tolerance * scale;
}

namespace detail {

template <typename Derived>
void require_hermitian(const Eigen::MatrixBase<Derived>& a, const char* where) {
  if (!is_hermitian(a)) throw InvalidArgument(std::string(where) + ": matrix is not Hermitian");
}

template <typename Derived>
void require_square_dim(const Eigen::MatrixBase<Derived>& m, std::size_t dim, const char* where) {
  if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != dim) {
    std::ostringstream os;
    os << where << ": expected " << dim << "x" << dim << " matrix, got " << m.rows() << "x" << m.cols();
    throw InvalidArgument(os.str());
  }
}

}  // namespace detail

/// M acting on the tensor factors of `c`, identity elsewhere.
template <typename Derived>
Mat<typename Derived::Scalar> embed(const Eigen::MatrixBase<Derived>& m, const Subset& c, const SystemShape& shape) {
  c.require_within(shape);
  detail::require_square_dim(m, detail::ipow(static_cast<std::size_t>(shape.d()), c.size()), "embed");
  return SiteIndexer(shape, c).embed(m);
}

/// Reduced matrix on `keep` (trace over every other site).
template <typename Derived>
Mat<typename Derived::Scalar> partial_trace(const Eigen::MatrixBase<Derived>& rho, const Subset& keep,
                                            const SystemShape& shape) {
  keep.require_within(shape);
  detail::require_square_dim(rho, shape.dim(), "partial_trace");
  return SiteIndexer(shape, keep).partial_trace(rho);
}

template <typename Derived>
RVector hermitian_eigenvalues(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> solver(a.derived(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw ConvergenceError("eigenvalue solver failed");
  return solver.eigenvalues();
}

template <typename Derived>
double trace_norm(const Eigen::MatrixBase<Derived>& a) {
  detail::require_hermitian(a, "trace_norm");
  return hermitian_eigenvalues(a).cwiseAbs().sum();
}

template <typename Derived>
double frobenius_norm(const Eigen::MatrixBase<Derived>& a) {
  return a.norm();
}

template <typename Derived>
double operator_norm(const Eigen::MatrixBase<Derived>& a) {
  detail::require_hermitian(a, "operator_norm");
  if (a.rows() == 0) return 0.0;
  return hermitian_eigenvalues(a).cwiseAbs().maxCoeff();
}

template <typename Derived>
double min_eigenvalue(const Eigen::MatrixBase<Derived>& a) {
  return hermitian_eigenvalues(a).minCoeff();
}

template <typename Scalar>
struct ExtremeEigs {
  double lambda_min = 0.0;
  Vec<Scalar> v_min;
  double lambda_max = 0.0;
  Vec<Scalar> v_max;
};

/// Smallest and largest eigenpairs of a Hermitian matrix (dense solver).
template <typename Derived>
ExtremeEigs<typename Derived::Scalar> extreme_eigs(const Eigen::MatrixBase<Derived>& a,
                                                   std::size_t cap = kDefaultDimensionCap) {
  using Scalar = typename Derived::Scalar;
  if (a.rows() != a.cols()) throw InvalidArgument("extreme_eigs: matrix is not square");
  if (static_cast<std::size_t>(a.rows()) > cap) {
    throw DimensionCapExceeded("extreme_eigs: dimension " + std::to_string(a.rows()) + " exceeds cap " +
                               std::to_string(cap));
  }
  if (a.rows() == 0) throw InvalidArgument("extreme_eigs: empty matrix");
  detail::require_hermitian(a, "extreme_eigs");
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> solver(a.derived());
  if (solver.info() != Eigen::Success) throw ConvergenceError("extreme_eigs: eigensolver did not converge");
  const auto last = a.rows() - 1;
  ExtremeEigs<Scalar> out;
  out.lambda_min = solver.eigenvalues()(0);
  out.v_min = solver.eigenvectors().col(0);
  out.lambda_max = solver.eigenvalues()(last);
  out.v_max = solver.eigenvectors().col(last);
  return out;
}

/// Hermitian, PSD, unit-trace matrix over a SystemShape.
class DensityMatrix {
 public:
  DensityMatrix(SystemShape shape, CMatrix entries) : shape_(shape), entries_(std::move(entries)) {
    detail::require_square_dim(entries_, shape_.dim(), "DensityMatrix");
    validate_state(entries_, "DensityMatrix");
  }

  const SystemShape& shape() const { return shape_; }
  const CMatrix& matrix() const { return entries_; }

  CMatrix reduced(const Subset& keep) const { return partial_trace(entries_, keep, shape_); }

  /// Throws unless `m` is Hermitian, PSD and has unit trace.
  template <typename Derived>
  static void validate_state(const Eigen::MatrixBase<Derived>& m, const std::string& where) {
    if (!is_hermitian(m)) throw InvalidArgument(where + ": not Hermitian");
    const double tr = detail::real_part(m.trace());
    if (std::abs(tr - 1.0) > tol::trace) {
      throw InvalidArgument(where + ": trace " + std::to_string(tr) + " != 1");
    }
    const double lmin = min_eigenvalue(m);
    if (lmin < tol::psd) {
      throw InvalidArgument(where + ": not PSD (min eigenvalue " + std::to_string(lmin) + ")");
    }
  }

 private:
  SystemShape shape_;
  CMatrix entries_;
};

}  // namespace lclh
