#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <type_traits>

#include <Eigen/Dense>

namespace lclh {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Validation tolerances shared by every module.
namespace tol {
inline constexpr double hermitian = 1e-10;
inline constexpr double psd = -1e-9;
inline constexpr double trace = 1e-10;
inline constexpr double term_norm = 1e-9;
inline constexpr double realness = 1e-12;
}  // namespace tol

/// Largest full-space dimension d^n any dense routine accepts.
inline constexpr std::size_t kDefaultDimensionCap = 4096;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (bad subset, dimension mismatch, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionCapExceeded : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class BudgetExhausted : public Error {
 public:
  using Error::Error;
};

class OracleContractViolation : public Error {
 public:
  using Error::Error;
};

class NumericalBreakdown : public Error {
 public:
  using Error::Error;
};

/// A geometric certificate that should hold by construction did not.
class CertificateFailure : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t out = 1;
  while (exp-- > 0) out *= base;
  return out;
}

template <typename Scalar>
double real_part(const Scalar& v) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return v;
  } else {
    return v.real();
  }
}

/// Re Tr(A^dagger B).
template <typename DerivedA, typename DerivedB>
double inner(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  return real_part(a.conjugate().cwiseProduct(b).sum());
}

}  // namespace detail

}  // namespace lclh
