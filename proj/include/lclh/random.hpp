#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/QR>

#include "lclh/core.hpp"

namespace lclh {

using Rng = std::mt19937_64;

/// Haar-random unit vector (complex) or uniformly random real unit vector.
template <typename Scalar = cplx>
Vec<Scalar> random_unit_vector(Eigen::Index dim, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec<Scalar> v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    if constexpr (std::is_same_v<Scalar, double>) {
      v(i) = gauss(rng);
    } else {
      v(i) = Scalar(gauss(rng), gauss(rng));
    }
  }
  const double nrm = v.norm();
  if (nrm == 0.0) return random_unit_vector<Scalar>(dim, rng);
  return v / nrm;
}

/// Haar-random unitary (orthogonal for real Scalar) via QR with phase fix.
template <typename Scalar = cplx>
Mat<Scalar> random_unitary(Eigen::Index dim, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat<Scalar> g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      if constexpr (std::is_same_v<Scalar, double>) g(i, j) = gauss(rng);
      else g(i, j) = Scalar(gauss(rng), gauss(rng));
    }
  }
  Eigen::HouseholderQR<Mat<Scalar>> qr(g);
  Mat<Scalar> q = qr.householderQ();
  const Mat<Scalar> r = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < dim; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

/// Mixture of `rank` random pure states with uniformly random weights.
template <typename Scalar = cplx>
Mat<Scalar> random_density_matrix(Eigen::Index dim, int rank, Rng& rng) {
  if (rank < 1) throw InvalidArgument("random_density_matrix: rank must be >= 1");
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  Mat<Scalar> rho = Mat<Scalar>::Zero(dim, dim);
  double total = 0.0;
  for (int r = 0; r < rank; ++r) {
    const double w = unif(rng);
    const Vec<Scalar> v = random_unit_vector<Scalar>(dim, rng);
    rho += w * (v * v.adjoint());
    total += w;
  }
  rho /= total;
  return 0.5 * (rho + rho.adjoint());
}

/// Hermitian matrix with i.i.d. Gaussian entries, rescaled to operator norm `norm`.
template <typename Scalar = cplx>
Mat<Scalar> random_hermitian(Eigen::Index dim, Rng& rng, double norm = 1.0) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat<Scalar> g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      if constexpr (std::is_same_v<Scalar, double>) g(i, j) = gauss(rng);
      else g(i, j) = Scalar(gauss(rng), gauss(rng));
    }
  }
  Mat<Scalar> h = 0.5 * (g + g.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(h, Eigen::EigenvaluesOnly);
  const double op = es.eigenvalues().cwiseAbs().maxCoeff();
  if (op > 0) h *= norm / op;
  return h;
}

/// Derives an independent seed for stream `index` of a parent seed (splitmix64).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace lclh
