#pragma once

#include <optional>
#include <vector>

#include "lclh/qlinalg.hpp"
#include "lclh/random.hpp"

namespace lclh {

/// Observables F_1..F_D on C^N. Exactly one of
///   (1) some x has sum x_i F_i + I < -margin I
///   (2) some state Z has |Tr(F_i Z)| <= margin/4 for every i
/// should be certifiable when the family was planted with a margin.
struct AlternativeFamily {
  std::vector<CMatrix> f;
  double margin = 0.1;
  enum class Plant { State, Point } plant = Plant::State;
};

/// Plant::State fixes a full-rank state Z0 with Tr(F_i Z0) = 0; Plant::Point
/// fixes x0 with sum x0_i F_i + I <= -2 margin I.
inline AlternativeFamily make_alternative_family(int n_dim, int count, double margin, AlternativeFamily::Plant plant,
                                                 std::uint64_t seed) {
  if (n_dim < 1 || count < 1) throw InvalidArgument("make_alternative_family: empty family");
  Rng rng(seed);
  AlternativeFamily fam;
  fam.margin = margin;
  fam.plant = plant;
  std::vector<CMatrix> g;
  for (int i = 0; i < count; ++i) g.push_back(random_hermitian<cplx>(n_dim, rng, 1.0));
  if (plant == AlternativeFamily::Plant::State) {
    const CMatrix z0 = random_density_matrix<cplx>(n_dim, n_dim, rng);
    for (auto& gi : g) {
      const double t = (gi * z0).trace().real();
      fam.f.push_back(gi - t * CMatrix::Identity(n_dim, n_dim));
    }
    return fam;
  }
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  RVector x0(count);
  for (int i = 0; i < count; ++i) x0(i) = unif(rng);
  if (x0.norm() < 0.2) x0(0) = 1.0;
  CMatrix m = CMatrix::Zero(n_dim, n_dim);
  for (int i = 0; i < count; ++i) m += x0(i) * g[static_cast<std::size_t>(i)];
  // Shift F_i = G_i + c_i I with c parallel to x0 so that x0 . c pushes the
  // top eigenvalue of sum x0_i F_i + I down to -2 margin.
  const double need = -(hermitian_eigenvalues(m).maxCoeff() + 1.0 + 2.0 * margin);
  const RVector c = need * x0 / x0.squaredNorm();
  for (int i = 0; i < count; ++i) {
    fam.f.push_back(g[static_cast<std::size_t>(i)] + c(i) * CMatrix::Identity(n_dim, n_dim));
  }
  return fam;
}

inline double alternative_one_value(const AlternativeFamily& fam, const RVector& x) {
  const auto n = fam.f.front().rows();
  CMatrix acc = CMatrix::Identity(n, n);
  for (std::size_t i = 0; i < fam.f.size(); ++i) acc += x(static_cast<Eigen::Index>(i)) * fam.f[i];
  return hermitian_eigenvalues(acc).maxCoeff();
}

/// Dense grid search with zooming for x with lambda_max(sum x F + I) < -margin.
inline std::optional<RVector> certify_alternative_one(const AlternativeFamily& fam, double box = 2.0,
                                                      int points = 9, int rounds = 24) {
  const auto dcount = static_cast<Eigen::Index>(fam.f.size());
  RVector center = RVector::Zero(dcount);
  double half = box;
  double best_val = alternative_one_value(fam, center);
  RVector best = center;
  for (int round = 0; round < rounds; ++round) {
    std::vector<int> idx(static_cast<std::size_t>(dcount), 0);
    for (;;) {
      RVector x(dcount);
      for (Eigen::Index j = 0; j < dcount; ++j) {
        x(j) = center(j) + half * (2.0 * idx[static_cast<std::size_t>(j)] / (points - 1) - 1.0);
      }
      const double v = alternative_one_value(fam, x);
      if (v < best_val) {
        best_val = v;
        best = x;
      }
      Eigen::Index j = 0;
      while (j < dcount && ++idx[static_cast<std::size_t>(j)] == points) idx[static_cast<std::size_t>(j++)] = 0;
      if (j == dcount) break;
    }
    if (best_val < -fam.margin) return best;
    center = best;
    half *= 0.5;
  }
  return std::nullopt;
}

/// Frank-Wolfe on sum_i Tr(F_i Z)^2 over states, stopping once every
/// |Tr(F_i Z)| <= margin/4.
inline std::optional<CMatrix> certify_alternative_two(const AlternativeFamily& fam, int max_iters = 20000) {
  const auto n = fam.f.front().rows();
  const double target = fam.margin / 4.0;
  CMatrix z = CMatrix::Identity(n, n) / static_cast<double>(n);
  const std::size_t m = fam.f.size();
  RVector t(static_cast<Eigen::Index>(m));
  auto values = [&](const CMatrix& s) {
    for (std::size_t i = 0; i < m; ++i) t(static_cast<Eigen::Index>(i)) = (fam.f[i] * s).trace().real();
  };
  values(z);
  for (int it = 0; it < max_iters; ++it) {
    if (t.cwiseAbs().maxCoeff() <= target) return z;
    CMatrix grad = CMatrix::Zero(n, n);
    for (std::size_t i = 0; i < m; ++i) grad += 2.0 * t(static_cast<Eigen::Index>(i)) * fam.f[i];
    Eigen::SelfAdjointEigenSolver<CMatrix> es(grad);
    const CVector v = es.eigenvectors().col(0);
    // Values at the vertex vv^dagger.
    RVector tv(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) tv(static_cast<Eigen::Index>(i)) = v.dot(fam.f[i] * v).real();
    const RVector dir = tv - t;
    const double den = dir.squaredNorm();
    if (den <= 0) break;
    const double step = std::clamp(-t.dot(dir) / den, 0.0, 1.0);
    if (step <= 0) break;
    z = (1.0 - step) * z + step * (v * v.adjoint());
    t += step * dir;
  }
  values(z);
  if (t.cwiseAbs().maxCoeff() <= target) return z;
  return std::nullopt;
}

}  // namespace lclh
