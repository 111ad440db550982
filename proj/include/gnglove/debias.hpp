#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gnglove/model.hpp"
#include "gnglove/util.hpp"

namespace gnglove {

/// Orthonormal basis of the bias subspace (default size 1: the he-she
/// direction).
struct BiasSubspace {
  std::vector<std::vector<double>> basis;
  std::size_t dim = 0;
};

/// PCA of pair-centered difference vectors: each pair contributes both signed
/// halves (v - mean and partner - mean); the top k_b eigenvectors of their
/// covariance form the subspace.
inline BiasSubspace compute_bias_subspace(
    const Embeddings& emb,
    std::span<const std::pair<std::uint32_t, std::uint32_t>> pairs, int k_b) {
  if (pairs.empty())
    throw std::invalid_argument("compute_bias_subspace: no pairs");
  const auto d = static_cast<Eigen::Index>(emb.dim);
  if (k_b < 1 || static_cast<Eigen::Index>(k_b) > d)
    throw std::invalid_argument("k_b must be in [1, dim]");
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  for (const auto& [m, f] : pairs) {
    auto vm = emb.row(m);
    auto vf = emb.row(f);
    Eigen::VectorXd diff(d);
    for (Eigen::Index t = 0; t < d; ++t) diff[t] = (vm[t] - vf[t]) / 2.0;
    // both signed halves contribute the same outer product
    cov += 2.0 * diff * diff.transpose();
  }
  cov /= 2.0 * static_cast<double>(pairs.size());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed");
  if (solver.eigenvalues()(d - 1) <= 1e-24)
    throw std::invalid_argument(
        "compute_bias_subspace: all pair differences are zero");

  BiasSubspace sub;
  sub.dim = emb.dim;
  for (int b = 0; b < k_b; ++b) {
    Eigen::VectorXd v = solver.eigenvectors().col(d - 1 - b);  // largest first
    sub.basis.emplace_back(v.data(), v.data() + d);
  }
  return sub;
}

/// Removes the subspace component and rescales to unit norm, in place.
/// Returns true (and zeroes the vector) when nothing remains.
inline bool neutralize(std::span<double> v, const BiasSubspace& sub) {
  for (const auto& b : sub.basis) {
    const double p = dot(v, b);
    for (std::size_t t = 0; t < v.size(); ++t) v[t] -= p * b[t];
  }
  const double n = norm(v);
  if (n < 1e-12) {
    for (auto& x : v) x = 0.0;
    return true;
  }
  for (auto& x : v) x /= n;
  return false;
}

/// Gives both pair members the same component outside the subspace (the
/// neutralized pair mean) and opposite magnitude-matched components inside
/// it, so both end up unit-norm and equidistant from every neutralized word.
/// Returns true (leaving the pair unchanged) when the pair has no in-subspace
/// offset to mirror.
inline bool equalize(std::span<double> a, std::span<double> b,
                     const BiasSubspace& sub) {
  const std::size_t d = a.size();
  std::vector<double> mean(d), offset(d, 0.0);
  for (std::size_t t = 0; t < d; ++t) mean[t] = (a[t] + b[t]) / 2.0;
  // in-subspace offset of a from the mean; b's is its exact negative
  for (const auto& basis : sub.basis) {
    const double p = (dot(a, basis) - dot(mean, basis));
    for (std::size_t t = 0; t < d; ++t) offset[t] += p * basis[t];
  }
  const double len = norm(offset);
  if (len < 1e-12) return true;

  std::vector<double> nu(mean);  // neutral part of the mean
  for (const auto& basis : sub.basis) {
    const double p = dot(nu, basis);
    for (std::size_t t = 0; t < d; ++t) nu[t] -= p * basis[t];
  }
  double rest = 1.0 - dot(nu, nu);
  if (rest < 0.0) rest = 0.0;
  const double scale = std::sqrt(rest) / len;
  for (std::size_t t = 0; t < d; ++t) {
    a[t] = nu[t] + scale * offset[t];
    b[t] = nu[t] - scale * offset[t];
  }
  return false;
}

struct DebiasReport {
  std::size_t neutralized = 0;
  std::size_t equalized_pairs = 0;
  std::size_t degenerate = 0;
};

/// Post-hoc neutralize-and-equalize over a loaded embedding table. All
/// vectors are unit-normalized first; neutral words are projected out of the
/// subspace, seed pairs are mirrored across it, and any other words are left
/// as normalized.
inline DebiasReport hard_debias(
    Embeddings& emb, std::span<const std::uint32_t> neutral_ids,
    std::span<const std::pair<std::uint32_t, std::uint32_t>> pairs, int k_b) {
  DebiasReport report;
  for (std::uint32_t id = 0; id < emb.size(); ++id) {
    auto row = emb.row(id);
    const double n = norm(row);
    if (n < 1e-12) {
      ++report.degenerate;
      continue;
    }
    for (auto& x : row) x /= n;
  }
  BiasSubspace sub = compute_bias_subspace(emb, pairs, k_b);
  for (auto id : neutral_ids) {
    if (neutralize(emb.row(id), sub)) ++report.degenerate;
    ++report.neutralized;
  }
  for (const auto& [m, f] : pairs) {
    if (equalize(emb.row(m), emb.row(f), sub))
      ++report.degenerate;
    else
      ++report.equalized_pairs;
  }
  return report;
}

/// Resolves word pairs against an embedding table, dropping pairs with a
/// missing member into `skipped`.
inline std::vector<std::pair<std::uint32_t, std::uint32_t>> resolve_pairs(
    const Embeddings& emb,
    std::span<const std::pair<std::string, std::string>> word_pairs,
    std::vector<std::string>* skipped = nullptr) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> ids;
  for (const auto& [m, f] : word_pairs) {
    auto mi = emb.find(m);
    auto fi = emb.find(f);
    if (!mi || !fi) {
      if (skipped) {
        skipped->push_back(m);
        skipped->push_back(f);
      }
      continue;
    }
    ids.emplace_back(*mi, *fi);
  }
  return ids;
}

}  // namespace gnglove
