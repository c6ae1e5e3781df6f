#pragma once

// Exact kernel matrices and the expected Frobenius error of averaged random
// feature maps, with a Monte Carlo counterpart.

#include <Eigen/Dense>
#include <cstddef>
#include <optional>

#include "polya/feature_maps.hpp"

namespace polya {

using KernelMatrix = Eigen::MatrixXd;

/// K_ij = tensor_eval(spec, x_i, x_j) over the rows of X.
KernelMatrix exact_gram(const KernelSpec& spec, const Eigen::MatrixXd& X);
/// The matrix of the kernel a feature map configuration approximates.
KernelMatrix exact_gram(const FeatureMapConfig& cfg, const Eigen::MatrixXd& X);
/// The same kernel at doubled differences, k(2(x_i - x_j)).
KernelMatrix doubled_gram(const FeatureMapConfig& cfg, const Eigen::MatrixXd& X);

/// E || (1/D) sum_l K~(l) - K ||_F^2 for D independent copies:
/// (n^2 - ||K||^2)/D for the complex Fourier map, (n^2 + sum k2/2 - ||K||^2)/D for
/// the real one, (sum K - ||K||^2)/D for binning.
double expected_sq_frobenius(MapKind kind, const KernelMatrix& K, const std::optional<KernelMatrix>& k2,
                             std::size_t copies);

struct ErrorStats {
    std::size_t trials = 0;
    double mean_sq = 0.0;       // mean of ||K~ - K||_F^2
    double stderr_sq = 0.0;
    double mean_rel_sq = 0.0;   // mean of ||K~ - K||_F^2 / ||K||_F^2
    double stderr_rel_sq = 0.0;
    double mean_rel = 0.0;      // mean of ||K~ - K||_F / ||K||_F
    double stderr_rel = 0.0;
    double theory_sq = 0.0;     // expected_sq_frobenius
    double theory_rel = 0.0;    // sqrt(theory_sq) / ||K||_F
};

/// Runs `trials` independent maps (seed derive_seed(cfg.seed, t) for trial t)
/// and compares the Frobenius error of their Gram matrices with theory.
ErrorStats empirical_error(const Eigen::MatrixXd& X, const FeatureMapConfig& cfg, std::size_t trials);

}  // namespace polya
