#pragma once

// Random Fourier and random binning feature maps. A map with D copies sends a
// point x to z(x) with E<z(x), z(y)> = k(x - y); the 1/sqrt(D) normalization is
// folded into the feature values so the Gram matrix is a plain inner product.

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "polya/kernels.hpp"

namespace polya {

enum class MapKind { FourierComplex, FourierReal, Binning };

std::string to_string(MapKind kind);
/// Accepts `fourier-complex`/`rf-complex`, `fourier-real`/`rf`, `binning`/`rb`.
MapKind parse_map_kind(std::string_view text);

/// Laplace kernel exp(-||x - y||_1 / sigma): each frequency coordinate is Cauchy with scale 1/sigma.
struct LaplaceLaw {
    double sigma = 1.0;
};
/// Gaussian kernel exp(-||x - y||_2^2 / (2 sigma^2)): frequencies are normal with standard deviation 1/sigma.
struct GaussianLaw {
    double sigma = 1.0;
};
using FrequencyLaw = std::variant<LaplaceLaw, GaussianLaw>;

/// The Laplace law equal to a gamma(s=2) kernel (also chi2 with nu=4); DomainError otherwise.
FrequencyLaw fourier_law_for(const KernelSpec& spec);

using MapTarget = std::variant<KernelSpec, FrequencyLaw>;

/// Text form of a map target: a kernel spec, `laplace:sigma=<v>` or `gaussian:sigma=<v>`.
MapTarget parse_map_target(std::string_view text);
std::string to_string(const MapTarget& target);

struct FeatureMapConfig {
    MapKind kind = MapKind::Binning;
    std::size_t copies = 1;
    std::uint64_t seed = 0;
    MapTarget target = KernelSpec(DistributionSpec(GammaDist{2.0, 1.0}));
    std::size_t dim = 1;
    /// Binning only: hash bin keys into this many columns instead of keeping an
    /// exact vocabulary. Collisions bias the Gram matrix upward.
    std::optional<std::size_t> hash_buckets;

    /// Throws DomainError when the configuration is inconsistent.
    void validate() const;
};

/// The kernel a configuration approximates, evaluated at (x, y).
double target_kernel(const FeatureMapConfig& cfg, std::span<const double> x, std::span<const double> y);

/// Random features for n points, one column per point.
///
/// Dense kinds hold a D x n matrix. Binning holds, for point i and copy l, the
/// column index bins[i * D + l] of its single nonzero, whose value is 1/sqrt(D).
struct FeatureBatch {
    MapKind kind = MapKind::FourierReal;
    std::size_t points = 0;
    std::size_t copies = 0;
    std::size_t feature_count = 0;
    Eigen::MatrixXd real;
    Eigen::MatrixXcd complex;
    std::vector<std::size_t> bins;
    double bin_value = 0.0;

    /// feature_count x points; valid for FourierReal and Binning.
    Eigen::SparseMatrix<double> sparse() const;
    /// feature_count x points real matrix; valid for FourierReal and Binning.
    Eigen::MatrixXd dense() const;
};

class FeatureMap {
public:
    /// Draws all random parameters. Copy l uses the stream (seed, l), so a map
    /// with more copies extends one with fewer.
    static FeatureMap build(const FeatureMapConfig& cfg);

    const FeatureMapConfig& config() const noexcept { return cfg_; }
    MapKind kind() const noexcept { return cfg_.kind; }

    /// X holds one point per row. Binning inserts unseen bins into the vocabulary.
    FeatureBatch featurize(const Eigen::MatrixXd& X);

    /// Number of feature columns known so far (D for Fourier maps).
    std::size_t feature_count() const noexcept;

    /// Fourier: D x d frequencies and D offsets in [0, 2 pi).
    const Eigen::MatrixXd& frequencies() const noexcept { return frequencies_; }
    const Eigen::VectorXd& phase_offsets() const noexcept { return phases_; }
    /// Binning: D x d spacings w and offsets b with 0 <= b < w.
    const Eigen::MatrixXd& spacings() const noexcept { return spacings_; }
    const Eigen::MatrixXd& bin_offsets() const noexcept { return bin_offsets_; }

    /// Vocabulary entries as (copy, bin coordinates..., column) rows in column order.
    std::vector<std::vector<std::int64_t>> vocabulary() const;
    void restore_vocabulary(const std::vector<std::vector<std::int64_t>>& entries);

private:
    struct KeyHash {
        std::size_t operator()(const std::vector<std::int64_t>& key) const noexcept;
    };

    explicit FeatureMap(FeatureMapConfig cfg) : cfg_(std::move(cfg)) {}
    std::size_t bin_column(std::vector<std::int64_t>& key);

    FeatureMapConfig cfg_;
    Eigen::MatrixXd frequencies_;
    Eigen::VectorXd phases_;
    Eigen::MatrixXd spacings_;
    Eigen::MatrixXd bin_offsets_;
    std::unordered_map<std::vector<std::int64_t>, std::size_t, KeyHash> vocab_;
};

/// K~ = Z^T Z (real part of Z^H Z for the complex map).
Eigen::MatrixXd gram(const FeatureBatch& batch);
/// Z^H Z for the complex map; the real gram cast to complex otherwise.
Eigen::MatrixXcd gram_complex(const FeatureBatch& batch);

/// Single-copy variance of k~ at a pair with kernel value k (and k at the doubled
/// difference, required for FourierReal).
double variance_theory(MapKind kind, double k_value, std::optional<double> k_2r_value = std::nullopt);

}  // namespace polya
