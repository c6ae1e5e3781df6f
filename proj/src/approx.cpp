#include "polya/approx.hpp"

#include <cmath>
#include <vector>

#include "polya/errors.hpp"
#include "polya/parallel.hpp"

namespace polya {
namespace {

template <class Kernel>
KernelMatrix pairwise(const Eigen::MatrixXd& X, double factor, Kernel&& kernel) {
    const Eigen::Index n = X.rows();
    KernelMatrix K(n, n);
    std::vector<double> x(static_cast<std::size_t>(X.cols()));
    std::vector<double> y(x.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        K(i, i) = 1.0;
        for (Eigen::Index j = 0; j < i; ++j) {
            for (Eigen::Index c = 0; c < X.cols(); ++c) {
                x[static_cast<std::size_t>(c)] = factor * X(i, c);
                y[static_cast<std::size_t>(c)] = factor * X(j, c);
            }
            K(i, j) = K(j, i) = kernel(x, y);
        }
    }
    return K;
}

std::pair<double, double> mean_and_stderr(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    if (v.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace

KernelMatrix exact_gram(const KernelSpec& spec, const Eigen::MatrixXd& X) {
    return pairwise(X, 1.0, [&spec](const std::vector<double>& x, const std::vector<double>& y) {
        return tensor_eval(spec, x, y);
    });
}

KernelMatrix exact_gram(const FeatureMapConfig& cfg, const Eigen::MatrixXd& X) {
    return pairwise(X, 1.0, [&cfg](const std::vector<double>& x, const std::vector<double>& y) {
        return target_kernel(cfg, x, y);
    });
}

KernelMatrix doubled_gram(const FeatureMapConfig& cfg, const Eigen::MatrixXd& X) {
    return pairwise(X, 2.0, [&cfg](const std::vector<double>& x, const std::vector<double>& y) {
        return target_kernel(cfg, x, y);
    });
}

double expected_sq_frobenius(MapKind kind, const KernelMatrix& K, const std::optional<KernelMatrix>& k2,
                             std::size_t copies) {
    if (copies < 1) throw DomainError("expected_sq_frobenius: copies must be >= 1");
    const double n = static_cast<double>(K.rows());
    const double frob = K.squaredNorm();
    double value = 0.0;
    switch (kind) {
        case MapKind::FourierComplex:
            value = n * n - frob;
            break;
        case MapKind::FourierReal:
            if (!k2) throw DomainError("expected_sq_frobenius: the real Fourier map needs the doubled-difference matrix");
            if (k2->rows() != K.rows() || k2->cols() != K.cols()) throw DimensionError("expected_sq_frobenius: k2 shape");
            value = n * n + 0.5 * k2->sum() - frob;
            break;
        case MapKind::Binning:
            value = K.sum() - frob;
            break;
    }
    return value / static_cast<double>(copies);
}

ErrorStats empirical_error(const Eigen::MatrixXd& X, const FeatureMapConfig& cfg, std::size_t trials) {
    if (trials < 1) throw DomainError("empirical_error: trials must be >= 1");
    cfg.validate();
    const KernelMatrix K = exact_gram(cfg, X);
    std::optional<KernelMatrix> k2;
    if (cfg.kind == MapKind::FourierReal) k2 = doubled_gram(cfg, X);
    const double frob = K.squaredNorm();

    std::vector<double> sq(trials);
    parallel_for(trials, [&](std::size_t t) {
        FeatureMapConfig trial_cfg = cfg;
        trial_cfg.seed = derive_seed(cfg.seed, t);
        FeatureMap map = FeatureMap::build(trial_cfg);
        const FeatureBatch batch = map.featurize(X);
        if (cfg.kind == MapKind::FourierComplex) {
            sq[t] = (gram_complex(batch) - K.cast<std::complex<double>>()).squaredNorm();
        } else {
            sq[t] = (gram(batch) - K).squaredNorm();
        }
    });

    std::vector<double> rel_sq(trials);
    std::vector<double> rel(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        rel_sq[t] = sq[t] / frob;
        rel[t] = std::sqrt(rel_sq[t]);
    }
    ErrorStats out;
    out.trials = trials;
    std::tie(out.mean_sq, out.stderr_sq) = mean_and_stderr(sq);
    std::tie(out.mean_rel_sq, out.stderr_rel_sq) = mean_and_stderr(rel_sq);
    std::tie(out.mean_rel, out.stderr_rel) = mean_and_stderr(rel);
    out.theory_sq = expected_sq_frobenius(cfg.kind, K, k2, cfg.copies);
    out.theory_rel = std::sqrt(out.theory_sq / frob);
    return out;
}

}  // namespace polya
