#include "polya/learn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "polya/errors.hpp"
#include "polya/parallel.hpp"

namespace polya {
namespace {

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed, std::uint64_t stream) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    RandomStream rng(seed, stream);
    for (std::size_t i = n; i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i));
        std::swap(idx[i - 1], idx[std::min(j, i - 1)]);
    }
    return idx;
}

// Stream ids reserved for dataset shuffles, distinct from the per-copy streams of feature maps.
constexpr std::uint64_t kSplitStream = 0x53504C4954ull;
constexpr std::uint64_t kSubsampleStream = 0x53554253ull;
constexpr std::uint64_t kFoldStream = 0x464F4C44ull;

struct ClassEncoding {
    std::vector<double> classes;

    explicit ClassEncoding(const Eigen::VectorXd& labels) : classes(labels.data(), labels.data() + labels.size()) {
        std::sort(classes.begin(), classes.end());
        classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
        if (classes.size() < 2) throw DomainError("one_vs_all: need at least two classes");
    }

    // +1 in the column of each point's class, -1 elsewhere.
    Eigen::MatrixXd indicators(const Eigen::VectorXd& labels) const {
        Eigen::MatrixXd Y = Eigen::MatrixXd::Constant(labels.size(), static_cast<Eigen::Index>(classes.size()), -1.0);
        for (Eigen::Index i = 0; i < labels.size(); ++i) {
            const auto it = std::lower_bound(classes.begin(), classes.end(), labels(i));
            if (it != classes.end() && *it == labels(i)) Y(i, it - classes.begin()) = 1.0;
        }
        return Y;
    }
};

void require_finite(const Eigen::MatrixXd& m, const char* what) {
    if (!m.allFinite()) throw NumericalError(std::string(what) + " contains non-finite values");
}

// Solves the SPD system A X = B, with one refinement step if the residual is not yet small.
Eigen::MatrixXd spd_solve(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double& residual) {
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) throw NumericalError("ridge: Cholesky factorization failed");
    Eigen::MatrixXd X = llt.solve(B);
    const double scale = std::max(B.norm(), std::numeric_limits<double>::min());
    residual = (A * X - B).norm() / scale;
    if (residual > 1e-12) {
        X += llt.solve(B - A * X);
        residual = (A * X - B).norm() / scale;
    }
    if (!X.allFinite()) throw NumericalError("ridge: solution is not finite");
    if (residual > 1e-8) throw NumericalError("ridge: relative residual " + std::to_string(residual) + " above 1e-8");
    return X;
}

}  // namespace

std::string to_string(Task task) {
    switch (task) {
        case Task::Regression:
            return "regression";
        case Task::Binary:
            return "binary";
        case Task::Multiclass:
            return "multiclass";
    }
    return "unknown";
}

Task parse_task(std::string_view text) {
    if (text == "regression") return Task::Regression;
    if (text == "binary") return Task::Binary;
    if (text == "multiclass") return Task::Multiclass;
    throw ParseError("unknown task '" + std::string(text) + "'");
}

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& X, const std::vector<std::size_t>& rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), X.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(rows[i]));
    return out;
}

Eigen::VectorXd select_rows(const Eigen::VectorXd& y, const std::vector<std::size_t>& rows) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Eigen::Index>(i)) = y(static_cast<Eigen::Index>(rows[i]));
    return out;
}

void split_train_test(Dataset& ds, std::uint64_t seed, double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw DomainError("split: train fraction must lie in (0, 1)");
    const std::size_t n = ds.size();
    auto idx = shuffled_indices(n, seed, kSplitStream);
    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
    ds.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    ds.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    std::sort(ds.train.begin(), ds.train.end());
    std::sort(ds.test.begin(), ds.test.end());
}

Dataset subsample(const Dataset& ds, std::size_t m, std::uint64_t seed) {
    if (m >= ds.size()) {
        Dataset copy = ds;
        copy.train.clear();
        copy.test.clear();
        return copy;
    }
    auto idx = shuffled_indices(ds.size(), seed, kSubsampleStream);
    idx.resize(m);
    std::sort(idx.begin(), idx.end());
    Dataset out;
    out.points = select_rows(ds.points, idx);
    out.targets = select_rows(ds.targets, idx);
    return out;
}

Normalizer Normalizer::fit(const Eigen::MatrixXd& X) {
    if (X.rows() == 0) throw DomainError("normalize: no training rows");
    Normalizer n;
    const Eigen::RowVectorXd lo = X.colwise().minCoeff();
    const Eigen::RowVectorXd hi = X.colwise().maxCoeff();
    n.center = (0.5 * (lo + hi)).transpose();
    n.half_range = (0.5 * (hi - lo)).transpose();
    return n;
}

Eigen::MatrixXd Normalizer::apply(const Eigen::MatrixXd& X) const {
    if (X.cols() != center.size()) throw DimensionError("normalize: dimension mismatch");
    Eigen::MatrixXd out(X.rows(), X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        if (half_range(j) > 0.0) {
            out.col(j) = (X.col(j).array() - center(j)) / half_range(j);
        } else {
            out.col(j).setZero();
        }
    }
    return out;
}

Normalizer normalize(Dataset& ds) {
    const Normalizer n = Normalizer::fit(ds.train.empty() ? ds.points : select_rows(ds.points, ds.train));
    ds.points = n.apply(ds.points);
    return n;
}

RidgeSolution fit_ridge(const FeatureBatch& batch, const Eigen::MatrixXd& Y, double lambda, FitOptions opts) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("ridge: lambda must be a finite value > 0");
    if (batch.kind == MapKind::FourierComplex) throw DomainError("ridge: learning uses real-valued features");
    if (batch.points < 1) throw DomainError("ridge: no training points");
    if (static_cast<std::size_t>(Y.rows()) != batch.points) throw DimensionError("ridge: target count differs from point count");
    require_finite(Y, "ridge targets");

    RidgeSolution sol;
    sol.lambda = lambda;
    sol.offsets = opts.center_targets ? Eigen::RowVectorXd(Y.colwise().mean()) : Eigen::RowVectorXd::Zero(Y.cols());
    const Eigen::MatrixXd Yc = Y.rowwise() - sol.offsets;

    const auto n = static_cast<Eigen::Index>(batch.points);
    const auto p = static_cast<Eigen::Index>(batch.feature_count);
    sol.primal = opts.solver == Solver::Auto ? p <= n : opts.solver == Solver::Primal;
    if (batch.kind == MapKind::FourierReal) {
        const Eigen::MatrixXd& Z = batch.real;
        require_finite(Z, "features");
        if (sol.primal) {
            Eigen::MatrixXd A = Z * Z.transpose();
            A.diagonal().array() += lambda;
            sol.weights = spd_solve(A, Z * Yc, sol.relative_residual);
        } else {
            Eigen::MatrixXd G = Z.transpose() * Z;
            G.diagonal().array() += lambda;
            sol.weights = Z * spd_solve(G, Yc, sol.relative_residual);
        }
    } else {
        const Eigen::SparseMatrix<double> Z = batch.sparse();
        if (sol.primal) {
            const Eigen::SparseMatrix<double> ZZ = Z * Z.transpose();
            Eigen::MatrixXd A(ZZ);
            A.diagonal().array() += lambda;
            sol.weights = spd_solve(A, Z * Yc, sol.relative_residual);
        } else {
            const Eigen::SparseMatrix<double> ZZ = Z.transpose() * Z;
            Eigen::MatrixXd G(ZZ);
            G.diagonal().array() += lambda;
            sol.weights = Z * spd_solve(G, Yc, sol.relative_residual);
        }
    }
    return sol;
}

RidgeSolution fit_ridge(const FeatureBatch& batch, const Eigen::VectorXd& y, double lambda, FitOptions opts) {
    return fit_ridge(batch, Eigen::MatrixXd(y), lambda, opts);
}

Eigen::MatrixXd predict_scores(const RidgeSolution& sol, const FeatureBatch& batch) {
    const auto n = static_cast<Eigen::Index>(batch.points);
    const Eigen::Index outputs = sol.weights.cols();
    Eigen::MatrixXd scores(n, outputs);
    if (batch.kind == MapKind::FourierReal) {
        if (batch.real.rows() != sol.weights.rows()) throw DimensionError("predict: feature count differs from the model");
        scores = batch.real.transpose() * sol.weights;
    } else if (batch.kind == MapKind::Binning) {
        scores.setZero();
        const auto known = static_cast<std::size_t>(sol.weights.rows());
        for (Eigen::Index i = 0; i < n; ++i) {
            for (std::size_t l = 0; l < batch.copies; ++l) {
                const std::size_t col = batch.bins[static_cast<std::size_t>(i) * batch.copies + l];
                if (col < known) scores.row(i) += batch.bin_value * sol.weights.row(static_cast<Eigen::Index>(col));
            }
        }
    } else {
        throw DomainError("predict: learning uses real-valued features");
    }
    return scores.rowwise() + sol.offsets;
}

RidgeModel fit(FeatureMap map, const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda, FitOptions opts) {
    const FeatureBatch batch = map.featurize(X);
    RidgeSolution sol = fit_ridge(batch, y, lambda, opts);
    return {std::move(map), std::move(sol)};
}

Eigen::VectorXd predict(RidgeModel& model, const Eigen::MatrixXd& X) {
    return predict_scores(model.solution, model.map.featurize(X)).col(0);
}

Classifier one_vs_all(FeatureMap map, const Eigen::MatrixXd& X, const Eigen::VectorXd& labels, double lambda) {
    const ClassEncoding enc(labels);
    const Eigen::MatrixXd Y = enc.indicators(labels);
    const FeatureBatch batch = map.featurize(X);
    RidgeSolution sol = fit_ridge(batch, Y, lambda, FitOptions{false});
    return {std::move(map), std::move(sol), enc.classes};
}

Eigen::MatrixXd class_scores(Classifier& clf, const Eigen::MatrixXd& X) {
    return predict_scores(clf.solution, clf.map.featurize(X));
}

Eigen::VectorXd predict_labels(Classifier& clf, const Eigen::MatrixXd& X) {
    const Eigen::MatrixXd scores = class_scores(clf, X);
    Eigen::VectorXd out(scores.rows());
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        Eigen::Index best = 0;
        scores.row(i).maxCoeff(&best);
        out(i) = clf.classes[static_cast<std::size_t>(best)];
    }
    return out;
}

double mean_squared_error(const Eigen::VectorXd& predicted, const Eigen::VectorXd& truth) {
    if (predicted.size() != truth.size()) throw DimensionError("mse: length mismatch");
    if (truth.size() == 0) return 0.0;
    return (predicted - truth).squaredNorm() / static_cast<double>(truth.size());
}

double accuracy(const Eigen::VectorXd& predicted, const Eigen::VectorXd& truth) {
    if (predicted.size() != truth.size()) throw DimensionError("accuracy: length mismatch");
    if (truth.size() == 0) return 0.0;
    return static_cast<double>((predicted.array() == truth.array()).count()) / static_cast<double>(truth.size());
}

FeatureMapConfig grid_config(const SearchSpace& space, double shape, double tau, std::size_t dim, std::uint64_t seed) {
    FeatureMapConfig cfg;
    cfg.copies = space.copies;
    cfg.seed = seed;
    cfg.dim = dim;
    const std::string& f = space.family;
    if (f == "laplace" || f == "gaussian") {
        cfg.kind = MapKind::FourierReal;
        cfg.target = f == "laplace" ? FrequencyLaw{LaplaceLaw{tau}} : FrequencyLaw{GaussianLaw{tau}};
        return cfg;
    }
    cfg.kind = MapKind::Binning;
    DistributionLaw law;
    if (f == "poisson") {
        law = ShiftedPoisson{shape};
    } else if (f == "gamma") {
        law = GammaDist{shape, 1.0};
    } else if (f == "nakagami") {
        law = Nakagami{shape, 1.0};
    } else if (f == "weibull") {
        law = Weibull{shape, 1.0};
    } else {
        throw ParseError("unknown search family '" + f + "'");
    }
    cfg.target = KernelSpec::from_tau(DistributionSpec(law), tau);
    return cfg;
}

CvResult cross_validate(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const SearchSpace& space) {
    const bool fourier = space.family == "laplace" || space.family == "gaussian";
    const std::vector<double> shapes = fourier ? std::vector<double>{0.0} : space.shapes;
    if (shapes.empty() || space.taus.empty() || space.lambdas.empty()) throw DomainError("cross_validate: empty grid");
    if (space.folds < 2) throw DomainError("cross_validate: need at least 2 folds");
    const std::size_t n = static_cast<std::size_t>(X.rows());
    if (n < space.folds) throw DomainError("cross_validate: fewer points than folds");
    if (static_cast<std::size_t>(y.size()) != n) throw DimensionError("cross_validate: target count differs from point count");

    const auto order = shuffled_indices(n, space.seed, kFoldStream);
    std::vector<std::vector<std::size_t>> fit_rows(space.folds);
    std::vector<std::vector<std::size_t>> hold_rows(space.folds);
    for (std::size_t pos = 0; pos < n; ++pos) {
        for (std::size_t f = 0; f < space.folds; ++f) (pos % space.folds == f ? hold_rows : fit_rows)[f].push_back(order[pos]);
    }

    const bool regression = space.task == Task::Regression;
    const std::optional<ClassEncoding> encoding = regression ? std::nullopt : std::optional<ClassEncoding>(ClassEncoding(y));
    const std::size_t L = space.lambdas.size();
    const std::size_t combos = shapes.size() * space.taus.size();
    std::vector<std::vector<double>> scores(combos, std::vector<double>(L, 0.0));

    parallel_for(combos, [&](std::size_t c) {
        const double shape = shapes[c / space.taus.size()];
        const double tau = space.taus[c % space.taus.size()];
        std::vector<double> total(L, 0.0);
        for (std::size_t f = 0; f < space.folds; ++f) {
            const FeatureMapConfig cfg =
                grid_config(space, shape, tau, static_cast<std::size_t>(X.cols()), derive_seed(space.seed, f));
            FeatureMap map = FeatureMap::build(cfg);
            const Eigen::MatrixXd Xf = select_rows(X, fit_rows[f]);
            const Eigen::VectorXd yf = select_rows(y, fit_rows[f]);
            const Eigen::MatrixXd Xh = select_rows(X, hold_rows[f]);
            const Eigen::VectorXd yh = select_rows(y, hold_rows[f]);
            const FeatureBatch fit_batch = map.featurize(Xf);
            const FeatureBatch hold_batch = map.featurize(Xh);
            for (std::size_t li = 0; li < L; ++li) {
                if (regression) {
                    const RidgeSolution sol = fit_ridge(fit_batch, yf, space.lambdas[li]);
                    total[li] += (predict_scores(sol, hold_batch).col(0) - yh).squaredNorm();
                } else {
                    const RidgeSolution sol = fit_ridge(fit_batch, encoding->indicators(yf), space.lambdas[li], FitOptions{false});
                    const Eigen::MatrixXd s = predict_scores(sol, hold_batch);
                    for (Eigen::Index i = 0; i < s.rows(); ++i) {
                        Eigen::Index best = 0;
                        s.row(i).maxCoeff(&best);
                        if (encoding->classes[static_cast<std::size_t>(best)] == yh(i)) total[li] += 1.0;
                    }
                }
            }
        }
        for (std::size_t li = 0; li < L; ++li) scores[c][li] = total[li] / static_cast<double>(n);
    });

    CvResult result;
    bool have = false;
    for (std::size_t c = 0; c < combos; ++c) {
        for (std::size_t li = 0; li < L; ++li) {
            const CvPoint pt{shapes[c / space.taus.size()], space.taus[c % space.taus.size()], space.lambdas[li], scores[c][li]};
            result.table.push_back(pt);
            const CvPoint& b = result.best;
            const bool better = !have || (regression ? pt.score < b.score : pt.score > b.score) ||
                                (pt.score == b.score && (pt.lambda > b.lambda || (pt.lambda == b.lambda && pt.tau > b.tau)));
            if (better) {
                result.best = pt;
                have = true;
            }
        }
    }
    return result;
}

}  // namespace polya
