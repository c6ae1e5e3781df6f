#pragma once

// Ridge regression and one-vs-all classification in a random feature space.

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "polya/feature_maps.hpp"

namespace polya {

enum class Task { Regression, Binary, Multiclass };
std::string to_string(Task task);
Task parse_task(std::string_view text);

struct Dataset {
    Eigen::MatrixXd points;  // one point per row
    Eigen::VectorXd targets;
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;

    std::size_t size() const noexcept { return static_cast<std::size_t>(points.rows()); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(points.cols()); }
};

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& X, const std::vector<std::size_t>& rows);
Eigen::VectorXd select_rows(const Eigen::VectorXd& y, const std::vector<std::size_t>& rows);

/// Random 4:1 train/test split.
void split_train_test(Dataset& ds, std::uint64_t seed, double train_fraction = 0.8);
/// Keeps a random subset of m points (order preserved); clears the split.
Dataset subsample(const Dataset& ds, std::size_t m, std::uint64_t seed);

/// Per-attribute affine map sending the fitted range onto [-1, 1]; constant attributes map to 0.
struct Normalizer {
    Eigen::VectorXd center;
    Eigen::VectorXd half_range;  // 0 marks a constant attribute

    static Normalizer fit(const Eigen::MatrixXd& X);
    Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;
};

/// Fits the normalizer on the training rows and applies it to every point.
Normalizer normalize(Dataset& ds);

struct RidgeSolution {
    Eigen::MatrixXd weights;       // feature_count x outputs
    Eigen::RowVectorXd offsets;    // per-output target mean removed before fitting (0 when not centered)
    double lambda = 0.0;
    bool primal = true;            // solved the feature-space system rather than the n x n one
    double relative_residual = 0.0;
};

enum class Solver { Auto, Primal, Dual };

struct FitOptions {
    bool center_targets = true;
    /// Auto picks the smaller system.
    Solver solver = Solver::Auto;
};

/// Minimizes ||Z^T w - y||^2 + lambda ||w||^2 for each column of Y through the
/// smaller of (Z Z^T + lambda I) w = Z y and w = Z (Z^T Z + lambda I)^{-1} y.
/// Throws NumericalError on non-finite input or a failed factorization.
RidgeSolution fit_ridge(const FeatureBatch& batch, const Eigen::MatrixXd& Y, double lambda, FitOptions opts = {});
RidgeSolution fit_ridge(const FeatureBatch& batch, const Eigen::VectorXd& y, double lambda, FitOptions opts = {});

/// Scores <w, z(x)> (+ offset) per point and output; columns beyond the fitted
/// feature count carry zero weight.
Eigen::MatrixXd predict_scores(const RidgeSolution& solution, const FeatureBatch& batch);

struct RidgeModel {
    FeatureMap map;
    RidgeSolution solution;
};

RidgeModel fit(FeatureMap map, const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda, FitOptions opts = {});
Eigen::VectorXd predict(RidgeModel& model, const Eigen::MatrixXd& X);

struct Classifier {
    FeatureMap map;
    RidgeSolution solution;    // one output column per class
    std::vector<double> classes;
};

/// One ridge model per class on +1/-1 targets, sharing one factorization.
Classifier one_vs_all(FeatureMap map, const Eigen::MatrixXd& X, const Eigen::VectorXd& labels, double lambda);
Eigen::MatrixXd class_scores(Classifier& clf, const Eigen::MatrixXd& X);
Eigen::VectorXd predict_labels(Classifier& clf, const Eigen::MatrixXd& X);

double mean_squared_error(const Eigen::VectorXd& predicted, const Eigen::VectorXd& truth);
double accuracy(const Eigen::VectorXd& predicted, const Eigen::VectorXd& truth);

/// Grid for cross validation. `family` is one of poisson, gamma, nakagami,
/// weibull (binning, shape = mu/s/m/alpha, unit scale, rho = mean/tau), or
/// laplace, gaussian (real Fourier map with sigma = tau; shapes ignored).
struct SearchSpace {
    std::string family = "gamma";
    std::vector<double> shapes{2.0};
    std::vector<double> taus{1.0};
    std::vector<double> lambdas{0.01, 0.1, 1.0};
    std::size_t copies = 64;
    std::uint64_t seed = 0;
    std::size_t folds = 4;
    Task task = Task::Regression;
};

/// The map configuration for one grid point.
FeatureMapConfig grid_config(const SearchSpace& space, double shape, double tau, std::size_t dim, std::uint64_t seed);

struct CvPoint {
    double shape;
    double tau;
    double lambda;
    double score;  // validation MSE (regression) or accuracy (classification)
};

struct CvResult {
    CvPoint best;
    std::vector<CvPoint> table;
};

/// k-fold grid search. Lower MSE / higher accuracy wins; ties go to the larger
/// lambda, then the larger tau. Deterministic for a fixed seed and grid.
CvResult cross_validate(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const SearchSpace& space);

}  // namespace polya
