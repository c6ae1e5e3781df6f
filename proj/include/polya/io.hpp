#pragma once

// LIBSVM text datasets and JSON model bundles.

#include <iosfwd>
#include <string>

#include "json.hpp"

#include "polya/learn.hpp"

namespace polya {

/// Parses `label idx:val ...` lines with 1-based indices; d is the largest index seen.
/// Blank lines and lines starting with '#' are skipped. Throws ParseError with the
/// 1-based line and column of the first malformed token, or when no data lines exist.
Dataset parse_libsvm(std::istream& in);
Dataset read_libsvm(const std::string& path);

/// Writes nonzero attributes only, with shortest round-trip number formatting.
void write_libsvm(std::ostream& out, const Dataset& ds);

/// A fitted predictor together with the attribute normalization it expects.
struct ModelBundle {
    Task task = Task::Regression;
    Normalizer normalizer;
    FeatureMap map;
    RidgeSolution solution;
    std::vector<double> classes;  // empty for regression
};

nlohmann::json config_to_json(const FeatureMapConfig& cfg);
FeatureMapConfig config_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const ModelBundle& model);
ModelBundle model_from_json(const nlohmann::json& j);

void save_model(const std::string& path, const ModelBundle& model);
ModelBundle load_model(const std::string& path);

/// Regression values, or class labels by the largest score.
Eigen::VectorXd predict_bundle(ModelBundle& model, const Eigen::MatrixXd& raw_points);

}  // namespace polya
