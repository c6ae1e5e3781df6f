#include "polya/io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "polya/errors.hpp"
#include "text_util.hpp"

namespace polya {
namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows, Eigen::Index cols) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (static_cast<Eigen::Index>(rows[i].size()) != cols) throw ParseError("model: ragged weight matrix");
        for (Eigen::Index j = 0; j < cols; ++j) m(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)].get<double>();
    }
    return m;
}

json vector_to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector_from_json(const json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

Dataset parse_libsvm(std::istream& in) {
    std::vector<double> labels;
    std::vector<std::vector<std::pair<std::size_t, double>>> rows;
    std::size_t dim = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view body = text::trim(line);
        if (body.empty() || body.front() == '#') continue;
        std::vector<std::pair<std::size_t, double>> entries;
        std::size_t pos = 0;
        bool have_label = false;
        while (pos < line.size()) {
            while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
            if (pos >= line.size()) break;
            std::size_t end = pos;
            while (end < line.size() && line[end] != ' ' && line[end] != '\t' && line[end] != '\r') ++end;
            const std::string_view token(line.data() + pos, end - pos);
            const std::size_t column = pos + 1;
            if (!have_label) {
                const auto label = text::parse_double(token);
                if (!label) throw ParseError("invalid label '" + std::string(token) + "'", line_no, column);
                labels.push_back(*label);
                have_label = true;
            } else {
                const auto colon = token.find(':');
                if (colon == std::string_view::npos) {
                    throw ParseError("expected index:value, got '" + std::string(token) + "'", line_no, column);
                }
                const auto index = text::parse_int(token.substr(0, colon));
                if (!index || *index < 1) {
                    throw ParseError("invalid feature index '" + std::string(token.substr(0, colon)) + "'", line_no, column);
                }
                const auto value = text::parse_double(token.substr(colon + 1));
                if (!value) {
                    throw ParseError("invalid feature value '" + std::string(token.substr(colon + 1)) + "'", line_no,
                                     column + colon + 1);
                }
                for (const auto& e : entries) {
                    if (e.first == static_cast<std::size_t>(*index)) {
                        throw ParseError("duplicate feature index " + std::to_string(*index), line_no, column);
                    }
                }
                entries.emplace_back(static_cast<std::size_t>(*index), *value);
                dim = std::max(dim, static_cast<std::size_t>(*index));
            }
            pos = end;
        }
        rows.push_back(std::move(entries));
    }
    if (labels.empty()) throw ParseError("dataset contains no data lines");
    Dataset ds;
    ds.points = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(labels.size()), static_cast<Eigen::Index>(dim));
    ds.targets = Eigen::Map<const Eigen::VectorXd>(labels.data(), static_cast<Eigen::Index>(labels.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (const auto& [index, value] : rows[i]) {
            ds.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(index - 1)) = value;
        }
    }
    return ds;
}

Dataset read_libsvm(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
    return parse_libsvm(in);
}

void write_libsvm(std::ostream& out, const Dataset& ds) {
    for (Eigen::Index i = 0; i < ds.points.rows(); ++i) {
        out << text::format_double(ds.targets(i));
        for (Eigen::Index j = 0; j < ds.points.cols(); ++j) {
            const double v = ds.points(i, j);
            if (v != 0.0) out << ' ' << (j + 1) << ':' << text::format_double(v);
        }
        out << '\n';
    }
}

json config_to_json(const FeatureMapConfig& cfg) {
    json j{{"kind", to_string(cfg.kind)},
           {"copies", cfg.copies},
           {"seed", cfg.seed},
           {"target", to_string(cfg.target)},
           {"dim", cfg.dim}};
    if (cfg.hash_buckets) j["hash_buckets"] = *cfg.hash_buckets;
    return j;
}

FeatureMapConfig config_from_json(const json& j) {
    FeatureMapConfig cfg;
    cfg.kind = parse_map_kind(j.at("kind").get<std::string>());
    cfg.copies = j.at("copies").get<std::size_t>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.target = parse_map_target(j.at("target").get<std::string>());
    cfg.dim = j.at("dim").get<std::size_t>();
    if (j.contains("hash_buckets")) cfg.hash_buckets = j.at("hash_buckets").get<std::size_t>();
    cfg.validate();
    return cfg;
}

json model_to_json(const ModelBundle& m) {
    json j{{"format", "polya-ridge-model"},
           {"version", 1},
           {"task", to_string(m.task)},
           {"map", config_to_json(m.map.config())},
           {"normalizer", {{"center", vector_to_json(m.normalizer.center)}, {"half_range", vector_to_json(m.normalizer.half_range)}}},
           {"lambda", m.solution.lambda},
           {"primal", m.solution.primal},
           {"offsets", vector_to_json(m.solution.offsets.transpose())},
           {"weights", matrix_to_json(m.solution.weights)},
           {"classes", m.classes}};
    if (m.map.kind() == MapKind::Binning) j["vocabulary"] = m.map.vocabulary();
    return j;
}

ModelBundle model_from_json(const json& j) {
    try {
        if (j.at("format").get<std::string>() != "polya-ridge-model") throw ParseError("not a model bundle");
        FeatureMap map = FeatureMap::build(config_from_json(j.at("map")));
        if (j.contains("vocabulary")) map.restore_vocabulary(j.at("vocabulary").get<std::vector<std::vector<std::int64_t>>>());
        RidgeSolution sol;
        sol.lambda = j.at("lambda").get<double>();
        sol.primal = j.at("primal").get<bool>();
        const Eigen::VectorXd offsets = vector_from_json(j.at("offsets"));
        sol.offsets = offsets.transpose();
        sol.weights = matrix_from_json(j.at("weights"), offsets.size());
        Normalizer norm;
        norm.center = vector_from_json(j.at("normalizer").at("center"));
        norm.half_range = vector_from_json(j.at("normalizer").at("half_range"));
        return ModelBundle{parse_task(j.at("task").get<std::string>()), std::move(norm), std::move(map), std::move(sol),
                           j.at("classes").get<std::vector<double>>()};
    } catch (const json::exception& e) {
        throw ParseError(std::string("model: ") + e.what());
    }
}

void save_model(const std::string& path, const ModelBundle& model) {
    std::ofstream out(path);
    if (!out) throw std::ios_base::failure("cannot write '" + path + "'");
    out << model_to_json(model).dump(1) << '\n';
}

ModelBundle load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("model: ") + e.what());
    }
    return model_from_json(j);
}

Eigen::VectorXd predict_bundle(ModelBundle& model, const Eigen::MatrixXd& raw_points) {
    Eigen::MatrixXd X = raw_points;
    const auto d = static_cast<Eigen::Index>(model.map.config().dim);
    if (X.cols() < d) {
        X.conservativeResize(Eigen::NoChange, d);
        X.rightCols(d - raw_points.cols()).setZero();
    } else if (X.cols() > d) {
        throw DimensionError("predict: data has " + std::to_string(X.cols()) + " attributes, model expects " + std::to_string(d));
    }
    const Eigen::MatrixXd scores = predict_scores(model.solution, model.map.featurize(model.normalizer.apply(X)));
    if (model.classes.empty()) return scores.col(0);
    Eigen::VectorXd out(scores.rows());
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        Eigen::Index best = 0;
        scores.row(i).maxCoeff(&best);
        out(i) = model.classes[static_cast<std::size_t>(best)];
    }
    return out;
}

}  // namespace polya
