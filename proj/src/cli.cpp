#include "polya/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "polya/approx.hpp"
#include "polya/errors.hpp"
#include "polya/io.hpp"
#include "polya/learn.hpp"
#include "polya/random.hpp"
#include "text_util.hpp"

namespace polya::cli {
namespace {

using nlohmann::json;
using text::format_double;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("POLYA_SEED")) {
        if (const auto v = text::parse_int(env); v && *v >= 0) return static_cast<std::uint64_t>(*v);
    }
    return 1;
}

struct Options {
    std::string kernel = "gamma:s=2,theta=1";
    std::string map = "rb";
    std::string data;
    std::string model;
    std::string out;
    std::string task = "regression";
    std::string family = "gamma";
    std::string config;
    std::vector<double> values;
    std::vector<std::size_t> copies_list;
    std::vector<std::string> kinds{"fourier-complex", "fourier-real", "binning"};
    std::vector<std::string> methods;
    std::vector<double> shapes;
    std::vector<double> taus{0.125, 0.25, 0.5, 1.0, 2.0, 4.0};
    std::vector<double> lambdas{0.01, 0.1, 1.0};
    std::size_t copies = 16;
    std::size_t trials = 20;
    std::size_t folds = 4;
    std::size_t subsample = 0;
    std::size_t points = 50;
    std::size_t dim = 1;
    std::size_t grid = 101;
    std::size_t approx_points = 200;
    std::size_t hash_buckets = 0;
    std::uint64_t seed = default_seed();
    double lambda = 0.1;
    std::optional<double> tau;
    double rmax = 10.0;
    bool no_normalize = false;
};

// Output goes to --out when given, else to the command's stdout.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw std::ios_base::failure("cannot write '" + path + "'");
            stream_ = &file_;
        }
    }
    std::ostream& operator*() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

KernelSpec kernel_with_tau(const Options& o) {
    KernelSpec spec = KernelSpec::parse(o.kernel);
    if (o.tau) return KernelSpec::from_tau(spec.dist(), *o.tau);
    return spec;
}

// Target of a map of the given kind, converting between the Laplace law and the gamma(s=2) kernel as needed.
MapTarget target_for(MapKind kind, const std::string& text, std::optional<double> tau) {
    MapTarget target = parse_map_target(text);
    if (auto* spec = std::get_if<KernelSpec>(&target); spec && tau) target = KernelSpec::from_tau(spec->dist(), *tau);
    if (kind == MapKind::Binning) {
        if (const auto* law = std::get_if<FrequencyLaw>(&target)) {
            if (!std::holds_alternative<LaplaceLaw>(*law)) throw DomainError("binning cannot target the Gaussian kernel");
            return KernelSpec(DistributionSpec(GammaDist{2.0, std::get<LaplaceLaw>(*law).sigma}));
        }
        return target;
    }
    if (const auto* spec = std::get_if<KernelSpec>(&target)) return fourier_law_for(*spec);
    return target;
}

FeatureMapConfig map_config(const Options& o, std::size_t dim) {
    FeatureMapConfig cfg;
    cfg.kind = parse_map_kind(o.map);
    cfg.copies = o.copies;
    cfg.seed = o.seed;
    cfg.dim = dim;
    cfg.target = target_for(cfg.kind, o.kernel, o.tau);
    if (o.hash_buckets > 0) cfg.hash_buckets = o.hash_buckets;
    cfg.validate();
    return cfg;
}

Dataset load(const Options& o) {
    if (o.data.empty()) throw DomainError("--data is required");
    Dataset ds = read_libsvm(o.data);
    if (o.subsample > 0) ds = subsample(ds, o.subsample, o.seed);
    return ds;
}

Task task_of(const Options& o) { return parse_task(o.task); }

double metric(Task task, const Eigen::VectorXd& predicted, const Eigen::VectorXd& truth) {
    return task == Task::Regression ? mean_squared_error(predicted, truth) : accuracy(predicted, truth);
}

const char* metric_name(Task task) { return task == Task::Regression ? "mse" : "accuracy"; }

std::pair<double, double> mean_stderr(const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    if (v.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()))};
}

// ---- kernel ---------------------------------------------------------------

void cmd_kernel_eval(const Options& o, std::ostream& out) {
    const KernelSpec spec = kernel_with_tau(o);
    out << "r,k\n";
    for (double r : o.values) out << format_double(r) << ',' << format_double(eval_kernel(spec, r)) << '\n';
}

void cmd_kernel_ft(const Options& o, std::ostream& out) {
    const KernelSpec spec = kernel_with_tau(o);
    out << "t,ft\n";
    for (double t : o.values) out << format_double(t) << ',' << format_double(eval_ft(spec, t).value) << '\n';
}

void cmd_kernel_table(const Options& o, std::ostream& stdout_) {
    if (o.grid < 2) throw DomainError("--grid must be >= 2");
    if (!(o.rmax > 0.0)) throw DomainError("--rmax must be > 0");
    const KernelSpec spec = kernel_with_tau(o);
    Sink sink(o.out, stdout_);
    std::ostream& out = *sink;
    out << "r,k,ft\n";
    for (std::size_t i = 0; i < o.grid; ++i) {
        const double r = o.rmax * static_cast<double>(i) / static_cast<double>(o.grid - 1);
        out << format_double(r) << ',' << format_double(eval_kernel(spec, r)) << ',' << format_double(eval_ft(spec, r).value)
            << '\n';
    }
}

// ---- features -------------------------------------------------------------

void cmd_features(const Options& o, std::ostream& stdout_) {
    Dataset ds = load(o);
    if (!o.no_normalize) normalize(ds);
    const FeatureMapConfig cfg = map_config(o, ds.dim());
    if (cfg.kind == MapKind::FourierComplex) throw DomainError("features: the complex map is for analysis only; use rf or rb");
    FeatureMap map = FeatureMap::build(cfg);
    const FeatureBatch batch = map.featurize(ds.points);
    {
        Sink sink(o.out, stdout_);
        std::ostream& out = *sink;
        for (std::size_t i = 0; i < batch.points; ++i) {
            std::vector<std::pair<std::size_t, double>> entries;
            if (batch.kind == MapKind::FourierReal) {
                for (std::size_t l = 0; l < batch.copies; ++l) {
                    entries.emplace_back(l, batch.real(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(i)));
                }
            } else {
                std::map<std::size_t, double> merged;
                for (std::size_t l = 0; l < batch.copies; ++l) merged[batch.bins[i * batch.copies + l]] += batch.bin_value;
                entries.assign(merged.begin(), merged.end());
            }
            for (std::size_t e = 0; e < entries.size(); ++e) {
                out << (e ? " " : "") << entries[e].first << ':' << format_double(entries[e].second);
            }
            out << '\n';
        }
    }
    if (!o.out.empty()) {
        json meta = config_to_json(cfg);
        meta["points"] = batch.points;
        meta["feature_count"] = batch.feature_count;
        meta["normalized"] = !o.no_normalize;
        meta["source"] = o.data;
        std::ofstream side(o.out + ".meta.json");
        if (!side) throw std::ios_base::failure("cannot write '" + o.out + ".meta.json'");
        side << meta.dump(1) << '\n';
    }
}

// ---- approx-error ---------------------------------------------------------

void cmd_approx_error(const Options& o, std::ostream& stdout_) {
    Eigen::MatrixXd X;
    if (!o.data.empty()) {
        Dataset ds = load(o);
        normalize(ds);
        X = ds.points;
    } else {
        if (o.points < 1 || o.dim < 1) throw DomainError("--points and --dim must be >= 1");
        RandomStream rng(o.seed, 0x504F494E54ull);
        X.resize(static_cast<Eigen::Index>(o.points), static_cast<Eigen::Index>(o.dim));
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            for (Eigen::Index j = 0; j < X.cols(); ++j) X(i, j) = 2.0 * rng.uniform() - 1.0;
        }
    }
    if (o.trials < 1) throw DomainError("--trials must be >= 1");
    const std::vector<std::size_t> copies = o.copies_list.empty() ? std::vector<std::size_t>{1, 2, 4, 8, 16, 32, 64} : o.copies_list;
    Sink sink(o.out, stdout_);
    std::ostream& out = *sink;
    out << "D,kind,theory,empirical_mean,empirical_stderr,theory_sq,empirical_sq_mean,empirical_sq_stderr\n";
    for (std::size_t D : copies) {
        for (const std::string& kind_text : o.kinds) {
            FeatureMapConfig cfg;
            cfg.kind = parse_map_kind(kind_text);
            cfg.copies = D;
            cfg.seed = o.seed;
            cfg.dim = static_cast<std::size_t>(X.cols());
            cfg.target = target_for(cfg.kind, o.kernel, o.tau);
            const ErrorStats s = empirical_error(X, cfg, o.trials);
            out << D << ',' << to_string(cfg.kind) << ',' << format_double(s.theory_rel) << ',' << format_double(s.mean_rel)
                << ',' << format_double(s.stderr_rel) << ',' << format_double(s.theory_sq) << ','
                << format_double(s.mean_sq) << ',' << format_double(s.stderr_sq) << '\n';
        }
    }
}

// ---- fit / predict --------------------------------------------------------

void cmd_fit(const Options& o, std::ostream& out) {
    if (o.out.empty()) throw DomainError("fit: --out <model.json> is required");
    Dataset ds = load(o);
    const Task task = task_of(o);
    const Eigen::MatrixXd raw = ds.points;
    const Normalizer norm = normalize(ds);
    FeatureMap map = FeatureMap::build(map_config(o, ds.dim()));
    ModelBundle bundle{task, norm, map, {}, {}};
    if (task == Task::Regression) {
        RidgeModel model = fit(std::move(map), ds.points, ds.targets, o.lambda);
        bundle.map = model.map;
        bundle.solution = model.solution;
    } else {
        Classifier clf = one_vs_all(std::move(map), ds.points, ds.targets, o.lambda);
        bundle.map = clf.map;
        bundle.solution = clf.solution;
        bundle.classes = clf.classes;
    }
    save_model(o.out, bundle);
    const std::size_t features = bundle.map.feature_count();
    const Eigen::VectorXd fitted = predict_bundle(bundle, raw);
    json summary{{"points", ds.size()}, {"features", features}, {"primal", bundle.solution.primal},
                 {std::string("train_") + metric_name(task), metric(task, fitted, ds.targets)}};
    out << summary.dump() << '\n';
}

void cmd_predict(const Options& o, std::ostream& stdout_) {
    if (o.model.empty()) throw DomainError("predict: --model is required");
    ModelBundle bundle = load_model(o.model);
    const Dataset ds = load(o);
    const Eigen::VectorXd pred = predict_bundle(bundle, ds.points);
    {
        Sink sink(o.out, stdout_);
        for (Eigen::Index i = 0; i < pred.size(); ++i) *sink << format_double(pred(i)) << '\n';
    }
    if (!o.out.empty()) {
        json summary{{"points", ds.size()}, {metric_name(bundle.task), metric(bundle.task, pred, ds.targets)}};
        stdout_ << summary.dump() << '\n';
    }
}

// ---- cv -------------------------------------------------------------------

std::vector<double> default_shapes(const std::string& family) {
    if (family == "poisson") return {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
    if (family == "weibull") return {1.0, 2.0, 3.0};
    return {0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
}

void cmd_cv(const Options& o, std::ostream& stdout_) {
    Dataset ds = load(o);
    normalize(ds);
    SearchSpace space;
    space.family = o.family;
    space.shapes = o.shapes.empty() ? default_shapes(o.family) : o.shapes;
    space.taus = o.taus;
    space.lambdas = o.lambdas;
    space.copies = o.copies;
    space.seed = o.seed;
    space.folds = o.folds;
    space.task = task_of(o);
    const CvResult result = cross_validate(ds.points, ds.targets, space);
    Sink sink(o.out, stdout_);
    std::ostream& out = *sink;
    out << "shape,tau,lambda," << metric_name(space.task) << ",best\n";
    for (const CvPoint& p : result.table) {
        const bool best = p.shape == result.best.shape && p.tau == result.best.tau && p.lambda == result.best.lambda;
        out << format_double(p.shape) << ',' << format_double(p.tau) << ',' << format_double(p.lambda) << ','
            << format_double(p.score) << ',' << (best ? 1 : 0) << '\n';
    }
}

// ---- bench ----------------------------------------------------------------

struct Method {
    std::string name;
    MapKind kind;
    MapTarget target;
};

Method parse_method(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ParseError("method '" + text + "' must look like rb:<kernel> or rf:<kernel>");
    const std::string prefix = text.substr(0, colon);
    MapKind kind;
    if (prefix == "rb") {
        kind = MapKind::Binning;
    } else if (prefix == "rf") {
        kind = MapKind::FourierReal;
    } else {
        throw ParseError("method '" + text + "' must start with rb: or rf:");
    }
    return {text, kind, target_for(kind, text.substr(colon + 1), std::nullopt)};
}

void apply_config_file(Options& o, const CLI::App& bench) {
    std::ifstream in(o.config);
    if (!in) throw std::ios_base::failure("cannot open '" + o.config + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    auto given = [&bench](const char* flag) { return bench.count(flag) > 0; };
    try {
        if (j.contains("data") && !given("--data")) o.data = j["data"].get<std::string>();
        if (j.contains("task") && !given("--task")) o.task = j["task"].get<std::string>();
        if (j.contains("methods") && !given("--method")) o.methods = j["methods"].get<std::vector<std::string>>();
        if (j.contains("copies") && !given("--copies")) o.copies_list = j["copies"].get<std::vector<std::size_t>>();
        if (j.contains("trials") && !given("--trials")) o.trials = j["trials"].get<std::size_t>();
        if (j.contains("seed") && !given("--seed")) o.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("lambda") && !given("--lambda")) o.lambda = j["lambda"].get<double>();
        if (j.contains("subsample") && !given("--subsample")) o.subsample = j["subsample"].get<std::size_t>();
        if (j.contains("approx_points") && !given("--approx-points")) o.approx_points = j["approx_points"].get<std::size_t>();
        if (j.contains("out") && !given("--out")) o.out = j["out"].get<std::string>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
}

void cmd_bench(const Options& o, std::ostream& stdout_, std::ostream& err) {
    if (o.methods.empty()) throw DomainError("bench: give at least one --method");
    if (o.trials < 1) throw DomainError("--trials must be >= 1");
    std::vector<std::size_t> copies = o.copies_list.empty() ? std::vector<std::size_t>{8, 32, 128} : o.copies_list;
    if (!std::is_sorted(copies.begin(), copies.end())) throw DomainError("bench: --copies must be ascending");
    std::vector<Method> methods;
    for (const std::string& m : o.methods) methods.push_back(parse_method(m));

    const Task task = task_of(o);
    Dataset ds = load(o);
    split_train_test(ds, o.seed);
    normalize(ds);
    const Eigen::MatrixXd Xtr = select_rows(ds.points, ds.train);
    const Eigen::VectorXd ytr = select_rows(ds.targets, ds.train);
    const Eigen::MatrixXd Xte = select_rows(ds.points, ds.test);
    const Eigen::VectorXd yte = select_rows(ds.targets, ds.test);
    const Eigen::MatrixXd Xapprox = Xtr.topRows(std::min<Eigen::Index>(Xtr.rows(), static_cast<Eigen::Index>(o.approx_points)));

    Sink sink(o.out, stdout_);
    std::ostream& out = *sink;
    out << "method,D,theory,empirical_mean,empirical_stderr," << metric_name(task) << "_mean," << metric_name(task)
        << "_stderr\n";
    for (const Method& m : methods) {
        std::optional<std::pair<std::size_t, double>> previous;
        for (std::size_t D : copies) {
            FeatureMapConfig cfg;
            cfg.kind = m.kind;
            cfg.copies = D;
            cfg.seed = o.seed;
            cfg.dim = ds.dim();
            cfg.target = m.target;
            std::vector<double> scores;
            for (std::size_t t = 0; t < o.trials; ++t) {
                FeatureMapConfig trial = cfg;
                trial.seed = derive_seed(o.seed, t);
                if (task == Task::Regression) {
                    RidgeModel model = fit(FeatureMap::build(trial), Xtr, ytr, o.lambda);
                    scores.push_back(mean_squared_error(predict(model, Xte), yte));
                } else {
                    Classifier clf = one_vs_all(FeatureMap::build(trial), Xtr, ytr, o.lambda);
                    scores.push_back(accuracy(predict_labels(clf, Xte), yte));
                }
            }
            const auto [score_mean, score_se] = mean_stderr(scores);
            // Test error can get worse as D grows; this is logged, not corrected.
            if (previous && (task == Task::Regression ? score_mean > previous->second : score_mean < previous->second)) {
                err << json{{"notice", "degradation"}, {"method", m.name}, {"D", D}, {"previous_D", previous->first},
                            {metric_name(task), score_mean}, {"previous", previous->second}}
                           .dump()
                    << '\n';
            }
            previous = {D, score_mean};
            std::string theory = "", emp = "", emp_se = "";
            if (Xapprox.rows() > 0 && o.approx_points > 0) {
                const ErrorStats s = empirical_error(Xapprox, cfg, o.trials);
                theory = format_double(s.theory_rel);
                emp = format_double(s.mean_rel);
                emp_se = format_double(s.stderr_rel);
            }
            out << '"' << m.name << "\"," << D << ',' << theory << ',' << emp << ',' << emp_se << ','
                << format_double(score_mean) << ',' << format_double(score_se) << '\n';
        }
    }
}

// ---- error records --------------------------------------------------------

int report(std::ostream& err, ExitCode code, const char* kind, const std::string& message, std::size_t line = 0,
           std::size_t column = 0) {
    json rec{{"error", kind}, {"message", message}};
    if (line > 0) rec["line"] = line;
    if (column > 0) rec["column"] = column;
    err << rec.dump() << '\n';
    return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Polya kernels and random feature maps"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for all subcommands");

    auto add_seed = [&o](CLI::App* c) {
        c->add_option("--seed", o.seed, "Master seed (default: $POLYA_SEED or 1)");
    };
    auto add_kernel = [&o](CLI::App* c) {
        c->add_option("--kernel", o.kernel, "Kernel: <dist>[;tau=v|;rho=v], or laplace:sigma=v / gaussian:sigma=v");
        c->add_option("--tau", o.tau, "Set rho = mean/tau");
    };
    auto add_data = [&o](CLI::App* c) {
        c->add_option("--data", o.data, "LIBSVM data file");
        c->add_option("--subsample", o.subsample, "Keep a random subset of this many points");
    };
    auto add_map = [&o](CLI::App* c) {
        c->add_option("--map", o.map, "Map kind: rb | rf | rf-complex");
        c->add_option("--copies", o.copies, "Number of copies D");
        c->add_option("--hash-buckets", o.hash_buckets, "Hash bins into this many columns (binning only)");
    };

    CLI::App* kernel = app.add_subcommand("kernel", "Evaluate a kernel, its Fourier transform, or a table of both");
    kernel->require_subcommand(1);
    CLI::App* k_eval = kernel->add_subcommand("eval", "k(r) at the given distances");
    CLI::App* k_ft = kernel->add_subcommand("ft", "F[k](t) at the given frequencies");
    CLI::App* k_table = kernel->add_subcommand("table", "CSV of r, k(r), F[k](r) on a uniform grid");
    for (CLI::App* c : {k_eval, k_ft}) {
        add_kernel(c);
        c->add_option("values", o.values, "Points")->required();
    }
    add_kernel(k_table);
    k_table->add_option("--rmax", o.rmax, "Largest grid value");
    k_table->add_option("--grid", o.grid, "Number of grid points");
    k_table->add_option("--out", o.out, "Output file");

    CLI::App* features = app.add_subcommand("features", "Write random features of a dataset");
    add_data(features);
    add_kernel(features);
    add_map(features);
    add_seed(features);
    features->add_flag("--no-normalize", o.no_normalize, "Use attributes as given");
    features->add_option("--out", o.out, "Feature file; metadata goes to <out>.meta.json");

    CLI::App* approx = app.add_subcommand("approx-error", "Theoretical vs empirical Frobenius error per D");
    add_data(approx);
    add_kernel(approx);
    add_seed(approx);
    approx->add_option("--points", o.points, "Synthetic point count when no --data");
    approx->add_option("--dim", o.dim, "Synthetic dimension when no --data");
    approx->add_option("--copies", o.copies_list, "List of D values")->delimiter(',');
    approx->add_option("--kinds", o.kinds, "Map kinds")->delimiter(',');
    approx->add_option("--trials", o.trials, "Independent maps per D");
    approx->add_option("--out", o.out, "CSV output file");

    CLI::App* fit_cmd = app.add_subcommand("fit", "Fit a ridge model and save it as JSON");
    add_data(fit_cmd);
    add_kernel(fit_cmd);
    add_map(fit_cmd);
    add_seed(fit_cmd);
    fit_cmd->add_option("--task", o.task, "regression | binary | multiclass");
    fit_cmd->add_option("--lambda", o.lambda, "Ridge parameter");
    fit_cmd->add_option("--out", o.out, "Model file")->required();

    CLI::App* predict_cmd = app.add_subcommand("predict", "Predict with a saved model");
    predict_cmd->add_option("--model", o.model, "Model file")->required();
    predict_cmd->add_option("--data", o.data, "LIBSVM data file")->required();
    predict_cmd->add_option("--out", o.out, "Prediction file");

    CLI::App* cv = app.add_subcommand("cv", "Cross-validated grid search over (shape, tau, lambda)");
    add_data(cv);
    add_seed(cv);
    cv->add_option("--task", o.task, "regression | binary | multiclass");
    cv->add_option("--family", o.family, "poisson | gamma | nakagami | weibull | laplace | gaussian");
    cv->add_option("--shapes", o.shapes, "Shape grid")->delimiter(',');
    cv->add_option("--taus", o.taus, "Tau grid")->delimiter(',');
    cv->add_option("--lambdas", o.lambdas, "Lambda grid")->delimiter(',');
    cv->add_option("--copies", o.copies, "Number of copies D");
    cv->add_option("--folds", o.folds, "Number of folds");
    cv->add_option("--out", o.out, "CSV output file");

    CLI::App* bench = app.add_subcommand("bench", "Test error and approximation error per method and D");
    add_data(bench);
    add_seed(bench);
    bench->add_option("--config", o.config, "JSON file with defaults for the options below");
    bench->add_option("--task", o.task, "regression | binary | multiclass");
    bench->add_option("--method", o.methods, "rb:<kernel> or rf:<kernel>, repeatable");
    bench->add_option("--copies", o.copies_list, "Ascending list of D values")->delimiter(',');
    bench->add_option("--trials", o.trials, "Independent maps per (method, D)");
    bench->add_option("--lambda", o.lambda, "Ridge parameter");
    bench->add_option("--approx-points", o.approx_points, "Training points used for the Frobenius error (0 skips)");
    bench->add_option("--out", o.out, "CSV output file");

    std::vector<std::string> argv_store{"polya"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());

    try {
        try {
            app.parse(static_cast<int>(argv.size()), argv.data());
        } catch (const CLI::CallForHelp&) {
            out << app.help();
            return kOk;
        } catch (const CLI::CallForAllHelp&) {
            out << app.help("", CLI::AppFormatMode::All);
            return kOk;
        } catch (const CLI::ParseError& e) {
            return report(err, kUsage, "usage", e.what());
        }
        if (bench->parsed() && !o.config.empty()) apply_config_file(o, *bench);

        if (k_eval->parsed()) {
            cmd_kernel_eval(o, out);
        } else if (k_ft->parsed()) {
            cmd_kernel_ft(o, out);
        } else if (k_table->parsed()) {
            cmd_kernel_table(o, out);
        } else if (features->parsed()) {
            cmd_features(o, out);
        } else if (approx->parsed()) {
            cmd_approx_error(o, out);
        } else if (fit_cmd->parsed()) {
            cmd_fit(o, out);
        } else if (predict_cmd->parsed()) {
            cmd_predict(o, out);
        } else if (cv->parsed()) {
            cmd_cv(o, out);
        } else if (bench->parsed()) {
            cmd_bench(o, out, err);
        }
        return kOk;
    } catch (const ParseError& e) {
        return report(err, kParse, "parse_error", e.what(), e.line(), e.column());
    } catch (const DomainError& e) {
        return report(err, kDomain, "domain_error", e.what());
    } catch (const DimensionError& e) {
        return report(err, kDomain, "dimension_error", e.what());
    } catch (const std::invalid_argument& e) {
        return report(err, kDomain, "domain_error", e.what());
    } catch (const QuadratureError& e) {
        return report(err, kNumerical, "quadrature_error", e.what());
    } catch (const DisagreementError& e) {
        return report(err, kNumerical, "disagreement_error", e.what());
    } catch (const ConvergenceError& e) {
        return report(err, kNumerical, "convergence_error", e.what());
    } catch (const NumericalError& e) {
        return report(err, kNumerical, "numerical_error", e.what());
    } catch (const std::ios_base::failure& e) {
        return report(err, kIo, "io_error", e.what());
    } catch (const std::exception& e) {
        return report(err, kFailure, "error", e.what());
    }
}

}  // namespace polya::cli
