#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <functional>
#include <optional>
#include <sstream>

#include "polya/approx.hpp"
#include "polya/cli.hpp"
#include "polya/errors.hpp"
#include "polya/feature_maps.hpp"
#include "polya/kernels.hpp"
#include "polya/learn.hpp"
#include "polya/specfun.hpp"

namespace py = pybind11;
using namespace polya;

namespace {

Eigen::VectorXd map_values(const Eigen::VectorXd& x, const std::function<double(double)>& f) {
    Eigen::VectorXd out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) out(i) = f(x(i));
    return out;
}

FeatureMapConfig make_config(const std::string& kind, const std::string& target, std::size_t copies, std::size_t dim,
                             std::uint64_t seed, std::optional<std::size_t> hash_buckets) {
    FeatureMapConfig cfg;
    cfg.kind = parse_map_kind(kind);
    cfg.target = parse_map_target(target);
    cfg.copies = copies;
    cfg.dim = dim;
    cfg.seed = seed;
    cfg.hash_buckets = hash_buckets;
    return cfg;
}

// Features as a dense (points x features) array; complex maps return complex values.
py::object features_array(const FeatureBatch& b) {
    if (b.kind == MapKind::FourierComplex) return py::cast(Eigen::MatrixXcd(b.complex.transpose()));
    return py::cast(Eigen::MatrixXd(b.dense().transpose()));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Polya kernels, random Fourier and random binning features, ridge regression";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_ArithmeticError);
    py::register_exception<QuadratureError>(m, "QuadratureError", PyExc_ArithmeticError);
    py::register_exception<DisagreementError>(m, "DisagreementError", PyExc_ArithmeticError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    auto sf = m.def_submodule("specfun", "Special functions");
    sf.def("gamma", &specfun::gamma_fn, py::arg("s"));
    sf.def("log_gamma", &specfun::log_gamma, py::arg("s"));
    sf.def("upper_inc_gamma", &specfun::upper_inc_gamma, py::arg("s"), py::arg("t"));
    sf.def("e1", &specfun::exp_integral_e1, py::arg("z"));
    sf.def("kummer_m", &specfun::kummer_m, py::arg("a"), py::arg("b"), py::arg("z"));
    sf.def("erf", [](double x) { return specfun::erf(x); }, py::arg("x"));
    sf.def("erfc", [](double x) { return specfun::erfc(x); }, py::arg("x"));
    sf.def("erfi", [](double x) { return specfun::erfi(x); }, py::arg("x"));

    m.def(
        "eval_kernel",
        [](const std::string& kernel, const Eigen::VectorXd& r) {
            const KernelSpec k = KernelSpec::parse(kernel);
            return map_values(r, [&k](double v) { return eval_kernel(k, v); });
        },
        py::arg("kernel"), py::arg("r"), "k(r) for a kernel in text form, e.g. 'gamma:s=2,theta=1;tau=0.5'");
    m.def(
        "eval_ft",
        [](const std::string& kernel, const Eigen::VectorXd& t) {
            const KernelSpec k = KernelSpec::parse(kernel);
            return map_values(t, [&k](double v) { return eval_ft(k, v).value; });
        },
        py::arg("kernel"), py::arg("t"));
    m.def(
        "kernel_to_cdf",
        [](const std::string& kernel, const Eigen::VectorXd& x) {
            const KernelSpec k = KernelSpec::parse(kernel);
            return map_values(x, [&k](double v) { return kernel_to_cdf(k, v); });
        },
        py::arg("kernel"), py::arg("x"));
    m.def("area_under_curve", [](const std::string& kernel) { return area_under_curve(KernelSpec::parse(kernel)); },
          py::arg("kernel"));
    m.def("exact_gram", [](const std::string& kernel, const Eigen::MatrixXd& X) { return exact_gram(KernelSpec::parse(kernel), X); },
          py::arg("kernel"), py::arg("X"));

    py::class_<FeatureMap>(m, "FeatureMap")
        .def(py::init([](const std::string& kind, const std::string& target, std::size_t copies, std::size_t dim,
                         std::uint64_t seed, std::optional<std::size_t> hash_buckets) {
                 return FeatureMap::build(make_config(kind, target, copies, dim, seed, hash_buckets));
             }),
             py::arg("kind"), py::arg("target"), py::arg("copies"), py::arg("dim"), py::arg("seed") = 0,
             py::arg("hash_buckets") = py::none())
        .def_property_readonly("kind", [](const FeatureMap& f) { return to_string(f.kind()); })
        .def_property_readonly("copies", [](const FeatureMap& f) { return f.config().copies; })
        .def_property_readonly("feature_count", &FeatureMap::feature_count)
        .def("featurize", [](FeatureMap& f, const Eigen::MatrixXd& X) { return features_array(f.featurize(X)); },
             py::arg("X"), "Dense (points x features) array; binning grows its vocabulary on unseen bins")
        .def("gram", [](FeatureMap& f, const Eigen::MatrixXd& X) { return gram(f.featurize(X)); }, py::arg("X"))
        .def("gram_complex", [](FeatureMap& f, const Eigen::MatrixXd& X) { return gram_complex(f.featurize(X)); },
             py::arg("X"))
        .def("__repr__", [](const FeatureMap& f) {
            std::ostringstream s;
            s << "FeatureMap(kind='" << to_string(f.kind()) << "', target='" << to_string(f.config().target)
              << "', copies=" << f.config().copies << ", dim=" << f.config().dim << ")";
            return s.str();
        });

    m.def(
        "variance_theory",
        [](const std::string& kind, double k, std::optional<double> k2) { return variance_theory(parse_map_kind(kind), k, k2); },
        py::arg("kind"), py::arg("k"), py::arg("k2") = py::none());
    m.def(
        "expected_sq_frobenius",
        [](const std::string& kind, const Eigen::MatrixXd& K, std::optional<Eigen::MatrixXd> k2, std::size_t copies) {
            return expected_sq_frobenius(parse_map_kind(kind), K, k2, copies);
        },
        py::arg("kind"), py::arg("K"), py::arg("k2") = py::none(), py::arg("copies") = 1);

    py::class_<RidgeModel>(m, "RidgeModel")
        .def(py::init([](FeatureMap map, const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lam, bool center) {
                 return fit(std::move(map), X, y, lam, FitOptions{center});
             }),
             py::arg("feature_map"), py::arg("X"), py::arg("y"), py::arg("lam"), py::arg("center") = true,
             "Ridge regression in the feature space of a copy of the given map")
        .def("predict", [](RidgeModel& m, const Eigen::MatrixXd& X) { return predict(m, X); }, py::arg("X"))
        .def_property_readonly("primal", [](const RidgeModel& m) { return m.solution.primal; })
        .def_property_readonly("weights", [](const RidgeModel& m) { return m.solution.weights; });

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = cli::run(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command-line tool in process; returns (exit_code, stdout, stderr)");
}
