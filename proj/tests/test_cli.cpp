#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "polya/cli.hpp"
#include "polya/io.hpp"
#include "polya/random.hpp"

using namespace polya;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Writes a small regression set to the working directory once.
const std::string& data_file() {
    static const std::string path = [] {
        RandomStream rng(5, 0);
        Dataset ds;
        ds.points.resize(150, 2);
        ds.targets.resize(150);
        for (Eigen::Index i = 0; i < 150; ++i) {
            ds.points(i, 0) = 4.0 * rng.uniform() - 2.0;
            ds.points(i, 1) = 4.0 * rng.uniform() - 2.0;
            ds.targets(i) = std::sin(ds.points(i, 0)) + 0.3 * ds.points(i, 1) + 0.05 * rng.normal();
        }
        std::ofstream f("cli_regression.svm");
        write_libsvm(f, ds);
        return std::string("cli_regression.svm");
    }();
    return path;
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

// An error is a single JSON line naming its category.
nlohmann::json error_line(const Result& r) {
    REQUIRE(lines(r.err) == 1);
    return nlohmann::json::parse(r.err);
}

}  // namespace

TEST_CASE("help and usage") {
    const Result help = run({"--help"});
    CHECK(help.code == cli::kOk);
    CHECK(help.out.find("kernel") != std::string::npos);
    const Result none = run({});
    CHECK(none.code == cli::kUsage);
    CHECK(error_line(none).at("error") == "usage");
    CHECK(run({"bogus"}).code == cli::kUsage);
    CHECK(run({"kernel", "eval", "--kernel", "gamma:s=2", "--frobnicate", "1"}).code == cli::kUsage);
}

TEST_CASE("kernel subcommands") {
    const Result e = run({"kernel", "eval", "--kernel", "gamma:s=2,theta=1", "0", "1"});
    REQUIRE(e.code == 0);
    CHECK(e.out == "r,k\n0,1\n1,0.36787944117144245\n");

    const Result f = run({"kernel", "ft", "--kernel", "gamma:s=1,theta=1", "1"});
    REQUIRE(f.code == 0);
    std::istringstream in(f.out);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(std::stod(row.substr(row.find(',') + 1)) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    const Result t = run({"kernel", "table", "--kernel", "rayleigh:sigma=1", "--grid", "11", "--rmax", "5"});
    REQUIRE(t.code == 0);
    CHECK(lines(t.out) == 12);

    CHECK(run({"kernel", "eval", "--kernel", "gamma:s=2", "--tau", "4", "1"}).out ==
          run({"kernel", "eval", "--kernel", "gamma:s=2;tau=4", "1"}).out);
}

TEST_CASE("errors map to exit codes") {
    Result r = run({"kernel", "eval", "--kernel", "gamma:s=x", "1"});
    CHECK(r.code == cli::kParse);
    CHECK(error_line(r).at("error") == "parse_error");

    r = run({"kernel", "eval", "--kernel", "gamma:s=2", "--tau=-1", "1"});
    CHECK(r.code == cli::kDomain);
    CHECK(error_line(r).at("error") == "domain_error");

    r = run({"fit", "--data", "missing_file.svm", "--kernel", "gamma:s=2", "--out", "never.json"});
    CHECK(r.code == cli::kIo);
    CHECK(error_line(r).at("error") == "io_error");

    {
        std::ofstream bad("cli_bad.svm");
        bad << "1 1:0.5\n2 x:1\n";
    }
    r = run({"features", "--data", "cli_bad.svm", "--kernel", "gamma:s=2", "--map", "rb"});
    CHECK(r.code == cli::kParse);
    const nlohmann::json j = error_line(r);
    CHECK(j.at("line") == 2);
    CHECK(j.at("column") == 3);

    r = run({"features", "--data", data_file(), "--kernel", "gaussian:sigma=1", "--map", "rb"});
    CHECK(r.code == cli::kDomain);
    r = run({"features", "--data", data_file(), "--kernel", "gamma:s=2", "--map", "rf-complex"});
    CHECK(r.code == cli::kDomain);
    CHECK(r.out.empty());
}

TEST_CASE("features are reproducible byte for byte") {
    const std::vector<std::string> args{"features", "--data", data_file(), "--kernel", "gamma:s=2", "--map", "rb",
                                        "--copies", "8", "--seed", "3"};
    const Result a = run(args);
    const Result b = run(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(lines(a.out) == 150);
    Result c = run({"features", "--data", data_file(), "--kernel", "gamma:s=2", "--map", "rb", "--copies", "8", "--seed",
                    "4"});
    CHECK(c.out != a.out);

    auto with_out = args;
    with_out.insert(with_out.end(), {"--out", "cli_features.svm"});
    REQUIRE(run(with_out).code == 0);
    CHECK(slurp("cli_features.svm") == a.out);
    const nlohmann::json meta = nlohmann::json::parse(slurp("cli_features.svm.meta.json"));
    CHECK(meta.at("copies") == 8);
    CHECK(meta.at("points") == 150);
}

TEST_CASE("fit then predict") {
    REQUIRE(run({"fit", "--data", data_file(), "--kernel", "gamma:s=2", "--map", "rb", "--copies", "32", "--lambda", "0.1",
                 "--out", "cli_model.json"})
                .code == 0);
    const Result p = run({"predict", "--model", "cli_model.json", "--data", data_file()});
    REQUIRE(p.code == 0);
    CHECK(lines(p.out) == 150);
    const Result q = run({"predict", "--model", "cli_model.json", "--data", data_file(), "--out", "cli_pred.txt"});
    REQUIRE(q.code == 0);
    CHECK(slurp("cli_pred.txt") == p.out);
    const nlohmann::json summary = nlohmann::json::parse(q.out);
    CHECK(summary.at("mse").get<double>() < 0.1);

    CHECK(run({"fit", "--data", data_file(), "--kernel", "gamma:s=2"}).code == cli::kUsage);
}

TEST_CASE("approx-error and cv are deterministic") {
    const std::vector<std::string> a{"approx-error", "--kernel", "gamma:s=2", "--copies", "1,4", "--trials", "5",
                                     "--kinds", "rb,rf"};
    const Result x = run(a);
    REQUIRE(x.code == 0);
    CHECK(x.out == run(a).out);
    CHECK(lines(x.out) == 5);

    const std::vector<std::string> c{"cv", "--data", data_file(), "--copies", "8", "--shapes", "2", "--taus", "0.5,1",
                                     "--lambdas", "0.1,1"};
    const Result y = run(c);
    REQUIRE(y.code == 0);
    CHECK(y.out == run(c).out);
    CHECK(lines(y.out) == 5);
    // Exactly one grid point is marked best.
    std::size_t best = 0;
    std::istringstream rows(y.out);
    for (std::string line; std::getline(rows, line);) best += line.size() > 2 && line.substr(line.size() - 2) == ",1";
    CHECK(best == 1);
}

TEST_CASE("bench writes one row per method and D") {
    const Result r = run({"bench", "--data", data_file(), "--method", "rb:gamma:s=2", "--method", "rf:laplace:sigma=1",
                          "--copies", "8", "--trials", "1"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "method,D,theory,empirical_mean,empirical_stderr,mse_mean,mse_stderr");
    std::vector<std::string> rows;
    while (std::getline(in, line)) rows.push_back(line);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].rfind("\"rb:gamma:s=2\",8,", 0) == 0);
    CHECK(rows[1].rfind("\"rf:laplace:sigma=1\",8,", 0) == 0);

    {
        std::ofstream cfg("cli_bench.json");
        cfg << R"({"methods": ["rb:gamma:s=2"], "copies": [4, 8], "trials": 1})";
    }
    const Result c = run({"bench", "--config", "cli_bench.json", "--data", data_file()});
    REQUIRE(c.code == 0);
    CHECK(lines(c.out) == 3);
    // A notice appears exactly when the test error rises from D = 4 to D = 8.
    std::istringstream crow(c.out);
    std::vector<double> mse;
    for (std::getline(crow, line); std::getline(crow, line);) {
        const auto last = line.rfind(',');
        const auto before = line.rfind(',', last - 1);
        mse.push_back(std::stod(line.substr(before + 1, last - before - 1)));
    }
    REQUIRE(mse.size() == 2);
    if (mse[1] > mse[0]) {
        const nlohmann::json notice = nlohmann::json::parse(c.err);
        CHECK(notice.at("notice") == "degradation");
        CHECK(notice.at("D") == 8);
        CHECK(notice.at("previous_D") == 4);
    } else {
        CHECK(c.err.empty());
    }
    CHECK(run({"bench", "--data", data_file(), "--method", "rb:gamma:s=2", "--copies", "8,4"}).code == cli::kDomain);
}
