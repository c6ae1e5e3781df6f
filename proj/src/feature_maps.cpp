#include "polya/feature_maps.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "polya/errors.hpp"
#include "polya/parallel.hpp"
#include "text_util.hpp"

namespace polya {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t key_hash64(const std::vector<std::int64_t>& key) noexcept {
    std::uint64_t h = 0x243F6A8885A308D3ull;
    for (std::int64_t v : key) h = mix64(h ^ (static_cast<std::uint64_t>(v) + 0x9E3779B97F4A7C15ull + (h << 6)));
    return h;
}

FrequencyLaw resolve_law(const MapTarget& target) {
    if (const auto* law = std::get_if<FrequencyLaw>(&target)) return *law;
    return fourier_law_for(std::get<KernelSpec>(target));
}

AuxLaw aux_law(const FrequencyLaw& law) {
    if (const auto* l = std::get_if<LaplaceLaw>(&law)) return {AuxKind::Cauchy, 1.0 / l->sigma};
    return {AuxKind::Normal, 1.0 / std::get<GaussianLaw>(law).sigma};
}

double law_sigma(const FrequencyLaw& law) {
    return std::visit([](const auto& l) { return l.sigma; }, law);
}

}  // namespace

std::string to_string(MapKind kind) {
    switch (kind) {
        case MapKind::FourierComplex:
            return "fourier-complex";
        case MapKind::FourierReal:
            return "fourier-real";
        case MapKind::Binning:
            return "binning";
    }
    return "unknown";
}

MapKind parse_map_kind(std::string_view text) {
    if (text == "fourier-complex" || text == "rf-complex" || text == "complex") return MapKind::FourierComplex;
    if (text == "fourier-real" || text == "rf" || text == "fourier" || text == "real") return MapKind::FourierReal;
    if (text == "binning" || text == "rb") return MapKind::Binning;
    throw ParseError("unknown map kind '" + std::string(text) + "'");
}

FrequencyLaw fourier_law_for(const KernelSpec& spec) {
    const DistributionSpec& d = spec.dist();
    if (const auto* g = d.get_if<GammaDist>(); g && g->shape == 2.0) return LaplaceLaw{g->scale / spec.rho()};
    if (const auto* c = d.get_if<ChiSquare>(); c && c->nu == 4) return LaplaceLaw{2.0 / spec.rho()};
    throw DomainError("no Fourier sampler for kernel " + spec.to_string() +
                      "; only the Laplace (gamma s=2) and Gaussian laws are supported");
}

MapTarget parse_map_target(std::string_view input) {
    const std::string_view t = text::trim(input);
    const auto colon = t.find(':');
    const std::string_view family = t.substr(0, colon);
    if (family != "laplace" && family != "gaussian") return KernelSpec::parse(t);
    double sigma = 1.0;
    if (colon != std::string_view::npos) {
        for (std::string_view item : text::split(t.substr(colon + 1), ',')) {
            item = text::trim(item);
            if (item.empty()) continue;
            const auto eq = item.find('=');
            const auto value = eq == std::string_view::npos ? std::nullopt : text::parse_double(item.substr(eq + 1));
            if (text::trim(item.substr(0, eq)) != "sigma" || !value) {
                throw ParseError(std::string(family) + ": expected sigma=<v>, got '" + std::string(item) + "'");
            }
            sigma = *value;
        }
    }
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError(std::string(family) + ": sigma must be > 0");
    if (family == "laplace") return FrequencyLaw{LaplaceLaw{sigma}};
    return FrequencyLaw{GaussianLaw{sigma}};
}

std::string to_string(const MapTarget& target) {
    if (const auto* spec = std::get_if<KernelSpec>(&target)) return spec->to_string();
    const FrequencyLaw& law = std::get<FrequencyLaw>(target);
    const char* name = std::holds_alternative<LaplaceLaw>(law) ? "laplace" : "gaussian";
    return std::string(name) + ":sigma=" + text::format_double(law_sigma(law));
}

void FeatureMapConfig::validate() const {
    if (copies < 1) throw DomainError("feature map: copies must be >= 1");
    if (dim < 1) throw DomainError("feature map: dim must be >= 1");
    if (kind == MapKind::Binning) {
        if (!std::holds_alternative<KernelSpec>(target)) {
            throw DomainError("feature map: binning needs a kernel built from a positively supported distribution");
        }
        if (hash_buckets && *hash_buckets < 1) throw DomainError("feature map: hash_buckets must be >= 1");
    } else {
        if (hash_buckets) throw DomainError("feature map: hash_buckets applies to binning only");
        const double sigma = law_sigma(resolve_law(target));
        if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("feature map: sigma must be a finite value > 0");
    }
}

double target_kernel(const FeatureMapConfig& cfg, std::span<const double> x, std::span<const double> y) {
    if (const auto* spec = std::get_if<KernelSpec>(&cfg.target)) return tensor_eval(*spec, x, y);
    if (x.size() != y.size()) throw DimensionError("target_kernel: dimensions differ");
    const FrequencyLaw& law = std::get<FrequencyLaw>(cfg.target);
    double acc = 0.0;
    if (const auto* l = std::get_if<LaplaceLaw>(&law)) {
        for (std::size_t j = 0; j < x.size(); ++j) acc += std::abs(x[j] - y[j]);
        return std::exp(-acc / l->sigma);
    }
    const double sigma = std::get<GaussianLaw>(law).sigma;
    for (std::size_t j = 0; j < x.size(); ++j) acc += (x[j] - y[j]) * (x[j] - y[j]);
    return std::exp(-acc / (2.0 * sigma * sigma));
}

Eigen::SparseMatrix<double> FeatureBatch::sparse() const {
    if (kind == MapKind::FourierComplex) throw DomainError("FeatureBatch::sparse: complex features have no real form");
    if (kind == MapKind::FourierReal) return real.sparseView();
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(bins.size());
    for (std::size_t i = 0; i < points; ++i) {
        for (std::size_t l = 0; l < copies; ++l) {
            triplets.emplace_back(static_cast<int>(bins[i * copies + l]), static_cast<int>(i), bin_value);
        }
    }
    Eigen::SparseMatrix<double> z(static_cast<Eigen::Index>(feature_count), static_cast<Eigen::Index>(points));
    z.setFromTriplets(triplets.begin(), triplets.end());
    return z;
}

Eigen::MatrixXd FeatureBatch::dense() const {
    if (kind == MapKind::FourierReal) return real;
    return Eigen::MatrixXd(sparse());
}

FeatureMap FeatureMap::build(const FeatureMapConfig& cfg) {
    cfg.validate();
    FeatureMap map(cfg);
    const auto D = static_cast<Eigen::Index>(cfg.copies);
    const auto d = static_cast<Eigen::Index>(cfg.dim);
    if (cfg.kind == MapKind::Binning) {
        const KernelSpec& spec = std::get<KernelSpec>(cfg.target);
        map.spacings_.resize(D, d);
        map.bin_offsets_.resize(D, d);
        for (Eigen::Index l = 0; l < D; ++l) {
            RandomStream rng(cfg.seed, static_cast<std::uint64_t>(l));
            for (Eigen::Index j = 0; j < d; ++j) {
                const double w = sample(spec.dist(), rng) / spec.rho();
                map.spacings_(l, j) = w;
                map.bin_offsets_(l, j) = std::min(rng.uniform() * w, std::nextafter(w, 0.0));
            }
        }
    } else {
        const AuxLaw law = aux_law(resolve_law(cfg.target));
        map.frequencies_.resize(D, d);
        map.phases_.resize(D);
        for (Eigen::Index l = 0; l < D; ++l) {
            RandomStream rng(cfg.seed, static_cast<std::uint64_t>(l));
            for (Eigen::Index j = 0; j < d; ++j) map.frequencies_(l, j) = aux_draw(law, rng);
            map.phases_(l) = kTwoPi * rng.uniform();
        }
    }
    return map;
}

std::size_t FeatureMap::feature_count() const noexcept {
    if (cfg_.kind != MapKind::Binning) return cfg_.copies;
    return cfg_.hash_buckets ? *cfg_.hash_buckets : vocab_.size();
}

std::size_t FeatureMap::KeyHash::operator()(const std::vector<std::int64_t>& key) const noexcept {
    return static_cast<std::size_t>(key_hash64(key));
}

std::size_t FeatureMap::bin_column(std::vector<std::int64_t>& key) {
    if (cfg_.hash_buckets) return static_cast<std::size_t>(key_hash64(key) % *cfg_.hash_buckets);
    const auto [it, inserted] = vocab_.try_emplace(std::move(key), vocab_.size());
    return it->second;
}

FeatureBatch FeatureMap::featurize(const Eigen::MatrixXd& X) {
    if (static_cast<std::size_t>(X.cols()) != cfg_.dim) {
        throw DimensionError("featurize: points have dimension " + std::to_string(X.cols()) + ", map expects " +
                             std::to_string(cfg_.dim));
    }
    const std::size_t n = static_cast<std::size_t>(X.rows());
    const std::size_t D = cfg_.copies;
    FeatureBatch batch;
    batch.kind = cfg_.kind;
    batch.points = n;
    batch.copies = D;
    const double scale = 1.0 / std::sqrt(static_cast<double>(D));

    if (cfg_.kind != MapKind::Binning) {
        const Eigen::MatrixXd phase = frequencies_ * X.transpose();
        if (cfg_.kind == MapKind::FourierComplex) {
            batch.complex = phase.unaryExpr([scale](double p) { return std::polar(scale, p); });
        } else {
            const double amp = std::sqrt(2.0) * scale;
            batch.real = (phase.colwise() + phases_).unaryExpr([amp](double p) { return amp * std::cos(p); });
        }
        batch.feature_count = D;
        return batch;
    }

    // Bin coordinates are computed per copy in parallel; columns are then
    // assigned serially in (copy, point) order so indices do not depend on the schedule.
    const std::size_t d = cfg_.dim;
    std::vector<std::vector<std::int64_t>> keys(D * n);
    parallel_for(D, [&](std::size_t l) {
        for (std::size_t i = 0; i < n; ++i) {
            auto& key = keys[l * n + i];
            key.resize(d + 1);
            key[0] = static_cast<std::int64_t>(l);
            for (std::size_t j = 0; j < d; ++j) {
                const auto li = static_cast<Eigen::Index>(l);
                const auto ji = static_cast<Eigen::Index>(j);
                const double q = std::floor((X(static_cast<Eigen::Index>(i), ji) - bin_offsets_(li, ji)) / spacings_(li, ji));
                if (!(std::abs(q) < 9.0e18)) throw NumericalError("featurize: bin coordinate out of range");
                key[j + 1] = static_cast<std::int64_t>(q);
            }
        }
    });
    batch.bins.resize(D * n);
    for (std::size_t l = 0; l < D; ++l) {
        for (std::size_t i = 0; i < n; ++i) batch.bins[i * D + l] = bin_column(keys[l * n + i]);
    }
    batch.bin_value = scale;
    batch.feature_count = feature_count();
    return batch;
}

std::vector<std::vector<std::int64_t>> FeatureMap::vocabulary() const {
    std::vector<std::vector<std::int64_t>> out(vocab_.size());
    for (const auto& [key, column] : vocab_) {
        out[column] = key;
        out[column].push_back(static_cast<std::int64_t>(column));
    }
    return out;
}

void FeatureMap::restore_vocabulary(const std::vector<std::vector<std::int64_t>>& entries) {
    vocab_.clear();
    for (const auto& entry : entries) {
        if (entry.size() != cfg_.dim + 2) throw ParseError("vocabulary entry has the wrong length");
        const auto column = static_cast<std::size_t>(entry.back());
        if (column >= entries.size()) throw ParseError("vocabulary column index out of range");
        if (!vocab_.try_emplace(std::vector<std::int64_t>(entry.begin(), entry.end() - 1), column).second) {
            throw ParseError("duplicate vocabulary entry");
        }
    }
}

Eigen::MatrixXd gram(const FeatureBatch& batch) {
    switch (batch.kind) {
        case MapKind::FourierComplex:
            return (batch.complex.adjoint() * batch.complex).real();
        case MapKind::FourierReal:
            return batch.real.transpose() * batch.real;
        case MapKind::Binning: {
            // Count shared bins with unit weights, then divide once so the diagonal is exactly 1.
            FeatureBatch counts = batch;
            counts.bin_value = 1.0;
            const Eigen::SparseMatrix<double> z = counts.sparse();
            const Eigen::SparseMatrix<double> zz = z.transpose() * z;
            return Eigen::MatrixXd(zz) / static_cast<double>(batch.copies);
        }
    }
    return {};
}

Eigen::MatrixXcd gram_complex(const FeatureBatch& batch) {
    if (batch.kind == MapKind::FourierComplex) return batch.complex.adjoint() * batch.complex;
    return gram(batch).cast<std::complex<double>>();
}

double variance_theory(MapKind kind, double k, std::optional<double> k2) {
    if (!(k >= 0.0 && k <= 1.0)) throw DomainError("variance_theory: kernel value must lie in [0, 1]");
    switch (kind) {
        case MapKind::FourierComplex:
            return 1.0 - k * k;
        case MapKind::FourierReal:
            if (!k2) throw DomainError("variance_theory: the real Fourier map needs k at the doubled difference");
            return 1.0 + 0.5 * *k2 - k * k;
        case MapKind::Binning:
            return k - k * k;
    }
    return 0.0;
}

}  // namespace polya
