#pragma once

// Seeded synthetic frame generator.
//
// Labels come in runs: each class receives its exact share of the rows
// (largest-remainder rounding of the ratios), the share is cut into runs of
// length [run_min, run_max], and the runs are shuffled and laid end to end
// across the days. A frame carries the mean vector of its own class plus
// isotropic Gaussian noise. Inside a run, every column of a T-wide window
// holds the same class signal, so a model that pools over time sees a
// sqrt(T)-fold better signal-to-noise ratio than one that reads the newest
// column only.
//
// Noise for row g is drawn from an engine seeded by (seed, g) alone, so the
// output does not depend on generation order.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "lobtensor/data.hpp"
#include "lobtensor/errors.hpp"
#include "lobtensor/labels.hpp"

namespace lobtensor {

struct SynthConfig {
    std::size_t num_classes = movement::kNumClasses;
    std::size_t dim = 144;
    int days = 10;
    std::size_t rows_per_day = 300;
    double separation = 1.0;  ///< norm of each class mean vector
    double noise = 1.0;       ///< per-feature noise standard deviation
    std::vector<double> ratios = {1.0, 1.0, 1.0};
    std::size_t run_min = 20;
    std::size_t run_max = 60;
    std::uint64_t seed = 0;
};

inline void validate(const SynthConfig& cfg) {
    if (cfg.num_classes < 2) throw ConfigError("synthetic data needs at least two classes");
    if (cfg.dim < 1) throw ConfigError("synthetic feature dimension must be >= 1");
    if (cfg.days < 1) throw ConfigError("synthetic data needs at least one day");
    if (cfg.rows_per_day < 1) throw ConfigError("rows per day must be >= 1");
    if (!(cfg.noise > 0)) throw ConfigError("noise sigma must be > 0");
    if (!(cfg.separation >= 0)) throw ConfigError("separation must be >= 0");
    if (cfg.ratios.size() != cfg.num_classes) {
        throw ConfigError("need " + std::to_string(cfg.num_classes) + " class ratios, got " +
                          std::to_string(cfg.ratios.size()));
    }
    for (double r : cfg.ratios) {
        if (!(r > 0) || !std::isfinite(r)) throw ConfigError("class ratios must be positive");
    }
    if (cfg.run_min < 1 || cfg.run_max < cfg.run_min) throw ConfigError("run lengths need 1 <= run_min <= run_max");
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent engine for (seed, stream, counter).
inline std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return std::mt19937_64(splitmix64(splitmix64(seed ^ splitmix64(stream)) + counter));
}

inline constexpr std::uint64_t kStreamMeans = 1;
inline constexpr std::uint64_t kStreamRuns = 2;
inline constexpr std::uint64_t kStreamNoise = 3;

/// Largest-remainder apportionment of `total` rows to the ratios.
inline std::vector<std::size_t> apportion(std::size_t total, const std::vector<double>& ratios) {
    const double sum = std::accumulate(ratios.begin(), ratios.end(), 0.0);
    std::vector<std::size_t> counts(ratios.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < ratios.size(); ++c) {
        const double exact = static_cast<double>(total) * ratios[c] / sum;
        counts[c] = static_cast<std::size_t>(std::floor(exact));
        assigned += counts[c];
        remainders.emplace_back(exact - std::floor(exact), c);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < total; ++i, ++assigned) ++counts[remainders[i % remainders.size()].second];
    return counts;
}

/// Box-Muller on a raw 64-bit engine, so the draws do not depend on the
/// standard library's distribution implementation.
class Gaussian {
public:
    explicit Gaussian(std::mt19937_64& eng) : eng_(eng) {}

    double operator()() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        constexpr double kTwoPi = 6.283185307179586476925286766559;
        const double u1 = (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
        const double u2 = static_cast<double>(eng_() >> 11) * 0x1.0p-53;          // [0, 1)
        const double radius = std::sqrt(-2.0 * std::log(u1));
        spare_ = radius * std::sin(kTwoPi * u2);
        has_spare_ = true;
        return radius * std::cos(kTwoPi * u2);
    }

private:
    std::mt19937_64& eng_;
    double spare_ = 0;
    bool has_spare_ = false;
};

}  // namespace detail

/// Per-class mean vectors (each of norm cfg.separation).
inline std::vector<Vector> synth_class_means(const SynthConfig& cfg) {
    auto eng = detail::stream_engine(cfg.seed, detail::kStreamMeans, 0);
    detail::Gaussian gauss(eng);
    std::vector<Vector> means;
    for (std::size_t c = 0; c < cfg.num_classes; ++c) {
        Vector m(static_cast<Eigen::Index>(cfg.dim));
        for (Eigen::Index j = 0; j < m.size(); ++j) m[j] = gauss();
        const double n = m.norm();
        means.push_back(n > 0 ? Vector(m * (cfg.separation / n)) : m);
    }
    return means;
}

inline std::vector<FeatureFrame> synth_generate(const SynthConfig& cfg) {
    validate(cfg);
    const std::size_t total = static_cast<std::size_t>(cfg.days) * cfg.rows_per_day;
    const auto counts = detail::apportion(total, cfg.ratios);

    auto run_eng = detail::stream_engine(cfg.seed, detail::kStreamRuns, 0);
    const std::uint64_t span = cfg.run_max - cfg.run_min + 1;
    std::vector<std::pair<Label, std::size_t>> runs;
    for (std::size_t c = 0; c < counts.size(); ++c) {
        std::size_t left = counts[c];
        while (left > 0) {
            const std::size_t len = std::min<std::size_t>(left, cfg.run_min + run_eng() % span);
            runs.emplace_back(static_cast<Label>(c), len);
            left -= len;
        }
    }
    // Fisher-Yates with the raw engine for a library-independent order.
    for (std::size_t i = runs.size(); i > 1; --i) std::swap(runs[i - 1], runs[run_eng() % i]);

    std::vector<Label> labels;
    labels.reserve(total);
    for (const auto& [label, len] : runs) labels.insert(labels.end(), len, label);

    const auto means = synth_class_means(cfg);
    std::vector<FeatureFrame> frames(total);
    for (std::size_t g = 0; g < total; ++g) {
        auto eng = detail::stream_engine(cfg.seed, detail::kStreamNoise, g);
        detail::Gaussian gauss(eng);
        FeatureFrame& f = frames[g];
        f.day = static_cast<int>(g / cfg.rows_per_day) + 1;
        f.index = static_cast<std::int64_t>(g % cfg.rows_per_day);
        f.label = labels[g];
        f.features = means[static_cast<std::size_t>(f.label)];
        for (Eigen::Index j = 0; j < f.features.size(); ++j) f.features[j] += cfg.noise * gauss();
    }
    return frames;
}

}  // namespace lobtensor
