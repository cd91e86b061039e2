#pragma once

// Confusion counts, accuracy, and per-class / macro precision, recall and F1.
// Any ratio whose denominator is zero is reported as 0.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lobtensor/errors.hpp"
#include "lobtensor/labels.hpp"

namespace lobtensor {

/// Rows are true classes, columns predicted classes.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::size_t num_classes)
        : n_(num_classes), counts_(num_classes * num_classes, 0) {}

    std::size_t num_classes() const noexcept { return n_; }
    std::size_t at(std::size_t truth, std::size_t predicted) const { return counts_.at(truth * n_ + predicted); }
    std::size_t& at(std::size_t truth, std::size_t predicted) { return counts_.at(truth * n_ + predicted); }

    std::size_t total() const noexcept {
        std::size_t t = 0;
        for (std::size_t c : counts_) t += c;
        return t;
    }

    ConfusionMatrix& operator+=(const ConfusionMatrix& o) {
        if (o.n_ != n_) throw DimensionError("confusion matrices differ in class count");
        for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += o.counts_[i];
        return *this;
    }

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

private:
    std::size_t n_;
    std::vector<std::size_t> counts_;
};

inline ConfusionMatrix confusion(std::span<const Label> truth, std::span<const Label> predicted,
                                 std::size_t num_classes) {
    if (truth.size() != predicted.size()) {
        throw DimensionError("confusion: " + std::to_string(truth.size()) + " true labels vs " +
                             std::to_string(predicted.size()) + " predictions");
    }
    ConfusionMatrix cm(num_classes);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] < 0 || predicted[i] < 0 || static_cast<std::size_t>(truth[i]) >= num_classes ||
            static_cast<std::size_t>(predicted[i]) >= num_classes) {
            throw InputError("confusion: label out of range at position " + std::to_string(i));
        }
        ++cm.at(static_cast<std::size_t>(truth[i]), static_cast<std::size_t>(predicted[i]));
    }
    return cm;
}

struct MetricsReport {
    std::size_t samples = 0;
    double accuracy = 0;
    std::vector<double> precision;
    std::vector<double> recall;
    std::vector<double> f1;
    double macro_precision = 0;
    double macro_recall = 0;
    double macro_f1 = 0;
};

inline MetricsReport report(const ConfusionMatrix& cm) {
    const std::size_t n = cm.num_classes();
    MetricsReport r;
    r.samples = cm.total();
    if (n == 0 || r.samples == 0) throw InputError("report: confusion matrix is empty");
    auto ratio = [](double num, double den) { return den > 0 ? num / den : 0.0; };
    std::size_t correct = 0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t predicted = 0, actual = 0;
        for (std::size_t o = 0; o < n; ++o) {
            predicted += cm.at(o, c);
            actual += cm.at(c, o);
        }
        const double tp = static_cast<double>(cm.at(c, c));
        correct += cm.at(c, c);
        const double p = ratio(tp, static_cast<double>(predicted));
        const double rc = ratio(tp, static_cast<double>(actual));
        r.precision.push_back(p);
        r.recall.push_back(rc);
        r.f1.push_back(ratio(2 * p * rc, p + rc));
    }
    for (std::size_t c = 0; c < n; ++c) {
        r.macro_precision += r.precision[c];
        r.macro_recall += r.recall[c];
        r.macro_f1 += r.f1[c];
    }
    r.macro_precision /= static_cast<double>(n);
    r.macro_recall /= static_cast<double>(n);
    r.macro_f1 /= static_cast<double>(n);
    r.accuracy = static_cast<double>(correct) / static_cast<double>(r.samples);
    return r;
}

inline MetricsReport evaluate(std::span<const Label> truth, std::span<const Label> predicted, std::size_t num_classes) {
    return report(confusion(truth, predicted, num_classes));
}

/// Mean and sample standard deviation (n-1 denominator; 0 for a single value).
struct MeanStd {
    double mean = 0;
    double std = 0;
};

inline MeanStd mean_std(std::span<const double> values) {
    MeanStd out;
    if (values.empty()) return out;
    for (double v : values) out.mean += v;
    out.mean /= static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0;
        for (double v : values) ss += (v - out.mean) * (v - out.mean);
        out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return out;
}

}  // namespace lobtensor
