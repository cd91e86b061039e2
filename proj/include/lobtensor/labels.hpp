#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lobtensor/errors.hpp"

namespace lobtensor {

/// Class index, 0-based.
using Label = int;

/// Samples per class. The class count is max label + 1 and every class below
/// it must be present.
inline std::vector<std::size_t> class_counts(std::span<const Label> labels) {
    if (labels.empty()) throw InputError("no samples");
    const auto [lo, hi] = std::minmax_element(labels.begin(), labels.end());
    if (*lo < 0) throw InputError("class labels must be non-negative");
    std::vector<std::size_t> counts(static_cast<std::size_t>(*hi) + 1, 0);
    for (Label l : labels) ++counts[static_cast<std::size_t>(l)];
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] == 0) throw InputError("class " + std::to_string(c) + " has no samples");
    }
    return counts;
}

/// Index of the largest score; ties go to the lowest index.
template <typename Scores>
Label argmax(const Scores& scores) {
    Label best = 0;
    for (Label c = 1; c < static_cast<Label>(scores.size()); ++c) {
        if (scores[c] > scores[best]) best = c;
    }
    return best;
}

/// Index of the smallest value; ties go to the lowest index.
template <typename Values>
Label argmin(const Values& values) {
    Label best = 0;
    for (Label c = 1; c < static_cast<Label>(values.size()); ++c) {
        if (values[c] < values[best]) best = c;
    }
    return best;
}

}  // namespace lobtensor
