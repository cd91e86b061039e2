#pragma once

// Frame ingestion, z-score normalization, window assembly, anchored folds and
// mid-price labeling.
//
// Frame file format (UTF-8 text, one frame per line, comma separated):
//
//     day,index,f_1,...,f_D,label
//
// `day` is a positive integer and must be nondecreasing down the file,
// `index` an integer timestamp, f_1..f_D real numbers and `label` an integer
// movement code (default 1 = up, 2 = stationary, 3 = down). Blank lines and
// lines starting with '#' are ignored. Every row must carry the same D.

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "lobtensor/errors.hpp"
#include "lobtensor/labels.hpp"
#include "lobtensor/tensor.hpp"

namespace lobtensor {

/// Class indices used throughout the pipeline.
namespace movement {
inline constexpr Label kUp = 0;
inline constexpr Label kStationary = 1;
inline constexpr Label kDown = 2;
inline constexpr std::size_t kNumClasses = 3;
}  // namespace movement

/// On-disk integer code for each movement class.
struct LabelCodes {
    int up = 1;
    int stationary = 2;
    int down = 3;

    Label decode(int code) const {
        if (code == up) return movement::kUp;
        if (code == stationary) return movement::kStationary;
        if (code == down) return movement::kDown;
        throw InputError("unknown label code " + std::to_string(code));
    }
    int encode(Label l) const {
        switch (l) {
            case movement::kUp: return up;
            case movement::kStationary: return stationary;
            case movement::kDown: return down;
            default: throw InputError("label " + std::to_string(l) + " has no file code");
        }
    }
};

struct FeatureFrame {
    int day = 1;
    std::int64_t index = 0;
    Vector features;
    Label label = movement::kStationary;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <typename T>
T parse_number(std::string_view field, std::size_t line, const char* what) {
    field = trim(field);
    T value{};
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
        throw ParseError(std::string("invalid ") + what + " '" + std::string(field) + "'", line);
    }
    return value;
}

inline void append_double(std::string& out, double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
}

}  // namespace detail

inline std::vector<FeatureFrame> read_frames(std::istream& in, const LabelCodes& codes = {}) {
    std::vector<FeatureFrame> frames;
    std::string line;
    std::size_t lineno = 0;
    Eigen::Index dim = -1;
    std::vector<std::string_view> fields;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view text = detail::trim(line);
        if (text.empty() || text.front() == '#') continue;
        fields.clear();
        std::size_t start = 0;
        for (;;) {
            const std::size_t comma = text.find(',', start);
            fields.push_back(text.substr(start, comma == std::string_view::npos ? comma : comma - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (fields.size() < 4) throw ParseError("expected day,index,features...,label", lineno);
        const auto d = static_cast<Eigen::Index>(fields.size() - 3);
        if (dim < 0) dim = d;
        if (d != dim) {
            throw ParseError("row has " + std::to_string(d) + " features, expected " + std::to_string(dim), lineno);
        }
        FeatureFrame f;
        f.day = detail::parse_number<int>(fields[0], lineno, "day");
        if (f.day < 1) throw ParseError("day must be >= 1", lineno);
        f.index = detail::parse_number<std::int64_t>(fields[1], lineno, "index");
        f.features.resize(d);
        for (Eigen::Index j = 0; j < d; ++j) {
            const double v = detail::parse_number<double>(fields[static_cast<std::size_t>(j) + 2], lineno, "feature");
            if (!std::isfinite(v)) throw ParseError("non-finite feature", lineno);
            f.features[j] = v;
        }
        const int code = detail::parse_number<int>(fields.back(), lineno, "label");
        try {
            f.label = codes.decode(code);
        } catch (const InputError& e) {
            throw ParseError(e.what(), lineno);
        }
        if (!frames.empty() && f.day < frames.back().day) {
            throw ValidationError("line " + std::to_string(lineno) + ": day " + std::to_string(f.day) +
                                  " follows day " + std::to_string(frames.back().day));
        }
        frames.push_back(std::move(f));
    }
    return frames;
}

inline std::vector<FeatureFrame> load_frames(const std::string& path, const LabelCodes& codes = {}) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open data file '" + path + "'");
    return read_frames(in, codes);
}

/// Writes frames in the documented row format. Doubles use the shortest
/// representation that round-trips, so output is byte-stable.
inline void write_frames(std::ostream& out, std::span<const FeatureFrame> frames, const LabelCodes& codes = {}) {
    std::string row;
    for (const FeatureFrame& f : frames) {
        row.clear();
        row += std::to_string(f.day);
        row += ',';
        row += std::to_string(f.index);
        for (Eigen::Index j = 0; j < f.features.size(); ++j) {
            row += ',';
            detail::append_double(row, f.features[j]);
        }
        row += ',';
        row += std::to_string(codes.encode(f.label));
        row += '\n';
        out << row;
    }
}

inline void save_frames(const std::string& path, std::span<const FeatureFrame> frames, const LabelCodes& codes = {}) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write data file '" + path + "'");
    write_frames(out, frames, codes);
    if (!out) throw InputError("failed writing data file '" + path + "'");
}

/// Per-feature mean and standard deviation (population, 1/N).
struct NormStats {
    Vector mean;
    Vector std;
};

/// A zero-variance feature keeps std = 1 so it normalizes to exactly 0.
inline NormStats fit_norm(std::span<const FeatureFrame> train) {
    if (train.size() < 2) throw InputError("normalization needs at least two training rows");
    const Eigen::Index d = train.front().features.size();
    NormStats s{Vector::Zero(d), Vector::Zero(d)};
    for (const FeatureFrame& f : train) {
        if (f.features.size() != d) throw DimensionError("frames differ in feature count");
        s.mean += f.features;
    }
    s.mean /= static_cast<double>(train.size());
    for (const FeatureFrame& f : train) s.std.array() += (f.features - s.mean).array().square();
    s.std = (s.std / static_cast<double>(train.size())).cwiseSqrt();
    for (Eigen::Index j = 0; j < d; ++j) {
        if (!(s.std[j] > 0)) s.std[j] = 1.0;
    }
    return s;
}

inline std::vector<FeatureFrame> apply_norm(const NormStats& stats, std::span<const FeatureFrame> frames) {
    std::vector<FeatureFrame> out(frames.begin(), frames.end());
    for (FeatureFrame& f : out) {
        if (f.features.size() != stats.mean.size()) throw DimensionError("frame feature count does not match stats");
        f.features = ((f.features - stats.mean).array() / stats.std.array()).matrix();
    }
    return out;
}

/// D x T sample built from T consecutive same-day frames, oldest column first.
struct TensorWindow {
    Matrix sample;
    Label label = movement::kStationary;  ///< label of the newest frame
    int day = 1;
    std::int64_t index = 0;  ///< index of the newest frame
};

/// One window per frame that has at least T-1 predecessors on the same day.
/// Frames of a day are taken in input order; windows never span days.
inline std::vector<TensorWindow> make_windows(std::span<const FeatureFrame> frames, std::size_t steps) {
    if (steps < 1) throw InputError("window length T must be >= 1");
    std::vector<TensorWindow> out;
    std::size_t run_start = 0;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (i > 0 && frames[i].day != frames[i - 1].day) run_start = i;
        if (i - run_start + 1 < steps) continue;
        const FeatureFrame& newest = frames[i];
        TensorWindow w;
        w.sample.resize(newest.features.size(), static_cast<Eigen::Index>(steps));
        for (std::size_t c = 0; c < steps; ++c) {
            const FeatureFrame& f = frames[i + 1 - steps + c];
            if (f.features.size() != newest.features.size()) throw DimensionError("frames differ in feature count");
            w.sample.col(static_cast<Eigen::Index>(c)) = f.features;
        }
        w.label = newest.label;
        w.day = newest.day;
        w.index = newest.index;
        out.push_back(std::move(w));
    }
    return out;
}

struct FoldPlan {
    int fold = 1;
    std::vector<int> train_days;
    int test_day = 2;
};

/// Anchored forward splits over days 1..num_days: fold i trains on days 1..i
/// and tests on day i+1.
inline std::vector<FoldPlan> anchored_folds(int num_days) {
    if (num_days < 2) throw InputError("anchored folds need at least two days");
    std::vector<FoldPlan> folds;
    for (int i = 1; i < num_days; ++i) {
        FoldPlan f;
        f.fold = i;
        for (int d = 1; d <= i; ++d) f.train_days.push_back(d);
        f.test_day = i + 1;
        folds.push_back(std::move(f));
    }
    return folds;
}

/// Frames grouped by day. All day-filtered reads go through select(), which
/// reports each (day, rows) read to an optional observer; the experiment
/// driver uses this to prove test days are never touched while training.
class FrameStore {
public:
    using Observer = std::function<void(int day, std::size_t rows)>;

    explicit FrameStore(std::vector<FeatureFrame> frames) : frames_(std::move(frames)) {
        for (std::size_t i = 0; i < frames_.size(); ++i) {
            if (i > 0 && frames_[i].day < frames_[i - 1].day) throw ValidationError("frame days are not nondecreasing");
            by_day_[frames_[i].day].push_back(i);
        }
    }

    /// Distinct days in ascending order.
    std::vector<int> days() const {
        std::vector<int> out;
        for (const auto& [day, rows] : by_day_) out.push_back(day);
        return out;
    }

    std::size_t size() const noexcept { return frames_.size(); }

    Eigen::Index feature_dim() const { return frames_.empty() ? 0 : frames_.front().features.size(); }

    std::size_t rows_on(int day) const {
        const auto it = by_day_.find(day);
        return it == by_day_.end() ? 0 : it->second.size();
    }

    /// Frames of the given days, in file order. `extra` sees the same reads
    /// as the store-level observer.
    std::vector<FeatureFrame> select(std::span<const int> days, const Observer& extra = {}) const {
        const std::set<int> wanted(days.begin(), days.end());
        std::vector<FeatureFrame> out;
        for (int day : wanted) {
            const auto it = by_day_.find(day);
            if (it == by_day_.end()) continue;
            if (observer_) observer_(day, it->second.size());
            if (extra) extra(day, it->second.size());
            for (std::size_t i : it->second) out.push_back(frames_[i]);
        }
        return out;
    }

    void set_observer(Observer obs) { observer_ = std::move(obs); }

private:
    std::vector<FeatureFrame> frames_;
    std::map<int, std::vector<std::size_t>> by_day_;
    Observer observer_;
};

inline double mid_price(double best_ask, double best_bid) {
    if (!(best_bid > 0)) throw ValidationError("best bid must be positive");
    if (best_ask < best_bid) throw ValidationError("crossed book: best ask below best bid");
    return 0.5 * (best_ask + best_bid);
}

/// Movement label for each t with a full horizon: compares the mean mid-price
/// over (t, t+H] with mid[t]. A relative change above +threshold is up, below
/// -threshold is down, anything else stationary. Returns size() - H labels.
inline std::vector<Label> label_movements(std::span<const double> mid, std::size_t horizon, double threshold) {
    if (horizon < 1) throw InputError("horizon must be >= 1");
    if (!(threshold >= 0)) throw InputError("threshold must be >= 0");
    std::vector<Label> labels;
    if (mid.size() <= horizon) return labels;
    for (std::size_t t = 0; t + horizon < mid.size(); ++t) {
        double future = 0.0;
        for (std::size_t h = 1; h <= horizon; ++h) future += mid[t + h];
        future /= static_cast<double>(horizon);
        const double change = (future - mid[t]) / mid[t];
        labels.push_back(change > threshold ? movement::kUp
                         : change < -threshold ? movement::kDown
                                               : movement::kStationary);
    }
    return labels;
}

}  // namespace lobtensor
