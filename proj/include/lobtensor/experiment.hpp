#pragma once

// Experiment driver: grid search with train-F1 model selection, evaluation on
// a single day, and anchored cross-validation over the days of a FrameStore.
//
// Training for a fold reads only the fold's training days. Normalization
// statistics come from those rows, windows are built per day, and vector
// methods (LDA, RR) see the newest column of each window. Every grid point is
// fitted and scored by training macro-F1; the first point with the highest
// score wins.

#include <Eigen/Dense>

#include <atomic>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "lobtensor/baselines.hpp"
#include "lobtensor/data.hpp"
#include "lobtensor/errors.hpp"
#include "lobtensor/labels.hpp"
#include "lobtensor/mda.hpp"
#include "lobtensor/metrics.hpp"
#include "lobtensor/serialize.hpp"
#include "lobtensor/tensor.hpp"
#include "lobtensor/wmtr.hpp"

namespace lobtensor {

enum class Method { mda, wmtr, mtr, lda, rr };

inline std::string method_name(Method m) {
    switch (m) {
        case Method::mda: return "mda";
        case Method::wmtr: return "wmtr";
        case Method::mtr: return "mtr";
        case Method::lda: return "lda";
        case Method::rr: return "rr";
    }
    return "?";
}

inline Method parse_method(const std::string& s) {
    for (Method m : {Method::mda, Method::wmtr, Method::mtr, Method::lda, Method::rr}) {
        if (method_name(m) == s) return m;
    }
    throw ConfigError("unknown method '" + s + "' (expected mda, wmtr, mtr, lda or rr)");
}

inline bool is_vector_method(Method m) { return m == Method::lda || m == Method::rr; }

namespace detail {

inline std::vector<std::size_t> stepped(std::size_t first, std::size_t last, std::size_t step) {
    std::vector<std::size_t> out;
    for (std::size_t v = first; v <= last; v += step) out.push_back(v);
    return out;
}

}  // namespace detail

struct Grid {
    std::vector<double> lambda = {0.01, 0.1, 1, 10, 100};   ///< mda, lda, rr
    std::vector<double> lambda1 = {0.01, 0.1, 1, 10, 100};  ///< wmtr, mtr
    std::vector<double> lambda2 = {0.01, 0.1, 1, 10, 100};  ///< wmtr, mtr
    std::vector<double> r = {2, 3, 4};                      ///< wmtr
    std::vector<std::size_t> dims1 = detail::stepped(5, 60, 5);
    std::vector<std::size_t> dims2 = detail::stepped(1, 8, 1);
};

struct RunConfig {
    Method method = Method::wmtr;
    std::size_t window = 10;  ///< T
    Grid grid;
    int max_iters = 50;
    double tol = 1e-6;
    std::uint64_t seed = 0;  ///< MDA initialization seed
    int jobs = 1;            ///< worker threads for the grid search; not part of documents
};

inline void validate(const RunConfig& cfg) {
    if (cfg.window < 1) throw ConfigError("T must be >= 1");
    if (cfg.max_iters < 1) throw ConfigError("max_iters must be >= 1");
    if (!(cfg.tol >= 0)) throw ConfigError("tol must be >= 0");
    if (cfg.jobs < 1) throw ConfigError("jobs must be >= 1");
    auto positive = [](const std::vector<double>& values, const char* name) {
        if (values.empty()) throw ConfigError(std::string(name) + " grid is empty");
        for (double v : values) {
            if (!(v > 0) || std::isnan(v)) throw ConfigError(std::string(name) + " values must be > 0");
        }
    };
    auto dims = [](const std::vector<std::size_t>& values, const char* name) {
        if (values.empty()) throw ConfigError(std::string(name) + " grid is empty");
        for (std::size_t v : values) {
            if (v < 1) throw ConfigError(std::string(name) + " values must be >= 1");
        }
    };
    switch (cfg.method) {
        case Method::mda:
            positive(cfg.grid.lambda, "lambda");
            dims(cfg.grid.dims1, "dims1");
            dims(cfg.grid.dims2, "dims2");
            break;
        case Method::wmtr:
            positive(cfg.grid.r, "r");
            [[fallthrough]];
        case Method::mtr:
            positive(cfg.grid.lambda1, "lambda1");
            positive(cfg.grid.lambda2, "lambda2");
            break;
        case Method::lda:
        case Method::rr:
            positive(cfg.grid.lambda, "lambda");
            break;
    }
}

/// Hyperparameters of one fit. Fields that a method does not use stay 0.
struct GridPoint {
    double lambda = 0;
    double lambda1 = 0;
    double lambda2 = 0;
    double r = 0;
    std::size_t dims1 = 0;
    std::size_t dims2 = 0;

    bool operator==(const GridPoint&) const = default;
};

/// Exhaustive grid. MDA points whose subspace exceeds the D x T input are dropped.
inline std::vector<GridPoint> expand_grid(const RunConfig& cfg, std::size_t dim, std::size_t steps) {
    validate(cfg);
    const Grid& g = cfg.grid;
    std::vector<GridPoint> out;
    switch (cfg.method) {
        case Method::mda:
            for (double l : g.lambda)
                for (std::size_t d1 : g.dims1)
                    for (std::size_t d2 : g.dims2) {
                        if (d1 <= dim && d2 <= steps) out.push_back(GridPoint{.lambda = l, .dims1 = d1, .dims2 = d2});
                    }
            if (out.empty()) {
                throw ConfigError("no MDA grid point fits the " + std::to_string(dim) + "x" + std::to_string(steps) +
                                  " input");
            }
            break;
        case Method::wmtr:
            for (double l1 : g.lambda1)
                for (double l2 : g.lambda2)
                    for (double r : g.r) out.push_back(GridPoint{.lambda1 = l1, .lambda2 = l2, .r = r});
            break;
        case Method::mtr:
            for (double l1 : g.lambda1)
                for (double l2 : g.lambda2) out.push_back(GridPoint{.lambda1 = l1, .lambda2 = l2, .r = kUnweighted});
            break;
        case Method::lda:
        case Method::rr:
            for (double l : g.lambda) out.push_back(GridPoint{.lambda = l});
            break;
    }
    return out;
}

struct SampleSet {
    std::vector<Matrix> samples;  ///< D x T windows
    std::vector<Label> labels;
};

inline SampleSet make_samples(std::vector<TensorWindow> windows) {
    SampleSet set;
    set.samples.reserve(windows.size());
    set.labels.reserve(windows.size());
    for (TensorWindow& w : windows) {
        set.samples.push_back(std::move(w.sample));
        set.labels.push_back(w.label);
    }
    return set;
}

using FittedModel = std::variant<MdaModel, WmtrModel, LdaModel, RrModel>;

/// A fitted model together with everything needed to apply it to raw frames.
struct Model {
    RunConfig run;
    GridPoint point;
    std::size_t dim = 0;
    std::size_t num_classes = 0;
    NormStats norm;
    int fold = 0;
    std::vector<int> train_days;
    FittedModel fitted;
};

namespace detail {

inline std::vector<Tensor> as_tensors(std::span<const Matrix> samples) {
    std::vector<Tensor> out;
    out.reserve(samples.size());
    for (const Matrix& m : samples) out.push_back(Tensor::from_matrix(m));
    return out;
}

inline std::vector<Vector> newest_columns(std::span<const Matrix> samples) {
    std::vector<Vector> out;
    out.reserve(samples.size());
    for (const Matrix& m : samples) out.push_back(m.col(m.cols() - 1));
    return out;
}

}  // namespace detail

inline FittedModel fit_point(const RunConfig& cfg, const GridPoint& p, const SampleSet& set) {
    switch (cfg.method) {
        case Method::mda: {
            MdaConfig mc;
            mc.subspace_dims = {p.dims1, p.dims2};
            mc.lambda = p.lambda;
            mc.max_iters = cfg.max_iters;
            mc.tol = cfg.tol;
            mc.rng_seed = cfg.seed;
            return mda::fit(detail::as_tensors(set.samples), set.labels, mc);
        }
        case Method::wmtr:
        case Method::mtr: {
            WmtrConfig wc;
            wc.lambda1 = p.lambda1;
            wc.lambda2 = p.lambda2;
            wc.r = p.r;
            wc.max_iters = cfg.max_iters;
            wc.tol = cfg.tol;
            return wmtr::fit(set.samples, set.labels, wc);
        }
        case Method::lda: return baselines::lda_fit(detail::newest_columns(set.samples), set.labels, p.lambda);
        case Method::rr: return baselines::rr_fit(detail::newest_columns(set.samples), set.labels, p.lambda);
    }
    throw ConfigError("unknown method");
}

inline std::vector<Label> predict(const FittedModel& fitted, std::span<const Matrix> samples) {
    std::vector<Label> out;
    out.reserve(samples.size());
    std::visit(
        [&](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            for (const Matrix& x : samples) {
                if constexpr (std::is_same_v<M, MdaModel>) {
                    out.push_back(mda::predict(m, Tensor::from_matrix(x)));
                } else if constexpr (std::is_same_v<M, WmtrModel>) {
                    out.push_back(wmtr::predict(m, x));
                } else {
                    out.push_back(baselines::predict(m, Vector(x.col(x.cols() - 1))));
                }
            }
        },
        fitted);
    return out;
}

inline std::size_t num_classes(const FittedModel& fitted) {
    return std::visit(
        [](const auto& m) -> std::size_t {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, WmtrModel> || std::is_same_v<M, RrModel>) {
                return m.num_classes;
            } else {
                return m.num_classes();
            }
        },
        fitted);
}

/// One row of the grid log.
struct GridEntry {
    GridPoint point;
    double train_f1 = 0;
};

struct TrainResult {
    Model model;
    std::vector<GridEntry> log;
    std::size_t selected = 0;  ///< index into log
    MetricsReport train_report;
};

/// Which rows an experiment step read, for leakage checks.
struct ReadEvent {
    std::string phase;  ///< "train" or "test"
    int fold = 0;
    int day = 0;
    std::size_t rows = 0;
};

using ReadLog = std::function<void(const ReadEvent&)>;

namespace detail {

inline FrameStore::Observer tag(const ReadLog& log, const char* phase, int fold) {
    if (!log) return {};
    return [log, phase, fold](int day, std::size_t rows) { log(ReadEvent{phase, fold, day, rows}); };
}

/// Runs body(i) for i in [0, n) on `jobs` threads. Exceptions are rethrown
/// in index order after all workers finish.
inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& body) {
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const auto threads = static_cast<std::size_t>(std::max(1, jobs));
    if (threads == 1 || n < 2) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < std::min(threads, n); ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace detail

/// Fits every grid point on the plan's training days and keeps the best by
/// training macro-F1 (earliest point on ties).
inline TrainResult train_fold(const FrameStore& store, const RunConfig& cfg, const FoldPlan& plan,
                              const ReadLog& reads = {}) {
    validate(cfg);
    const auto frames = store.select(plan.train_days, detail::tag(reads, "train", plan.fold));
    if (frames.empty()) throw InputError("fold " + std::to_string(plan.fold) + " has no training rows");
    const NormStats norm = fit_norm(frames);
    const SampleSet set = make_samples(make_windows(apply_norm(norm, frames), cfg.window));
    if (set.samples.empty()) {
        throw InputError("fold " + std::to_string(plan.fold) + ": no training day has T=" + std::to_string(cfg.window) +
                         " rows");
    }
    const auto dim = static_cast<std::size_t>(set.samples.front().rows());
    const auto points = expand_grid(cfg, dim, cfg.window);
    std::size_t classes = 0;
    try {
        classes = class_counts(set.labels).size();
    } catch (const InputError& e) {
        throw InputError("fold " + std::to_string(plan.fold) + " training windows: " + e.what());
    }

    std::vector<std::optional<FittedModel>> fitted(points.size());
    std::vector<double> f1(points.size());
    detail::parallel_for(points.size(), cfg.jobs, [&](std::size_t i) {
        FittedModel m = fit_point(cfg, points[i], set);
        f1[i] = evaluate(set.labels, predict(m, set.samples), classes).macro_f1;
        fitted[i] = std::move(m);
    });

    TrainResult out;
    for (std::size_t i = 0; i < points.size(); ++i) out.log.push_back(GridEntry{points[i], f1[i]});
    out.selected = static_cast<std::size_t>(argmax(f1));

    Model& model = out.model;
    model.run = cfg;
    model.point = points[out.selected];
    model.dim = dim;
    model.num_classes = classes;
    model.norm = norm;
    model.fold = plan.fold;
    model.train_days = plan.train_days;
    model.fitted = std::move(*fitted[out.selected]);
    out.train_report = evaluate(set.labels, predict(model.fitted, set.samples), classes);
    return out;
}

struct EvalResult {
    int day = 0;
    ConfusionMatrix confusion{1};
    MetricsReport report;
};

/// Applies the model to one day's windows.
inline EvalResult eval_day(const FrameStore& store, const Model& model, int day, const ReadLog& reads = {}) {
    const int days[] = {day};
    const auto frames = store.select(days, detail::tag(reads, "test", model.fold));
    if (frames.empty()) throw InputError("day " + std::to_string(day) + " has no rows");
    if (static_cast<std::size_t>(frames.front().features.size()) != model.dim) {
        throw DimensionError("data has " + std::to_string(frames.front().features.size()) +
                             " features, model expects " + std::to_string(model.dim));
    }
    const SampleSet set = make_samples(make_windows(apply_norm(model.norm, frames), model.run.window));
    if (set.samples.empty()) {
        throw InputError("day " + std::to_string(day) + " has fewer than T=" + std::to_string(model.run.window) + " rows");
    }
    std::size_t classes = model.num_classes;
    for (Label l : set.labels) classes = std::max(classes, static_cast<std::size_t>(l) + 1);
    EvalResult out;
    out.day = day;
    out.confusion = confusion(set.labels, predict(model.fitted, set.samples), classes);
    out.report = report(out.confusion);
    return out;
}

/// Anchored folds over the store's actual day numbers.
inline std::vector<FoldPlan> fold_plans(const FrameStore& store) {
    const auto days = store.days();
    if (days.size() < 2) throw InputError("cross-validation needs at least two days, data has " +
                                          std::to_string(days.size()));
    auto plans = anchored_folds(static_cast<int>(days.size()));
    for (FoldPlan& p : plans) {
        for (int& d : p.train_days) d = days[static_cast<std::size_t>(d - 1)];
        p.test_day = days[static_cast<std::size_t>(p.test_day - 1)];
    }
    return plans;
}

inline FoldPlan fold_plan(const FrameStore& store, int fold) {
    const auto plans = fold_plans(store);
    if (fold < 1 || static_cast<std::size_t>(fold) > plans.size()) {
        throw ConfigError("fold " + std::to_string(fold) + " outside [1, " + std::to_string(plans.size()) + "]");
    }
    return plans[static_cast<std::size_t>(fold - 1)];
}

struct FoldResult {
    FoldPlan plan;
    TrainResult train;
    EvalResult test;
};

struct CvSummary {
    MeanStd accuracy;
    MeanStd precision;
    MeanStd recall;
    MeanStd f1;
};

struct CvResult {
    RunConfig config;
    std::vector<FoldResult> folds;
    CvSummary summary;
};

inline CvSummary summarize(std::span<const FoldResult> folds) {
    std::vector<double> a, p, r, f;
    for (const FoldResult& fr : folds) {
        a.push_back(fr.test.report.accuracy);
        p.push_back(fr.test.report.macro_precision);
        r.push_back(fr.test.report.macro_recall);
        f.push_back(fr.test.report.macro_f1);
    }
    return CvSummary{mean_std(a), mean_std(p), mean_std(r), mean_std(f)};
}

/// Train on each fold's training days, test on its test day.
inline CvResult run_cv(const FrameStore& store, const RunConfig& cfg, const ReadLog& reads = {}) {
    validate(cfg);
    CvResult out;
    out.config = cfg;
    for (const FoldPlan& plan : fold_plans(store)) {
        FoldResult fr;
        fr.plan = plan;
        fr.train = train_fold(store, cfg, plan, reads);
        fr.test = eval_day(store, fr.train.model, plan.test_day, reads);
        out.folds.push_back(std::move(fr));
    }
    out.summary = summarize(out.folds);
    return out;
}

// ---- documents --------------------------------------------------------------

inline Json to_json(const Grid& g) {
    Json r = Json::array();
    for (double v : g.r) r.push_back(weight_exponent_to_json(v));
    return Json{{"lambda", g.lambda}, {"lambda1", g.lambda1}, {"lambda2", g.lambda2},
                {"r", std::move(r)},  {"dims1", g.dims1},     {"dims2", g.dims2}};
}

inline Grid grid_from_json(const Json& j) {
    Grid g;
    g.lambda = detail::field(j, "lambda").get<std::vector<double>>();
    g.lambda1 = detail::field(j, "lambda1").get<std::vector<double>>();
    g.lambda2 = detail::field(j, "lambda2").get<std::vector<double>>();
    g.r.clear();
    for (const Json& v : detail::field(j, "r")) g.r.push_back(weight_exponent_from_json(v));
    g.dims1 = detail::field(j, "dims1").get<std::vector<std::size_t>>();
    g.dims2 = detail::field(j, "dims2").get<std::vector<std::size_t>>();
    return g;
}

inline Json to_json(const RunConfig& c) {
    return Json{{"method", method_name(c.method)}, {"T", c.window},  {"grid", to_json(c.grid)},
                {"max_iters", c.max_iters},       {"tol", c.tol},   {"seed", c.seed}};
}

inline RunConfig run_config_from_json(const Json& j) {
    RunConfig c;
    c.method = parse_method(detail::field(j, "method").get<std::string>());
    c.window = detail::field(j, "T").get<std::size_t>();
    c.grid = grid_from_json(detail::field(j, "grid"));
    c.max_iters = detail::field(j, "max_iters").get<int>();
    c.tol = detail::field(j, "tol").get<double>();
    c.seed = detail::field(j, "seed").get<std::uint64_t>();
    return c;
}

inline Json to_json(Method m, const GridPoint& p) {
    switch (m) {
        case Method::mda: return Json{{"lambda", p.lambda}, {"dims1", p.dims1}, {"dims2", p.dims2}};
        case Method::wmtr:
        case Method::mtr:
            return Json{{"lambda1", p.lambda1}, {"lambda2", p.lambda2}, {"r", weight_exponent_to_json(p.r)}};
        case Method::lda:
        case Method::rr: return Json{{"lambda", p.lambda}};
    }
    return Json::object();
}

inline GridPoint grid_point_from_json(Method m, const Json& j) {
    GridPoint p;
    switch (m) {
        case Method::mda:
            p.lambda = detail::field(j, "lambda").get<double>();
            p.dims1 = detail::field(j, "dims1").get<std::size_t>();
            p.dims2 = detail::field(j, "dims2").get<std::size_t>();
            break;
        case Method::wmtr:
        case Method::mtr:
            p.lambda1 = detail::field(j, "lambda1").get<double>();
            p.lambda2 = detail::field(j, "lambda2").get<double>();
            p.r = weight_exponent_from_json(detail::field(j, "r"));
            break;
        case Method::lda:
        case Method::rr: p.lambda = detail::field(j, "lambda").get<double>(); break;
    }
    return p;
}

inline constexpr int kDocumentVersion = 1;

inline Json model_document(const Model& m) {
    Json fitted = std::visit([](const auto& f) { return to_json(f); }, m.fitted);
    return Json{{"format", "lobtensor-model"},
                {"version", kDocumentVersion},
                {"config", to_json(m.run)},
                {"method", method_name(m.run.method)},
                {"selected", to_json(m.run.method, m.point)},
                {"dim", m.dim},
                {"T", m.run.window},
                {"num_classes", m.num_classes},
                {"fold", m.fold},
                {"train_days", m.train_days},
                {"normalization", to_json(m.norm)},
                {"model", std::move(fitted)}};
}

inline Model model_from_document(const Json& j) {
    if (!j.is_object() || j.value("format", "") != "lobtensor-model") throw ParseError("not a lobtensor model document");
    if (j.value("version", 0) != kDocumentVersion) throw ParseError("unsupported model document version");
    Model m;
    m.run = run_config_from_json(detail::field(j, "config"));
    m.point = grid_point_from_json(m.run.method, detail::field(j, "selected"));
    m.dim = detail::field(j, "dim").get<std::size_t>();
    m.num_classes = detail::field(j, "num_classes").get<std::size_t>();
    m.fold = detail::field(j, "fold").get<int>();
    m.train_days = detail::field(j, "train_days").get<std::vector<int>>();
    m.norm = norm_stats_from_json(detail::field(j, "normalization"));
    const Json& f = detail::field(j, "model");
    switch (m.run.method) {
        case Method::mda: m.fitted = mda_model_from_json(f); break;
        case Method::wmtr:
        case Method::mtr: m.fitted = wmtr_model_from_json(f); break;
        case Method::lda: m.fitted = lda_model_from_json(f); break;
        case Method::rr: m.fitted = rr_model_from_json(f); break;
    }
    if (static_cast<std::size_t>(m.norm.mean.size()) != m.dim || static_cast<std::size_t>(m.norm.std.size()) != m.dim) {
        throw ParseError("normalization length does not match the model dimension");
    }
    return m;
}

inline Json train_document(const TrainResult& t) {
    const Method method = t.model.run.method;
    Json grid = Json::array();
    for (const GridEntry& e : t.log) grid.push_back(Json{{"point", to_json(method, e.point)}, {"train_f1", e.train_f1}});
    return Json{{"format", "lobtensor-train"},
                {"version", kDocumentVersion},
                {"config", to_json(t.model.run)},
                {"fold", t.model.fold},
                {"train_days", t.model.train_days},
                {"selected_index", t.selected},
                {"selected", to_json(method, t.model.point)},
                {"train_report", to_json(t.train_report)},
                {"grid", std::move(grid)}};
}

inline Json eval_document(const Model& m, const EvalResult& e) {
    return Json{{"format", "lobtensor-eval"},
                {"version", kDocumentVersion},
                {"config", to_json(m.run)},
                {"fold", m.fold},
                {"train_days", m.train_days},
                {"selected", to_json(m.run.method, m.point)},
                {"day", e.day},
                {"report", to_json(e.report)},
                {"confusion", to_json(e.confusion)}};
}

namespace detail {

inline std::string percent(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", 100.0 * v);
    return buf;
}

inline std::string pad(std::string s, std::size_t width) {
    // Widths count code points so the UTF-8 plus-minus sign lines up.
    std::size_t cps = 0;
    for (unsigned char ch : s) cps += (ch & 0xC0) != 0x80;
    if (cps < width) s.append(width - cps, ' ');
    return s;
}

}  // namespace detail

inline std::string display_name(Method m) {
    std::string s = method_name(m);
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

/// Per-fold rows and a mean ± std row, in percent.
inline std::string cv_table(const CvResult& cv) {
    using detail::pad;
    using detail::percent;
    const std::string name = display_name(cv.config.method);
    std::string out;
    auto row = [&](const std::string& a, const std::string& b, const std::string& c, const std::string& d,
                   const std::string& e, const std::string& f) {
        std::string line = pad(a, 8) + pad(b, 7) + pad(c, 16) + pad(d, 16) + pad(e, 16) + f;
        out += line + "\n";
    };
    row("Method", "Fold", "Accuracy", "Precision", "Recall", "F1");
    for (const FoldResult& f : cv.folds) {
        const MetricsReport& r = f.test.report;
        row(name, std::to_string(f.plan.fold), percent(r.accuracy), percent(r.macro_precision),
            percent(r.macro_recall), percent(r.macro_f1));
    }
    auto ms = [](const MeanStd& m) { return detail::percent(m.mean) + " ± " + detail::percent(m.std); };
    row(name, "mean", ms(cv.summary.accuracy), ms(cv.summary.precision), ms(cv.summary.recall), ms(cv.summary.f1));
    return out;
}

inline Json cv_document(const CvResult& cv) {
    auto ms = [](const MeanStd& m) { return Json{{"mean", m.mean}, {"std", m.std}}; };
    Json folds = Json::array();
    for (const FoldResult& f : cv.folds) {
        folds.push_back(Json{{"fold", f.plan.fold},
                             {"train_days", f.plan.train_days},
                             {"test_day", f.plan.test_day},
                             {"grid_points", f.train.log.size()},
                             {"selected", to_json(cv.config.method, f.train.model.point)},
                             {"train_f1", f.train.train_report.macro_f1},
                             {"test", to_json(f.test.report)},
                             {"confusion", to_json(f.test.confusion)}});
    }
    return Json{{"format", "lobtensor-cv"},
                {"version", kDocumentVersion},
                {"config", to_json(cv.config)},
                {"folds", std::move(folds)},
                {"summary",
                 Json{{"accuracy", ms(cv.summary.accuracy)},
                      {"macro_precision", ms(cv.summary.precision)},
                      {"macro_recall", ms(cv.summary.recall)},
                      {"macro_f1", ms(cv.summary.f1)}}},
                {"table", cv_table(cv)}};
}

}  // namespace lobtensor
