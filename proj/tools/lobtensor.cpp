// lobtensor command-line tool.
//
//   lobtensor synth  --out FILE [--seed N --days N --rows-per-day N --dim N --imbalance A:B:C ...]
//   lobtensor train  --data FILE --method M --out MODEL [--fold K --T N grids...]
//   lobtensor eval   --model MODEL --data FILE [--fold K | --day D] [--out REPORT]
//   lobtensor cv     --data FILE --method M [--out SUMMARY --table FILE grids...]
//   lobtensor label  --prices FILE [--horizon H --threshold X --out FILE]
//
// Exit status: 0 success, 2 configuration error, 3 data error, 4 numeric failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lobtensor/data.hpp"
#include "lobtensor/errors.hpp"
#include "lobtensor/experiment.hpp"
#include "lobtensor/synth.hpp"

namespace fs = std::filesystem;
using namespace lobtensor;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;
constexpr const char* kDataDirEnv = "LOBTENSOR_DATA_DIR";
constexpr const char* kDefaultDataFile = "frames.csv";

/// Write to a sibling temp file, then rename over the target.
void write_atomic(const std::string& path, const std::string& contents) {
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw InputError("cannot write '" + tmp.string() + "'");
        out << contents;
        if (!out) throw InputError("failed writing '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw InputError("cannot move output into place at '" + path + "': " + ec.message());
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

/// Empty path: $LOBTENSOR_DATA_DIR/frames.csv. A relative path that does not
/// exist is retried under $LOBTENSOR_DATA_DIR.
std::string resolve_data(const std::string& given) {
    const char* dir = std::getenv(kDataDirEnv);
    if (given.empty()) {
        if (!dir || !*dir) throw ConfigError(std::string("--data not given and ") + kDataDirEnv + " is not set");
        return (fs::path(dir) / kDefaultDataFile).string();
    }
    const fs::path p(given);
    if (dir && *dir && p.is_relative() && !fs::exists(p) && fs::exists(fs::path(dir) / p)) {
        return (fs::path(dir) / p).string();
    }
    return given;
}

std::vector<double> parse_ratios(const std::string& s) {
    std::vector<double> out;
    std::stringstream in(s);
    std::string part;
    while (std::getline(in, part, ':')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(part, &used));
            if (used != part.size()) throw std::invalid_argument(part);
        } catch (const std::exception&) {
            throw ConfigError("bad --imbalance value '" + s + "' (expected e.g. 8:1:1)");
        }
    }
    return out;
}

std::vector<double> parse_exponents(const std::vector<std::string>& values) {
    std::vector<double> out;
    for (const std::string& v : values) {
        if (v == "inf" || v == "infinity") {
            out.push_back(kUnweighted);
            continue;
        }
        try {
            std::size_t used = 0;
            out.push_back(std::stod(v, &used));
            if (used != v.size()) throw std::invalid_argument(v);
        } catch (const std::exception&) {
            throw ConfigError("bad --r value '" + v + "'");
        }
    }
    return out;
}

/// Flags shared by train and cv.
struct RunFlags {
    std::string data;
    std::string method = "wmtr";
    std::size_t window = 10;
    std::vector<double> lambda, lambda1, lambda2;
    std::vector<std::string> r;
    std::vector<std::size_t> dims1, dims2;
    std::uint64_t seed = 0;
    int max_iters = 50;
    double tol = 1e-6;
    int jobs = 1;

    void attach(CLI::App& app) {
        app.add_option("--data", data, "Frame CSV (default: $LOBTENSOR_DATA_DIR/frames.csv)");
        app.add_option("--method", method, "mda, wmtr, mtr, lda or rr")->capture_default_str();
        app.add_option("--T", window, "Window length")->capture_default_str();
        app.add_option("--lambda", lambda, "Regularizer grid for mda/lda/rr")->delimiter(',');
        app.add_option("--lambda1", lambda1, "W1 regularizer grid for wmtr/mtr")->delimiter(',');
        app.add_option("--lambda2", lambda2, "w2 regularizer grid for wmtr/mtr")->delimiter(',');
        app.add_option("--r", r, "Weight exponent grid for wmtr ('inf' allowed)")->delimiter(',');
        app.add_option("--dims1", dims1, "MDA feature-mode subspace grid")->delimiter(',');
        app.add_option("--dims2", dims2, "MDA time-mode subspace grid")->delimiter(',');
        app.add_option("--seed", seed, "MDA initialization seed")->capture_default_str();
        app.add_option("--max-iters", max_iters, "Iteration cap for mda/wmtr/mtr")->capture_default_str();
        app.add_option("--tol", tol, "Convergence threshold")->capture_default_str();
        app.add_option("--jobs", jobs, "Worker threads for the grid search")->capture_default_str();
    }

    RunConfig config() const {
        RunConfig c;
        c.method = parse_method(method);
        c.window = window;
        if (!lambda.empty()) c.grid.lambda = lambda;
        if (!lambda1.empty()) c.grid.lambda1 = lambda1;
        if (!lambda2.empty()) c.grid.lambda2 = lambda2;
        if (!r.empty()) c.grid.r = parse_exponents(r);
        if (!dims1.empty()) c.grid.dims1 = dims1;
        if (!dims2.empty()) c.grid.dims2 = dims2;
        c.seed = seed;
        c.max_iters = max_iters;
        c.tol = tol;
        c.jobs = jobs;
        validate(c);
        return c;
    }
};

FrameStore load_store(const std::string& data) { return FrameStore(load_frames(resolve_data(data))); }

int cmd_synth(const SynthConfig& cfg, const std::string& out) {
    validate(cfg);
    const auto frames = synth_generate(cfg);
    std::ostringstream text;
    const Json meta{{"format", "lobtensor-synth"},
                    {"seed", cfg.seed},
                    {"num_classes", cfg.num_classes},
                    {"dim", cfg.dim},
                    {"days", cfg.days},
                    {"rows_per_day", cfg.rows_per_day},
                    {"separation", cfg.separation},
                    {"noise", cfg.noise},
                    {"ratios", cfg.ratios},
                    {"run_min", cfg.run_min},
                    {"run_max", cfg.run_max}};
    text << "# " << meta.dump() << "\n";
    write_frames(text, frames);
    write_atomic(out, text.str());

    std::vector<std::size_t> counts(cfg.num_classes, 0);
    for (const FeatureFrame& f : frames) ++counts[static_cast<std::size_t>(f.label)];
    std::cout << "wrote " << frames.size() << " rows (" << cfg.days << " days, D=" << cfg.dim << ") to " << out << "\n";
    for (std::size_t c = 0; c < counts.size(); ++c) std::cout << "class " << c << ": " << counts[c] << "\n";
    return 0;
}

int cmd_train(const RunFlags& flags, int fold, const std::string& out, std::string log) {
    const RunConfig cfg = flags.config();
    const FrameStore store = load_store(flags.data);
    const auto plans = fold_plans(store);
    const FoldPlan plan = fold_plan(store, fold > 0 ? fold : static_cast<int>(plans.size()));
    const TrainResult result = train_fold(store, cfg, plan);
    if (log.empty()) log = out + ".train.json";
    write_atomic(out, dump(model_document(result.model)));
    write_atomic(log, dump(train_document(result)));
    std::cout << "fold " << plan.fold << ": " << result.log.size() << " grid points, selected #" << result.selected + 1
              << ", train macro-F1 " << result.train_report.macro_f1 << "\n";
    return 0;
}

int cmd_eval(const std::string& model_path, const std::string& data, int fold, int day, bool allow_train_day,
             const std::string& out) {
    Json doc;
    try {
        doc = Json::parse(read_file(model_path));
    } catch (const Json::exception& e) {
        throw ParseError("model file '" + model_path + "': " + e.what());
    }
    const Model model = model_from_document(doc);
    const FrameStore store = load_store(data);
    int target = day;
    if (target == 0) target = fold_plan(store, fold > 0 ? fold : model.fold).test_day;
    for (int d : model.train_days) {
        if (d == target && !allow_train_day) {
            throw ConfigError("day " + std::to_string(target) +
                              " was used for training this model; pass --allow-train-day to evaluate it anyway");
        }
    }
    const EvalResult result = eval_day(store, model, target);
    const std::string text = dump(eval_document(model, result));
    if (out.empty()) {
        std::cout << text;
    } else {
        write_atomic(out, text);
        std::cout << "day " << target << ": accuracy " << result.report.accuracy << ", macro-F1 "
                  << result.report.macro_f1 << "\n";
    }
    return 0;
}

int cmd_cv(const RunFlags& flags, const std::string& out, const std::string& table) {
    const RunConfig cfg = flags.config();
    const FrameStore store = load_store(flags.data);
    const CvResult cv = run_cv(store, cfg);
    const std::string text = dump(cv_document(cv));
    if (!table.empty()) write_atomic(table, cv_table(cv));
    if (out.empty()) {
        std::cout << text;
    } else {
        write_atomic(out, text);
        std::cout << cv_table(cv);
    }
    return 0;
}

/// Input rows: "ask,bid" (blank and '#' lines skipped). Output: one label code per row with a full horizon.
int cmd_label(const std::string& prices, std::size_t horizon, double threshold, const std::string& out) {
    std::ifstream in(prices);
    if (!in) throw InputError("cannot open price file '" + prices + "'");
    std::vector<double> mid;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError("expected 'ask,bid'", line_no);
        double ask = 0, bid = 0;
        try {
            std::size_t used = 0;
            const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
            ask = std::stod(a, &used);
            if (used != a.size()) throw std::invalid_argument(a);
            bid = std::stod(b, &used);
            if (used != b.size() && b.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(b);
        } catch (const std::exception&) {
            throw ParseError("non-numeric price", line_no);
        }
        mid.push_back(mid_price(ask, bid));
    }
    const LabelCodes codes;
    std::string text;
    for (Label l : label_movements(mid, horizon, threshold)) text += std::to_string(codes.encode(l)) + "\n";
    if (out.empty()) {
        std::cout << text;
    } else {
        write_atomic(out, text);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tensor and regression classifiers for limit order book mid-price movement"};
    app.require_subcommand(1);

    SynthConfig synth;
    std::string synth_out, imbalance = "1:1:1";
    auto* s = app.add_subcommand("synth", "Generate a synthetic frame file");
    s->add_option("--out", synth_out, "Output CSV")->required();
    s->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();
    s->add_option("--days", synth.days, "Number of days")->capture_default_str();
    s->add_option("--rows-per-day", synth.rows_per_day, "Frames per day")->capture_default_str();
    s->add_option("--dim", synth.dim, "Feature dimension D")->capture_default_str();
    s->add_option("--imbalance", imbalance, "Class ratios up:stationary:down")->capture_default_str();
    s->add_option("--separation", synth.separation, "Norm of each class mean")->capture_default_str();
    s->add_option("--noise", synth.noise, "Per-feature noise sigma")->capture_default_str();
    s->add_option("--run-min", synth.run_min, "Shortest label run")->capture_default_str();
    s->add_option("--run-max", synth.run_max, "Longest label run")->capture_default_str();

    RunFlags train_flags;
    int train_fold_no = 0;
    std::string train_out, train_log;
    auto* t = app.add_subcommand("train", "Grid-search one method on a fold's training days");
    train_flags.attach(*t);
    t->add_option("--fold", train_fold_no, "Fold index (default: last fold)");
    t->add_option("--out", train_out, "Model document path")->required();
    t->add_option("--log", train_log, "Grid log path (default: <out>.train.json)");

    std::string eval_model, eval_data, eval_out;
    int eval_fold = 0, eval_day_no = 0;
    bool allow_train_day = false;
    auto* e = app.add_subcommand("eval", "Evaluate a model on a fold's test day");
    e->add_option("--model", eval_model, "Model document")->required();
    e->add_option("--data", eval_data, "Frame CSV (default: $LOBTENSOR_DATA_DIR/frames.csv)");
    e->add_option("--fold", eval_fold, "Fold whose test day to use (default: the model's fold)");
    e->add_option("--day", eval_day_no, "Evaluate this day instead");
    e->add_flag("--allow-train-day", allow_train_day, "Permit evaluating a day the model was trained on");
    e->add_option("--out", eval_out, "Report path (default: stdout)");

    RunFlags cv_flags;
    std::string cv_out, cv_table_path;
    auto* c = app.add_subcommand("cv", "Anchored cross-validation over all days");
    cv_flags.attach(*c);
    c->add_option("--out", cv_out, "Summary document path (default: stdout)");
    c->add_option("--table", cv_table_path, "Also write the text table here");

    std::string prices, label_out;
    std::size_t horizon = 10;
    double threshold = 2e-5;
    auto* l = app.add_subcommand("label", "Label mid-price movements from best ask/bid rows");
    l->add_option("--prices", prices, "CSV of ask,bid rows")->required();
    l->add_option("--horizon", horizon, "Events averaged ahead")->capture_default_str();
    l->add_option("--threshold", threshold, "Relative change treated as stationary")->capture_default_str();
    l->add_option("--out", label_out, "Output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (s->parsed()) {
            synth.ratios = parse_ratios(imbalance);
            synth.num_classes = synth.ratios.size();
            return cmd_synth(synth, synth_out);
        }
        if (t->parsed()) return cmd_train(train_flags, train_fold_no, train_out, train_log);
        if (e->parsed()) return cmd_eval(eval_model, eval_data, eval_fold, eval_day_no, allow_train_day, eval_out);
        if (c->parsed()) return cmd_cv(cv_flags, cv_out, cv_table_path);
        if (l->parsed()) return cmd_label(prices, horizon, threshold, label_out);
    } catch (const ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return kExitConfig;
    } catch (const NumericError& err) {
        std::cerr << "numeric failure: " << err.what() << "\n";
        return kExitNumeric;
    } catch (const Error& err) {
        std::cerr << "data error: " << err.what() << "\n";
        return kExitData;
    } catch (const Json::exception& err) {
        std::cerr << "data error: " << err.what() << "\n";
        return kExitData;
    }
    return kExitConfig;
}
