#include <gtest/gtest.h>

#include <set>

#include "lobtensor/experiment.hpp"
#include "lobtensor/synth.hpp"

using namespace lobtensor;

namespace {

SynthConfig small_synth(int days = 4, std::uint64_t seed = 1) {
    SynthConfig s;
    s.dim = 8;
    s.days = days;
    s.rows_per_day = 300;
    s.separation = 3.0;
    s.run_min = 10;
    s.run_max = 30;
    s.seed = seed;
    return s;
}

RunConfig small_run(Method m) {
    RunConfig c;
    c.method = m;
    c.window = 4;
    c.grid.lambda = {0.1, 10};
    c.grid.lambda1 = {0.1, 10};
    c.grid.lambda2 = {1};
    c.grid.r = {2, 4};
    c.grid.dims1 = {2, 4};
    c.grid.dims2 = {1, 2};
    c.max_iters = 20;
    return c;
}

}  // namespace

TEST(Method, NamesRoundTrip) {
    for (Method m : {Method::mda, Method::wmtr, Method::mtr, Method::lda, Method::rr}) {
        EXPECT_EQ(parse_method(method_name(m)), m);
    }
    EXPECT_THROW(parse_method("svm"), ConfigError);
    EXPECT_EQ(display_name(Method::wmtr), "WMTR");
}

TEST(Grid, DefaultGridSizes) {
    RunConfig c;
    c.method = Method::mda;
    EXPECT_EQ(expand_grid(c, 144, 10).size(), 12u * 8u * 5u);
    // dims that exceed a 20 x 5 input are dropped
    EXPECT_EQ(expand_grid(c, 20, 5).size(), 4u * 5u * 5u);
    c.method = Method::wmtr;
    EXPECT_EQ(expand_grid(c, 144, 10).size(), 75u);
    c.method = Method::mtr;
    const auto mtr = expand_grid(c, 144, 10);
    EXPECT_EQ(mtr.size(), 25u);
    for (const GridPoint& p : mtr) EXPECT_TRUE(std::isinf(p.r));
    c.method = Method::lda;
    EXPECT_EQ(expand_grid(c, 144, 10).size(), 5u);
}

TEST(Grid, InvalidConfigsRejectedBeforeCompute) {
    RunConfig c;
    c.method = Method::mda;
    c.grid.lambda.clear();
    EXPECT_THROW(validate(c), ConfigError);
    c = RunConfig{};
    c.grid.r = {-1};
    EXPECT_THROW(validate(c), ConfigError);
    c = RunConfig{};
    c.window = 0;
    EXPECT_THROW(validate(c), ConfigError);
    c = RunConfig{};
    c.method = Method::mda;
    c.grid.dims1 = {200};
    EXPECT_THROW(expand_grid(c, 144, 10), ConfigError);
}

TEST(Folds, UseActualDayNumbers) {
    std::vector<FeatureFrame> frames;
    for (int day : {3, 5, 9}) {
        for (int i = 0; i < 3; ++i) {
            FeatureFrame f;
            f.day = day;
            f.index = i;
            f.features = Vector::Zero(2);
            frames.push_back(f);
        }
    }
    const FrameStore store(frames);
    const auto plans = fold_plans(store);
    ASSERT_EQ(plans.size(), 2u);
    EXPECT_EQ(plans[0].train_days, std::vector<int>({3}));
    EXPECT_EQ(plans[0].test_day, 5);
    EXPECT_EQ(plans[1].train_days, std::vector<int>({3, 5}));
    EXPECT_EQ(plans[1].test_day, 9);
    EXPECT_THROW(fold_plan(store, 3), ConfigError);
}

TEST(TrainFold, ReadsOnlyTrainingDaysAndLogsEveryPoint) {
    const FrameStore store(synth_generate(small_synth()));
    for (Method m : {Method::mda, Method::wmtr, Method::mtr, Method::lda, Method::rr}) {
        const RunConfig cfg = small_run(m);
        const FoldPlan plan = fold_plan(store, 2);
        std::set<int> seen;
        const TrainResult t = train_fold(store, cfg, plan, [&](const ReadEvent& e) {
            EXPECT_EQ(e.phase, "train");
            seen.insert(e.day);
        });
        EXPECT_EQ(seen, std::set<int>({1, 2})) << method_name(m);
        EXPECT_EQ(t.log.size(), expand_grid(cfg, 8, 4).size());
        double best = -1;
        std::size_t best_i = 0;
        for (std::size_t i = 0; i < t.log.size(); ++i) {
            if (t.log[i].train_f1 > best) {
                best = t.log[i].train_f1;
                best_i = i;
            }
        }
        EXPECT_EQ(t.selected, best_i);
        EXPECT_EQ(t.model.point, t.log[best_i].point);
        EXPECT_DOUBLE_EQ(t.train_report.macro_f1, best);
    }
}

TEST(TrainFold, SinglePointGrid) {
    const FrameStore store(synth_generate(small_synth()));
    RunConfig cfg = small_run(Method::rr);
    cfg.grid.lambda = {1};
    const TrainResult t = train_fold(store, cfg, fold_plan(store, 1));
    ASSERT_EQ(t.log.size(), 1u);
    EXPECT_EQ(t.selected, 0u);
    EXPECT_EQ(t.log[0].point.lambda, 1.0);
    EXPECT_DOUBLE_EQ(t.log[0].train_f1, t.train_report.macro_f1);
}

TEST(TrainFold, JobsDoNotChangeResults) {
    const FrameStore store(synth_generate(small_synth()));
    for (Method m : {Method::mda, Method::wmtr}) {
        RunConfig one = small_run(m), many = small_run(m);
        many.jobs = 3;
        const auto a = train_document(train_fold(store, one, fold_plan(store, 3))).dump();
        const auto b = train_document(train_fold(store, many, fold_plan(store, 3))).dump();
        EXPECT_EQ(a, b);
    }
}

TEST(TrainFold, MtrOnSingleColumnMatchesRidge) {
    const FrameStore store(synth_generate(small_synth()));
    RunConfig rr = small_run(Method::rr);
    rr.window = 1;
    rr.grid.lambda = {0.7};
    RunConfig mtr = small_run(Method::mtr);
    mtr.window = 1;
    mtr.grid.lambda1 = {0.7};
    mtr.grid.lambda2 = {1};
    mtr.max_iters = 1;
    const FoldPlan plan = fold_plan(store, 2);
    const Model a = train_fold(store, rr, plan).model;
    const Model b = train_fold(store, mtr, plan).model;
    const auto ea = eval_day(store, a, plan.test_day);
    const auto eb = eval_day(store, b, plan.test_day);
    EXPECT_EQ(ea.confusion, eb.confusion);
}

TEST(EvalDay, ConfusionTotalsMatchWindowCount) {
    const FrameStore store(synth_generate(small_synth()));
    const RunConfig cfg = small_run(Method::wmtr);
    const TrainResult t = train_fold(store, cfg, fold_plan(store, 1));
    const EvalResult e = eval_day(store, t.model, 2);
    EXPECT_EQ(e.confusion.total(), store.rows_on(2) - cfg.window + 1);
    EXPECT_EQ(e.report.samples, e.confusion.total());
}

TEST(EvalDay, NearNoiselessDataIsPerfect) {
    SynthConfig s = small_synth(3);
    s.noise = 1e-6;
    s.run_min = 100;
    s.run_max = 200;
    const FrameStore store(synth_generate(s));
    for (Method m : {Method::mda, Method::wmtr, Method::lda, Method::rr}) {
        RunConfig cfg = small_run(m);
        cfg.window = 3;
        const TrainResult t = train_fold(store, cfg, fold_plan(store, 2));
        EXPECT_EQ(eval_day(store, t.model, 3).report.accuracy, 1.0) << method_name(m);
    }
}

TEST(EvalDay, DimensionMismatch) {
    const FrameStore store(synth_generate(small_synth()));
    const TrainResult t = train_fold(store, small_run(Method::rr), fold_plan(store, 1));
    SynthConfig other = small_synth();
    other.dim = 5;
    const FrameStore wide(synth_generate(other));
    EXPECT_THROW(eval_day(wide, t.model, 2), DimensionError);
}

TEST(ModelDocument, RoundTripPreservesPredictions) {
    const FrameStore store(synth_generate(small_synth()));
    for (Method m : {Method::mda, Method::wmtr, Method::mtr, Method::lda, Method::rr}) {
        const TrainResult t = train_fold(store, small_run(m), fold_plan(store, 2));
        const Json doc = model_document(t.model);
        const Model back = model_from_document(Json::parse(doc.dump()));
        EXPECT_EQ(model_document(back).dump(), doc.dump()) << method_name(m);
        EXPECT_EQ(eval_day(store, back, 3).confusion, eval_day(store, t.model, 3).confusion);
        EXPECT_EQ(doc["config"]["seed"], 0);
        EXPECT_EQ(doc["train_days"], Json({1, 2}));
    }
}

TEST(ModelDocument, RejectsForeignDocuments) {
    EXPECT_THROW(model_from_document(Json{{"format", "other"}}), ParseError);
    EXPECT_THROW(model_from_document(Json::array()), ParseError);
}

TEST(RunCv, FoldCountsAndLeakage) {
    for (int days : {2, 10}) {
        SynthConfig s = small_synth(days);
        s.rows_per_day = 150;
        const FrameStore store(synth_generate(s));
        std::vector<ReadEvent> events;
        const CvResult cv = run_cv(store, small_run(Method::lda), [&](const ReadEvent& e) { events.push_back(e); });
        ASSERT_EQ(cv.folds.size(), static_cast<std::size_t>(days - 1));
        for (const ReadEvent& e : events) {
            const FoldPlan& plan = cv.folds[static_cast<std::size_t>(e.fold - 1)].plan;
            if (e.phase == "train") {
                EXPECT_NE(e.day, plan.test_day);
                EXPECT_LE(e.day, plan.fold);
            } else {
                EXPECT_EQ(e.day, plan.test_day);
            }
        }
    }
}

TEST(RunCv, DocumentAndTable) {
    const FrameStore store(synth_generate(small_synth()));
    const CvResult cv = run_cv(store, small_run(Method::wmtr));
    const Json doc = cv_document(cv);
    EXPECT_EQ(doc["folds"].size(), 3u);
    EXPECT_EQ(doc["config"]["method"], "wmtr");
    const std::string table = cv_table(cv);
    EXPECT_NE(table.find("Accuracy"), std::string::npos);
    EXPECT_NE(table.find("±"), std::string::npos);
    EXPECT_NE(table.find("WMTR    mean"), std::string::npos);
    EXPECT_EQ(cv_document(run_cv(store, small_run(Method::wmtr))).dump(), doc.dump());
}
