#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "fedra/eval/metrics.hpp"
#include "fedra/eval/report.hpp"
#include "support/metrics_oracle.hpp"

using namespace fedra;
using namespace fedra::eval;

namespace {

ConfusionMatrix from_pairs(const std::vector<std::size_t>& truth, const std::vector<std::size_t>& pred,
                           std::size_t classes) {
    ConfusionMatrix cm(classes);
    for (std::size_t s = 0; s < truth.size(); ++s) cm.add(truth[s], pred[s]);
    return cm;
}

ModelRow row(const std::string& name, ConfusionMatrix cm) {
    return {name, metrics_from_confusion(cm), std::move(cm)};
}

}  // namespace

TEST_SUITE("metrics") {
    TEST_CASE("perfect diagonal") {
        ConfusionMatrix cm(4, {5, 0, 0, 0, 0, 3, 0, 0, 0, 0, 9, 0, 0, 0, 0, 1});
        const auto m = metrics_from_confusion(cm);
        CHECK(m == Metrics{1.0, 1.0, 1.0, 1.0});
    }

    TEST_CASE("everything predicted as class 0") {
        const auto m = metrics_from_confusion(ConfusionMatrix(2, {50, 0, 50, 0}));
        CHECK(m.accuracy == 0.5);
        CHECK(m.precision == 0.25);
        CHECK(m.recall == 0.5);
        CHECK(m.f1 == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    }

    TEST_CASE("hand-checked 3-class matrix") {
        // rows truth, cols predicted
        const ConfusionMatrix cm(3, {8, 2, 0, 1, 5, 4, 0, 0, 10});
        const auto sc = class_scores(cm);
        CHECK(sc.precision[0] == doctest::Approx(8.0 / 9.0));
        CHECK(sc.precision[1] == doctest::Approx(5.0 / 7.0));
        CHECK(sc.precision[2] == doctest::Approx(10.0 / 14.0));
        CHECK(sc.recall[0] == doctest::Approx(0.8));
        CHECK(sc.recall[1] == doctest::Approx(0.5));
        CHECK(sc.recall[2] == doctest::Approx(1.0));
        CHECK(metrics_from_confusion(cm).accuracy == doctest::Approx(23.0 / 30.0));
    }

    TEST_CASE("class relabeling leaves macro scores unchanged") {
        std::mt19937_64 rng(1);
        for (int t = 0; t < 50; ++t) {
            const std::size_t q = 2 + rng() % 8;
            std::vector<std::size_t> truth(100), pred(100);
            for (auto& v : truth) v = rng() % q;
            for (auto& v : pred) v = rng() % q;
            std::vector<std::size_t> perm(q);
            std::iota(perm.begin(), perm.end(), std::size_t{0});
            std::shuffle(perm.begin(), perm.end(), rng);
            auto pt = truth, pp = pred;
            for (auto& v : pt) v = perm[v];
            for (auto& v : pp) v = perm[v];
            const auto a = metrics_from_confusion(from_pairs(truth, pred, q));
            const auto b = metrics_from_confusion(from_pairs(pt, pp, q));
            CHECK(a.accuracy == b.accuracy);
            CHECK(a.precision == doctest::Approx(b.precision).epsilon(1e-14));
            CHECK(a.recall == doctest::Approx(b.recall).epsilon(1e-14));
            CHECK(a.f1 == doctest::Approx(b.f1).epsilon(1e-14));
        }
    }

    TEST_CASE("agrees with the per-sample oracle") {
        std::mt19937_64 rng(2);
        for (int t = 0; t < 200; ++t) {
            const std::size_t q = 2 + rng() % 9, n = 1 + rng() % 300;
            std::vector<std::size_t> truth(n), pred(n);
            for (auto& v : truth) v = rng() % q;
            for (std::size_t s = 0; s < n; ++s) pred[s] = rng() % 3 == 0 ? truth[s] : rng() % q;
            const auto got = metrics_from_confusion(from_pairs(truth, pred, q));
            const auto want = testing::brute_force_metrics(truth, pred, q);
            CHECK(std::abs(got.accuracy - want.accuracy) <= 1e-12);
            CHECK(std::abs(got.precision - want.precision) <= 1e-12);
            CHECK(std::abs(got.recall - want.recall) <= 1e-12);
            CHECK(std::abs(got.f1 - want.f1) <= 1e-12);
        }
    }

    TEST_CASE("argmax ties go low") {
        CHECK(argmax(std::vector<double>{0.2, 0.4, 0.4}) == 1);
        CHECK(argmax(std::vector<double>{1.0}) == 0);
    }

    TEST_CASE("matrix bookkeeping") {
        ConfusionMatrix cm(3);
        cm.add(0, 1);
        cm.add(0, 1);
        cm.add(2, 2);
        CHECK(cm.total() == 3);
        CHECK(cm.correct() == 1);
        CHECK(cm.row_sum(0) == 2);
        CHECK(cm.col_sum(1) == 2);
        CHECK_THROWS(cm.add(3, 0));
        CHECK_THROWS(ConfusionMatrix(2, {1, 2, 3}));
        CHECK(metrics_from_confusion(ConfusionMatrix(2)) == Metrics{});
    }

    TEST_CASE("evaluate uses argmax of the model output") {
        auto p = nn::ModelParameters::zeros(std::vector<nn::LayerSpec>{{data::kFeatureCount, 2, nn::Activation::softmax}});
        p.layers()[0].weight(1, 0) = 1.0;  // class 1 iff feature 0 > 0
        data::Dataset test(4);
        test[0].features[0] = 1.0, test[0].label = 1;
        test[1].features[0] = -1.0, test[1].label = 0;
        test[2].features[0] = 2.0, test[2].label = 0;
        test[3].features[0] = 0.0, test[3].label = 0;  // tie -> class 0
        const auto cm = evaluate(p, test, 2);
        CHECK(cm == ConfusionMatrix(2, {2, 1, 0, 1}));
        CHECK_THROWS((void)evaluate(p, {}, 2));
        CHECK_THROWS_AS((void)evaluate(p, test, 3), nn::ShapeError);
    }
}

TEST_SUITE("report") {
    TEST_CASE("aggregate means and layout checks") {
        TrialRecord t0{0, 10, {row("Global", ConfusionMatrix(2, {5, 0, 0, 5})),
                               row("Client 1", ConfusionMatrix(2, {5, 0, 5, 0}))}};
        TrialRecord t1{1, 11, {row("Global", ConfusionMatrix(2, {5, 0, 5, 0})),
                               row("Client 1", ConfusionMatrix(2, {5, 0, 5, 0}))}};
        const auto a = single_trial_report(Scenario::balanced_standard, data::Task::binary, t0);
        const auto b = single_trial_report(Scenario::balanced_standard, data::Task::binary, t1);
        const auto agg = aggregate_trials({a, b});
        CHECK(agg.trials == 2);
        CHECK(agg.row_names == std::vector<std::string>{"Global", "Client 1"});
        CHECK(agg.mean[0].accuracy == 0.75);
        CHECK(agg.mean[1].accuracy == 0.5);
        CHECK(agg.per_trial.size() == 2);

        auto other = b;
        other.scenario = Scenario::imbalanced_weighted;
        CHECK_THROWS_AS((void)aggregate_trials({a, other}), std::invalid_argument);
        auto renamed = b;
        renamed.row_names[1] = "Client 2";
        renamed.per_trial[0].rows[1].name = "Client 2";
        CHECK_THROWS_AS((void)aggregate_trials({a, renamed}), std::invalid_argument);
        CHECK_THROWS((void)aggregate_trials({}));
    }

    TEST_CASE("machine report round trip") {
        TrialRecord t{3, 99, {row("Global", ConfusionMatrix(3, {7, 1, 0, 2, 5, 1, 0, 0, 9}))}};
        const auto r = single_trial_report(Scenario::imbalanced_weighted, data::Task::multiclass, t);
        std::stringstream ss;
        write_machine_report(ss, r);
        const auto back = read_machine_report(ss);
        CHECK(back.scenario == r.scenario);
        CHECK(back.task == r.task);
        CHECK(back.row_names == r.row_names);
        CHECK(back.mean == r.mean);
        REQUIRE(back.per_trial.size() == 1);
        CHECK(back.per_trial[0].seed == 99);
        CHECK(back.per_trial[0].rows[0].confusion == r.per_trial[0].rows[0].confusion);
        std::stringstream again;
        write_machine_report(again, back);
        std::stringstream first;
        write_machine_report(first, r);
        CHECK(again.str() == first.str());
    }

    TEST_CASE("table shape") {
        TrialRecord t{0, 1, {row("Global", ConfusionMatrix(2, {5, 0, 5, 0}))}};
        std::ostringstream os;
        render_table(os, single_trial_report(Scenario::balanced_standard, data::Task::binary, t));
        const auto text = os.str();
        CHECK(text.find(std::string(scenario_title(Scenario::balanced_standard))) != std::string::npos);
        CHECK(text.find(" 50.00%") != std::string::npos);
        CHECK(text.find(" 25.00%") != std::string::npos);
    }

    TEST_CASE("scenario names") {
        for (auto s : {Scenario::balanced_standard, Scenario::imbalanced_standard, Scenario::imbalanced_weighted}) {
            CHECK(scenario_from_string(to_string(s)) == s);
        }
        CHECK_THROWS((void)scenario_from_string("oversampled"));
    }
}
