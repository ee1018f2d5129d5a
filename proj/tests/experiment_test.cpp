#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fedra/eval/report.hpp"
#include "fedra/experiment/config.hpp"
#include "fedra/experiment/pipeline.hpp"

using namespace fedra;
using namespace fedra::experiment;
namespace fs = std::filesystem;

namespace {

const std::string kFixtures = FEDRA_FIXTURE_DIR "/pe";

ExperimentConfig parse(const std::string& text) {
    std::istringstream is(text);
    return parse_config(is);
}

ExperimentConfig quick(eval::Scenario scenario, data::Task task = data::Task::multiclass) {
    ExperimentConfig cfg;
    cfg.scenario = scenario;
    cfg.task = task;
    cfg.training.rounds = 2;
    cfg.training.epochs = 1;
    cfg.training.loss_mode = scenario == eval::Scenario::imbalanced_weighted ? fed::LossMode::weighted
                                                                             : fed::LossMode::standard;
    cfg.seed = 17;
    return cfg;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

}  // namespace

TEST_SUITE("config") {
    TEST_CASE("defaults") {
        const auto cfg = parse("{}");
        CHECK(cfg.training.rounds == 30);
        CHECK(cfg.training.epochs == 5);
        CHECK(cfg.clients == 3);
        CHECK(cfg.data_source == kSyntheticDefault);
        const auto arch = cfg.resolved_architecture();
        REQUIRE(arch.size() == 3);
        CHECK(arch[0].output_dim == 64);
        CHECK(arch[1].output_dim == 32);
        CHECK(arch[2].output_dim == 10);
    }

    TEST_CASE("scenario drives the loss mode and the scheme") {
        const auto w = parse(R"({"scenario": "imbalanced_weighted"})");
        CHECK(w.training.loss_mode == fed::LossMode::weighted);
        CHECK(w.partition_scheme() == data::PartitionScheme::canonical_imbalanced);
        const auto b = parse(R"({"scenario": "balanced_standard", "task": "binary"})");
        CHECK(b.training.loss_mode == fed::LossMode::standard);
        CHECK(b.resolved_architecture().back().output_dim == 2);
    }

    TEST_CASE("rejections") {
        CHECK_THROWS_AS(parse(R"({"seeed": 3})"), ConfigError);
        CHECK_THROWS_AS(parse(R"({"training": {"rounds": 3, "lr": 0.1}})"), ConfigError);
        CHECK_THROWS_AS(parse(R"({"trials": "many"})"), ConfigError);
        CHECK_THROWS_AS(parse(R"({"task": "regression"})"), ConfigError);
        CHECK_THROWS_AS(parse(R"({"scenario": "imbalanced_standard", "clients": 4})"), ConfigError);
        CHECK_THROWS_AS(parse(R"({"scenario": "imbalanced_standard", "training": {"loss_mode": "weighted"}})"),
                        ConfigError);
        CHECK_THROWS_AS(parse(R"({"synthetic": {"separation": 1.5}})"), ConfigError);
        CHECK_THROWS_AS(parse(R"({"training": {"epochs": 0}})"), ConfigError);
        CHECK_THROWS_AS(parse("{not json"), ConfigError);
        CHECK_THROWS_AS((void)load_config("/nonexistent/config.json"), IoError);
        CHECK_THROWS_AS(parse(R"({"architecture": [{"input_dim": 15, "output_dim": 4, "activation": "softmax"}]})"),
                        ConfigError);
    }

    TEST_CASE("json round trip") {
        const auto cfg = parse(R"({"seed": 9, "trials": 4, "task": "binary", "training": {"rounds": 7}})");
        const auto back = parse(config_to_json(cfg));
        CHECK(config_to_json(back) == config_to_json(cfg));
        CHECK(back.seed == 9);
        CHECK(back.training.rounds == 7);
    }
}

TEST_SUITE("pipeline") {
    TEST_CASE("trial seeds are distinct and stable") {
        CHECK(trial_seed(1, 0) == trial_seed(1, 0));
        CHECK(trial_seed(1, 0) != trial_seed(1, 1));
        CHECK(trial_seed(1, 0) != trial_seed(2, 0));
    }

    TEST_CASE("one trial per scenario") {
        for (auto sc : {eval::Scenario::balanced_standard, eval::Scenario::imbalanced_standard,
                        eval::Scenario::imbalanced_weighted}) {
            const auto cfg = quick(sc);
            const auto ds = load_dataset(cfg);
            const auto out = run_trial(cfg, ds, 0);
            REQUIRE(out.record.rows.size() == 4);
            CHECK(out.record.rows[0].name == "Global");
            CHECK(out.record.rows[3].name == "Client 3");
            CHECK(out.record.rows[0].confusion.total() == 9 * 20 + 300);
            CHECK(out.history.size() == 2);
            const auto& c = out.partition_counts;
            if (sc == eval::Scenario::balanced_standard) {
                CHECK(c[0][0] == 40);
            } else {
                CHECK(c[0][0] == 83);
                CHECK(c[2][4] == 15);
                CHECK(c[2][7] == 70);
            }
            const auto again = run_trial(cfg, ds, 0);
            CHECK(again.record.rows[0].confusion == out.record.rows[0].confusion);
            CHECK(again.history.back().global_hash == out.history.back().global_hash);
        }
    }

    TEST_CASE("binary task evaluates two classes") {
        const auto cfg = quick(eval::Scenario::imbalanced_standard, data::Task::binary);
        const auto out = run_trial(cfg, load_dataset(cfg), 0);
        CHECK(out.record.rows[0].confusion.classes() == 2);
        CHECK(out.record.rows[0].confusion.row_sum(0) == 300);
        CHECK(out.record.rows[0].confusion.row_sum(1) == 180);
    }

    TEST_CASE("reports do not depend on the number of jobs") {
        auto cfg = quick(eval::Scenario::imbalanced_weighted);
        cfg.trials = 3;
        const auto ds = load_dataset(cfg);
        const auto a = run_experiment(cfg, ds, 1);
        const auto b = run_experiment(cfg, ds, 3);
        std::ostringstream ja, jb;
        eval::write_machine_report(ja, a.report);
        eval::write_machine_report(jb, b.report);
        CHECK(ja.str() == jb.str());
        CHECK(a.report.trials == 3);
    }

    TEST_CASE("output files") {
        auto cfg = quick(eval::Scenario::balanced_standard);
        cfg.trials = 2;
        const auto dir = fs::temp_directory_path() / "fedra_pipeline_test";
        fs::remove_all(dir);
        const auto result = run_experiment(cfg, load_dataset(cfg), 2);
        write_outputs(cfg, result, dir);
        for (const char* f : {"report.txt", "report.json", "metadata.json", "history/trial_000.csv",
                              "history/trial_001.csv"}) {
            CHECK_MESSAGE(fs::exists(dir / f), f);
        }
        std::ifstream is(dir / "report.json");
        const auto back = eval::read_machine_report(is);
        CHECK(back.trials == 2);
        CHECK(slurp(dir / "metadata.json").find("\"zero_count_policy\"") != std::string::npos);
        fs::remove_all(dir);
    }

    TEST_CASE("a dataset file that is too small is a data error") {
        auto cfg = quick(eval::Scenario::balanced_standard);
        const auto path = fs::temp_directory_path() / "fedra_small.csv";
        {
            std::ofstream os(path);
            os << "f1,f2,f3,f4,f5,f6,f7,f8,f9,f10,f11,f12,f13,f14,f15,family\n";
            os << "1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,Hive\n";
        }
        cfg.data_source = path.string();
        const auto ds = load_dataset(cfg);
        CHECK(ds.size() == 1);
        CHECK_THROWS_AS((void)run_trial(cfg, ds, 0), DataError);
        cfg.data_source = "/nonexistent/data.csv";
        CHECK_THROWS_AS((void)load_dataset(cfg), IoError);
        fs::remove(path);
    }
}

TEST_SUITE("extract") {
    TEST_CASE("fixture directory") {
        const auto r = extract_directory(kFixtures);
        REQUIRE(r.rows.size() == 3);
        REQUIRE(r.rejects.size() == 2);
        // Sorted by path: Benign/ before Hive/.
        CHECK(r.rows[0].family_name == "Benign");
        CHECK(r.rows[1].family_name == "Hive");
        CHECK(r.rows[2].family_name == "Hive");
        CHECK(r.paths[1].find("sample32.exe") != std::string::npos);
        CHECK(r.rows[2].features[13] == double(0x8664));
        CHECK(r.rejects[0].path.find("broken.exe") != std::string::npos);
        CHECK(r.rejects[1].error.find("NotPe") != std::string::npos);

        std::ostringstream os;
        write_rejects(os, r.rejects);
        const auto tsv = os.str();
        CHECK(std::count(tsv.begin(), tsv.end(), '\n') >= 2);
    }

    TEST_CASE("family override and unknown directories") {
        CHECK(extract_directory(kFixtures, "LockBit").rows[0].family_name == "LockBit");
        const auto r = extract_directory(fs::path(kFixtures) / "Hive");
        CHECK(r.rows[0].family_name == "unlabeled");
        CHECK_THROWS_AS((void)extract_directory(fs::path(kFixtures) / "missing"), fs::filesystem_error);
    }
}

TEST_SUITE("ratio printout") {
    TEST_CASE("canonical table") {
        const ExperimentConfig cfg;
        const auto ds = load_dataset(cfg);
        const auto split = data::split_train_test(ds, cfg.split, 1);
        const auto plan = data::partition_canonical_imbalanced(ds, split, 1);
        std::ostringstream os;
        render_ratio_table(os, ds, plan);
        const auto text = os.str();
        CHECK(text.find("3.1923 (83/26)") != std::string::npos);
        CHECK(text.find("113.3333 (340/3)") != std::string::npos);
        CHECK(text.find("6.2963 (170/27)") != std::string::npos);
        CHECK(text.find("with benign 14.1667") != std::string::npos);
    }
}
