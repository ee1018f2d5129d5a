#include "fedra/experiment/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <numeric>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "fedra/data/synthetic.hpp"
#include "fedra/eval/metrics.hpp"
#include "fedra/pe/pe_parser.hpp"
#include "fedra/rng.hpp"

namespace fedra::experiment {

namespace fs = std::filesystem;

data::Dataset load_dataset(const ExperimentConfig& cfg) {
    if (cfg.data_source != kSyntheticDefault && !std::ifstream(cfg.data_source)) {
        throw IoError("cannot open dataset " + cfg.data_source);
    }
    try {
        if (cfg.data_source == kSyntheticDefault) {
            const auto spec = data::default_synthetic_spec(
                cfg.synthetic.separation, cfg.synthetic.benign_separation,
                cfg.synthetic.family_count, cfg.synthetic.benign_count);
            return data::generate_synthetic(spec, cfg.seed);
        }
        return data::read_dataset(cfg.data_source, data::ClassRegistry::multiclass());
    } catch (const std::exception& e) {
        throw DataError(e.what());
    }
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) {
    auto rng = make_stream(seed, {stream_tag::trial, trial});
    return rng();
}

TrialOutcome run_trial(const ExperimentConfig& cfg, const data::Dataset& ds, std::size_t trial) {
    const std::uint64_t seed = trial_seed(cfg.seed, trial);
    const auto& registry = data::ClassRegistry::for_task(cfg.task);

    data::TrainTestSplit split;
    data::PartitionPlan plan;
    try {
        split = data::split_train_test(ds, cfg.split, seed);
        plan = data::make_partition(cfg.partition_scheme(), ds, split, cfg.clients, seed);
    } catch (const std::invalid_argument& e) {
        throw DataError(e.what());
    }

    TrialOutcome out;
    out.record.trial = trial;
    out.record.seed = seed;
    out.partition_counts = plan.counts();
    out.normalizer = data::Normalizer::fit(data::select(ds, split.train));

    std::vector<fed::ClientState> clients;
    for (std::size_t k = 0; k < plan.clients(); ++k) {
        auto local = data::relabel(data::materialize_client(ds, plan, k), registry);
        out.normalizer.apply(local);
        clients.emplace_back(k + 1, local, registry.size(), seed);
    }
    auto test = data::relabel(data::materialize_test(ds, plan), registry);
    out.normalizer.apply(test);

    auto training = cfg.training;
    training.seed = seed;
    const auto fed_result = fed::run_federation(clients, cfg.resolved_architecture(), training);
    out.history = fed_result.history;
    out.global_hash = nn::parameter_hash(fed_result.global);

    auto add_row = [&](std::string name, const nn::ModelParameters& model) {
        auto cm = eval::evaluate(model, test, registry.size());
        out.record.rows.push_back({std::move(name), eval::metrics_from_confusion(cm), std::move(cm)});
    };
    add_row("Global", fed_result.global);
    for (std::size_t k = 0; k < fed_result.local_models.size(); ++k) {
        add_row("Client " + std::to_string(k + 1), fed_result.local_models[k]);
    }
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const data::Dataset& ds,
                                std::size_t jobs) {
    cfg.validate();
    ExperimentResult result;
    result.trials.resize(cfg.trials);
    std::vector<std::exception_ptr> errors(cfg.trials);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t = next++; t < cfg.trials; t = next++) {
            try {
                result.trials[t] = run_trial(cfg, ds, t);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::clamp<std::size_t>(jobs, 1, cfg.trials);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    std::vector<eval::MetricsReport> per_trial;
    per_trial.reserve(cfg.trials);
    for (const auto& t : result.trials) {
        per_trial.push_back(eval::single_trial_report(cfg.scenario, cfg.task, t.record));
    }
    result.report = eval::aggregate_trials(per_trial);
    return result;
}

namespace {

std::ofstream open_out(const fs::path& p) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw IoError("cannot write " + p.string());
    return os;
}

}  // namespace

void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& result, const fs::path& dir) {
    fs::create_directories(dir / "history");
    {
        auto os = open_out(dir / "report.txt");
        eval::render_table(os, result.report);
    }
    {
        auto os = open_out(dir / "report.json");
        eval::write_machine_report(os, result.report);
    }
    {
        using nlohmann::ordered_json;
        ordered_json meta;
        meta["software"] = kVersion;
        meta["config"] = ordered_json::parse(config_to_json(cfg));
        meta["canonical_imbalanced_counts"] = data::canonical_imbalanced_counts();
        ordered_json trials = ordered_json::array();
        for (const auto& t : result.trials) {
            trials.push_back({{"trial", t.record.trial},
                              {"seed", t.record.seed},
                              {"partition_counts", t.partition_counts},
                              {"normalization_mean", t.normalizer.mean},
                              {"normalization_stddev", t.normalizer.stddev},
                              {"final_global_hash", t.global_hash}});
        }
        meta["trials"] = trials;
        auto os = open_out(dir / "metadata.json");
        os << meta.dump(1) << '\n';
    }
    for (const auto& t : result.trials) {
        char name[32];
        std::snprintf(name, sizeof name, "trial_%03zu.csv", t.record.trial);
        auto os = open_out(dir / "history" / name);
        fed::write_history(os, t.history);
    }
}

ExtractResult extract_directory(const fs::path& input_dir, const std::string& family) {
    if (!fs::is_directory(input_dir)) {
        throw fs::filesystem_error("not a readable directory", input_dir,
                                   std::make_error_code(std::errc::not_a_directory));
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(input_dir)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    ExtractResult out;
    for (const auto& file : files) {
        std::string label = family;
        if (label.empty()) {
            const auto rel = fs::relative(file, input_dir);
            label = "unlabeled";
            if (std::distance(rel.begin(), rel.end()) > 1) {
                try {
                    label = data::canonical_family(rel.begin()->string());
                } catch (const std::invalid_argument&) {
                }
            }
        }
        try {
            const auto bytes = pe::read_file_bytes(file.string());
            auto fv = pe::to_feature_vector(pe::parse_pe(bytes));
            fv.family_name = label;
            out.rows.push_back(std::move(fv));
            out.paths.push_back(file.string());
        } catch (const std::exception& e) {
            out.rejects.push_back({file.string(), e.what()});
        }
    }
    return out;
}

void write_rejects(std::ostream& os, const std::vector<Reject>& rejects) {
    os << "path\terror\n";
    for (const auto& r : rejects) os << r.path << '\t' << r.error << '\n';
}

namespace {

std::string fraction(std::size_t num, std::size_t den) {
    const auto g = std::gcd(num, den);
    return std::to_string(num / g) + "/" + std::to_string(den / g);
}

std::string ratio_cell(std::span<const std::size_t> counts) {
    const auto [mn, mx] = std::minmax_element(counts.begin(), counts.end());
    char buf[64];
    if (*mn == 0) return "undefined";
    std::snprintf(buf, sizeof buf, "%.4f (%s)",
                  static_cast<double>(*mx) / static_cast<double>(*mn), fraction(*mx, *mn).c_str());
    return buf;
}

}  // namespace

void render_ratio_table(std::ostream& os, const data::Dataset& ds, const data::PartitionPlan& plan) {
    os << "imbalance ratio (max/min class count) per client\n";
    os << "client  ransomware-only          with-benign              binary\n";
    for (std::size_t k = 0; k < plan.clients(); ++k) {
        const auto local = data::materialize_client(ds, plan, k);
        auto cell = [&](data::RatioView v) {
            std::string s = ratio_cell(data::client_counts(local, v));
            s.resize(std::max<std::size_t>(s.size(), 23), ' ');
            return s;
        };
        os << (k + 1) << "       " << cell(data::RatioView::ransomware_only) << "  "
           << cell(data::RatioView::with_benign) << "  "
           << ratio_cell(data::client_counts(local, data::RatioView::binary)) << '\n';
    }
    auto global = [&](bool benign) -> std::string {
        try {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.4f", data::global_imbalance_ratio(plan, benign));
            return buf;
        } catch (const std::domain_error&) {
            return "undefined";
        }
    };
    os << "global ratio: ransomware-only " << global(false) << ", with benign " << global(true) << '\n';
}

}  // namespace fedra::experiment
