#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "fedra/data/partition.hpp"
#include "fedra/data/synthetic.hpp"
#include "fedra/eval/report.hpp"
#include "fedra/experiment/config.hpp"
#include "fedra/experiment/pipeline.hpp"

using namespace fedra;
using namespace fedra::experiment;
namespace fs = std::filesystem;

namespace {

enum Exit : int { kOk = 0, kIo = 1, kConfig = 2, kData = 3, kRuntime = 4 };

struct CommonOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::size_t jobs = 0;
    std::string output;
};

ExperimentConfig resolve(const CommonOptions& o) {
    ExperimentConfig cfg;
    if (!o.config.empty()) cfg = load_config(o.config);
    if (o.seed) cfg.seed = *o.seed;
    if (o.trials) cfg.trials = *o.trials;
    cfg.validate();
    return cfg;
}

std::ofstream open_out(const fs::path& p) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream os(p, std::ios::binary);
    if (!os) throw IoError("cannot write " + p.string());
    return os;
}

int cmd_extract(const std::string& input, const std::string& family, const std::string& output) {
    const auto result = extract_directory(input, family);
    {
        auto os = open_out(output);
        data::write_dataset(os, result.rows);
    }
    const std::string rejects_path = output + ".rejects.tsv";
    {
        auto os = open_out(rejects_path);
        write_rejects(os, result.rejects);
    }
    std::cout << result.rows.size() << " rows written to " << output << ", " << result.rejects.size()
              << " rejected (" << rejects_path << ")\n";
    return kOk;
}

int cmd_synth(const CommonOptions& o) {
    auto cfg = resolve(o);
    cfg.data_source = kSyntheticDefault;
    const auto ds = load_dataset(cfg);
    const std::string path = o.output.empty() ? "synthetic.csv" : o.output;
    auto os = open_out(path);
    data::write_dataset(os, ds);
    std::cout << ds.size() << " rows written to " << path << '\n';
    return kOk;
}

int cmd_partition(const CommonOptions& o) {
    const auto cfg = resolve(o);
    const auto ds = load_dataset(cfg);
    data::PartitionPlan plan;
    try {
        const auto split = data::split_train_test(ds, cfg.split, cfg.seed);
        plan = data::make_partition(cfg.partition_scheme(), ds, split, cfg.clients, cfg.seed);
        data::check_plan(ds, plan);
    } catch (const std::invalid_argument& e) {
        throw DataError(e.what());
    }
    std::cout << "scheme " << data::to_string(plan.scheme) << ", seed " << plan.seed << ", "
              << plan.clients() << " clients\n";
    const auto& names = data::ClassRegistry::multiclass().names();
    const auto counts = plan.counts();
    std::printf("%-12s", "class");
    for (std::size_t k = 0; k < plan.clients(); ++k) std::printf("  client %-3zu", k + 1);
    std::printf("\n");
    for (std::size_t c = 0; c < names.size(); ++c) {
        std::printf("%-12s", names[c].c_str());
        for (std::size_t k = 0; k < plan.clients(); ++k) std::printf("  %10zu", counts[k][c]);
        std::printf("\n");
    }
    std::fflush(stdout);
    render_ratio_table(std::cout, ds, plan);
    for (const auto& r : plan.remainder_log) std::cout << "extra sample: " << r << '\n';
    if (!o.output.empty()) {
        auto os = open_out(o.output);
        data::write_plan(os, ds, plan);
        std::cout << "plan written to " << o.output << '\n';
    }
    return kOk;
}

int cmd_train(const CommonOptions& o) {
    auto cfg = resolve(o);
    if (!o.output.empty()) cfg.output_dir = o.output;
    const std::size_t jobs = o.jobs ? o.jobs : std::max(1u, std::thread::hardware_concurrency());
    const auto ds = load_dataset(cfg);
    const auto result = run_experiment(cfg, ds, jobs);
    write_outputs(cfg, result, cfg.output_dir);
    eval::render_table(std::cout, result.report);
    std::cout << "outputs written to " << cfg.output_dir << '\n';
    return kOk;
}

int cmd_report(const std::vector<std::string>& inputs) {
    std::vector<eval::MetricsReport> reports;
    for (const auto& path : inputs) {
        std::ifstream is(path);
        if (!is) throw IoError("cannot open report " + path);
        try {
            reports.push_back(eval::read_machine_report(is));
        } catch (const std::exception& e) {
            throw DataError(path + ": " + e.what());
        }
    }
    try {
        eval::render_table(std::cout, reports.size() == 1 ? reports.front() : eval::aggregate_trials(reports));
    } catch (const std::invalid_argument& e) {
        throw DataError(e.what());
    }
    return kOk;
}

void add_common(CLI::App* cmd, CommonOptions& o, bool trials, bool jobs) {
    cmd->add_option("--config", o.config, "JSON experiment config");
    cmd->add_option("--seed", o.seed, "Override the config seed");
    if (trials) cmd->add_option("--trials", o.trials, "Override the number of trials");
    if (jobs) cmd->add_option("--jobs", o.jobs, "Trials run in parallel (default: all cores)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Federated training with imbalance-aware loss for ransomware classification"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    CommonOptions opts;

    std::string extract_input, extract_family, extract_output = "features.csv";
    auto* extract = app.add_subcommand("extract", "Extract header features from a directory of executables");
    extract->add_option("input_dir", extract_input, "Directory to scan")->required();
    extract->add_option("--family", extract_family, "Family for every row (default: from subdirectory)");
    extract->add_option("--output", extract_output, "Dataset CSV to write");

    auto* synth = app.add_subcommand("synth", "Write the synthetic stand-in dataset");
    add_common(synth, opts, false, false);
    synth->add_option("--output", opts.output, "Dataset CSV to write");

    auto* partition = app.add_subcommand("partition", "Print the client partition and imbalance ratios");
    add_common(partition, opts, false, false);
    partition->add_option("--output", opts.output, "Also write the plan as JSON");

    auto* train = app.add_subcommand("train", "Run federated training trials and write reports");
    add_common(train, opts, true, true);
    train->add_option("--output", opts.output, "Output directory (overrides output_dir)");

    std::vector<std::string> report_inputs;
    auto* report = app.add_subcommand("report", "Render machine reports as tables");
    report->add_option("reports", report_inputs, "report.json files; several are pooled")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*extract) return cmd_extract(extract_input, extract_family, extract_output);
        if (*synth) return cmd_synth(opts);
        if (*partition) return cmd_partition(opts);
        if (*train) return cmd_train(opts);
        if (*report) return cmd_report(report_inputs);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kRuntime;
}
