#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fedra/data/partition.hpp"
#include "fedra/eval/report.hpp"
#include "fedra/experiment/config.hpp"
#include "fedra/fed/server.hpp"

namespace fedra::experiment {

inline constexpr const char* kVersion = "fedra 0.1.0";

/// Loads the configured data source (a dataset file or the synthetic
/// default), labelled in multiclass space. Throws IoError when the file
/// cannot be opened and DataError when its contents are unusable.
[[nodiscard]] data::Dataset load_dataset(const ExperimentConfig& cfg);

/// Seed of trial `trial`, derived from the experiment seed.
[[nodiscard]] std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial);

struct TrialOutcome {
    eval::TrialRecord record;
    data::Normalizer normalizer;
    std::vector<std::vector<std::size_t>> partition_counts;
    std::vector<fed::RoundRecord> history;
    std::string global_hash;
};

struct ExperimentResult {
    eval::MetricsReport report;
    std::vector<TrialOutcome> trials;
};

/// split -> partition -> normalize -> federate -> evaluate the global model
/// and every client's final local model on the shared test set.
[[nodiscard]] TrialOutcome run_trial(const ExperimentConfig& cfg, const data::Dataset& ds,
                                     std::size_t trial);

/// Runs cfg.trials trials on up to `jobs` threads. Results are collected in
/// trial order, so the outcome does not depend on `jobs`.
[[nodiscard]] ExperimentResult run_experiment(const ExperimentConfig& cfg, const data::Dataset& ds,
                                              std::size_t jobs);

/// Writes report.txt, report.json, metadata.json and history/trial_NNN.csv.
void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& result,
                   const std::filesystem::path& dir);

struct Reject {
    std::string path;
    std::string error;
};

struct ExtractResult {
    data::Dataset rows;
    std::vector<std::string> paths;
    std::vector<Reject> rejects;
};

/// Parses every regular file below `input_dir` (sorted by path). The family
/// column is `family` when given, else the first directory component below
/// `input_dir` if it names a known family, else "unlabeled". Throws
/// std::filesystem::filesystem_error if the directory cannot be read.
[[nodiscard]] ExtractResult extract_directory(const std::filesystem::path& input_dir,
                                              const std::string& family = "");

void write_rejects(std::ostream& os, const std::vector<Reject>& rejects);

/// Per-client ratio table: ransomware-only, with benign, binary; plus the
/// global ratios. Values to four decimals with the exact fraction.
void render_ratio_table(std::ostream& os, const data::Dataset& ds, const data::PartitionPlan& plan);

}  // namespace fedra::experiment
