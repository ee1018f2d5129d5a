#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "fedra/data/partition.hpp"
#include "fedra/eval/report.hpp"
#include "fedra/fed/client.hpp"
#include "fedra/nn/model.hpp"

namespace fedra::experiment {

/// Invalid or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data that cannot be used (unreadable, malformed, too small).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A file or directory that cannot be read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kSyntheticDefault = "synthetic:default";

struct SyntheticOptions {
    double separation = 3.0;
    double benign_separation = 3.0;
    std::size_t family_count = 140;
    std::size_t benign_count = 2000;
};

struct ExperimentConfig {
    std::uint64_t seed = 1;
    std::size_t trials = 1;
    data::Task task = data::Task::multiclass;
    eval::Scenario scenario = eval::Scenario::balanced_standard;
    std::size_t clients = 3;
    fed::TrainingConfig training;
    /// Empty means 15 -> 64 -> 32 -> classes.
    std::vector<nn::LayerSpec> architecture;
    std::string data_source = kSyntheticDefault;
    SyntheticOptions synthetic;
    data::SplitSpec split;
    std::string output_dir = "out";

    /// Architecture actually used for the configured task.
    [[nodiscard]] std::vector<nn::LayerSpec> resolved_architecture() const;
    [[nodiscard]] data::PartitionScheme partition_scheme() const;

    /// Cross-field checks. Throws ConfigError.
    void validate() const;
};

/// Parses a JSON config document. Every key is optional; unknown keys and
/// type mismatches are ConfigError. `training.loss_mode`, when omitted,
/// follows the scenario.
[[nodiscard]] ExperimentConfig parse_config(std::istream& is);
[[nodiscard]] ExperimentConfig load_config(const std::string& path);

/// JSON form of the full config (round-trips through parse_config).
[[nodiscard]] std::string config_to_json(const ExperimentConfig& cfg);

}  // namespace fedra::experiment
