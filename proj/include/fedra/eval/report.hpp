#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "fedra/data/dataset.hpp"
#include "fedra/eval/metrics.hpp"

namespace fedra::eval {

enum class Scenario { balanced_standard, imbalanced_standard, imbalanced_weighted };

[[nodiscard]] std::string_view to_string(Scenario s);
[[nodiscard]] Scenario scenario_from_string(std::string_view name);
/// Table heading, e.g. "Baseline FedAvg (balanced dataset)".
[[nodiscard]] std::string_view scenario_title(Scenario s);

/// One evaluated model: "Global" or "Client k".
struct ModelRow {
    std::string name;
    Metrics metrics;
    ConfusionMatrix confusion;
};

struct TrialRecord {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    std::vector<ModelRow> rows;
};

/// Mean metrics per model row plus the raw per-trial records.
struct MetricsReport {
    Scenario scenario = Scenario::balanced_standard;
    data::Task task = data::Task::multiclass;
    std::size_t trials = 0;
    std::vector<std::string> row_names;
    std::vector<Metrics> mean;
    std::vector<TrialRecord> per_trial;
};

/// Report for a single trial.
[[nodiscard]] MetricsReport single_trial_report(Scenario scenario, data::Task task,
                                                TrialRecord record);

/// Arithmetic mean per cell over all trials of all inputs, keeping every
/// per-trial record in input order. Throws std::invalid_argument if the
/// inputs disagree on scenario, task or row layout.
[[nodiscard]] MetricsReport aggregate_trials(const std::vector<MetricsReport>& reports);

/// Human-readable table: one row per model, percentages to two decimals.
void render_table(std::ostream& os, const MetricsReport& report);

/// Machine-readable JSON with per-trial raw metrics and confusion matrices.
void write_machine_report(std::ostream& os, const MetricsReport& report);
[[nodiscard]] MetricsReport read_machine_report(std::istream& is);

}  // namespace fedra::eval
