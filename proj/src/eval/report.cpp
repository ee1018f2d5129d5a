#include "fedra/eval/report.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace fedra::eval {

std::string_view to_string(Scenario s) {
    switch (s) {
        case Scenario::balanced_standard: return "balanced_standard";
        case Scenario::imbalanced_standard: return "imbalanced_standard";
        case Scenario::imbalanced_weighted: return "imbalanced_weighted";
    }
    return "unknown";
}

Scenario scenario_from_string(std::string_view name) {
    if (name == "balanced_standard") return Scenario::balanced_standard;
    if (name == "imbalanced_standard") return Scenario::imbalanced_standard;
    if (name == "imbalanced_weighted") return Scenario::imbalanced_weighted;
    throw std::invalid_argument("unknown scenario '" + std::string(name) + "'");
}

std::string_view scenario_title(Scenario s) {
    switch (s) {
        case Scenario::balanced_standard: return "Baseline FedAvg (balanced dataset)";
        case Scenario::imbalanced_standard: return "Baseline FedAvg (imbalanced dataset)";
        case Scenario::imbalanced_weighted: return "Weighted cross entropy loss (imbalanced dataset)";
    }
    return "";
}

MetricsReport single_trial_report(Scenario scenario, data::Task task, TrialRecord record) {
    MetricsReport r;
    r.scenario = scenario;
    r.task = task;
    r.trials = 1;
    for (const auto& row : record.rows) {
        r.row_names.push_back(row.name);
        r.mean.push_back(row.metrics);
    }
    r.per_trial.push_back(std::move(record));
    return r;
}

MetricsReport aggregate_trials(const std::vector<MetricsReport>& reports) {
    if (reports.empty()) throw std::invalid_argument("no reports to aggregate");
    MetricsReport out;
    out.scenario = reports.front().scenario;
    out.task = reports.front().task;
    out.row_names = reports.front().row_names;
    for (const auto& r : reports) {
        if (r.scenario != out.scenario) {
            throw std::invalid_argument("cannot aggregate " + std::string(to_string(r.scenario)) +
                                        " with " + std::string(to_string(out.scenario)));
        }
        if (r.task != out.task) throw std::invalid_argument("cannot aggregate different tasks");
        if (r.row_names != out.row_names) {
            throw std::invalid_argument("cannot aggregate reports with different model rows");
        }
        out.per_trial.insert(out.per_trial.end(), r.per_trial.begin(), r.per_trial.end());
    }
    out.trials = out.per_trial.size();
    out.mean.assign(out.row_names.size(), Metrics{});
    for (const auto& t : out.per_trial) {
        if (t.rows.size() != out.row_names.size()) {
            throw std::invalid_argument("trial record has the wrong number of rows");
        }
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            out.mean[i].accuracy += t.rows[i].metrics.accuracy;
            out.mean[i].precision += t.rows[i].metrics.precision;
            out.mean[i].recall += t.rows[i].metrics.recall;
            out.mean[i].f1 += t.rows[i].metrics.f1;
        }
    }
    const auto n = static_cast<double>(out.trials);
    for (auto& m : out.mean) {
        m.accuracy /= n;
        m.precision /= n;
        m.recall /= n;
        m.f1 /= n;
    }
    return out;
}

namespace {

std::string percent(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%6.2f%%", 100.0 * v);
    return buf;
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

}  // namespace

void render_table(std::ostream& os, const MetricsReport& report) {
    os << scenario_title(report.scenario) << "  [" << to_string(report.scenario) << "]\n";
    os << "task: " << data::to_string(report.task) << ", trials: " << report.trials << '\n';
    os << "precision/recall/F1 are macro averages over classes; client rows are each\n"
          "client's parameters after its final local update (before the last aggregation)\n";
    os << pad("", 10) << "   Acc.      Prec.     Recall    F1\n";
    for (std::size_t i = 0; i < report.row_names.size(); ++i) {
        const auto& m = report.mean[i];
        os << pad(report.row_names[i], 10) << "  " << percent(m.accuracy) << "   "
           << percent(m.precision) << "   " << percent(m.recall) << "   " << percent(m.f1) << '\n';
    }
}

void write_machine_report(std::ostream& os, const MetricsReport& report) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["format"] = "fedra-metrics-report";
    j["version"] = 1;
    j["scenario"] = std::string(to_string(report.scenario));
    j["task"] = std::string(data::to_string(report.task));
    j["averaging"] = "macro";
    j["trials"] = report.trials;
    j["rows"] = report.row_names;
    ordered_json mean = ordered_json::array();
    for (std::size_t i = 0; i < report.mean.size(); ++i) {
        const auto& m = report.mean[i];
        mean.push_back({{"model", report.row_names[i]},
                        {"accuracy", m.accuracy},
                        {"precision", m.precision},
                        {"recall", m.recall},
                        {"f1", m.f1}});
    }
    j["mean"] = mean;
    ordered_json trials = ordered_json::array();
    for (const auto& t : report.per_trial) {
        ordered_json rows = ordered_json::array();
        for (const auto& r : t.rows) {
            rows.push_back({{"model", r.name},
                            {"accuracy", r.metrics.accuracy},
                            {"precision", r.metrics.precision},
                            {"recall", r.metrics.recall},
                            {"f1", r.metrics.f1},
                            {"classes", r.confusion.classes()},
                            {"confusion", r.confusion.counts()}});
        }
        trials.push_back({{"trial", t.trial}, {"seed", t.seed}, {"rows", rows}});
    }
    j["per_trial"] = trials;
    os << j.dump(1) << '\n';
}

MetricsReport read_machine_report(std::istream& is) {
    const auto j = nlohmann::json::parse(is);
    if (j.value("format", "") != "fedra-metrics-report") {
        throw std::runtime_error("not a metrics report");
    }
    MetricsReport r;
    r.scenario = scenario_from_string(j.at("scenario").get<std::string>());
    r.task = data::task_from_string(j.at("task").get<std::string>());
    r.trials = j.at("trials").get<std::size_t>();
    r.row_names = j.at("rows").get<std::vector<std::string>>();
    for (const auto& m : j.at("mean")) {
        r.mean.push_back({m.at("accuracy").get<double>(), m.at("precision").get<double>(),
                          m.at("recall").get<double>(), m.at("f1").get<double>()});
    }
    for (const auto& t : j.at("per_trial")) {
        TrialRecord rec;
        rec.trial = t.at("trial").get<std::size_t>();
        rec.seed = t.at("seed").get<std::uint64_t>();
        for (const auto& row : t.at("rows")) {
            ModelRow mr;
            mr.name = row.at("model").get<std::string>();
            mr.metrics = {row.at("accuracy").get<double>(), row.at("precision").get<double>(),
                          row.at("recall").get<double>(), row.at("f1").get<double>()};
            mr.confusion = ConfusionMatrix(row.at("classes").get<std::size_t>(),
                                           row.at("confusion").get<std::vector<std::uint64_t>>());
            rec.rows.push_back(std::move(mr));
        }
        r.per_trial.push_back(std::move(rec));
    }
    return r;
}

}  // namespace fedra::eval
