#include "fedra/experiment/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

namespace fedra::experiment {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<nn::LayerSpec> ExperimentConfig::resolved_architecture() const {
    const std::size_t classes = data::ClassRegistry::for_task(task).size();
    if (architecture.empty()) return nn::default_architecture(data::kFeatureCount, classes);
    return architecture;
}

data::PartitionScheme ExperimentConfig::partition_scheme() const {
    return scenario == eval::Scenario::balanced_standard ? data::PartitionScheme::balanced
                                                         : data::PartitionScheme::canonical_imbalanced;
}

void ExperimentConfig::validate() const {
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (clients < 1) throw ConfigError("clients must be >= 1");
    const bool wants_weighted = scenario == eval::Scenario::imbalanced_weighted;
    if (wants_weighted != (training.loss_mode == fed::LossMode::weighted)) {
        throw ConfigError("scenario " + std::string(eval::to_string(scenario)) +
                          " requires loss_mode " + (wants_weighted ? "weighted" : "standard"));
    }
    if (partition_scheme() == data::PartitionScheme::canonical_imbalanced && clients != 3) {
        throw ConfigError("imbalanced scenarios use the fixed 3-client layout");
    }
    try {
        training.validate();
        const auto arch = resolved_architecture();
        nn::validate_architecture(arch);
        const std::size_t classes = data::ClassRegistry::for_task(task).size();
        if (arch.front().input_dim != data::kFeatureCount) {
            throw ConfigError("architecture input must be " + std::to_string(data::kFeatureCount));
        }
        if (arch.back().output_dim != classes) {
            throw ConfigError("architecture output must be " + std::to_string(classes) +
                              " for task " + std::string(data::to_string(task)));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    if (!(synthetic.separation >= 3.0) || !(synthetic.benign_separation >= synthetic.separation)) {
        throw ConfigError("synthetic class means must be at least 3 stddev apart "
                          "(separation >= 3, benign_separation >= separation)");
    }
}

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, _] : obj.items()) {
        if (allowed.count(key) == 0) {
            throw ConfigError("unknown key '" + (where.empty() ? key : where + "." + key) + "'");
        }
    }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("bad value for '" + where + key + "': " + e.what());
    }
}

}  // namespace

ExperimentConfig parse_config(std::istream& is) {
    json j;
    try {
        j = json::parse(is);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    reject_unknown(j,
                   {"seed", "trials", "task", "scenario", "clients", "training", "architecture",
                    "data_source", "synthetic", "split", "output_dir"},
                   "");
    ExperimentConfig cfg;
    read(j, "seed", cfg.seed, "");
    read(j, "trials", cfg.trials, "");
    read(j, "clients", cfg.clients, "");
    read(j, "data_source", cfg.data_source, "");
    read(j, "output_dir", cfg.output_dir, "");
    try {
        if (j.contains("task")) cfg.task = data::task_from_string(j.at("task").get<std::string>());
        if (j.contains("scenario")) {
            cfg.scenario = eval::scenario_from_string(j.at("scenario").get<std::string>());
        }
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    cfg.training.loss_mode = cfg.scenario == eval::Scenario::imbalanced_weighted
                                 ? fed::LossMode::weighted
                                 : fed::LossMode::standard;
    if (j.contains("training")) {
        const auto& t = j.at("training");
        reject_unknown(t,
                       {"rounds", "epochs", "batch_size", "learning_rate", "loss_mode",
                        "client_fraction", "zero_count_policy", "parallel_clients"},
                       "training");
        read(t, "rounds", cfg.training.rounds, "training.");
        read(t, "epochs", cfg.training.epochs, "training.");
        read(t, "batch_size", cfg.training.batch_size, "training.");
        read(t, "learning_rate", cfg.training.learning_rate, "training.");
        read(t, "client_fraction", cfg.training.client_fraction, "training.");
        read(t, "parallel_clients", cfg.training.parallel_clients, "training.");
        try {
            if (t.contains("loss_mode")) {
                cfg.training.loss_mode = fed::loss_mode_from_string(t.at("loss_mode").get<std::string>());
            }
            if (t.contains("zero_count_policy")) {
                cfg.training.zero_count_policy =
                    fed::zero_count_policy_from_string(t.at("zero_count_policy").get<std::string>());
            }
        } catch (const std::exception& e) {
            throw ConfigError(e.what());
        }
    }
    if (j.contains("architecture")) {
        const auto& a = j.at("architecture");
        if (!a.is_array()) throw ConfigError("architecture must be a list of layers");
        for (const auto& layer : a) {
            reject_unknown(layer, {"input_dim", "output_dim", "activation"}, "architecture[]");
            nn::LayerSpec s;
            read(layer, "input_dim", s.input_dim, "architecture[].");
            read(layer, "output_dim", s.output_dim, "architecture[].");
            try {
                if (layer.contains("activation")) {
                    s.activation = nn::activation_from_string(layer.at("activation").get<std::string>());
                }
            } catch (const std::exception& e) {
                throw ConfigError(e.what());
            }
            cfg.architecture.push_back(s);
        }
    }
    if (j.contains("synthetic")) {
        const auto& s = j.at("synthetic");
        reject_unknown(s, {"separation", "benign_separation", "family_count", "benign_count"},
                       "synthetic");
        read(s, "separation", cfg.synthetic.separation, "synthetic.");
        read(s, "benign_separation", cfg.synthetic.benign_separation, "synthetic.");
        read(s, "family_count", cfg.synthetic.family_count, "synthetic.");
        read(s, "benign_count", cfg.synthetic.benign_count, "synthetic.");
    }
    if (j.contains("split")) {
        const auto& s = j.at("split");
        reject_unknown(s, {"family_test", "family_train", "benign_test", "benign_train"}, "split");
        read(s, "family_test", cfg.split.family_test, "split.");
        read(s, "family_train", cfg.split.family_train, "split.");
        read(s, "benign_test", cfg.split.benign_test, "split.");
        read(s, "benign_train", cfg.split.benign_train, "split.");
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config " + path);
    return parse_config(is);
}

std::string config_to_json(const ExperimentConfig& cfg) {
    ordered_json j;
    j["seed"] = cfg.seed;
    j["trials"] = cfg.trials;
    j["task"] = std::string(data::to_string(cfg.task));
    j["scenario"] = std::string(eval::to_string(cfg.scenario));
    j["clients"] = cfg.clients;
    j["training"] = {{"rounds", cfg.training.rounds},
                     {"epochs", cfg.training.epochs},
                     {"batch_size", cfg.training.batch_size},
                     {"learning_rate", cfg.training.learning_rate},
                     {"loss_mode", std::string(fed::to_string(cfg.training.loss_mode))},
                     {"client_fraction", cfg.training.client_fraction},
                     {"zero_count_policy", std::string(fed::to_string(cfg.training.zero_count_policy))},
                     {"parallel_clients", cfg.training.parallel_clients}};
    ordered_json arch = ordered_json::array();
    for (const auto& l : cfg.resolved_architecture()) {
        arch.push_back({{"input_dim", l.input_dim},
                        {"output_dim", l.output_dim},
                        {"activation", std::string(nn::to_string(l.activation))}});
    }
    j["architecture"] = arch;
    j["data_source"] = cfg.data_source;
    j["synthetic"] = {{"separation", cfg.synthetic.separation},
                      {"benign_separation", cfg.synthetic.benign_separation},
                      {"family_count", cfg.synthetic.family_count},
                      {"benign_count", cfg.synthetic.benign_count}};
    j["split"] = {{"family_test", cfg.split.family_test},
                  {"family_train", cfg.split.family_train},
                  {"benign_test", cfg.split.benign_test},
                  {"benign_train", cfg.split.benign_train}};
    j["output_dir"] = cfg.output_dir;
    return j.dump(1);
}

}  // namespace fedra::experiment
