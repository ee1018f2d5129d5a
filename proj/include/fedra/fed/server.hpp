#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fedra/fed/client.hpp"

namespace fedra::fed {

/// One client's contribution to an aggregation round.
struct WeightedUpdate {
    std::size_t client_id = 0;
    std::size_t samples = 0;
    const nn::ModelParameters* params = nullptr;
};

class AggregationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sample-weighted average sum_i (n_i / N) w_i. Updates are reordered by
/// client id first, so arrival order never changes the result. Evaluated as
/// w_first + sum_i (n_i / N)(w_i - w_first): identical inputs come back
/// unchanged and a single update is returned as is.
[[nodiscard]] nn::ModelParameters fed_avg_aggregate(std::span<const WeightedUpdate> updates);

struct ClientRoundRecord {
    std::size_t client_id = 0;
    double loss_first = 0.0;
    double loss_last = 0.0;
    std::size_t samples = 0;
    double weight = 0.0;
};

struct RoundRecord {
    std::size_t round = 0;
    std::vector<ClientRoundRecord> clients;
    std::string global_hash;
};

struct FederationResult {
    nn::ModelParameters initial;
    nn::ModelParameters global;
    std::vector<RoundRecord> history;
    /// Each client's parameters after its most recent local update (the
    /// initial model for clients that never trained), indexed like the input.
    std::vector<nn::ModelParameters> local_models;
};

/// FedAvg over `rounds`: broadcast, local updates, weighted aggregation.
/// Fails with ClientAbstained if any selected client cannot train.
[[nodiscard]] FederationResult run_federation(std::vector<ClientState>& clients,
                                              std::span<const nn::LayerSpec> architecture,
                                              const TrainingConfig& cfg);

/// Indices (into `clients`) taking part in `round`.
[[nodiscard]] std::vector<std::size_t> select_clients(std::size_t client_count,
                                                      const TrainingConfig& cfg,
                                                      std::size_t round);

/// CSV: round,client_id,local_loss_first,local_loss_last,n_i,weight,global_param_hash
void write_history(std::ostream& os, std::span<const RoundRecord> history);

}  // namespace fedra::fed
