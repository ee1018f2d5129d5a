#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fedra/data/dataset.hpp"
#include "fedra/nn/model.hpp"
#include "fedra/nn/network.hpp"

namespace fedra::fed {

enum class LossMode { standard, weighted };

[[nodiscard]] std::string_view to_string(LossMode m);
[[nodiscard]] LossMode loss_mode_from_string(std::string_view name);

/// What a client does with a class it holds no samples of.
enum class ZeroCountPolicy {
    cap,      ///< weight = max count, as if the class had one sample
    exclude,  ///< weight = 0, class drops out of the local loss
};

[[nodiscard]] std::string_view to_string(ZeroCountPolicy p);
[[nodiscard]] ZeroCountPolicy zero_count_policy_from_string(std::string_view name);

struct TrainingConfig {
    std::size_t rounds = 30;
    std::size_t epochs = 5;
    std::size_t batch_size = 32;
    double learning_rate = 0.01;
    LossMode loss_mode = LossMode::standard;
    std::uint64_t seed = 0;
    /// Fraction of clients selected per round; 1.0 selects every client.
    double client_fraction = 1.0;
    ZeroCountPolicy zero_count_policy = ZeroCountPolicy::cap;
    /// Run client updates on separate threads within a round.
    bool parallel_clients = false;

    /// Throws std::invalid_argument on E, batch size or learning rate out of range.
    void validate() const;
};

/// Inverse class frequency weights: alpha_j = max_q(n_q) / n_j.
[[nodiscard]] nn::ClassWeightVector compute_class_weights(
    std::span<const std::size_t> class_counts, ZeroCountPolicy policy = ZeroCountPolicy::cap);

/// Raised when a client cannot take part in a round.
class ClientAbstained : public std::runtime_error {
public:
    ClientAbstained(std::size_t client_id, const std::string& why)
        : std::runtime_error("client " + std::to_string(client_id) + " abstained: " + why),
          client_id_(client_id) {}
    [[nodiscard]] std::size_t client_id() const noexcept { return client_id_; }

private:
    std::size_t client_id_;
};

/// One client site: its private samples and its current local model.
class ClientState {
public:
    /// `local` labels must already be in the task's label space.
    ClientState(std::size_t client_id, const data::Dataset& local, std::size_t classes,
                std::uint64_t rng_seed);

    [[nodiscard]] std::size_t client_id() const noexcept { return client_id_; }
    [[nodiscard]] std::size_t sample_count() const noexcept { return labels_.size(); }
    [[nodiscard]] std::size_t classes() const noexcept { return class_counts_.size(); }
    [[nodiscard]] const std::vector<std::size_t>& class_counts() const noexcept { return class_counts_; }
    [[nodiscard]] const nn::Matrix& features() const noexcept { return features_; }
    [[nodiscard]] const std::vector<std::size_t>& labels() const noexcept { return labels_; }
    [[nodiscard]] std::uint64_t rng_seed() const noexcept { return rng_seed_; }

    [[nodiscard]] const nn::ModelParameters& model() const noexcept { return model_; }
    void set_model(nn::ModelParameters m) { model_ = std::move(m); }

private:
    std::size_t client_id_;
    nn::Matrix features_;
    std::vector<std::size_t> labels_;
    std::vector<std::size_t> class_counts_;
    std::uint64_t rng_seed_;
    nn::ModelParameters model_;
};

struct ClientUpdate {
    std::size_t client_id = 0;
    std::size_t samples = 0;
    nn::ModelParameters params;
    /// Loss of the first and of the last mini-batch step, before each update.
    double loss_first = 0.0;
    double loss_last = 0.0;
    nn::ClassWeightVector class_weights;
};

/// Local training for one round: adopt `incoming`, shuffle the local data
/// once with the (seed, client, round) stream, cut it into
/// ceil(n / batch_size) batches and run `epochs` passes of mini-batch
/// gradient descent over them.
[[nodiscard]] ClientUpdate client_update(ClientState& state, const nn::ModelParameters& incoming,
                                         const TrainingConfig& cfg, std::size_t round);

}  // namespace fedra::fed
