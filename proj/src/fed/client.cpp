#include "fedra/fed/client.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fedra/rng.hpp"

namespace fedra::fed {

std::string_view to_string(LossMode m) {
    return m == LossMode::weighted ? "weighted" : "standard";
}

LossMode loss_mode_from_string(std::string_view name) {
    if (name == "standard") return LossMode::standard;
    if (name == "weighted") return LossMode::weighted;
    throw std::invalid_argument("unknown loss mode '" + std::string(name) + "'");
}

std::string_view to_string(ZeroCountPolicy p) {
    return p == ZeroCountPolicy::exclude ? "exclude" : "cap";
}

ZeroCountPolicy zero_count_policy_from_string(std::string_view name) {
    if (name == "cap") return ZeroCountPolicy::cap;
    if (name == "exclude") return ZeroCountPolicy::exclude;
    throw std::invalid_argument("unknown zero-count policy '" + std::string(name) + "'");
}

void TrainingConfig::validate() const {
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw std::invalid_argument("learning_rate must be finite and non-negative");
    }
    if (!(client_fraction > 0.0 && client_fraction <= 1.0)) {
        throw std::invalid_argument("client_fraction must lie in (0, 1]");
    }
}

nn::ClassWeightVector compute_class_weights(std::span<const std::size_t> class_counts,
                                            ZeroCountPolicy policy) {
    if (class_counts.empty()) throw std::invalid_argument("no classes to weight");
    const std::size_t max_count = *std::max_element(class_counts.begin(), class_counts.end());
    if (max_count == 0) throw std::invalid_argument("every class count is zero");
    nn::ClassWeightVector out;
    out.weights.reserve(class_counts.size());
    const auto mx = static_cast<double>(max_count);
    for (std::size_t n : class_counts) {
        if (n == 0) {
            out.weights.push_back(policy == ZeroCountPolicy::cap ? mx : 0.0);
        } else {
            out.weights.push_back(mx / static_cast<double>(n));
        }
    }
    return out;
}

ClientState::ClientState(std::size_t client_id, const data::Dataset& local, std::size_t classes,
                         std::uint64_t rng_seed)
    : client_id_(client_id),
      features_(data::feature_matrix(local)),
      labels_(data::labels_of(local)),
      class_counts_(data::class_counts(local, classes)),
      rng_seed_(rng_seed) {}

ClientUpdate client_update(ClientState& state, const nn::ModelParameters& incoming,
                           const TrainingConfig& cfg, std::size_t round) {
    cfg.validate();
    const std::size_t n = state.sample_count();
    if (n == 0) throw ClientAbstained(state.client_id(), "empty local dataset");
    if (incoming.input_dim() != state.features().cols()) {
        throw nn::ShapeError("client " + std::to_string(state.client_id()) + " has " +
                             std::to_string(state.features().cols()) +
                             " features, model expects " + std::to_string(incoming.input_dim()));
    }
    if (incoming.output_dim() != state.classes()) {
        throw nn::ShapeError("client " + std::to_string(state.client_id()) + " has " +
                             std::to_string(state.classes()) + " classes, model emits " +
                             std::to_string(incoming.output_dim()));
    }

    state.set_model(incoming);
    ClientUpdate out;
    out.client_id = state.client_id();
    out.samples = n;
    const nn::ClassWeightVector* weights = nullptr;
    if (cfg.loss_mode == LossMode::weighted) {
        out.class_weights = compute_class_weights(state.class_counts(), cfg.zero_count_policy);
        weights = &out.class_weights;
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto rng = make_stream(state.rng_seed(), {stream_tag::client, state.client_id(), round});
    std::shuffle(order.begin(), order.end(), rng);

    struct Batch {
        nn::Matrix x;
        std::vector<std::size_t> y;
    };
    std::vector<Batch> batches;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
        const std::size_t end = std::min(n, start + cfg.batch_size);
        std::span<const std::size_t> idx(order.data() + start, end - start);
        Batch b{state.features().gather_rows(idx), {}};
        b.y.reserve(idx.size());
        for (auto i : idx) b.y.push_back(state.labels()[i]);
        batches.push_back(std::move(b));
    }

    nn::ModelParameters model = incoming;
    bool first = true;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (const auto& b : batches) {
            auto step = nn::loss_and_gradient(model, b.x, b.y, weights);
            if (first) {
                out.loss_first = step.loss;
                first = false;
            }
            out.loss_last = step.loss;
            model.add_scaled(step.gradient, -cfg.learning_rate);
        }
    }
    state.set_model(model);
    out.params = std::move(model);
    return out;
}

}  // namespace fedra::fed
