#include "fedra/fed/server.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <ostream>
#include <thread>

#include "fedra/data/dataset.hpp"
#include "fedra/rng.hpp"

namespace fedra::fed {

nn::ModelParameters fed_avg_aggregate(std::span<const WeightedUpdate> updates) {
    if (updates.empty()) throw AggregationError("no updates to aggregate");
    std::vector<const WeightedUpdate*> ordered;
    ordered.reserve(updates.size());
    for (const auto& u : updates) {
        if (u.params == nullptr) {
            throw AggregationError("client " + std::to_string(u.client_id) + " sent no parameters");
        }
        if (u.samples == 0) {
            throw AggregationError("client " + std::to_string(u.client_id) + " reports zero samples");
        }
        ordered.push_back(&u);
    }
    std::sort(ordered.begin(), ordered.end(),
              [](const auto* a, const auto* b) { return a->client_id < b->client_id; });

    const auto& anchor = *ordered.front()->params;
    std::size_t total = 0;
    for (const auto* u : ordered) {
        if (!u->params->same_shape(anchor)) {
            throw AggregationError("client " + std::to_string(u->client_id) +
                                   " sent parameters with a different shape");
        }
        total += u->samples;
    }
    const auto n_total = static_cast<double>(total);

    nn::ModelParameters out = anchor;
    auto& dst = out.layers();
    for (std::size_t i = 1; i < ordered.size(); ++i) {
        const double w = static_cast<double>(ordered[i]->samples) / n_total;
        const auto& src = ordered[i]->params->layers();
        for (std::size_t l = 0; l < dst.size(); ++l) {
            auto d = dst[l].weight.values();
            const auto s = src[l].weight.values();
            const auto a = anchor.layers()[l].weight.values();
            for (std::size_t k = 0; k < d.size(); ++k) d[k] += w * (s[k] - a[k]);
            auto& db = dst[l].bias;
            const auto& sb = src[l].bias;
            const auto& ab = anchor.layers()[l].bias;
            for (std::size_t k = 0; k < db.size(); ++k) db[k] += w * (sb[k] - ab[k]);
        }
    }
    return out;
}

std::vector<std::size_t> select_clients(std::size_t client_count, const TrainingConfig& cfg,
                                        std::size_t round) {
    std::vector<std::size_t> ids(client_count);
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    if (cfg.client_fraction >= 1.0) return ids;
    const auto m = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(cfg.client_fraction * static_cast<double>(client_count))));
    auto rng = make_stream(cfg.seed, {stream_tag::selection, round});
    std::shuffle(ids.begin(), ids.end(), rng);
    ids.resize(std::min(m, client_count));
    std::sort(ids.begin(), ids.end());
    return ids;
}

FederationResult run_federation(std::vector<ClientState>& clients,
                                std::span<const nn::LayerSpec> architecture,
                                const TrainingConfig& cfg) {
    cfg.validate();
    if (clients.empty()) throw std::invalid_argument("federation needs at least one client");
    nn::validate_architecture(architecture);
    for (const auto& c : clients) {
        if (c.features().cols() != architecture.front().input_dim) {
            throw nn::ShapeError("client " + std::to_string(c.client_id()) +
                                 " feature dimension does not match the architecture");
        }
        if (c.classes() != architecture.back().output_dim) {
            throw nn::ShapeError("client " + std::to_string(c.client_id()) +
                                 " class space does not match the architecture");
        }
    }

    FederationResult result;
    auto init_rng = make_stream(cfg.seed, {stream_tag::init});
    result.initial = nn::ModelParameters::glorot(architecture, init_rng);
    result.global = result.initial;
    result.local_models.assign(clients.size(), result.initial);

    for (std::size_t round = 1; round <= cfg.rounds; ++round) {
        const auto selected = select_clients(clients.size(), cfg, round);
        std::vector<ClientUpdate> updates(selected.size());
        std::vector<std::exception_ptr> errors(selected.size());
        auto work = [&](std::size_t slot) {
            try {
                updates[slot] = client_update(clients[selected[slot]], result.global, cfg, round);
            } catch (...) {
                errors[slot] = std::current_exception();
            }
        };
        if (cfg.parallel_clients && selected.size() > 1) {
            std::vector<std::jthread> pool;
            pool.reserve(selected.size());
            for (std::size_t s = 0; s < selected.size(); ++s) pool.emplace_back(work, s);
        } else {
            for (std::size_t s = 0; s < selected.size(); ++s) work(s);
        }
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }

        std::vector<WeightedUpdate> weighted;
        std::size_t total = 0;
        for (const auto& u : updates) total += u.samples;
        RoundRecord record;
        record.round = round;
        for (std::size_t s = 0; s < selected.size(); ++s) {
            const auto& u = updates[s];
            weighted.push_back({u.client_id, u.samples, &u.params});
            record.clients.push_back({u.client_id, u.loss_first, u.loss_last, u.samples,
                                      static_cast<double>(u.samples) / static_cast<double>(total)});
            result.local_models[selected[s]] = u.params;
        }
        result.global = fed_avg_aggregate(weighted);
        record.global_hash = nn::parameter_hash(result.global);
        result.history.push_back(std::move(record));
    }
    return result;
}

void write_history(std::ostream& os, std::span<const RoundRecord> history) {
    os << "round,client_id,local_loss_first,local_loss_last,n_i,weight,global_param_hash\n";
    for (const auto& r : history) {
        for (const auto& c : r.clients) {
            os << r.round << ',' << c.client_id << ',' << data::format_double(c.loss_first) << ','
               << data::format_double(c.loss_last) << ',' << c.samples << ','
               << data::format_double(c.weight) << ',' << r.global_hash << '\n';
        }
    }
}

}  // namespace fedra::fed
