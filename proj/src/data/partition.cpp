#include "fedra/data/partition.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "fedra/rng.hpp"

namespace fedra::data {

namespace {

constexpr std::size_t kFamilies = 9;
constexpr std::size_t kBenign = 9;

std::vector<std::vector<std::size_t>> indices_by_class(const Dataset& ds,
                                                       std::span<const std::size_t> indices) {
    const auto& reg = ClassRegistry::multiclass();
    std::vector<std::vector<std::size_t>> by_class(reg.size());
    for (auto i : indices) {
        by_class[reg.label_of(ds.at(i).family_name)].push_back(i);
    }
    return by_class;
}

std::vector<std::size_t> all_indices(const Dataset& ds) {
    std::vector<std::size_t> idx(ds.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return idx;
}

PartitionPlan empty_plan(PartitionScheme scheme, std::size_t clients, std::uint64_t seed,
                         const Dataset& ds, const TrainTestSplit& split) {
    PartitionPlan plan;
    plan.scheme = scheme;
    plan.seed = seed;
    plan.cells.assign(clients, std::vector<std::vector<std::size_t>>(kFamilies + 1));
    plan.test_indices = split.test;
    std::sort(plan.test_indices.begin(), plan.test_indices.end());
    plan.test_counts.assign(kFamilies + 1, 0);
    const auto& reg = ClassRegistry::multiclass();
    for (auto i : plan.test_indices) ++plan.test_counts[reg.label_of(ds.at(i).family_name)];
    return plan;
}

void replicate_benign(PartitionPlan& plan, std::vector<std::size_t> pool) {
    std::sort(pool.begin(), pool.end());
    for (auto& client : plan.cells) client[kBenign] = pool;
}

}  // namespace

TrainTestSplit split_train_test(const Dataset& ds, const SplitSpec& spec, std::uint64_t seed) {
    const auto& reg = ClassRegistry::multiclass();
    const auto by_class = indices_by_class(ds, all_indices(ds));
    TrainTestSplit out;
    for (std::size_t c = 0; c < reg.size(); ++c) {
        const bool benign = c == reg.benign_label();
        const std::size_t n_test = benign ? spec.benign_test : spec.family_test;
        const std::size_t n_train = benign ? spec.benign_train : spec.family_train;
        auto pool = by_class[c];
        if (pool.size() < n_test + n_train) {
            throw std::invalid_argument("class " + reg.name(c) + " has " +
                                        std::to_string(pool.size()) + " samples, needs " +
                                        std::to_string(n_test + n_train));
        }
        auto rng = make_stream(seed, {stream_tag::split, c});
        std::shuffle(pool.begin(), pool.end(), rng);
        out.test.insert(out.test.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n_test));
        out.train.insert(out.train.end(), pool.begin() + static_cast<std::ptrdiff_t>(n_test),
                         pool.begin() + static_cast<std::ptrdiff_t>(n_test + n_train));
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

std::string_view to_string(PartitionScheme s) {
    return s == PartitionScheme::balanced ? "balanced" : "canonical_imbalanced";
}

std::vector<std::vector<std::size_t>> PartitionPlan::counts() const {
    std::vector<std::vector<std::size_t>> out(cells.size());
    for (std::size_t k = 0; k < cells.size(); ++k) {
        for (const auto& cell : cells[k]) out[k].push_back(cell.size());
    }
    return out;
}

std::vector<std::size_t> PartitionPlan::client_indices(std::size_t client) const {
    std::vector<std::size_t> out;
    for (const auto& cell : cells.at(client)) out.insert(out.end(), cell.begin(), cell.end());
    std::sort(out.begin(), out.end());
    return out;
}

const std::vector<std::vector<std::size_t>>& canonical_imbalanced_counts() {
    // Client totals 540/270/270, every family sums to 120. Site 1 dominates
    // families 0-4, site 2 families 5-6, site 3 families 7-8.
    static const std::vector<std::vector<std::size_t>> counts = {
        {83, 83, 83, 83, 83, 26, 39, 30, 30},
        {22, 22, 22, 22, 22, 60, 60, 20, 20},
        {15, 15, 15, 15, 15, 34, 21, 70, 70},
    };
    return counts;
}

PartitionPlan partition_balanced(const Dataset& ds, const TrainTestSplit& split,
                                 std::size_t clients, std::uint64_t seed) {
    if (clients == 0) throw std::invalid_argument("partition needs at least one client");
    auto plan = empty_plan(PartitionScheme::balanced, clients, seed, ds, split);
    auto by_class = indices_by_class(ds, split.train);
    const auto& reg = ClassRegistry::multiclass();
    for (std::size_t c = 0; c < kFamilies; ++c) {
        auto pool = by_class[c];
        auto rng = make_stream(seed, {stream_tag::partition, c});
        std::shuffle(pool.begin(), pool.end(), rng);
        const std::size_t base = pool.size() / clients;
        const std::size_t extra = pool.size() % clients;
        std::size_t pos = 0;
        for (std::size_t k = 0; k < clients; ++k) {
            const std::size_t take = base + (k < extra ? 1 : 0);
            if (k < extra) plan.remainder_log.push_back(reg.name(c) + ":" + std::to_string(k));
            auto& cell = plan.cells[k][c];
            cell.assign(pool.begin() + static_cast<std::ptrdiff_t>(pos),
                        pool.begin() + static_cast<std::ptrdiff_t>(pos + take));
            std::sort(cell.begin(), cell.end());
            pos += take;
        }
    }
    replicate_benign(plan, by_class[kBenign]);
    return plan;
}

PartitionPlan partition_canonical_imbalanced(const Dataset& ds, const TrainTestSplit& split,
                                             std::uint64_t seed) {
    const auto& layout = canonical_imbalanced_counts();
    auto plan = empty_plan(PartitionScheme::canonical_imbalanced, layout.size(), seed, ds, split);
    auto by_class = indices_by_class(ds, split.train);
    const auto& reg = ClassRegistry::multiclass();
    for (std::size_t c = 0; c < kFamilies; ++c) {
        auto pool = by_class[c];
        if (pool.size() != 120) {
            throw std::invalid_argument("canonical imbalanced layout needs 120 training samples of " +
                                        reg.name(c) + ", got " + std::to_string(pool.size()));
        }
        auto rng = make_stream(seed, {stream_tag::partition, c});
        std::shuffle(pool.begin(), pool.end(), rng);
        std::size_t pos = 0;
        for (std::size_t k = 0; k < layout.size(); ++k) {
            const std::size_t take = layout[k][c];
            auto& cell = plan.cells[k][c];
            cell.assign(pool.begin() + static_cast<std::ptrdiff_t>(pos),
                        pool.begin() + static_cast<std::ptrdiff_t>(pos + take));
            std::sort(cell.begin(), cell.end());
            pos += take;
        }
    }
    replicate_benign(plan, by_class[kBenign]);
    return plan;
}

PartitionPlan make_partition(PartitionScheme scheme, const Dataset& ds, const TrainTestSplit& split,
                             std::size_t clients, std::uint64_t seed) {
    if (scheme == PartitionScheme::balanced) {
        return partition_balanced(ds, split, clients, seed);
    }
    if (clients != 3) {
        throw std::invalid_argument("canonical imbalanced layout is defined for exactly 3 clients");
    }
    return partition_canonical_imbalanced(ds, split, seed);
}

Dataset materialize_client(const Dataset& ds, const PartitionPlan& plan, std::size_t client) {
    return select(ds, plan.client_indices(client));
}

Dataset materialize_test(const Dataset& ds, const PartitionPlan& plan) {
    return select(ds, plan.test_indices);
}

void check_plan(const Dataset& ds, const PartitionPlan& plan) {
    const auto& reg = ClassRegistry::multiclass();
    if (plan.clients() == 0) throw std::logic_error("plan has no clients");
    const std::set<std::size_t> test(plan.test_indices.begin(), plan.test_indices.end());
    std::set<std::size_t> seen_ransomware;
    std::optional<std::vector<std::size_t>> benign_pool;
    for (std::size_t k = 0; k < plan.clients(); ++k) {
        if (plan.cells[k].size() != reg.size()) {
            throw std::logic_error("client " + std::to_string(k) + " has wrong class count");
        }
        const Dataset local = materialize_client(ds, plan, k);
        const auto counts = class_counts(relabel(local, reg), reg.size());
        for (std::size_t c = 0; c < reg.size(); ++c) {
            if (counts[c] != plan.cells[k][c].size()) {
                throw std::logic_error("client " + std::to_string(k) + " holds " +
                                       std::to_string(counts[c]) + " samples of " + reg.name(c) +
                                       ", plan says " + std::to_string(plan.cells[k][c].size()));
            }
            for (auto i : plan.cells[k][c]) {
                if (test.count(i) != 0) {
                    throw std::logic_error("sample " + std::to_string(i) + " is in train and test");
                }
                if (c != kBenign && !seen_ransomware.insert(i).second) {
                    throw std::logic_error("sample " + std::to_string(i) +
                                           " assigned to more than one client");
                }
            }
        }
        const auto& pool = plan.cells[k][kBenign];
        if (!benign_pool) {
            benign_pool = pool;
        } else if (*benign_pool != pool) {
            throw std::logic_error("benign pool differs at client " + std::to_string(k));
        }
    }
    std::vector<std::size_t> tc(reg.size(), 0);
    for (auto i : plan.test_indices) ++tc[reg.label_of(ds.at(i).family_name)];
    if (tc != plan.test_counts) throw std::logic_error("test counts do not match test indices");
}

double imbalance_ratio(std::span<const std::size_t> counts) {
    if (counts.empty()) throw std::domain_error("imbalance ratio of no classes");
    const auto [mn, mx] = std::minmax_element(counts.begin(), counts.end());
    if (*mn == 0) throw std::domain_error("imbalance ratio undefined with a zero class count");
    return static_cast<double>(*mx) / static_cast<double>(*mn);
}

std::vector<std::size_t> client_counts(const Dataset& client_data, RatioView view) {
    const auto& reg = ClassRegistry::multiclass();
    std::vector<std::size_t> counts(reg.size(), 0);
    for (const auto& s : client_data) ++counts[reg.label_of(s.family_name)];
    switch (view) {
        case RatioView::ransomware_only:
            counts.pop_back();
            return counts;
        case RatioView::with_benign:
            return counts;
        case RatioView::binary: {
            const std::size_t malware =
                std::accumulate(counts.begin(), counts.end() - 1, std::size_t{0});
            return {counts[kBenign], malware};
        }
    }
    return counts;
}

double global_imbalance_ratio(const PartitionPlan& plan, bool include_benign) {
    const std::size_t classes = include_benign ? plan.classes() : kFamilies;
    std::vector<std::set<std::size_t>> distinct(classes);
    for (const auto& client : plan.cells) {
        for (std::size_t c = 0; c < classes; ++c) {
            distinct[c].insert(client[c].begin(), client[c].end());
        }
    }
    std::vector<std::size_t> totals;
    for (const auto& d : distinct) totals.push_back(d.size());
    return imbalance_ratio(totals);
}

std::vector<RatioRow> imbalance_table(const Dataset& ds, const PartitionPlan& plan) {
    std::vector<RatioRow> rows;
    for (std::size_t k = 0; k < plan.clients(); ++k) {
        const auto local = materialize_client(ds, plan, k);
        RatioRow r;
        r.client = k;
        r.ransomware_only = imbalance_ratio(client_counts(local, RatioView::ransomware_only));
        r.with_benign = imbalance_ratio(client_counts(local, RatioView::with_benign));
        r.binary = imbalance_ratio(client_counts(local, RatioView::binary));
        rows.push_back(r);
    }
    return rows;
}

void write_plan(std::ostream& os, const Dataset& ds, const PartitionPlan& plan) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["format"] = "fedra-partition-plan";
    j["version"] = 1;
    j["scheme"] = std::string(to_string(plan.scheme));
    j["seed"] = plan.seed;
    j["classes"] = ClassRegistry::multiclass().names();
    j["counts"] = plan.counts();
    j["test_counts"] = plan.test_counts;
    j["remainder_log"] = plan.remainder_log;
    ordered_json ratios = ordered_json::array();
    try {
        for (const auto& r : imbalance_table(ds, plan)) {
            ratios.push_back({{"client", r.client},
                              {"ransomware_only", r.ransomware_only},
                              {"with_benign", r.with_benign},
                              {"binary", r.binary}});
        }
        j["imbalance_ratios"] = ratios;
        j["global_ratio_ransomware"] = global_imbalance_ratio(plan, false);
        j["global_ratio_with_benign"] = global_imbalance_ratio(plan, true);
    } catch (const std::domain_error& e) {
        j["imbalance_ratios"] = e.what();
    }
    j["cells"] = plan.cells;
    j["test_indices"] = plan.test_indices;
    os << j.dump(1) << '\n';
}

PartitionPlan read_plan(std::istream& is) {
    const auto j = nlohmann::json::parse(is);
    if (j.value("format", "") != "fedra-partition-plan") {
        throw std::runtime_error("not a partition plan file");
    }
    PartitionPlan plan;
    const auto scheme = j.at("scheme").get<std::string>();
    if (scheme == "balanced") {
        plan.scheme = PartitionScheme::balanced;
    } else if (scheme == "canonical_imbalanced") {
        plan.scheme = PartitionScheme::canonical_imbalanced;
    } else {
        throw std::runtime_error("unknown partition scheme '" + scheme + "'");
    }
    plan.seed = j.at("seed").get<std::uint64_t>();
    plan.cells = j.at("cells").get<std::vector<std::vector<std::vector<std::size_t>>>>();
    plan.test_indices = j.at("test_indices").get<std::vector<std::size_t>>();
    plan.test_counts = j.at("test_counts").get<std::vector<std::size_t>>();
    plan.remainder_log = j.at("remainder_log").get<std::vector<std::string>>();
    return plan;
}

}  // namespace fedra::data
