#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fedra/data/dataset.hpp"

namespace fedra::data {

/// Held-out and training sample counts taken from each class.
struct SplitSpec {
    std::size_t family_test = 20;
    std::size_t family_train = 120;
    std::size_t benign_test = 300;
    std::size_t benign_train = 1700;

    friend bool operator==(const SplitSpec&, const SplitSpec&) = default;
};

/// Dataset indices, each list sorted ascending.
struct TrainTestSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Seeded selection without replacement, independently per class. Samples
/// beyond test + train for a class are left unused. Throws
/// std::invalid_argument naming the first class with too few samples.
[[nodiscard]] TrainTestSplit split_train_test(const Dataset& ds, const SplitSpec& spec,
                                              std::uint64_t seed);

enum class PartitionScheme { balanced, canonical_imbalanced };

[[nodiscard]] std::string_view to_string(PartitionScheme s);

/// Assignment of training samples to client sites, in multiclass label space.
/// Ransomware cells are disjoint across clients; the benign training pool is
/// replicated to every client.
struct PartitionPlan {
    PartitionScheme scheme = PartitionScheme::balanced;
    std::uint64_t seed = 0;
    /// cells[client][class] -> dataset indices, sorted.
    std::vector<std::vector<std::vector<std::size_t>>> cells;
    /// Held-out dataset indices, sorted, and their per-class counts.
    std::vector<std::size_t> test_indices;
    std::vector<std::size_t> test_counts;
    /// Clients that received one extra sample of a class during balanced
    /// dealing, as "family:client" entries.
    std::vector<std::string> remainder_log;

    [[nodiscard]] std::size_t clients() const noexcept { return cells.size(); }
    [[nodiscard]] std::size_t classes() const noexcept {
        return cells.empty() ? 0 : cells.front().size();
    }
    /// K x Q matrix of training counts.
    [[nodiscard]] std::vector<std::vector<std::size_t>> counts() const;
    /// Training dataset indices for one client, sorted.
    [[nodiscard]] std::vector<std::size_t> client_indices(std::size_t client) const;
};

/// Canonical per-client ransomware training counts for the three-site
/// imbalanced layout (rows = clients, cols = families 0..8).
[[nodiscard]] const std::vector<std::vector<std::size_t>>& canonical_imbalanced_counts();

/// Deals each family's training samples evenly over `clients` sites (the
/// first `n % clients` sites get one extra, logged in the plan).
[[nodiscard]] PartitionPlan partition_balanced(const Dataset& ds, const TrainTestSplit& split,
                                               std::size_t clients, std::uint64_t seed);

/// Fixed three-site imbalanced layout. Requires exactly 120 training samples
/// per ransomware family.
[[nodiscard]] PartitionPlan partition_canonical_imbalanced(const Dataset& ds,
                                                           const TrainTestSplit& split,
                                                           std::uint64_t seed);

[[nodiscard]] PartitionPlan make_partition(PartitionScheme scheme, const Dataset& ds,
                                           const TrainTestSplit& split, std::size_t clients,
                                           std::uint64_t seed);

/// Samples of one client, labels in multiclass space.
[[nodiscard]] Dataset materialize_client(const Dataset& ds, const PartitionPlan& plan,
                                         std::size_t client);
[[nodiscard]] Dataset materialize_test(const Dataset& ds, const PartitionPlan& plan);

/// Recomputes every structural invariant from the materialized client
/// datasets: cell labels, cell disjointness for ransomware, benign pool
/// identical everywhere, no train/test overlap. Throws std::logic_error.
void check_plan(const Dataset& ds, const PartitionPlan& plan);

/// max(counts) / min(counts). Throws std::domain_error on a zero count or an
/// empty list.
[[nodiscard]] double imbalance_ratio(std::span<const std::size_t> counts);

/// Which classes enter a per-client ratio.
enum class RatioView { ransomware_only, with_benign, binary };

/// Class counts for one client as seen through `view`, computed from the
/// client's materialized dataset.
[[nodiscard]] std::vector<std::size_t> client_counts(const Dataset& client_data, RatioView view);

/// Ratio of the largest to the smallest per-class total over all clients,
/// counting each distinct sample once.
[[nodiscard]] double global_imbalance_ratio(const PartitionPlan& plan, bool include_benign);

struct RatioRow {
    std::size_t client = 0;
    double ransomware_only = 0.0;
    double with_benign = 0.0;
    double binary = 0.0;
};

[[nodiscard]] std::vector<RatioRow> imbalance_table(const Dataset& ds, const PartitionPlan& plan);

// Plan file (JSON): scheme, seed, class names, counts, per-cell indices,
// test indices, remainder log and ratio diagnostics.
void write_plan(std::ostream& os, const Dataset& ds, const PartitionPlan& plan);
[[nodiscard]] PartitionPlan read_plan(std::istream& is);

}  // namespace fedra::data
