#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fedra/nn/matrix.hpp"

namespace fedra::data {

inline constexpr std::size_t kFeatureCount = 15;

using Features = std::array<double, kFeatureCount>;

/// One static-analysis sample. `label` is relative to the registry that
/// produced it; `family_name` is the canonical family.
struct FeatureVector {
    Features features{};
    std::size_t label = 0;
    std::string family_name;

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

using Dataset = std::vector<FeatureVector>;

enum class Task { multiclass, binary };

[[nodiscard]] std::string_view to_string(Task t);
[[nodiscard]] Task task_from_string(std::string_view name);

/// Maps family names to class indices for one task.
///
/// Multiclass: Sodinokibi(0) LockBit(1) Babuk(2) DJVu(3) NetWalker(4) Chaos(5)
/// Hive(6) BlackCat(7) WannaCry(8) Benign(9).
/// Binary: Benign(0), every ransomware family -> malware(1).
class ClassRegistry {
public:
    [[nodiscard]] static const ClassRegistry& multiclass();
    [[nodiscard]] static const ClassRegistry& binary();
    [[nodiscard]] static const ClassRegistry& for_task(Task t);

    [[nodiscard]] Task task() const noexcept { return task_; }
    [[nodiscard]] std::size_t size() const noexcept { return names_.size(); }
    [[nodiscard]] const std::vector<std::string>& names() const noexcept { return names_; }
    [[nodiscard]] const std::string& name(std::size_t label) const { return names_.at(label); }
    [[nodiscard]] std::size_t benign_label() const noexcept { return benign_; }

    /// Class index for a family name (aliases such as "Babyk" or "REvil"
    /// accepted). Throws std::invalid_argument for unknown families.
    [[nodiscard]] std::size_t label_of(std::string_view family) const;

private:
    ClassRegistry(Task task, std::vector<std::string> names, std::size_t benign)
        : task_(task), names_(std::move(names)), benign_(benign) {}

    Task task_;
    std::vector<std::string> names_;
    std::size_t benign_;
};

/// Canonical multiclass family name for a possibly aliased name.
[[nodiscard]] std::string canonical_family(std::string_view family);

[[nodiscard]] inline bool is_benign(std::string_view family) {
    return canonical_family(family) == "Benign";
}

/// Copy of `ds` with labels recomputed for `registry`.
[[nodiscard]] Dataset relabel(const Dataset& ds, const ClassRegistry& registry);

/// Per-class label counts of `ds` (length `classes`).
[[nodiscard]] std::vector<std::size_t> class_counts(const Dataset& ds, std::size_t classes);

/// Feature rows of the selected samples, or of all samples.
[[nodiscard]] nn::Matrix feature_matrix(const Dataset& ds);
[[nodiscard]] std::vector<std::size_t> labels_of(const Dataset& ds);

[[nodiscard]] Dataset select(const Dataset& ds, std::span<const std::size_t> indices);

/// Per-dimension z-score normalization fitted on one split.
struct Normalizer {
    Features mean{};
    Features stddev{};

    /// Constant dimensions get stddev 1 so they map to 0.
    [[nodiscard]] static Normalizer fit(const Dataset& ds);
    void apply(Dataset& ds) const;
};

// Dataset file: header "f1,...,f15,family", one sample per line, values in
// shortest round-trip decimal form.
void write_dataset(std::ostream& os, const Dataset& ds);
void write_dataset(const std::string& path, const Dataset& ds);
[[nodiscard]] Dataset read_dataset(std::istream& is, const ClassRegistry& registry);
[[nodiscard]] Dataset read_dataset(const std::string& path, const ClassRegistry& registry);

/// Shortest decimal form that parses back to exactly `v`.
[[nodiscard]] std::string format_double(double v);
[[nodiscard]] std::optional<double> parse_double(std::string_view s);

}  // namespace fedra::data
