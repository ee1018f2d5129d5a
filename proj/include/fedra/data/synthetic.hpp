#pragma once

#include <cstdint>
#include <vector>

#include "fedra/data/dataset.hpp"

namespace fedra::data {

/// Isotropic Gaussian cloud for one family.
struct ClassSpec {
    std::string family;
    Features mean{};
    double stddev = 1.0;
    std::size_t count = 0;
};

/// Default stand-in corpus: 140 samples for each of the nine ransomware
/// families and 2000 benign samples, unit stddev. Every class mean sits on
/// its own axis; family means are `separation` apart pairwise and the benign
/// mean is `benign_separation` from each family mean.
[[nodiscard]] std::vector<ClassSpec> default_synthetic_spec(double separation = 3.0,
                                                            double benign_separation = 3.0,
                                                            std::size_t family_count = 140,
                                                            std::size_t benign_count = 2000);

/// Draws each class from its own seeded stream, in the order given.
/// Labels follow the multiclass registry. Throws std::invalid_argument on a
/// non-positive stddev or unknown family.
[[nodiscard]] Dataset generate_synthetic(const std::vector<ClassSpec>& spec, std::uint64_t seed);

}  // namespace fedra::data
