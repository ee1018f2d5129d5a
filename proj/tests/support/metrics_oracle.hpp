#pragma once

// Brute-force metrics straight from label/prediction pairs, no confusion matrix.

#include <cstddef>
#include <vector>

#include "fedra/eval/metrics.hpp"

namespace fedra::testing {

inline eval::Metrics brute_force_metrics(const std::vector<std::size_t>& truth,
                                         const std::vector<std::size_t>& predicted,
                                         std::size_t classes) {
    eval::Metrics m;
    std::size_t hits = 0;
    for (std::size_t s = 0; s < truth.size(); ++s) hits += truth[s] == predicted[s];
    m.accuracy = static_cast<double>(hits) / static_cast<double>(truth.size());
    for (std::size_t c = 0; c < classes; ++c) {
        std::size_t tp = 0, fp = 0, fn = 0;
        for (std::size_t s = 0; s < truth.size(); ++s) {
            if (predicted[s] == c && truth[s] == c) ++tp;
            if (predicted[s] == c && truth[s] != c) ++fp;
            if (predicted[s] != c && truth[s] == c) ++fn;
        }
        const double p = tp + fp ? double(tp) / double(tp + fp) : 0.0;
        const double r = tp + fn ? double(tp) / double(tp + fn) : 0.0;
        const double f = p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
        m.precision += p;
        m.recall += r;
        m.f1 += f;
    }
    m.precision /= double(classes);
    m.recall /= double(classes);
    m.f1 /= double(classes);
    return m;
}

}  // namespace fedra::testing
