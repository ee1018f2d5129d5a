#include "fedra/pe/entropy.hpp"

#include <algorithm>
#include <cmath>

namespace fedra::pe {

ByteHistogram byte_histogram(std::span<const std::uint8_t> bytes) noexcept {
    ByteHistogram h{};
    for (std::uint8_t b : bytes) ++h[b];
    return h;
}

double shannon_entropy(const ByteHistogram& histogram) noexcept {
    std::uint64_t total = 0;
    for (auto c : histogram) total += c;
    if (total == 0) return 0.0;
    const auto n = static_cast<double>(total);
    double h = 0.0;
    for (auto c : histogram) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return std::clamp(h, 0.0, 8.0);
}

double shannon_entropy(std::span<const std::uint8_t> bytes) noexcept {
    return shannon_entropy(byte_histogram(bytes));
}

}  // namespace fedra::pe
