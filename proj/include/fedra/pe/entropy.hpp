#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

namespace fedra::pe {

using ByteHistogram = std::array<std::uint64_t, 256>;

[[nodiscard]] ByteHistogram byte_histogram(std::span<const std::uint8_t> bytes) noexcept;

/// Shannon entropy of the byte distribution in bits per byte, in [0, 8].
/// An empty buffer has entropy 0.
[[nodiscard]] double shannon_entropy(std::span<const std::uint8_t> bytes) noexcept;
[[nodiscard]] double shannon_entropy(const ByteHistogram& histogram) noexcept;

}  // namespace fedra::pe
