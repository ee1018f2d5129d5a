#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace fedra {

/// Independent generator keyed by a base seed plus any number of stream ids,
/// e.g. (seed, client, round). The same key always yields the same stream.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
    std::vector<std::uint32_t> words;
    words.reserve(2 * (keys.size() + 1));
    auto push = [&](std::uint64_t v) {
        words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
        words.push_back(static_cast<std::uint32_t>(v >> 32));
    };
    push(seed);
    for (auto k : keys) push(k);
    std::seed_seq seq(words.begin(), words.end());
    return std::mt19937_64(seq);
}

// Tags that keep purpose-specific streams apart.
namespace stream_tag {
inline constexpr std::uint64_t init = 1;
inline constexpr std::uint64_t client = 2;
inline constexpr std::uint64_t split = 3;
inline constexpr std::uint64_t partition = 4;
inline constexpr std::uint64_t synth = 5;
inline constexpr std::uint64_t trial = 6;
inline constexpr std::uint64_t selection = 7;
}  // namespace stream_tag

}  // namespace fedra
