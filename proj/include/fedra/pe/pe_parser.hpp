#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fedra/data/dataset.hpp"

namespace fedra::pe {

enum class PeErrorKind {
    not_pe,              ///< no "MZ" at offset 0
    truncated,           ///< buffer ends inside a required structure
    bad_signature,       ///< no "PE\0\0" at the e_lfanew offset
    unsupported_format,  ///< optional header magic is neither 0x10B nor 0x20B
    no_sections,         ///< COFF header declares zero sections
};

[[nodiscard]] std::string_view to_string(PeErrorKind k);

/// Parse failure. `offset()` is the byte offset of the structure or field
/// that could not be read or validated.
class PeError : public std::runtime_error {
public:
    PeError(PeErrorKind kind, std::uint64_t offset);

    [[nodiscard]] PeErrorKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::uint64_t offset() const noexcept { return offset_; }

private:
    PeErrorKind kind_;
    std::uint64_t offset_;
};

inline constexpr std::uint16_t kPe32Magic = 0x10B;
inline constexpr std::uint16_t kPe32PlusMagic = 0x20B;

struct PeHeaderSummary {
    std::uint16_t machine = 0;
    std::uint32_t timestamp = 0;
    std::uint16_t number_of_sections = 0;
    std::uint32_t number_of_symbols = 0;
    std::uint16_t optional_magic = 0;
    std::uint32_t size_of_code = 0;
    std::uint32_t size_of_initialized_data = 0;
    std::uint32_t size_of_uninitialized_data = 0;
    std::uint32_t address_of_entry_point = 0;
    std::uint32_t size_of_image = 0;
    std::uint32_t size_of_headers = 0;
    std::uint32_t checksum = 0;
    std::uint16_t subsystem = 0;
    std::uint16_t dll_characteristics = 0;
    /// Read as 32 bits for PE32 and 64 bits for PE32+.
    std::uint64_t size_of_stack_reserve = 0;
    double file_byte_entropy = 0.0;

    [[nodiscard]] bool is_pe32_plus() const noexcept { return optional_magic == kPe32PlusMagic; }

    friend bool operator==(const PeHeaderSummary&, const PeHeaderSummary&) = default;
};

/// Reads the DOS, COFF and optional headers and checks that the section
/// table lies inside the buffer. Never reads outside `bytes`; every failure
/// is a PeError.
[[nodiscard]] PeHeaderSummary parse_pe(std::span<const std::uint8_t> bytes);

/// Feature order:
///  0 number_of_sections      1 number_of_symbols        2 timestamp
///  3 size_of_code            4 size_of_initialized_data 5 size_of_uninitialized_data
///  6 address_of_entry_point  7 size_of_image            8 size_of_headers
///  9 checksum               10 subsystem               11 dll_characteristics
/// 12 size_of_stack_reserve  13 machine                 14 file_byte_entropy
[[nodiscard]] data::Features to_features(const PeHeaderSummary& summary);

/// Unlabeled feature vector (label 0, empty family name).
[[nodiscard]] data::FeatureVector to_feature_vector(const PeHeaderSummary& summary);

[[nodiscard]] std::vector<std::uint8_t> read_file_bytes(const std::string& path);

}  // namespace fedra::pe
