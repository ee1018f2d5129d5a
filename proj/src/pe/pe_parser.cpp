#include "fedra/pe/pe_parser.hpp"

#include <fstream>
#include <iterator>

#include "fedra/pe/entropy.hpp"

namespace fedra::pe {

std::string_view to_string(PeErrorKind k) {
    switch (k) {
        case PeErrorKind::not_pe: return "NotPe";
        case PeErrorKind::truncated: return "Truncated";
        case PeErrorKind::bad_signature: return "BadSignature";
        case PeErrorKind::unsupported_format: return "UnsupportedFormat";
        case PeErrorKind::no_sections: return "NoSections";
    }
    return "Unknown";
}

PeError::PeError(PeErrorKind kind, std::uint64_t offset)
    : std::runtime_error(std::string(to_string(kind)) + " at offset " + std::to_string(offset)),
      kind_(kind),
      offset_(offset) {}

namespace {

constexpr std::uint64_t kLfanewOffset = 0x3C;
constexpr std::uint64_t kCoffSize = 20;
constexpr std::uint64_t kSectionHeaderSize = 40;

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    /// Throws Truncated(report_at) unless [offset, offset + len) is in range.
    void require(std::uint64_t offset, std::uint64_t len, std::uint64_t report_at) const {
        if (offset > bytes_.size() || len > bytes_.size() - offset) {
            throw PeError(PeErrorKind::truncated, report_at);
        }
    }

    template <typename T>
    [[nodiscard]] T read(std::uint64_t offset) const {
        require(offset, sizeof(T), offset);
        T v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            v |= static_cast<T>(static_cast<T>(bytes_[offset + i]) << (8 * i));
        }
        return v;
    }

private:
    std::span<const std::uint8_t> bytes_;
};

}  // namespace

PeHeaderSummary parse_pe(std::span<const std::uint8_t> bytes) {
    const ByteReader r(bytes);
    r.require(0, 2, 0);
    if (bytes[0] != 'M' || bytes[1] != 'Z') throw PeError(PeErrorKind::not_pe, 0);

    const std::uint64_t pe_offset = r.read<std::uint32_t>(kLfanewOffset);
    r.require(pe_offset, 4, pe_offset);
    if (bytes[pe_offset] != 'P' || bytes[pe_offset + 1] != 'E' || bytes[pe_offset + 2] != 0 ||
        bytes[pe_offset + 3] != 0) {
        throw PeError(PeErrorKind::bad_signature, pe_offset);
    }

    const std::uint64_t coff = pe_offset + 4;
    r.require(coff, kCoffSize, coff);
    PeHeaderSummary s;
    s.machine = r.read<std::uint16_t>(coff);
    s.number_of_sections = r.read<std::uint16_t>(coff + 2);
    s.timestamp = r.read<std::uint32_t>(coff + 4);
    s.number_of_symbols = r.read<std::uint32_t>(coff + 12);
    const std::uint16_t optional_size = r.read<std::uint16_t>(coff + 16);

    const std::uint64_t opt = coff + kCoffSize;
    s.optional_magic = r.read<std::uint16_t>(opt);
    if (s.optional_magic != kPe32Magic && s.optional_magic != kPe32PlusMagic) {
        throw PeError(PeErrorKind::unsupported_format, opt);
    }
    const bool plus = s.is_pe32_plus();
    r.require(opt, plus ? 80 : 76, opt);
    s.size_of_code = r.read<std::uint32_t>(opt + 4);
    s.size_of_initialized_data = r.read<std::uint32_t>(opt + 8);
    s.size_of_uninitialized_data = r.read<std::uint32_t>(opt + 12);
    s.address_of_entry_point = r.read<std::uint32_t>(opt + 16);
    s.size_of_image = r.read<std::uint32_t>(opt + 56);
    s.size_of_headers = r.read<std::uint32_t>(opt + 60);
    s.checksum = r.read<std::uint32_t>(opt + 64);
    s.subsystem = r.read<std::uint16_t>(opt + 68);
    s.dll_characteristics = r.read<std::uint16_t>(opt + 70);
    s.size_of_stack_reserve =
        plus ? r.read<std::uint64_t>(opt + 72) : std::uint64_t{r.read<std::uint32_t>(opt + 72)};

    if (s.number_of_sections == 0) throw PeError(PeErrorKind::no_sections, coff + 2);
    const std::uint64_t sections = opt + optional_size;
    r.require(sections, kSectionHeaderSize * s.number_of_sections, sections);

    s.file_byte_entropy = shannon_entropy(bytes);
    return s;
}

data::Features to_features(const PeHeaderSummary& s) {
    return {static_cast<double>(s.number_of_sections),
            static_cast<double>(s.number_of_symbols),
            static_cast<double>(s.timestamp),
            static_cast<double>(s.size_of_code),
            static_cast<double>(s.size_of_initialized_data),
            static_cast<double>(s.size_of_uninitialized_data),
            static_cast<double>(s.address_of_entry_point),
            static_cast<double>(s.size_of_image),
            static_cast<double>(s.size_of_headers),
            static_cast<double>(s.checksum),
            static_cast<double>(s.subsystem),
            static_cast<double>(s.dll_characteristics),
            static_cast<double>(s.size_of_stack_reserve),
            static_cast<double>(s.machine),
            s.file_byte_entropy};
}

data::FeatureVector to_feature_vector(const PeHeaderSummary& summary) {
    data::FeatureVector fv;
    fv.features = to_features(summary);
    return fv;
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

}  // namespace fedra::pe
