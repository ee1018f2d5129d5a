#include "fedra/nn/model.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace fedra::nn {

std::string_view to_string(Activation a) {
    switch (a) {
        case Activation::relu: return "relu";
        case Activation::softmax: return "softmax";
    }
    return "unknown";
}

Activation activation_from_string(std::string_view name) {
    if (name == "relu") return Activation::relu;
    if (name == "softmax") return Activation::softmax;
    throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

void validate_architecture(std::span<const LayerSpec> layers) {
    if (layers.empty()) {
        throw ShapeError("architecture has no layers");
    }
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& l = layers[i];
        if (l.input_dim == 0 || l.output_dim == 0) {
            throw ShapeError("layer " + std::to_string(i) + " has a zero dimension");
        }
        if (i > 0 && layers[i - 1].output_dim != l.input_dim) {
            throw ShapeError("layer " + std::to_string(i) + " expects input " +
                             std::to_string(l.input_dim) + " but previous layer emits " +
                             std::to_string(layers[i - 1].output_dim));
        }
        const bool last = i + 1 == layers.size();
        if (last != (l.activation == Activation::softmax)) {
            throw ShapeError("softmax must be the activation of the final layer only");
        }
    }
}

std::vector<LayerSpec> default_architecture(std::size_t input_dim, std::size_t classes) {
    return {{input_dim, 64, Activation::relu},
            {64, 32, Activation::relu},
            {32, classes, Activation::softmax}};
}

ModelParameters::ModelParameters(std::vector<LayerParams> layers) : layers_(std::move(layers)) {
    for (const auto& l : layers_) {
        if (l.bias.size() != l.weight.rows()) {
            throw ShapeError("bias length does not match weight rows");
        }
    }
    const auto arch = architecture();
    validate_architecture(arch);
}

ModelParameters ModelParameters::zeros(std::span<const LayerSpec> arch) {
    validate_architecture(arch);
    std::vector<LayerParams> layers;
    layers.reserve(arch.size());
    for (const auto& s : arch) {
        layers.push_back({Matrix(s.output_dim, s.input_dim), std::vector<double>(s.output_dim, 0.0),
                          s.activation});
    }
    ModelParameters p;
    p.layers_ = std::move(layers);
    return p;
}

ModelParameters ModelParameters::glorot(std::span<const LayerSpec> arch, std::mt19937_64& rng) {
    auto p = zeros(arch);
    for (auto& l : p.layers_) {
        const double limit =
            std::sqrt(6.0 / static_cast<double>(l.weight.rows() + l.weight.cols()));
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (double& w : l.weight.values()) {
            w = dist(rng);
        }
    }
    return p;
}

std::vector<LayerSpec> ModelParameters::architecture() const {
    std::vector<LayerSpec> arch;
    arch.reserve(layers_.size());
    for (const auto& l : layers_) arch.push_back(l.spec());
    return arch;
}

std::size_t ModelParameters::input_dim() const {
    if (layers_.empty()) throw ShapeError("empty model");
    return layers_.front().weight.cols();
}

std::size_t ModelParameters::output_dim() const {
    if (layers_.empty()) throw ShapeError("empty model");
    return layers_.back().weight.rows();
}

std::size_t ModelParameters::parameter_count() const noexcept {
    std::size_t n = 0;
    for (const auto& l : layers_) n += l.weight.size() + l.bias.size();
    return n;
}

bool ModelParameters::same_shape(const ModelParameters& other) const noexcept {
    if (layers_.size() != other.layers_.size()) return false;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        if (layers_[i].spec() != other.layers_[i].spec()) return false;
    }
    return true;
}

bool ModelParameters::all_finite() const noexcept {
    bool ok = true;
    for_each([&](double v) { ok = ok && std::isfinite(v); });
    return ok;
}

std::vector<double> ModelParameters::flatten() const {
    std::vector<double> out;
    out.reserve(parameter_count());
    for_each([&](double v) { out.push_back(v); });
    return out;
}

void ModelParameters::add_scaled(const ModelParameters& other, double scale) {
    if (!same_shape(other)) {
        throw ShapeError("add_scaled: parameter shapes differ");
    }
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        auto dst = layers_[i].weight.values();
        auto src = other.layers_[i].weight.values();
        for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += scale * src[k];
        auto& db = layers_[i].bias;
        const auto& sb = other.layers_[i].bias;
        for (std::size_t k = 0; k < db.size(); ++k) db[k] += scale * sb[k];
    }
}

ModelParameters& ModelParameters::operator+=(const ModelParameters& other) {
    if (!same_shape(other)) {
        throw ShapeError("operator+=: parameter shapes differ");
    }
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        auto dst = layers_[i].weight.values();
        auto src = other.layers_[i].weight.values();
        for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
        auto& db = layers_[i].bias;
        const auto& sb = other.layers_[i].bias;
        for (std::size_t k = 0; k < db.size(); ++k) db[k] += sb[k];
    }
    return *this;
}

ModelParameters& ModelParameters::operator*=(double scale) {
    for_each_mut([scale](double& v) { v *= scale; });
    return *this;
}

namespace {

constexpr char kMagic[4] = {'F', 'R', 'M', 'P'};

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
    static_assert(std::endian::native == std::endian::little, "little-endian host required");
    std::uint8_t buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out.insert(out.end(), buf, buf + sizeof(T));
}

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    template <typename T>
    T get() {
        if (pos_ + sizeof(T) > bytes_.size()) {
            throw std::runtime_error("model file truncated at byte " + std::to_string(pos_));
        }
        T value;
        std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return value;
    }

    [[nodiscard]] bool done() const { return pos_ == bytes_.size(); }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize(const ModelParameters& params) {
    std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
    put<std::uint32_t>(out, kModelFormatVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(params.layers().size()));
    for (const auto& l : params.layers()) {
        put<std::uint64_t>(out, l.weight.rows());
        put<std::uint64_t>(out, l.weight.cols());
        put<std::uint8_t>(out, static_cast<std::uint8_t>(l.activation));
        for (double v : l.weight.values()) put<double>(out, v);
        for (double v : l.bias) put<double>(out, v);
    }
    return out;
}

ModelParameters deserialize(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw std::runtime_error("not a model parameter file");
    }
    Reader r(bytes.subspan(4));
    const auto version = r.get<std::uint32_t>();
    if (version != kModelFormatVersion) {
        throw std::runtime_error("unsupported model format version " + std::to_string(version));
    }
    const auto count = r.get<std::uint32_t>();
    std::vector<LayerParams> layers;
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto rows = r.get<std::uint64_t>();
        const auto cols = r.get<std::uint64_t>();
        const auto act = r.get<std::uint8_t>();
        if (act > 1) throw std::runtime_error("bad activation code in model file");
        if (rows == 0 || cols == 0 || rows > (1u << 20) || cols > (1u << 20)) {
            throw std::runtime_error("implausible layer shape in model file");
        }
        std::vector<double> w(rows * cols);
        for (double& v : w) v = r.get<double>();
        std::vector<double> b(rows);
        for (double& v : b) v = r.get<double>();
        layers.push_back({Matrix(rows, cols, std::move(w)), std::move(b),
                          static_cast<Activation>(act)});
    }
    if (!r.done()) throw std::runtime_error("trailing bytes in model file");
    return ModelParameters(std::move(layers));
}

void save(const ModelParameters& params, const std::string& path) {
    const auto bytes = serialize(params);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

ModelParameters load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)),
                                    std::istreambuf_iterator<char>());
    return deserialize(bytes);
}

std::string parameter_hash(const ModelParameters& params) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint8_t b : serialize(params)) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kHex[h & 0xF];
        h >>= 4;
    }
    return out;
}

}  // namespace fedra::nn
