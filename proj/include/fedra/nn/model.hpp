#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fedra/nn/matrix.hpp"

namespace fedra::nn {

enum class Activation : std::uint8_t { relu = 0, softmax = 1 };

[[nodiscard]] std::string_view to_string(Activation a);
[[nodiscard]] Activation activation_from_string(std::string_view name);

struct LayerSpec {
    std::size_t input_dim = 0;
    std::size_t output_dim = 0;
    Activation activation = Activation::relu;

    friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

/// Checks dimension chaining and that softmax appears exactly once, last.
void validate_architecture(std::span<const LayerSpec> layers);

/// 15 -> 64 (relu) -> 32 (relu) -> classes (softmax).
[[nodiscard]] std::vector<LayerSpec> default_architecture(std::size_t input_dim,
                                                          std::size_t classes);

struct LayerParams {
    Matrix weight;              // output_dim x input_dim
    std::vector<double> bias;   // output_dim
    Activation activation = Activation::relu;

    [[nodiscard]] LayerSpec spec() const {
        return {weight.cols(), weight.rows(), activation};
    }

    friend bool operator==(const LayerParams&, const LayerParams&) = default;
};

/// Every weight and bias of a feedforward network, in layer order. Also used
/// for gradients, which share the exact same shape.
class ModelParameters {
public:
    ModelParameters() = default;
    explicit ModelParameters(std::vector<LayerParams> layers);

    /// All-zero parameters for the given architecture.
    [[nodiscard]] static ModelParameters zeros(std::span<const LayerSpec> arch);

    /// Glorot-uniform weights, zero biases.
    [[nodiscard]] static ModelParameters glorot(std::span<const LayerSpec> arch,
                                                std::mt19937_64& rng);

    [[nodiscard]] const std::vector<LayerParams>& layers() const noexcept { return layers_; }
    [[nodiscard]] std::vector<LayerParams>& layers() noexcept { return layers_; }
    [[nodiscard]] std::vector<LayerSpec> architecture() const;
    [[nodiscard]] std::size_t input_dim() const;
    [[nodiscard]] std::size_t output_dim() const;
    [[nodiscard]] std::size_t parameter_count() const noexcept;

    [[nodiscard]] bool same_shape(const ModelParameters& other) const noexcept;
    [[nodiscard]] bool all_finite() const noexcept;

    /// Visits every scalar in canonical order: per layer, weights row-major then bias.
    template <typename F>
    void for_each(F&& f) const {
        for (const auto& l : layers_) {
            for (double v : l.weight.values()) f(v);
            for (double v : l.bias) f(v);
        }
    }
    template <typename F>
    void for_each_mut(F&& f) {
        for (auto& l : layers_) {
            for (double& v : l.weight.values()) f(v);
            for (double& v : l.bias) f(v);
        }
    }

    [[nodiscard]] std::vector<double> flatten() const;

    /// this += scale * other
    void add_scaled(const ModelParameters& other, double scale);
    ModelParameters& operator+=(const ModelParameters& other);
    ModelParameters& operator*=(double scale);

    friend ModelParameters operator+(ModelParameters a, const ModelParameters& b) {
        a += b;
        return a;
    }
    friend ModelParameters operator*(double s, ModelParameters a) {
        a *= s;
        return a;
    }

    friend bool operator==(const ModelParameters&, const ModelParameters&) = default;

private:
    std::vector<LayerParams> layers_;
};

// Binary container: "FRMP" magic, u32 version, u32 layer count, then per
// layer u64 rows, u64 cols, u8 activation, rows*cols weights, rows biases.
// Integers and IEEE-754 doubles are little-endian.
inline constexpr std::uint32_t kModelFormatVersion = 1;

[[nodiscard]] std::vector<std::uint8_t> serialize(const ModelParameters& params);
[[nodiscard]] ModelParameters deserialize(std::span<const std::uint8_t> bytes);

void save(const ModelParameters& params, const std::string& path);
[[nodiscard]] ModelParameters load(const std::string& path);

/// FNV-1a 64 over the serialized form, as 16 lowercase hex digits.
[[nodiscard]] std::string parameter_hash(const ModelParameters& params);

}  // namespace fedra::nn
