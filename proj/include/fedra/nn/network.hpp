#pragma once

#include <span>
#include <vector>

#include "fedra/nn/matrix.hpp"
#include "fedra/nn/model.hpp"

namespace fedra::nn {

/// Probabilities are clamped to [kProbabilityFloor, 1] before taking logs.
inline constexpr double kProbabilityFloor = 1e-12;

/// Per-class loss multipliers, indexed by class.
struct ClassWeightVector {
    std::vector<double> weights;

    [[nodiscard]] std::size_t size() const noexcept { return weights.size(); }
    [[nodiscard]] double operator[](std::size_t c) const { return weights[c]; }
    [[nodiscard]] static ClassWeightVector uniform(std::size_t classes) {
        return {std::vector<double>(classes, 1.0)};
    }

    friend bool operator==(const ClassWeightVector&, const ClassWeightVector&) = default;
};

/// Row-wise softmax with max subtraction, in place.
void softmax_rows(Matrix& logits);

/// Class probabilities for every row of `batch`.
[[nodiscard]] Matrix forward(const ModelParameters& params, const Matrix& batch);

/// Mean categorical cross-entropy. `truth` must be one-hot.
[[nodiscard]] double cross_entropy(const Matrix& pred, const Matrix& truth);

/// Mean of alpha[true class] * -log p[true class] over the batch.
[[nodiscard]] double weighted_cross_entropy(const Matrix& pred, const Matrix& truth,
                                            const ClassWeightVector& weights);

/// Label-indexed form of the (weighted) loss; null weights means all ones.
[[nodiscard]] double weighted_cross_entropy(const Matrix& pred, std::span<const std::size_t> labels,
                                            const ClassWeightVector* weights);

struct LossAndGradient {
    double loss = 0.0;
    ModelParameters gradient;
};

/// Loss of one batch plus its exact gradient w.r.t. every parameter.
[[nodiscard]] LossAndGradient loss_and_gradient(const ModelParameters& params, const Matrix& batch,
                                                std::span<const std::size_t> labels,
                                                const ClassWeightVector* weights);

/// Gradient of weighted_cross_entropy(forward(params, batch), truth, weights).
[[nodiscard]] ModelParameters backward(const ModelParameters& params, const Matrix& batch,
                                       const Matrix& truth, const ClassWeightVector& weights);

/// params - learning_rate * gradient.
[[nodiscard]] ModelParameters sgd_step(const ModelParameters& params,
                                       const ModelParameters& gradient, double learning_rate);

/// Labels recovered from one-hot rows; throws if a row is not one-hot.
[[nodiscard]] std::vector<std::size_t> labels_from_one_hot(const Matrix& truth);

}  // namespace fedra::nn
