#include "fedra/nn/network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fedra::nn {

namespace {

void check_input(const ModelParameters& params, const Matrix& batch) {
    if (params.layers().empty()) {
        throw ShapeError("model has no layers");
    }
    if (batch.cols() != params.input_dim()) {
        throw ShapeError("batch has " + std::to_string(batch.cols()) +
                         " columns, model expects " + std::to_string(params.input_dim()));
    }
}

// z = a * W^T + b for every row.
Matrix affine(const LayerParams& layer, const Matrix& a) {
    Matrix z;
    multiply_transposed(a, layer.weight, z);
    for (std::size_t r = 0; r < z.rows(); ++r) {
        auto row = z.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) row[c] += layer.bias[c];
    }
    return z;
}

void relu_inplace(Matrix& m) {
    for (double& v : m.values()) v = v > 0.0 ? v : 0.0;
}

// activations[0] is the input; activations[l + 1] is the output of layer l.
std::vector<Matrix> forward_trace(const ModelParameters& params, const Matrix& batch) {
    check_input(params, batch);
    std::vector<Matrix> acts;
    acts.reserve(params.layers().size() + 1);
    acts.push_back(batch);
    for (const auto& layer : params.layers()) {
        Matrix z = affine(layer, acts.back());
        if (layer.activation == Activation::relu) {
            relu_inplace(z);
        } else {
            softmax_rows(z);
        }
        acts.push_back(std::move(z));
    }
    return acts;
}

void check_pred_truth(const Matrix& pred, const Matrix& truth) {
    if (pred.rows() != truth.rows() || pred.cols() != truth.cols()) {
        throw ShapeError("prediction and truth shapes differ");
    }
    if (pred.rows() == 0) {
        throw ShapeError("empty batch");
    }
}

}  // namespace

void softmax_rows(Matrix& logits) {
    for (std::size_t r = 0; r < logits.rows(); ++r) {
        auto row = logits.row(r);
        const double mx = *std::max_element(row.begin(), row.end());
        double sum = 0.0;
        for (double& v : row) {
            v = std::exp(v - mx);
            sum += v;
        }
        for (double& v : row) v /= sum;
    }
}

Matrix forward(const ModelParameters& params, const Matrix& batch) {
    auto acts = forward_trace(params, batch);
    return std::move(acts.back());
}

std::vector<std::size_t> labels_from_one_hot(const Matrix& truth) {
    std::vector<std::size_t> labels(truth.rows());
    for (std::size_t r = 0; r < truth.rows(); ++r) {
        std::size_t ones = 0;
        for (std::size_t c = 0; c < truth.cols(); ++c) {
            const double v = truth(r, c);
            if (v == 1.0) {
                labels[r] = c;
                ++ones;
            } else if (v != 0.0) {
                ones = 2;
            }
        }
        if (ones != 1) {
            throw std::invalid_argument("truth row " + std::to_string(r) + " is not one-hot");
        }
    }
    return labels;
}

double weighted_cross_entropy(const Matrix& pred, std::span<const std::size_t> labels,
                              const ClassWeightVector* weights) {
    if (pred.rows() != labels.size() || pred.rows() == 0) {
        throw ShapeError("prediction rows and label count differ or are zero");
    }
    if (weights != nullptr && weights->size() != pred.cols()) {
        throw ShapeError("class weight vector length " + std::to_string(weights->size()) +
                         " != class count " + std::to_string(pred.cols()));
    }
    double total = 0.0;
    for (std::size_t s = 0; s < labels.size(); ++s) {
        const std::size_t c = labels[s];
        if (c >= pred.cols()) throw ShapeError("label outside class range");
        const double p = std::max(pred(s, c), kProbabilityFloor);
        const double alpha = weights != nullptr ? (*weights)[c] : 1.0;
        total += alpha * -std::log(p);
    }
    return total / static_cast<double>(labels.size());
}

double cross_entropy(const Matrix& pred, const Matrix& truth) {
    check_pred_truth(pred, truth);
    const auto labels = labels_from_one_hot(truth);
    return weighted_cross_entropy(pred, labels, nullptr);
}

double weighted_cross_entropy(const Matrix& pred, const Matrix& truth,
                              const ClassWeightVector& weights) {
    check_pred_truth(pred, truth);
    const auto labels = labels_from_one_hot(truth);
    return weighted_cross_entropy(pred, labels, &weights);
}

LossAndGradient loss_and_gradient(const ModelParameters& params, const Matrix& batch,
                                  std::span<const std::size_t> labels,
                                  const ClassWeightVector* weights) {
    if (batch.rows() != labels.size()) {
        throw ShapeError("batch rows and label count differ");
    }
    auto acts = forward_trace(params, batch);
    const Matrix& probs = acts.back();
    LossAndGradient out;
    out.loss = weighted_cross_entropy(probs, labels, weights);

    const auto n = static_cast<double>(batch.rows());
    // dL/dz at the softmax layer: alpha_c / n * (p - onehot), zero where the
    // clamp is active since the clamped loss is flat there.
    Matrix delta = probs;
    for (std::size_t s = 0; s < labels.size(); ++s) {
        const std::size_t c = labels[s];
        auto row = delta.row(s);
        if (probs(s, c) < kProbabilityFloor) {
            std::fill(row.begin(), row.end(), 0.0);
            continue;
        }
        const double scale = (weights != nullptr ? (*weights)[c] : 1.0) / n;
        row[c] -= 1.0;
        for (double& v : row) v *= scale;
    }

    const auto& layers = params.layers();
    std::vector<LayerParams> grads(layers.size());
    for (std::size_t li = layers.size(); li-- > 0;) {
        const Matrix& input = acts[li];
        auto& g = grads[li];
        g.activation = layers[li].activation;
        multiply_lhs_transposed(delta, input, g.weight);
        g.bias.assign(delta.cols(), 0.0);
        for (std::size_t r = 0; r < delta.rows(); ++r) {
            const auto row = delta.row(r);
            for (std::size_t c = 0; c < row.size(); ++c) g.bias[c] += row[c];
        }
        if (li == 0) break;
        Matrix upstream;
        multiply(delta, layers[li].weight, upstream);
        // Hidden layers are relu; its derivative is taken as 0 at 0.
        const auto in_vals = input.values();
        auto up_vals = upstream.values();
        for (std::size_t k = 0; k < up_vals.size(); ++k) {
            if (!(in_vals[k] > 0.0)) up_vals[k] = 0.0;
        }
        delta = std::move(upstream);
    }
    out.gradient = ModelParameters(std::move(grads));
    return out;
}

ModelParameters backward(const ModelParameters& params, const Matrix& batch, const Matrix& truth,
                         const ClassWeightVector& weights) {
    const auto labels = labels_from_one_hot(truth);
    if (truth.cols() != params.output_dim()) {
        throw ShapeError("truth has " + std::to_string(truth.cols()) + " classes, model emits " +
                         std::to_string(params.output_dim()));
    }
    return loss_and_gradient(params, batch, labels, &weights).gradient;
}

ModelParameters sgd_step(const ModelParameters& params, const ModelParameters& gradient,
                         double learning_rate) {
    ModelParameters out = params;
    out.add_scaled(gradient, -learning_rate);
    return out;
}

}  // namespace fedra::nn
