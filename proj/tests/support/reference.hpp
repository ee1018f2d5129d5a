#pragma once

// Test-only reference implementations. These deliberately avoid the library's
// Matrix kernels and loss code: plain nested loops over std::vector.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "fedra/nn/model.hpp"
#include "fedra/nn/network.hpp"

namespace fedra::testing {

using Rows = std::vector<std::vector<double>>;

inline Rows to_rows(const nn::Matrix& m) {
    Rows out(m.rows(), std::vector<double>(m.cols()));
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out[r][c] = m(r, c);
    return out;
}

/// Scalar forward pass for one sample.
inline std::vector<double> reference_forward(const nn::ModelParameters& p, std::vector<double> x) {
    for (const auto& layer : p.layers()) {
        std::vector<double> z(layer.weight.rows());
        for (std::size_t o = 0; o < z.size(); ++o) {
            double acc = layer.bias[o];
            for (std::size_t i = 0; i < x.size(); ++i) acc += layer.weight(o, i) * x[i];
            z[o] = acc;
        }
        if (layer.activation == nn::Activation::relu) {
            for (double& v : z) v = std::max(0.0, v);
        } else {
            double mx = z[0];
            for (double v : z) mx = std::max(mx, v);
            double sum = 0.0;
            for (double& v : z) {
                v = std::exp(v - mx);
                sum += v;
            }
            for (double& v : z) v /= sum;
        }
        x = std::move(z);
    }
    return x;
}

/// Scalar weighted loss over a batch, same clamp as the library.
inline double reference_loss(const nn::ModelParameters& p, const Rows& batch,
                             const std::vector<std::size_t>& labels,
                             const std::vector<double>& alpha) {
    double total = 0.0;
    for (std::size_t s = 0; s < batch.size(); ++s) {
        const auto probs = reference_forward(p, batch[s]);
        const double q = std::max(probs[labels[s]], 1e-12);
        total += alpha[labels[s]] * -std::log(q);
    }
    return total / static_cast<double>(batch.size());
}

/// Central finite-difference gradient of reference_loss, same layout as
/// ModelParameters::flatten().
inline std::vector<double> finite_difference_gradient(nn::ModelParameters p, const Rows& batch,
                                                      const std::vector<std::size_t>& labels,
                                                      const std::vector<double>& alpha,
                                                      double h = 1e-5) {
    std::vector<double> grad;
    auto probe = [&](double& v) {
        const double saved = v;
        v = saved + h;
        const double up = reference_loss(p, batch, labels, alpha);
        v = saved - h;
        const double down = reference_loss(p, batch, labels, alpha);
        v = saved;
        grad.push_back((up - down) / (2.0 * h));
    };
    for (auto& layer : p.layers()) {
        for (double& v : layer.weight.values()) probe(v);
        for (double& v : layer.bias) probe(v);
    }
    return grad;
}

inline nn::Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng,
                                double scale = 1.0) {
    nn::Matrix m(rows, cols);
    std::normal_distribution<double> nd(0.0, scale);
    for (double& v : m.values()) v = nd(rng);
    return m;
}

/// Random parameters (not Glorot) including nonzero biases.
inline nn::ModelParameters random_params(const std::vector<nn::LayerSpec>& arch,
                                         std::mt19937_64& rng, double scale = 0.5) {
    auto p = nn::ModelParameters::zeros(arch);
    std::normal_distribution<double> nd(0.0, scale);
    p.for_each_mut([&](double& v) { v = nd(rng); });
    return p;
}

}  // namespace fedra::testing
