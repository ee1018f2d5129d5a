#include "fedra/nn/matrix.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Core>

namespace fedra::nn {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) {
        throw ShapeError("matrix data length " + std::to_string(data_.size()) + " != " +
                         std::to_string(rows) + "x" + std::to_string(cols));
    }
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            t(c, r) = (*this)(r, c);
        }
    }
    return t;
}

bool Matrix::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix Matrix::gather_rows(std::span<const std::size_t> indices) const {
    Matrix out(indices.size(), cols_);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= rows_) {
            throw ShapeError("row index " + std::to_string(indices[i]) + " out of range");
        }
        std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(indices[i] * cols_), cols_,
                    out.data_.begin() + static_cast<std::ptrdiff_t>(i * cols_));
    }
    return out;
}

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstView = Eigen::Map<const RowMajor>;
using View = Eigen::Map<RowMajor>;

ConstView view(const Matrix& m) {
    return {m.values().data(), static_cast<Eigen::Index>(m.rows()),
            static_cast<Eigen::Index>(m.cols())};
}

View view(Matrix& m) {
    return {m.values().data(), static_cast<Eigen::Index>(m.rows()),
            static_cast<Eigen::Index>(m.cols())};
}

}  // namespace

void multiply_transposed(const Matrix& a, const Matrix& b, Matrix& out) {
    if (a.cols() != b.cols()) {
        throw ShapeError("multiply_transposed: inner dimensions " + std::to_string(a.cols()) +
                         " vs " + std::to_string(b.cols()));
    }
    out = Matrix(a.rows(), b.rows());
    view(out).noalias() = view(a) * view(b).transpose();
}

void multiply(const Matrix& a, const Matrix& b, Matrix& out) {
    if (a.cols() != b.rows()) {
        throw ShapeError("multiply: inner dimensions " + std::to_string(a.cols()) + " vs " +
                         std::to_string(b.rows()));
    }
    out = Matrix(a.rows(), b.cols());
    view(out).noalias() = view(a) * view(b);
}

void multiply_lhs_transposed(const Matrix& a, const Matrix& b, Matrix& out) {
    if (a.rows() != b.rows()) {
        throw ShapeError("multiply_lhs_transposed: row counts " + std::to_string(a.rows()) +
                         " vs " + std::to_string(b.rows()));
    }
    out = Matrix(a.cols(), b.cols());
    view(out).noalias() = view(a).transpose() * view(b);
}

Matrix one_hot(std::span<const std::size_t> labels, std::size_t classes) {
    Matrix out(labels.size(), classes);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= classes) {
            throw ShapeError("label " + std::to_string(labels[i]) + " outside " +
                             std::to_string(classes) + " classes");
        }
        out(i, labels[i]) = 1.0;
    }
    return out;
}

}  // namespace fedra::nn
