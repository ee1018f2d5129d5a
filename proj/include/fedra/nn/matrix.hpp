#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fedra::nn {

/// Raised whenever operand dimensions do not line up.
class ShapeError : public std::invalid_argument {
public:
    explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    [[nodiscard]] std::span<double> row(std::size_t r) noexcept {
        return {data_.data() + r * cols_, cols_};
    }
    [[nodiscard]] std::span<const double> row(std::size_t r) const noexcept {
        return {data_.data() + r * cols_, cols_};
    }

    [[nodiscard]] std::span<double> values() noexcept { return data_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return data_; }

    [[nodiscard]] Matrix transposed() const;
    [[nodiscard]] bool all_finite() const noexcept;

    /// Copies the given rows (by index) into a new matrix.
    [[nodiscard]] Matrix gather_rows(std::span<const std::size_t> indices) const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// out = a * b^T  (a: n x k, b: m x k, out: n x m)
void multiply_transposed(const Matrix& a, const Matrix& b, Matrix& out);

/// out = a * b  (a: n x k, b: k x m, out: n x m)
void multiply(const Matrix& a, const Matrix& b, Matrix& out);

/// out = a^T * b  (a: n x m, b: n x k, out: m x k)
void multiply_lhs_transposed(const Matrix& a, const Matrix& b, Matrix& out);

/// One-hot encoding of class labels.
[[nodiscard]] Matrix one_hot(std::span<const std::size_t> labels, std::size_t classes);

}  // namespace fedra::nn
