#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fedra/data/dataset.hpp"
#include "fedra/nn/model.hpp"

namespace fedra::eval {

/// Rows are true classes, columns predicted classes.
class ConfusionMatrix {
public:
    ConfusionMatrix() = default;
    explicit ConfusionMatrix(std::size_t classes) : classes_(classes), counts_(classes * classes, 0) {}
    ConfusionMatrix(std::size_t classes, std::vector<std::uint64_t> counts);

    [[nodiscard]] std::size_t classes() const noexcept { return classes_; }
    [[nodiscard]] std::uint64_t operator()(std::size_t truth, std::size_t predicted) const {
        return counts_.at(truth * classes_ + predicted);
    }
    void add(std::size_t truth, std::size_t predicted);

    [[nodiscard]] std::uint64_t total() const noexcept;
    [[nodiscard]] std::uint64_t correct() const noexcept;
    [[nodiscard]] std::uint64_t row_sum(std::size_t truth) const;
    [[nodiscard]] std::uint64_t col_sum(std::size_t predicted) const;
    [[nodiscard]] const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

private:
    std::size_t classes_ = 0;
    std::vector<std::uint64_t> counts_;
};

struct Metrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;

    friend bool operator==(const Metrics&, const Metrics&) = default;
};

/// Per-class one-vs-rest scores. A class nobody predicted has precision 0; a
/// class absent from the truth has recall 0; F1 is 0 when both are 0.
struct ClassScores {
    std::vector<double> precision;
    std::vector<double> recall;
    std::vector<double> f1;
};

[[nodiscard]] ClassScores class_scores(const ConfusionMatrix& cm);

/// Accuracy = trace / total; precision, recall and F1 are unweighted means of
/// the per-class scores over every class in the matrix.
[[nodiscard]] Metrics metrics_from_confusion(const ConfusionMatrix& cm);

/// Index of the largest entry; ties go to the lowest index.
[[nodiscard]] std::size_t argmax(std::span<const double> row) noexcept;

/// Argmax predictions of `model` for every sample of `test`. Throws
/// std::invalid_argument on an empty test set and nn::ShapeError when the
/// model's output width differs from `classes`.
[[nodiscard]] ConfusionMatrix evaluate(const nn::ModelParameters& model, const data::Dataset& test,
                                       std::size_t classes);

}  // namespace fedra::eval
