#include "fedra/eval/metrics.hpp"

#include <stdexcept>

#include "fedra/nn/network.hpp"

namespace fedra::eval {

ConfusionMatrix::ConfusionMatrix(std::size_t classes, std::vector<std::uint64_t> counts)
    : classes_(classes), counts_(std::move(counts)) {
    if (counts_.size() != classes_ * classes_) {
        throw std::invalid_argument("confusion matrix needs classes^2 counts");
    }
}

void ConfusionMatrix::add(std::size_t truth, std::size_t predicted) {
    if (truth >= classes_ || predicted >= classes_) {
        throw std::out_of_range("class index outside confusion matrix");
    }
    ++counts_[truth * classes_ + predicted];
}

std::uint64_t ConfusionMatrix::total() const noexcept {
    std::uint64_t t = 0;
    for (auto c : counts_) t += c;
    return t;
}

std::uint64_t ConfusionMatrix::correct() const noexcept {
    std::uint64_t t = 0;
    for (std::size_t c = 0; c < classes_; ++c) t += counts_[c * classes_ + c];
    return t;
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t truth) const {
    std::uint64_t t = 0;
    for (std::size_t c = 0; c < classes_; ++c) t += (*this)(truth, c);
    return t;
}

std::uint64_t ConfusionMatrix::col_sum(std::size_t predicted) const {
    std::uint64_t t = 0;
    for (std::size_t r = 0; r < classes_; ++r) t += (*this)(r, predicted);
    return t;
}

ClassScores class_scores(const ConfusionMatrix& cm) {
    ClassScores s;
    for (std::size_t c = 0; c < cm.classes(); ++c) {
        const auto tp = static_cast<double>(cm(c, c));
        const auto predicted = cm.col_sum(c);
        const auto actual = cm.row_sum(c);
        const double p = predicted == 0 ? 0.0 : tp / static_cast<double>(predicted);
        const double r = actual == 0 ? 0.0 : tp / static_cast<double>(actual);
        s.precision.push_back(p);
        s.recall.push_back(r);
        s.f1.push_back(p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r));
    }
    return s;
}

Metrics metrics_from_confusion(const ConfusionMatrix& cm) {
    Metrics m;
    const auto total = cm.total();
    if (total == 0 || cm.classes() == 0) return m;
    m.accuracy = static_cast<double>(cm.correct()) / static_cast<double>(total);
    const auto s = class_scores(cm);
    const auto q = static_cast<double>(cm.classes());
    for (std::size_t c = 0; c < cm.classes(); ++c) {
        m.precision += s.precision[c];
        m.recall += s.recall[c];
        m.f1 += s.f1[c];
    }
    m.precision /= q;
    m.recall /= q;
    m.f1 /= q;
    return m;
}

std::size_t argmax(std::span<const double> row) noexcept {
    std::size_t best = 0;
    for (std::size_t i = 1; i < row.size(); ++i) {
        if (row[i] > row[best]) best = i;
    }
    return best;
}

ConfusionMatrix evaluate(const nn::ModelParameters& model, const data::Dataset& test,
                         std::size_t classes) {
    if (test.empty()) throw std::invalid_argument("cannot evaluate on an empty test set");
    if (model.output_dim() != classes) {
        throw nn::ShapeError("model emits " + std::to_string(model.output_dim()) +
                             " classes, test set has " + std::to_string(classes));
    }
    const auto probs = nn::forward(model, data::feature_matrix(test));
    ConfusionMatrix cm(classes);
    for (std::size_t i = 0; i < test.size(); ++i) cm.add(test[i].label, argmax(probs.row(i)));
    return cm;
}

}  // namespace fedra::eval
