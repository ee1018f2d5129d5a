#include "fedra/data/synthetic.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "fedra/rng.hpp"

namespace fedra::data {

std::vector<ClassSpec> default_synthetic_spec(double separation, double benign_separation,
                                              std::size_t family_count, std::size_t benign_count) {
    const auto& reg = ClassRegistry::multiclass();
    const double offset = separation / std::sqrt(2.0);
    if (!(separation > 0.0) || !(benign_separation >= offset)) {
        throw std::invalid_argument("benign separation must be at least separation / sqrt(2)");
    }
    const double benign_offset =
        std::sqrt(benign_separation * benign_separation - offset * offset);
    std::vector<ClassSpec> spec;
    for (std::size_t c = 0; c < reg.size(); ++c) {
        ClassSpec s;
        s.family = reg.name(c);
        s.mean[c] = c == reg.benign_label() ? benign_offset : offset;
        s.stddev = 1.0;
        s.count = c == reg.benign_label() ? benign_count : family_count;
        spec.push_back(std::move(s));
    }
    return spec;
}

Dataset generate_synthetic(const std::vector<ClassSpec>& spec, std::uint64_t seed) {
    const auto& reg = ClassRegistry::multiclass();
    Dataset ds;
    for (std::size_t c = 0; c < spec.size(); ++c) {
        const auto& s = spec[c];
        if (!(s.stddev > 0.0) || !std::isfinite(s.stddev)) {
            throw std::invalid_argument("class " + s.family + ": stddev must be positive");
        }
        for (double m : s.mean) {
            if (!std::isfinite(m)) throw std::invalid_argument("class " + s.family + ": non-finite mean");
        }
        const std::string family = canonical_family(s.family);
        const std::size_t label = reg.label_of(family);
        auto rng = make_stream(seed, {stream_tag::synth, c});
        std::normal_distribution<double> noise(0.0, s.stddev);
        for (std::size_t i = 0; i < s.count; ++i) {
            FeatureVector fv;
            for (std::size_t d = 0; d < kFeatureCount; ++d) fv.features[d] = s.mean[d] + noise(rng);
            fv.label = label;
            fv.family_name = family;
            ds.push_back(std::move(fv));
        }
    }
    return ds;
}

}  // namespace fedra::data
