#include "fedra/data/dataset.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fedra::data {

std::string_view to_string(Task t) {
    return t == Task::binary ? "binary" : "multiclass";
}

Task task_from_string(std::string_view name) {
    if (name == "binary") return Task::binary;
    if (name == "multiclass") return Task::multiclass;
    throw std::invalid_argument("unknown task '" + std::string(name) + "'");
}

namespace {

const std::vector<std::string>& family_order() {
    static const std::vector<std::string> names = {
        "Sodinokibi", "LockBit", "Babuk",    "DJVu",     "NetWalker",
        "Chaos",      "Hive",    "BlackCat", "WannaCry", "Benign"};
    return names;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace

std::string canonical_family(std::string_view family) {
    const std::string key = lower(family);
    for (const auto& name : family_order()) {
        if (lower(name) == key) return name;
    }
    if (key == "babyk" || key == "babuk/babyk") return "Babuk";
    if (key == "revil" || key == "sodinokibi/revil") return "Sodinokibi";
    if (key == "stop" || key == "djvu/stop" || key == "djvu (stop)") return "DJVu";
    if (key == "benign apps") return "Benign";
    throw std::invalid_argument("unknown family '" + std::string(family) + "'");
}

const ClassRegistry& ClassRegistry::multiclass() {
    static const ClassRegistry r(Task::multiclass, family_order(), 9);
    return r;
}

const ClassRegistry& ClassRegistry::binary() {
    static const ClassRegistry r(Task::binary, {"Benign", "Malware"}, 0);
    return r;
}

const ClassRegistry& ClassRegistry::for_task(Task t) {
    return t == Task::binary ? binary() : multiclass();
}

std::size_t ClassRegistry::label_of(std::string_view family) const {
    const std::string canon = canonical_family(family);
    if (task_ == Task::binary) {
        return canon == "Benign" ? 0 : 1;
    }
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == canon) return i;
    }
    throw std::invalid_argument("family '" + std::string(family) + "' not in registry");
}

Dataset relabel(const Dataset& ds, const ClassRegistry& registry) {
    Dataset out = ds;
    for (auto& s : out) s.label = registry.label_of(s.family_name);
    return out;
}

std::vector<std::size_t> class_counts(const Dataset& ds, std::size_t classes) {
    std::vector<std::size_t> counts(classes, 0);
    for (const auto& s : ds) {
        if (s.label >= classes) throw std::out_of_range("label outside class range");
        ++counts[s.label];
    }
    return counts;
}

nn::Matrix feature_matrix(const Dataset& ds) {
    nn::Matrix m(ds.size(), kFeatureCount);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        auto row = m.row(i);
        std::copy(ds[i].features.begin(), ds[i].features.end(), row.begin());
    }
    return m;
}

std::vector<std::size_t> labels_of(const Dataset& ds) {
    std::vector<std::size_t> labels;
    labels.reserve(ds.size());
    for (const auto& s : ds) labels.push_back(s.label);
    return labels;
}

Dataset select(const Dataset& ds, std::span<const std::size_t> indices) {
    Dataset out;
    out.reserve(indices.size());
    for (auto i : indices) out.push_back(ds.at(i));
    return out;
}

Normalizer Normalizer::fit(const Dataset& ds) {
    Normalizer n;
    if (ds.empty()) {
        n.stddev.fill(1.0);
        return n;
    }
    const auto count = static_cast<double>(ds.size());
    for (const auto& s : ds) {
        for (std::size_t d = 0; d < kFeatureCount; ++d) n.mean[d] += s.features[d];
    }
    for (double& m : n.mean) m /= count;
    for (const auto& s : ds) {
        for (std::size_t d = 0; d < kFeatureCount; ++d) {
            const double diff = s.features[d] - n.mean[d];
            n.stddev[d] += diff * diff;
        }
    }
    for (double& v : n.stddev) {
        v = std::sqrt(v / count);
        if (!(v > 0.0) || !std::isfinite(v)) v = 1.0;
    }
    return n;
}

void Normalizer::apply(Dataset& ds) const {
    for (auto& s : ds) {
        for (std::size_t d = 0; d < kFeatureCount; ++d) {
            s.features[d] = (s.features[d] - mean[d]) / stddev[d];
        }
    }
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw std::runtime_error("cannot format double");
    return {buf, ptr};
}

std::optional<double> parse_double(std::string_view s) {
    double v = 0.0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end) return std::nullopt;
    return v;
}

void write_dataset(std::ostream& os, const Dataset& ds) {
    for (std::size_t d = 0; d < kFeatureCount; ++d) os << 'f' << (d + 1) << ',';
    os << "family\n";
    for (const auto& s : ds) {
        for (double v : s.features) os << format_double(v) << ',';
        os << s.family_name << '\n';
    }
}

void write_dataset(const std::string& path, const Dataset& ds) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_dataset(os, ds);
    if (!os) throw std::runtime_error("write failed: " + path);
}

Dataset read_dataset(std::istream& is, const ClassRegistry& registry) {
    std::string line;
    if (!std::getline(is, line)) {
        throw std::runtime_error("dataset file is empty (missing header)");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::ostringstream expected;
    for (std::size_t d = 0; d < kFeatureCount; ++d) expected << 'f' << (d + 1) << ',';
    expected << "family";
    if (line != expected.str()) {
        throw std::runtime_error("unexpected dataset header: " + line);
    }
    Dataset ds;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        FeatureVector fv;
        std::string_view rest(line);
        for (std::size_t d = 0; d < kFeatureCount; ++d) {
            const auto comma = rest.find(',');
            if (comma == std::string_view::npos) {
                throw std::runtime_error("line " + std::to_string(lineno) + ": too few columns");
            }
            const auto v = parse_double(rest.substr(0, comma));
            if (!v || !std::isfinite(*v)) {
                throw std::runtime_error("line " + std::to_string(lineno) + ": bad value in column f" +
                                         std::to_string(d + 1));
            }
            fv.features[d] = *v;
            rest.remove_prefix(comma + 1);
        }
        if (rest.find(',') != std::string_view::npos) {
            throw std::runtime_error("line " + std::to_string(lineno) + ": too many columns");
        }
        fv.family_name = canonical_family(rest);
        fv.label = registry.label_of(fv.family_name);
        ds.push_back(std::move(fv));
    }
    return ds;
}

Dataset read_dataset(const std::string& path, const ClassRegistry& registry) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open dataset " + path);
    return read_dataset(is, registry);
}

}  // namespace fedra::data
