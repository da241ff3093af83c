#ifndef FAMREC_CONFIG_HPP_
#define FAMREC_CONFIG_HPP_

#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "famrec/corpus.hpp"
#include "famrec/error.hpp"
#include "famrec/eval.hpp"
#include "famrec/parallel.hpp"
#include "famrec/synth.hpp"

namespace famrec {

struct RunConfig {
    std::filesystem::path data_dir = "data";
    char delimiter = ',';
    std::filesystem::path out_dir = "out";

    std::map<Axis, double> weights;
    std::size_t k = kDefaultNeighborhood;
    std::optional<Instant> split;
    double test_fraction = 0.2;
    std::vector<ModelKind> models = {ModelKind::user, ModelKind::hybrid_user,
                                     ModelKind::hybrid_family};
    std::size_t n_max = 10;
    unsigned workers = default_workers();
    bool cache = false;
    FamilyProtocol family_protocol = FamilyProtocol::per_member;

    SynthConfig synth;

    void validate() const {
        if (n_max < 1 || n_max > 100)
            throw UsageError("n range must lie within 1..100");
        if (k == 0)
            throw UsageError("neighborhood size must be positive");
        if (!(test_fraction > 0 && test_fraction < 1))
            throw UsageError("test fraction must lie in (0, 1)");
        if (models.empty())
            throw UsageError("no models selected");
        if (workers == 0)
            throw UsageError("workers must be positive");
        for (const auto& [axis, w] : weights)
            if (!(w >= 0))
                throw UsageError("blend weight for " + std::string(axis_name(axis)) + " is negative");
    }

    ModelSpec model_spec(ModelKind kind) const { return {kind, k, n_max, weights, family_protocol}; }
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline double config_double(const std::string& key, const std::string& v) {
    auto d = to_double(v);
    if (!d)
        throw UsageError("config key '" + key + "' expects a number, got '" + v + "'");
    return *d;
}

inline std::size_t config_count(const std::string& key, const std::string& v) {
    auto n = to_long(v);
    if (!n || *n < 0)
        throw UsageError("config key '" + key + "' expects a nonnegative integer, got '" + v + "'");
    return static_cast<std::size_t>(*n);
}

inline bool config_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "on" || v == "yes")
        return true;
    if (v == "false" || v == "0" || v == "off" || v == "no")
        return false;
    throw UsageError("config key '" + key + "' expects a boolean, got '" + v + "'");
}

inline Instant config_instant(const std::string& key, const std::string& v) {
    try {
        return parse_instant(v);
    } catch (const DataError&) {
        throw UsageError("config key '" + key + "' expects YYYY-MM-DD HH:MM:SS, got '" + v + "'");
    }
}

} // namespace detail

/// Parses "axis=w[,axis=w...]" into weights.
inline std::map<Axis, double> parse_weights(std::string_view text) {
    std::map<Axis, double> out;
    for (auto part : detail::split_fields(text, ',')) {
        const auto item = detail::trim(part);
        if (item.empty())
            continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw UsageError("weight '" + item + "' is not axis=value");
        const Axis axis = parse_axis(detail::trim(item.substr(0, eq)));
        if (axis == Axis::hybrid)
            throw UsageError("the hybrid axis cannot carry a blend weight");
        out[axis] = detail::config_double("weights", detail::trim(item.substr(eq + 1)));
    }
    return out;
}

inline std::vector<ModelKind> parse_models(std::string_view text) {
    std::vector<ModelKind> out;
    for (auto part : detail::split_fields(text, ','))
        if (auto name = detail::trim(part); !name.empty())
            out.push_back(parse_model(name));
    return out;
}

/// Applies one dotted key, e.g. "run.k" or "synth.users".
inline void apply_setting(RunConfig& cfg, const std::string& key, const std::string& v) {
    using namespace detail;
    auto& s = cfg.synth;
    if (key == "data.dir") cfg.data_dir = v;
    else if (key == "data.delimiter") {
        if (v.size() != 1)
            throw UsageError("data.delimiter must be one character");
        cfg.delimiter = v[0];
    }
    else if (key == "run.out") cfg.out_dir = v;
    else if (key == "run.k") cfg.k = config_count(key, v);
    else if (key == "run.split") cfg.split = config_instant(key, v);
    else if (key == "run.test_fraction") cfg.test_fraction = config_double(key, v);
    else if (key == "run.models") cfg.models = parse_models(v);
    else if (key == "run.n_max") cfg.n_max = config_count(key, v);
    else if (key == "run.workers") cfg.workers = static_cast<unsigned>(config_count(key, v));
    else if (key == "run.cache") cfg.cache = config_bool(key, v);
    else if (key == "run.family_protocol") cfg.family_protocol = parse_protocol(v);
    else if (key.rfind("blend.", 0) == 0) {
        const Axis axis = parse_axis(key.substr(6));
        if (axis == Axis::hybrid)
            throw UsageError("the hybrid axis cannot carry a blend weight");
        cfg.weights[axis] = config_double(key, v);
    }
    else if (key == "synth.seed") s.seed = config_count(key, v);
    else if (key == "synth.users") s.users = config_count(key, v);
    else if (key == "synth.families") s.families = config_count(key, v);
    else if (key == "synth.transactions") s.transactions = config_count(key, v);
    else if (key == "synth.visits") s.visits = config_count(key, v);
    else if (key == "synth.participations") s.participations = config_count(key, v);
    else if (key == "synth.brands") s.brands = config_count(key, v);
    else if (key == "synth.types") s.types = config_count(key, v);
    else if (key == "synth.categories") s.categories = config_count(key, v);
    else if (key == "synth.activities") s.activities = config_count(key, v);
    else if (key == "synth.products") s.products = config_count(key, v);
    else if (key == "synth.zipf_exponent") s.zipf_exponent = config_double(key, v);
    else if (key == "synth.family_correlation") s.family_correlation = config_double(key, v);
    else if (key == "synth.noise") s.noise = config_double(key, v);
    else if (key == "synth.taste_size") s.taste_size = config_count(key, v);
    else if (key == "synth.activity_taste_size") s.activity_taste_size = config_count(key, v);
    else if (key == "synth.segments") s.segments = config_count(key, v);
    else if (key == "synth.segment_pool_size") s.segment_pool_size = config_count(key, v);
    else if (key == "synth.start") s.start = config_instant(key, v);
    else if (key == "synth.end") s.end = config_instant(key, v);
    else if (key == "synth.family_size_weights") {
        s.family_size_weights.clear();
        for (auto part : split_fields(v, ','))
            s.family_size_weights.push_back(config_double(key, trim(part)));
    }
    else throw UsageError("unknown config key '" + key + "'");
}

/// Line-oriented key=value text. "[section]" lines prefix the keys that
/// follow; '#' starts a comment line.
inline void read_config(std::istream& in, RunConfig& cfg) {
    std::string line, section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = detail::trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw UsageError("config line " + std::to_string(line_no) + ": bad section header");
            section = detail::trim(std::string_view(t).substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw UsageError("config line " + std::to_string(line_no) + ": expected key=value");
        std::string key = detail::trim(std::string_view(t).substr(0, eq));
        if (!section.empty())
            key = section + "." + key;
        apply_setting(cfg, key, detail::trim(std::string_view(t).substr(eq + 1)));
    }
}

inline void read_config(const std::filesystem::path& path, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in)
        throw UsageError("cannot read config " + path.string());
    read_config(in, cfg);
}

} // namespace famrec

#endif // FAMREC_CONFIG_HPP_
