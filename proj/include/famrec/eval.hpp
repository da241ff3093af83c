#ifndef FAMREC_EVAL_HPP_
#define FAMREC_EVAL_HPP_

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "famrec/aggregate.hpp"
#include "famrec/corpus.hpp"
#include "famrec/error.hpp"
#include "famrec/parallel.hpp"
#include "famrec/recommend.hpp"
#include "famrec/simcore.hpp"

namespace famrec {

/// actor -> sorted, duplicate-free item list
using ItemSets = std::map<std::string, std::vector<std::string>>;

// ---------------------------------------------------------------------------
// Metrics

/// Pooled sums behind recall and precision. Actors with an empty test
/// basket contribute to neither.
struct HitCounts {
    std::size_t hits = 0;
    std::size_t relevant = 0;     // Σ |T(u)|
    std::size_t recommended = 0;  // Σ |R(u)|
    std::size_t population = 0;   // actors with a nonempty T(u)
};

inline HitCounts count_hits(const ItemSets& recommendations, const ItemSets& test_baskets) {
    HitCounts c;
    for (const auto& [actor, test] : test_baskets) {
        if (test.empty())
            continue;
        ++c.population;
        c.relevant += test.size();
        auto it = recommendations.find(actor);
        if (it == recommendations.end())
            continue;
        c.recommended += it->second.size();
        for (const auto& item : it->second)
            if (std::binary_search(test.begin(), test.end(), item))
                ++c.hits;
    }
    return c;
}

/// Σ |R(u) ∩ T(u)| / Σ |T(u)|
inline double recall_at(const ItemSets& recommendations, const ItemSets& test_baskets) {
    const auto c = count_hits(recommendations, test_baskets);
    if (c.relevant == 0)
        throw DataError("recall is undefined: every test basket is empty");
    return double(c.hits) / double(c.relevant);
}

/// Σ |R(u) ∩ T(u)| / Σ |R(u)|
inline double precision_at(const ItemSets& recommendations, const ItemSets& test_baskets) {
    const auto c = count_hits(recommendations, test_baskets);
    if (c.recommended == 0)
        throw DataError("precision is undefined: nothing was recommended");
    return double(c.hits) / double(c.recommended);
}

inline ItemSets item_sets(std::span<const RecommendationList> lists) {
    ItemSets out;
    for (const auto& l : lists) {
        auto& items = out[l.target];
        for (const auto& s : l.items)
            items.push_back(s.item);
        std::sort(items.begin(), items.end());
        items.erase(std::unique(items.begin(), items.end()), items.end());
    }
    return out;
}

inline ItemSets item_sets(const Triples& triples) {
    ItemSets out;
    for (const auto& t : triples.rows)
        out[t.actor_id].push_back(t.item_id);
    // triples are sorted by (actor, item) and unique
    return out;
}

// ---------------------------------------------------------------------------
// Models and reports

enum class ModelKind { user, hybrid_user, hybrid_family };

inline constexpr ModelKind kAllModels[] = {ModelKind::user, ModelKind::hybrid_user,
                                           ModelKind::hybrid_family};

inline std::string_view model_name(ModelKind m) {
    switch (m) {
    case ModelKind::user: return "user";
    case ModelKind::hybrid_user: return "hybrid_user";
    case ModelKind::hybrid_family: return "hybrid_family";
    }
    return "?";
}

inline ModelKind parse_model(std::string_view name) {
    for (ModelKind m : kAllModels)
        if (model_name(m) == name)
            return m;
    throw UsageError("unknown model '" + std::string(name) + "'");
}

/// How the family model is scored. per_member delivers each family's
/// neighbors to its members and scores every user against their own test
/// basket, like the user models. pooled scores one list per family against
/// the union of its members' test baskets.
enum class FamilyProtocol { per_member, pooled };

inline std::string_view protocol_name(FamilyProtocol p) {
    return p == FamilyProtocol::per_member ? "per_member" : "pooled";
}

inline FamilyProtocol parse_protocol(std::string_view s) {
    if (s == "per_member")
        return FamilyProtocol::per_member;
    if (s == "pooled")
        return FamilyProtocol::pooled;
    throw UsageError("unknown family protocol '" + std::string(s) + "' (expected per_member or pooled)");
}

struct ModelSpec {
    ModelKind kind = ModelKind::hybrid_family;
    std::size_t k = kDefaultNeighborhood;
    std::size_t n_max = 10;
    /// Relative weight per blend axis; axes not listed weigh 1.
    std::map<Axis, double> weights;
    FamilyProtocol protocol = FamilyProtocol::per_member;

    double weight(Axis a) const {
        auto it = weights.find(a);
        return it == weights.end() ? 1.0 : it->second;
    }

    /// The user model pairs the recommended axis with activity and profile;
    /// the hybrid models blend all five axes regardless of the target axis.
    BlendSpec blend_for(Axis item_axis) const {
        BlendSpec s;
        if (kind == ModelKind::user) {
            for (Axis a : {item_axis, Axis::activity, Axis::profile})
                s.weights.emplace_back(a, weight(a));
        } else {
            for (Axis a : kBlendAxes)
                s.weights.emplace_back(a, weight(a));
        }
        return s;
    }
};

struct EvalRow {
    ModelKind model = ModelKind::user;
    Axis axis = Axis::brand;
    std::size_t n = 0;
    double recall = 0;
    double precision = 0;
    std::size_t population = 0;

    bool operator==(const EvalRow&) const = default;
};

struct EvalReport {
    std::vector<EvalRow> rows;

    const EvalRow& at(ModelKind m, Axis a, std::size_t n) const {
        for (const auto& r : rows)
            if (r.model == m && r.axis == a && r.n == n)
                return r;
        throw UsageError("report has no row for " + std::string(model_name(m)) + "/" +
                         std::string(axis_name(a)) + "/" + std::to_string(n));
    }
    bool operator==(const EvalReport&) const = default;
};

/// Unweighted mean over item axes for one (model, n).
struct MeanRow {
    ModelKind model = ModelKind::user;
    std::size_t n = 0;
    double recall = 0;
    double precision = 0;
};

inline std::vector<MeanRow> mean_over_axes(const EvalReport& report) {
    std::map<std::pair<int, std::size_t>, std::vector<const EvalRow*>> groups;
    for (const auto& r : report.rows)
        groups[{static_cast<int>(r.model), r.n}].push_back(&r);
    std::vector<MeanRow> out;
    for (const auto& [key, rows] : groups) {
        MeanRow m{static_cast<ModelKind>(key.first), key.second, 0, 0};
        for (const auto* r : rows) {
            m.recall += r->recall;
            m.precision += r->precision;
        }
        m.recall /= double(rows.size());
        m.precision /= double(rows.size());
        out.push_back(m);
    }
    return out;
}

/// Bounds on every row, and recall nondecreasing in n per (model, axis).
inline void check_report(const EvalReport& report) {
    for (const auto& r : report.rows) {
        if (!(r.recall >= 0 && r.recall <= 1 && r.precision >= 0 && r.precision <= 1))
            throw InvariantError("metric outside [0,1] in report row");
        for (const auto& prev : report.rows)
            if (prev.model == r.model && prev.axis == r.axis && prev.n < r.n &&
                prev.recall > r.recall)
                throw InvariantError("recall decreases with n for " +
                                     std::string(model_name(r.model)) + "/" +
                                     std::string(axis_name(r.axis)));
    }
}

inline constexpr std::string_view kReportHeader = "model,axis,n,recall,precision,population";

inline void emit_report(const EvalReport& report, std::ostream& out) {
    if (report.rows.empty())
        throw UsageError("refusing to emit an empty report");
    check_report(report);
    out << kReportHeader << '\n';
    for (const auto& r : report.rows)
        out << model_name(r.model) << ',' << axis_name(r.axis) << ',' << r.n << ','
            << detail::format_double(r.recall) << ',' << detail::format_double(r.precision) << ','
            << r.population << '\n';
}

inline void emit_report(const EvalReport& report, const std::filesystem::path& path) {
    if (report.rows.empty())
        throw UsageError("refusing to emit an empty report");
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write report " + path.string());
    emit_report(report, out);
    if (!out)
        throw DataError("failed writing report " + path.string());
}

inline EvalReport parse_report(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kReportHeader)
        throw DataError("report header mismatch");
    EvalReport report;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const auto f = detail::split_fields(line, ',');
        if (f.size() != 6)
            throw DataError("malformed report row '" + line + "'");
        auto n = detail::to_long(f[2]);
        auto rec = detail::to_double(f[3]);
        auto prec = detail::to_double(f[4]);
        auto pop = detail::to_long(f[5]);
        if (!n || !rec || !prec || !pop)
            throw DataError("malformed report row '" + line + "'");
        report.rows.push_back({parse_model(f[0]), parse_axis(f[1]), std::size_t(*n), *rec, *prec,
                               std::size_t(*pop)});
    }
    return report;
}

inline void emit_mean_report(const EvalReport& report, std::ostream& out) {
    out << "model,axis,n,recall,precision\n";
    for (const auto& m : mean_over_axes(report))
        out << model_name(m.model) << ",mean," << m.n << ',' << detail::format_double(m.recall)
            << ',' << detail::format_double(m.precision) << '\n';
}

// ---------------------------------------------------------------------------
// Experiment

/// Everything a model needs, built from the training partition only.
struct ExperimentData {
    SplitDataset split;
    std::vector<std::string> users;
    std::vector<FamilyGroup> units;
    std::vector<std::string> family_keys;
    std::map<std::string, std::string> family_of;  // member -> unit id

    std::map<Axis, SimilarityMatrix> user_matrices;    // five blend axes
    std::map<Axis, SimilarityMatrix> family_matrices;  // five blend axes
    std::map<Axis, Baskets> user_baskets;              // product axes, train
    std::map<Axis, Baskets> family_baskets;
    std::map<Axis, ItemSets> user_tests;               // product axes, test
    std::map<Axis, ItemSets> family_tests;
};

/// Builds per-axis matrices, baskets and test baskets for users and
/// families. Structures that feed recommendations read only
/// split.train and participations before the split point.
inline ExperimentData prepare_experiment(const Corpus& corpus, Instant split_point,
                                         unsigned workers = 1, bool with_families = true) {
    ExperimentData d;
    d.split = temporal_split(corpus.transactions, split_point);
    for (const auto& p : corpus.profiles)
        d.users.push_back(p.member_id);

    std::vector<Participation> past;
    for (const auto& p : corpus.participations)
        if (p.timestamp < split_point)
            past.push_back(p);

    const auto vectors = encode_profiles(corpus.profiles);
    std::map<Axis, Triples> train;
    for (Axis a : kProductAxes)
        train[a] = extract_triples(std::span<const Transaction>(d.split.train), a);
    train[Axis::activity] = extract_triples(std::span<const Participation>(past));

    for (const auto& [axis, triples] : train)
        d.user_matrices.emplace(axis, jaccard_matrix(triples, d.users, workers));
    d.user_matrices.emplace(Axis::profile, profile_similarity_matrix(vectors, workers));

    for (Axis a : kProductAxes) {
        d.user_baskets.emplace(a, Baskets(train[a]));
        d.user_tests.emplace(a, item_sets(extract_triples(std::span<const Transaction>(d.split.test), a)));
    }

    if (!with_families)
        return d;

    d.units = family_units(corpus);
    for (const auto& f : d.units) {
        d.family_keys.push_back(f.family_id);
        for (const auto& m : f.member_ids)
            d.family_of.emplace(m, f.family_id);
    }
    for (const auto& [axis, triples] : train)
        d.family_matrices.emplace(
            axis, jaccard_matrix(lift_triples_to_family(triples, d.units), d.family_keys, workers));
    d.family_matrices.emplace(Axis::profile,
                              profile_similarity_matrix(family_profile_vectors(vectors, d.units), workers));
    for (Axis a : kProductAxes) {
        d.family_baskets.emplace(a, Baskets(lift_triples_to_family(train[a], d.units)));
        d.family_tests.emplace(
            a, item_sets(lift_triples_to_family(
                   extract_triples(std::span<const Transaction>(d.split.test), a), d.units)));
    }
    return d;
}

namespace detail {

inline std::vector<const SimilarityMatrix*> matrix_refs(const std::map<Axis, SimilarityMatrix>& m) {
    std::vector<const SimilarityMatrix*> out;
    for (const auto& [_, w] : m)
        out.push_back(&w);
    return out;
}

} // namespace detail

/// Top-n sweep for one model over the three product axes, n = 1..n_max.
inline EvalReport run_model(const ExperimentData& d, const ModelSpec& model, unsigned workers = 1) {
    if (model.n_max == 0)
        throw UsageError("n_max must be positive");
    const bool family = model.kind == ModelKind::hybrid_family;
    if (family && d.family_matrices.empty())
        throw UsageError("experiment data was prepared without families");
    const bool pooled = family && model.protocol == FamilyProtocol::pooled;
    const auto& matrices = family ? d.family_matrices : d.user_matrices;
    const auto refs = detail::matrix_refs(matrices);

    EvalReport report;
    std::optional<SimilarityMatrix> hybrid;
    for (Axis axis : kProductAxes) {
        const SimilarityMatrix* w = nullptr;
        std::optional<SimilarityMatrix> per_axis;
        if (model.kind == ModelKind::user) {
            per_axis = blend_matrices(refs, model.blend_for(axis));
            w = &*per_axis;
        } else {
            if (!hybrid)
                hybrid = blend_matrices(refs, model.blend_for(axis));
            w = &*hybrid;
        }
        const ItemSets& tests = (pooled ? d.family_tests : d.user_tests).at(axis);

        std::vector<const std::string*> targets;
        for (const auto& [actor, items] : tests)
            if (!items.empty())
                targets.push_back(&actor);
        std::vector<RecommendationList> lists(targets.size());
        parallel_for(targets.size(), workers, [&](std::size_t i) {
            const std::string& t = *targets[i];
            if (pooled)
                lists[i] = top_n_user_based(d.family_baskets.at(axis), *w, t, model.n_max, model.k);
            else if (family)
                lists[i] = recommend_for_member(d.family_baskets.at(axis), d.user_baskets.at(axis), *w,
                                                d.family_of.at(t), t, model.n_max, model.k);
            else
                lists[i] = top_n_user_based(d.user_baskets.at(axis), *w, t, model.n_max, model.k);
        });

        for (std::size_t n = 1; n <= model.n_max; ++n) {
            ItemSets recs;
            for (const auto& l : lists) {
                auto& items = recs[l.target];
                for (std::size_t r = 0; r < std::min(n, l.items.size()); ++r)
                    items.push_back(l.items[r].item);
            }
            const auto c = count_hits(recs, tests);
            report.rows.push_back({model.kind, axis, n,
                                   c.relevant ? double(c.hits) / double(c.relevant) : 0.0,
                                   c.recommended ? double(c.hits) / double(c.recommended) : 0.0,
                                   c.population});
        }
    }
    return report;
}

inline EvalReport run_experiment(const Corpus& corpus, Instant split_point, const ModelSpec& model,
                                 unsigned workers = 1) {
    const auto d = prepare_experiment(corpus, split_point, workers,
                                      model.kind == ModelKind::hybrid_family);
    return run_model(d, model, workers);
}

/// Runs several models on one prepared experiment; rows in model order.
inline EvalReport run_experiments(const Corpus& corpus, Instant split_point,
                                  std::span<const ModelSpec> models, unsigned workers = 1) {
    const bool families = std::any_of(models.begin(), models.end(), [](const ModelSpec& m) {
        return m.kind == ModelKind::hybrid_family;
    });
    const auto d = prepare_experiment(corpus, split_point, workers, families);
    EvalReport all;
    for (const auto& m : models) {
        auto r = run_model(d, m, workers);
        all.rows.insert(all.rows.end(), r.rows.begin(), r.rows.end());
    }
    return all;
}

} // namespace famrec

#endif // FAMREC_EVAL_HPP_
