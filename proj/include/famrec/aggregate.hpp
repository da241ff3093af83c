#ifndef FAMREC_AGGREGATE_HPP_
#define FAMREC_AGGREGATE_HPP_

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "famrec/corpus.hpp"
#include "famrec/error.hpp"
#include "famrec/simcore.hpp"

namespace famrec {

// ---------------------------------------------------------------------------
// Hybrid blending

/// Per-axis blend weights. Weights are normalized to sum 1 when applied.
struct BlendSpec {
    std::vector<std::pair<Axis, double>> weights;

    static BlendSpec uniform(std::span<const Axis> axes) {
        BlendSpec s;
        for (Axis a : axes)
            s.weights.emplace_back(a, 1.0);
        return s;
    }
};

/// Elementwise weighted mean of the matrices named by `spec`. Each spec
/// entry picks the matrix tagged with its axis.
inline SimilarityMatrix blend_matrices(std::span<const SimilarityMatrix* const> matrices,
                                       const BlendSpec& spec) {
    double total = 0;
    for (const auto& [axis, weight] : spec.weights) {
        if (!(weight >= 0))
            throw UsageError("blend weight for '" + std::string(axis_name(axis)) +
                             "' must be nonnegative");
        total += weight;
    }
    if (!(total > 0))
        throw UsageError("blend needs at least one positive weight");

    std::vector<std::pair<const SimilarityMatrix*, double>> terms;
    for (const auto& [axis, weight] : spec.weights) {
        const auto it = std::find_if(matrices.begin(), matrices.end(),
                                     [&](const SimilarityMatrix* m) { return m->axis() == axis; });
        if (it == matrices.end())
            throw UsageError("no '" + std::string(axis_name(axis)) + "' matrix to blend");
        if (weight > 0)
            terms.emplace_back(*it, weight / total);
    }
    const SimilarityMatrix& first = *terms.front().first;
    for (const auto& [m, _] : terms)
        if (!(m->keys() == first.keys()))
            throw DataError("cannot blend matrices with different actor indexing");

    SimilarityMatrix out(Axis::hybrid, first.keys());
    auto dst = out.packed();
    for (const auto& [m, w] : terms) {
        const auto src = m->packed();
        for (std::size_t k = 0; k < dst.size(); ++k)
            dst[k] += w * src[k];
    }
    return out;
}

inline SimilarityMatrix blend_matrices(std::initializer_list<const SimilarityMatrix*> matrices,
                                       const BlendSpec& spec) {
    return blend_matrices(std::span<const SimilarityMatrix* const>(matrices.begin(), matrices.size()),
                          spec);
}

// ---------------------------------------------------------------------------
// Family lift

/// Families from the family table followed by every unaffiliated profile as
/// a singleton family keyed by its member id.
inline std::vector<FamilyGroup> family_units(const Corpus& corpus) {
    std::vector<FamilyGroup> units = corpus.families;
    std::unordered_set<std::string> affiliated;
    std::unordered_set<std::string> family_ids;
    for (const auto& f : corpus.families) {
        family_ids.insert(f.family_id);
        affiliated.insert(f.member_ids.begin(), f.member_ids.end());
    }
    for (const auto& p : corpus.profiles) {
        if (affiliated.count(p.member_id))
            continue;
        if (family_ids.count(p.member_id))
            throw DataError("unaffiliated member '" + p.member_id +
                            "' collides with a family id of the same name");
        units.push_back({p.member_id, {p.member_id}});
    }
    return units;
}

namespace detail {

inline std::unordered_map<std::string, std::string> family_lookup(std::span<const FamilyGroup> units) {
    std::unordered_map<std::string, std::string> of;
    for (const auto& f : units)
        for (const auto& m : f.member_ids)
            if (!of.emplace(m, f.family_id).second)
                throw DataError("member '" + m + "' belongs to more than one family");
    return of;
}

} // namespace detail

/// Re-keys triples by family: item sets are unioned and quantities summed.
/// Actors outside every family stand as their own singleton family.
inline Triples lift_triples_to_family(const Triples& triples, std::span<const FamilyGroup> families) {
    const auto of = detail::family_lookup(families);
    std::map<std::pair<std::string, std::string>, long> acc;
    for (const auto& t : triples.rows) {
        auto it = of.find(t.actor_id);
        const std::string& family = it == of.end() ? t.actor_id : it->second;
        acc[{family, t.item_id}] += t.quantity;
    }
    return detail::triples_from_counts(triples.axis, acc);
}

/// Componentwise sum of the members' vectors, accumulated in member-id
/// order so the result does not depend on how members are listed.
inline ProfileVector family_profile_vector(std::span<const ProfileVector> vectors,
                                           const FamilyGroup& family) {
    std::vector<const ProfileVector*> members;
    for (const auto& m : family.member_ids) {
        auto it = std::find_if(vectors.begin(), vectors.end(),
                               [&](const ProfileVector& v) { return v.actor_id == m; });
        if (it == vectors.end())
            throw DataError("family '" + family.family_id + "' member '" + m +
                            "' has no profile vector");
        members.push_back(&*it);
    }
    if (members.empty())
        throw DataError("family '" + family.family_id + "' has no members");
    std::sort(members.begin(), members.end(),
              [](const ProfileVector* a, const ProfileVector* b) { return a->actor_id < b->actor_id; });
    ProfileVector out{family.family_id, members.front()->values, members.front()->layout};
    for (std::size_t k = 1; k < members.size(); ++k) {
        const auto& v = *members[k];
        if (v.values.size() != out.values.size() ||
            (v.layout && out.layout && !(*v.layout == *out.layout)))
            throw DataError("family '" + family.family_id + "' members use different layouts");
        for (std::size_t i = 0; i < out.values.size(); ++i)
            out.values[i] += v.values[i];
    }
    return out;
}

/// family_profile_vector for every unit, in unit order.
inline std::vector<ProfileVector> family_profile_vectors(std::span<const ProfileVector> vectors,
                                                         std::span<const FamilyGroup> units) {
    std::unordered_map<std::string, std::size_t> at;
    for (std::size_t i = 0; i < vectors.size(); ++i)
        at.emplace(vectors[i].actor_id, i);
    std::vector<ProfileVector> out;
    out.reserve(units.size());
    std::vector<ProfileVector> members;
    for (const auto& f : units) {
        members.clear();
        for (const auto& m : f.member_ids) {
            auto it = at.find(m);
            if (it == at.end())
                throw DataError("family '" + f.family_id + "' member '" + m +
                                "' has no profile vector");
            members.push_back(vectors[it->second]);
        }
        out.push_back(family_profile_vector(members, f));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Group preference strategies

enum class GroupStrategy { average, most_pleasure, least_misery, average_without_misery, most_respected };

struct GroupRatingInput {
    std::vector<std::pair<std::string, double>> ratings;
    std::optional<std::string> respected;
    double misery_threshold = 0;
};

/// Group rating under one of the five member-preference strategies.
/// average_without_misery keeps ratings >= the threshold.
inline double group_rating(const GroupRatingInput& input, GroupStrategy strategy) {
    const auto& r = input.ratings;
    if (r.empty())
        throw UsageError("group rating needs at least one member rating");
    if (input.respected &&
        std::none_of(r.begin(), r.end(), [&](const auto& p) { return p.first == *input.respected; }))
        throw UsageError("respected member '" + *input.respected + "' has no rating");

    auto by_value = [](const auto& a, const auto& b) { return a.second < b.second; };
    const double lo = std::min_element(r.begin(), r.end(), by_value)->second;
    const double hi = std::max_element(r.begin(), r.end(), by_value)->second;
    // The rounded mean can stray past the extremes; the exact mean cannot.
    auto mean_of = [&](double threshold) -> std::optional<double> {
        double sum = 0;
        std::size_t n = 0;
        for (const auto& [_, v] : r)
            if (v >= threshold) {
                sum += v;
                ++n;
            }
        if (n == 0)
            return std::nullopt;
        return std::clamp(sum / double(n), lo, hi);
    };

    switch (strategy) {
    case GroupStrategy::average: return *mean_of(lo);
    case GroupStrategy::most_pleasure: return hi;
    case GroupStrategy::least_misery: return lo;
    case GroupStrategy::average_without_misery:
        if (auto m = mean_of(input.misery_threshold))
            return *m;
        throw DataError("no member rating reaches the misery threshold");
    case GroupStrategy::most_respected:
        if (!input.respected)
            throw UsageError("most_respected strategy needs a respected member");
        return std::find_if(r.begin(), r.end(),
                            [&](const auto& p) { return p.first == *input.respected; })
            ->second;
    }
    throw InvariantError("unhandled group strategy");
}

/// Rating-level aggregation: member -> (item -> predicted rating) becomes
/// item -> group rating, over items every member has a prediction for.
/// Items vetoed by average_without_misery are dropped.
inline std::map<std::string, double>
aggregate_member_ratings(const std::map<std::string, std::map<std::string, double>>& predictions,
                         GroupStrategy strategy, double misery_threshold = 0,
                         std::optional<std::string> respected = std::nullopt) {
    std::map<std::string, double> out;
    if (predictions.empty())
        return out;
    for (const auto& [item, _] : predictions.begin()->second) {
        GroupRatingInput in{{}, respected, misery_threshold};
        bool everyone = true;
        for (const auto& [member, items] : predictions) {
            auto it = items.find(item);
            if (it == items.end()) {
                everyone = false;
                break;
            }
            in.ratings.emplace_back(member, it->second);
        }
        if (!everyone)
            continue;
        try {
            out[item] = group_rating(in, strategy);
        } catch (const DataError&) {
            // every member rating fell below the misery threshold
        }
    }
    return out;
}

/// Result-level aggregation by positional (Borda) score: in a list of
/// length L the item at rank p (0-based) earns L - p. Ties go to the
/// smaller item key.
inline std::vector<std::string> aggregate_recommendation_lists(
    std::span<const std::vector<std::string>> lists, long n) {
    if (n <= 0)
        throw UsageError("result aggregation needs n > 0");
    if (lists.empty())
        throw UsageError("result aggregation needs at least one member list");
    std::map<std::string, long> score;
    for (const auto& list : lists) {
        std::unordered_set<std::string_view> seen;
        const long len = static_cast<long>(list.size());
        for (long p = 0; p < len; ++p)
            if (seen.insert(list[p]).second)
                score[list[p]] += len - p;
    }
    std::vector<std::pair<std::string, long>> ranked(score.begin(), score.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    std::vector<std::string> out;
    for (std::size_t i = 0; i < ranked.size() && static_cast<long>(i) < n; ++i)
        out.push_back(ranked[i].first);
    return out;
}

} // namespace famrec

#endif // FAMREC_AGGREGATE_HPP_
