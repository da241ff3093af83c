#ifndef FAMREC_RECOMMEND_HPP_
#define FAMREC_RECOMMEND_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "famrec/corpus.hpp"
#include "famrec/error.hpp"
#include "famrec/simcore.hpp"

namespace famrec {

inline constexpr std::size_t kDefaultNeighborhood = 50;

struct Neighbor {
    std::string key;
    double weight = 0;

    bool operator==(const Neighbor&) const = default;
};

/// Up to k most similar others, similarity descending, ties by key.
struct Neighborhood {
    std::string target;
    std::vector<Neighbor> neighbors;
    std::size_t k = 0;
};

struct ScoredItem {
    std::string item;
    double score = 0;

    bool operator==(const ScoredItem&) const = default;
};

struct RecommendationList {
    std::string target;
    std::vector<ScoredItem> items;
    std::size_t n = 0;
};

/// Item sets per actor, each sorted ascending.
class Baskets {
public:
    Baskets() = default;
    explicit Baskets(const Triples& triples) {
        for (const auto& t : triples.rows)
            sets_[t.actor_id].push_back(t.item_id);
        for (auto& [_, items] : sets_) {
            std::sort(items.begin(), items.end());
            items.erase(std::unique(items.begin(), items.end()), items.end());
        }
    }

    const std::vector<std::string>& of(const std::string& actor) const {
        static const std::vector<std::string> empty;
        auto it = sets_.find(actor);
        return it == sets_.end() ? empty : it->second;
    }

    bool contains(const std::string& actor, const std::string& item) const {
        const auto& s = of(actor);
        return std::binary_search(s.begin(), s.end(), item);
    }

private:
    std::unordered_map<std::string, std::vector<std::string>> sets_;
};

// ---------------------------------------------------------------------------
// Neighborhoods

inline Neighborhood k_nearest_neighbors(const SimilarityMatrix& w, const std::string& target,
                                        std::size_t k) {
    if (k == 0)
        throw UsageError("neighborhood size must be positive");
    const auto t = w.index_of(target);
    if (!t)
        throw DataError("unknown actor '" + target + "'");
    std::vector<std::pair<double, std::size_t>> cand;
    cand.reserve(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) {
        if (j == *t)
            continue;
        const double s = w(*t, j);
        if (s > 0 && std::isfinite(s))
            cand.emplace_back(s, j);
    }
    auto before = [&](const auto& a, const auto& b) {
        if (a.first != b.first)
            return a.first > b.first;
        return w.key(a.second) < w.key(b.second);
    };
    const std::size_t keep = std::min(k, cand.size());
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(keep), cand.end(),
                      before);
    Neighborhood out{target, {}, k};
    out.neighbors.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i)
        out.neighbors.push_back({w.key(cand[i].second), cand[i].first});
    return out;
}

// ---------------------------------------------------------------------------
// Rating prediction

/// A predicted rating; from_neighbors is false when no neighbor rated the
/// item and the value is a fallback mean.
struct Prediction {
    double value = 0;
    bool from_neighbors = false;
};

namespace detail {

template <class Term>
std::optional<double> neighbor_average(const RatingsMatrix& ratings, const Neighborhood& hood,
                                       const std::string& item, Term term) {
    const auto i = ratings.items().find(item);
    if (!i)
        return std::nullopt;
    double num = 0, den = 0;
    for (const auto& nb : hood.neighbors) {
        const auto u = ratings.actors().find(nb.key);
        if (!u)
            continue;
        const auto r = ratings.rating(*u, *i);
        if (!r)
            continue;
        num += term(*u, *r) * nb.weight;
        den += std::abs(nb.weight);
    }
    if (den == 0)
        return std::nullopt;
    return num / den;
}

inline double require_mean(std::optional<double> m) {
    if (!m)
        throw DataError("no ratings to fall back on");
    return *m;
}

} // namespace detail

/// r̄_target + Σ (r_{u,i} - r̄_u) w_u / Σ |w_u| over the neighbors that rated
/// the item. Falls back to the target mean, or the global mean when the
/// target has no ratings.
inline Prediction predict_rating_mean_centered(const RatingsMatrix& ratings,
                                               const Neighborhood& hood, const std::string& item) {
    const auto t = ratings.actors().find(hood.target);
    const std::optional<double> target_mean = t ? ratings.actor_mean(*t) : std::nullopt;
    const auto dev = detail::neighbor_average(ratings, hood, item, [&](std::size_t u, double r) {
        return r - *ratings.actor_mean(u);
    });
    const double base = target_mean ? *target_mean : detail::require_mean(ratings.global_mean());
    if (!dev)
        return {base, false};
    return {base + *dev, true};
}

/// Σ r_{u,i} w_u / Σ |w_u| over the neighbors that rated the item; falls
/// back to the global mean.
inline Prediction predict_rating_simple(const RatingsMatrix& ratings, const Neighborhood& hood,
                                        const std::string& item) {
    const auto v = detail::neighbor_average(ratings, hood, item,
                                            [](std::size_t, double r) { return r; });
    if (!v)
        return {detail::require_mean(ratings.global_mean()), false};
    return {*v, true};
}

inline Prediction predict_rating_mean_centered(const RatingsMatrix& ratings,
                                               const SimilarityMatrix& w, const std::string& target,
                                               const std::string& item,
                                               std::size_t k = kDefaultNeighborhood) {
    return predict_rating_mean_centered(ratings, k_nearest_neighbors(w, target, k), item);
}

inline Prediction predict_rating_simple(const RatingsMatrix& ratings, const SimilarityMatrix& w,
                                        const std::string& target, const std::string& item,
                                        std::size_t k = kDefaultNeighborhood) {
    return predict_rating_simple(ratings, k_nearest_neighbors(w, target, k), item);
}

// ---------------------------------------------------------------------------
// Implicit-feedback Top-N

/// Each item outside the target's basket scores the summed similarity of
/// the k nearest neighbors that hold it. Zero scores are omitted.
inline std::map<std::string, double> score_items_implicit(const Baskets& baskets,
                                                          const SimilarityMatrix& w,
                                                          const std::string& target, std::size_t k) {
    const auto hood = k_nearest_neighbors(w, target, k);
    std::map<std::string, double> scores;
    for (const auto& nb : hood.neighbors)
        for (const auto& item : baskets.of(nb.key))
            if (!baskets.contains(target, item))
                scores[item] += nb.weight;
    std::erase_if(scores, [](const auto& kv) { return kv.second == 0; });
    return scores;
}

inline std::map<std::string, double> score_items_implicit(const Triples& triples,
                                                          const SimilarityMatrix& w,
                                                          const std::string& target, std::size_t k) {
    return score_items_implicit(Baskets(triples), w, target, k);
}

namespace detail {

inline RecommendationList rank_scores(const std::string& target,
                                      const std::map<std::string, double>& scores, std::size_t n) {
    RecommendationList out{target, {}, n};
    out.items.reserve(scores.size());
    for (const auto& [item, s] : scores)
        out.items.push_back({item, s});
    // map order is ascending key, so a stable sort leaves ties by key
    std::stable_sort(out.items.begin(), out.items.end(),
                     [](const ScoredItem& a, const ScoredItem& b) { return a.score > b.score; });
    if (out.items.size() > n)
        out.items.resize(n);
    return out;
}

} // namespace detail

inline RecommendationList top_n_user_based(const Baskets& baskets, const SimilarityMatrix& w,
                                           const std::string& target, std::size_t n, std::size_t k) {
    return detail::rank_scores(target, score_items_implicit(baskets, w, target, k), n);
}

inline RecommendationList top_n_user_based(const Triples& triples, const SimilarityMatrix& w,
                                           const std::string& target, std::size_t n, std::size_t k) {
    return top_n_user_based(Baskets(triples), w, target, n, k);
}

/// Candidates are the union of each owned item's k most similar items,
/// minus the basket; each scores its summed similarity to the owned items.
inline RecommendationList top_n_item_based(const Baskets& baskets,
                                           const SimilarityMatrix& item_similarity,
                                           const std::string& target, std::size_t n, std::size_t k) {
    std::vector<std::size_t> owned;
    for (const auto& item : baskets.of(target))
        if (auto i = item_similarity.index_of(item))
            owned.push_back(*i);
    std::map<std::string, double> scores;
    std::unordered_set<std::string> candidates;
    for (std::size_t a : owned)
        for (const auto& nb : k_nearest_neighbors(item_similarity, item_similarity.key(a), k).neighbors)
            if (!baskets.contains(target, nb.key))
                candidates.insert(nb.key);
    for (const auto& c : candidates) {
        const std::size_t ci = *item_similarity.index_of(c);
        double s = 0;
        for (std::size_t a : owned)
            s += item_similarity(a, ci);
        scores[c] = s;
    }
    return detail::rank_scores(target, scores, n);
}

inline RecommendationList top_n_item_based(const Triples& triples,
                                           const SimilarityMatrix& item_similarity,
                                           const std::string& target, std::size_t n, std::size_t k) {
    return top_n_item_based(Baskets(triples), item_similarity, target, n, k);
}

/// User-based Top-N with families as actors; family_baskets holds lifted
/// (family-level) triples.
inline RecommendationList recommend_for_family(const Baskets& family_baskets,
                                               const SimilarityMatrix& family_similarity,
                                               const std::string& family, std::size_t n,
                                               std::size_t k) {
    if (!family_similarity.index_of(family))
        throw DataError("unknown family '" + family + "'");
    return top_n_user_based(family_baskets, family_similarity, family, n, k);
}

inline RecommendationList recommend_for_family(const Triples& family_triples,
                                               const SimilarityMatrix& family_similarity,
                                               const std::string& family, std::size_t n,
                                               std::size_t k) {
    return recommend_for_family(Baskets(family_triples), family_similarity, family, n, k);
}

/// Family-model list delivered to one member: neighbor families and their
/// baskets supply the candidates, and only the member's own basket is
/// excluded. With singleton families this is top_n_user_based.
inline RecommendationList recommend_for_member(const Baskets& family_baskets,
                                               const Baskets& member_baskets,
                                               const SimilarityMatrix& family_similarity,
                                               const std::string& family, const std::string& member,
                                               std::size_t n, std::size_t k) {
    if (!family_similarity.index_of(family))
        throw DataError("unknown family '" + family + "'");
    const auto hood = k_nearest_neighbors(family_similarity, family, k);
    std::map<std::string, double> scores;
    for (const auto& nb : hood.neighbors)
        for (const auto& item : family_baskets.of(nb.key))
            if (!member_baskets.contains(member, item))
                scores[item] += nb.weight;
    std::erase_if(scores, [](const auto& kv) { return kv.second == 0; });
    return detail::rank_scores(member, scores, n);
}

} // namespace famrec

#endif // FAMREC_RECOMMEND_HPP_
