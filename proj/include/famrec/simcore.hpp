#ifndef FAMREC_SIMCORE_HPP_
#define FAMREC_SIMCORE_HPP_

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "famrec/corpus.hpp"
#include "famrec/error.hpp"
#include "famrec/parallel.hpp"

namespace famrec {

// ---------------------------------------------------------------------------
// Key indexing shared by the matrix types

/// Bidirectional map between string keys and dense indices, in insertion order.
class KeyIndex {
public:
    KeyIndex() = default;
    explicit KeyIndex(std::vector<std::string> keys) : keys_(std::move(keys)) {
        index_.reserve(keys_.size());
        for (std::size_t i = 0; i < keys_.size(); ++i)
            if (!index_.emplace(keys_[i], i).second)
                throw DataError("duplicate key '" + keys_[i] + "'");
    }

    std::size_t size() const { return keys_.size(); }
    const std::string& key(std::size_t i) const { return keys_[i]; }
    const std::vector<std::string>& keys() const { return keys_; }

    std::optional<std::size_t> find(const std::string& key) const {
        auto it = index_.find(key);
        if (it == index_.end())
            return std::nullopt;
        return it->second;
    }

    /// Index of key, inserting it at the end if absent.
    std::size_t intern(const std::string& key) {
        auto [it, fresh] = index_.emplace(key, keys_.size());
        if (fresh)
            keys_.push_back(key);
        return it->second;
    }

    bool operator==(const KeyIndex& other) const { return keys_ == other.keys_; }

private:
    std::vector<std::string> keys_;
    std::unordered_map<std::string, std::size_t> index_;
};

// ---------------------------------------------------------------------------
// Ratings

/// Sparse actor x item explicit ratings.
class RatingsMatrix {
public:
    void set(const std::string& actor, const std::string& item, double rating) {
        const std::size_t a = actors_.intern(actor);
        const std::size_t i = items_.intern(item);
        if (rows_.size() <= a)
            rows_.resize(a + 1);
        if (cols_.size() <= i)
            cols_.resize(i + 1);
        rows_[a][i] = rating;
        cols_[i][a] = rating;
    }

    const KeyIndex& actors() const { return actors_; }
    const KeyIndex& items() const { return items_; }

    std::size_t actor(const std::string& key) const {
        if (auto a = actors_.find(key))
            return *a;
        throw DataError("unknown actor '" + key + "'");
    }
    std::size_t item(const std::string& key) const {
        if (auto i = items_.find(key))
            return *i;
        throw DataError("unknown item '" + key + "'");
    }

    /// item index -> rating for one actor.
    const std::map<std::size_t, double>& row(std::size_t actor) const { return rows_[actor]; }
    /// actor index -> rating for one item.
    const std::map<std::size_t, double>& column(std::size_t item) const { return cols_[item]; }

    std::optional<double> rating(std::size_t actor, std::size_t item) const {
        const auto& r = rows_[actor];
        auto it = r.find(item);
        if (it == r.end())
            return std::nullopt;
        return it->second;
    }

    /// Mean over the actor's stored ratings.
    std::optional<double> actor_mean(std::size_t actor) const { return mean(rows_[actor]); }
    /// Mean over the item's stored ratings.
    std::optional<double> item_mean(std::size_t item) const { return mean(cols_[item]); }

    std::optional<double> global_mean() const {
        double sum = 0;
        std::size_t n = 0;
        for (const auto& r : rows_)
            for (const auto& [_, v] : r) {
                sum += v;
                ++n;
            }
        if (n == 0)
            return std::nullopt;
        return sum / double(n);
    }

private:
    static std::optional<double> mean(const std::map<std::size_t, double>& m) {
        if (m.empty())
            return std::nullopt;
        double sum = 0;
        for (const auto& [_, v] : m)
            sum += v;
        return sum / double(m.size());
    }

    KeyIndex actors_;
    KeyIndex items_;
    std::vector<std::map<std::size_t, double>> rows_;
    std::vector<std::map<std::size_t, double>> cols_;
};

// ---------------------------------------------------------------------------
// Dense symmetric storage

/// Dense symmetric matrix over a key set, packed upper triangle (row-major).
class SymmetricMatrix {
public:
    SymmetricMatrix() = default;
    explicit SymmetricMatrix(KeyIndex keys)
        : keys_(std::move(keys)), values_(packed_size(keys_.size()), 0.0) {}
    explicit SymmetricMatrix(std::vector<std::string> keys)
        : SymmetricMatrix(KeyIndex(std::move(keys))) {}

    std::size_t size() const { return keys_.size(); }
    const KeyIndex& keys() const { return keys_; }
    const std::string& key(std::size_t i) const { return keys_.key(i); }
    std::optional<std::size_t> index_of(const std::string& key) const { return keys_.find(key); }

    double operator()(std::size_t i, std::size_t j) const { return values_[slot(i, j)]; }
    void set(std::size_t i, std::size_t j, double v) { values_[slot(i, j)] = v; }

    /// Packed upper triangle, row i holding columns i..n-1.
    std::span<const double> packed() const { return values_; }
    std::span<double> packed() { return values_; }

    static std::size_t packed_size(std::size_t n) { return n * (n + 1) / 2; }

    /// Offset of row i's diagonal entry in the packed buffer.
    std::size_t row_offset(std::size_t i) const {
        const std::size_t n = size();
        return i * n - i * (i - 1) / 2;
    }

protected:
    std::size_t slot(std::size_t i, std::size_t j) const {
        if (i > j)
            std::swap(i, j);
        return row_offset(i) + (j - i);
    }

    KeyIndex keys_;
    std::vector<double> values_;
};

/// Pairwise similarity W between actors (or items), tagged with its axis.
class SimilarityMatrix : public SymmetricMatrix {
public:
    SimilarityMatrix() = default;
    SimilarityMatrix(Axis axis, KeyIndex keys) : SymmetricMatrix(std::move(keys)), axis_(axis) {}
    SimilarityMatrix(Axis axis, std::vector<std::string> keys)
        : SimilarityMatrix(axis, KeyIndex(std::move(keys))) {}

    Axis axis() const { return axis_; }
    void set_axis(Axis axis) { axis_ = axis; }

    bool operator==(const SimilarityMatrix& o) const {
        return axis_ == o.axis_ && keys_ == o.keys_ && values_ == o.values_;
    }

private:
    Axis axis_ = Axis::hybrid;
};

/// Pairwise nonnegative distances D with a zero diagonal.
class DistanceMatrix : public SymmetricMatrix {
public:
    using SymmetricMatrix::SymmetricMatrix;
};

// ---------------------------------------------------------------------------
// Rating-based similarities

/// Cosine of the angle between two item columns over all users; unrated
/// cells count as 0. Zero columns give 0.
inline double cosine_item_similarity(const RatingsMatrix& ratings, const std::string& i,
                                     const std::string& j) {
    const auto& ci = ratings.column(ratings.item(i));
    const auto& cj = ratings.column(ratings.item(j));
    double dot = 0, ni = 0, nj = 0;
    for (const auto& [u, r] : ci) {
        ni += r * r;
        if (auto it = cj.find(u); it != cj.end())
            dot += r * it->second;
    }
    for (const auto& [u, r] : cj)
        nj += r * r;
    if (ni == 0 || nj == 0)
        return 0.0;
    return std::clamp(dot / (std::sqrt(ni) * std::sqrt(nj)), -1.0, 1.0);
}

namespace detail {

/// Pearson correlation over the keys two sparse vectors share, with means
/// taken over those shared entries. Degenerate inputs give 0.
inline double co_pearson(const std::map<std::size_t, double>& a,
                         const std::map<std::size_t, double>& b) {
    std::vector<std::pair<double, double>> common;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (ia->first < ib->first)
            ++ia;
        else if (ib->first < ia->first)
            ++ib;
        else {
            common.emplace_back(ia->second, ib->second);
            ++ia;
            ++ib;
        }
    }
    if (common.size() < 2)
        return 0.0;
    double ma = 0, mb = 0;
    for (auto [x, y] : common) {
        ma += x;
        mb += y;
    }
    ma /= double(common.size());
    mb /= double(common.size());
    double num = 0, va = 0, vb = 0;
    for (auto [x, y] : common) {
        num += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if (va == 0 || vb == 0)
        return 0.0;
    return std::clamp(num / (std::sqrt(va) * std::sqrt(vb)), -1.0, 1.0);
}

} // namespace detail

/// Pearson correlation between two users over their co-rated items.
inline double pearson_user_similarity(const RatingsMatrix& ratings, const std::string& u,
                                      const std::string& v) {
    return detail::co_pearson(ratings.row(ratings.actor(u)), ratings.row(ratings.actor(v)));
}

/// Pearson correlation between two items over their common raters.
inline double pearson_item_similarity(const RatingsMatrix& ratings, const std::string& i,
                                      const std::string& j) {
    return detail::co_pearson(ratings.column(ratings.item(i)), ratings.column(ratings.item(j)));
}

enum class ItemMeasure { cosine, pearson };

/// Full item x item matrix under the chosen measure; the diagonal is 1 for
/// items with any rating.
inline SimilarityMatrix item_similarity_matrix(const RatingsMatrix& ratings, ItemMeasure measure,
                                               Axis axis = Axis::hybrid) {
    SimilarityMatrix w(axis, ratings.items());
    const std::size_t n = w.size();
    for (std::size_t i = 0; i < n; ++i) {
        w.set(i, i, ratings.column(i).empty() ? 0.0 : 1.0);
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto& ki = w.key(i);
            const auto& kj = w.key(j);
            w.set(i, j, measure == ItemMeasure::cosine ? cosine_item_similarity(ratings, ki, kj)
                                                       : pearson_item_similarity(ratings, ki, kj));
        }
    }
    return w;
}

// ---------------------------------------------------------------------------
// Jaccard over baskets

namespace detail {

/// Per-actor item sets as bitsets over the item vocabulary.
struct BasketBits {
    std::size_t words = 0;
    std::vector<std::uint64_t> bits;  // actors x words
    std::vector<std::size_t> counts;

    std::span<const std::uint64_t> row(std::size_t a) const {
        return {bits.data() + a * words, words};
    }
};

inline BasketBits basket_bits(const Triples& triples, const KeyIndex& actors) {
    KeyIndex items;
    for (const auto& t : triples.rows)
        items.intern(t.item_id);
    BasketBits b;
    b.words = (items.size() + 63) / 64;
    b.bits.assign(actors.size() * b.words, 0);
    b.counts.assign(actors.size(), 0);
    for (const auto& t : triples.rows) {
        auto a = actors.find(t.actor_id);
        if (!a)
            throw DataError("triple actor '" + t.actor_id + "' is not in the actor list");
        const std::size_t item = *items.find(t.item_id);
        std::uint64_t& word = b.bits[*a * b.words + item / 64];
        const std::uint64_t mask = std::uint64_t{1} << (item % 64);
        if (!(word & mask)) {
            word |= mask;
            ++b.counts[*a];
        }
    }
    return b;
}

} // namespace detail

/// W[u][v] = |N_u ∩ N_v| / |N_u ∪ N_v| over item sets; quantities are
/// ignored. Empty-vs-empty pairs are 0 and the diagonal is 1. Rows are
/// filled independently on up to `workers` threads.
inline SimilarityMatrix jaccard_matrix(const Triples& triples, std::vector<std::string> actors,
                                       unsigned workers = 1) {
    SimilarityMatrix w(triples.axis, std::move(actors));
    const auto bits = detail::basket_bits(triples, w.keys());
    const std::size_t n = w.size();
    auto packed = w.packed();
    parallel_for(n, workers, [&](std::size_t i) {
        double* out = packed.data() + w.row_offset(i);
        out[0] = 1.0;
        const auto ri = bits.row(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto rj = bits.row(j);
            std::size_t inter = 0;
            for (std::size_t k = 0; k < bits.words; ++k)
                inter += static_cast<std::size_t>(std::popcount(ri[k] & rj[k]));
            const std::size_t uni = bits.counts[i] + bits.counts[j] - inter;
            out[j - i] = uni == 0 ? 0.0 : double(inter) / double(uni);
        }
    });
    return w;
}

/// Item x item Jaccard over the sets of actors that hold each item.
inline SimilarityMatrix item_jaccard_matrix(const Triples& triples, unsigned workers = 1) {
    Triples transposed{triples.axis, {}};
    KeyIndex items;
    for (const auto& t : triples.rows) {
        transposed.rows.push_back({t.item_id, t.actor_id, t.quantity});
        items.intern(t.item_id);
    }
    return jaccard_matrix(transposed, items.keys(), workers);
}

// ---------------------------------------------------------------------------
// Profile distances

/// Raw Euclidean distances between profile vectors.
inline DistanceMatrix profile_distance_matrix(std::span<const ProfileVector> vectors,
                                              unsigned workers = 1) {
    std::vector<std::string> keys;
    keys.reserve(vectors.size());
    for (const auto& v : vectors) {
        if (v.values.size() != vectors.front().values.size() ||
            (v.layout && vectors.front().layout && !(*v.layout == *vectors.front().layout)) ||
            (v.layout && v.layout->extent() != v.values.size()))
            throw DataError("profile vector '" + v.actor_id + "' does not share the common layout");
        keys.push_back(v.actor_id);
    }
    DistanceMatrix d(std::move(keys));
    const std::size_t n = d.size();
    auto packed = d.packed();
    parallel_for(n, workers, [&](std::size_t i) {
        double* out = packed.data() + d.row_offset(i);
        const auto& a = vectors[i].values;
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto& b = vectors[j].values;
            double s = 0;
            for (std::size_t k = 0; k < a.size(); ++k)
                s += (a[k] - b[k]) * (a[k] - b[k]);
            out[j - i] = std::sqrt(s);
        }
    });
    return d;
}

/// Divides off-diagonal entries by their maximum; all-zero stays zero.
inline DistanceMatrix normalize_distances(DistanceMatrix d) {
    const std::size_t n = d.size();
    if (n < 2)
        throw DataError("distance normalization needs at least two actors");
    double max = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            max = std::max(max, d(i, j));
    for (std::size_t i = 0; i < n; ++i) {
        d.set(i, i, 0.0);
        for (std::size_t j = i + 1; j < n; ++j)
            d.set(i, j, max > 0 ? d(i, j) / max : 0.0);
    }
    return d;
}

/// W = 1 - D on a normalized distance matrix, tagged as the profile axis.
inline SimilarityMatrix distance_to_similarity(const DistanceMatrix& d) {
    SimilarityMatrix w(Axis::profile, d.keys());
    const std::size_t n = d.size();
    for (std::size_t i = 0; i < n; ++i) {
        w.set(i, i, 1.0);
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = d(i, j);
            if (!(v >= 0.0 && v <= 1.0))
                throw InvariantError("normalized distance out of [0,1] between '" + d.key(i) +
                                     "' and '" + d.key(j) + "'");
            w.set(i, j, 1.0 - v);
        }
    }
    return w;
}

/// Profile similarity pipeline: distances, divide-by-max, then 1 - D.
inline SimilarityMatrix profile_similarity_matrix(std::span<const ProfileVector> vectors,
                                                  unsigned workers = 1) {
    return distance_to_similarity(normalize_distances(profile_distance_matrix(vectors, workers)));
}

} // namespace famrec

#endif // FAMREC_SIMCORE_HPP_
