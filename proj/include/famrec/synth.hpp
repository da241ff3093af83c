#ifndef FAMREC_SYNTH_HPP_
#define FAMREC_SYNTH_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "famrec/corpus.hpp"
#include "famrec/error.hpp"

namespace famrec {

/// Seedable generator with a fully specified output sequence. Only the raw
/// mt19937_64 stream is used; std distributions differ across standard
/// libraries and would break cross-platform determinism.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    std::size_t below(std::size_t n) {
        return std::min(n - 1, static_cast<std::size_t>(uniform() * double(n)));
    }

    bool chance(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

/// Draws indices proportional to fixed nonnegative weights.
class DiscreteSampler {
public:
    DiscreteSampler() = default;
    explicit DiscreteSampler(const std::vector<double>& weights) {
        double acc = 0;
        cumulative_.reserve(weights.size());
        for (double w : weights)
            cumulative_.push_back(acc += w);
        if (!(acc > 0))
            throw UsageError("sampler needs a positive total weight");
    }

    std::size_t operator()(Rng& rng) const {
        const double u = rng.uniform() * cumulative_.back();
        const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                     cumulative_.size() - 1);
    }

private:
    std::vector<double> cumulative_;
};

inline std::vector<double> zipf_weights(std::size_t n, double exponent) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = 1.0 / std::pow(double(i + 1), exponent);
    return w;
}

struct SynthConfig {
    std::uint64_t seed = 42;
    std::size_t users = 4505;
    std::size_t families = 1800;
    std::size_t transactions = 25550;
    std::size_t visits = 60427;
    std::size_t participations = 13515;

    std::size_t brands = 80;
    std::size_t types = 40;
    std::size_t categories = 20;
    std::size_t activities = 30;
    std::size_t products = 500;

    double zipf_exponent = 1.0;
    /// Weight of the family's shared taste in each member's preferences.
    double family_correlation = 0.7;
    /// Share of purchases drawn from global popularity instead of taste.
    double noise = 0.1;
    /// Products per taste (family or individual).
    std::size_t taste_size = 8;
    std::size_t activity_taste_size = 3;
    /// Shopper segments, each owning a pool of catalog products drawn
    /// uniformly; a unit's shared taste is drawn from its segment's pool.
    /// 0 draws shared tastes from global popularity instead.
    std::size_t segments = 10;
    std::size_t segment_pool_size = 12;
    /// Relative weights of family sizes 1, 2, 3, 4.
    std::vector<double> family_size_weights = {0.3, 0.3, 0.25, 0.15};

    Instant start = parse_instant("2015-09-04 00:00:00");
    Instant end = parse_instant("2016-10-01 00:00:00");

    void validate() const {
        if (!users || !families || !transactions || !brands || !types || !categories ||
            !activities || !products || !taste_size || !activity_taste_size)
            throw UsageError("synthetic counts must be positive");
        if (!(family_correlation >= 0 && family_correlation <= 1))
            throw UsageError("family correlation must lie in [0, 1]");
        if (!(noise >= 0 && noise <= 1))
            throw UsageError("noise must lie in [0, 1]");
        if (!(start < end))
            throw UsageError("synthetic time range is empty");
        if (families > users)
            throw UsageError("infeasible config: " + std::to_string(families) +
                             " nonempty families need more than " + std::to_string(users) +
                             " users");
        if (family_size_weights.empty())
            throw UsageError("family size weights are empty");
    }
};

namespace detail {

inline std::string numbered(const char* prefix, std::size_t i, int width) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, i);
    return buf;
}

/// A weighted set of indices: the mixture of a shared and a personal taste.
struct Taste {
    std::vector<std::size_t> items;
    std::vector<double> weights;
    DiscreteSampler sampler;

    void finalize() { sampler = DiscreteSampler(weights); }
};

inline Taste mix_tastes(const std::vector<std::size_t>& shared,
                        const std::vector<std::size_t>& personal, double rho) {
    Taste t;
    for (std::size_t i : shared) {
        t.items.push_back(i);
        t.weights.push_back(rho / double(shared.size()));
    }
    for (std::size_t i : personal) {
        t.items.push_back(i);
        t.weights.push_back((1 - rho) / double(personal.size()));
    }
    t.finalize();
    return t;
}

} // namespace detail

/// Latent structure behind a generated corpus, for inspection in tests.
struct SynthTrace {
    /// Unit per member index; units past the family count are unaffiliated.
    std::vector<std::size_t> unit_of;
    std::vector<std::vector<std::size_t>> unit_products;
    std::vector<std::vector<std::size_t>> member_products;
    /// Per member: product index -> purchase probability before noise.
    std::vector<std::map<std::size_t, double>> product_distribution;
};

/// Generates a corpus whose family members share a rho-weighted part of
/// their product and activity preferences. Deterministic in the config.
inline Corpus generate(const SynthConfig& cfg, SynthTrace* trace = nullptr) {
    using detail::numbered;
    cfg.validate();
    Rng rng(cfg.seed);
    Corpus c;

    // Catalog: each product has one brand, type and category, each Zipf-skewed.
    const DiscreteSampler brand_of(zipf_weights(cfg.brands, cfg.zipf_exponent));
    const DiscreteSampler type_of(zipf_weights(cfg.types, cfg.zipf_exponent));
    const DiscreteSampler category_of(zipf_weights(cfg.categories, cfg.zipf_exponent));
    struct Product {
        std::string brand, type, category;
    };
    std::vector<Product> catalog;
    catalog.reserve(cfg.products);
    for (std::size_t p = 0; p < cfg.products; ++p)
        catalog.push_back({numbered("BRAND-", brand_of(rng), 3), numbered("TYPE-", type_of(rng), 3),
                           numbered("CAT-", category_of(rng), 3)});
    const DiscreteSampler popular_product(zipf_weights(cfg.products, cfg.zipf_exponent));
    const DiscreteSampler popular_activity(zipf_weights(cfg.activities, cfg.zipf_exponent));

    // Family composition over a shuffled member order.
    std::vector<std::size_t> order(cfg.users);
    for (std::size_t i = 0; i < cfg.users; ++i)
        order[i] = i;
    for (std::size_t i = cfg.users; i > 1; --i)
        std::swap(order[i - 1], order[rng.below(i)]);
    const DiscreteSampler size_of(cfg.family_size_weights);
    std::vector<std::size_t> sizes(cfg.families);
    for (auto& s : sizes)
        s = size_of(rng) + 1;
    std::vector<std::size_t> unit_of(cfg.users);
    std::size_t next = 0;
    for (std::size_t f = 0; f < cfg.families; ++f) {
        const std::size_t reserve_for_rest = cfg.families - f - 1;
        const std::size_t take = std::max<std::size_t>(
            1, std::min(sizes[f], cfg.users - next - reserve_for_rest));
        FamilyGroup g{numbered("F", f + 1, 5), {}};
        for (std::size_t m = 0; m < take; ++m) {
            unit_of[order[next]] = f;
            g.member_ids.push_back(numbered("M", order[next] + 1, 5));
            ++next;
        }
        c.families.push_back(std::move(g));
    }
    std::size_t units = cfg.families;
    for (; next < cfg.users; ++next)
        unit_of[order[next]] = units++;

    // Shared tastes per unit (via its segment), then member mixtures.
    auto draw_taste = [&](const DiscreteSampler& pop, std::size_t size) {
        std::vector<std::size_t> t(size);
        for (auto& i : t)
            i = pop(rng);
        return t;
    };
    std::vector<std::vector<std::size_t>> segment_pool(cfg.segments);
    for (auto& pool : segment_pool) {
        pool.resize(cfg.segment_pool_size);
        for (auto& i : pool)
            i = rng.below(cfg.products);
    }
    std::vector<std::size_t> unit_segment(units, 0);
    std::vector<std::vector<std::size_t>> unit_products(units), unit_activities(units);
    for (std::size_t u = 0; u < units; ++u) {
        if (cfg.segments > 0) {
            unit_segment[u] = rng.below(cfg.segments);
            const auto& pool = segment_pool[unit_segment[u]];
            unit_products[u].resize(cfg.taste_size);
            for (auto& i : unit_products[u])
                i = pool[rng.below(pool.size())];
        } else {
            unit_products[u] = draw_taste(popular_product, cfg.taste_size);
        }
        unit_activities[u] = draw_taste(popular_activity, cfg.activity_taste_size);
    }
    if (trace) {
        trace->unit_of = unit_of;
        trace->unit_products = unit_products;
    }
    std::vector<detail::Taste> product_taste(cfg.users), activity_taste(cfg.users);
    for (std::size_t m = 0; m < cfg.users; ++m) {
        const auto own_products = draw_taste(popular_product, cfg.taste_size);
        const auto own_activities = draw_taste(popular_activity, cfg.activity_taste_size);
        product_taste[m] = detail::mix_tastes(unit_products[unit_of[m]], own_products,
                                              cfg.family_correlation);
        if (trace) {
            trace->member_products.push_back(own_products);
            std::map<std::size_t, double> dist;
            for (std::size_t i = 0; i < product_taste[m].items.size(); ++i)
                if (product_taste[m].weights[i] > 0)
                    dist[product_taste[m].items[i]] += product_taste[m].weights[i];
            trace->product_distribution.push_back(std::move(dist));
        }
        activity_taste[m] = detail::mix_tastes(unit_activities[unit_of[m]], own_activities,
                                               cfg.family_correlation);
    }

    // Profiles: neighborhood and income follow the family.
    static constexpr const char* kSources[] = {"app", "counter", "web", "partner"};
    constexpr std::size_t kNeighborhoods = 12;
    const DiscreteSampler hood_of(zipf_weights(kNeighborhoods, 0.7));
    std::vector<std::size_t> unit_hood(units);
    std::vector<double> unit_income(units);
    for (std::size_t u = 0; u < units; ++u) {
        unit_hood[u] = hood_of(rng);
        unit_income[u] = 20000 + 130000 * rng.uniform() * rng.uniform();
    }
    std::vector<bool> seen_unit(units, false);
    c.profiles.reserve(cfg.users);
    for (std::size_t m = 0; m < cfg.users; ++m) {
        const std::size_t u = unit_of[m];
        ClientProfile p;
        p.member_id = numbered("M", m + 1, 5);
        p.join_days = static_cast<long>(rng.below(2000));
        const double sex_draw = rng.uniform();
        if (sex_draw < 0.01)
            p.sex = std::nullopt;
        else
            p.sex = sex_draw < 0.505 ? Sex::female : Sex::male;
        const bool adult_slot = !seen_unit[u];
        seen_unit[u] = true;
        const double age = adult_slot ? 25 + double(rng.below(36)) : 1 + double(rng.below(80));
        p.age = rng.chance(0.02) ? std::nullopt : std::optional<double>(age);
        p.phone_present = rng.chance(0.8);
        p.email_present = rng.chance(0.45);
        const std::size_t hood = rng.chance(0.9) ? unit_hood[u] : hood_of(rng);
        p.neighborhood = rng.chance(0.01) ? "" : numbered("NBH-", hood, 2);
        p.register_source = kSources[rng.below(std::size(kSources))];
        const double income = std::round(unit_income[u] * (0.8 + 0.4 * rng.uniform()));
        p.income = rng.chance(0.03) ? std::nullopt : std::optional<double>(income);
        c.profiles.push_back(std::move(p));
    }

    const auto span_seconds = (cfg.end - cfg.start).count();
    auto when = [&] {
        return cfg.start + std::chrono::seconds{static_cast<long long>(rng.uniform() * double(span_seconds))};
    };

    c.transactions.reserve(cfg.transactions);
    for (std::size_t t = 0; t < cfg.transactions; ++t) {
        const std::size_t m = rng.below(cfg.users);
        const auto& taste = product_taste[m];
        const std::size_t prod = rng.chance(cfg.noise) ? popular_product(rng)
                                                       : taste.items[taste.sampler(rng)];
        const double q = rng.uniform();
        const long quantity = q < 0.8 ? 1 : q < 0.95 ? 2 : 3;
        const Product& p = catalog[prod];
        c.transactions.push_back(
            {numbered("M", m + 1, 5), when(), p.brand, p.type, p.category, quantity});
    }

    c.participations.reserve(cfg.participations);
    for (std::size_t i = 0; i < cfg.participations; ++i) {
        const std::size_t m = rng.below(cfg.users);
        const auto& taste = activity_taste[m];
        const std::size_t act = rng.chance(cfg.noise) ? popular_activity(rng)
                                                      : taste.items[taste.sampler(rng)];
        c.participations.push_back({numbered("M", m + 1, 5), numbered("ACT-", act, 3), when()});
    }

    c.visits.reserve(cfg.visits);
    for (std::size_t i = 0; i < cfg.visits; ++i) {
        const std::size_t m = rng.below(cfg.users);
        const Instant in = when();
        const auto stay = std::chrono::seconds{600 + static_cast<long long>(rng.below(5 * 3600))};
        c.visits.push_back({numbered("M", m + 1, 5), in, in + stay});
    }

    auto chronological = [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; };
    std::stable_sort(c.transactions.begin(), c.transactions.end(), chronological);
    std::stable_sort(c.participations.begin(), c.participations.end(), chronological);
    std::stable_sort(c.visits.begin(), c.visits.end(),
                     [](const Visit& a, const Visit& b) { return a.check_in < b.check_in; });
    return c;
}

/// Item counts for one axis, most frequent first (ties by item key).
struct AxisSummary {
    Axis axis = Axis::brand;
    std::vector<std::pair<std::string, std::size_t>> counts;
};

/// Per-axis record counts: transactions for product axes, participation
/// rows for activities.
inline std::vector<AxisSummary> describe(const Corpus& corpus) {
    std::vector<AxisSummary> out;
    auto summarize = [&](Axis axis, auto&& rows, auto&& item_of) {
        std::map<std::string, std::size_t> acc;
        for (const auto& r : rows)
            acc[item_of(r)] += 1;
        AxisSummary s{axis, {acc.begin(), acc.end()}};
        std::stable_sort(s.counts.begin(), s.counts.end(),
                         [](const auto& a, const auto& b) { return a.second > b.second; });
        out.push_back(std::move(s));
    };
    for (Axis a : kProductAxes)
        summarize(a, corpus.transactions, [a](const Transaction& t) { return t.item(a); });
    summarize(Axis::activity, corpus.participations,
              [](const Participation& p) { return p.activity_id; });
    return out;
}

} // namespace famrec

#endif // FAMREC_SYNTH_HPP_
