// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Each check compares the library against the brute-force
// oracles in ../oracles.hpp or against hand-derived values.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>

#include "../oracles.hpp"
#include "../support.hpp"
#include "famrec/commands.hpp"

using namespace famrec;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

/// Records the first failure message; later ones are counted only.
class Checker {
public:
    void expect(bool ok, const std::string& what) {
        if (ok)
            return;
        if (failures_++ == 0)
            first_ = what;
    }
    Outcome done(std::string detail) const {
        if (failures_)
            return {false, std::to_string(failures_) + " failures, first: " + first_};
        return {true, std::move(detail)};
    }

private:
    std::size_t failures_ = 0;
    std::string first_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string sci(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

Neighborhood hood(std::string target, std::vector<Neighbor> n) { return {std::move(target), std::move(n), 10}; }

// ---------------------------------------------------------------------------

Outcome jaccard_oracle() {
    Checker c;
    std::mt19937_64 g(1001);
    std::uniform_int_distribution<std::size_t> na(1, 100), ni(1, 50);
    std::uniform_real_distribution<double> p(0.01, 0.6);
    const auto t0 = std::chrono::steady_clock::now();
    double library = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t actors = na(g), items = ni(g);
        const auto t = oracle::random_triples(g, actors, items, p(g));
        const auto keys = oracle::actor_keys(actors);
        const auto t1 = std::chrono::steady_clock::now();
        const auto w = jaccard_matrix(t, keys);
        library += seconds_since(t1);
        const auto o = oracle::jaccard_matrix(t, keys);
        for (std::size_t i = 0; i < actors; ++i)
            for (std::size_t j = 0; j < actors; ++j) {
                c.expect(w(i, j) == o[i][j], "instance " + std::to_string(trial) + " differs from oracle");
                c.expect(w(i, j) == w(j, i), "asymmetric");
                c.expect(w(i, j) >= 0 && w(i, j) <= 1, "out of [0,1]");
            }
    }
    const double s = seconds_since(t0);
    c.expect(s < 10, "took " + fmt(s, 2) + " s");
    return c.done("1000 instances exact, " + fmt(library, 3) + " s in jaccard_matrix, " + fmt(s, 2) +
                  " s with oracle");
}

Outcome correlation_oracle() {
    Checker c;
    std::mt19937_64 g(1002);
    std::uniform_int_distribution<std::size_t> na(2, 15), ni(2, 12);
    std::uniform_real_distribution<double> density(0.15, 0.8);
    double worst = 0;
    std::size_t pairs = 0;
    auto cmp = [&](double a, double b) {
        worst = std::max(worst, std::abs(a - b));
        c.expect(std::abs(a - b) <= 1e-9, "deviation " + std::to_string(std::abs(a - b)));
        ++pairs;
    };
    for (int trial = 0; trial < 1000; ++trial) {
        const auto d = oracle::random_ratings(g, na(g), ni(g), density(g));
        const auto m = d.to_matrix();
        for (std::size_t u = 0; u < d.actors.size(); ++u)
            for (std::size_t v = u; v < d.actors.size(); ++v)
                if (m.actors().find(d.actors[u]) && m.actors().find(d.actors[v]))
                    cmp(pearson_user_similarity(m, d.actors[u], d.actors[v]), oracle::pearson_user(d, u, v));
        for (std::size_t i = 0; i < d.items.size(); ++i)
            for (std::size_t j = i; j < d.items.size(); ++j)
                if (m.items().find(d.items[i]) && m.items().find(d.items[j])) {
                    cmp(pearson_item_similarity(m, d.items[i], d.items[j]), oracle::pearson_item(d, i, j));
                    cmp(cosine_item_similarity(m, d.items[i], d.items[j]), oracle::cosine_item(d, i, j));
                }
    }
    return c.done(std::to_string(pairs) + " comparisons, max deviation " + sci(worst));
}

Outcome prediction_formulas() {
    Checker c;
    auto near = [&](double got, double want, const std::string& what) {
        c.expect(std::abs(got - want) <= 1e-12, what + ": got " + std::to_string(got));
    };
    // t rates x=2, y=4 (mean 3); a rates i=5, x=3 (mean 4). 3 + (5-4) = 4.
    RatingsMatrix r;
    r.set("t", "x", 2);
    r.set("t", "y", 4);
    r.set("a", "i", 5);
    r.set("a", "x", 3);
    r.set("b", "y", 1);
    near(predict_rating_mean_centered(r, hood("t", {{"a", 1.0}, {"b", 0.5}}), "i").value, 4.0,
         "mean-centered");
    // neighbor rates the item at its own mean: prediction is the target mean
    RatingsMatrix z;
    z.set("t", "x", 3);
    z.set("a", "i", 4);
    z.set("b", "j", 2);
    near(predict_rating_mean_centered(z, hood("t", {{"a", 0.7}, {"b", 0.2}}), "i").value, 3.0,
         "zero deviation");
    // two neighbors: 3 + (1*(5-4) + 0.5*(2-3)) / 1.5 = 10/3
    RatingsMatrix m;
    m.set("t", "x", 2);
    m.set("t", "y", 4);
    m.set("a", "i", 5);
    m.set("a", "x", 3);
    m.set("b", "i", 2);
    m.set("b", "x", 4);
    near(predict_rating_mean_centered(m, hood("t", {{"a", 1.0}, {"b", 0.5}}), "i").value, 10.0 / 3.0,
         "two-neighbor mean-centered");
    // simple: (4*3 + 2*1) / 4 = 3.5 and (4 + 2) / 2 = 3
    RatingsMatrix s;
    s.set("t", "x", 1);
    s.set("a", "i", 4);
    s.set("b", "i", 2);
    near(predict_rating_simple(s, hood("t", {{"a", 3}, {"b", 1}}), "i").value, 3.5, "simple weighted");
    near(predict_rating_simple(s, hood("t", {{"a", 1}, {"b", 1}}), "i").value, 3.0, "simple equal");

    std::mt19937_64 g(1003);
    std::uniform_real_distribution<double> u(0.05, 1), k(0.001, 1000);
    std::size_t cases = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto d = oracle::random_ratings(g, 3, 6, 0.7);
        const auto rm = d.to_matrix();
        if (!rm.actors().find("u00"))
            continue;
        const double scale = k(g);
        std::vector<Neighbor> n, scaled;
        for (const char* a : {"u01", "u02"}) {
            const double w = u(g);
            n.push_back({a, w});
            scaled.push_back({a, w * scale});
        }
        for (std::size_t i = 0; i < rm.items().size(); ++i) {
            const auto& item = rm.items().key(i);
            const auto a = predict_rating_mean_centered(rm, hood("u00", n), item).value;
            const auto b = predict_rating_mean_centered(rm, hood("u00", scaled), item).value;
            c.expect(std::abs(a - b) <= 1e-12, "mean-centered not scale invariant");
            const auto x = predict_rating_simple(rm, hood("u00", n), item).value;
            const auto y = predict_rating_simple(rm, hood("u00", scaled), item).value;
            c.expect(std::abs(x - y) <= 1e-12, "simple not scale invariant");
            ++cases;
        }
    }
    return c.done("5 fixtures exact, " + std::to_string(cases) + " scaled predictions invariant");
}

Outcome top_n_oracle() {
    Checker c;
    std::mt19937_64 g(1004);
    std::uniform_int_distribution<std::size_t> na(2, 50), ni(2, 30), nn(1, 12), nk(1, 20);
    std::uniform_real_distribution<double> p(0.05, 0.5);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t actors = na(g), items = ni(g);
        const auto t = oracle::random_triples(g, actors, items, p(g));
        const auto keys = oracle::actor_keys(actors);
        const std::size_t n = nn(g), k = nk(g);
        const std::string& target = keys[trial % actors];
        const auto tag = "instance " + std::to_string(trial);

        const auto w = oracle::random_similarity(g, keys, 4);
        const auto got = top_n_user_based(t, w, target, n, k);
        const auto want = oracle::top_n_user(t, w, target, n, k);
        c.expect(got.items.size() == want.size(), tag + " user-based length");
        for (std::size_t i = 0; i < std::min(got.items.size(), want.size()); ++i)
            c.expect(got.items[i].item == want[i].first && got.items[i].score == want[i].second,
                     tag + " user-based rank " + std::to_string(i));

        const auto iw = item_jaccard_matrix(t);
        const auto igot = top_n_item_based(t, iw, target, n, k);
        const auto iwant = oracle::top_n_item(t, iw, target, n, k);
        c.expect(igot.items.size() == iwant.size(), tag + " item-based length");
        for (std::size_t i = 0; i < std::min(igot.items.size(), iwant.size()); ++i)
            c.expect(igot.items[i].item == iwant[i].first && igot.items[i].score == iwant[i].second,
                     tag + " item-based rank " + std::to_string(i));
    }
    return c.done("500 instances, user- and item-based lists exact");
}

Outcome group_strategies() {
    Checker c;
    std::mt19937_64 g(1005);
    std::uniform_int_distribution<int> size(1, 8);
    std::uniform_real_distribution<double> rating(0, 5);
    for (int trial = 0; trial < 10000; ++trial) {
        GroupRatingInput in;
        const int n = size(g);
        for (int m = 0; m < n; ++m)
            in.ratings.emplace_back("m" + std::to_string(m), trial % 3 ? rating(g) : std::round(rating(g)));
        const double lo = group_rating(in, GroupStrategy::least_misery);
        const double avg = group_rating(in, GroupStrategy::average);
        const double hi = group_rating(in, GroupStrategy::most_pleasure);
        c.expect(lo <= avg && avg <= hi, "bounds violated at " + std::to_string(trial));
        in.misery_threshold = lo - std::abs(rating(g));
        c.expect(group_rating(in, GroupStrategy::average_without_misery) == avg,
                 "average_without_misery below min differs from average");
        if (n == 1) {
            in.respected = "m0";
            for (GroupStrategy s : {GroupStrategy::average, GroupStrategy::most_pleasure, GroupStrategy::least_misery,
                                    GroupStrategy::average_without_misery, GroupStrategy::most_respected})
                c.expect(group_rating(in, s) == in.ratings[0].second, "singleton strategies disagree");
        }
    }
    return c.done("10000 multisets");
}

Corpus synthetic(std::uint64_t seed, std::size_t users, std::size_t families, std::size_t transactions,
                 std::size_t visits, std::size_t participations, double rho = 0.7) {
    SynthConfig cfg;
    cfg.seed = seed;
    cfg.users = users;
    cfg.families = families;
    cfg.transactions = transactions;
    cfg.visits = visits;
    cfg.participations = participations;
    cfg.family_correlation = rho;
    return clean_missing(generate(cfg)).corpus;
}

Outcome family_lift() {
    Checker c;
    std::mt19937_64 g(1006);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t actors = 2 + trial % 40;
        const auto t = oracle::random_triples(g, actors, 25, 0.2);
        // random partition into families, some members left unaffiliated
        std::vector<FamilyGroup> fams;
        std::uniform_int_distribution<std::size_t> pick(0, actors / 2 + 1);
        std::map<std::size_t, std::vector<std::string>> groups;
        for (const auto& a : oracle::actor_keys(actors))
            if (std::size_t f = pick(g))
                groups[f].push_back(a);
        for (auto& [f, members] : groups)
            fams.push_back({"F" + std::to_string(f), members});
        const auto lifted = oracle::baskets(lift_triples_to_family(t, fams));
        const auto member = oracle::baskets(t);
        std::set<std::string> affiliated;
        for (const auto& f : fams) {
            oracle::ItemSet uni;
            for (const auto& m : f.member_ids) {
                affiliated.insert(m);
                if (member.count(m))
                    uni.insert(member.at(m).begin(), member.at(m).end());
            }
            const auto it = lifted.find(f.family_id);
            c.expect((it == lifted.end() ? oracle::ItemSet{} : it->second) == uni, "family basket != union");
        }
        for (const auto& [a, items] : member)
            if (!affiliated.count(a))
                c.expect(lifted.count(a) && lifted.at(a) == items, "unaffiliated actor changed");
    }

    const auto corpus = synthetic(61, 300, 100, 2400, 400, 900);
    const auto vectors = encode_profiles(corpus.profiles);
    const auto units = family_units(corpus);
    const auto fv = family_profile_vectors(vectors, units);
    std::map<std::string, const ProfileVector*> by_id;
    for (const auto& v : vectors)
        by_id[v.actor_id] = &v;
    for (std::size_t f = 0; f < units.size(); ++f) {
        std::vector<std::string> members = units[f].member_ids;
        std::sort(members.begin(), members.end());
        std::vector<double> sum(fv[f].values.size(), 0.0);
        for (const auto& m : members)
            for (std::size_t i = 0; i < sum.size(); ++i)
                sum[i] += by_id.at(m)->values[i];
        c.expect(fv[f].values == sum, "profile vector of " + units[f].family_id + " is not the sum");
    }

    auto solo = synthetic(62, 300, 100, 2400, 400, 900);
    solo.families.clear();
    const Instant split = split_point_for_fraction(solo.transactions, 0.2);
    const auto hu = run_experiment(solo, split, {ModelKind::hybrid_user});
    for (FamilyProtocol p : {FamilyProtocol::per_member, FamilyProtocol::pooled}) {
        auto hf = run_experiment(solo, split, {ModelKind::hybrid_family, kDefaultNeighborhood, 10, {}, p});
        for (auto& row : hf.rows)
            row.model = ModelKind::hybrid_user;
        std::ostringstream a, b;
        emit_report(hu, a);
        emit_report(hf, b);
        c.expect(a.str() == b.str(), std::string("singleton report differs under ") +
                                         std::string(protocol_name(p)));
    }
    return c.done("200 lifts, " + std::to_string(units.size()) + " profile sums, singleton reports identical");
}

/// Reports from the synthetic suite, shared by the metric, ordering and
/// shape criteria.
struct Suite {
    std::vector<EvalReport> per_member, pooled;
    double seconds = 0;
};

Suite run_suite() {
    Suite s;
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<ModelSpec> specs = {{ModelKind::user}, {ModelKind::hybrid_user}, {ModelKind::hybrid_family}};
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto corpus = synthetic(seed, 1000, 400, 8000, 13413, 3000);
        const Instant split = split_point_for_fraction(corpus.transactions, 0.2);
        const auto d = prepare_experiment(corpus, split, default_workers(), true);
        EvalReport r;
        for (const auto& spec : specs)
            for (auto& row : run_model(d, spec, default_workers()).rows)
                r.rows.push_back(row);
        s.per_member.push_back(std::move(r));
        s.pooled.push_back(run_model(d, {ModelKind::hybrid_family, kDefaultNeighborhood, 10, {},
                                         FamilyProtocol::pooled}, default_workers()));
    }
    s.seconds = seconds_since(t0);
    return s;
}

double mean_at(const EvalReport& r, ModelKind m, std::size_t n, bool recall) {
    double sum = 0;
    for (Axis a : kProductAxes)
        sum += recall ? r.at(m, a, n).recall : r.at(m, a, n).precision;
    return sum / 3.0;
}

Outcome metric_fixtures(const Suite& suite) {
    Checker c;
    const ItemSets tests = {{"a", {"1", "2"}}, {"b", {"3"}}, {"c", {"4", "5", "6"}}};
    const ItemSets recs = {{"a", {"1", "2", "9"}}, {"b", {"8"}}, {"c", {"6"}}};
    c.expect(recall_at(recs, tests) == 3.0 / 6.0, "recall fixture");
    c.expect(precision_at(recs, tests) == 3.0 / 5.0, "precision fixture");
    const ItemSets tests2 = {{"u", {"a", "b"}}, {"v", {"c", "d", "e"}}, {"w", {}}};
    const ItemSets recs2 = {{"u", {"a", "z"}}, {"v", {"c", "x", "y"}}, {"w", {"q"}}};
    c.expect(recall_at(recs2, tests2) == 0.4, "recall fixture 2");
    c.expect(precision_at(recs2, tests2) == 0.4, "precision fixture 2");
    std::size_t reports = 0;
    auto check = [&](const EvalReport& r) {
        try {
            check_report(r);
        } catch (const InvariantError& e) {
            c.expect(false, e.what());
        }
        ++reports;
    };
    for (const auto& r : suite.per_member)
        check(r);
    for (const auto& r : suite.pooled)
        check(r);
    return c.done("fixtures exact, recall nondecreasing on " + std::to_string(reports) + " reports");
}

Outcome ordering_claim(const Suite& suite) {
    std::size_t chain = 0;
    double hf_r = 0, hu_r = 0, u_r = 0, hf_p = 0, hu_p = 0, u_p = 0;
    for (const auto& r : suite.per_member) {
        const double hf = mean_at(r, ModelKind::hybrid_family, 5, true);
        const double hu = mean_at(r, ModelKind::hybrid_user, 5, true);
        const double u = mean_at(r, ModelKind::user, 5, true);
        chain += hf >= hu && hu >= u;
        hf_r += hf / 20;
        hu_r += hu / 20;
        u_r += u / 20;
        hf_p += mean_at(r, ModelKind::hybrid_family, 5, false) / 20;
        hu_p += mean_at(r, ModelKind::hybrid_user, 5, false) / 20;
        u_p += mean_at(r, ModelKind::user, 5, false) / 20;
    }
    const std::string detail = "recall@5 chain in " + std::to_string(chain) + "/20 seeds; mean recall@5 HF " +
                               fmt(hf_r) + " HU " + fmt(hu_r) + " U " + fmt(u_r) + "; mean precision@5 HF " +
                               fmt(hf_p) + " HU " + fmt(hu_p) + " U " + fmt(u_p) + "; " +
                               fmt(suite.seconds, 1) + " s";
    return {chain >= 16 && hf_r > u_r && hf_p > u_p, detail};
}

Outcome shape_claim(const Suite& suite) {
    std::size_t ok = 0;
    for (const auto& r : suite.per_member) {
        bool seed_ok = true;
        for (ModelKind m : kAllModels)
            for (std::size_t n = 5; n <= 10; ++n)
                seed_ok = seed_ok && mean_at(r, m, n, false) <= mean_at(r, m, n - 1, false);
        ok += seed_ok;
    }
    return {ok >= 15, "precision@k nonincreasing over k=4..10 for every model in " + std::to_string(ok) + "/20 seeds"};
}

Outcome determinism() {
    Checker c;
    support::TempDir dir;
    RunConfig cfg;
    cfg.synth.users = 600;
    cfg.synth.families = 240;
    cfg.synth.transactions = 4800;
    cfg.synth.visits = 8000;
    cfg.synth.participations = 1800;
    cfg.out_dir = dir / "data";
    std::ostringstream log;
    cmd_generate(cfg, log);
    cfg.data_dir = dir / "data";
    std::vector<std::string> reports, means;
    for (unsigned workers : {1u, 3u, 1u}) {
        cfg.workers = workers;
        cfg.out_dir = dir / ("run" + std::to_string(reports.size()));
        cmd_evaluate(cfg, log);
        reports.push_back(support::read_file(cfg.out_dir / "report.csv"));
        means.push_back(support::read_file(cfg.out_dir / "report_mean.csv"));
    }
    for (std::size_t i = 1; i < reports.size(); ++i) {
        c.expect(reports[i] == reports[0], "report.csv differs in run " + std::to_string(i));
        c.expect(means[i] == means[0], "report_mean.csv differs in run " + std::to_string(i));
    }
    c.expect(std::count(reports[0].begin(), reports[0].end(), '\n') == 91, "report.csv is not 90 rows");
    return c.done("3 runs (workers 1, 3, 1) byte-identical, fnv1a " + std::to_string(fnv1a(reports[0])));
}

} // namespace

int main() {
    bool all = true;
    auto report = [&](int id, const char* name, const std::function<Outcome()>& f) {
        Outcome o;
        try {
            o = f();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        all = all && o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << name << "): " << o.detail
                  << std::endl;
    };
    report(1, "jaccard oracle", jaccard_oracle);
    report(2, "pearson/cosine oracle", correlation_oracle);
    report(3, "prediction formulas", prediction_formulas);
    report(4, "top-n oracle", top_n_oracle);
    report(5, "group strategies", group_strategies);
    report(6, "family lift", family_lift);
    Suite suite;
    try {
        suite = run_suite();
    } catch (const std::exception& e) {
        std::cout << "synthetic suite failed: " << e.what() << std::endl;
    }
    report(7, "evaluation metrics", [&] { return metric_fixtures(suite); });
    report(8, "family model ordering", [&] { return ordering_claim(suite); });
    report(9, "precision shape", [&] { return shape_claim(suite); });
    report(10, "end-to-end determinism", determinism);

    // Not a criterion: the same suite scored family-by-family.
    if (suite.pooled.size() == 20) {
        double hf = 0, u = 0;
        for (std::size_t s = 0; s < 20; ++s) {
            hf += mean_at(suite.pooled[s], ModelKind::hybrid_family, 5, true) / 20;
            u += mean_at(suite.per_member[s], ModelKind::user, 5, true) / 20;
        }
        std::cout << "INFO pooled family protocol: mean recall@5 HF " << fmt(hf) << " vs U " << fmt(u) << std::endl;
    }
    return all ? 0 : 1;
}
