#ifndef FAMREC_COMMANDS_HPP_
#define FAMREC_COMMANDS_HPP_

#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "famrec/aggregate.hpp"
#include "famrec/config.hpp"
#include "famrec/corpus.hpp"
#include "famrec/eval.hpp"
#include "famrec/matrix_io.hpp"
#include "famrec/recommend.hpp"
#include "famrec/simcore.hpp"
#include "famrec/synth.hpp"

namespace famrec {

/// member: the family model's list delivered to one user.
enum class Level { user, family, member };

inline std::string_view level_name(Level l) {
    switch (l) {
    case Level::user: return "user";
    case Level::family: return "family";
    case Level::member: return "member";
    }
    return "?";
}

inline Level parse_level(std::string_view s) {
    for (Level l : {Level::user, Level::family, Level::member})
        if (level_name(l) == s)
            return l;
    throw UsageError("unknown level '" + std::string(s) + "' (expected user, family or member)");
}

/// Reads, reports rejected rows, and cleans the corpus under cfg.data_dir.
inline Corpus load_corpus(const RunConfig& cfg, std::ostream& log) {
    auto parsed = parse_corpus(CorpusPaths::in_directory(cfg.data_dir), cfg.delimiter);
    for (const auto& r : parsed.rejected)
        log << "rejected " << r.dataset << " line " << r.line << ": " << r.reason << '\n';
    auto cleaned = clean_missing(std::move(parsed.corpus));
    const auto& rep = cleaned.report;
    log << "cleaning: " << rep.ages_imputed << " ages and " << rep.incomes_imputed
        << " incomes imputed, " << rep.categoricals_set_unknown << " categoricals set to unknown, "
        << rep.transactions_deleted << " transactions deleted\n";
    return std::move(cleaned.corpus);
}

/// Hash of the input files plus every setting a matrix depends on.
inline std::uint64_t input_fingerprint(const RunConfig& cfg) {
    const auto paths = CorpusPaths::in_directory(cfg.data_dir);
    std::uint64_t h = fnv1a("famrec-matrices-v1");
    for (const auto& p : {paths.profiles, paths.transactions, paths.visits, paths.participation,
                          paths.families}) {
        std::ifstream in(p, std::ios::binary);
        if (!in)
            throw DataError("missing input file " + p.string());
        const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
        h = fnv1a(bytes, h);
        h = fnv1a("\x1f", h);
    }
    h = fnv1a(std::string(1, cfg.delimiter), h);
    for (const auto& [axis, w] : cfg.weights)
        h = fnv1a(std::string(axis_name(axis)) + "=" + detail::format_double(w) + ";", h);
    return h;
}

/// Five axis matrices plus their hybrid blend for one actor level, built
/// from the full history.
struct MatrixSet {
    Level level = Level::user;
    std::vector<std::string> actors;
    std::map<Axis, SimilarityMatrix> matrices;  // includes Axis::hybrid
    bool loaded_from_cache = false;
};

inline std::filesystem::path matrix_path(const RunConfig& cfg, Level level, Axis axis) {
    return cfg.out_dir / "matrices" /
           (std::string(level_name(level)) + "_" + std::string(axis_name(axis)) + ".bin");
}

inline MatrixSet build_matrix_set(const Corpus& corpus, Level level, const RunConfig& cfg) {
    MatrixSet set;
    set.level = level;
    const auto vectors = encode_profiles(corpus.profiles);
    std::vector<FamilyGroup> units;
    if (level == Level::family) {
        units = family_units(corpus);
        for (const auto& u : units)
            set.actors.push_back(u.family_id);
    } else {
        for (const auto& p : corpus.profiles)
            set.actors.push_back(p.member_id);
    }
    for (Axis a : {Axis::brand, Axis::type, Axis::category, Axis::activity}) {
        auto triples = extract_triples(corpus, a);
        if (level == Level::family)
            triples = lift_triples_to_family(triples, units);
        set.matrices.emplace(a, jaccard_matrix(triples, set.actors, cfg.workers));
    }
    set.matrices.emplace(Axis::profile,
                         level == Level::family
                             ? profile_similarity_matrix(family_profile_vectors(vectors, units), cfg.workers)
                             : profile_similarity_matrix(vectors, cfg.workers));
    std::vector<const SimilarityMatrix*> refs;
    for (const auto& [_, w] : set.matrices)
        refs.push_back(&w);
    set.matrices.emplace(Axis::hybrid,
                         blend_matrices(refs, cfg.model_spec(ModelKind::hybrid_user).blend_for(Axis::brand)));
    return set;
}

inline constexpr Axis kStoredAxes[] = {Axis::brand, Axis::type, Axis::category, Axis::activity,
                                       Axis::profile, Axis::hybrid};

/// Loads a level's matrices from the cache when enabled and current;
/// otherwise builds them, writing dumps when `write` is set.
inline MatrixSet obtain_matrix_set(const Corpus& corpus, Level level, const RunConfig& cfg,
                                   bool write, std::ostream& log) {
    const std::uint64_t fp = input_fingerprint(cfg);
    if (cfg.cache) {
        MatrixSet set;
        set.level = level;
        bool ok = true;
        for (Axis a : kStoredAxes) {
            const auto path = matrix_path(cfg, level, a);
            if (!std::filesystem::exists(path)) {
                ok = false;
                break;
            }
            auto loaded = load_matrix(path);
            if (loaded.fingerprint != fp || loaded.matrix.axis() != a) {
                ok = false;
                break;
            }
            set.matrices.emplace(a, std::move(loaded.matrix));
        }
        if (ok) {
            set.actors = set.matrices.at(Axis::hybrid).keys().keys();
            set.loaded_from_cache = true;
            log << "loaded " << level_name(level) << " matrices from cache\n";
            return set;
        }
    }
    auto set = build_matrix_set(corpus, level, cfg);
    if (write || cfg.cache)
        for (const auto& [axis, w] : set.matrices)
            save_matrix(w, matrix_path(cfg, level, axis), fp);
    return set;
}

// ---------------------------------------------------------------------------

inline void cmd_generate(const RunConfig& cfg, std::ostream& log) {
    const auto corpus = generate(cfg.synth);
    write_corpus(corpus, CorpusPaths::in_directory(cfg.out_dir), cfg.delimiter);
    log << "generated " << corpus.profiles.size() << " profiles, " << corpus.transactions.size()
        << " transactions, " << corpus.visits.size() << " visits, "
        << corpus.participations.size() << " participations, " << corpus.families.size()
        << " families into " << cfg.out_dir.string() << '\n';
}

inline void cmd_describe(const RunConfig& cfg, std::ostream& out, std::ostream& log,
                         std::size_t top = 10) {
    const auto corpus = load_corpus(cfg, log);
    for (const auto& s : describe(corpus)) {
        out << "# " << axis_name(s.axis) << " (" << s.counts.size() << " items)\n";
        out << "item,amount\n";
        for (std::size_t i = 0; i < s.counts.size() && i < top; ++i)
            out << s.counts[i].first << ',' << s.counts[i].second << '\n';
    }
}

struct SimilarityRun {
    std::vector<std::filesystem::path> files;
    bool loaded_from_cache = false;
};

inline SimilarityRun cmd_similarity(const RunConfig& cfg, std::ostream& log) {
    const auto corpus = load_corpus(cfg, log);
    SimilarityRun run;
    run.loaded_from_cache = true;
    for (Level level : {Level::user, Level::family}) {
        const auto set = obtain_matrix_set(corpus, level, cfg, true, log);
        run.loaded_from_cache = run.loaded_from_cache && set.loaded_from_cache;
        for (Axis a : kStoredAxes)
            run.files.push_back(matrix_path(cfg, level, a));
        log << level_name(level) << " matrices: " << set.actors.size() << " actors\n";
    }
    return run;
}

/// Prints actor_id,rank,item_id,score rows for one user, family, or
/// member served by the family model.
inline void cmd_recommend(const RunConfig& cfg, const std::string& actor, Level level, Axis axis,
                          std::size_t n, std::ostream& out, std::ostream& log) {
    if (axis != Axis::brand && axis != Axis::type && axis != Axis::category)
        throw UsageError("recommendations are made on brand, type or category");
    if (n == 0)
        throw UsageError("n must be positive");
    const auto corpus = load_corpus(cfg, log);
    const Level matrix_level = level == Level::user ? Level::user : Level::family;
    const auto set = obtain_matrix_set(corpus, matrix_level, cfg, false, log);
    const auto& w = set.matrices.at(Axis::hybrid);
    const auto triples = extract_triples(corpus, axis);

    RecommendationList list;
    if (level == Level::member) {
        const auto units = family_units(corpus);
        const FamilyGroup* unit = nullptr;
        for (const auto& u : units)
            if (std::find(u.member_ids.begin(), u.member_ids.end(), actor) != u.member_ids.end())
                unit = &u;
        if (!unit)
            throw DataError("unknown member '" + actor + "'");
        list = recommend_for_member(Baskets(lift_triples_to_family(triples, units)), Baskets(triples),
                                    w, unit->family_id, actor, n, cfg.k);
    } else {
        if (!w.index_of(actor))
            throw DataError("unknown " + std::string(level_name(level)) + " '" + actor + "'");
        list = level == Level::family
                   ? recommend_for_family(lift_triples_to_family(triples, family_units(corpus)), w,
                                          actor, n, cfg.k)
                   : top_n_user_based(triples, w, actor, n, cfg.k);
    }
    out << "actor_id,rank,item_id,score\n";
    for (std::size_t r = 0; r < list.items.size(); ++r)
        out << actor << ',' << r + 1 << ',' << list.items[r].item << ','
            << detail::format_double(list.items[r].score) << '\n';
}

struct EvaluateRun {
    EvalReport report;
    Instant split_point;
    double test_fraction = 0;
    std::filesystem::path report_path;
};

inline EvaluateRun cmd_evaluate(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    const auto corpus = load_corpus(cfg, log);
    EvaluateRun run;
    run.split_point = cfg.split ? *cfg.split
                                : split_point_for_fraction(corpus.transactions, cfg.test_fraction);
    const auto split = temporal_split(corpus.transactions, run.split_point);
    run.test_fraction = split.test_fraction();
    log << "split at " << format_instant(run.split_point) << ": " << split.train.size()
        << " train / " << split.test.size() << " test transactions\n";

    std::vector<ModelSpec> specs;
    for (ModelKind m : cfg.models)
        specs.push_back(cfg.model_spec(m));
    run.report = run_experiments(corpus, run.split_point, specs, cfg.workers);

    run.report_path = cfg.out_dir / "report.csv";
    emit_report(run.report, run.report_path);
    std::ofstream mean(cfg.out_dir / "report_mean.csv", std::ios::binary);
    if (!mean)
        throw DataError("cannot write " + (cfg.out_dir / "report_mean.csv").string());
    emit_mean_report(run.report, mean);
    log << "wrote " << run.report.rows.size() << " rows to " << run.report_path.string() << '\n';
    return run;
}

} // namespace famrec

#endif // FAMREC_COMMANDS_HPP_
