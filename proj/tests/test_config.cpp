#include <gtest/gtest.h>

#include <sstream>

#include "famrec/commands.hpp"
#include "support.hpp"

using namespace famrec;

TEST(config, sections_comments_and_keys) {
    std::istringstream in(
        "# experiment\n"
        "[data]\n"
        "dir = corpus\n"
        "delimiter = ;\n"
        "\n"
        "[run]\n"
        "k = 25\n"
        "split = 2016-07-15 00:00:00\n"
        "models = user, hybrid_family\n"
        "n_max = 5\n"
        "cache = on\n"
        "family_protocol = pooled\n"
        "[blend]\n"
        "profile = 2\n");
    RunConfig cfg;
    read_config(in, cfg);
    EXPECT_EQ(cfg.data_dir, "corpus");
    EXPECT_EQ(cfg.delimiter, ';');
    EXPECT_EQ(cfg.k, 25u);
    EXPECT_EQ(*cfg.split, parse_instant("2016-07-15 00:00:00"));
    EXPECT_EQ(cfg.models, (std::vector<ModelKind>{ModelKind::user, ModelKind::hybrid_family}));
    EXPECT_EQ(cfg.n_max, 5u);
    EXPECT_TRUE(cfg.cache);
    EXPECT_EQ(cfg.family_protocol, FamilyProtocol::pooled);
    EXPECT_EQ(cfg.weights.at(Axis::profile), 2.0);
    EXPECT_EQ(cfg.model_spec(ModelKind::user).weight(Axis::profile), 2.0);
}

TEST(config, synth_keys) {
    std::istringstream in("[synth]\nseed=9\nusers=50\nfamilies=20\nfamily_correlation=0.5\n"
                          "segments=3\nsegment_pool_size=4\nfamily_size_weights=1,1\n");
    RunConfig cfg;
    read_config(in, cfg);
    EXPECT_EQ(cfg.synth.seed, 9u);
    EXPECT_EQ(cfg.synth.users, 50u);
    EXPECT_EQ(cfg.synth.families, 20u);
    EXPECT_EQ(cfg.synth.family_correlation, 0.5);
    EXPECT_EQ(cfg.synth.segments, 3u);
    EXPECT_EQ(cfg.synth.segment_pool_size, 4u);
    EXPECT_EQ(cfg.synth.family_size_weights, (std::vector<double>{1, 1}));
}

TEST(config, errors_are_usage_errors) {
    RunConfig cfg;
    for (const char* text : {"[run]\nbogus = 1\n", "run.k = many\n", "[run\n", "just words\n",
                             "run.split = tomorrow\n", "blend.hybrid = 1\n", "run.cache = maybe\n",
                             "run.models = user,nobody\n", "data.delimiter = ab\n"}) {
        std::istringstream in(text);
        EXPECT_THROW(read_config(in, cfg), UsageError) << text;
    }
    EXPECT_THROW(read_config(std::filesystem::path("/nonexistent/famrec.cfg"), cfg), UsageError);
}

TEST(config, validation) {
    RunConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.n_max = 101;
    EXPECT_THROW(cfg.validate(), UsageError);
    cfg = RunConfig{};
    cfg.n_max = 0;
    EXPECT_THROW(cfg.validate(), UsageError);
    cfg = RunConfig{};
    cfg.test_fraction = 1.0;
    EXPECT_THROW(cfg.validate(), UsageError);
    cfg = RunConfig{};
    cfg.weights[Axis::brand] = -1;
    EXPECT_THROW(cfg.validate(), UsageError);
    cfg = RunConfig{};
    cfg.models.clear();
    EXPECT_THROW(cfg.validate(), UsageError);
}

TEST(config, weights_flag_syntax) {
    const auto w = parse_weights("brand=1, profile=0.5");
    EXPECT_EQ(w.size(), 2u);
    EXPECT_EQ(w.at(Axis::profile), 0.5);
    EXPECT_THROW(parse_weights("brand"), UsageError);
    EXPECT_THROW(parse_weights("colour=1"), UsageError);
    EXPECT_THROW(parse_weights("hybrid=1"), UsageError);
}

TEST(commands, evaluate_similarity_and_recommend_in_process) {
    support::TempDir dir;
    RunConfig cfg;
    cfg.synth.users = 150;
    cfg.synth.families = 50;
    cfg.synth.transactions = 1200;
    cfg.synth.visits = 20;
    cfg.synth.participations = 300;
    cfg.out_dir = dir / "data";
    std::ostringstream log;
    cmd_generate(cfg, log);
    cfg.data_dir = dir / "data";
    cfg.out_dir = dir / "out";
    cfg.workers = 2;

    const auto run = cmd_evaluate(cfg, log);
    EXPECT_EQ(run.report.rows.size(), 90u);
    EXPECT_NEAR(run.test_fraction, 0.2, 0.01);
    std::ifstream report(run.report_path);
    EXPECT_EQ(parse_report(report), run.report);

    cfg.cache = true;
    const auto first = cmd_similarity(cfg, log);
    EXPECT_FALSE(first.loaded_from_cache);
    EXPECT_EQ(first.files.size(), 12u);
    std::vector<SimilarityMatrix> dumped;
    for (const auto& f : first.files)
        dumped.push_back(load_matrix(f).matrix);
    const auto second = cmd_similarity(cfg, log);
    EXPECT_TRUE(second.loaded_from_cache);
    for (std::size_t i = 0; i < first.files.size(); ++i)
        EXPECT_EQ(load_matrix(second.files[i]).matrix, dumped[i]);
    // the cached set equals a fresh build
    const auto corpus = load_corpus(cfg, log);
    EXPECT_EQ(build_matrix_set(corpus, Level::user, cfg).matrices.at(Axis::hybrid), dumped[5]);

    std::ostringstream out;
    cmd_recommend(cfg, "M00001", Level::user, Axis::brand, 3, out, log);
    EXPECT_EQ(out.str().rfind("actor_id,rank,item_id,score\nM00001,1,", 0), 0u);
    out.str("");
    cmd_recommend(cfg, "F00001", Level::family, Axis::type, 3, out, log);
    EXPECT_NE(out.str().find("F00001,1,"), std::string::npos);
    out.str("");
    cmd_recommend(cfg, "M00002", Level::member, Axis::category, 3, out, log);
    EXPECT_NE(out.str().find("M00002,1,"), std::string::npos);
    EXPECT_THROW(cmd_recommend(cfg, "M99999", Level::user, Axis::brand, 3, out, log), DataError);
    EXPECT_THROW(cmd_recommend(cfg, "M99999", Level::member, Axis::brand, 3, out, log), DataError);
    EXPECT_THROW(cmd_recommend(cfg, "M00001", Level::user, Axis::profile, 3, out, log), UsageError);

    // a changed weight invalidates the cache
    cfg.weights[Axis::profile] = 3;
    EXPECT_FALSE(cmd_similarity(cfg, log).loaded_from_cache);
}
