#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "famrec/commands.hpp"

namespace {

// 0 success, 1 usage/config, 2 data, 3 internal invariant
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

struct Flags {
    std::string config;
    std::optional<std::string> data;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> k;
    std::optional<std::string> split;
    std::optional<double> test_fraction;
    std::optional<std::size_t> n_max;
    std::optional<std::string> weights;
    std::optional<std::string> out;
    std::optional<unsigned> workers;
    bool cache = false;
    std::optional<std::string> models;
    std::optional<std::string> family_protocol;
};

famrec::RunConfig resolve(const Flags& f) {
    famrec::RunConfig cfg;
    if (!f.config.empty())
        famrec::read_config(f.config, cfg);
    if (f.data) cfg.data_dir = *f.data;
    if (f.seed) cfg.synth.seed = *f.seed;
    if (f.k) cfg.k = *f.k;
    if (f.split) famrec::apply_setting(cfg, "run.split", *f.split);
    if (f.test_fraction) cfg.test_fraction = *f.test_fraction;
    if (f.n_max) cfg.n_max = *f.n_max;
    if (f.weights)
        for (const auto& [axis, w] : famrec::parse_weights(*f.weights))
            cfg.weights[axis] = w;
    if (f.out) cfg.out_dir = *f.out;
    if (f.workers) cfg.workers = *f.workers;
    if (f.cache) cfg.cache = true;
    if (f.models) cfg.models = famrec::parse_models(*f.models);
    if (f.family_protocol) cfg.family_protocol = famrec::parse_protocol(*f.family_protocol);
    cfg.validate();
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Family-aware collaborative filtering: generate, similarity, recommend, evaluate, describe"};
    app.require_subcommand(1);
    app.fallthrough();
    Flags f;
    app.add_option("--config", f.config, "key=value config file")->check(CLI::ExistingFile);
    app.add_option("--data", f.data, "directory holding the five input files");
    app.add_option("--seed", f.seed, "synthetic corpus seed");
    app.add_option("--k", f.k, "neighborhood size");
    app.add_option("--split", f.split, "split timestamp \"YYYY-MM-DD HH:MM:SS\"");
    app.add_option("--test-fraction", f.test_fraction, "test share used when no split is given");
    app.add_option("--n-max", f.n_max, "largest list length evaluated (1..100)");
    app.add_option("--weights", f.weights, "blend weights axis=w[,axis=w...]");
    app.add_option("--out", f.out, "output directory");
    app.add_option("--workers", f.workers, "worker threads");
    app.add_flag("--cache", f.cache, "reuse matrix dumps under <out>/matrices");
    app.add_option("--models", f.models, "comma list of user, hybrid_user, hybrid_family");
    app.add_option("--family-protocol", f.family_protocol, "per_member or pooled family scoring");

    auto* generate = app.add_subcommand("generate", "write a synthetic corpus to --out");
    auto* similarity = app.add_subcommand("similarity", "build and dump user and family matrices");
    auto* recommend = app.add_subcommand("recommend", "Top-N list for one user, family or member");
    std::string actor, level = "user", axis = "brand";
    std::size_t n = 10;
    recommend->add_option("--actor", actor, "member or family id")->required();
    recommend->add_option("--level", level, "user, family, or member (family model served to one user)");
    recommend->add_option("--axis", axis, "brand, type or category");
    recommend->add_option("--n", n, "list length");
    auto* evaluate = app.add_subcommand("evaluate", "run the Top-k recall/precision sweep");
    auto* describe = app.add_subcommand("describe", "item distribution per axis");
    std::size_t top = 10;
    describe->add_option("--top", top, "rows per axis");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        const auto cfg = resolve(f);
        if (*generate)
            famrec::cmd_generate(cfg, std::cerr);
        else if (*similarity)
            famrec::cmd_similarity(cfg, std::cerr);
        else if (*recommend)
            famrec::cmd_recommend(cfg, actor, famrec::parse_level(level), famrec::parse_axis(axis),
                                  n, std::cout, std::cerr);
        else if (*evaluate)
            famrec::cmd_evaluate(cfg, std::cerr);
        else if (*describe)
            famrec::cmd_describe(cfg, std::cout, std::cerr, top);
    } catch (const famrec::UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const famrec::DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return 0;
}
