#include <iostream>

#include "CLI11.hpp"
#include "opkern/cli.hpp"
#include "opkern/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Spectral analysis of operator-valued integral kernels"};
    app.require_subcommand(1);

    opkern::cli::RunConfig cfg;
    std::string config, out_dir = "opkern_out", z_grid, ranks;
    std::vector<std::string> params;
    std::uint64_t seed = 42;
    int bn_max = 6;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config, "kernel/run configuration (JSON)");
        sub->add_option("--gallery", cfg.gallery, "gallery kernel id");
        sub->add_option("--param", params, "gallery parameter k=v (repeatable)");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "seed for randomized checks");
    };
    auto* analyze = app.add_subcommand("analyze", "spectrum, trace formula and trace-class diagnostics");
    auto* det = app.add_subcommand("det", "Fredholm determinants, coefficients and zeros");
    auto* mercer = app.add_subcommand("mercer", "Mercer expansion error and diagonal trace condition");
    auto* transform = app.add_subcommand("transform", "compactify a real-line kernel and compute its spectrum");
    app.add_subcommand("gallery", "list gallery kernels");
    for (auto* sub : {analyze, det, mercer, transform}) add_common(sub);
    det->add_option("--z-grid", z_grid, "re0:re1:nre,im0:im1:nim");
    det->add_option("--bn-max", bn_max, "highest Fredholm coefficient");
    mercer->add_option("--ranks", ranks, "comma-separated truncation ranks");

    CLI11_PARSE(app, argc, argv);

    auto* sub = app.get_subcommands().front();
    cfg.command = sub->get_name();
    try {
        if (!config.empty()) cfg.config_path = config;
        cfg.out_dir = out_dir;
        for (const auto& kv : params) cfg.params.insert(opkern::cli::parse_param(kv));
        if (cfg.command != "gallery" && sub->count("--seed")) cfg.seed = seed;
        if (cfg.command == "det") {
            if (det->count("--z-grid")) cfg.z_grid = z_grid;
            if (det->count("--bn-max")) cfg.bn_max = bn_max;
        }
        if (cfg.command == "mercer" && mercer->count("--ranks")) cfg.ranks = opkern::cli::parse_ranks(ranks);
    } catch (const opkern::Error& e) {
        std::cerr << "opkern: " << e.what() << "\n";
        return opkern::cli::kExitError;
    }
    return opkern::cli::run(cfg, std::cout, std::cerr);
}
