// command-line front end: resolves a JSON experiment config, applies flag
// overrides, and dispatches to the run kinds
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <twistop/config.hpp>
#include <twistop/runner.hpp>

int main(int argc, char** argv) {
    CLI::App app{"randomly twisted transfer operators on Bergman spaces of a disc"};

    std::string config_path, kind, out_dir;
    std::uint64_t seed = 0;
    int trials = 0, L = 0, threads = 0;
    std::vector<int> n_list;

    app.add_option("--config", config_path, "experiment config JSON path");
    app.add_option("--kind", kind,
                   "validate | assemble | simulate | moments | limit | example6");
    app.add_option("--seed", seed, "master seed (overrides config)");
    app.add_option("--trials", trials, "trial/seed count (overrides config)");
    app.add_option("--n", n_list, "permutation size N, repeatable (overrides config)");
    app.add_option("--L", L, "basis truncation size (overrides config)");
    app.add_option("--threads", threads, "worker threads for Monte Carlo trials");
    app.add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        nlohmann::json j = nlohmann::json::object();
        std::filesystem::path base = std::filesystem::current_path();
        if (!config_path.empty()) {
            j = twistop::load_json_file(config_path);
            base = std::filesystem::absolute(config_path).parent_path();
        }
        twistop::ExperimentConfig cfg = twistop::parse_experiment_config(j, base);
        if (app.count("--kind")) cfg.kind = kind;
        if (app.count("--seed")) cfg.seed = seed;
        if (app.count("--trials")) cfg.trials = trials;
        if (app.count("--n")) cfg.n_list = n_list;
        if (app.count("--L")) cfg.L = L;
        if (app.count("--threads")) cfg.threads = threads;
        if (app.count("--out")) cfg.out_dir = out_dir;
        return twistop::run(cfg);
    } catch (const twistop::error& e) {
        std::cout << nlohmann::json{
                         {"error", {{"code", e.code()}, {"message", e.what()}}}}
                         .dump()
                  << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cout << nlohmann::json{
                         {"error", {{"code", "internal-error"}, {"message", e.what()}}}}
                         .dump()
                  << "\n";
        return 1;
    }
}
