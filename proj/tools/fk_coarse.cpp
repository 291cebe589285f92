// fk-coarse: batch experiment runner. See README.md for the experiment
// list, the configuration schema and the output formats.
//
//   fk-coarse <experiment> [--config <path>] [--set key=value]...
//             [--seed <u64>] [--out <dir>]
//   fk-coarse reproduce --dir <artifact-dir>
//
// Exit codes: 0 pass, 2 invariant violation or reproduction mismatch,
// 3 configuration error. FK_COARSE_WORKERS limits the worker count.

#include <CLI11.hpp>
#include <iostream>

#include "fkcg/experiments.hpp"

int main(int argc, char **argv) {
    CLI::App app{"fk-coarse: random-cluster coarse-graining experiments"};
    std::string experiment, config_path, out_dir = "out", artifact_dir;
    std::vector<std::string> overrides;
    std::uint64_t seed = 0;

    std::string names;
    for (const std::string &n : fkcg::experiment_names()) names += n + " | ";
    app.add_option("experiment", experiment, names + "reproduce")->required();
    app.add_option("--config", config_path, "configuration file (key = value lines)");
    app.add_option("--set", overrides, "override, key=value; wins over the file");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--dir", artifact_dir, "artifact directory (reproduce only)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return 3;
    }

    try {
        if (experiment == "reproduce") {
            if (artifact_dir.empty())
                throw fkcg::ConfigError("reproduce: requires --dir <artifact-dir>");
            int code = fkcg::reproduce(artifact_dir, std::cout);
            std::cout << (code == 0 ? "reproduce: match\n" : "reproduce: MISMATCH\n");
            return code;
        }
        fkcg::Config cfg;
        if (!config_path.empty()) cfg = fkcg::Config::from_file(config_path);
        for (const std::string &kv : overrides) {
            std::size_t eq = kv.find('=');
            if (eq == std::string::npos || eq == 0)
                throw fkcg::ConfigError("--set: expected key=value, got '" + kv + "'");
            cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        int code = fkcg::run_experiment(experiment, cfg, seed, out_dir);
        std::cout << experiment << ": " << (code == 0 ? "pass" : "INVARIANT VIOLATION")
                  << " (records in " << out_dir << ")\n";
        return code;
    } catch (const fkcg::ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const std::domain_error &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception &e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 2;
    }
}
