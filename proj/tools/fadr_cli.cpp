/// @file fadr_cli.cpp
/// @brief Command-line driver: fadr <brunner|dispersion|channel|fadr1d> --config <path> --out <dir> [--check].

#include "fadr/cli/config.hpp"
#include "fadr/cli/experiments.hpp"
#include "fadr/version.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Options {
    std::string config;
    std::string out;
    bool check = false;
};

int execute(fadr::cli::Mode mode, const Options& o) {
    using namespace fadr::cli;
    RunConfig cfg;
    try {
        cfg = load_config(o.config, mode);
    } catch (const ConfigError& e) {
        std::cerr << "fadr: invalid config: " << e.what() << '\n';
        return kExitConfig;
    }
    if (o.check) {
        std::cout << "fadr: " << o.config << " is a valid " << to_string(mode) << " config\n";
        return kExitOk;
    }
    std::filesystem::path dir = !o.out.empty() ? o.out : cfg.output_dir;
    if (dir.empty()) {
        std::cerr << "fadr: no output directory; pass --out or set output_dir\n";
        return kExitConfig;
    }
    const Warn warn = [](const std::string& m) { std::cerr << "fadr: warning: " << m << '\n'; };
    try {
        const json manifest = run(cfg, dir, warn);
        if (manifest.at("status") == "failed") {
            std::cerr << "fadr: numerical failure: " << manifest.at("failure").get<std::string>() << " (see "
                      << (dir / "failure.json").string() << ")\n";
            return kExitNumerical;
        }
        std::cout << "fadr: wrote " << manifest.at("files").size() << " files to " << dir.string() << '\n';
        return kExitOk;
    } catch (const fadr::NumericalError& e) {
        std::filesystem::create_directories(dir);
        std::ofstream f(dir / "failure.json");
        f << json{{"failure", e.what()}, {"step", e.step()}, {"mode", to_string(mode)}}.dump(1) << '\n';
        std::cerr << "fadr: numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const fadr::ConvergenceError& e) {
        std::filesystem::create_directories(dir);
        std::ofstream f(dir / "failure.json");
        f << json{{"failure", e.what()}, {"iterations", e.iterations()}, {"last_residual", e.last_residual()},
                  {"mode", to_string(mode)}}
                 .dump(1)
          << '\n';
        std::cerr << "fadr: solver did not converge: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "fadr: error: " << e.what() << '\n';
        return kExitOther;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional advection-diffusion-reaction solver kit"};
    app.set_version_flag("--version", std::string("fadr ") + fadr::kVersion);
    app.require_subcommand(1);

    Options opts;
    std::optional<fadr::cli::Mode> chosen;
    for (auto mode : {fadr::cli::Mode::brunner, fadr::cli::Mode::dispersion, fadr::cli::Mode::channel,
                      fadr::cli::Mode::fadr1d}) {
        auto* sub = app.add_subcommand(fadr::cli::to_string(mode));
        sub->add_option("--config", opts.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opts.out, "output directory (overrides output_dir)");
        sub->add_flag("--check", opts.check, "validate the config and exit");
        sub->callback([&chosen, mode] { chosen = mode; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }
    return chosen ? execute(*chosen, opts) : kExitOther;
}
