// Copyright (c) 2026 The specdec-grid Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "specgrid/commands.hpp"

namespace {

specgrid::Config assemble_config(const std::string & config_path,
                                 const std::vector<std::string> & overrides) {
    specgrid::Config config =
        config_path.empty() ? specgrid::Config::defaults() : specgrid::Config::load(config_path);
    for (const std::string & assignment : overrides) {
        config.apply_override(assignment);
    }
    return config;
}

}  // namespace

int main(int argc, char ** argv) {
    CLI::App app{ "speculative decoding testbed for 2D token grids" };
    app.require_subcommand(1);
    app.fallthrough();

    std::string              config_path;
    std::string              out_dir = "out";
    std::string              assets_dir;
    std::vector<std::string> overrides;

    app.add_option("--config", config_path, "config file (key=value sections)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--assets", assets_dir, "asset directory (default: the --out of gen-models)");
    app.add_option("--set", overrides, "override, e.g. --set decode.tau=1e-3")->take_all();

    CLI::App * gen    = app.add_subcommand("gen-models", "write toy model/codebook assets");
    CLI::App * decode = app.add_subcommand("decode", "run one decode; write trace and summary");
    CLI::App * bench  = app.add_subcommand("bench", "sweep one axis over a seed ensemble");
    CLI::App * verify = app.add_subcommand("verify", "run the distributional verification suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError & e) {
        if (e.get_exit_code() == 0) {  // --help
            return app.exit(e);
        }
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    }

    try {
        const specgrid::Config config = assemble_config(config_path, overrides);
        const std::string      assets = assets_dir.empty() ? "assets" : assets_dir;

        if (gen->parsed()) {
            specgrid::cmd_gen_models(config, out_dir == "out" ? "assets" : out_dir);
            return 0;
        }
        if (decode->parsed()) {
            specgrid::cmd_decode(config, assets, out_dir);
            return 0;
        }
        if (bench->parsed()) {
            specgrid::cmd_bench(config, assets, out_dir);
            return 0;
        }
        if (verify->parsed()) {
            return specgrid::cmd_verify(config, out_dir) ? 0 : 1;
        }
    } catch (const specgrid::ConfigError & e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const specgrid::ParamError & e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const specgrid::IoError & e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return 3;
    } catch (const specgrid::Error & e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
