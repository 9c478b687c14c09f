#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "capillary/cli_io.hpp"
#include "capillary/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"capillary curve minimization and limit experiments"};
    std::string config_path;
    std::string out_dir = "./out";
    std::uint64_t seed = 0;
    app.add_option("--config", config_path, "run configuration (key = value lines)")->required();
    auto* out_opt = app.add_option("--out", out_dir, "output directory")->capture_default_str();
    auto* seed_opt = app.add_option("--seed", seed, "random seed");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(capillary::ErrorKind::Config);
    }

    try {
        std::ifstream in(config_path);
        if (!in) throw capillary::IoError("cannot read config " + config_path);
        std::stringstream text;
        text << in.rdbuf();
        capillary::RunConfig cfg = capillary::parse_config(text.str());
        // an explicit --out wins; otherwise a directory named in the file is kept
        if (out_opt->count() > 0 || cfg.out_dir == capillary::RunConfig{}.out_dir) cfg.out_dir = out_dir;
        if (seed_opt->count() > 0) {
            cfg.seed = seed;
            cfg.optimizer.seed = seed;
        }
        return capillary::run(cfg, std::cout, std::cerr);
    } catch (const std::exception& e) {
        return capillary::report_error(e, std::cerr);
    }
}
