#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "casdet/chunk_store.hpp"
#include "casdet/commands.hpp"
#include "casdet/kv_config.hpp"

int main(int argc, char** argv) {
    CLI::App app{
        "casdet - cascade detector analysis: closed-form metrics, parameter sweeps,\n"
        "Monte Carlo verification, and synthetic end-to-end benchmarks"};
    app.get_formatter()->column_width(28);

    std::string mode;
    app.add_option("mode", mode, "analyze | sweep | simulate | bench")->required();
    std::string config_path;
    app.add_option("--config", config_path, "key = value config file");
    std::string out_path;
    app.add_option("--out", out_path, "write primary output here instead of stdout");
    std::string format = "csv";
    app.add_option("--format", format, "csv | json (bench emits key = value text for csv)")
        ->check(CLI::IsMember({"csv", "json"}));
    std::vector<std::string> overrides;
    app.add_option("--set", overrides, "config override key=value (repeatable)");
    // convenience aliases for the most common overrides
    std::string seed, trials, threads;
    app.add_option("--seed", seed, "override config key `seed`");
    app.add_option("--trials", trials, "override config key `trials`");
    app.add_option("--threads", threads, "override config key `threads`");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return casdet::exit_config_error;
    }

    try {
        casdet::kv_file cfg;
        if (!config_path.empty()) {
            cfg = casdet::kv_file::parse_file(config_path);
        }
        for (const auto& entry : overrides) {
            cfg.set_entry(entry);
        }
        if (!seed.empty()) {
            cfg.set("seed", seed);
        }
        if (!trials.empty()) {
            cfg.set("trials", trials);
        }
        if (!threads.empty()) {
            cfg.set("threads", threads);
        }

        std::ofstream out_file;
        if (!out_path.empty()) {
            out_file.open(out_path, std::ios::binary);
            if (!out_file) {
                std::cerr << "cannot open output file: " << out_path << "\n";
                return 1;
            }
        }
        casdet::command_streams io{out_path.empty() ? std::cout : out_file, std::cerr};
        return casdet::run_command(mode, cfg, format, io);
    } catch (const casdet::kv_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return casdet::exit_config_error;
    } catch (const casdet::chunk_io_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
