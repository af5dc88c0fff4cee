// Scenario runner: reads a plain-text config, executes one scenario, and
// writes CSV tables plus a JSON summary.  Exit codes: 0 success, 1 property
// failure, 2 config error, 3 numerical failure.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "esl/acceptance.hpp"
#include "esl/config.hpp"
#include "esl/scenarios.hpp"
#include "esl/threads.hpp"

int main(int argc, char** argv) {
    CLI::App app{"edge-spectral-lab: spectral experiments for the half-plane "
                 "magnetic Schrodinger operator"};
    std::string config_path;
    std::string out_override;
    int threads = 0;
    bool verify = false;
    app.add_option("config", config_path, "path to a key = value config file")
        ->required();
    app.add_option("--out", out_override, "override the output directory");
    app.add_option("--threads", threads,
                   "worker thread count (default: ESL_THREADS or hardware)");
    app.add_flag("--verify", verify, "run the acceptance suite after the scenario");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    esl::thread_count() = esl::effective_threads(unsigned(threads > 0 ? threads : 0));

    esl::RunConfig cfg;
    try {
        std::ifstream in(config_path, std::ios::binary);
        if (!in) {
            std::cerr << "config error: cannot open '" << config_path << "'\n";
            return 2;
        }
        std::ostringstream text;
        text << in.rdbuf();
        cfg = esl::parse_config(text.str());
    } catch (const esl::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    if (!out_override.empty()) cfg.out_dir = out_override;

    int exit_code = 0;
    auto t0 = std::chrono::steady_clock::now();
    try {
        if (cfg.scenario == esl::Scenario::verify) {
            int hard = esl::run_acceptance(std::cout);
            if (hard > 0) exit_code = 1;
        } else {
            esl::RunReport rep = esl::run_scenario(cfg);
            esl::emit_report(rep, cfg.out_dir);
            std::cout << "wrote " << rep.tables.size() << " table(s) + summary.json to "
                      << cfg.out_dir << "\n";
            if (!rep.properties_ok) {
                std::cerr << "property failure: see summary.json checks\n";
                exit_code = 1;
            }
        }
        if (verify && cfg.scenario != esl::Scenario::verify) {
            int hard = esl::run_acceptance(std::cout);
            if (hard > 0 && exit_code == 0) exit_code = 1;
        }
    } catch (const esl::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const esl::numeric_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0);
    std::cout << "elapsed " << dt.count() << " s\n";  // stdout only: files stay deterministic
    return exit_code;
}
