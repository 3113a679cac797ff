#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ascollab/errors.hpp"
#include "ascollab/runtime.hpp"

namespace {

nlohmann::json error_json(const std::string& type, const std::string& message) {
    return {{"error", type}, {"message", message}};
}

int fail(const std::string& type, const std::string& message) {
    std::cerr << error_json(type, message).dump() << std::endl;
    return 1;
}

ascollab::ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ascollab::ConfigError("cannot open config file: " + path);
    nlohmann::json doc = nlohmann::json::parse(in);
    return ascollab::config_from_json(doc);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"round-based multi-agent research simulation"};
    app.require_subcommand(1);

    std::string config_path, out_path, log_path, mode, backend_kind, endpoint;
    std::uint64_t seed = 0;
    bool have_seed = false;
    int round = 0;
    bool parallel = false;

    CLI::App* run = app.add_subcommand("run", "run an experiment and write a JSONL log");
    run->add_option("--config", config_path, "experiment config (JSON)")->required();
    auto* seed_opt = run->add_option("--seed", seed, "override config seed");
    run->add_option("--mode", mode, "networked|independent")
        ->check(CLI::IsMember({"networked", "independent"}));
    run->add_option("--backend", backend_kind, "simulation|external")
        ->check(CLI::IsMember({"simulation", "external"}));
    run->add_option("--endpoint", endpoint, "external backend URL");
    run->add_flag("--parallel", parallel, "run each round's sessions concurrently");
    run->add_option("--out", out_path, "output log path (JSONL)")->required();

    CLI::App* analyze_cmd = app.add_subcommand("analyze", "summarize a finished run log");
    analyze_cmd->add_option("--log", log_path, "run log (JSONL)")->required();
    analyze_cmd->add_option("--out", out_path, "report path (JSON)")->required();

    CLI::App* replay_cmd =
        app.add_subcommand("replay", "reconstruct store state at a round barrier");
    replay_cmd->add_option("--log", log_path, "run log (JSONL)")->required();
    replay_cmd->add_option("--round", round, "round barrier to reconstruct")->required();

    try {
        app.parse(argc, argv);
        have_seed = seed_opt->count() > 0;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << error_json("usage", e.what()).dump() << std::endl;
        return app.exit(e, std::cout, std::cerr) ? 2 : 2;
    }

    try {
        if (run->parsed()) {
            ascollab::ExperimentConfig config = load_config(config_path);
            if (have_seed) config.seed = seed;
            if (!mode.empty()) config.mode = mode;
            if (!backend_kind.empty()) config.backend.kind = backend_kind;
            if (!endpoint.empty()) config.backend.endpoint = endpoint;
            ascollab::validate_config(config);
            ascollab::RunLog log = ascollab::run_experiment(config, nullptr, parallel);
            log.save(out_path);
            std::cout << nlohmann::json{{"log", out_path}, {"sha256", log.digest()}}.dump()
                      << std::endl;
        } else if (analyze_cmd->parsed()) {
            ascollab::RunLog log = ascollab::RunLog::load(log_path);
            nlohmann::json report = ascollab::analyze(log);
            std::ofstream out(out_path);
            if (!out) throw ascollab::ConfigError("cannot open report file: " + out_path);
            out << report.dump(2) << "\n";
            std::cout << nlohmann::json{{"report", out_path}}.dump() << std::endl;
        } else if (replay_cmd->parsed()) {
            ascollab::RunLog log = ascollab::RunLog::load(log_path);
            ascollab::StoreView view = ascollab::replay(log, round);
            std::cout << nlohmann::json{{"round", round},
                                        {"store_digest", view.digest()},
                                        {"registry_size", view.registry_size()},
                                        {"archive_size", view.archive_size()}}
                             .dump()
                      << std::endl;
        }
    } catch (const ascollab::ConfigError& e) {
        return fail("config", e.what());
    } catch (const ascollab::ValidationError& e) {
        return fail("validation", e.what());
    } catch (const ascollab::NotFoundError& e) {
        return fail("not_found", e.what());
    } catch (const ascollab::IntegrityError& e) {
        return fail("integrity", e.what());
    } catch (const ascollab::BackendError& e) {
        return fail("backend", e.what());
    } catch (const std::exception& e) {
        return fail("internal", e.what());
    }
    return 0;
}
