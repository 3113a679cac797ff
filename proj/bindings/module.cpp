// Python bindings for the main engine operations. JSON documents cross the
// boundary as strings to keep the wire format identical to the CLI and the
// on-disk JSONL logs.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "ascollab/errors.hpp"
#include "ascollab/runtime.hpp"

namespace py = pybind11;
using namespace ascollab;

namespace {

std::string log_to_text(const RunLog& log) {
    std::ostringstream out;
    for (const auto& line : log.lines()) out << line.dump() << "\n";
    return out.str();
}

RunLog log_from_text(const std::string& text) { return RunLog::from_text(text); }

}  // namespace

PYBIND11_MODULE(_ascollab, m) {
    m.doc() = "Round-based multi-agent research-simulation engine";

    py::register_exception<ValidationError>(m, "ValidationError");
    py::register_exception<ConflictError>(m, "ConflictError");
    py::register_exception<NotFoundError>(m, "NotFoundError");
    py::register_exception<IntegrityError>(m, "IntegrityError");
    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<BackendError>(m, "BackendError");

    m.def(
        "default_config", [] { return config_to_json(ExperimentConfig{}).dump(); },
        "Reference configuration as a JSON string.");

    m.def(
        "run_experiment",
        [](const std::string& config_json, bool parallel) {
            ExperimentConfig config = config_from_json(nlohmann::json::parse(config_json));
            py::gil_scoped_release release;
            RunLog log = run_experiment(config, nullptr, parallel);
            return log_to_text(log);
        },
        py::arg("config_json"), py::arg("parallel") = false,
        "Run the full experiment loop; returns the JSONL event log as text.");

    m.def(
        "run_ablation_independent",
        [](const std::string& config_json, bool parallel) {
            ExperimentConfig config = config_from_json(nlohmann::json::parse(config_json));
            py::gil_scoped_release release;
            RunLog log = run_ablation_independent(config, nullptr, parallel);
            return log_to_text(log);
        },
        py::arg("config_json"), py::arg("parallel") = false,
        "Run the loop with shared stores and collaboration disabled.");

    m.def(
        "analyze",
        [](const std::string& log_text) { return analyze(log_from_text(log_text)).dump(); },
        py::arg("log_text"), "Compute the analysis report for a finalized log.");

    m.def(
        "replay",
        [](const std::string& log_text, int round) {
            StoreView view = replay(log_from_text(log_text), round);
            return nlohmann::json{{"round", round},
                                  {"store_digest", view.digest()},
                                  {"registry_size", view.registry_size()},
                                  {"archive_size", view.archive_size()}}
                .dump();
        },
        py::arg("log_text"), py::arg("round"),
        "Reconstruct the store state at a round barrier; returns a JSON summary.");

    m.def(
        "log_digest",
        [](const std::string& log_text) { return log_from_text(log_text).digest(); },
        py::arg("log_text"), "Verify and return the log's content digest.");

    m.def(
        "save_log",
        [](const std::string& log_text, const std::string& path) {
            log_from_text(log_text).save(path);
        },
        py::arg("log_text"), py::arg("path"), "Verify a log and write it to disk as JSONL.");

    m.def(
        "load_log", [](const std::string& path) { return log_to_text(RunLog::load(path)); },
        py::arg("path"), "Load a JSONL log from disk, verifying its digest.");
}
