#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ascollab/backend.hpp"
#include "ascollab/landscape.hpp"
#include "ascollab/review.hpp"
#include "ascollab/session.hpp"
#include "ascollab/stores.hpp"

namespace ascollab {

struct LandscapeConfig {
    int dim = 2;
    int n_peaks = 12;
    std::uint64_t seed = 7;
};

struct BackendConfig {
    std::string kind = "simulation";  // "simulation" or "external"
    std::string endpoint;
    int timeout_seconds = 10;
};

struct ExperimentConfig {
    int n_agents = 16;
    int rounds = 40;
    int max_steps = 40;
    int reviewers_per_paper = 2;
    int tournament_size = 4;
    LandscapeConfig landscape;
    PerceptionParams perception;
    std::string mode = "networked";  // "networked" or "independent"
    BackendConfig backend;
    std::uint64_t seed = 1;
    double sigma_meas = 0.05;
    int expertise_cadence = 5;
    int citation_count = 3;
};

void validate_config(const ExperimentConfig& config);
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& doc);

/// Append-only JSONL stream plus a final digest over the canonical lines.
class RunLog {
public:
    void append(nlohmann::json line);
    const std::vector<nlohmann::json>& lines() const { return lines_; }
    std::string compute_digest() const;
    void finalize();
    const std::string& digest() const { return digest_; }

    void save(const std::string& path) const;
    static RunLog load(const std::string& path);
    /// Parses JSONL text and verifies its digest line.
    static RunLog from_text(const std::string& text);

private:
    std::vector<nlohmann::json> lines_;
    std::string digest_;
};

/// Converts accepted outputs into archive records, propagates citations and
/// reputation, and returns the inserted records in paper-id order.
std::vector<PaperRecord> apply_consequences(
    const std::vector<const ResearchOutput*>& accepted,
    const std::map<std::string, MetaReview>& metas, int round, const StoreView& view,
    Stores& stores, int* paper_seq);

/// The T-round experiment loop. `backend` defaults to the built-in
/// simulation backend; `parallel` runs each round's sessions on a worker
/// pool without changing the log.
RunLog run_experiment(const ExperimentConfig& config, Backend* backend = nullptr,
                      bool parallel = false);

/// Same loop with the shared stores and collaboration disabled per agent.
RunLog run_ablation_independent(const ExperimentConfig& config, Backend* backend = nullptr,
                                bool parallel = false);

nlohmann::json analyze(const RunLog& log);

/// Reconstructs the store state at the given round barrier.
StoreView replay(const RunLog& log, int round);

}  // namespace ascollab
