#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ascollab/agents.hpp"
#include "ascollab/backend.hpp"
#include "ascollab/landscape.hpp"
#include "ascollab/network.hpp"
#include "ascollab/stores.hpp"

namespace ascollab {

enum class ToolKind {
    QueryArchive,
    QueryRegistry,
    QueryMemory,
    LiteratureSearch,
    EstablishCollaboration,
    Communicate,
    RunAnalysis,
    WriteReport,
};

std::string to_string(ToolKind kind);
ToolKind tool_kind_from_string(const std::string& s);

struct SessionBudget {
    int max_steps = 40;
};

struct ResearchOutput {
    std::string output_id;
    int round = 0;
    std::string primary_agent_id;
    std::vector<std::string> collab_agent_ids;
    Approach approach;
    double claimed_value = 0.0;
    std::string title;
    std::string abstract;
    std::string report_text;
    std::string code_log;
    std::vector<std::string> citations;  // archive paper ids
    std::vector<ToolKind> tool_trace;
};

struct CollabMessage {
    std::string from;
    std::string to;
    int sequence = 0;
    nlohmann::json body;
};

/// Bidirectional ordered channel between a principal and one collaborator.
struct CollabChannel {
    std::string principal;
    std::string collaborator;
    std::vector<CollabMessage> messages;
};

CollabChannel establish_collaboration(const std::string& principal,
                                      const std::string& collaborator, const StoreView& view);

double measurement_noise_sigma_default();

/// One noisy evaluation of the ground-truth surface: f(x) + eps.
double run_analysis(const Landscape& ls, const Approach& x, double sigma,
                    std::mt19937_64& rng);

struct ReportFields {
    std::string title;
    std::string abstract;
    std::string report_text;
};

/// Deterministic report templating with the mandatory section headings.
ReportFields render_report(int round, const Approach& approach, double value,
                           int n_measurements, const std::vector<CitedRef>& citations,
                           const std::vector<std::string>& collab_agent_ids);

struct SessionContext {
    int round = 0;
    const Landscape* landscape = nullptr;
    PerceptionParams perception;
    // Accepted approaches visible to this agent (global archive in networked
    // mode, own accepted work in independent mode).
    const std::vector<Approach>* visible_history = nullptr;
    const StoreView* view = nullptr;
    // Round-start copies of every agent, indexed by position; answers
    // collaboration advisories without touching live peers.
    const std::vector<AgentState>* peer_snapshots = nullptr;
    const AttentionGraph* attention = nullptr;  // previous barrier's graph
    bool networked = true;
    double sigma_meas = 0.05;
    int citation_count = 3;
    Backend* backend = nullptr;
    std::uint64_t stream_seed = 0;
};

struct ToolTraceLine {
    int step = 0;
    ToolKind kind = ToolKind::RunAnalysis;
    nlohmann::json payload;
};

ResearchOutput compose_output(const AgentState& agent, const SessionContext& ctx,
                              const Approach& best_approach, double best_value,
                              int n_measurements, const std::vector<CitedRef>& citations,
                              const std::vector<std::string>& collabs,
                              const std::vector<ToolKind>& trace, const std::string& code_log);

/// Budgeted plan-act-observe loop; always yields a well-formed output.
ResearchOutput run_session(AgentState& agent, const SessionContext& ctx,
                           const SessionBudget& budget,
                           std::vector<ToolTraceLine>* trace_lines = nullptr);

}  // namespace ascollab
