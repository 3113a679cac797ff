#include "ascollab/session.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "ascollab/errors.hpp"
#include "ascollab/util.hpp"

namespace ascollab {

std::string to_string(ToolKind kind) {
    switch (kind) {
        case ToolKind::QueryArchive: return "QueryArchive";
        case ToolKind::QueryRegistry: return "QueryRegistry";
        case ToolKind::QueryMemory: return "QueryMemory";
        case ToolKind::LiteratureSearch: return "LiteratureSearch";
        case ToolKind::EstablishCollaboration: return "EstablishCollaboration";
        case ToolKind::Communicate: return "Communicate";
        case ToolKind::RunAnalysis: return "RunAnalysis";
        case ToolKind::WriteReport: return "WriteReport";
    }
    throw ValidationError("unknown tool kind");
}

ToolKind tool_kind_from_string(const std::string& s) {
    if (s == "QueryArchive") return ToolKind::QueryArchive;
    if (s == "QueryRegistry") return ToolKind::QueryRegistry;
    if (s == "QueryMemory") return ToolKind::QueryMemory;
    if (s == "LiteratureSearch") return ToolKind::LiteratureSearch;
    if (s == "EstablishCollaboration") return ToolKind::EstablishCollaboration;
    if (s == "Communicate") return ToolKind::Communicate;
    if (s == "RunAnalysis") return ToolKind::RunAnalysis;
    if (s == "WriteReport") return ToolKind::WriteReport;
    throw ValidationError("unknown tool kind: " + s);
}

double measurement_noise_sigma_default() { return 0.05; }

CollabChannel establish_collaboration(const std::string& principal,
                                      const std::string& collaborator, const StoreView& view) {
    if (principal == collaborator) {
        throw ValidationError("agent cannot collaborate with itself: " + principal);
    }
    if (!view.has_agent(collaborator)) {
        throw NotFoundError("unknown collaborator: " + collaborator);
    }
    CollabChannel channel;
    channel.principal = principal;
    channel.collaborator = collaborator;
    return channel;
}

double run_analysis(const Landscape& ls, const Approach& x, double sigma,
                    std::mt19937_64& rng) {
    validate_approach(x, ls.dim);
    double y = true_significance(ls, x);
    if (sigma > 0.0) {
        std::normal_distribution<double> noise(0.0, sigma);
        y += noise(rng);
    }
    return y;
}

namespace {

std::string format_coords(const Approach& x, int decimals = 2) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < x.coords.size(); ++i) {
        if (i) os << ", ";
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.*f", decimals, x.coords[i]);
        os << buf;
    }
    os << ")";
    return os.str();
}

std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

}  // namespace

ReportFields render_report(int round, const Approach& approach, double value,
                           int n_measurements, const std::vector<CitedRef>& citations,
                           const std::vector<std::string>& collab_agent_ids) {
    ReportFields out;
    out.title = "Characterization of approach region " + format_coords(approach) +
                " with measured significance " + format_value(value);
    out.abstract = "We investigate the approach located at coordinates " +
                   format_coords(approach, 4) + " and report a measured significance of " +
                   format_value(value) + " over " + std::to_string(n_measurements) +
                   " analysis runs in round " + std::to_string(round) + ".";
    std::ostringstream body;
    body << "# Title\n" << out.title << "\n\n";
    body << "# Research Question\n"
         << "What is the epistemic significance of the approach at " << format_coords(approach, 4)
         << "?\n\n";
    body << "# Hypothesis and Key Findings\n"
         << "The region around " << format_coords(approach) << " carries significance "
         << format_value(value) << ".\n\n";
    body << "# Rationale/Mechanism\n"
         << "Repeated analysis runs concentrated on the most promising measured location.\n\n";
    body << "# Empirical Evidence\n"
         << "- Best of " << n_measurements << " noisy measurements: " << format_value(value)
         << "\n\n";
    body << "# Literature Evidence\n";
    if (citations.empty()) {
        body << "- No related archive entries were retrieved.\n";
    } else {
        for (const CitedRef& c : citations) {
            body << "- [Internal Archive] {'paper_id': " << c.paper_id << ", 'agent_id': "
                 << c.agent_id << ", 'title': " << c.title << "}\n";
        }
    }
    body << "\n# Assumptions\n- Measurement noise is zero-mean.\n\n";
    body << "# Limitations\n- Findings rest on a bounded analysis budget.\n\n";
    body << "# References\n";
    for (const CitedRef& c : citations) {
        body << "- [Internal Archive] {'paper_id': " << c.paper_id << ", 'agent_id': "
             << c.agent_id << ", 'title': " << c.title << "}\n";
    }
    if (!collab_agent_ids.empty()) {
        body << "\nCollaborators: ";
        for (std::size_t i = 0; i < collab_agent_ids.size(); ++i) {
            if (i) body << ", ";
            body << collab_agent_ids[i];
        }
        body << "\n";
    }
    out.report_text = body.str();
    return out;
}

namespace {

nlohmann::json stances_payload(const Persona& p) {
    return {{"ideas", p.stance_ideas},
            {"collaboration", p.stance_collaboration},
            {"scope", p.stance_scope},
            {"evaluation", p.stance_evaluation},
            {"literature", p.stance_literature},
            {"resources", p.stance_resources}};
}

int session_target_steps(const Persona& p, int max_steps) {
    // Lean personas (stance_resources near -1) report early; maximal ones
    // spend the whole budget.
    const double usage = (1.0 + p.stance_resources) / 2.0;
    int target = 2 + static_cast<int>(std::lround((max_steps - 2) * usage));
    return std::clamp(target, std::min(2, max_steps), max_steps);
}

std::vector<double> embed_via_backend(Backend& backend, const std::string& request_id,
                                      const Approach& x) {
    BackendRequest req{RequestKind::Embed, request_id,
                      {{"coords", x.coords}, {"width", kEmbeddingDim}}};
    auto resp = backend.handle(req);
    return resp.payload.at("vector").get<std::vector<double>>();
}

}  // namespace

ResearchOutput compose_output(const AgentState& agent, const SessionContext& ctx,
                              const Approach& best_approach, double best_value,
                              int n_measurements, const std::vector<CitedRef>& citations,
                              const std::vector<std::string>& collabs,
                              const std::vector<ToolKind>& trace, const std::string& code_log) {
    nlohmann::json cited = nlohmann::json::array();
    for (const CitedRef& c : citations) {
        cited.push_back({{"paper_id", c.paper_id}, {"agent_id", c.agent_id}, {"title", c.title}});
    }
    BackendRequest req{RequestKind::WriteReport,
                       "report-r" + std::to_string(ctx.round) + "-" + agent.agent_id,
                       {{"round", ctx.round},
                        {"approach", best_approach.coords},
                        {"value", best_value},
                        {"n_measurements", n_measurements},
                        {"citations", cited},
                        {"collab_agent_ids", collabs}}};
    auto resp = ctx.backend->handle(req);
    ResearchOutput out;
    out.output_id = "out_r" + [&] {
        char buf[8];
        std::snprintf(buf, sizeof(buf), "%03d", ctx.round);
        return std::string(buf);
    }() + "_" + agent.agent_id;
    out.round = ctx.round;
    out.primary_agent_id = agent.agent_id;
    out.collab_agent_ids = collabs;
    out.approach = best_approach;
    out.claimed_value = best_value;
    out.title = resp.payload.at("title").get<std::string>();
    out.abstract = resp.payload.at("abstract").get<std::string>();
    out.report_text = resp.payload.at("report_text").get<std::string>();
    out.code_log = code_log;
    for (const CitedRef& c : citations) out.citations.push_back(c.paper_id);
    out.tool_trace = trace;
    return out;
}

ResearchOutput run_session(AgentState& agent, const SessionContext& ctx,
                           const SessionBudget& budget,
                           std::vector<ToolTraceLine>* trace_lines) {
    if (budget.max_steps < 1) throw ValidationError("session budget must be >= 1");
    if (!ctx.backend || !ctx.landscape || !ctx.view) {
        throw ValidationError("session context incomplete");
    }
    const int max_steps = budget.max_steps;
    const int target_steps = session_target_steps(agent.persona, max_steps);
    const int dim = ctx.landscape->dim;

    auto perceived = [&](const Approach& x) {
        static const std::vector<Approach> kEmpty;
        const auto& hist = ctx.visible_history ? *ctx.visible_history : kEmpty;
        return perceived_significance(*ctx.landscape, x, hist, ctx.perception);
    };

    auto measure_rng = make_rng(derive_seed(ctx.stream_seed, "measure"));
    auto partner_rng = make_rng(derive_seed(ctx.stream_seed, "partner"));
    auto collab_rng = make_rng(derive_seed(ctx.stream_seed, "collab-coin"));

    const std::size_t n_peers = ctx.peer_snapshots ? ctx.peer_snapshots->size() : 0;
    bool will_collab = false;
    {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const double p = (1.0 + agent.persona.stance_collaboration) / 2.0;
        will_collab = ctx.networked && n_peers > 1 && unit(collab_rng) < p;
    }

    bool collaborated = false;
    bool just_collaborated = false;
    bool has_measured = false;
    int n_measured = 0;
    Approach current = agent.current_approach;
    Approach best_approach;
    double best_value = 0.0;
    std::vector<std::string> collabs;
    std::vector<ToolKind> trace;
    std::set<std::string> seen_papers;
    std::ostringstream code_log;
    CollabChannel channel;

    auto record = [&](int step, ToolKind kind, nlohmann::json payload) {
        trace.push_back(kind);
        if (trace_lines) trace_lines->push_back({step, kind, std::move(payload)});
    };

    auto do_measure = [&](const Approach& x) {
        validate_approach(x, dim);
        double y = run_analysis(*ctx.landscape, x, ctx.sigma_meas, measure_rng);
        ++n_measured;
        update_belief(agent, {x, y, ctx.round});
        if (!has_measured || y > best_value) {
            best_approach = x;
            best_value = y;
        }
        has_measured = true;
        current = x;
        code_log << "run_analysis(" << format_coords(x, 4) << ") -> " << format_value(y) << "\n";
        return y;
    };

    auto fetch_citations = [&]() {
        std::vector<CitedRef> refs;
        if (!ctx.networked || ctx.view->archive_size() == 0) return refs;
        auto emb = embed_via_backend(*ctx.backend,
                                     "embed-r" + std::to_string(ctx.round) + "-" +
                                         agent.agent_id + "-cite",
                                     best_approach);
        for (const PaperRecord& hit : ctx.view->query_archive(emb, ctx.citation_count)) {
            refs.push_back({hit.paper_id, hit.primary_agent_id, hit.title});
        }
        return refs;
    };

    for (int step = 1; step <= max_steps; ++step) {
        Approach anchor = agent.expertise.center;
        if (auto a = belief_anchor(agent.belief, perceived)) anchor = *a;
        BackendRequest req{
            RequestKind::PlanStep,
            "plan-r" + std::to_string(ctx.round) + "-" + agent.agent_id + "-" +
                std::to_string(step),
            {{"rng_seed", derive_seed(ctx.stream_seed, "plan", static_cast<std::uint64_t>(step))},
             {"step", step},
             {"max_steps", max_steps},
             {"target_steps", target_steps},
             {"dim", dim},
             {"stances", stances_payload(agent.persona)},
             {"networked", ctx.networked},
             {"has_measured", has_measured},
             {"n_measured", n_measured},
             {"will_collab", will_collab},
             {"collaborated", collaborated},
             {"just_collaborated", just_collaborated},
             {"anchor", anchor.coords}}};
        nlohmann::json plan;
        try {
            plan = ctx.backend->handle(req).payload;
        } catch (const BackendError&) {
            // Degraded step: the agent loses the step but the session goes on.
            record(step, ToolKind::QueryMemory, {{"degraded", true}});
            continue;
        }
        const ToolKind tool = tool_kind_from_string(plan.at("tool").get<std::string>());
        switch (tool) {
            case ToolKind::WriteReport: {
                if (!has_measured) {
                    Approach x;
                    x.coords = plan.at("approach").get<std::vector<double>>();
                    do_measure(x);
                }
                auto citations = fetch_citations();
                record(step, ToolKind::WriteReport,
                       {{"approach", best_approach.coords}, {"value", best_value}});
                agent.current_approach = best_approach;
                ResearchOutput out = compose_output(agent, ctx, best_approach, best_value,
                                                    n_measured, citations, collabs, trace,
                                                    code_log.str());
                MemoryEntry entry;
                entry.round = ctx.round;
                entry.approach = best_approach;
                entry.measured_value = best_value;
                entry.accepted = false;
                entry.output_id = out.output_id;
                agent.private_memory.push_back(std::move(entry));
                return out;
            }
            case ToolKind::RunAnalysis: {
                Approach x;
                x.coords = plan.at("approach").get<std::vector<double>>();
                double y = do_measure(x);
                record(step, ToolKind::RunAnalysis, {{"approach", x.coords}, {"value", y}});
                break;
            }
            case ToolKind::QueryArchive: {
                auto emb = embed_via_backend(*ctx.backend,
                                             "embed-r" + std::to_string(ctx.round) + "-" +
                                                 agent.agent_id + "-s" + std::to_string(step),
                                             current);
                auto hits = ctx.view->archive_size() > 0
                                ? ctx.view->query_archive(emb, 3)
                                : std::vector<PaperRecord>{};
                for (const PaperRecord& hit : hits) {
                    if (seen_papers.count(hit.paper_id)) continue;
                    seen_papers.insert(hit.paper_id);
                    if (auto pc = ctx.view->paper_coords(hit.paper_id)) {
                        update_belief(agent, {pc->approach, pc->claimed_value, ctx.round});
                    }
                }
                record(step, ToolKind::QueryArchive, {{"hits", hits.size()}});
                break;
            }
            case ToolKind::QueryRegistry: {
                auto emb = embed_via_backend(*ctx.backend,
                                             "embed-r" + std::to_string(ctx.round) + "-" +
                                                 agent.agent_id + "-reg" + std::to_string(step),
                                             agent.expertise.center);
                auto hits = ctx.view->registry_size() > 0
                                ? ctx.view->query_registry(emb, 3, {agent.agent_id})
                                : std::vector<AgentProfile>{};
                record(step, ToolKind::QueryRegistry, {{"hits", hits.size()}});
                break;
            }
            case ToolKind::QueryMemory: {
                auto hits = query_private_memory(agent, current, 3);
                record(step, ToolKind::QueryMemory, {{"hits", hits.size()}});
                break;
            }
            case ToolKind::LiteratureSearch: {
                // Stub in simulation mode: external literature is out of reach.
                record(step, ToolKind::LiteratureSearch, {{"hits", 0}});
                break;
            }
            case ToolKind::EstablishCollaboration: {
                std::vector<std::size_t> candidates;
                std::vector<double> weights;
                for (std::size_t i = 0; i < n_peers; ++i) {
                    const AgentState& peer = (*ctx.peer_snapshots)[i];
                    if (peer.agent_id == agent.agent_id) continue;
                    candidates.push_back(i);
                    double w = 0.1;
                    if (ctx.attention) w += ctx.attention->weight(agent.agent_id, peer.agent_id);
                    weights.push_back(w);
                }
                if (candidates.empty()) {
                    collaborated = true;  // nobody to invite; do not retry
                    record(step, ToolKind::EstablishCollaboration, {{"partner", nullptr}});
                    break;
                }
                std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
                const AgentState& partner = (*ctx.peer_snapshots)[candidates[pick(partner_rng)]];
                channel = establish_collaboration(agent.agent_id, partner.agent_id, *ctx.view);
                channel.messages.push_back({agent.agent_id, partner.agent_id, 0,
                                            {{"proposal", current.coords}}});
                if (!partner.belief.observations.empty()) {
                    double advisory = belief_estimate(partner.belief, current);
                    channel.messages.push_back({partner.agent_id, agent.agent_id, 1,
                                                {{"advisory", advisory}}});
                    update_belief(agent, {current, advisory, ctx.round});
                }
                collabs.push_back(partner.agent_id);
                collaborated = true;
                just_collaborated = true;
                record(step, ToolKind::EstablishCollaboration,
                       {{"partner", partner.agent_id}});
                break;
            }
            case ToolKind::Communicate: {
                just_collaborated = false;
                record(step, ToolKind::Communicate,
                       {{"messages", channel.messages.size()}});
                break;
            }
        }
    }
    // The plan rule reports at the final step, so this is unreachable unless
    // every remaining step degraded; compose from the best so far.
    if (!has_measured) do_measure(agent.expertise.center);
    auto citations = fetch_citations();
    agent.current_approach = best_approach;
    ResearchOutput out = compose_output(agent, ctx, best_approach, best_value, n_measured,
                                        citations, collabs, trace, code_log.str());
    MemoryEntry entry;
    entry.round = ctx.round;
    entry.approach = best_approach;
    entry.measured_value = best_value;
    entry.accepted = false;
    entry.output_id = out.output_id;
    agent.private_memory.push_back(std::move(entry));
    return out;
}

}  // namespace ascollab
