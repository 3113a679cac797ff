#include "ascollab/backend.hpp"

#include <algorithm>
#include <cmath>

#include <httplib.h>

#include "ascollab/agents.hpp"
#include "ascollab/errors.hpp"
#include "ascollab/review.hpp"
#include "ascollab/session.hpp"
#include "ascollab/stores.hpp"
#include "ascollab/util.hpp"

namespace ascollab {

std::string to_string(RequestKind kind) {
    switch (kind) {
        case RequestKind::GeneratePersona: return "GeneratePersona";
        case RequestKind::PlanStep: return "PlanStep";
        case RequestKind::WriteReport: return "WriteReport";
        case RequestKind::Review: return "Review";
        case RequestKind::MetaReview: return "MetaReview";
        case RequestKind::Embed: return "Embed";
    }
    throw ValidationError("unknown request kind");
}

RequestKind request_kind_from_string(const std::string& s) {
    if (s == "GeneratePersona") return RequestKind::GeneratePersona;
    if (s == "PlanStep") return RequestKind::PlanStep;
    if (s == "WriteReport") return RequestKind::WriteReport;
    if (s == "Review") return RequestKind::Review;
    if (s == "MetaReview") return RequestKind::MetaReview;
    if (s == "Embed") return RequestKind::Embed;
    throw ValidationError("unknown request kind: " + s);
}

namespace {

bool int_in_range(const nlohmann::json& j, const char* key, int lo, int hi) {
    if (!j.contains(key) || !j.at(key).is_number_integer()) return false;
    int v = j.at(key).get<int>();
    return v >= lo && v <= hi;
}

Persona persona_from_payload(const nlohmann::json& stances) {
    Persona p;
    p.stance_ideas = stances.at("ideas").get<double>();
    p.stance_collaboration = stances.at("collaboration").get<double>();
    p.stance_scope = stances.at("scope").get<double>();
    p.stance_evaluation = stances.at("evaluation").get<double>();
    p.stance_literature = stances.at("literature").get<double>();
    p.stance_resources = stances.at("resources").get<double>();
    validate_persona(p);
    return p;
}

nlohmann::json sim_generate_persona(const nlohmann::json& payload) {
    const auto seed = payload.at("seed").get<std::uint64_t>();
    const int dim = payload.at("dim").get<int>();
    auto rng = make_rng(seed);
    std::uniform_real_distribution<double> stance(-1.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    nlohmann::json stances = {{"ideas", stance(rng)},         {"collaboration", stance(rng)},
                              {"scope", stance(rng)},         {"evaluation", stance(rng)},
                              {"literature", stance(rng)},    {"resources", stance(rng)}};
    Approach center;
    center.coords.resize(static_cast<std::size_t>(dim));
    for (int d = 0; d < dim; ++d) center.coords[static_cast<std::size_t>(d)] = unit(rng);
    return {{"stances", stances},
            {"expertise_center", center.coords},
            {"topic_tags", topic_tags_for(center)}};
}

nlohmann::json sim_plan_step(const nlohmann::json& payload) {
    auto rng = make_rng(payload.at("rng_seed").get<std::uint64_t>());
    const int step = payload.at("step").get<int>();
    const int max_steps = payload.at("max_steps").get<int>();
    const int target_steps = payload.at("target_steps").get<int>();
    const int dim = payload.at("dim").get<int>();
    const Persona persona = persona_from_payload(payload.at("stances"));
    const bool networked = payload.at("networked").get<bool>();
    const bool has_measured = payload.at("has_measured").get<bool>();
    const bool will_collab = payload.at("will_collab").get<bool>();
    const bool collaborated = payload.at("collaborated").get<bool>();
    const bool just_collaborated = payload.at("just_collaborated").get<bool>();
    Approach anchor;
    anchor.coords = payload.at("anchor").get<std::vector<double>>();

    const bool must_report = step >= target_steps || step >= max_steps;
    if (must_report) {
        nlohmann::json out = {{"tool", to_string(ToolKind::WriteReport)}};
        if (!has_measured) {
            out["approach"] = propose_from_anchor(anchor, persona, dim, rng).coords;
        }
        return out;
    }
    if (!has_measured) {
        return {{"tool", to_string(ToolKind::RunAnalysis)},
                {"approach", propose_from_anchor(anchor, persona, dim, rng).coords}};
    }
    if (will_collab && !collaborated) {
        return {{"tool", to_string(ToolKind::EstablishCollaboration)}};
    }
    if (just_collaborated) {
        return {{"tool", to_string(ToolKind::Communicate)}};
    }
    const double w_archive = networked ? 0.5 * (1.0 + persona.stance_literature) / 2.0 : 0.0;
    const double w_registry = networked ? 0.10 : 0.0;
    const double w_memory = 0.15;
    const double w_literature = 0.05;
    const double w_analysis = 1.0;
    const double total = w_archive + w_registry + w_memory + w_literature + w_analysis;
    std::uniform_real_distribution<double> unit(0.0, total);
    double u = unit(rng);
    if ((u -= w_archive) < 0.0) return {{"tool", to_string(ToolKind::QueryArchive)}};
    if ((u -= w_registry) < 0.0) return {{"tool", to_string(ToolKind::QueryRegistry)}};
    if ((u -= w_memory) < 0.0) return {{"tool", to_string(ToolKind::QueryMemory)}};
    if ((u -= w_literature) < 0.0) return {{"tool", to_string(ToolKind::LiteratureSearch)}};
    return {{"tool", to_string(ToolKind::RunAnalysis)},
            {"approach", propose_from_anchor(anchor, persona, dim, rng).coords}};
}

nlohmann::json sim_write_report(const nlohmann::json& payload) {
    Approach x;
    x.coords = payload.at("approach").get<std::vector<double>>();
    std::vector<CitedRef> citations;
    for (const auto& cj : payload.at("citations")) {
        citations.push_back({cj.at("paper_id").get<std::string>(),
                             cj.at("agent_id").get<std::string>(),
                             cj.at("title").get<std::string>()});
    }
    ReportFields fields = render_report(payload.at("round").get<int>(), x,
                                        payload.at("value").get<double>(),
                                        payload.at("n_measurements").get<int>(), citations,
                                        payload.at("collab_agent_ids")
                                            .get<std::vector<std::string>>());
    return {{"title", fields.title},
            {"abstract", fields.abstract},
            {"report_text", fields.report_text}};
}

nlohmann::json sim_review(const nlohmann::json& payload) {
    const auto& f = payload.at("features");
    ReviewFeatures features;
    features.consistency_gap = f.at("consistency_gap").get<double>();
    features.perceived_sig = f.at("perceived_sig").get<double>();
    features.novelty = f.at("novelty").get<double>();
    features.n_citations = f.at("n_citations").get<int>();
    features.trace_len = f.at("trace_len").get<int>();
    Review r = score_from_features(features, payload.at("harsh").get<bool>());
    return {{"support", r.support},         {"soundness", r.soundness},
            {"significance", r.significance}, {"originality", r.originality},
            {"overall", r.overall},          {"text", r.text}};
}

nlohmann::json sim_meta_review(const nlohmann::json& payload) {
    struct Member {
        std::string output_id;
        double mean_overall;
        double perceived_sig;
    };
    std::vector<Member> members;
    for (const auto& mj : payload.at("members")) {
        members.push_back({mj.at("output_id").get<std::string>(),
                           mj.at("mean_overall").get<double>(),
                           mj.at("perceived_sig").get<double>()});
    }
    if (members.empty()) throw BackendError("meta review over empty tournament");
    const std::size_t m = members.size();
    std::vector<double> raw(m);
    for (std::size_t i = 0; i < m; ++i) {
        double percentile = 1.0;
        if (m > 1) {
            int below = 0;
            for (std::size_t j = 0; j < m; ++j) {
                if (j != i && members[j].perceived_sig < members[i].perceived_sig) ++below;
            }
            percentile = static_cast<double>(below) / static_cast<double>(m - 1);
        }
        raw[i] = members[i].mean_overall / 5.0 * 0.6 + percentile * 0.4;
    }
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (raw[a] != raw[b]) return raw[a] > raw[b];
        return members[a].output_id < members[b].output_id;
    });
    nlohmann::json out_members = nlohmann::json::array();
    for (std::size_t pos = 0; pos < m; ++pos) {
        const std::size_t i = order[pos];
        const int rank = static_cast<int>(pos) + 1;
        // Nudge tied scores apart so the 0-1 scores are strict like the ranks.
        double score = std::clamp(raw[i], 0.0, 1.0) - (rank - 1) * 1e-9;
        score = std::max(score, 0.0);
        out_members.push_back(
            {{"output_id", members[i].output_id},
             {"overall_score", score},
             {"rank", rank},
             {"meta_review_text",
              "Tournament " + payload.at("tournament_id").get<std::string>() + ": ranked " +
                  std::to_string(rank) + " of " + std::to_string(m) + "."},
             {"justification",
              "Combined panel recommendation and relative perceived significance place this "
              "submission at rank " + std::to_string(rank) + "."}});
    }
    return {{"members", out_members}};
}

nlohmann::json sim_embed(const nlohmann::json& payload) {
    const auto coords = payload.at("coords").get<std::vector<double>>();
    const int width = payload.at("width").get<int>();
    return {{"vector", pad_embedding(coords, width)}};
}

}  // namespace

void validate_response(RequestKind kind, const nlohmann::json& payload) {
    switch (kind) {
        case RequestKind::GeneratePersona: {
            if (!payload.contains("stances") || !payload.contains("expertise_center")) {
                throw BackendError("GeneratePersona response missing fields");
            }
            persona_from_payload(payload.at("stances"));
            return;
        }
        case RequestKind::PlanStep: {
            if (!payload.contains("tool")) throw BackendError("PlanStep response missing tool");
            tool_kind_from_string(payload.at("tool").get<std::string>());
            return;
        }
        case RequestKind::WriteReport: {
            for (const char* key : {"title", "abstract", "report_text"}) {
                if (!payload.contains(key) || !payload.at(key).is_string()) {
                    throw BackendError(std::string("WriteReport response missing ") + key);
                }
            }
            return;
        }
        case RequestKind::Review: {
            for (const char* key : {"support", "soundness", "significance", "originality"}) {
                if (!int_in_range(payload, key, 1, 4)) {
                    throw BackendError(std::string("review score out of 1-4 range: ") + key);
                }
            }
            if (!int_in_range(payload, "overall", 1, 5)) {
                throw BackendError("review overall out of 1-5 range");
            }
            return;
        }
        case RequestKind::MetaReview: {
            if (!payload.contains("members")) throw BackendError("MetaReview missing members");
            for (const auto& mj : payload.at("members")) {
                double score = mj.at("overall_score").get<double>();
                if (!(score >= 0.0 && score <= 1.0)) {
                    throw BackendError("meta score out of 0-1 range");
                }
                if (mj.at("rank").get<int>() < 1) throw BackendError("meta rank below 1");
            }
            return;
        }
        case RequestKind::Embed: {
            if (!payload.contains("vector") || !payload.at("vector").is_array()) {
                throw BackendError("Embed response missing vector");
            }
            return;
        }
    }
    throw BackendError("unknown response kind");
}

BackendResponse SimulationBackend::handle(const BackendRequest& request) {
    nlohmann::json payload;
    switch (request.kind) {
        case RequestKind::GeneratePersona: payload = sim_generate_persona(request.payload); break;
        case RequestKind::PlanStep: payload = sim_plan_step(request.payload); break;
        case RequestKind::WriteReport: payload = sim_write_report(request.payload); break;
        case RequestKind::Review: payload = sim_review(request.payload); break;
        case RequestKind::MetaReview: payload = sim_meta_review(request.payload); break;
        case RequestKind::Embed: payload = sim_embed(request.payload); break;
    }
    validate_response(request.kind, payload);
    return {request.request_id, std::move(payload)};
}

struct ExternalBackend::Impl {
    std::string host;
    int port = 80;
    std::string path = "/backend";
    int timeout_seconds;
    int max_retries;
};

ExternalBackend::ExternalBackend(std::string endpoint_url, int timeout_seconds, int max_retries)
    : impl_(std::make_unique<Impl>()) {
    impl_->timeout_seconds = timeout_seconds;
    impl_->max_retries = max_retries;
    std::string rest = endpoint_url;
    const std::string scheme = "http://";
    if (rest.rfind(scheme, 0) == 0) rest = rest.substr(scheme.size());
    auto slash = rest.find('/');
    std::string hostport = slash == std::string::npos ? rest : rest.substr(0, slash);
    if (slash != std::string::npos && slash + 1 < rest.size()) impl_->path = rest.substr(slash);
    auto colon = hostport.find(':');
    if (colon == std::string::npos) {
        impl_->host = hostport;
    } else {
        impl_->host = hostport.substr(0, colon);
        impl_->port = std::stoi(hostport.substr(colon + 1));
    }
    if (impl_->host.empty()) throw ConfigError("invalid backend endpoint url: " + endpoint_url);
}

ExternalBackend::~ExternalBackend() = default;

BackendResponse ExternalBackend::handle(const BackendRequest& request) {
    nlohmann::json body = {{"kind", to_string(request.kind)},
                           {"request_id", request.request_id},
                           {"payload", request.payload}};
    const std::string body_str = body.dump();
    std::string last_error;
    for (int attempt = 0; attempt <= impl_->max_retries; ++attempt) {
        httplib::Client client(impl_->host, impl_->port);
        client.set_connection_timeout(impl_->timeout_seconds);
        client.set_read_timeout(impl_->timeout_seconds);
        auto res = client.Post(impl_->path, body_str, "application/json");
        if (!res) {
            last_error = "transport failure";
            continue;
        }
        if (res->status != 200) {
            last_error = "http status " + std::to_string(res->status);
            continue;
        }
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception& e) {
            throw BackendError(std::string("malformed backend response: ") + e.what());
        }
        if (doc.value("request_id", "") != request.request_id) {
            throw BackendError("backend response id mismatch");
        }
        nlohmann::json payload = doc.at("payload");
        validate_response(request.kind, payload);
        return {request.request_id, std::move(payload)};
    }
    throw BackendError("backend unreachable after retries: " + last_error);
}

}  // namespace ascollab
