#pragma once

#include <memory>
#include <string>

#include <nlohmann/json.hpp>

namespace ascollab {

enum class RequestKind {
    GeneratePersona,
    PlanStep,
    WriteReport,
    Review,
    MetaReview,
    Embed,
};

std::string to_string(RequestKind kind);
RequestKind request_kind_from_string(const std::string& s);

// Wire contract, both in-process and over HTTP:
//   request  {"kind": string, "request_id": string, "payload": object}
//   response {"request_id": string, "payload": object}
//
// Payload schemas per kind:
//   GeneratePersona  in:  {seed, dim}
//                    out: {stances:{ideas,collaboration,scope,evaluation,
//                          literature,resources}, expertise_center, topic_tags}
//   PlanStep         in:  {rng_seed, step, max_steps, target_steps, dim,
//                          stances:{...}, networked, has_measured, n_measured,
//                          will_collab, collaborated, just_collaborated,
//                          anchor}
//                    out: {tool, approach?}  (approach set for RunAnalysis and
//                          for a WriteReport that must bundle a measurement)
//   WriteReport      in:  {round, approach, value, n_measurements,
//                          citations:[{paper_id,agent_id,title}],
//                          collab_agent_ids}
//                    out: {title, abstract, report_text}
//   Review           in:  {harsh, features:{consistency_gap, perceived_sig,
//                          novelty, n_citations, trace_len}}
//                    out: {support, soundness, significance, originality,
//                          overall, text}
//   MetaReview       in:  {tournament_id, members:[{output_id, mean_overall,
//                          perceived_sig}]}
//                    out: {members:[{output_id, overall_score, rank,
//                          meta_review_text, justification}]}
//   Embed            in:  {coords, width}
//                    out: {vector}
struct BackendRequest {
    RequestKind kind;
    std::string request_id;
    nlohmann::json payload;
};

struct BackendResponse {
    std::string request_id;
    nlohmann::json payload;
};

/// Throws BackendError when a response payload violates the kind schema
/// (out-of-range scores, wrong embedding width, unknown tool, ...).
void validate_response(RequestKind kind, const nlohmann::json& payload);

class Backend {
public:
    virtual ~Backend() = default;
    virtual BackendResponse handle(const BackendRequest& request) = 0;
};

/// Deterministic rule-based cognition; a pure function of each request.
class SimulationBackend : public Backend {
public:
    BackendResponse handle(const BackendRequest& request) override;
};

/// Serializes requests as JSON over HTTP. Retries transient failures up to
/// `max_retries` times, then throws BackendError; callers degrade per the
/// session skip policy.
class ExternalBackend : public Backend {
public:
    explicit ExternalBackend(std::string endpoint_url, int timeout_seconds = 10,
                             int max_retries = 3);
    ~ExternalBackend() override;
    BackendResponse handle(const BackendRequest& request) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace ascollab
