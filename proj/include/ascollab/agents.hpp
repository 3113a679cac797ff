#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ascollab/landscape.hpp"

namespace ascollab {

/// Six-stance epistemic behavior, each stance in [-1,1]. Fixed for an
/// agent's lifetime.
struct Persona {
    double stance_ideas = 0.0;
    double stance_collaboration = 0.0;
    double stance_scope = 0.0;
    double stance_evaluation = 0.0;
    double stance_literature = 0.0;
    double stance_resources = 0.0;
};

void validate_persona(const Persona& p);

struct Expertise {
    Approach center;
    double radius = 0.25;
    std::vector<std::string> topic_tags;
};

struct Observation {
    Approach x;
    double value = 0.0;
    int round = 0;
};

/// Kernel-regression belief over everything the agent has seen.
struct Belief {
    std::vector<Observation> observations;
    double bandwidth = 0.1;
};

struct Reputation {
    int citation_count = 0;
    int num_accepted_papers = 0;
};

struct MemoryEntry {
    int round = 0;
    Approach approach;
    double measured_value = 0.0;
    bool accepted = false;
    std::optional<std::string> output_id;
};

struct AgentState {
    std::string agent_id;
    Approach current_approach;
    Persona persona;
    Expertise expertise;
    Belief belief;
    Reputation reputation;
    std::vector<MemoryEntry> private_memory;
};

std::vector<AgentState> init_population(int n, int landscape_dim, std::uint64_t seed);

/// Nadaraya-Watson estimate of significance at x; 0 on an empty belief.
double belief_estimate(const Belief& belief, const Approach& x);

void update_belief(AgentState& agent, const Observation& obs);

/// Stochastic research policy: explore the hypercube with probability
/// (1+stance_scope)/2, otherwise perturb the most promising known point.
/// `value_of` supplies the current perceived-significance view.
Approach propose_next_approach(const AgentState& agent,
                               const std::function<double(const Approach&)>& value_of,
                               std::mt19937_64& rng);

/// Core of the policy, shared with the backend: explore/exploit around a
/// precomputed anchor point.
Approach propose_from_anchor(const Approach& anchor, const Persona& persona, int dim,
                             std::mt19937_64& rng);

/// Picks the belief observation with the best value under `value_of`,
/// scanning the strongest `max_candidates` recorded observations.
std::optional<Approach> belief_anchor(const Belief& belief,
                                      const std::function<double(const Approach&)>& value_of,
                                      int max_candidates = 32);

/// Re-centers expertise on the mean of the agent's recent accepted work.
void update_expertise(AgentState& agent, int window = 5);

std::vector<std::string> topic_tags_for(const Approach& center);

std::vector<MemoryEntry> query_private_memory(const AgentState& agent, const Approach& query,
                                              int k);

nlohmann::json agent_to_json(const AgentState& agent);
AgentState agent_from_json(const nlohmann::json& doc);

}  // namespace ascollab
