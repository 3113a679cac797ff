#include "ascollab/agents.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "ascollab/errors.hpp"
#include "ascollab/util.hpp"

namespace ascollab {

void validate_persona(const Persona& p) {
    for (double s : {p.stance_ideas, p.stance_collaboration, p.stance_scope,
                     p.stance_evaluation, p.stance_literature, p.stance_resources}) {
        if (!(s >= -1.0 && s <= 1.0)) throw ValidationError("persona stance out of [-1,1]");
    }
}

std::vector<AgentState> init_population(int n, int landscape_dim, std::uint64_t seed) {
    if (n < 1) throw ValidationError("population size must be >= 1");
    if (landscape_dim < 1) throw ValidationError("landscape_dim must be >= 1");
    std::vector<AgentState> agents;
    agents.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        auto rng = make_rng(derive_seed(seed, "agent-init", static_cast<std::uint64_t>(i)));
        std::uniform_real_distribution<double> stance(-1.0, 1.0);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        AgentState a;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "agent_%03d", i + 1);
        a.agent_id = buf;
        a.persona.stance_ideas = stance(rng);
        a.persona.stance_collaboration = stance(rng);
        a.persona.stance_scope = stance(rng);
        a.persona.stance_evaluation = stance(rng);
        a.persona.stance_literature = stance(rng);
        a.persona.stance_resources = stance(rng);
        a.expertise.center.coords.resize(static_cast<std::size_t>(landscape_dim));
        for (int d = 0; d < landscape_dim; ++d) {
            a.expertise.center.coords[static_cast<std::size_t>(d)] = unit(rng);
        }
        a.expertise.radius = 0.25;
        a.expertise.topic_tags = topic_tags_for(a.expertise.center);
        a.current_approach = a.expertise.center;
        agents.push_back(std::move(a));
    }
    return agents;
}

double belief_estimate(const Belief& belief, const Approach& x) {
    if (!(belief.bandwidth > 0.0)) throw ValidationError("belief bandwidth must be > 0");
    if (belief.observations.empty()) return 0.0;
    const double h2 = 2.0 * belief.bandwidth * belief.bandwidth;
    double num = 0.0, den = 0.0;
    for (const Observation& o : belief.observations) {
        double w = std::exp(-squared_distance(x, o.x) / h2);
        num += w * o.value;
        den += w;
    }
    if (den == 0.0) return 0.0;
    return num / den;
}

void update_belief(AgentState& agent, const Observation& obs) {
    agent.belief.observations.push_back(obs);
}

Approach propose_from_anchor(const Approach& anchor, const Persona& persona, int dim,
                             std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double p_explore = (1.0 + persona.stance_scope) / 2.0;
    Approach out;
    out.coords.resize(static_cast<std::size_t>(dim));
    if (unit(rng) < p_explore) {
        for (int d = 0; d < dim; ++d) out.coords[static_cast<std::size_t>(d)] = unit(rng);
        return out;
    }
    const double sigma = 0.05 * (1.0 + persona.stance_ideas) / 2.0;
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int d = 0; d < dim; ++d) {
        double c = anchor.coords[static_cast<std::size_t>(d)] + sigma * noise(rng);
        out.coords[static_cast<std::size_t>(d)] = std::clamp(c, 0.0, 1.0);
    }
    return out;
}

std::optional<Approach> belief_anchor(const Belief& belief,
                                      const std::function<double(const Approach&)>& value_of,
                                      int max_candidates) {
    if (belief.observations.empty()) return std::nullopt;
    // Scan the observations with the highest recorded values; scoring every
    // observation against the perceived surface gets quadratic over a run.
    std::vector<std::size_t> idx(belief.observations.size());
    std::iota(idx.begin(), idx.end(), 0u);
    const std::size_t keep = std::min<std::size_t>(idx.size(),
                                                   static_cast<std::size_t>(max_candidates));
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep), idx.end(),
                      [&](std::size_t a, std::size_t b) {
                          const auto& oa = belief.observations[a];
                          const auto& ob = belief.observations[b];
                          if (oa.value != ob.value) return oa.value > ob.value;
                          return a < b;
                      });
    double best = -1.0;
    std::size_t best_i = idx[0];
    for (std::size_t j = 0; j < keep; ++j) {
        double v = value_of(belief.observations[idx[j]].x);
        if (v > best) {
            best = v;
            best_i = idx[j];
        }
    }
    return belief.observations[best_i].x;
}

Approach propose_next_approach(const AgentState& agent,
                               const std::function<double(const Approach&)>& value_of,
                               std::mt19937_64& rng) {
    auto anchor = belief_anchor(agent.belief, value_of);
    const Approach& base = anchor ? *anchor : agent.expertise.center;
    return propose_from_anchor(base, agent.persona, base.dim(), rng);
}

std::vector<std::string> topic_tags_for(const Approach& center) {
    std::vector<std::string> tags;
    tags.reserve(center.coords.size());
    for (std::size_t d = 0; d < center.coords.size(); ++d) {
        int bucket = std::min(9, static_cast<int>(center.coords[d] * 10.0));
        tags.push_back("x" + std::to_string(d) + ":b" + std::to_string(bucket));
    }
    return tags;
}

void update_expertise(AgentState& agent, int window) {
    if (window < 1) throw ValidationError("expertise window must be >= 1");
    std::vector<const MemoryEntry*> accepted;
    for (auto it = agent.private_memory.rbegin(); it != agent.private_memory.rend(); ++it) {
        if (it->accepted) {
            accepted.push_back(&*it);
            if (static_cast<int>(accepted.size()) == window) break;
        }
    }
    if (accepted.empty()) return;
    const int dim = accepted.front()->approach.dim();
    Approach mean;
    mean.coords.assign(static_cast<std::size_t>(dim), 0.0);
    for (const MemoryEntry* e : accepted) {
        for (int d = 0; d < dim; ++d) {
            mean.coords[static_cast<std::size_t>(d)] +=
                e->approach.coords[static_cast<std::size_t>(d)];
        }
    }
    for (double& c : mean.coords) c /= static_cast<double>(accepted.size());
    agent.expertise.center = mean;
    agent.expertise.topic_tags = topic_tags_for(mean);
}

std::vector<MemoryEntry> query_private_memory(const AgentState& agent, const Approach& query,
                                              int k) {
    if (k < 1) throw ValidationError("memory query k must be >= 1");
    std::vector<MemoryEntry> entries = agent.private_memory;
    std::stable_sort(entries.begin(), entries.end(),
                     [&](const MemoryEntry& a, const MemoryEntry& b) {
                         double da = squared_distance(a.approach, query);
                         double db = squared_distance(b.approach, query);
                         if (da != db) return da < db;
                         if (a.round != b.round) return a.round < b.round;
                         return a.output_id.value_or("") < b.output_id.value_or("");
                     });
    if (static_cast<int>(entries.size()) > k) entries.resize(static_cast<std::size_t>(k));
    return entries;
}

nlohmann::json agent_to_json(const AgentState& a) {
    nlohmann::json mem = nlohmann::json::array();
    for (const MemoryEntry& e : a.private_memory) {
        nlohmann::json m = {{"round", e.round},
                            {"approach", e.approach.coords},
                            {"measured_value", e.measured_value},
                            {"accepted", e.accepted}};
        if (e.output_id) m["output_id"] = *e.output_id;
        mem.push_back(std::move(m));
    }
    nlohmann::json obs = nlohmann::json::array();
    for (const Observation& o : a.belief.observations) {
        obs.push_back({{"x", o.x.coords}, {"value", o.value}, {"round", o.round}});
    }
    return {{"schema", "agent/v1"},
            {"agent_id", a.agent_id},
            {"current_approach", a.current_approach.coords},
            {"persona",
             {{"ideas", a.persona.stance_ideas},
              {"collaboration", a.persona.stance_collaboration},
              {"scope", a.persona.stance_scope},
              {"evaluation", a.persona.stance_evaluation},
              {"literature", a.persona.stance_literature},
              {"resources", a.persona.stance_resources}}},
            {"expertise",
             {{"center", a.expertise.center.coords},
              {"radius", a.expertise.radius},
              {"topic_tags", a.expertise.topic_tags}}},
            {"belief", {{"observations", obs}, {"bandwidth", a.belief.bandwidth}}},
            {"reputation",
             {{"citation_count", a.reputation.citation_count},
              {"num_accepted_papers", a.reputation.num_accepted_papers}}},
            {"private_memory", mem}};
}

AgentState agent_from_json(const nlohmann::json& doc) {
    if (doc.value("schema", "") != "agent/v1") throw ValidationError("expected agent/v1 document");
    AgentState a;
    a.agent_id = doc.at("agent_id").get<std::string>();
    a.current_approach.coords = doc.at("current_approach").get<std::vector<double>>();
    const auto& p = doc.at("persona");
    a.persona.stance_ideas = p.at("ideas").get<double>();
    a.persona.stance_collaboration = p.at("collaboration").get<double>();
    a.persona.stance_scope = p.at("scope").get<double>();
    a.persona.stance_evaluation = p.at("evaluation").get<double>();
    a.persona.stance_literature = p.at("literature").get<double>();
    a.persona.stance_resources = p.at("resources").get<double>();
    const auto& e = doc.at("expertise");
    a.expertise.center.coords = e.at("center").get<std::vector<double>>();
    a.expertise.radius = e.at("radius").get<double>();
    a.expertise.topic_tags = e.at("topic_tags").get<std::vector<std::string>>();
    const auto& b = doc.at("belief");
    a.belief.bandwidth = b.at("bandwidth").get<double>();
    for (const auto& oj : b.at("observations")) {
        Observation o;
        o.x.coords = oj.at("x").get<std::vector<double>>();
        o.value = oj.at("value").get<double>();
        o.round = oj.at("round").get<int>();
        a.belief.observations.push_back(std::move(o));
    }
    const auto& r = doc.at("reputation");
    a.reputation.citation_count = r.at("citation_count").get<int>();
    a.reputation.num_accepted_papers = r.at("num_accepted_papers").get<int>();
    for (const auto& mj : doc.at("private_memory")) {
        MemoryEntry m;
        m.round = mj.at("round").get<int>();
        m.approach.coords = mj.at("approach").get<std::vector<double>>();
        m.measured_value = mj.at("measured_value").get<double>();
        m.accepted = mj.at("accepted").get<bool>();
        if (mj.contains("output_id")) m.output_id = mj.at("output_id").get<std::string>();
        a.private_memory.push_back(std::move(m));
    }
    validate_persona(a.persona);
    return a;
}

}  // namespace ascollab
