#include "ascollab/network.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "ascollab/errors.hpp"

namespace ascollab {

double AttentionGraph::weight(const std::string& from, const std::string& to) const {
    auto it = weights.find({from, to});
    return it == weights.end() ? 0.0 : it->second;
}

AttentionGraph update_attention(const AttentionGraph& graph, const RoundEvents& events,
                                double decay, int* ignored_self_edges) {
    if (!(decay >= 0.0 && decay < 1.0)) throw ValidationError("decay must lie in [0,1)");
    AttentionGraph next;
    next.round = graph.round + 1;
    for (const auto& [edge, w] : graph.weights) {
        double decayed = (1.0 - decay) * w;
        if (decayed > 0.0) next.weights[edge] = decayed;
    }
    int ignored = 0;
    auto bump = [&](const std::string& from, const std::string& to, double amount) {
        if (from == to) {
            ++ignored;
            return;
        }
        next.weights[{from, to}] += amount;
    };
    for (const auto& [principal, collaborator] : events.collaborations) {
        bump(principal, collaborator, kCollabWeight);
        bump(collaborator, principal, kCollabWeight);
    }
    for (const auto& [citing, cited] : events.citations) bump(citing, cited, kCitationWeight);
    for (const auto& [reviewer, author] : events.reviews) bump(reviewer, author, kReviewWeight);
    for (const auto& [edge, w] : next.weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw IntegrityError("non-finite attention weight");
    }
    if (ignored_self_edges) *ignored_self_edges = ignored;
    return next;
}

GraphMetrics graph_metrics(const AttentionGraph& graph, const AttentionGraph* previous) {
    GraphMetrics m;
    for (const auto& [edge, w] : graph.weights) {
        if (w <= 0.0) continue;
        m.out_degree[edge.first] += 1;
        m.in_degree[edge.second] += 1;
        m.weighted_out_degree[edge.first] += w;
        m.weighted_in_degree[edge.second] += w;
    }
    auto strong_edges = [](const AttentionGraph& g) {
        std::set<std::pair<std::string, std::string>> edges;
        for (const auto& [edge, w] : g.weights) {
            if (w >= kChurnEdgeThreshold) edges.insert(edge);
        }
        return edges;
    };
    if (previous) {
        auto cur = strong_edges(graph);
        auto prev = strong_edges(*previous);
        std::set<std::pair<std::string, std::string>> uni = cur;
        uni.insert(prev.begin(), prev.end());
        if (!uni.empty()) {
            std::size_t inter = 0;
            for (const auto& e : cur) {
                if (prev.count(e)) ++inter;
            }
            m.edge_churn = 1.0 - static_cast<double>(inter) / static_cast<double>(uni.size());
        }
    }
    // Symmetrized pair strength, strongest first.
    std::map<std::pair<std::string, std::string>, double> pair_weight;
    for (const auto& [edge, w] : graph.weights) {
        auto key = edge.first < edge.second ? edge : std::make_pair(edge.second, edge.first);
        pair_weight[key] += w;
    }
    m.strongest_pairs.assign(pair_weight.begin(), pair_weight.end());
    std::sort(m.strongest_pairs.begin(), m.strongest_pairs.end(),
              [](const auto& a, const auto& b) {
                  if (a.second != b.second) return a.second > b.second;
                  return a.first < b.first;
              });
    if (m.strongest_pairs.size() > 10) m.strongest_pairs.resize(10);
    return m;
}

nlohmann::json attention_to_json(const AttentionGraph& graph) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [edge, w] : graph.weights) {
        edges.push_back({{"from", edge.first}, {"to", edge.second}, {"weight", w}});
    }
    return {{"schema", "network/v1"}, {"round", graph.round}, {"edges", edges}};
}

AttentionGraph attention_from_json(const nlohmann::json& doc) {
    if (doc.value("schema", "") != "network/v1") {
        throw ValidationError("expected network/v1 document");
    }
    AttentionGraph g;
    g.round = doc.at("round").get<int>();
    for (const auto& ej : doc.at("edges")) {
        g.weights[{ej.at("from").get<std::string>(), ej.at("to").get<std::string>()}] =
            ej.at("weight").get<double>();
    }
    return g;
}

}  // namespace ascollab
