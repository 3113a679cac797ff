#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace ascollab {

/// Weighted directed inter-agent attention graph for one round.
struct AttentionGraph {
    int round = -1;
    std::map<std::pair<std::string, std::string>, double> weights;

    double weight(const std::string& from, const std::string& to) const;
};

struct RoundEvents {
    // (principal, collaborator); increments both directions.
    std::vector<std::pair<std::string, std::string>> collaborations;
    // (citing primary author, cited primary author)
    std::vector<std::pair<std::string, std::string>> citations;
    // (reviewer, primary author)
    std::vector<std::pair<std::string, std::string>> reviews;
};

inline constexpr double kCollabWeight = 1.0;
inline constexpr double kCitationWeight = 0.5;
inline constexpr double kReviewWeight = 0.1;
inline constexpr double kDefaultAttentionDecay = 0.1;

/// Applies geometric decay then folds in one round of events. Self-edge
/// events are dropped; the count of dropped events is returned through
/// `ignored_self_edges` when provided.
AttentionGraph update_attention(const AttentionGraph& graph, const RoundEvents& events,
                                double decay = kDefaultAttentionDecay,
                                int* ignored_self_edges = nullptr);

struct GraphMetrics {
    std::map<std::string, int> out_degree;
    std::map<std::string, int> in_degree;
    std::map<std::string, double> weighted_out_degree;
    std::map<std::string, double> weighted_in_degree;
    // Jaccard distance of edge sets above threshold vs the previous round.
    double edge_churn = 0.0;
    // Strongest pairs by combined weight in both directions.
    std::vector<std::pair<std::pair<std::string, std::string>, double>> strongest_pairs;
};

inline constexpr double kChurnEdgeThreshold = 0.5;

GraphMetrics graph_metrics(const AttentionGraph& graph,
                           const AttentionGraph* previous = nullptr);

nlohmann::json attention_to_json(const AttentionGraph& graph);
AttentionGraph attention_from_json(const nlohmann::json& doc);

}  // namespace ascollab
