#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "ascollab/agents.hpp"
#include "ascollab/backend.hpp"
#include "ascollab/landscape.hpp"
#include "ascollab/session.hpp"
#include "ascollab/stores.hpp"

namespace ascollab {

struct Review {
    std::string output_id;
    std::string reviewer_id;
    int support = 1;
    int soundness = 1;
    int significance = 1;
    int originality = 1;
    int overall = 1;  // 1..5
    std::string text;
};

struct Tournament {
    std::string tournament_id;
    std::vector<std::string> member_output_ids;
    std::vector<std::string> reference_paper_ids;
};

struct EvaluationResult {
    std::string output_id;
    std::vector<Review> reviews;
    MetaReview meta;
    double combined_score = 0.0;
    bool accepted = false;
};

/// Maps a [0,1) quantity to the 1..4 review scale.
int bucket4(double v);

struct ReviewFeatures {
    double consistency_gap = 0.0;  // |claimed - reviewer belief estimate|
    double perceived_sig = 0.0;
    double novelty = 0.0;
    int n_citations = 0;
    int trace_len = 0;
};

/// The simulation scoring rule shared with the backend: features plus
/// reviewer harshness to the four dimensions and the overall score.
Review score_from_features(const ReviewFeatures& f, bool harsh);

/// Top-k registry matches by similarity to the output embedding, with all
/// authors excluded. Throws ConfigError when the eligible pool is too small.
std::vector<std::string> select_reviewers(const ResearchOutput& output, const StoreView& view,
                                          int k);

/// One reviewer's structured assessment, computed against an
/// author-stripped projection of the output.
Review score_review(const AgentState& reviewer, const ResearchOutput& output,
                    const Landscape& landscape, const std::vector<Approach>& accepted_history,
                    const PerceptionParams& perception, Backend& backend);

/// Greedy thematic clustering into tournaments of at most l members, each
/// with r=2 seeded reference papers from the archive.
std::vector<Tournament> cluster_submissions(const std::vector<ResearchOutput>& outputs, int l,
                                            const StoreView& view, std::mt19937_64& rng);

/// Strictly ranked tournament scores on the 0-1 scale.
std::vector<MetaReview> meta_review(const Tournament& tournament,
                                    const std::map<std::string, std::vector<Review>>& reviews,
                                    const std::map<std::string, double>& perceived_sig,
                                    Backend& backend);

/// Round-global top-floor(n/k) acceptance by combined score.
std::vector<std::string> accept_round(std::vector<EvaluationResult>& results, int n, int k);

}  // namespace ascollab
