#include "ascollab/review.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "ascollab/errors.hpp"
#include "ascollab/util.hpp"

namespace ascollab {

int bucket4(double v) {
    if (v < 0.2) return 1;
    if (v < 0.4) return 2;
    if (v < 0.7) return 3;
    return 4;
}

namespace {

int soundness_from_gap(double gap) {
    if (gap <= 0.05) return 4;
    if (gap <= 0.15) return 3;
    if (gap <= 0.3) return 2;
    return 1;
}

int support_score(int n_citations, int trace_len) {
    int base = std::min(1 + n_citations, 4);
    if (base < 4 && trace_len >= 20) base += 1;
    return base;
}

}  // namespace

Review score_from_features(const ReviewFeatures& f, bool harsh) {
    Review r;
    r.support = support_score(f.n_citations, f.trace_len);
    r.soundness = soundness_from_gap(f.consistency_gap);
    r.significance = bucket4(f.perceived_sig);
    r.originality = bucket4(f.novelty);
    if (harsh) {
        r.support = std::max(1, r.support - 1);
        r.soundness = std::max(1, r.soundness - 1);
        r.significance = std::max(1, r.significance - 1);
        r.originality = std::max(1, r.originality - 1);
    }
    const double mean =
        (r.support + r.soundness + r.significance + r.originality) / 4.0;
    r.overall = std::clamp(static_cast<int>(std::lround(mean * 1.25)), 1, 5);
    r.text = "support=" + std::to_string(r.support) + " soundness=" +
             std::to_string(r.soundness) + " significance=" + std::to_string(r.significance) +
             " originality=" + std::to_string(r.originality);
    return r;
}

std::vector<std::string> select_reviewers(const ResearchOutput& output, const StoreView& view,
                                          int k) {
    if (k < 1) throw ValidationError("panel size must be >= 1");
    std::set<std::string> exclude{output.primary_agent_id};
    exclude.insert(output.collab_agent_ids.begin(), output.collab_agent_ids.end());
    const std::size_t eligible = view.registry_size() >= exclude.size()
                                     ? view.registry_size() - exclude.size()
                                     : 0;
    if (eligible < static_cast<std::size_t>(k)) {
        throw ConfigError("reviewer pool too small: population must exceed panel size plus "
                          "authors");
    }
    std::vector<std::string> panel;
    for (const AgentProfile& p :
         view.query_registry(pad_embedding(output.approach.coords), k, exclude)) {
        panel.push_back(p.agent_id);
    }
    return panel;
}

Review score_review(const AgentState& reviewer, const ResearchOutput& output,
                    const Landscape& landscape, const std::vector<Approach>& accepted_history,
                    const PerceptionParams& perception, Backend& backend) {
    if (reviewer.agent_id == output.primary_agent_id ||
        std::find(output.collab_agent_ids.begin(), output.collab_agent_ids.end(),
                  reviewer.agent_id) != output.collab_agent_ids.end()) {
        throw ValidationError("reviewer is an author of the output");
    }
    // Author-stripped projection: only content-derived features reach the
    // scoring rule.
    ReviewFeatures f;
    f.consistency_gap =
        std::abs(output.claimed_value - belief_estimate(reviewer.belief, output.approach));
    f.perceived_sig =
        perceived_significance(landscape, output.approach, accepted_history, perception);
    f.novelty = novelty_of(output.approach, accepted_history, perception);
    f.n_citations = static_cast<int>(output.citations.size());
    f.trace_len = static_cast<int>(output.tool_trace.size());
    BackendRequest req{RequestKind::Review,
                       "review-" + output.output_id + "-" + reviewer.agent_id,
                       {{"harsh", reviewer.persona.stance_evaluation < -0.5},
                        {"features",
                         {{"consistency_gap", f.consistency_gap},
                          {"perceived_sig", f.perceived_sig},
                          {"novelty", f.novelty},
                          {"n_citations", f.n_citations},
                          {"trace_len", f.trace_len}}}}};
    auto resp = backend.handle(req);
    Review r;
    r.output_id = output.output_id;
    r.reviewer_id = reviewer.agent_id;
    r.support = resp.payload.at("support").get<int>();
    r.soundness = resp.payload.at("soundness").get<int>();
    r.significance = resp.payload.at("significance").get<int>();
    r.originality = resp.payload.at("originality").get<int>();
    r.overall = resp.payload.at("overall").get<int>();
    r.text = resp.payload.value("text", "");
    return r;
}

std::vector<Tournament> cluster_submissions(const std::vector<ResearchOutput>& outputs, int l,
                                            const StoreView& view, std::mt19937_64& rng) {
    if (l < 2) throw ValidationError("tournament size must be >= 2");
    std::vector<const ResearchOutput*> pool;
    pool.reserve(outputs.size());
    for (const ResearchOutput& o : outputs) pool.push_back(&o);
    std::sort(pool.begin(), pool.end(), [](const ResearchOutput* a, const ResearchOutput* b) {
        return a->output_id < b->output_id;
    });
    std::vector<bool> assigned(pool.size(), false);
    std::vector<Tournament> tournaments;
    const std::vector<std::string> archive_ids = [&] {
        std::vector<std::string> ids;
        // Reference papers come from the archive; sample deterministically.
        if (view.archive_size() > 0) {
            for (const PaperRecord& p :
                 view.query_archive(pad_embedding(std::vector<double>(1, 0.0)),
                                    static_cast<int>(view.archive_size()))) {
                ids.push_back(p.paper_id);
            }
            std::sort(ids.begin(), ids.end());
        }
        return ids;
    }();
    while (true) {
        std::size_t seed_idx = pool.size();
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (!assigned[i]) {
                seed_idx = i;
                break;
            }
        }
        if (seed_idx == pool.size()) break;
        assigned[seed_idx] = true;
        Tournament t;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "r%03d_t%02d", pool[seed_idx]->round,
                      static_cast<int>(tournaments.size()));
        t.tournament_id = buf;
        t.member_output_ids.push_back(pool[seed_idx]->output_id);
        // l-1 nearest unassigned neighbors by approach distance, id tie-break.
        std::vector<std::size_t> rest;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (!assigned[i]) rest.push_back(i);
        }
        std::sort(rest.begin(), rest.end(), [&](std::size_t a, std::size_t b) {
            double da = squared_distance(pool[a]->approach, pool[seed_idx]->approach);
            double db = squared_distance(pool[b]->approach, pool[seed_idx]->approach);
            if (da != db) return da < db;
            return pool[a]->output_id < pool[b]->output_id;
        });
        for (std::size_t j = 0; j < rest.size() && static_cast<int>(t.member_output_ids.size()) < l;
             ++j) {
            assigned[rest[j]] = true;
            t.member_output_ids.push_back(pool[rest[j]]->output_id);
        }
        std::sort(t.member_output_ids.begin(), t.member_output_ids.end());
        if (!archive_ids.empty()) {
            std::vector<std::size_t> idx(archive_ids.size());
            std::iota(idx.begin(), idx.end(), 0u);
            for (int r = 0; r < 2 && !idx.empty(); ++r) {
                std::uniform_int_distribution<std::size_t> pick(0, idx.size() - 1);
                std::size_t chosen = pick(rng);
                t.reference_paper_ids.push_back(archive_ids[idx[chosen]]);
                idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(chosen));
            }
        }
        tournaments.push_back(std::move(t));
    }
    return tournaments;
}

std::vector<MetaReview> meta_review(const Tournament& tournament,
                                    const std::map<std::string, std::vector<Review>>& reviews,
                                    const std::map<std::string, double>& perceived_sig,
                                    Backend& backend) {
    nlohmann::json members = nlohmann::json::array();
    for (const std::string& id : tournament.member_output_ids) {
        auto rit = reviews.find(id);
        if (rit == reviews.end() || rit->second.empty()) {
            throw IntegrityError("missing reviews for output " + id);
        }
        double sum = 0.0;
        for (const Review& r : rit->second) sum += r.overall;
        auto sit = perceived_sig.find(id);
        if (sit == perceived_sig.end()) {
            throw IntegrityError("missing perceived significance for output " + id);
        }
        members.push_back({{"output_id", id},
                           {"mean_overall", sum / static_cast<double>(rit->second.size())},
                           {"perceived_sig", sit->second}});
    }
    BackendRequest req{RequestKind::MetaReview,
                       "meta-" + tournament.tournament_id,
                       {{"tournament_id", tournament.tournament_id}, {"members", members}}};
    auto resp = backend.handle(req);
    std::vector<MetaReview> out;
    for (const auto& mj : resp.payload.at("members")) {
        MetaReview m;
        m.paper_id = mj.at("output_id").get<std::string>();
        m.overall_score = mj.at("overall_score").get<double>();
        m.rank = mj.at("rank").get<int>();
        m.meta_review_text = mj.at("meta_review_text").get<std::string>();
        m.justification = mj.at("justification").get<std::string>();
        m.decision = "pending";
        out.push_back(std::move(m));
    }
    // Ranks must form a strict permutation of 1..size.
    std::set<int> ranks;
    for (const MetaReview& m : out) ranks.insert(m.rank);
    if (ranks.size() != out.size() || *ranks.begin() != 1 ||
        *ranks.rbegin() != static_cast<int>(out.size())) {
        throw IntegrityError("meta-review ranks are not a strict permutation");
    }
    return out;
}

std::vector<std::string> accept_round(std::vector<EvaluationResult>& results, int n, int k) {
    if (k < 1) throw ValidationError("k must be >= 1");
    if (static_cast<int>(results.size()) != n) {
        throw ValidationError("expected one evaluation per output");
    }
    const int n_accept = n / k;
    std::vector<std::size_t> order(results.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (results[a].combined_score != results[b].combined_score) {
            return results[a].combined_score > results[b].combined_score;
        }
        return results[a].output_id < results[b].output_id;
    });
    std::vector<std::string> accepted;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        EvaluationResult& r = results[order[pos]];
        r.accepted = static_cast<int>(pos) < n_accept;
        r.meta.decision = r.accepted ? "accept" : "reject";
        if (r.accepted) accepted.push_back(r.output_id);
    }
    std::sort(accepted.begin(), accepted.end());
    return accepted;
}

}  // namespace ascollab
