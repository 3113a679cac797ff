#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ascollab/landscape.hpp"

namespace ascollab {

inline constexpr int kEmbeddingDim = 32;

/// Zero-pads approach coordinates to the fixed embedding width.
std::vector<double> pad_embedding(const std::vector<double>& coords,
                                  int width = kEmbeddingDim);

struct AgentProfile {
    std::string agent_id;
    std::string behavior;
    std::string expertise;
    std::vector<std::string> expertise_topics;
    int citation_count = 0;
    int num_accepted_papers = 0;
};

struct CitedRef {
    std::string paper_id;
    std::string agent_id;
    std::string title;
};

struct MetaReview {
    std::string paper_id;
    std::string meta_review_text;
    double overall_score = 0.0;
    int rank = 1;
    std::string justification;
    std::string decision;  // "accept" or "reject"
};

struct PaperRecord {
    std::string paper_id;
    std::string primary_agent_id;
    std::vector<std::string> collab_agent_ids;
    std::string title;
    std::string abstract;
    std::string manuscript;
    int citation_count = 0;
    int publication_t = 0;
    std::vector<CitedRef> cited_paper_ids;
    std::optional<std::string> code_script;
    std::optional<MetaReview> metareview;
    std::string status = "accepted";
};

/// Exact cosine-similarity index over fixed-width vectors.
class EmbeddingIndex {
public:
    void add(const std::string& id, std::vector<double> vec);
    void upsert(const std::string& id, std::vector<double> vec);
    bool contains(const std::string& id) const;
    std::size_t size() const { return entries_.size(); }
    int width() const { return width_; }

    /// Top-k ids by cosine similarity, ties broken by lexicographic id.
    std::vector<std::string> query(const std::vector<double>& vec, int k,
                                   const std::set<std::string>& exclude = {}) const;

private:
    struct Entry {
        std::string id;
        std::vector<double> vec;
    };
    std::vector<Entry> entries_;
    int width_ = -1;
};

// Engine-side metadata attached to an archived paper; not part of the
// registry/archive record schema itself.
struct PaperCoordinates {
    Approach approach;
    double claimed_value = 0.0;
};

class StoreView;

/// Shared registry + archive with round-barrier mutation semantics.
class Stores {
public:
    void register_agent(const AgentProfile& profile, const std::vector<double>& embedding);
    void update_profile(const AgentProfile& profile, const std::vector<double>& embedding);
    const AgentProfile& profile(const std::string& agent_id) const;

    void archive_insert(const PaperRecord& record, const std::vector<double>& embedding,
                        const PaperCoordinates& coords);
    const PaperRecord& paper(const std::string& paper_id) const;

    /// Credits authors of new records and increments citation counters for
    /// every distinct (citing, cited) pair.
    void propagate_citations(const std::vector<PaperRecord>& new_records);

    std::vector<AgentProfile> query_registry(const std::vector<double>& query_vector, int k,
                                             const std::set<std::string>& exclude_ids = {}) const;
    std::vector<PaperRecord> query_archive(const std::vector<double>& query_vector, int k) const;

    StoreView snapshot(int round) const;

    std::size_t registry_size() const { return profiles_.size(); }
    std::size_t archive_size() const { return papers_.size(); }
    std::vector<std::string> paper_ids_sorted() const;
    std::vector<std::string> agent_ids_sorted() const;
    const std::map<std::string, PaperCoordinates>& paper_coordinates() const { return coords_; }

    std::string digest() const;
    nlohmann::json to_json() const;

private:
    std::map<std::string, AgentProfile> profiles_;
    std::map<std::string, PaperRecord> papers_;
    std::map<std::string, PaperCoordinates> coords_;
    EmbeddingIndex registry_index_;
    EmbeddingIndex archive_index_;

    friend class StoreView;
};

/// Immutable copy of the stores taken at a round barrier.
class StoreView {
public:
    StoreView() = default;
    StoreView(int round, std::shared_ptr<const Stores> frozen);

    int round() const { return round_; }
    bool has_agent(const std::string& id) const;
    bool has_paper(const std::string& id) const;
    const AgentProfile& profile(const std::string& agent_id) const;
    const PaperRecord& paper(const std::string& paper_id) const;
    std::optional<PaperCoordinates> paper_coords(const std::string& paper_id) const;
    std::vector<AgentProfile> query_registry(const std::vector<double>& query_vector, int k,
                                             const std::set<std::string>& exclude_ids = {}) const;
    std::vector<PaperRecord> query_archive(const std::vector<double>& query_vector, int k) const;
    std::size_t registry_size() const;
    std::size_t archive_size() const;
    std::string digest() const;

private:
    int round_ = 0;
    std::shared_ptr<const Stores> frozen_;
};

nlohmann::json paper_to_json(const PaperRecord& record);
PaperRecord paper_from_json(const nlohmann::json& doc);
nlohmann::json profile_to_json(const AgentProfile& profile);
AgentProfile profile_from_json(const nlohmann::json& doc);
nlohmann::json metareview_to_json(const MetaReview& mr);
MetaReview metareview_from_json(const nlohmann::json& doc);

}  // namespace ascollab
