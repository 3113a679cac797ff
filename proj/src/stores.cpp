#include "ascollab/stores.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include <nlohmann/json.hpp>

#include "ascollab/errors.hpp"
#include "ascollab/util.hpp"

namespace ascollab {

std::vector<double> pad_embedding(const std::vector<double>& coords, int width) {
    if (static_cast<int>(coords.size()) > width) {
        throw ValidationError("coordinates exceed embedding width");
    }
    std::vector<double> v(static_cast<std::size_t>(width), 0.0);
    std::copy(coords.begin(), coords.end(), v.begin());
    return v;
}

void EmbeddingIndex::add(const std::string& id, std::vector<double> vec) {
    if (width_ < 0) width_ = static_cast<int>(vec.size());
    if (static_cast<int>(vec.size()) != width_) {
        throw ValidationError("embedding width mismatch in index");
    }
    if (contains(id)) throw ConflictError("duplicate id in embedding index: " + id);
    entries_.push_back({id, std::move(vec)});
}

void EmbeddingIndex::upsert(const std::string& id, std::vector<double> vec) {
    if (width_ < 0) width_ = static_cast<int>(vec.size());
    if (static_cast<int>(vec.size()) != width_) {
        throw ValidationError("embedding width mismatch in index");
    }
    for (Entry& e : entries_) {
        if (e.id == id) {
            e.vec = std::move(vec);
            return;
        }
    }
    entries_.push_back({id, std::move(vec)});
}

bool EmbeddingIndex::contains(const std::string& id) const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [&](const Entry& e) { return e.id == id; });
}

std::vector<std::string> EmbeddingIndex::query(const std::vector<double>& vec, int k,
                                               const std::set<std::string>& exclude) const {
    if (k < 1) throw ValidationError("query k must be >= 1");
    if (width_ >= 0 && static_cast<int>(vec.size()) != width_) {
        throw ValidationError("query vector width mismatch");
    }
    std::vector<std::pair<double, const std::string*>> scored;
    scored.reserve(entries_.size());
    for (const Entry& e : entries_) {
        if (exclude.count(e.id)) continue;
        scored.emplace_back(cosine_similarity(vec, e.vec), &e.id);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return *a.second < *b.second;
    });
    std::vector<std::string> out;
    for (const auto& [sim, id] : scored) {
        if (static_cast<int>(out.size()) == k) break;
        out.push_back(*id);
    }
    return out;
}

void Stores::register_agent(const AgentProfile& profile, const std::vector<double>& embedding) {
    if (profiles_.count(profile.agent_id)) {
        throw ConflictError("agent already registered: " + profile.agent_id);
    }
    profiles_[profile.agent_id] = profile;
    registry_index_.add(profile.agent_id, embedding);
}

void Stores::update_profile(const AgentProfile& profile, const std::vector<double>& embedding) {
    auto it = profiles_.find(profile.agent_id);
    if (it == profiles_.end()) throw NotFoundError("unknown agent: " + profile.agent_id);
    if (profile.citation_count < it->second.citation_count ||
        profile.num_accepted_papers < it->second.num_accepted_papers) {
        throw IntegrityError("reputation counters must not decrease: " + profile.agent_id);
    }
    it->second = profile;
    registry_index_.upsert(profile.agent_id, embedding);
}

const AgentProfile& Stores::profile(const std::string& agent_id) const {
    auto it = profiles_.find(agent_id);
    if (it == profiles_.end()) throw NotFoundError("unknown agent: " + agent_id);
    return it->second;
}

void Stores::archive_insert(const PaperRecord& record, const std::vector<double>& embedding,
                            const PaperCoordinates& coords) {
    if (papers_.count(record.paper_id)) {
        throw ConflictError("duplicate paper id: " + record.paper_id);
    }
    for (const CitedRef& ref : record.cited_paper_ids) {
        if (!papers_.count(ref.paper_id)) {
            throw IntegrityError("dangling citation to " + ref.paper_id + " in " +
                                 record.paper_id);
        }
    }
    for (const std::string& c : record.collab_agent_ids) {
        if (c == record.primary_agent_id) {
            throw ValidationError("primary agent listed as collaborator: " + c);
        }
    }
    if (record.status != "accepted") {
        throw ValidationError("only accepted records enter the archive");
    }
    papers_[record.paper_id] = record;
    coords_[record.paper_id] = coords;
    archive_index_.add(record.paper_id, embedding);
}

const PaperRecord& Stores::paper(const std::string& paper_id) const {
    auto it = papers_.find(paper_id);
    if (it == papers_.end()) throw NotFoundError("unknown paper: " + paper_id);
    return it->second;
}

void Stores::propagate_citations(const std::vector<PaperRecord>& new_records) {
    // Deduplicate per (citing, cited) pair before applying increments.
    std::set<std::pair<std::string, std::string>> pairs;
    for (const PaperRecord& rec : new_records) {
        for (const CitedRef& ref : rec.cited_paper_ids) {
            if (!papers_.count(ref.paper_id)) {
                throw IntegrityError("dangling citation to " + ref.paper_id);
            }
            pairs.emplace(rec.paper_id, ref.paper_id);
        }
    }
    for (const auto& [citing, cited] : pairs) {
        PaperRecord& target = papers_.at(cited);
        target.citation_count += 1;
        auto credit = [&](const std::string& agent_id) {
            auto it = profiles_.find(agent_id);
            if (it != profiles_.end()) it->second.citation_count += 1;
        };
        credit(target.primary_agent_id);
        for (const std::string& c : target.collab_agent_ids) credit(c);
    }
    for (const PaperRecord& rec : new_records) {
        auto credit = [&](const std::string& agent_id) {
            auto it = profiles_.find(agent_id);
            if (it != profiles_.end()) it->second.num_accepted_papers += 1;
        };
        credit(rec.primary_agent_id);
        for (const std::string& c : rec.collab_agent_ids) credit(c);
    }
}

std::vector<AgentProfile> Stores::query_registry(const std::vector<double>& query_vector, int k,
                                                 const std::set<std::string>& exclude_ids) const {
    std::vector<AgentProfile> out;
    for (const std::string& id : registry_index_.query(query_vector, k, exclude_ids)) {
        out.push_back(profiles_.at(id));
    }
    return out;
}

std::vector<PaperRecord> Stores::query_archive(const std::vector<double>& query_vector,
                                               int k) const {
    std::vector<PaperRecord> out;
    for (const std::string& id : archive_index_.query(query_vector, k, {})) {
        out.push_back(papers_.at(id));
    }
    return out;
}

StoreView Stores::snapshot(int round) const {
    auto frozen = std::make_shared<Stores>(*this);
    return StoreView(round, std::move(frozen));
}

std::vector<std::string> Stores::paper_ids_sorted() const {
    std::vector<std::string> ids;
    ids.reserve(papers_.size());
    for (const auto& [id, rec] : papers_) ids.push_back(id);
    return ids;
}

std::vector<std::string> Stores::agent_ids_sorted() const {
    std::vector<std::string> ids;
    ids.reserve(profiles_.size());
    for (const auto& [id, p] : profiles_) ids.push_back(id);
    return ids;
}

nlohmann::json Stores::to_json() const {
    nlohmann::json profiles = nlohmann::json::array();
    for (const auto& [id, p] : profiles_) profiles.push_back(profile_to_json(p));
    nlohmann::json papers = nlohmann::json::array();
    for (const auto& [id, rec] : papers_) papers.push_back(paper_to_json(rec));
    return {{"registry", profiles}, {"archive", papers}};
}

std::string Stores::digest() const { return sha256_hex(to_json().dump()); }

StoreView::StoreView(int round, std::shared_ptr<const Stores> frozen)
    : round_(round), frozen_(std::move(frozen)) {}

bool StoreView::has_agent(const std::string& id) const {
    return frozen_ && frozen_->profiles_.count(id) > 0;
}

bool StoreView::has_paper(const std::string& id) const {
    return frozen_ && frozen_->papers_.count(id) > 0;
}

const AgentProfile& StoreView::profile(const std::string& agent_id) const {
    return frozen_->profile(agent_id);
}

const PaperRecord& StoreView::paper(const std::string& paper_id) const {
    return frozen_->paper(paper_id);
}

std::optional<PaperCoordinates> StoreView::paper_coords(const std::string& paper_id) const {
    auto it = frozen_->coords_.find(paper_id);
    if (it == frozen_->coords_.end()) return std::nullopt;
    return it->second;
}

std::vector<AgentProfile> StoreView::query_registry(const std::vector<double>& query_vector,
                                                    int k,
                                                    const std::set<std::string>& exclude_ids)
    const {
    return frozen_->query_registry(query_vector, k, exclude_ids);
}

std::vector<PaperRecord> StoreView::query_archive(const std::vector<double>& query_vector,
                                                  int k) const {
    return frozen_->query_archive(query_vector, k);
}

std::size_t StoreView::registry_size() const { return frozen_ ? frozen_->registry_size() : 0; }
std::size_t StoreView::archive_size() const { return frozen_ ? frozen_->archive_size() : 0; }

std::string StoreView::digest() const { return frozen_->digest(); }

nlohmann::json paper_to_json(const PaperRecord& r) {
    nlohmann::json cited = nlohmann::json::array();
    for (const CitedRef& c : r.cited_paper_ids) {
        cited.push_back({{"paper_id", c.paper_id}, {"agent_id", c.agent_id}, {"title", c.title}});
    }
    nlohmann::json doc = {{"schema", "paper/v1"},
                          {"paper_id", r.paper_id},
                          {"primary_agent_id", r.primary_agent_id},
                          {"collab_agent_ids", r.collab_agent_ids},
                          {"title", r.title},
                          {"abstract", r.abstract},
                          {"manuscript", r.manuscript},
                          {"citation_count", r.citation_count},
                          {"publication_t", r.publication_t},
                          {"cited_paper_ids", cited},
                          {"status", r.status}};
    if (r.code_script) doc["code_script"] = *r.code_script;
    if (r.metareview) doc["metareview"] = metareview_to_json(*r.metareview);
    return doc;
}

PaperRecord paper_from_json(const nlohmann::json& doc) {
    PaperRecord r;
    r.paper_id = doc.at("paper_id").get<std::string>();
    r.primary_agent_id = doc.at("primary_agent_id").get<std::string>();
    r.collab_agent_ids = doc.at("collab_agent_ids").get<std::vector<std::string>>();
    r.title = doc.at("title").get<std::string>();
    r.abstract = doc.at("abstract").get<std::string>();
    r.manuscript = doc.at("manuscript").get<std::string>();
    r.citation_count = doc.at("citation_count").get<int>();
    r.publication_t = doc.at("publication_t").get<int>();
    for (const auto& cj : doc.at("cited_paper_ids")) {
        r.cited_paper_ids.push_back({cj.at("paper_id").get<std::string>(),
                                     cj.at("agent_id").get<std::string>(),
                                     cj.at("title").get<std::string>()});
    }
    if (doc.contains("code_script")) r.code_script = doc.at("code_script").get<std::string>();
    if (doc.contains("metareview")) r.metareview = metareview_from_json(doc.at("metareview"));
    r.status = doc.at("status").get<std::string>();
    return r;
}

nlohmann::json profile_to_json(const AgentProfile& p) {
    return {{"schema", "profile/v1"},
            {"agent_id", p.agent_id},
            {"behavior", p.behavior},
            {"expertise", p.expertise},
            {"expertise_topics", p.expertise_topics},
            {"citation_count", p.citation_count},
            {"num_accepted_papers", p.num_accepted_papers}};
}

AgentProfile profile_from_json(const nlohmann::json& doc) {
    AgentProfile p;
    p.agent_id = doc.at("agent_id").get<std::string>();
    p.behavior = doc.at("behavior").get<std::string>();
    p.expertise = doc.at("expertise").get<std::string>();
    p.expertise_topics = doc.at("expertise_topics").get<std::vector<std::string>>();
    p.citation_count = doc.at("citation_count").get<int>();
    p.num_accepted_papers = doc.at("num_accepted_papers").get<int>();
    return p;
}

nlohmann::json metareview_to_json(const MetaReview& m) {
    return {{"schema", "metareview/v1"},
            {"paper_id", m.paper_id},
            {"meta_review_text", m.meta_review_text},
            {"overall_score", m.overall_score},
            {"rank", m.rank},
            {"justification", m.justification},
            {"decision", m.decision}};
}

MetaReview metareview_from_json(const nlohmann::json& doc) {
    MetaReview m;
    m.paper_id = doc.at("paper_id").get<std::string>();
    m.meta_review_text = doc.at("meta_review_text").get<std::string>();
    m.overall_score = doc.at("overall_score").get<double>();
    m.rank = doc.at("rank").get<int>();
    m.justification = doc.at("justification").get<std::string>();
    m.decision = doc.at("decision").get<std::string>();
    return m;
}

}  // namespace ascollab
