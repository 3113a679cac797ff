#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ascollab/errors.hpp"
#include "ascollab/stores.hpp"
#include "ascollab/util.hpp"

using namespace ascollab;

namespace {

AgentProfile make_profile(const std::string& id) {
    AgentProfile p;
    p.agent_id = id;
    p.behavior = "behavior of " + id;
    p.expertise = "expertise of " + id;
    p.expertise_topics = {"x0:b1"};
    return p;
}

PaperRecord make_paper(const std::string& id, const std::string& author, int round = 0) {
    PaperRecord r;
    r.paper_id = id;
    r.primary_agent_id = author;
    r.title = "title " + id;
    r.abstract = "abstract " + id;
    r.manuscript = "manuscript " + id;
    r.publication_t = round;
    r.status = "accepted";
    return r;
}

std::vector<double> random_vec(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<double> v(static_cast<std::size_t>(dim));
    for (double& c : v) c = n(rng);
    return v;
}

// Brute-force cosine ranking oracle: sort by similarity desc, id asc.
std::vector<std::string> brute_force_topk(
    const std::vector<std::pair<std::string, std::vector<double>>>& entries,
    const std::vector<double>& q, int k, const std::set<std::string>& exclude = {}) {
    std::vector<std::pair<std::string, double>> scored;
    for (const auto& [id, vec] : entries) {
        if (exclude.count(id)) continue;
        scored.emplace_back(id, cosine_similarity(vec, q));
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::vector<std::string> ids;
    for (int i = 0; i < k && i < static_cast<int>(scored.size()); ++i) {
        ids.push_back(scored[static_cast<std::size_t>(i)].first);
    }
    return ids;
}

}  // namespace

TEST_CASE("pad_embedding zero-pads to the fixed width") {
    auto v = pad_embedding({0.25, 0.5});
    REQUIRE(v.size() == static_cast<std::size_t>(kEmbeddingDim));
    CHECK(v[0] == 0.25);
    CHECK(v[1] == 0.5);
    for (std::size_t i = 2; i < v.size(); ++i) CHECK(v[i] == 0.0);
}

TEST_CASE("agent registration, retrieval, and conflicts") {
    Stores stores;
    AgentProfile p = make_profile("agent_001");
    stores.register_agent(p, pad_embedding({0.1, 0.2}));
    const AgentProfile& got = stores.profile("agent_001");
    CHECK(got.agent_id == p.agent_id);
    CHECK(got.behavior == p.behavior);
    CHECK(got.expertise_topics == p.expertise_topics);
    CHECK_THROWS_AS(stores.register_agent(p, pad_embedding({0.1, 0.2})), ConflictError);
    CHECK_THROWS_AS(stores.profile("agent_999"), NotFoundError);
}

TEST_CASE("sixteen registrations give registry size sixteen") {
    Stores stores;
    for (int i = 1; i <= 16; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "agent_%03d", i);
        stores.register_agent(make_profile(buf), pad_embedding({i / 16.0, 0.5}));
    }
    CHECK(stores.registry_size() == 16);
}

TEST_CASE("profile updates reject decreasing counters") {
    Stores stores;
    AgentProfile p = make_profile("agent_001");
    p.citation_count = 3;
    stores.register_agent(p, pad_embedding({0.1, 0.2}));
    AgentProfile lower = p;
    lower.citation_count = 2;
    CHECK_THROWS_AS(stores.update_profile(lower, pad_embedding({0.1, 0.2})), IntegrityError);
    AgentProfile higher = p;
    higher.citation_count = 5;
    stores.update_profile(higher, pad_embedding({0.3, 0.4}));
    CHECK(stores.profile("agent_001").citation_count == 5);
}

TEST_CASE("registry queries: basics and exclusions") {
    Stores stores;
    stores.register_agent(make_profile("agent_001"), pad_embedding({0.9, 0.1}));
    SUBCASE("single entry, k=1") {
        auto hits = stores.query_registry(pad_embedding({0.8, 0.2}), 1);
        REQUIRE(hits.size() == 1);
        CHECK(hits[0].agent_id == "agent_001");
    }
    SUBCASE("excluding the only entry empties the result") {
        auto hits = stores.query_registry(pad_embedding({0.8, 0.2}), 1, {"agent_001"});
        CHECK(hits.empty());
    }
}

TEST_CASE("registry top-k equals the brute-force cosine scan") {
    Stores stores;
    std::mt19937_64 rng(101);
    std::vector<std::pair<std::string, std::vector<double>>> entries;
    for (int i = 0; i < 100; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "agent_%03d", i + 1);
        auto v = random_vec(kEmbeddingDim, rng);
        stores.register_agent(make_profile(buf), v);
        entries.emplace_back(buf, v);
    }
    for (int trial = 0; trial < 30; ++trial) {
        auto q = random_vec(kEmbeddingDim, rng);
        std::set<std::string> exclude;
        if (trial % 2) exclude = {"agent_005", "agent_050"};
        auto got = stores.query_registry(q, 5, exclude);
        auto want = brute_force_topk(entries, q, 5, exclude);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i].agent_id == want[i]);
    }
}

TEST_CASE("archive queries: basics and brute-force equivalence") {
    Stores stores;
    stores.register_agent(make_profile("agent_001"), pad_embedding({0.5, 0.5}));
    SUBCASE("empty archive yields empty results") {
        CHECK(stores.query_archive(pad_embedding({0.5, 0.5}), 3).empty());
    }
    SUBCASE("single paper returned for any query") {
        stores.archive_insert(make_paper("paper_0001", "agent_001"),
                              pad_embedding({0.2, 0.8}), {Approach{{0.2, 0.8}}, 0.5});
        auto hits = stores.query_archive(pad_embedding({0.99, 0.01}), 3);
        REQUIRE(hits.size() == 1);
        CHECK(hits[0].paper_id == "paper_0001");
    }
    SUBCASE("k=10 over 500 seeded entries matches the exhaustive scan") {
        std::mt19937_64 rng(55);
        std::vector<std::pair<std::string, std::vector<double>>> entries;
        for (int i = 0; i < 500; ++i) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "paper_%04d", i);
            auto v = random_vec(kEmbeddingDim, rng);
            stores.archive_insert(make_paper(buf, "agent_001"), v, {Approach{{0.5, 0.5}}, 0.5});
            entries.emplace_back(buf, v);
        }
        for (int trial = 0; trial < 20; ++trial) {
            auto q = random_vec(kEmbeddingDim, rng);
            auto got = stores.query_archive(q, 10);
            auto want = brute_force_topk(entries, q, 10);
            REQUIRE(got.size() == want.size());
            for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i].paper_id == want[i]);
        }
    }
}

TEST_CASE("archive insertion integrity rules") {
    Stores stores;
    stores.register_agent(make_profile("agent_001"), pad_embedding({0.5, 0.5}));
    stores.register_agent(make_profile("agent_002"), pad_embedding({0.4, 0.6}));
    PaperRecord base = make_paper("paper_0001", "agent_001");
    stores.archive_insert(base, pad_embedding({0.2, 0.8}), {Approach{{0.2, 0.8}}, 0.5});
    CHECK(stores.paper("paper_0001").title == base.title);

    SUBCASE("duplicate paper id rejected") {
        CHECK_THROWS_AS(
            stores.archive_insert(base, pad_embedding({0.2, 0.8}), {Approach{{0.2, 0.8}}, 0.5}),
            ConflictError);
    }
    SUBCASE("dangling citation rejected") {
        PaperRecord bad = make_paper("paper_0002", "agent_002");
        bad.cited_paper_ids.push_back({"paper_9999", "agent_001", "ghost"});
        CHECK_THROWS_AS(
            stores.archive_insert(bad, pad_embedding({0.1, 0.9}), {Approach{{0.1, 0.9}}, 0.5}),
            IntegrityError);
    }
    SUBCASE("primary agent listed as collaborator rejected") {
        PaperRecord bad = make_paper("paper_0002", "agent_002");
        bad.collab_agent_ids = {"agent_002"};
        CHECK_THROWS_AS(
            stores.archive_insert(bad, pad_embedding({0.1, 0.9}), {Approach{{0.1, 0.9}}, 0.5}),
            ValidationError);
    }
    SUBCASE("only accepted records may enter the archive") {
        PaperRecord bad = make_paper("paper_0002", "agent_002");
        bad.status = "rejected";
        CHECK_THROWS_AS(
            stores.archive_insert(bad, pad_embedding({0.1, 0.9}), {Approach{{0.1, 0.9}}, 0.5}),
            ValidationError);
    }
}

TEST_CASE("citation propagation counts distinct pairs once") {
    Stores stores;
    for (int i = 1; i <= 4; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "agent_%03d", i);
        stores.register_agent(make_profile(buf), pad_embedding({i / 4.0, 0.5}));
    }
    PaperRecord p1 = make_paper("paper_0001", "agent_001");
    stores.archive_insert(p1, pad_embedding({0.2, 0.2}), {Approach{{0.2, 0.2}}, 0.5});
    stores.propagate_citations({p1});

    SUBCASE("citing nothing only credits authorship") {
        CHECK(stores.profile("agent_001").num_accepted_papers == 1);
        CHECK(stores.profile("agent_001").citation_count == 0);
        CHECK(stores.paper("paper_0001").citation_count == 0);
    }
    SUBCASE("double-listed citation counts once") {
        PaperRecord p2 = make_paper("paper_0002", "agent_002", 1);
        p2.cited_paper_ids.push_back({"paper_0001", "agent_001", "title paper_0001"});
        p2.cited_paper_ids.push_back({"paper_0001", "agent_001", "title paper_0001"});
        stores.archive_insert(p2, pad_embedding({0.3, 0.3}), {Approach{{0.3, 0.3}}, 0.5});
        stores.propagate_citations({p2});
        CHECK(stores.paper("paper_0001").citation_count == 1);
        CHECK(stores.profile("agent_001").citation_count == 1);
        CHECK(stores.profile("agent_002").num_accepted_papers == 1);
    }
    SUBCASE("seeded batch matches the distinct-pair oracle") {
        std::mt19937_64 rng(77);
        std::vector<PaperRecord> batch;
        std::set<std::pair<std::string, std::string>> pairs;
        for (int i = 0; i < 8; ++i) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "paper_%04d", i + 2);
            PaperRecord r = make_paper(buf, "agent_00" + std::to_string(1 + i % 4), 1);
            r.primary_agent_id = "agent_00" + std::to_string(1 + i % 4);
            if (rng() % 2) {
                r.cited_paper_ids.push_back({"paper_0001", "agent_001", "title paper_0001"});
                pairs.insert({r.paper_id, "paper_0001"});
            }
            stores.archive_insert(r, pad_embedding({0.1 * i, 0.5}),
                                  {Approach{{0.1 * i, 0.5}}, 0.5});
            batch.push_back(r);
        }
        int before = stores.paper("paper_0001").citation_count;
        stores.propagate_citations(batch);
        CHECK(stores.paper("paper_0001").citation_count - before ==
              static_cast<int>(pairs.size()));
    }
}

TEST_CASE("snapshots are immutable and barrier-consistent") {
    Stores stores;
    stores.register_agent(make_profile("agent_001"), pad_embedding({0.5, 0.5}));
    StoreView before = stores.snapshot(0);
    StoreView before2 = stores.snapshot(0);
    CHECK(before.digest() == before2.digest());
    stores.archive_insert(make_paper("paper_0001", "agent_001"), pad_embedding({0.2, 0.8}),
                          {Approach{{0.2, 0.8}}, 0.5});
    StoreView after = stores.snapshot(1);
    CHECK(before.digest() != after.digest());
    // the earlier view is unaffected by the mutation
    CHECK(before.archive_size() == 0);
    CHECK(after.archive_size() == 1);
    CHECK(before.digest() == before2.digest());
}

TEST_CASE("record and profile JSON round trips") {
    PaperRecord r = make_paper("paper_0042", "agent_003", 7);
    r.collab_agent_ids = {"agent_004"};
    r.cited_paper_ids.push_back({"paper_0001", "agent_001", "t1"});
    r.code_script = "code";
    MetaReview m;
    m.paper_id = "paper_0042";
    m.meta_review_text = "meta";
    m.overall_score = 0.75;
    m.rank = 2;
    m.justification = "because";
    m.decision = "accept";
    r.metareview = m;
    r.citation_count = 3;
    PaperRecord back = paper_from_json(paper_to_json(r));
    CHECK(back.paper_id == r.paper_id);
    CHECK(back.collab_agent_ids == r.collab_agent_ids);
    REQUIRE(back.cited_paper_ids.size() == 1);
    CHECK(back.cited_paper_ids[0].paper_id == "paper_0001");
    CHECK(back.code_script == r.code_script);
    REQUIRE(back.metareview.has_value());
    CHECK(back.metareview->overall_score == 0.75);
    CHECK(back.metareview->rank == 2);
    CHECK(back.citation_count == 3);
    CHECK(back.publication_t == 7);

    AgentProfile p = make_profile("agent_009");
    p.citation_count = 2;
    p.num_accepted_papers = 1;
    AgentProfile pback = profile_from_json(profile_to_json(p));
    CHECK(pback.agent_id == p.agent_id);
    CHECK(pback.behavior == p.behavior);
    CHECK(pback.citation_count == 2);
    CHECK(pback.num_accepted_papers == 1);
}
