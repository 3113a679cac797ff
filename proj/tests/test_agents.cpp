#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include <nlohmann/json.hpp>

#include "ascollab/agents.hpp"
#include "ascollab/errors.hpp"
#include "ascollab/util.hpp"

using namespace ascollab;

namespace {

Approach ap(std::vector<double> c) { return Approach{std::move(c)}; }

Approach random_point(int dim, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Approach x;
    for (int i = 0; i < dim; ++i) x.coords.push_back(u(rng));
    return x;
}

// Independent Nadaraya-Watson re-computation for the oracle checks.
double nw_oracle(const Belief& b, const Approach& x) {
    if (b.observations.empty()) return 0.0;
    double num = 0.0, den = 0.0;
    for (const Observation& o : b.observations) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < x.coords.size(); ++i) {
            double d = x.coords[i] - o.x.coords[i];
            d2 += d * d;
        }
        double w = std::exp(-d2 / (2.0 * b.bandwidth * b.bandwidth));
        num += w * o.value;
        den += w;
    }
    return den == 0.0 ? 0.0 : num / den;
}

}  // namespace

TEST_CASE("init_population produces distinct, well-formed agents") {
    auto agents = init_population(16, 2, 5);
    REQUIRE(agents.size() == 16);
    std::set<std::string> ids;
    for (const AgentState& a : agents) {
        ids.insert(a.agent_id);
        validate_persona(a.persona);
        REQUIRE(a.expertise.center.coords.size() == 2);
        for (double c : a.expertise.center.coords) {
            CHECK(c >= 0.0);
            CHECK(c <= 1.0);
        }
        CHECK(a.expertise.radius > 0.0);
    }
    CHECK(ids.size() == 16);
    CHECK(agents.front().agent_id == "agent_001");
    CHECK(agents.back().agent_id == "agent_016");
}

TEST_CASE("single-agent population starts blank") {
    auto agents = init_population(1, 3, 9);
    REQUIRE(agents.size() == 1);
    CHECK(agents[0].belief.observations.empty());
    CHECK(agents[0].reputation.citation_count == 0);
    CHECK(agents[0].reputation.num_accepted_papers == 0);
    CHECK(agents[0].private_memory.empty());
}

TEST_CASE("population generation is deterministic and validates n") {
    auto a = init_population(5, 2, 123);
    auto b = init_population(5, 2, 123);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].agent_id == b[i].agent_id);
        CHECK(a[i].persona.stance_ideas == b[i].persona.stance_ideas);
        CHECK(a[i].persona.stance_resources == b[i].persona.stance_resources);
        CHECK(a[i].expertise.center.coords == b[i].expertise.center.coords);
    }
    CHECK_THROWS_AS(init_population(0, 2, 1), ValidationError);
}

TEST_CASE("belief estimate closed forms and oracle equivalence") {
    Belief b;
    b.bandwidth = 0.1;
    SUBCASE("empty belief is 0 everywhere") {
        CHECK(belief_estimate(b, ap({0.2, 0.9})) == 0.0);
        CHECK(belief_estimate(b, ap({0.0, 0.0})) == 0.0);
    }
    SUBCASE("single observation interpolates exactly at its own point") {
        b.observations.push_back({ap({0.4, 0.6}), 0.7, 0});
        CHECK(belief_estimate(b, ap({0.4, 0.6})) == doctest::Approx(0.7).epsilon(1e-12));
    }
    SUBCASE("five seeded observations match the weighted-mean oracle") {
        std::mt19937_64 rng(31);
        std::uniform_real_distribution<double> val(0.0, 1.0);
        for (int i = 0; i < 5; ++i) b.observations.push_back({random_point(2, rng), val(rng), i});
        for (int trial = 0; trial < 100; ++trial) {
            Approach probe = random_point(2, rng);
            CHECK(std::abs(belief_estimate(b, probe) - nw_oracle(b, probe)) <= 1e-12);
        }
    }
}

TEST_CASE("belief updates are visible, sharp in the small-bandwidth limit, and order-insensitive") {
    AgentState agent = init_population(1, 2, 4)[0];
    CHECK(belief_estimate(agent.belief, ap({0.5, 0.5})) == 0.0);
    update_belief(agent, {ap({0.5, 0.5}), 0.42, 0});
    CHECK(belief_estimate(agent.belief, ap({0.5, 0.5})) == doctest::Approx(0.42));

    AgentState sharp = init_population(1, 2, 4)[0];
    sharp.belief.bandwidth = 1e-6;
    update_belief(sharp, {ap({0.2, 0.8}), 0.9, 0});
    update_belief(sharp, {ap({0.8, 0.2}), 0.1, 0});
    CHECK(belief_estimate(sharp.belief, ap({0.2, 0.8})) == doctest::Approx(0.9).epsilon(1e-9));

    AgentState fwd = init_population(1, 2, 4)[0];
    AgentState rev = init_population(1, 2, 4)[0];
    Observation o1{ap({0.3, 0.3}), 0.5, 0};
    Observation o2{ap({0.6, 0.6}), 0.8, 0};
    update_belief(fwd, o1);
    update_belief(fwd, o2);
    update_belief(rev, o2);
    update_belief(rev, o1);
    Approach probe = ap({0.45, 0.45});
    CHECK(belief_estimate(fwd.belief, probe) ==
          doctest::Approx(belief_estimate(rev.belief, probe)).epsilon(1e-12));
}

TEST_CASE("proposal policy respects stance boundaries") {
    AgentState agent = init_population(1, 2, 8)[0];
    update_belief(agent, {ap({0.5, 0.5}), 0.9, 0});
    auto value_of = [](const Approach&) { return 1.0; };

    SUBCASE("scope -1 with zero perturbation always returns the anchor") {
        agent.persona.stance_scope = -1.0;
        agent.persona.stance_ideas = -1.0;  // sigma = 0
        auto rng = make_rng(77);
        for (int i = 0; i < 1000; ++i) {
            Approach p = propose_next_approach(agent, value_of, rng);
            CHECK(p.coords == std::vector<double>{0.5, 0.5});
        }
    }
    SUBCASE("scope 0 explores half the time (10k draws within 0.5 +- 0.02)") {
        agent.persona.stance_scope = 0.0;
        agent.persona.stance_ideas = -1.0;  // exploit draws are exactly the anchor
        auto rng = make_rng(78);
        int explored = 0;
        for (int i = 0; i < 10000; ++i) {
            Approach p = propose_next_approach(agent, value_of, rng);
            if (p.coords != std::vector<double>{0.5, 0.5}) ++explored;
        }
        double frac = explored / 10000.0;
        CHECK(frac >= 0.48);
        CHECK(frac <= 0.52);
    }
    SUBCASE("scope +1 never returns the exact anchor") {
        agent.persona.stance_scope = 1.0;
        agent.persona.stance_ideas = -1.0;
        auto rng = make_rng(79);
        int hits = 0;
        for (int i = 0; i < 1000; ++i) {
            Approach p = propose_next_approach(agent, value_of, rng);
            if (p.coords == std::vector<double>{0.5, 0.5}) ++hits;
        }
        CHECK(hits == 0);
    }
    SUBCASE("all proposals stay inside the hypercube over 10k seeded draws") {
        auto rng = make_rng(80);
        std::uniform_real_distribution<double> stance(-1.0, 1.0);
        for (int i = 0; i < 10000; ++i) {
            agent.persona.stance_scope = stance(rng);
            agent.persona.stance_ideas = stance(rng);
            Approach p = propose_next_approach(agent, value_of, rng);
            for (double c : p.coords) {
                REQUIRE(c >= 0.0);
                REQUIRE(c <= 1.0);
            }
        }
    }
}

TEST_CASE("belief anchor picks the observation with the best current value") {
    Belief b;
    b.bandwidth = 0.1;
    CHECK(!belief_anchor(b, [](const Approach&) { return 1.0; }).has_value());
    b.observations.push_back({ap({0.1, 0.1}), 0.9, 0});
    b.observations.push_back({ap({0.9, 0.9}), 0.5, 0});
    // the recorded values favor the first point, but the live valuation
    // (e.g. perceived significance after publication) can invert that
    auto anchored = belief_anchor(b, [](const Approach& x) { return x.coords[0]; });
    REQUIRE(anchored.has_value());
    CHECK(anchored->coords == std::vector<double>{0.9, 0.9});
}

TEST_CASE("expertise re-centering over accepted work") {
    AgentState agent = init_population(1, 2, 2)[0];
    Approach before = agent.expertise.center;
    SUBCASE("no accepted entries leaves expertise unchanged") {
        agent.private_memory.push_back({0, ap({0.9, 0.9}), 0.5, false, std::nullopt});
        update_expertise(agent);
        CHECK(agent.expertise.center.coords == before.coords);
    }
    SUBCASE("one accepted entry moves the center exactly there") {
        agent.private_memory.push_back({0, ap({0.9, 0.1}), 0.5, true, std::string("out_a")});
        update_expertise(agent);
        CHECK(agent.expertise.center.coords == std::vector<double>{0.9, 0.1});
        CHECK(agent.expertise.topic_tags == topic_tags_for(agent.expertise.center));
    }
    SUBCASE("three accepted entries average coordinate-wise") {
        agent.private_memory.push_back({0, ap({0.0, 0.3}), 0.5, true, std::string("out_a")});
        agent.private_memory.push_back({1, ap({0.6, 0.6}), 0.5, true, std::string("out_b")});
        agent.private_memory.push_back({2, ap({0.3, 0.9}), 0.5, true, std::string("out_c")});
        update_expertise(agent);
        CHECK(agent.expertise.center.coords[0] == doctest::Approx(0.3).epsilon(1e-12));
        CHECK(agent.expertise.center.coords[1] == doctest::Approx(0.6).epsilon(1e-12));
    }
    SUBCASE("window of 5 ignores older accepted entries") {
        for (int i = 0; i < 7; ++i) {
            double c = i < 2 ? 0.0 : 1.0;
            agent.private_memory.push_back(
                {i, ap({c, c}), 0.5, true, std::string("out_") + std::to_string(i)});
        }
        update_expertise(agent, 5);
        CHECK(agent.expertise.center.coords == std::vector<double>{1.0, 1.0});
    }
}

TEST_CASE("private memory queries match a brute-force nearest scan") {
    AgentState agent = init_population(1, 2, 6)[0];
    SUBCASE("empty memory yields empty result") {
        CHECK(query_private_memory(agent, ap({0.5, 0.5}), 3).empty());
    }
    std::mt19937_64 rng(44);
    for (int i = 0; i < 10; ++i) {
        agent.private_memory.push_back(
            {i, random_point(2, rng), 0.5, false, std::string("out_") + std::to_string(i)});
    }
    SUBCASE("k larger than memory returns everything sorted by distance") {
        Approach q = ap({0.5, 0.5});
        auto got = query_private_memory(agent, q, 50);
        REQUIRE(got.size() == 10);
        for (std::size_t i = 1; i < got.size(); ++i) {
            CHECK(squared_distance(got[i - 1].approach, q) <=
                  squared_distance(got[i].approach, q) + 1e-15);
        }
    }
    SUBCASE("k=3 equals the exhaustive scan") {
        for (int trial = 0; trial < 20; ++trial) {
            Approach q = random_point(2, rng);
            auto got = query_private_memory(agent, q, 3);
            auto all = agent.private_memory;
            std::stable_sort(all.begin(), all.end(),
                             [&](const MemoryEntry& a, const MemoryEntry& b) {
                                 double da = squared_distance(a.approach, q);
                                 double db = squared_distance(b.approach, q);
                                 if (da != db) return da < db;
                                 if (a.round != b.round) return a.round < b.round;
                                 return a.output_id.value_or("") < b.output_id.value_or("");
                             });
            REQUIRE(got.size() == 3);
            for (int i = 0; i < 3; ++i) CHECK(got[i].output_id == all[i].output_id);
        }
    }
}

TEST_CASE("agent JSON round trip is lossless") {
    AgentState agent = init_population(1, 3, 10)[0];
    update_belief(agent, {ap({0.1, 0.2, 0.3}), 0.77, 2});
    agent.private_memory.push_back({2, ap({0.1, 0.2, 0.3}), 0.77, true, std::string("out_x")});
    agent.reputation.citation_count = 4;
    agent.reputation.num_accepted_papers = 2;
    AgentState back = agent_from_json(agent_to_json(agent));
    CHECK(back.agent_id == agent.agent_id);
    CHECK(back.persona.stance_scope == agent.persona.stance_scope);
    CHECK(back.expertise.center.coords == agent.expertise.center.coords);
    CHECK(back.expertise.topic_tags == agent.expertise.topic_tags);
    REQUIRE(back.belief.observations.size() == 1);
    CHECK(back.belief.observations[0].value == 0.77);
    REQUIRE(back.private_memory.size() == 1);
    CHECK(back.private_memory[0].output_id == std::string("out_x"));
    CHECK(back.reputation.citation_count == 4);
}

TEST_CASE("topic tags bucket coordinates into ten bins") {
    auto tags = topic_tags_for(ap({0.0, 0.95, 1.0}));
    REQUIRE(tags.size() == 3);
    CHECK(tags[0] == "x0:b0");
    CHECK(tags[1] == "x1:b9");
    CHECK(tags[2] == "x2:b9");
}
