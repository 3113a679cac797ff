#include "ascollab/runtime.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <numeric>
#include <set>
#include <sstream>

#include "ascollab/agents.hpp"
#include "ascollab/errors.hpp"
#include "ascollab/network.hpp"
#include "ascollab/util.hpp"

namespace ascollab {

void validate_config(const ExperimentConfig& c) {
    if (c.n_agents <= c.reviewers_per_paper) {
        throw ConfigError("n_agents must exceed reviewers_per_paper");
    }
    if (c.reviewers_per_paper < 1) throw ConfigError("reviewers_per_paper must be >= 1");
    if (c.tournament_size < 2) throw ConfigError("tournament_size must be >= 2");
    if (c.rounds < 1) throw ConfigError("rounds must be >= 1");
    if (c.max_steps < 1) throw ConfigError("max_steps must be >= 1");
    if (c.landscape.dim < 1 || c.landscape.dim > kEmbeddingDim) {
        throw ConfigError("landscape dim must lie in [1, embedding width]");
    }
    if (c.landscape.n_peaks < 1) throw ConfigError("landscape must have at least one peak");
    if (c.mode != "networked" && c.mode != "independent") {
        throw ConfigError("mode must be 'networked' or 'independent'");
    }
    if (c.backend.kind != "simulation" && c.backend.kind != "external") {
        throw ConfigError("backend kind must be 'simulation' or 'external'");
    }
    if (c.backend.kind == "external" && c.backend.endpoint.empty()) {
        throw ConfigError("external backend requires an endpoint");
    }
    if (!(c.sigma_meas >= 0.0)) throw ConfigError("sigma_meas must be >= 0");
    if (c.expertise_cadence < 1) throw ConfigError("expertise_cadence must be >= 1");
    if (c.citation_count < 0) throw ConfigError("citation_count must be >= 0");
    validate_perception_params(c.perception);
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
    return {{"schema", "config/v1"},
            {"n_agents", c.n_agents},
            {"rounds", c.rounds},
            {"max_steps", c.max_steps},
            {"reviewers_per_paper", c.reviewers_per_paper},
            {"tournament_size", c.tournament_size},
            {"landscape",
             {{"dim", c.landscape.dim}, {"n_peaks", c.landscape.n_peaks},
              {"seed", c.landscape.seed}}},
            {"perception",
             {{"decay_alpha", c.perception.decay_alpha},
              {"kernel_bandwidth", c.perception.kernel_bandwidth}}},
            {"mode", c.mode},
            {"backend",
             {{"kind", c.backend.kind}, {"endpoint", c.backend.endpoint},
              {"timeout_seconds", c.backend.timeout_seconds}}},
            {"seed", c.seed},
            {"sigma_meas", c.sigma_meas},
            {"expertise_cadence", c.expertise_cadence},
            {"citation_count", c.citation_count}};
}

ExperimentConfig config_from_json(const nlohmann::json& doc) {
    ExperimentConfig c;
    c.n_agents = doc.value("n_agents", c.n_agents);
    c.rounds = doc.value("rounds", c.rounds);
    c.max_steps = doc.value("max_steps", c.max_steps);
    c.reviewers_per_paper = doc.value("reviewers_per_paper", c.reviewers_per_paper);
    c.tournament_size = doc.value("tournament_size", c.tournament_size);
    if (doc.contains("landscape")) {
        const auto& l = doc.at("landscape");
        c.landscape.dim = l.value("dim", c.landscape.dim);
        c.landscape.n_peaks = l.value("n_peaks", c.landscape.n_peaks);
        c.landscape.seed = l.value("seed", c.landscape.seed);
    }
    if (doc.contains("perception")) {
        const auto& p = doc.at("perception");
        c.perception.decay_alpha = p.value("decay_alpha", c.perception.decay_alpha);
        c.perception.kernel_bandwidth = p.value("kernel_bandwidth", c.perception.kernel_bandwidth);
    }
    c.mode = doc.value("mode", c.mode);
    if (doc.contains("backend")) {
        const auto& b = doc.at("backend");
        c.backend.kind = b.value("kind", c.backend.kind);
        c.backend.endpoint = b.value("endpoint", c.backend.endpoint);
        c.backend.timeout_seconds = b.value("timeout_seconds", c.backend.timeout_seconds);
    }
    c.seed = doc.value("seed", c.seed);
    c.sigma_meas = doc.value("sigma_meas", c.sigma_meas);
    c.expertise_cadence = doc.value("expertise_cadence", c.expertise_cadence);
    c.citation_count = doc.value("citation_count", c.citation_count);
    validate_config(c);
    return c;
}

void RunLog::append(nlohmann::json line) { lines_.push_back(std::move(line)); }

std::string RunLog::compute_digest() const {
    Sha256Stream stream;
    for (const auto& line : lines_) {
        if (line.value("schema", "") == "digest/v1") continue;
        stream.update(line.dump());
        stream.update("\n");
    }
    return stream.hex_digest();
}

void RunLog::finalize() {
    digest_ = compute_digest();
    lines_.push_back({{"schema", "digest/v1"}, {"sha256", digest_}});
}

void RunLog::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open log for writing: " + path);
    for (const auto& line : lines_) out << line.dump() << "\n";
}

RunLog RunLog::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NotFoundError("cannot open log: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_text(buffer.str());
}

RunLog RunLog::from_text(const std::string& text) {
    RunLog log;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        if (j.value("schema", "") == "digest/v1") {
            log.digest_ = j.at("sha256").get<std::string>();
        }
        log.lines_.push_back(std::move(j));
    }
    if (log.digest_.empty()) throw IntegrityError("log has no digest line: truncated?");
    if (log.compute_digest() != log.digest_) {
        throw IntegrityError("log digest mismatch: corrupted or truncated");
    }
    return log;
}

namespace {

std::string behavior_string(const Persona& p) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "ideas=%.3f;collaboration=%.3f;scope=%.3f;evaluation=%.3f;literature=%.3f;"
                  "resources=%.3f",
                  p.stance_ideas, p.stance_collaboration, p.stance_scope, p.stance_evaluation,
                  p.stance_literature, p.stance_resources);
    return buf;
}

std::string expertise_string(const Expertise& e) {
    std::ostringstream os;
    os << "specialized around (";
    for (std::size_t i = 0; i < e.center.coords.size(); ++i) {
        if (i) os << ", ";
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3f", e.center.coords[i]);
        os << buf;
    }
    os << ") radius " << e.radius;
    return os.str();
}

AgentProfile profile_for(const AgentState& a) {
    AgentProfile p;
    p.agent_id = a.agent_id;
    p.behavior = behavior_string(a.persona);
    p.expertise = expertise_string(a.expertise);
    p.expertise_topics = a.expertise.topic_tags;
    p.citation_count = a.reputation.citation_count;
    p.num_accepted_papers = a.reputation.num_accepted_papers;
    return p;
}

nlohmann::json profile_line(const AgentProfile& p, int round,
                            const std::vector<double>& center) {
    nlohmann::json line = profile_to_json(p);
    line["round"] = round;
    line["embedding_coords"] = center;
    return line;
}

std::string payload_digest(const nlohmann::json& payload) {
    return sha256_hex(payload.dump()).substr(0, 16);
}

struct SessionResult {
    ResearchOutput output;
    std::vector<ToolTraceLine> trace;
};

}  // namespace

std::vector<PaperRecord> apply_consequences(
    const std::vector<const ResearchOutput*>& accepted,
    const std::map<std::string, MetaReview>& metas, int round, const StoreView& view,
    Stores& stores, int* paper_seq) {
    std::vector<const ResearchOutput*> ordered = accepted;
    std::sort(ordered.begin(), ordered.end(),
              [](const ResearchOutput* a, const ResearchOutput* b) {
                  return a->output_id < b->output_id;
              });
    std::vector<PaperRecord> records;
    for (const ResearchOutput* out : ordered) {
        PaperRecord rec;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "paper_%04d", (*paper_seq)++);
        rec.paper_id = buf;
        rec.primary_agent_id = out->primary_agent_id;
        rec.collab_agent_ids = out->collab_agent_ids;
        rec.title = out->title;
        rec.abstract = out->abstract;
        rec.manuscript = out->report_text;
        rec.publication_t = round;
        for (const std::string& cited : out->citations) {
            const PaperRecord& target = view.paper(cited);
            rec.cited_paper_ids.push_back({target.paper_id, target.primary_agent_id,
                                           target.title});
        }
        if (!out->code_log.empty()) rec.code_script = out->code_log;
        auto mit = metas.find(out->output_id);
        if (mit != metas.end()) {
            MetaReview m = mit->second;
            m.paper_id = rec.paper_id;
            rec.metareview = m;
        }
        rec.status = "accepted";
        stores.archive_insert(rec, pad_embedding(out->approach.coords),
                              {out->approach, out->claimed_value});
        records.push_back(std::move(rec));
    }
    stores.propagate_citations(records);
    return records;
}

namespace {

RunLog run_loop(const ExperimentConfig& config, Backend* backend_arg, bool parallel) {
    validate_config(config);
    SimulationBackend sim_backend;
    std::unique_ptr<ExternalBackend> ext_backend;
    Backend* backend = backend_arg;
    if (!backend) {
        if (config.backend.kind == "external") {
            ext_backend = std::make_unique<ExternalBackend>(config.backend.endpoint,
                                                            config.backend.timeout_seconds);
            backend = ext_backend.get();
        } else {
            backend = &sim_backend;
        }
    }
    const bool networked = config.mode == "networked";

    Landscape landscape = generate_landscape(config.landscape.dim, config.landscape.n_peaks,
                                             config.landscape.seed);
    std::vector<AgentState> agents =
        init_population(config.n_agents, config.landscape.dim, config.seed);

    Stores stores;
    RunLog log;
    log.append(config_to_json(config));
    log.append(landscape_to_json(landscape));
    for (const AgentState& a : agents) {
        AgentProfile p = profile_for(a);
        stores.register_agent(p, pad_embedding(a.expertise.center.coords));
        log.append(profile_line(p, -1, a.expertise.center.coords));
    }

    std::vector<Approach> global_history;
    std::map<std::string, std::vector<Approach>> own_history;
    AttentionGraph attention;
    int paper_seq = 0;

    for (int t = 0; t < config.rounds; ++t) {
        StoreView view = stores.snapshot(t);
        log.append({{"schema", "barrier/v1"}, {"round", t}, {"store_digest", view.digest()}});
        const std::vector<AgentState> peer_snapshots = agents;

        // Research sessions: each owns its agent; everything else is
        // round-start state, so serial and pooled execution agree.
        std::vector<SessionResult> results(agents.size());
        auto run_one = [&](std::size_t i) {
            AgentState& agent = agents[i];
            SessionContext ctx;
            ctx.round = t;
            ctx.landscape = &landscape;
            ctx.perception = config.perception;
            ctx.visible_history = networked ? &global_history : &own_history[agent.agent_id];
            ctx.view = &view;
            ctx.peer_snapshots = &peer_snapshots;
            ctx.attention = &attention;
            ctx.networked = networked;
            ctx.sigma_meas = config.sigma_meas;
            ctx.citation_count = config.citation_count;
            ctx.backend = backend;
            ctx.stream_seed = derive_seed(config.seed, "session",
                                          static_cast<std::uint64_t>(t),
                                          static_cast<std::uint64_t>(i));
            SessionBudget budget{config.max_steps};
            results[i].output = run_session(agent, ctx, budget, &results[i].trace);
        };
        if (parallel) {
            std::vector<std::future<void>> futures;
            futures.reserve(agents.size());
            for (std::size_t i = 0; i < agents.size(); ++i) {
                futures.push_back(std::async(std::launch::async, run_one, i));
            }
            for (auto& f : futures) f.get();
        } else {
            for (std::size_t i = 0; i < agents.size(); ++i) run_one(i);
        }

        std::vector<ResearchOutput> outputs;
        outputs.reserve(results.size());
        for (std::size_t i = 0; i < results.size(); ++i) {
            for (const ToolTraceLine& line : results[i].trace) {
                log.append({{"schema", "trace/v1"},
                            {"round", t},
                            {"agent_id", agents[i].agent_id},
                            {"step", line.step},
                            {"tool", to_string(line.kind)},
                            {"payload_digest", payload_digest(line.payload)}});
            }
            const ResearchOutput& out = results[i].output;
            log.append({{"schema", "output/v1"},
                        {"round", t},
                        {"output_id", out.output_id},
                        {"agent_id", out.primary_agent_id},
                        {"collab_agent_ids", out.collab_agent_ids},
                        {"approach", out.approach.coords},
                        {"claimed_value", out.claimed_value},
                        {"citations", out.citations},
                        {"trace_len", out.tool_trace.size()}});
            outputs.push_back(out);
        }

        // Review stage against the round-start snapshot and history.
        std::map<std::string, std::vector<Review>> reviews_by_output;
        std::map<std::string, double> perceived_by_output;
        std::map<std::string, const ResearchOutput*> output_by_id;
        RoundEvents events;
        for (const ResearchOutput& out : outputs) {
            output_by_id[out.output_id] = &out;
            perceived_by_output[out.output_id] = perceived_significance(
                landscape, out.approach, global_history, config.perception);
            std::vector<std::string> panel =
                select_reviewers(out, view, config.reviewers_per_paper);
            for (const std::string& reviewer_id : panel) {
                auto it = std::find_if(agents.begin(), agents.end(), [&](const AgentState& a) {
                    return a.agent_id == reviewer_id;
                });
                if (it == agents.end()) throw IntegrityError("reviewer not in population");
                Review r = score_review(*it, out, landscape, global_history, config.perception,
                                        *backend);
                events.reviews.emplace_back(reviewer_id, out.primary_agent_id);
                log.append({{"schema", "review/v1"},
                            {"round", t},
                            {"output_id", r.output_id},
                            {"reviewer_id", r.reviewer_id},
                            {"support", r.support},
                            {"soundness", r.soundness},
                            {"significance", r.significance},
                            {"originality", r.originality},
                            {"overall", r.overall},
                            {"text", r.text}});
                reviews_by_output[out.output_id].push_back(std::move(r));
            }
        }

        auto cluster_rng = make_rng(derive_seed(config.seed, "cluster",
                                                static_cast<std::uint64_t>(t)));
        std::vector<Tournament> tournaments =
            cluster_submissions(outputs, config.tournament_size, view, cluster_rng);
        std::vector<EvaluationResult> evals;
        for (const Tournament& tour : tournaments) {
            std::vector<MetaReview> metas =
                meta_review(tour, reviews_by_output, perceived_by_output, *backend);
            for (MetaReview& m : metas) {
                EvaluationResult er;
                er.output_id = m.paper_id;
                er.reviews = reviews_by_output.at(m.paper_id);
                er.combined_score = m.overall_score;
                er.meta = std::move(m);
                evals.push_back(std::move(er));
            }
            log.append({{"schema", "tournament/v1"},
                        {"round", t},
                        {"tournament_id", tour.tournament_id},
                        {"member_output_ids", tour.member_output_ids},
                        {"reference_paper_ids", tour.reference_paper_ids}});
        }
        std::sort(evals.begin(), evals.end(),
                  [](const EvaluationResult& a, const EvaluationResult& b) {
                      return a.output_id < b.output_id;
                  });
        std::vector<std::string> accepted_ids =
            accept_round(evals, config.n_agents, config.reviewers_per_paper);
        std::set<std::string> accepted_set(accepted_ids.begin(), accepted_ids.end());
        for (const EvaluationResult& er : evals) {
            log.append({{"schema", "metareview/v1"},
                        {"round", t},
                        {"output_id", er.output_id},
                        {"overall_score", er.meta.overall_score},
                        {"rank", er.meta.rank},
                        {"meta_review_text", er.meta.meta_review_text},
                        {"justification", er.meta.justification},
                        {"decision", er.meta.decision}});
        }

        // Consequences: archive inserts, citation propagation, reputation.
        std::vector<const ResearchOutput*> accepted_outputs;
        std::map<std::string, MetaReview> metas_by_output;
        for (const EvaluationResult& er : evals) {
            if (er.accepted) {
                accepted_outputs.push_back(output_by_id.at(er.output_id));
                metas_by_output[er.output_id] = er.meta;
            }
        }
        std::sort(accepted_outputs.begin(), accepted_outputs.end(),
                  [](const ResearchOutput* a, const ResearchOutput* b) {
                      return a->output_id < b->output_id;
                  });
        std::vector<PaperRecord> new_records =
            apply_consequences(accepted_outputs, metas_by_output, t, view, stores, &paper_seq);
        // apply_consequences preserves output-id order, so records and
        // accepted_outputs align index-for-index.
        for (std::size_t r = 0; r < new_records.size(); ++r) {
            const PaperRecord& rec = new_records[r];
            const ResearchOutput* out = accepted_outputs[r];
            nlohmann::json line = paper_to_json(rec);
            line["round"] = t;
            line["approach"] = out->approach.coords;
            line["claimed_value"] = out->claimed_value;
            log.append(std::move(line));
            for (const CitedRef& ref : rec.cited_paper_ids) {
                events.citations.emplace_back(rec.primary_agent_id,
                                              view.paper(ref.paper_id).primary_agent_id);
            }
        }
        for (const ResearchOutput* out : accepted_outputs) {
            global_history.push_back(out->approach);
            own_history[out->primary_agent_id].push_back(out->approach);
            for (const std::string& collab : out->collab_agent_ids) {
                own_history[collab].push_back(out->approach);
                events.collaborations.emplace_back(out->primary_agent_id, collab);
            }
        }
        // Collaboration attention also accrues on rejected outputs.
        for (const ResearchOutput& out : outputs) {
            if (!accepted_set.count(out.output_id)) {
                for (const std::string& collab : out.collab_agent_ids) {
                    events.collaborations.emplace_back(out.primary_agent_id, collab);
                }
            }
        }
        for (AgentState& agent : agents) {
            const AgentProfile& p = stores.profile(agent.agent_id);
            agent.reputation.citation_count = p.citation_count;
            agent.reputation.num_accepted_papers = p.num_accepted_papers;
            for (MemoryEntry& entry : agent.private_memory) {
                if (entry.output_id && accepted_set.count(*entry.output_id)) {
                    entry.accepted = true;
                }
            }
        }

        attention = update_attention(attention, events);
        log.append(attention_to_json(attention));

        if ((t + 1) % config.expertise_cadence == 0) {
            for (AgentState& agent : agents) {
                update_expertise(agent);
                AgentProfile p = profile_for(agent);
                stores.update_profile(p, pad_embedding(agent.expertise.center.coords));
                log.append(profile_line(p, t, agent.expertise.center.coords));
            }
        }
        log.append({{"schema", "acceptance/v1"}, {"round", t}, {"accepted", accepted_ids}});
    }
    log.append({{"schema", "barrier/v1"},
                {"round", config.rounds},
                {"store_digest", stores.snapshot(config.rounds).digest()}});
    log.finalize();
    return log;
}

}  // namespace

RunLog run_experiment(const ExperimentConfig& config, Backend* backend, bool parallel) {
    return run_loop(config, backend, parallel);
}

RunLog run_ablation_independent(const ExperimentConfig& config, Backend* backend,
                                bool parallel) {
    if (config.mode != "independent") {
        throw ConfigError("ablation requires mode 'independent'");
    }
    return run_loop(config, backend, parallel);
}

StoreView replay(const RunLog& log, int round) {
    int max_round = -1;
    for (const auto& line : log.lines()) {
        if (line.value("schema", "") == "barrier/v1") {
            max_round = std::max(max_round, line.at("round").get<int>());
        }
    }
    if (round < 0 || round > max_round) {
        throw NotFoundError("round not present in log: " + std::to_string(round));
    }
    Stores stores;
    std::map<int, std::vector<PaperRecord>> papers_by_round;
    std::map<int, std::vector<std::pair<Approach, double>>> coords_by_round;
    std::map<int, std::vector<nlohmann::json>> profiles_by_round;
    for (const auto& line : log.lines()) {
        const std::string schema = line.value("schema", "");
        if (schema == "profile/v1") {
            profiles_by_round[line.at("round").get<int>()].push_back(line);
        } else if (schema == "paper/v1") {
            int t = line.at("round").get<int>();
            papers_by_round[t].push_back(paper_from_json(line));
            Approach x;
            x.coords = line.at("approach").get<std::vector<double>>();
            coords_by_round[t].emplace_back(std::move(x),
                                            line.at("claimed_value").get<double>());
        }
    }
    for (const auto& line : profiles_by_round[-1]) {
        stores.register_agent(profile_from_json(line),
                              pad_embedding(line.at("embedding_coords")
                                                .get<std::vector<double>>()));
    }
    for (int t = 0; t < round; ++t) {
        auto pit = papers_by_round.find(t);
        if (pit != papers_by_round.end()) {
            std::vector<PaperRecord> inserted;
            for (std::size_t i = 0; i < pit->second.size(); ++i) {
                PaperRecord rec = pit->second[i];
                // citation_count accrues later; insert the record as-new
                rec.citation_count = 0;
                const auto& [x, value] = coords_by_round[t][i];
                stores.archive_insert(rec, pad_embedding(x.coords), {x, value});
                inserted.push_back(std::move(rec));
            }
            stores.propagate_citations(inserted);
        }
        for (const auto& line : profiles_by_round[t]) {
            stores.update_profile(profile_from_json(line),
                                  pad_embedding(line.at("embedding_coords")
                                                    .get<std::vector<double>>()));
        }
    }
    return stores.snapshot(round);
}

namespace {

double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace

nlohmann::json analyze(const RunLog& log) {
    if (log.digest().empty() || log.compute_digest() != log.digest()) {
        throw IntegrityError("log is incomplete or corrupted");
    }
    ExperimentConfig config;
    Landscape landscape;
    bool have_config = false, have_landscape = false;
    struct AcceptedPaper {
        int round;
        std::string paper_id;
        std::vector<double> approach;
    };
    std::vector<AcceptedPaper> accepted;
    struct OutputLine {
        int round;
        std::string output_id;
        std::string agent_id;
        std::vector<double> approach;
    };
    std::vector<OutputLine> outputs;
    std::map<std::string, double> meta_score;
    std::map<std::string, std::map<std::string, int>> tool_usage;       // agent -> tool -> n
    std::map<std::string, std::map<int, int>> session_lengths;          // agent -> round -> n
    std::vector<AttentionGraph> graphs;
    for (const auto& line : log.lines()) {
        const std::string schema = line.value("schema", "");
        if (schema == "config/v1") {
            config = config_from_json(line);
            have_config = true;
        } else if (schema == "landscape/v1") {
            landscape = landscape_from_json(line);
            have_landscape = true;
        } else if (schema == "paper/v1") {
            accepted.push_back({line.at("round").get<int>(),
                                line.at("paper_id").get<std::string>(),
                                line.at("approach").get<std::vector<double>>()});
        } else if (schema == "output/v1") {
            outputs.push_back({line.at("round").get<int>(),
                               line.at("output_id").get<std::string>(),
                               line.at("agent_id").get<std::string>(),
                               line.at("approach").get<std::vector<double>>()});
        } else if (schema == "metareview/v1") {
            meta_score[line.at("output_id").get<std::string>()] =
                line.at("overall_score").get<double>();
        } else if (schema == "trace/v1") {
            const std::string agent = line.at("agent_id").get<std::string>();
            tool_usage[agent][line.at("tool").get<std::string>()] += 1;
            session_lengths[agent][line.at("round").get<int>()] += 1;
        } else if (schema == "network/v1") {
            graphs.push_back(attention_from_json(line));
        }
    }
    if (!have_config || !have_landscape) throw IntegrityError("log missing header lines");
    std::sort(accepted.begin(), accepted.end(), [](const AcceptedPaper& a, const AcceptedPaper& b) {
        if (a.round != b.round) return a.round < b.round;
        return a.paper_id < b.paper_id;
    });

    // (a) duplication rate
    int duplicates = 0;
    for (std::size_t i = 0; i < accepted.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (euclidean(accepted[i].approach, accepted[j].approach) <= 0.05) {
                ++duplicates;
                break;
            }
        }
    }
    const double duplication_rate =
        accepted.empty() ? 0.0 : static_cast<double>(duplicates) / accepted.size();

    // (b) coverage over a 20-per-axis projection of the first two dims
    const int proj_dims = std::min(landscape.dim, 2);
    std::set<std::vector<int>> cells;
    for (const AcceptedPaper& p : accepted) {
        std::vector<int> cell;
        for (int d = 0; d < proj_dims; ++d) {
            cell.push_back(std::min(19, static_cast<int>(p.approach[static_cast<std::size_t>(d)] *
                                                         20.0)));
        }
        cells.insert(cell);
    }
    double total_cells = std::pow(20.0, proj_dims);
    const double coverage = static_cast<double>(cells.size()) / total_cells;

    // (c) cumulative true significance per round
    std::vector<double> cumulative(static_cast<std::size_t>(config.rounds), 0.0);
    {
        double running = 0.0;
        std::size_t idx = 0;
        for (int t = 0; t < config.rounds; ++t) {
            while (idx < accepted.size() && accepted[idx].round <= t) {
                Approach x;
                x.coords = accepted[idx].approach;
                running += true_significance(landscape, x);
                ++idx;
            }
            cumulative[static_cast<std::size_t>(t)] = running;
        }
    }

    // (d) novelty-quality frontier for the top-25 outputs by meta score
    std::vector<const OutputLine*> ranked;
    for (const OutputLine& o : outputs) {
        if (meta_score.count(o.output_id)) ranked.push_back(&o);
    }
    std::sort(ranked.begin(), ranked.end(), [&](const OutputLine* a, const OutputLine* b) {
        double sa = meta_score.at(a->output_id), sb = meta_score.at(b->output_id);
        if (sa != sb) return sa > sb;
        return a->output_id < b->output_id;
    });
    if (ranked.size() > 25) ranked.resize(25);
    nlohmann::json frontier = nlohmann::json::array();
    for (const OutputLine* o : ranked) {
        std::vector<Approach> history_before;
        for (const AcceptedPaper& p : accepted) {
            if (p.round < o->round) {
                Approach x;
                x.coords = p.approach;
                history_before.push_back(std::move(x));
            }
        }
        Approach x;
        x.coords = o->approach;
        frontier.push_back({{"output_id", o->output_id},
                            {"meta_score", meta_score.at(o->output_id)},
                            {"novelty", novelty_of(x, history_before, config.perception)},
                            {"true_significance", true_significance(landscape, x)}});
    }

    // (e) per-agent tool usage and session-length histograms
    nlohmann::json usage = nlohmann::json::object();
    for (const auto& [agent, tools] : tool_usage) {
        nlohmann::json lengths = nlohmann::json::array();
        for (const auto& [round, n] : session_lengths[agent]) lengths.push_back(n);
        usage[agent] = {{"tools", tools}, {"session_lengths", lengths}};
    }

    // (f) network metrics per round
    nlohmann::json net = nlohmann::json::array();
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        GraphMetrics m = graph_metrics(graphs[i], i > 0 ? &graphs[i - 1] : nullptr);
        double max_w_out = 0.0;
        for (const auto& [id, w] : m.weighted_out_degree) max_w_out = std::max(max_w_out, w);
        nlohmann::json strongest = nlohmann::json::array();
        for (const auto& [pair, w] : m.strongest_pairs) {
            strongest.push_back({{"a", pair.first}, {"b", pair.second}, {"weight", w}});
        }
        net.push_back({{"round", graphs[i].round},
                       {"edges", graphs[i].weights.size()},
                       {"edge_churn", m.edge_churn},
                       {"max_weighted_out_degree", max_w_out},
                       {"strongest_pairs", strongest}});
    }

    // (g) per-agent approach trajectories
    nlohmann::json trajectories = nlohmann::json::object();
    for (const OutputLine& o : outputs) {
        trajectories[o.agent_id].push_back({{"round", o.round}, {"approach", o.approach}});
    }

    return {{"schema", "analysis/v1"},
            {"duplication_rate", duplication_rate},
            {"duplication_radius", 0.05},
            {"coverage", coverage},
            {"n_outputs", outputs.size()},
            {"n_accepted", accepted.size()},
            {"cumulative_true_significance", cumulative},
            {"novelty_quality_frontier", frontier},
            {"agent_activity", usage},
            {"network_metrics", net},
            {"trajectories", trajectories}};
}

}  // namespace ascollab
