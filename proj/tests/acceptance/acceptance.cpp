#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <csignal>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "../kleene_oracle.hpp"
#include "../service_harness.hpp"
#include "../test_support.hpp"
#include "../tree_oracle.hpp"
#include "normcase/cli/commands.hpp"
#include "normcase/dsl/parser.hpp"
#include "normcase/simulation/simulation.hpp"

using namespace normcase;
using normcase::testing::ApiClient;
using normcase::testing::fixture_answers;
using normcase::testing::HttpServer;
using normcase::testing::ServiceFixture;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

struct Failed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw Failed(what);
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt_seconds(double s) {
    std::ostringstream out;
    out.precision(3);
    out << std::fixed << s << " s";
    return out.str();
}

std::vector<std::string> allowed_acts(const json& actions) {
    std::vector<std::string> out;
    for (const auto& a : actions.at("vervolg"))
        if (a.at("status") == "toegestaan") out.push_back(a.at("naam"));
    return out;
}

// ---------------------------------------------------------------- criteria

std::string kleene_oracle() {
    auto start = Clock::now();
    engine::Engine engine(*dsl::parse_spec({"fact p0\nfact p1\nfact p2\nfact p3\n", "oracle"}).spec);
    auto exprs = normcase::testing::enumerate_expressions(4, 3);
    require(exprs.size() == 25207, "expected 25207 expressions, got " + std::to_string(exprs.size()));
    auto assignments = normcase::testing::all_assignments(4);
    require(assignments.size() == 81, "expected 81 assignments");
    std::vector<engine::NormState> states;
    for (const auto& a : assignments) {
        std::vector<engine::Assignment> as;
        for (int i = 0; i < 4; ++i)
            if (a[static_cast<std::size_t>(i)] != 1)
                as.emplace_back(dsl::FactRef{"p" + std::to_string(i), {}}, Scalar(a[static_cast<std::size_t>(i)] == 2));
        states.push_back(engine.init_state(as, Date(2024, 1, 1)));
    }
    std::size_t checks = 0;
    for (const auto& oe : exprs) {
        auto e = dsl::parse_expr(oe->text(), engine.spec());
        require(e.has_value(), "unparsable oracle expression " + oe->text());
        for (std::size_t k = 0; k < states.size(); ++k, ++checks)
            require(engine.eval(states[k], *e) == normcase::testing::to_truth(oe->eval(assignments[k])),
                    "mismatch on " + oe->text());
    }
    double t = seconds_since(start);
    require(t < 5.0, "took " + fmt_seconds(t));
    return std::to_string(exprs.size()) + " expressions x 81 assignments = " + std::to_string(checks) +
           " evaluations, 0 mismatches, " + fmt_seconds(t);
}

std::string monotonicity() {
    std::mt19937 rng(20240301);
    std::size_t pairs = 0, refinements = 0;
    while (pairs < 1000) {
        engine::Engine engine(normcase::testing::random_spec(rng));
        auto s = engine.init_state(normcase::testing::random_assignments(engine.spec(), rng), Date(2024, 1, 1));
        ++pairs;
        for (const auto& f : engine.spec().facts) {
            dsl::FactRef ref{f.name, {}};
            if (s.value_of(ref)) continue;
            auto refined = engine.assign_fact(s, ref, normcase::testing::random_value(f, rng));
            ++refinements;
            for (const auto& act : engine.spec().acts) {
                auto before = engine.action_status(s, act).status;
                auto after = engine.action_status(refined, act).status;
                require(before == engine::Status::Indefinite || before == after,
                        "flip on '" + dsl::print_expr(act.condition) + "' after resolving " + f.name);
            }
        }
    }
    return std::to_string(pairs) + " (spec, state) pairs, " + std::to_string(refinements) +
           " single-fact refinements, 0 counterexamples";
}

struct ApiSession {
    ServiceFixture fixture;
    std::unique_ptr<HttpServer> server;
    std::unique_ptr<ApiClient> api;

    ApiSession() {
        fixture.service->seed_if_empty();
        server = std::make_unique<HttpServer>(*fixture.service);
        api = std::make_unique<ApiClient>(server->port());
        auto r = api->post("/api/register", {{"name", "medewerker"}, {"secret", "proef-wachtwoord"}});
        require(r.status == 201, "register failed: " + r.raw);
        api->set_token(r.body.at("token"));
    }

    json create(const std::string& name, const json& answers, const json& extra = json::object()) {
        json body{{"clientName", name}, {"clientKind", "civilian"}, {"answers", answers}};
        body.update(extra);
        auto r = api->post("/api/cases", body);
        require(r.status == 201, "create failed: " + r.raw);
        return r.body;
    }

    json actions(const std::string& id) {
        auto r = api->get("/api/cases/" + id + "/actions");
        require(r.status == 200, "actions failed: " + r.raw);
        return r.body;
    }
};

std::string goal1() {
    ApiSession s;
    auto start = Clock::now();
    auto c = s.create("Appendix B", fixture_answers("usertest-goal1"));
    auto allowed = allowed_acts(s.actions(c.at("id")));
    require(allowed == std::vector<std::string>{"grant-iit-single-parent"},
            "allowed acts: " + json(allowed).dump());
    auto unknown = fixture_answers("usertest-goal1");
    unknown["registered-in-municipality"] = nullptr;
    auto c2 = s.create("Appendix B onbekend", unknown);
    auto allowed2 = allowed_acts(s.actions(c2.at("id")));
    require(allowed2.empty(), "registration unknown still allows " + json(allowed2).dump());
    double t = seconds_since(start);
    require(t < 1.0, "took " + fmt_seconds(t));
    return "income 1000 / wealth 4000 -> only grant-iit-single-parent; registration unknown -> 0 allowed; " +
           fmt_seconds(t);
}

std::string goal2() {
    ApiSession s;
    auto list = s.api->get("/api/cases?q=UserTest1");
    require(list.status == 200 && list.body.at("total") == 1, "seeded usertest1 case missing");
    auto c = s.api->get("/api/cases/" + list.body["items"][0]["id"].get<std::string>()).body;
    const auto& violations = c.at("violationDetails");
    require(violations.size() == 1, "expected one violation, got " + std::to_string(violations.size()));
    auto explanation = violations[0].at("explanation").get<std::string>();
    require(!explanation.empty(), "empty explanation");
    require(explanation.find("income <= income-threshold-single") != std::string::npos,
            "failing clause not listed: " + explanation);
    require(!violations[0].at("sources").empty(), "no sources on violation");
    require(explanation.find("Participatiewet") != std::string::npos, "sources not listed in explanation");
    auto marker = s.actions(c.at("id")).at("afgerond").at(0);
    require(marker.contains("violation"), "completed action lacks violation marker");
    return "usertest1 has 1 violation naming `income <= income-threshold-single` and " +
           std::to_string(violations[0]["sources"].size()) + " sources";
}

std::string goal3() {
    ApiSession s;
    auto c = s.create("Doel 3", fixture_answers("usertest-goal1"));
    const std::string id = c.at("id");
    auto before = s.actions(id).at("vervolg");
    auto r = s.api->patch("/api/cases/" + id, {{"answers", {{"child-at-home", false}}}});
    require(r.status == 200, "patch failed: " + r.raw);
    auto after = r.body.at("actions").at("vervolg");
    require(allowed_acts(json{{"vervolg", before}}) == std::vector<std::string>{"grant-iit-single-parent"},
            "unexpected allowed set before edit");
    require(allowed_acts(json{{"vervolg", after}}) == std::vector<std::string>{"grant-iit-single"},
            "allowed after edit: " + json(allowed_acts(json{{"vervolg", after}})).dump());
    require(before.size() == after.size(), "vervolg length changed");
    std::size_t unchanged = 0;
    for (std::size_t i = 0; i < before.size(); ++i) {
        const std::string name = before[i].at("naam");
        require(after[i].at("naam") == name, "vervolg order changed");
        if (name == "grant-iit-single" || name == "grant-iit-single-parent") continue;
        require(before[i] == after[i], "entry " + name + " changed");
        ++unchanged;
    }
    return "grant-iit-single-parent -> grant-iit-single; other " + std::to_string(unchanged) +
           " vervolg entries identical";
}

std::string goal4() {
    ApiSession s;
    const Date today = s.fixture.clock->today();
    std::map<long, std::string> ids;
    for (long days : {60L, 14L, 5L})
        ids[days] = s.create("Termijn " + std::to_string(days), fixture_answers("usertest-goal1"),
                             {{"decisionTerm", today.plus_days(days).str()}})
                        .at("id");
    auto list = s.api->get("/api/cases?sort=termijn&order=asc");
    require(list.status == 200, "list failed");
    const auto& items = list.body.at("items");
    require(items.at(0).at("id") == ids[5], "nearest-deadline case not first");
    std::map<std::string, std::string> clocks;
    for (const auto& it : items) clocks[it.at("id")] = it.at("urgency").at("clock");
    require(clocks[ids[5]] == "red" && clocks[ids[14]] == "yellow" && clocks[ids[60]] == "green",
            "clocks 5/14/60 = " + clocks[ids[5]] + "/" + clocks[ids[14]] + "/" + clocks[ids[60]]);
    std::string act = items.at(0).at("actie");
    auto exec = s.api->post("/api/cases/" + ids[5] + "/actions/" + act + "/execute", json::object());
    require(exec.status == 200, "execute failed: " + exec.raw);
    require(exec.body.at("violation").is_null(), "execution recorded a violation");
    require(exec.body.at("case").at("violations") == 0, "case carries violations");
    require(exec.body.at("case").at("status") == "Afgerond", "case not Afgerond after decision");
    return "termijn asc puts the 5-day case first; clocks red/yellow/green; executing " + act + " gave no violation";
}

std::map<std::string, normcase::testing::OraclePath> tree_paths(const simulation::ActionTree& tree) {
    std::vector<std::string> key(tree.nodes.size());
    std::map<std::string, normcase::testing::OraclePath> out;
    for (const auto& n : tree.nodes) {
        if (!n.parent) continue;
        key[n.id] = key[*n.parent].empty() ? n.act : key[*n.parent] + "/" + n.act;
        normcase::testing::OraclePath p;
        p.status = std::string(engine::to_string(n.status->status));
        p.motivation_required = n.motivation_required;
        p.expanded = n.expanded;
        p.digest = n.digest.value_or("");
        require(out.emplace(key[n.id], p).second, "duplicate path " + key[n.id]);
    }
    return out;
}

std::string simulation_oracle() {
    auto start = Clock::now();
    const auto& bundle = normcase::testing::bundled();
    engine::Engine engine(bundle.spec);
    const DateTime at = DateTime::start_of(Date(2024, 3, 1));
    std::size_t nodes = 0;
    for (const auto& fixture : bundle.fixtures) {
        simulation::Scenario s;
        s.id = "acceptance";
        auto assignments = bundle.case_assignments(fixture.answers);
        assignments.emplace_back(dsl::FactRef{"decision-term", {}}, Scalar(Date(2024, 4, 26)));
        s.base_state = engine.impose_duty(engine.init_state(assignments, at.date()), bundle.decision_duty);
        s.rules = simulation::seed_rule_groups(bundle.spec, at);
        for (int depth = 1; depth <= 3; ++depth) {
            auto tree = simulation::build_tree(bundle.spec, s, depth);
            require(!tree.truncated, "tree truncated");
            auto got = tree_paths(tree);
            auto want = normcase::testing::enumerate_paths(engine, s.base_state, depth);
            require(got.size() == want.size(), fixture.name + " depth " + std::to_string(depth) + ": " +
                                                   std::to_string(got.size()) + " vs " + std::to_string(want.size()));
            for (auto g = got.begin(), w = want.begin(); g != got.end(); ++g, ++w) {
                require(g->first == w->first, "path " + g->first + " vs " + w->first);
                require(g->second.status == w->second.status && g->second.expanded == w->second.expanded &&
                            g->second.motivation_required == w->second.motivation_required &&
                            g->second.digest == w->second.digest,
                        "node differs at " + g->first);
            }
            nodes += tree.nodes.size();
        }
        auto off = s;
        for (const auto& r : s.rules) off = simulation::toggle_rule(off, r.rule_id, std::nullopt);
        for (int depth = 1; depth <= 3; ++depth)
            require(simulation::build_tree(bundle.spec, off, depth).nodes.size() == 1,
                    "deactivated tree has more than the root");
    }
    double t = seconds_since(start);
    require(t < 10.0, "took " + fmt_seconds(t));
    return std::to_string(bundle.fixtures.size()) + " fixtures x depths 1-3, " + std::to_string(nodes) +
           " nodes identical to brute force; all-off tree is root only; " + fmt_seconds(t);
}

void random_operations(service::CaseService& svc, const service::User& u, int count, std::mt19937& rng) {
    std::vector<std::string> cases, scenarios;
    const auto& bundle = svc.bundle();
    int done = 0;
    while (done < count) {
        int kind = cases.empty() ? 0 : static_cast<int>(rng() % 7);
        try {
            switch (kind) {
                case 0: {
                    auto answers = fixture_answers(rng() % 2 ? "usertest-goal1" : "registered-unknown");
                    answers["income"] = static_cast<int>(rng() % 2500);
                    service::CaseInput in;
                    in.client_name = "Klant " + std::to_string(rng() % 1000);
                    in.answers = answers;
                    cases.push_back(svc.create_case(u, in)->id);
                    break;
                }
                case 1:
                case 2: {
                    service::CaseEdit e;
                    const auto& q = bundle.schema.questions[rng() % bundle.schema.questions.size()];
                    if (q.type == ScalarType::Integer)
                        e.answers[q.fact] = static_cast<int>(rng() % 3000);
                    else if (q.allows_unknown && rng() % 4 == 0)
                        e.answers[q.fact] = nullptr;
                    else
                        e.answers[q.fact] = rng() % 2 == 0;
                    if (rng() % 3 == 0) e.notes = "notitie " + std::to_string(rng() % 100);
                    svc.edit_case(u, cases[rng() % cases.size()], e);
                    break;
                }
                case 3: {
                    const auto& id = cases[rng() % cases.size()];
                    auto avail = svc.engine().available_actions(svc.get_case(id)->state);
                    if (avail.empty()) continue;
                    svc.execute_action(u, id, avail[rng() % avail.size()].first->name, "motivering");
                    break;
                }
                case 4:
                    svc.add_source(u, {"Bron " + std::to_string(rng() % 100), std::nullopt, std::nullopt});
                    break;
                case 5:
                    scenarios.push_back(svc.create_scenario(u, "proef", cases[rng() % cases.size()])->id);
                    break;
                default: {
                    if (scenarios.empty()) continue;
                    const auto& sid = scenarios[rng() % scenarios.size()];
                    const auto& act = bundle.spec.acts[rng() % bundle.spec.acts.size()].name;
                    if (rng() % 2)
                        svc.toggle_rule(u, sid, act, rng() % 2 ? std::optional<std::string>("v1") : std::nullopt);
                    else
                        svc.add_rule_version(u, sid, act, dsl::print_act(*bundle.spec.find_act(act)));
                    break;
                }
            }
            ++done;
        } catch (const service::ServiceError&) {
        }
        if (rng() % 8 == 0) svc.sweep_duties();
    }
}

std::string persistence() {
    normcase::testing::TempDir dir;
    auto dump_path = dir.path() / "before.json";
    service::ServiceConfig config;
    config.data_dir = dir.path() / "store";
    config.snapshot_every = 7;
    auto clock = std::make_shared<normcase::testing::ManualClock>(DateTime::start_of(Date(2024, 3, 1)));
    auto make = [&] {
        return std::make_unique<service::CaseService>(config, normcase::testing::bundled(), [clock] { return (*clock)(); });
    };

    std::cout.flush();
    pid_t child = fork();
    require(child >= 0, "fork failed");
    if (child == 0) {
        try {
            auto svc = make();
            auto u = svc->authenticate(svc->register_user("medewerker", "geheim"));
            std::mt19937 rng(424242);
            random_operations(*svc, u, 50, rng);
            std::ofstream(dump_path, std::ios::binary) << svc->snapshot_json().dump();
        } catch (...) {
            _exit(3);
        }
        raise(SIGKILL);
        _exit(4);
    }
    int status = 0;
    waitpid(child, &status, 0);
    require(WIFSIGNALED(status) && WTERMSIG(status) == SIGKILL, "writer did not die by SIGKILL");
    auto before = normcase::testing::read_file(dump_path);
    require(!before.empty(), "writer produced no snapshot");

    auto svc = make();
    auto replayed = svc->snapshot_json().dump();
    require(replayed == before, "replayed snapshot differs from pre-kill snapshot");
    auto events = json::parse(before).at("seq").get<std::uint64_t>();
    svc.reset();
    svc = make();
    require(svc->snapshot_json().dump() == before, "second restart differs");
    svc->write_snapshot();
    auto on_disk = normcase::testing::read_file(config.data_dir / "snapshot.json");
    svc.reset();
    svc = make();
    require(svc->snapshot_json().dump() == before, "restart from fresh snapshot differs");
    svc->write_snapshot();
    require(normcase::testing::read_file(config.data_dir / "snapshot.json") == on_disk, "snapshot files differ");
    return "50 operations (" + std::to_string(events) + " events), SIGKILL, restart: " +
           std::to_string(before.size()) + "-byte snapshot identical";
}

std::string dsl_round_trip() {
    std::size_t files = 0;
    for (const auto& path : normcase::testing::spec_corpus()) {
        auto text = normcase::testing::read_file(path);
        auto first = dsl::parse_spec({text, path.string()});
        require(first.ok(), path.string() + " does not parse");
        auto printed = dsl::print_spec(*first.spec);
        auto second = dsl::parse_spec({printed, path.string()});
        require(second.ok(), path.string() + " printed form does not parse");
        require(*second.spec == *first.spec, path.string() + ": parse(print(spec)) differs");
        require(dsl::print_spec(*second.spec) == printed, path.string() + ": print is not a fixpoint");
        ++files;
    }
    return std::to_string(files) + " spec files, 0 diffs";
}

std::string exit_codes() {
    const auto dir = normcase::testing::test_data() / "scenarios";
    auto manifest = json::parse(normcase::testing::read_file(dir / "manifest.json"));
    require(manifest.size() >= 10, "corpus too small");
    std::map<int, int> per_code;
    for (const auto& e : manifest) {
        std::string spec = e.at("spec");
        auto spec_path = spec.rfind("policy/", 0) == 0 ? normcase::testing::policy_dir() / spec.substr(7)
                                                       : normcase::testing::test_data() / spec;
        for (bool as_json : {false, true}) {
            std::vector<std::string> args{"normcase", "run", spec_path.string(), (dir / e.at("scenario").get<std::string>()).string()};
            if (as_json) args.push_back("--json");
            std::vector<const char*> argv;
            for (const auto& a : args) argv.push_back(a.c_str());
            std::ostringstream out, err;
            int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
            require(code == e.at("exit").get<int>(), e.at("scenario").get<std::string>() + " exited " +
                                                         std::to_string(code) + ", expected " + e.at("exit").dump());
            if (!as_json) ++per_code[code];
        }
    }
    require(per_code.size() == 3, "corpus does not cover 0, 1 and 2");
    return std::to_string(manifest.size()) + " scenarios (" + std::to_string(per_code[0]) + " x 0, " +
           std::to_string(per_code[1]) + " x 1, " + std::to_string(per_code[2]) + " x 2), text and --json agree";
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<std::string()>>> criteria{
        {"three-valued oracle equivalence (depth <= 3, 4 facts, < 5 s)", kleene_oracle},
        {"monotonicity over 1000 random (spec, state) pairs", monotonicity},
        {"goal 1 reproduction via API (< 1 s)", goal1},
        {"goal 2 reproduction: seeded usertest1 violation explained", goal2},
        {"goal 3 reproduction: child-at-home edit swaps grant variant", goal3},
        {"goal 4 reproduction: termijn sort, execution, urgency 5/14/60", goal4},
        {"simulation oracle (depth <= 3, all rules off, < 10 s)", simulation_oracle},
        {"persistence determinism after kill and restart", persistence},
        {"DSL round trip over the spec corpus", dsl_round_trip},
        {"exit-code contract over the scenario corpus", exit_codes},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        try {
            auto detail = check();
            std::cout << "PASS  " << name << ": " << detail << std::endl;
        } catch (const std::exception& e) {
            ++failures;
            std::cout << "FAIL  " << name << ": " << e.what() << std::endl;
        }
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size()
              << " acceptance criteria passed" << std::endl;
    return failures == 0 ? 0 : 1;
}
