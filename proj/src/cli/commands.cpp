#include "normcase/cli/commands.hpp"

#include <csignal>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "normcase/dsl/parser.hpp"
#include "normcase/engine/serialize.hpp"
#include "normcase/policy/bundle.hpp"
#include "normcase/service/case_service.hpp"
#include "normcase/service/http_api.hpp"
#include "normcase/simulation/simulation.hpp"

namespace normcase::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;
using engine::Engine;
using engine::NormState;

namespace {

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw InputError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

dsl::NormSpec load_spec(const fs::path& p, std::ostream& err) {
    auto r = dsl::parse_spec({read_file(p), p.string()});
    if (!r.ok()) {
        for (const auto& d : r.diagnostics) err << dsl::format_diagnostic(d, p.string()) << "\n";
        throw InputError(p.string() + ": specification has errors");
    }
    return std::move(*r.spec);
}

json load_json(const fs::path& p) {
    try {
        return json::parse(read_file(p));
    } catch (const json::parse_error& e) {
        throw InputError(p.string() + ": " + e.what());
    }
}

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

struct StepRecord {
    std::size_t index = 0;
    std::string kind;
    std::string subject;
    std::string status;
    std::string note;
};

json step_json(const StepRecord& r) {
    return {{"index", r.index}, {"kind", r.kind}, {"subject", r.subject}, {"status", r.status}, {"note", r.note}};
}

dsl::FactRef fact_ref(const std::string& key) {
    auto ref = dsl::parse_fact_ref(key);
    if (!ref) throw InputError("malformed fact reference '" + key + "'");
    return *ref;
}

FactValue decode_value(const dsl::NormSpec& spec, const dsl::FactRef& ref, const json& value) {
    if (value.is_null()) return std::nullopt;
    const auto* decl = spec.find_fact(ref.name);
    if (!decl) throw InputError("unknown fact '" + ref.name + "'");
    try {
        return engine::scalar_from_json(value, decl->type);
    } catch (const engine::FormatError& e) {
        throw InputError("fact '" + ref.name + "': " + e.what());
    }
}

std::string value_text(const FactValue& v) { return v ? to_literal(*v) : "unknown"; }

int run_impl(const fs::path& spec_path, const fs::path& scenario_path, bool as_json, std::ostream& out,
             std::ostream& err) {
    Engine engine(load_spec(spec_path, err));
    const auto& spec = engine.spec();
    json sc = load_json(scenario_path);
    if (!sc.is_object()) throw InputError("scenario must be a JSON object");
    if (!sc.contains("clock") || !sc["clock"].is_string()) throw InputError("scenario needs a `clock` date");
    auto clock = Date::parse(sc["clock"].get<std::string>());
    if (!clock) throw InputError("scenario clock is not a date");

    std::vector<engine::Assignment> initial;
    if (fs::exists(fs::path(spec_path).replace_extension(".params.toml"))) {
        try {
            initial = policy::load_policy_bundle(spec_path).parameters;
        } catch (const policy::BundleError& e) {
            throw InputError(e.what());
        }
    }
    NormState state;
    try {
        auto given = engine::assignments_from_json(sc.value("assignments", json::object()), spec);
        initial.insert(initial.end(), given.begin(), given.end());
        state = engine.init_state(initial, *clock);
    } catch (const engine::FormatError& e) {
        throw InputError(e.what());
    }

    std::vector<StepRecord> steps;
    const json step_list = sc.value("steps", json::array());
    if (!step_list.is_array()) throw InputError("`steps` must be an array");
    for (std::size_t i = 0; i < step_list.size(); ++i) {
        const auto& s = step_list[i];
        StepRecord rec;
        rec.index = i + 1;
        auto where = "step " + std::to_string(i + 1) + ": ";
        if (!s.is_object()) throw InputError(where + "must be an object");
        if (s.contains("assign")) {
            if (!s["assign"].is_string() || !s.contains("value")) throw InputError(where + "assign needs fact and value");
            auto ref = fact_ref(s["assign"].get<std::string>());
            auto value = decode_value(spec, ref, s["value"]);
            state = engine.assign_fact(state, ref, value);
            rec.kind = "assign";
            rec.subject = dsl::instance_key(ref);
            rec.status = "-";
            rec.note = value_text(value);
        } else if (s.contains("execute")) {
            if (!s["execute"].is_string()) throw InputError(where + "execute needs an act name");
            auto act = s["execute"].get<std::string>();
            const auto* decl = spec.find_act(act);
            if (!decl) throw InputError(where + "unknown act '" + act + "'");
            std::optional<std::string> motivation;
            if (s.contains("motivation") && s["motivation"].is_string()) motivation = s["motivation"].get<std::string>();
            auto actor = s.value("actor", decl->actor);
            auto r = engine.execute(state, act, actor, DateTime::start_of(state.clock), motivation);
            rec.kind = "execute";
            rec.subject = act;
            rec.status = std::string(engine::to_string(r.state.history.back().status_at_execution));
            rec.note = r.violation ? "violation" : "";
            state = std::move(r.state);
        } else if (s.contains("advance-clock")) {
            auto d = s["advance-clock"].is_string() ? Date::parse(s["advance-clock"].get<std::string>()) : std::nullopt;
            if (!d) throw InputError(where + "advance-clock needs a date");
            if (*d < state.clock) throw InputError(where + "the clock cannot move backwards");
            auto r = engine.check_duties(state, *d);
            state = std::move(r.state);
            rec.kind = "advance-clock";
            rec.subject = d->str();
            rec.status = "-";
            rec.note = r.violations.empty() ? "" : std::to_string(r.violations.size()) + " duty violation(s)";
        } else if (s.contains("impose")) {
            if (!s["impose"].is_string()) throw InputError(where + "impose needs a duty name");
            state = engine.impose_duty(state, s["impose"].get<std::string>());
            rec.kind = "impose";
            rec.subject = s["impose"].get<std::string>();
            rec.status = "-";
        } else {
            throw InputError(where + "unknown step kind");
        }
        steps.push_back(std::move(rec));
    }

    struct Mismatch {
        std::string act, expected, actual;
    };
    std::vector<Mismatch> mismatches;
    if (sc.contains("expect")) {
        if (!sc["expect"].is_object()) throw InputError("`expect` must map act names to statuses");
        for (const auto& [act, want] : sc["expect"].items()) {
            if (!spec.find_act(act)) throw InputError("expect: unknown act '" + act + "'");
            if (!want.is_string() ||
                (want.get<std::string>() != "executed" && !engine::status_from_string(want.get<std::string>())))
                throw InputError("expect: '" + act + "' needs allowed, not_allowed, indefinite or executed");
            std::string actual = state.executed(act) ? "executed"
                                                     : std::string(engine::to_string(engine.action_status(state, act).status));
            if (actual != want.get<std::string>()) mismatches.push_back({act, want.get<std::string>(), actual});
        }
    }

    int code = state.violations.empty() && mismatches.empty() ? kSuccess : kViolations;
    if (as_json) {
        json j;
        j["steps"] = json::array();
        for (const auto& s : steps) j["steps"].push_back(step_json(s));
        j["violations"] = json::array();
        for (const auto& v : state.violations) j["violations"].push_back(engine::violation_to_json(v));
        j["mismatches"] = json::array();
        for (const auto& m : mismatches)
            j["mismatches"].push_back({{"act", m.act}, {"expected", m.expected}, {"actual", m.actual}});
        j["final"] = engine::state_to_json(state);
        j["exitCode"] = code;
        out << j.dump(2) << "\n";
        return code;
    }
    out << pad("step", 6) << pad("kind", 15) << pad("subject", 34) << pad("status", 13) << "note\n";
    for (const auto& s : steps)
        out << pad(std::to_string(s.index), 6) << pad(s.kind, 15) << pad(s.subject, 34) << pad(s.status, 13) << s.note
            << "\n";
    out << "\nviolations: " << state.violations.size() << "\n";
    for (std::size_t i = 0; i < state.violations.size(); ++i) {
        const auto& v = state.violations[i];
        out << "  [" << i + 1 << "] " << v.subject << " at " << v.at.str() << "\n      " << v.explanation << "\n";
    }
    if (!mismatches.empty()) {
        out << "\nexpectation mismatches: " << mismatches.size() << "\n";
        for (const auto& m : mismatches)
            out << "  - " << m.act << ": expected " << m.expected << ", actual " << m.actual << "\n";
    }
    out << "\nresult: " << (code == kSuccess ? "compliant" : "not compliant") << "\n";
    return code;
}

void print_tree_text(const simulation::ActionTree& tree, std::ostream& out) {
    std::vector<std::vector<std::size_t>> children(tree.nodes.size());
    for (const auto& n : tree.nodes)
        if (n.parent) children[*n.parent].push_back(n.id);
    std::function<void(std::size_t)> walk = [&](std::size_t id) {
        const auto& n = tree.nodes[id];
        out << std::string(static_cast<std::size_t>(n.depth) * 2, ' ');
        if (!n.parent) {
            out << "[0] start\n";
        } else {
            out << "[" << n.id << "] " << n.act << " (" << engine::to_string(n.status->status);
            if (n.motivation_required) out << ", motivation required";
            if (!n.expanded) out << ", not expanded";
            out << ")\n";
        }
        for (auto c : children[id]) walk(c);
    };
    walk(0);
    out << tree.nodes.size() << " node(s)" << (tree.truncated ? ", truncated" : "") << "\n";
}

std::atomic<httplib::Server*> g_server{nullptr};

void on_signal(int) {
    if (auto* s = g_server.load()) s->stop();
}

}  // namespace

int cmd_validate(const fs::path& spec, std::ostream& out, std::ostream& err) {
    std::string text;
    try {
        text = read_file(spec);
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    }
    auto r = dsl::parse_spec({text, spec.string()});
    for (const auto& d : r.diagnostics) (r.ok() ? out : err) << dsl::format_diagnostic(d, spec.string()) << "\n";
    if (!r.ok()) return kInputError;
    out << spec.string() << ": ok (" << r.spec->facts.size() << " facts, " << r.spec->acts.size() << " acts, "
        << r.spec->duties.size() << " duties)\n";
    return kSuccess;
}

int cmd_run(const fs::path& spec, const fs::path& scenario, bool as_json, std::ostream& out, std::ostream& err) {
    try {
        return run_impl(spec, scenario, as_json, out, err);
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
    } catch (const engine::EngineError& e) {
        err << "error: " << e.what() << "\n";
    } catch (const engine::FormatError& e) {
        err << "error: " << e.what() << "\n";
    } catch (const json::exception& e) {
        err << "error: " << e.what() << "\n";
    }
    return kInputError;
}

int cmd_tree(const fs::path& spec_path, const fs::path& state_path, int depth, bool as_json, std::ostream& out,
             std::ostream& err) {
    try {
        Engine engine(load_spec(spec_path, err));
        auto state = engine::state_from_json(load_json(state_path), engine.spec());
        auto tree = simulation::build_tree(engine, state, depth);
        if (as_json)
            out << simulation::tree_to_json(tree).dump(2) << "\n";
        else
            print_tree_text(tree, out);
        return kSuccess;
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
    } catch (const engine::FormatError& e) {
        err << "error: " << state_path.string() << ": " << e.what() << "\n";
    } catch (const engine::EngineError& e) {
        err << "error: " << e.what() << "\n";
    } catch (const simulation::SimulationError& e) {
        err << "error: " << e.what() << "\n";
    }
    return kInputError;
}

int cmd_serve(const fs::path& config_path, std::ostream& out, std::ostream& err, std::atomic<bool>* stop) {
    std::unique_ptr<service::CaseService> svc;
    service::ServiceConfig config;
    try {
        config = service::load_service_config(config_path);
        auto bundle = policy::load_policy_bundle(config.spec_path);
        svc = std::make_unique<service::CaseService>(config, std::move(bundle));
        svc->seed_if_empty();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    }

    httplib::Server server;
    server.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    service::mount_api(server, *svc);
    int port = config.port;
    if (port == 0) {
        port = server.bind_to_any_port(config.host);
        if (port <= 0) {
            err << "error: cannot bind " << config.host << "\n";
            return kInputError;
        }
    } else if (!server.bind_to_port(config.host, port)) {
        err << "error: cannot bind " << config.host << ":" << port << " (port in use?)\n";
        return kInputError;
    }

    const auto& b = svc->bundle();
    service::CaseQuery all;
    out << "normcase: serving '" << b.name << "' (" << b.spec.facts.size() << " facts, " << b.spec.acts.size()
        << " acts, " << b.spec.duties.size() << " duties, " << svc->list_cases(all).total << " cases) on http://"
        << config.host << ":" << port << "\n"
        << std::flush;

    g_server = &server;
    auto old_int = std::signal(SIGINT, on_signal);
    auto old_term = std::signal(SIGTERM, on_signal);

    std::atomic<bool> done{false};
    std::thread watcher([&] {
        auto last_sweep = std::chrono::steady_clock::now();
        while (!done) {
            std::this_thread::sleep_for(std::chrono::milliseconds(100));
            if (stop && *stop) server.stop();
            auto interval = config.sweep_interval_seconds;
            if (interval > 0 && std::chrono::steady_clock::now() - last_sweep >= std::chrono::seconds(interval)) {
                last_sweep = std::chrono::steady_clock::now();
                try {
                    svc->sweep_duties();
                } catch (const std::exception& e) {
                    err << "warning: duty sweep failed: " << e.what() << "\n";
                }
            }
        }
    });
    server.listen_after_bind();
    done = true;
    watcher.join();
    g_server = nullptr;
    std::signal(SIGINT, old_int);
    std::signal(SIGTERM, old_term);
    svc->write_snapshot();
    out << "normcase: stopped\n";
    return kSuccess;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Normative case handling: validate specs, run scenarios, build action trees, serve the API"};
    app.require_subcommand(1);

    std::string spec, scenario, state, config;
    int depth = 0;
    bool as_json = false;

    auto* validate = app.add_subcommand("validate", "Check a norm specification");
    validate->add_option("SPEC", spec)->required();

    auto* run = app.add_subcommand("run", "Replay a scenario file and report compliance");
    run->add_option("SPEC", spec)->required();
    run->add_option("SCENARIO", scenario)->required();
    run->add_flag("--json", as_json, "Machine-readable report");

    auto* tree = app.add_subcommand("tree", "Print the tree of reachable actions");
    tree->add_option("SPEC", spec)->required();
    tree->add_option("STATE", state)->required();
    tree->add_option("--depth", depth, "Depth bound (1-4)")->required();
    tree->add_flag("--json", as_json, "Emit the tree JSON contract");

    auto* serve = app.add_subcommand("serve", "Run the HTTP API");
    serve->add_option("--config", config, "Config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kInputError;
    }
    if (*validate) return cmd_validate(spec, out, err);
    if (*run) return cmd_run(spec, scenario, as_json, out, err);
    if (*tree) return cmd_tree(spec, state, depth, as_json, out, err);
    return cmd_serve(config, out, err);
}

}  // namespace normcase::cli
