#include "normcase/service/http_api.hpp"

#include <httplib.h>

#include "normcase/engine/serialize.hpp"
#include "normcase/service/case_service.hpp"

namespace normcase::service {

namespace {

using Handler = std::function<json(const httplib::Request&, httplib::Response&)>;

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json; charset=utf-8");
}

void send_error(httplib::Response& res, const ServiceError& e) {
    json body{{"error", e.code()}, {"message", e.what()}};
    if (!e.fields().empty()) body["fields"] = e.fields();
    if (!e.details().is_null()) body["details"] = e.details();
    send_json(res, e.http_status(), body);
}

json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    try {
        json j = json::parse(req.body);
        if (!j.is_object()) throw ServiceError(400, "invalid_json", "request body must be a JSON object");
        return j;
    } catch (const json::parse_error&) {
        throw ServiceError(400, "invalid_json", "request body is not valid JSON");
    }
}

template <typename T>
std::optional<T> optional_field(const json& body, const char* key) {
    if (!body.contains(key) || body[key].is_null()) return std::nullopt;
    try {
        return body[key].get<T>();
    } catch (const json::exception&) {
        throw ServiceError(400, "validation_failed", std::string("field '") + key + "' has the wrong type", {key});
    }
}

std::string bearer_token(const httplib::Request& req) {
    std::string h = req.get_header_value("Authorization");
    const std::string prefix = "Bearer ";
    if (h.rfind(prefix, 0) == 0) return h.substr(prefix.size());
    return h;
}

int parse_int_param(const httplib::Request& req, const char* key, int fallback) {
    if (!req.has_param(key)) return fallback;
    const auto v = req.get_param_value(key);
    try {
        std::size_t used = 0;
        int n = std::stoi(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return n;
    } catch (const std::exception&) {
        throw ServiceError(400, "validation_failed", std::string("parameter '") + key + "' must be an integer", {key});
    }
}

std::optional<Date> parse_date_param(const httplib::Request& req, const char* key) {
    if (!req.has_param(key) || req.get_param_value(key).empty()) return std::nullopt;
    auto d = Date::parse(req.get_param_value(key));
    if (!d) throw ServiceError(400, "validation_failed", std::string("parameter '") + key + "' is not a date", {key});
    return d;
}

class Router {
public:
    Router(httplib::Server& server, CaseService& service) : server_(server), service_(service) {}

    void get(const std::string& pattern, Handler h, bool auth = true) { server_.Get(pattern, wrap(std::move(h), auth)); }
    void post(const std::string& pattern, Handler h, bool auth = true) {
        server_.Post(pattern, wrap(std::move(h), auth));
    }
    void patch(const std::string& pattern, Handler h, bool auth = true) {
        server_.Patch(pattern, wrap(std::move(h), auth));
    }

private:
    httplib::Server::Handler wrap(Handler h, bool auth) {
        return [&service = service_, h = std::move(h), auth](const httplib::Request& req, httplib::Response& res) {
            try {
                if (auth) service.authenticate(bearer_token(req));
                res.status = 200;
                json body = h(req, res);
                send_json(res, res.status, body);
            } catch (const ServiceError& e) {
                send_error(res, e);
            } catch (const std::exception& e) {
                send_json(res, 500, {{"error", "internal"}, {"message", e.what()}});
            }
        };
    }

    httplib::Server& server_;
    CaseService& service_;
};

}  // namespace

void mount_api(httplib::Server& server, CaseService& svc) {
    Router r(server, svc);
    auto user_of = [&svc](const httplib::Request& req) { return svc.authenticate(bearer_token(req)); };

    r.get(
        "/api/health",
        [&svc](const httplib::Request&, httplib::Response&) {
            const auto& b = svc.bundle();
            return json{{"status", "ok"},
                        {"policy", b.name},
                        {"caseType", b.case_type},
                        {"facts", b.spec.facts.size()},
                        {"acts", b.spec.acts.size()},
                        {"duties", b.spec.duties.size()},
                        {"events", svc.last_seq()}};
        },
        false);

    auto auth_handler = [&svc](bool registering) {
        return [&svc, registering](const httplib::Request& req, httplib::Response& res) {
            json body = parse_body(req);
            auto name = optional_field<std::string>(body, "name").value_or("");
            auto secret = optional_field<std::string>(body, "secret").value_or("");
            std::string token = registering ? svc.register_user(name, secret) : svc.login(name, secret);
            if (registering) res.status = 201;
            return json{{"token", token}, {"user", svc.user_json(svc.authenticate(token))}};
        };
    };
    r.post("/api/register", auth_handler(true), false);
    r.post("/api/login", auth_handler(false), false);
    r.post("/api/logout", [&svc](const httplib::Request& req, httplib::Response&) {
        svc.logout(bearer_token(req));
        return json{{"status", "ok"}};
    });

    r.get("/api/questions", [&svc](const httplib::Request&, httplib::Response&) {
        json qs = json::array();
        for (const auto& q : svc.bundle().schema.questions)
            qs.push_back({{"fact", q.fact},
                          {"prompt", q.prompt},
                          {"type", normcase::to_string(q.type)},
                          {"required", q.required},
                          {"allowsUnknown", q.allows_unknown}});
        return json{{"caseType", svc.bundle().case_type},
                    {"defaultDecisionPeriodDays", svc.config().decision_period_for(svc.bundle().case_type)},
                    {"questions", qs}};
    });

    r.post("/api/cases", [&svc, user_of](const httplib::Request& req, httplib::Response& res) {
        json body = parse_body(req);
        CaseInput in;
        in.client_id = optional_field<std::string>(body, "clientId");
        in.client_name = optional_field<std::string>(body, "clientName");
        in.client_kind = optional_field<std::string>(body, "clientKind");
        in.case_type = optional_field<std::string>(body, "caseType");
        in.created_on = optional_field<std::string>(body, "createdOn");
        in.decision_term = optional_field<std::string>(body, "decisionTerm");
        in.notes = optional_field<std::string>(body, "notes").value_or("");
        if (body.contains("answers")) in.answers = body["answers"];
        auto c = svc.create_case(user_of(req), in);
        res.status = 201;
        return svc.case_json(*c);
    });

    r.get("/api/cases", [&svc](const httplib::Request& req, httplib::Response&) {
        CaseQuery q;
        if (req.has_param("sort") && !req.get_param_value("sort").empty()) q.sort = req.get_param_value("sort");
        if (req.has_param("order")) {
            auto o = req.get_param_value("order");
            if (o != "asc" && o != "desc" && !o.empty())
                throw ServiceError(400, "invalid_sort", "order must be asc or desc", {"order"});
            q.descending = o == "desc";
        }
        if (req.has_param("status") && !req.get_param_value("status").empty()) {
            q.status = case_status_from_string(req.get_param_value("status"));
            if (!q.status) throw ServiceError(400, "validation_failed", "unknown status", {"status"});
        }
        q.text = req.get_param_value("q");
        q.from = parse_date_param(req, "from");
        q.to = parse_date_param(req, "to");
        int offset = parse_int_param(req, "offset", 0);
        int limit = parse_int_param(req, "limit", -1);
        if (offset < 0) throw ServiceError(400, "validation_failed", "offset must not be negative", {"offset"});
        q.offset = static_cast<std::size_t>(offset);
        if (limit >= 0) q.limit = static_cast<std::size_t>(limit);
        auto page = svc.list_cases(q);
        json items = json::array();
        for (const auto& s : page.items) items.push_back(svc.summary_json(s));
        return json{{"items", items}, {"total", page.total}};
    });

    r.get(R"(/api/cases/([^/]+))", [&svc](const httplib::Request& req, httplib::Response&) {
        return svc.case_json(*svc.get_case(req.matches[1]));
    });

    r.patch(R"(/api/cases/([^/]+))", [&svc, user_of](const httplib::Request& req, httplib::Response&) {
        json body = parse_body(req);
        CaseEdit edit;
        if (body.contains("answers")) edit.answers = body["answers"];
        edit.notes = optional_field<std::string>(body, "notes");
        edit.decision_term = optional_field<std::string>(body, "decisionTerm");
        edit.client_name = optional_field<std::string>(body, "clientName");
        auto c = svc.edit_case(user_of(req), req.matches[1], edit);
        json out = svc.case_json(*c);
        out["actions"] = svc.actions_json(*c);
        return out;
    });

    r.get(R"(/api/cases/([^/]+)/actions)", [&svc](const httplib::Request& req, httplib::Response&) {
        return svc.actions_json(*svc.get_case(req.matches[1]));
    });

    r.post(R"(/api/cases/([^/]+)/actions/([^/]+)/execute)",
           [&svc, user_of](const httplib::Request& req, httplib::Response&) {
               json body = parse_body(req);
               auto motivation = optional_field<std::string>(body, "motivation");
               auto before = svc.get_case(req.matches[1])->state.violations.size();
               auto c = svc.execute_action(user_of(req), req.matches[1], req.matches[2], motivation);
               json out{{"case", svc.case_json(*c)}, {"actions", svc.actions_json(*c)}, {"violation", nullptr}};
               for (std::size_t i = before; i < c->state.violations.size(); ++i)
                   if (c->state.violations[i].kind == engine::ViolationKind::NonPermittedExecution)
                       out["violation"] = engine::violation_to_json(c->state.violations[i]);
               return out;
           });

    r.get("/api/open-actions", [&svc, user_of](const httplib::Request& req, httplib::Response&) {
        json items = json::array();
        for (const auto& a : svc.open_actions(user_of(req)))
            items.push_back({{"case", svc.summary_json(a.summary)}, {"act", a.act}, {"termijn", a.summary.decision_term.str()}});
        return items;
    });

    r.get("/api/sources", [&svc](const httplib::Request&, httplib::Response&) {
        json items = json::array();
        for (const auto& s : svc.list_sources()) items.push_back(engine::source_to_json(s));
        return items;
    });

    r.post("/api/sources", [&svc, user_of](const httplib::Request& req, httplib::Response& res) {
        json body = parse_body(req);
        dsl::SourceRef src;
        src.title = optional_field<std::string>(body, "title").value_or("");
        src.url = optional_field<std::string>(body, "url");
        if (auto from = optional_field<std::string>(body, "applicableFrom")) {
            src.applicable_from = Date::parse(*from);
            if (!src.applicable_from)
                throw ServiceError(400, "validation_failed", "applicableFrom is not a date", {"applicableFrom"});
        }
        svc.add_source(user_of(req), src);
        res.status = 201;
        return engine::source_to_json(src);
    });

    r.post("/api/simulations", [&svc, user_of](const httplib::Request& req, httplib::Response& res) {
        json body = parse_body(req);
        auto s = svc.create_scenario(user_of(req), optional_field<std::string>(body, "label").value_or(""),
                                     optional_field<std::string>(body, "caseId"));
        res.status = 201;
        return simulation::scenario_to_json(*s);
    });

    r.get(R"(/api/simulations/([^/]+))", [&svc](const httplib::Request& req, httplib::Response&) {
        return simulation::scenario_to_json(*svc.get_scenario(req.matches[1]));
    });

    r.post(R"(/api/simulations/([^/]+)/rules/([^/]+)/versions)",
           [&svc, user_of](const httplib::Request& req, httplib::Response& res) {
               json body = parse_body(req);
               auto text = optional_field<std::string>(body, "text");
               if (!text) throw ServiceError(400, "validation_failed", "missing rule text", {"text"});
               auto s = svc.add_rule_version(user_of(req), req.matches[1], req.matches[2], *text);
               res.status = 201;
               return simulation::scenario_to_json(*s);
           });

    r.patch(R"(/api/simulations/([^/]+)/rules/([^/]+))",
            [&svc, user_of](const httplib::Request& req, httplib::Response&) {
                json body = parse_body(req);
                if (!body.contains("activeVersion"))
                    throw ServiceError(400, "validation_failed", "missing activeVersion", {"activeVersion"});
                auto version = optional_field<std::string>(body, "activeVersion");
                auto s = svc.toggle_rule(user_of(req), req.matches[1], req.matches[2], version);
                return simulation::scenario_to_json(*s);
            });

    r.get(R"(/api/simulations/([^/]+)/tree)", [&svc](const httplib::Request& req, httplib::Response&) {
        int depth = parse_int_param(req, "depth", svc.config().tree_max_depth);
        return simulation::tree_to_json(svc.scenario_tree(req.matches[1], depth));
    });

    r.get(R"(/api/simulations/([^/]+)/tree/([0-9]+)/explain)", [&svc](const httplib::Request& req, httplib::Response&) {
        int depth = parse_int_param(req, "depth", svc.config().tree_max_depth);
        std::size_t node = 0;
        try {
            node = std::stoul(req.matches[2]);
        } catch (const std::out_of_range&) {
            throw ServiceError(404, "not_found", "unknown node");
        }
        return svc.explain_node(req.matches[1], node, depth);
    });

    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (res.body.empty())
            send_json(res, res.status, {{"error", res.status == 404 ? "not_found" : "http_error"}});
    });
}

}  // namespace normcase::service
