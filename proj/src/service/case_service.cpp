#include "normcase/service/case_service.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

#include "normcase/engine/serialize.hpp"
#include "normcase/service/credentials.hpp"

namespace normcase::service {

using engine::FormatError;
using engine::NormState;
using engine::Status;
using simulation::Scenario;
using simulation::SimulationError;
using simulation::SimulationErrorCode;

namespace {

constexpr const char* kSystemUser = "system";

const std::pair<const char*, DecisionOutcome> kOutcomeFacts[] = {
    {"approved", DecisionOutcome::Approved},
    {"denied", DecisionOutcome::Denied},
    {"not-taken-into-account", DecisionOutcome::NotTakenIntoAccount},
};

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

ServiceError not_found(const std::string& what) { return ServiceError(404, "not_found", what + " not found"); }

ServiceError invalid(const std::vector<std::string>& fields) {
    return ServiceError(400, "validation_failed", "invalid or missing fields", fields);
}

std::string_view dutch_status(Status s) {
    switch (s) {
        case Status::Allowed: return "toegestaan";
        case Status::NotAllowed: return "niet_toegestaan";
        case Status::Indefinite: return "onbestemd";
    }
    return "onbestemd";
}

json sources_json(const std::vector<dsl::SourceRef>& sources) {
    json out = json::array();
    for (const auto& s : sources) out.push_back(engine::source_to_json(s));
    return out;
}

json answers_json(const std::map<std::string, FactValue>& answers) {
    json out = json::object();
    for (const auto& [k, v] : answers) out[k] = v ? engine::scalar_to_json(*v) : json(nullptr);
    return out;
}

DateTime event_time(const json& e) {
    auto t = DateTime::parse(e.at("at").get<std::string>());
    if (!t) throw FormatError("event has a malformed timestamp");
    return *t;
}

Date date_field(const json& j, const char* key) {
    auto d = Date::parse(j.at(key).get<std::string>());
    if (!d) throw FormatError(std::string("malformed date in ") + key);
    return *d;
}

json audit_json(const AuditEvent& a) {
    return {{"at", a.at.str()}, {"user", a.user}, {"action", a.action}, {"detail", a.detail}};
}

json case_store_json(const Case& c) {
    json audit = json::array();
    for (const auto& a : c.audit) audit.push_back(audit_json(a));
    return {{"id", c.id},
            {"clientId", c.client_id},
            {"caseType", c.case_type},
            {"createdOn", c.created_on.str()},
            {"decisionTerm", c.decision_term.str()},
            {"lastModified", c.last_modified.str()},
            {"notes", c.notes},
            {"answers", answers_json(c.answers)},
            {"state", engine::state_to_json(c.state)},
            {"outcome", c.outcome ? json(to_string(*c.outcome)) : json(nullptr)},
            {"audit", audit}};
}

std::uint64_t id_number(const std::string& id) {
    auto dash = id.rfind('-');
    return dash == std::string::npos ? 0 : std::stoull(id.substr(dash + 1));
}

std::string format_id(const char* prefix, std::uint64_t n) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s-%06llu", prefix, static_cast<unsigned long long>(n));
    return buf;
}

}  // namespace

std::string_view to_string(CaseStatus s) {
    switch (s) {
        case CaseStatus::InBehandeling: return "InBehandeling";
        case CaseStatus::WachtenOpBericht: return "WachtenOpBericht";
        case CaseStatus::Afgerond: return "Afgerond";
    }
    return "InBehandeling";
}

std::optional<CaseStatus> case_status_from_string(std::string_view s) {
    for (auto v : {CaseStatus::InBehandeling, CaseStatus::WachtenOpBericht, CaseStatus::Afgerond})
        if (to_string(v) == s) return v;
    return std::nullopt;
}

std::string_view to_string(DecisionOutcome o) {
    switch (o) {
        case DecisionOutcome::Approved: return "Approved";
        case DecisionOutcome::Denied: return "Denied";
        case DecisionOutcome::NotTakenIntoAccount: return "NotTakenIntoAccount";
    }
    return "Approved";
}

std::optional<DecisionOutcome> decision_outcome_from_string(std::string_view s) {
    for (auto v : {DecisionOutcome::Approved, DecisionOutcome::Denied, DecisionOutcome::NotTakenIntoAccount})
        if (to_string(v) == s) return v;
    return std::nullopt;
}

CaseService::CaseService(ServiceConfig config, policy::PolicyBundle bundle, Clock clock)
    : config_(std::move(config)),
      bundle_(std::move(bundle)),
      engine_(bundle_.spec),
      clock_(std::move(clock)),
      log_(config_.data_dir) {
    auto snapshot = log_.read_snapshot();
    auto events = log_.read_all();
    if (snapshot) load_snapshot(*snapshot);
    for (const auto& e : events) {
        auto seq = e.at("seq").get<std::uint64_t>();
        if (seq <= seq_) continue;
        if (seq != seq_ + 1)
            throw StoreError("event log gap: expected seq " + std::to_string(seq_ + 1) + ", found " +
                             std::to_string(seq));
        try {
            apply(e);
        } catch (const std::exception& ex) {
            throw StoreError("cannot replay event " + std::to_string(seq) + ": " + ex.what());
        }
        seq_ = seq;
    }
}

// ---------------------------------------------------------------- commit/apply

std::shared_ptr<std::mutex> CaseService::entity_lock(const std::string& key) const {
    std::lock_guard g(locks_mutex_);
    auto& m = entity_locks_[key];
    if (!m) m = std::make_shared<std::mutex>();
    return m;
}

json CaseService::commit(const std::function<json()>& build) {
    std::lock_guard g(commit_mutex_);
    json e = build();
    e["seq"] = seq_ + 1;
    log_.append(e);
    {
        std::unique_lock store(store_mutex_);
        ++seq_;
        apply(e);
    }
    rotate_snapshot_if_due();
    return e;
}

void CaseService::rotate_snapshot_if_due() {
    if (seq_ - snapshot_seq_ < static_cast<std::uint64_t>(config_.snapshot_every)) return;
    std::shared_lock store(store_mutex_);
    log_.write_snapshot(snapshot_unlocked());
    snapshot_seq_ = seq_;
}

void CaseService::write_snapshot() {
    std::lock_guard g(commit_mutex_);
    std::shared_lock store(store_mutex_);
    log_.write_snapshot(snapshot_unlocked());
    snapshot_seq_ = seq_;
}

std::uint64_t CaseService::last_seq() const {
    std::shared_lock store(store_mutex_);
    return seq_;
}

std::string CaseService::next_id(const char* prefix, std::uint64_t& counter) { return format_id(prefix, counter + 1); }

void CaseService::put_case(std::shared_ptr<const Case> c) { cases_[c->id] = std::move(c); }

void CaseService::put_scenario(std::shared_ptr<const Scenario> s) { scenarios_[s->id] = std::move(s); }

void CaseService::apply(const json& e) {
    const auto type = e.at("type").get<std::string>();
    const auto& d = e.at("data");
    if (type == "user_registered") {
        User u{d.at("id"), d.at("name"), d.at("hash"), d.at("role")};
        user_counter_ = std::max(user_counter_, id_number(u.id));
        users_[u.id] = std::move(u);
    } else if (type == "case_created") {
        apply_case_created(e);
    } else if (type == "case_edited") {
        apply_case_edited(e);
    } else if (type == "action_executed") {
        apply_action_executed(e);
    } else if (type == "duties_checked") {
        apply_duties_checked(e);
    } else if (type == "source_added") {
        manual_sources_.push_back(engine::source_from_json(d.at("source")));
    } else if (type == "scenario_created") {
        auto s = std::make_shared<Scenario>();
        s->id = d.at("id");
        s->label = d.at("label");
        if (!d.at("sourceCase").is_null()) s->source_case = d["sourceCase"].get<std::string>();
        s->base_state = engine::state_from_json(d.at("baseState"), bundle_.spec);
        s->rules = simulation::seed_rule_groups(bundle_.spec, event_time(e));
        scenario_counter_ = std::max(scenario_counter_, id_number(s->id));
        put_scenario(std::move(s));
    } else if (type == "rule_version_added") {
        const auto& old = scenarios_.at(d.at("scenarioId"));
        put_scenario(std::make_shared<Scenario>(simulation::add_rule_version(
            *old, bundle_.spec, d.at("ruleId").get<std::string>(), d.at("text").get<std::string>(), event_time(e))));
    } else if (type == "rule_toggled") {
        const auto& old = scenarios_.at(d.at("scenarioId"));
        std::optional<std::string> version;
        if (!d.at("versionId").is_null()) version = d["versionId"].get<std::string>();
        put_scenario(std::make_shared<Scenario>(
            simulation::toggle_rule(*old, d.at("ruleId").get<std::string>(), version)));
    } else {
        throw FormatError("unknown event type '" + type + "'");
    }
}

void CaseService::apply_case_created(const json& e) {
    const auto& d = e.at("data");
    const DateTime at = event_time(e);
    const Date today = at.date();
    auto c = std::make_shared<Case>();
    c->id = d.at("caseId");
    c->client_id = d.at("clientId");
    if (d.contains("newClient")) {
        const auto& nc = d["newClient"];
        auto kind = policy::client_kind_from_string(nc.at("kind").get<std::string>());
        if (!kind) throw FormatError("bad client kind");
        clients_[c->client_id] = Client{c->client_id, nc.at("name"), *kind};
        client_counter_ = std::max(client_counter_, id_number(c->client_id));
    }
    c->case_type = d.at("caseType");
    c->created_on = date_field(d, "createdOn");
    c->decision_term = date_field(d, "decisionTerm");
    c->notes = d.at("notes");
    for (auto& [ref, value] : engine::assignments_from_json(d.at("answers"), bundle_.spec))
        c->answers[dsl::instance_key(ref)] = value;

    auto assignments = bundle_.case_assignments(c->answers);
    assignments.emplace_back(dsl::FactRef{"decision-term", {}}, Scalar(c->decision_term));
    NormState state = engine_.init_state(assignments, today);
    if (!bundle_.decision_duty.empty()) state = engine_.impose_duty(state, bundle_.decision_duty);
    c->state = engine_.check_duties(state, today).state;
    c->last_modified = at;
    c->audit.push_back({at, e.at("user"), "zaak aangemaakt",
                        "Zaak " + c->id + " (" + c->case_type + ") voor " + clients_.at(c->client_id).name});
    case_counter_ = std::max(case_counter_, id_number(c->id));
    put_case(std::move(c));
}

void CaseService::apply_case_edited(const json& e) {
    const auto& d = e.at("data");
    const DateTime at = event_time(e);
    const Date today = at.date();
    auto c = std::make_shared<Case>(*cases_.at(d.at("caseId").get<std::string>()));
    c->state = engine_.check_duties(c->state, today).state;
    std::vector<std::string> changed;
    for (auto& [ref, value] : engine::assignments_from_json(d.at("answers"), bundle_.spec)) {
        c->state = engine_.assign_fact(c->state, ref, value);
        c->answers[dsl::instance_key(ref)] = value;
        changed.push_back(ref.name);
    }
    if (d.contains("decisionTerm")) {
        c->decision_term = date_field(d, "decisionTerm");
        c->state = engine_.assign_fact(c->state, {"decision-term", {}}, Scalar(c->decision_term));
        changed.push_back("beslistermijn");
    }
    if (d.contains("notes")) {
        c->notes = d["notes"];
        changed.push_back("notities");
    }
    if (d.contains("clientName")) {
        clients_.at(c->client_id).name = d["clientName"];
        changed.push_back("naam klant");
    }
    c->state = engine_.check_duties(c->state, today).state;
    c->last_modified = at;
    std::string detail = "geen wijzigingen";
    if (!changed.empty()) {
        detail = "gewijzigd:";
        for (std::size_t i = 0; i < changed.size(); ++i) detail += (i ? ", " : " ") + changed[i];
    }
    c->audit.push_back({at, e.at("user"), "zaak gewijzigd", detail});
    put_case(std::move(c));
}

void CaseService::apply_action_executed(const json& e) {
    const auto& d = e.at("data");
    const DateTime at = event_time(e);
    auto c = std::make_shared<Case>(*cases_.at(d.at("caseId").get<std::string>()));
    const std::string act = d.at("act");
    std::optional<std::string> motivation;
    if (d.contains("motivation") && !d["motivation"].is_null()) motivation = d["motivation"].get<std::string>();
    auto checked = engine_.check_duties(c->state, at.date()).state;
    auto r = engine_.execute(checked, act, e.at("user").get<std::string>(), at, motivation);
    c->state = std::move(r.state);
    if (const auto* decl = bundle_.spec.find_act(act))
        for (const auto& eff : decl->creates)
            for (const auto& [fact, outcome] : kOutcomeFacts)
                if (eff.target.name == fact && !c->outcome) c->outcome = outcome;
    c->last_modified = at;
    std::string detail = act;
    if (r.violation) detail += " (uitgevoerd zonder toestemming, overtreding vastgelegd)";
    c->audit.push_back({at, e.at("user"), "actie uitgevoerd", detail});
    put_case(std::move(c));
}

void CaseService::apply_duties_checked(const json& e) {
    const auto& d = e.at("data");
    const DateTime at = event_time(e);
    auto c = std::make_shared<Case>(*cases_.at(d.at("caseId").get<std::string>()));
    auto r = engine_.check_duties(c->state, at.date());
    c->state = std::move(r.state);
    std::string detail;
    for (const auto& v : r.violations) detail += (detail.empty() ? "" : ", ") + v.subject;
    c->audit.push_back({at, e.at("user"), "termijncontrole",
                        detail.empty() ? "geen nieuwe overtredingen" : "plicht geschonden: " + detail});
    put_case(std::move(c));
}

// ---------------------------------------------------------------- users

std::string CaseService::register_user(const std::string& name, const std::string& secret) {
    std::vector<std::string> fields;
    if (trim(name).empty()) fields.push_back("naam");
    if (secret.empty()) fields.push_back("wachtwoord");
    if (!fields.empty()) throw invalid(fields);
    std::string hash = hash_secret(secret);
    json e = commit([&] {
        std::shared_lock store(store_mutex_);
        for (const auto& [_, u] : users_)
            if (u.name == trim(name)) throw ServiceError(409, "duplicate_name", "user name already taken", {"naam"});
        return json{{"type", "user_registered"},
                    {"at", clock_().str()},
                    {"user", next_id("user", user_counter_)},
                    {"data",
                     {{"id", next_id("user", user_counter_)},
                      {"name", trim(name)},
                      {"hash", hash},
                      {"role", bundle_.officer_role}}}};
    });
    std::string token = new_session_token();
    std::lock_guard g(sessions_mutex_);
    sessions_[token] = e["data"]["id"];
    return token;
}

std::string CaseService::login(const std::string& name, const std::string& secret) {
    std::optional<User> found;
    {
        std::shared_lock store(store_mutex_);
        for (const auto& [_, u] : users_)
            if (u.name == trim(name)) found = u;
    }
    if (!found || !verify_secret(found->credential_hash, secret))
        throw ServiceError(401, "invalid_credentials", "invalid credentials");
    std::string token = new_session_token();
    std::lock_guard g(sessions_mutex_);
    sessions_[token] = found->id;
    return token;
}

User CaseService::authenticate(const std::string& token) const {
    std::string id;
    {
        std::lock_guard g(sessions_mutex_);
        auto it = sessions_.find(token);
        if (token.empty() || it == sessions_.end())
            throw ServiceError(401, "unauthenticated", "missing or unknown session token");
        id = it->second;
    }
    std::shared_lock store(store_mutex_);
    return users_.at(id);
}

void CaseService::logout(const std::string& token) {
    std::lock_guard g(sessions_mutex_);
    sessions_.erase(token);
}

// ---------------------------------------------------------------- cases

std::map<std::string, FactValue> CaseService::validate_answers(const json& answers, bool intake,
                                                               std::vector<std::string>& fields) const {
    std::map<std::string, FactValue> out;
    if (!answers.is_object()) {
        fields.push_back("antwoorden");
        return out;
    }
    for (const auto& [key, value] : answers.items()) {
        const auto* q = bundle_.schema.find(key);
        if (!q) {
            fields.push_back(key);
            continue;
        }
        if (value.is_null()) {
            if (!q->allows_unknown)
                fields.push_back(key);
            else
                out[key] = std::nullopt;
            continue;
        }
        try {
            out[key] = engine::scalar_from_json(value, q->type);
        } catch (const FormatError&) {
            fields.push_back(key);
        }
    }
    if (intake)
        for (const auto& q : bundle_.schema.questions)
            if (q.required && !answers.contains(q.fact)) fields.push_back(q.fact);
    return out;
}

std::shared_ptr<const Case> CaseService::create_case(const User& user, const CaseInput& in) {
    const DateTime at = clock_();
    const Date today = at.date();
    std::vector<std::string> fields;

    std::optional<std::string> client_id;
    std::string client_name = trim(in.client_name.value_or(""));
    policy::ClientKind kind = policy::ClientKind::Civilian;
    if (in.client_id) {
        std::shared_lock store(store_mutex_);
        if (!clients_.count(*in.client_id)) fields.push_back("klant");
        client_id = in.client_id;
    } else {
        if (client_name.empty()) fields.push_back("naam klant");
        auto k = policy::client_kind_from_string(in.client_kind.value_or("civilian"));
        if (!k)
            fields.push_back("soort klant");
        else
            kind = *k;
    }
    std::string case_type = in.case_type.value_or(bundle_.case_type);
    if (case_type != bundle_.case_type) fields.push_back("zaaktype");

    std::optional<Date> created_on = today;
    if (in.created_on) {
        created_on = Date::parse(*in.created_on);
        if (!created_on || *created_on > today) fields.push_back("aanmaakdatum");
    }
    std::optional<Date> decision_term;
    if (in.decision_term) {
        decision_term = Date::parse(*in.decision_term);
        if (!decision_term || (created_on && *decision_term < *created_on)) fields.push_back("beslistermijn");
    } else if (created_on) {
        decision_term = created_on->plus_days(config_.decision_period_for(case_type));
    }
    auto answers = validate_answers(in.answers, true, fields);
    if (!fields.empty()) throw invalid(fields);

    json e = commit([&] {
        json data{{"caseId", next_id("zaak", case_counter_)},
                  {"caseType", case_type},
                  {"createdOn", created_on->str()},
                  {"decisionTerm", decision_term->str()},
                  {"notes", in.notes},
                  {"answers", answers_json(answers)}};
        if (client_id) {
            data["clientId"] = *client_id;
        } else {
            data["clientId"] = next_id("klant", client_counter_);
            data["newClient"] = {{"name", client_name}, {"kind", policy::to_string(kind)}};
        }
        return json{{"type", "case_created"}, {"at", at.str()}, {"user", user.id}, {"data", data}};
    });
    return require_case(e["data"]["caseId"]);
}

std::shared_ptr<const Case> CaseService::edit_case(const User& user, const std::string& id, const CaseEdit& edit) {
    auto lock = entity_lock("case:" + id);
    std::lock_guard g(*lock);
    auto c = require_case(id);
    std::vector<std::string> fields;
    auto answers = validate_answers(edit.answers, false, fields);
    std::optional<Date> term;
    if (edit.decision_term) {
        term = Date::parse(*edit.decision_term);
        if (!term || *term < c->created_on) fields.push_back("beslistermijn");
    }
    if (edit.client_name && trim(*edit.client_name).empty()) fields.push_back("naam klant");
    if (!fields.empty()) throw invalid(fields);

    const DateTime at = clock_();
    commit([&] {
        json data{{"caseId", id}, {"answers", answers_json(answers)}};
        if (term) data["decisionTerm"] = term->str();
        if (edit.notes) data["notes"] = *edit.notes;
        if (edit.client_name) data["clientName"] = trim(*edit.client_name);
        return json{{"type", "case_edited"}, {"at", at.str()}, {"user", user.id}, {"data", data}};
    });
    return require_case(id);
}

engine::NormativeStatus CaseService::status_now(const Case& c, const std::string& act, Date today) const {
    return engine_.action_status(engine_.check_duties(c.state, today).state, act);
}

std::shared_ptr<const Case> CaseService::execute_action(const User& user, const std::string& id,
                                                        const std::string& act,
                                                        const std::optional<std::string>& motivation) {
    auto lock = entity_lock("case:" + id);
    std::lock_guard g(*lock);
    auto c = require_case(id);
    if (!bundle_.spec.find_act(act)) throw ServiceError(404, "not_found", "unknown act '" + act + "'", {"act"});
    if (c->state.executed(act))
        throw ServiceError(409, "already_executed", "act '" + act + "' has already been executed");
    if (is_decision_act(act) && c->outcome)
        throw ServiceError(409, "already_decided", "a decision has already been taken on this case");
    const DateTime at = clock_();
    auto status = status_now(*c, act, at.date());
    bool blank = !motivation || trim(*motivation).empty();
    if (status.status != Status::Allowed && blank) {
        json reasons = json::array();
        for (const auto& r : status.reasons)
            reasons.push_back({{"clause", r.clause}, {"value", engine::to_string(r.value)}});
        throw ServiceError(400, "motivation_required",
                           "act '" + act + "' is " + std::string(engine::to_string(status.status)) +
                               "; a motivation is required",
                           {"motivation"}, {{"status", engine::to_string(status.status)}, {"reasons", reasons}});
    }
    commit([&] {
        json data{{"caseId", id}, {"act", act}};
        if (!blank) data["motivation"] = *motivation;
        return json{{"type", "action_executed"}, {"at", at.str()}, {"user", user.id}, {"data", data}};
    });
    return require_case(id);
}

std::size_t CaseService::sweep_duties() {
    std::vector<std::string> ids;
    {
        std::shared_lock store(store_mutex_);
        for (const auto& [id, _] : cases_) ids.push_back(id);
    }
    std::size_t affected = 0;
    for (const auto& id : ids) {
        auto lock = entity_lock("case:" + id);
        std::lock_guard g(*lock);
        auto c = require_case(id);
        const DateTime at = clock_();
        if (engine_.check_duties(c->state, at.date()).violations.empty()) continue;
        commit([&] {
            return json{{"type", "duties_checked"}, {"at", at.str()}, {"user", kSystemUser}, {"data", {{"caseId", id}}}};
        });
        ++affected;
    }
    return affected;
}

std::shared_ptr<const Case> CaseService::require_case(const std::string& id) const {
    std::shared_lock store(store_mutex_);
    auto it = cases_.find(id);
    if (it == cases_.end()) throw not_found("case '" + id + "'");
    return it->second;
}

std::shared_ptr<const Case> CaseService::get_case(const std::string& id) const { return require_case(id); }

Client CaseService::get_client(const std::string& id) const {
    std::shared_lock store(store_mutex_);
    auto it = clients_.find(id);
    if (it == clients_.end()) throw not_found("client '" + id + "'");
    return it->second;
}

bool CaseService::is_decision_act(std::string_view act) const {
    const auto* decl = bundle_.spec.find_act(act);
    if (!decl) return false;
    for (const auto& eff : decl->creates)
        for (const auto& [fact, _] : kOutcomeFacts)
            if (eff.target.name == fact) return true;
    return false;
}

CaseStatus CaseService::status_of(const Case& c) const {
    for (const auto& h : c.state.history)
        if (is_decision_act(h.act)) return CaseStatus::Afgerond;
    for (const auto& d : c.state.duties)
        if (!d.fulfilled && d.holder != bundle_.officer_role) return CaseStatus::WachtenOpBericht;
    return CaseStatus::InBehandeling;
}

CaseSummary CaseService::summarize(const Case& c, Date today) const {
    CaseSummary s;
    s.id = c.id;
    {
        std::shared_lock store(store_mutex_);
        auto it = clients_.find(c.client_id);
        if (it != clients_.end()) s.client_name = it->second.name;
    }
    s.case_type = c.case_type;
    s.status = status_of(c);
    s.created_on = c.created_on;
    s.decision_term = c.decision_term;
    s.urgency = compute_urgency(c.decision_term, today, config_.urgency);
    s.last_modified = c.last_modified;
    s.violations = c.state.violations.size();
    if (s.status != CaseStatus::Afgerond) {
        std::optional<std::string> indefinite;
        for (const auto& [act, st] : engine_.available_actions(c.state)) {
            if (st.status == Status::Allowed) {
                s.next_action = act->name;
                break;
            }
            if (st.status == Status::Indefinite && !indefinite) indefinite = act->name;
        }
        if (!s.next_action) s.next_action = indefinite;
    }
    return s;
}

CasePage CaseService::list_cases(const CaseQuery& q) const {
    static const char* keys[] = {"naam", "termijn", "actie", "gewijzigd"};
    if (std::find(std::begin(keys), std::end(keys), q.sort) == std::end(keys))
        throw ServiceError(400, "invalid_sort", "unknown sort key '" + q.sort + "'", {"sort"});
    std::vector<std::shared_ptr<const Case>> all;
    {
        std::shared_lock store(store_mutex_);
        for (const auto& [_, c] : cases_) all.push_back(c);
    }
    const Date today = clock_().date();
    const std::string needle = lower(trim(q.text));
    std::vector<CaseSummary> rows;
    for (const auto& c : all) {
        auto s = summarize(*c, today);
        if (q.status && s.status != *q.status) continue;
        if (q.from && s.decision_term < *q.from) continue;
        if (q.to && s.decision_term > *q.to) continue;
        if (!needle.empty() && lower(s.client_name).find(needle) == std::string::npos &&
            lower(s.id).find(needle) == std::string::npos)
            continue;
        rows.push_back(std::move(s));
    }
    auto key_cmp = [&](const CaseSummary& a, const CaseSummary& b) -> int {
        auto three = [](const auto& x, const auto& y) { return x < y ? -1 : (y < x ? 1 : 0); };
        if (q.sort == "naam") return three(lower(a.client_name), lower(b.client_name));
        if (q.sort == "termijn") return three(a.decision_term, b.decision_term);
        if (q.sort == "actie") return three(a.next_action.value_or(""), b.next_action.value_or(""));
        return three(a.last_modified, b.last_modified);
    };
    std::sort(rows.begin(), rows.end(), [&](const CaseSummary& a, const CaseSummary& b) {
        int c = key_cmp(a, b);
        if (c != 0) return q.descending ? c > 0 : c < 0;
        return a.id < b.id;
    });
    CasePage page;
    page.total = rows.size();
    std::size_t begin = std::min(q.offset, rows.size());
    std::size_t end = q.limit ? std::min(rows.size(), begin + *q.limit) : rows.size();
    page.items.assign(rows.begin() + static_cast<long>(begin), rows.begin() + static_cast<long>(end));
    return page;
}

std::vector<OpenAction> CaseService::open_actions(const User&) const {
    CaseQuery q;
    q.sort = "termijn";
    std::vector<OpenAction> out;
    for (auto& s : list_cases(q).items) {
        if (s.status != CaseStatus::InBehandeling || !s.next_action) continue;
        std::string act = *s.next_action;
        out.push_back({std::move(s), std::move(act)});
    }
    return out;
}

std::vector<dsl::SourceRef> CaseService::list_sources() const {
    auto out = bundle_.spec.all_sources();
    std::shared_lock store(store_mutex_);
    for (const auto& s : manual_sources_)
        if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
    return out;
}

void CaseService::add_source(const User& user, const dsl::SourceRef& source) {
    std::vector<std::string> fields;
    if (trim(source.title).empty()) fields.push_back("title");
    if (source.url && trim(*source.url).empty()) fields.push_back("url");
    if (!fields.empty()) throw invalid(fields);
    const DateTime at = clock_();
    commit([&] {
        return json{{"type", "source_added"},
                    {"at", at.str()},
                    {"user", user.id},
                    {"data", {{"source", engine::source_to_json(source)}}}};
    });
}

// ---------------------------------------------------------------- scenarios

namespace {

ServiceError simulation_error(const SimulationError& e) {
    switch (e.code()) {
        case SimulationErrorCode::UnknownRule:
        case SimulationErrorCode::UnknownVersion:
        case SimulationErrorCode::UnknownNode: return ServiceError(404, "not_found", e.what());
        case SimulationErrorCode::DepthOutOfRange: return ServiceError(400, "depth_out_of_range", e.what(), {"depth"});
        case SimulationErrorCode::InvalidRule: {
            json diags = json::array();
            for (const auto& d : e.diagnostics())
                diags.push_back({{"line", d.loc.line},
                                 {"column", d.loc.column},
                                 {"code", dsl::to_string(d.code)},
                                 {"message", d.message}});
            return ServiceError(400, "invalid_rule", e.what(), {"text"}, {{"diagnostics", diags}});
        }
    }
    return ServiceError(400, "invalid_rule", e.what());
}

}  // namespace

std::shared_ptr<const Scenario> CaseService::require_scenario(const std::string& id) const {
    std::shared_lock store(store_mutex_);
    auto it = scenarios_.find(id);
    if (it == scenarios_.end()) throw not_found("scenario '" + id + "'");
    return it->second;
}

std::shared_ptr<const Scenario> CaseService::get_scenario(const std::string& id) const { return require_scenario(id); }

std::shared_ptr<const Scenario> CaseService::create_scenario(const User& user, const std::string& label,
                                                             const std::optional<std::string>& case_id) {
    const DateTime at = clock_();
    NormState base;
    if (case_id)
        base = require_case(*case_id)->state;
    else
        base = engine_.init_state(bundle_.parameters, at.date());
    json e = commit([&] {
        return json{{"type", "scenario_created"},
                    {"at", at.str()},
                    {"user", user.id},
                    {"data",
                     {{"id", next_id("sim", scenario_counter_)},
                      {"label", trim(label).empty() ? std::string("Scenario") : trim(label)},
                      {"sourceCase", case_id ? json(*case_id) : json(nullptr)},
                      {"baseState", engine::state_to_json(base)}}}};
    });
    return require_scenario(e["data"]["id"]);
}

std::shared_ptr<const Scenario> CaseService::add_rule_version(const User& user, const std::string& id,
                                                              const std::string& rule_id, const std::string& text) {
    auto lock = entity_lock("scenario:" + id);
    std::lock_guard g(*lock);
    auto s = require_scenario(id);
    const DateTime at = clock_();
    try {
        simulation::add_rule_version(*s, bundle_.spec, rule_id, text, at);
    } catch (const SimulationError& e) {
        throw simulation_error(e);
    }
    commit([&] {
        return json{{"type", "rule_version_added"},
                    {"at", at.str()},
                    {"user", user.id},
                    {"data", {{"scenarioId", id}, {"ruleId", rule_id}, {"text", text}}}};
    });
    return require_scenario(id);
}

std::shared_ptr<const Scenario> CaseService::toggle_rule(const User& user, const std::string& id,
                                                         const std::string& rule_id,
                                                         const std::optional<std::string>& version_id) {
    auto lock = entity_lock("scenario:" + id);
    std::lock_guard g(*lock);
    auto s = require_scenario(id);
    try {
        simulation::toggle_rule(*s, rule_id, version_id);
    } catch (const SimulationError& e) {
        throw simulation_error(e);
    }
    const DateTime at = clock_();
    commit([&] {
        return json{{"type", "rule_toggled"},
                    {"at", at.str()},
                    {"user", user.id},
                    {"data",
                     {{"scenarioId", id},
                      {"ruleId", rule_id},
                      {"versionId", version_id ? json(*version_id) : json(nullptr)}}}};
    });
    return require_scenario(id);
}

simulation::ActionTree CaseService::scenario_tree(const std::string& id, int depth) const {
    auto s = require_scenario(id);
    try {
        return simulation::build_tree(bundle_.spec, *s, depth,
                                      simulation::TreeOptions{config_.tree_max_depth, config_.tree_node_cap});
    } catch (const SimulationError& e) {
        throw simulation_error(e);
    }
}

json CaseService::explain_node(const std::string& id, std::size_t node, int depth) const {
    auto s = require_scenario(id);
    auto tree = scenario_tree(id, depth);
    try {
        return simulation::explanation_to_json(
            simulation::explain_node(*s, tree, node, simulation::effective_spec(bundle_.spec, *s)));
    } catch (const SimulationError& e) {
        throw simulation_error(e);
    }
}

// ---------------------------------------------------------------- views

json CaseService::summary_json(const CaseSummary& s) const {
    return {{"id", s.id},
            {"naam", s.client_name},
            {"caseType", s.case_type},
            {"status", to_string(s.status)},
            {"createdOn", s.created_on.str()},
            {"termijn", s.decision_term.str()},
            {"urgency",
             {{"clock", to_string(s.urgency.clock)},
              {"overdue", s.urgency.overdue},
              {"daysRemaining", s.urgency.days_remaining}}},
            {"actie", s.next_action ? json(*s.next_action) : json(nullptr)},
            {"gewijzigd", s.last_modified.str()},
            {"violations", s.violations}};
}

json CaseService::case_json(const Case& c) const {
    auto client = get_client(c.client_id);
    auto summary = summarize(c, clock_().date());
    json violations = json::array();
    for (const auto& v : c.state.violations) violations.push_back(engine::violation_to_json(v));
    json audit = json::array();
    for (const auto& a : c.audit) audit.push_back(audit_json(a));
    json j = summary_json(summary);
    j["client"] = {{"id", client.id}, {"name", client.name}, {"kind", policy::to_string(client.kind)}};
    j["decisionTerm"] = c.decision_term.str();
    j["lastModified"] = c.last_modified.str();
    j["notes"] = c.notes;
    j["answers"] = answers_json(c.answers);
    j["outcome"] = c.outcome ? json(to_string(*c.outcome)) : json(nullptr);
    j["violationDetails"] = violations;
    j["audit"] = audit;
    j["normState"] = engine::state_to_json(c.state);
    return j;
}

json CaseService::actions_json(const Case& c) const {
    json afgerond = json::array();
    for (const auto& h : c.state.history) {
        const auto* decl = bundle_.spec.find_act(h.act);
        json item{{"naam", h.act},
                  {"status", dutch_status(h.status_at_execution)},
                  {"bronnen", sources_json(decl ? decl->sources : std::vector<dsl::SourceRef>{})},
                  {"uitgevoerdOp", h.at.str()},
                  {"uitgevoerdDoor", h.actor},
                  {"motivation", h.motivation ? json(*h.motivation) : json(nullptr)}};
        for (const auto& v : c.state.violations)
            if (v.kind == engine::ViolationKind::NonPermittedExecution && v.subject == h.act && v.at == h.at)
                item["violation"] = engine::violation_to_json(v);
        afgerond.push_back(std::move(item));
    }
    json vervolg = json::array();
    for (const auto& [act, st] : engine_.available_actions(c.state)) {
        json reasons = json::array();
        for (const auto& r : st.reasons)
            reasons.push_back({{"clause", r.clause}, {"value", engine::to_string(r.value)}});
        vervolg.push_back({{"naam", act->name},
                           {"status", dutch_status(st.status)},
                           {"bronnen", sources_json(act->sources)},
                           {"redenen", reasons},
                           {"motivationRequired", st.status != Status::Allowed}});
    }
    return {{"afgerond", afgerond}, {"vervolg", vervolg}};
}

json CaseService::user_json(const User& u) const { return {{"id", u.id}, {"name", u.name}, {"role", u.role}}; }

// ---------------------------------------------------------------- snapshots

json CaseService::snapshot_json() const {
    std::shared_lock store(store_mutex_);
    return snapshot_unlocked();
}

json CaseService::snapshot_unlocked() const {
    json users = json::array();
    for (const auto& [_, u] : users_)
        users.push_back({{"id", u.id}, {"name", u.name}, {"hash", u.credential_hash}, {"role", u.role}});
    json clients = json::array();
    for (const auto& [_, c] : clients_)
        clients.push_back({{"id", c.id}, {"name", c.name}, {"kind", policy::to_string(c.kind)}});
    json cases = json::array();
    for (const auto& [_, c] : cases_) cases.push_back(case_store_json(*c));
    json scenarios = json::array();
    for (const auto& [_, s] : scenarios_) scenarios.push_back(simulation::scenario_to_json(*s));
    return {{"seq", seq_},
            {"counters",
             {{"cases", case_counter_},
              {"clients", client_counter_},
              {"users", user_counter_},
              {"scenarios", scenario_counter_}}},
            {"users", users},
            {"clients", clients},
            {"cases", cases},
            {"sources", sources_json(manual_sources_)},
            {"scenarios", scenarios}};
}

void CaseService::load_snapshot(const json& j) {
    try {
        seq_ = snapshot_seq_ = j.at("seq").get<std::uint64_t>();
        const auto& counters = j.at("counters");
        case_counter_ = counters.at("cases");
        client_counter_ = counters.at("clients");
        user_counter_ = counters.at("users");
        scenario_counter_ = counters.at("scenarios");
        for (const auto& u : j.at("users")) users_[u.at("id")] = User{u.at("id"), u.at("name"), u.at("hash"), u.at("role")};
        for (const auto& c : j.at("clients")) {
            auto kind = policy::client_kind_from_string(c.at("kind").get<std::string>());
            if (!kind) throw FormatError("bad client kind");
            clients_[c.at("id")] = Client{c.at("id"), c.at("name"), *kind};
        }
        for (const auto& cj : j.at("cases")) {
            auto c = std::make_shared<Case>();
            c->id = cj.at("id");
            c->client_id = cj.at("clientId");
            c->case_type = cj.at("caseType");
            c->created_on = date_field(cj, "createdOn");
            c->decision_term = date_field(cj, "decisionTerm");
            auto lm = DateTime::parse(cj.at("lastModified").get<std::string>());
            if (!lm) throw FormatError("bad lastModified");
            c->last_modified = *lm;
            c->notes = cj.at("notes");
            for (auto& [ref, value] : engine::assignments_from_json(cj.at("answers"), bundle_.spec))
                c->answers[dsl::instance_key(ref)] = value;
            c->state = engine::state_from_json(cj.at("state"), bundle_.spec);
            if (!cj.at("outcome").is_null()) c->outcome = decision_outcome_from_string(cj["outcome"].get<std::string>());
            for (const auto& a : cj.at("audit")) {
                auto at = DateTime::parse(a.at("at").get<std::string>());
                if (!at) throw FormatError("bad audit timestamp");
                c->audit.push_back({*at, a.at("user"), a.at("action"), a.at("detail")});
            }
            put_case(std::move(c));
        }
        for (const auto& s : j.at("sources")) manual_sources_.push_back(engine::source_from_json(s));
        for (const auto& s : j.at("scenarios"))
            put_scenario(std::make_shared<Scenario>(simulation::scenario_from_json(s, bundle_.spec)));
    } catch (const json::exception& e) {
        throw StoreError(std::string("corrupt snapshot: ") + e.what());
    } catch (const FormatError& e) {
        throw StoreError(std::string("corrupt snapshot: ") + e.what());
    }
}

void CaseService::seed_if_empty() {
    if (last_seq() != 0) return;
    User system{kSystemUser, kSystemUser, "", bundle_.officer_role};
    for (const auto& f : bundle_.fixtures) {
        if (!f.seed) continue;
        CaseInput in;
        in.client_name = f.client_name;
        in.client_kind = std::string(policy::to_string(f.client_kind));
        in.case_type = f.case_type;
        in.notes = f.description;
        in.answers = answers_json(f.answers);
        auto c = create_case(system, in);
        for (const auto& step : f.steps) execute_action(system, c->id, step.act, step.motivation);
    }
}

}  // namespace normcase::service
