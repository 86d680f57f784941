#include "normcase/engine/serialize.hpp"

#include <cstdio>

#include "normcase/dsl/parser.hpp"

namespace normcase::engine {

namespace {

template <typename T>
T required(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw FormatError(std::string("field '") + key + "' has the wrong type");
    }
}

std::optional<std::string> optional_string(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    if (!j.at(key).is_string()) throw FormatError(std::string("field '") + key + "' must be a string");
    return j.at(key).get<std::string>();
}

Date parse_date(const std::string& s) {
    auto d = Date::parse(s);
    if (!d) throw FormatError("invalid date '" + s + "'");
    return *d;
}

DateTime parse_datetime(const std::string& s) {
    auto d = DateTime::parse(s);
    if (!d) throw FormatError("invalid date-time '" + s + "'");
    return *d;
}

std::string_view kind_name(ViolationKind k) {
    return k == ViolationKind::NonPermittedExecution ? "non_permitted_execution" : "duty_violated";
}

}  // namespace

json scalar_to_json(const Scalar& v) {
    switch (type_of(v)) {
        case ScalarType::Boolean: return std::get<bool>(v);
        case ScalarType::Integer: return std::get<std::int64_t>(v);
        case ScalarType::Text: return std::get<std::string>(v);
        case ScalarType::Date: return std::get<Date>(v).str();
    }
    return nullptr;
}

Scalar scalar_from_json(const json& j, ScalarType type) {
    switch (type) {
        case ScalarType::Boolean:
            if (j.is_boolean()) return j.get<bool>();
            break;
        case ScalarType::Integer:
            if (j.is_number_integer()) return j.get<std::int64_t>();
            break;
        case ScalarType::Text:
            if (j.is_string()) return j.get<std::string>();
            break;
        case ScalarType::Date:
            if (j.is_string())
                if (auto d = Date::parse(j.get<std::string>())) return *d;
            break;
    }
    throw FormatError("expected " + std::string(to_string(type)) + ", got " + j.dump());
}

json source_to_json(const dsl::SourceRef& s) {
    json j{{"title", s.title}};
    j["url"] = s.url ? json(*s.url) : json(nullptr);
    j["applicableFrom"] = s.applicable_from ? json(s.applicable_from->str()) : json(nullptr);
    return j;
}

dsl::SourceRef source_from_json(const json& j) {
    dsl::SourceRef s;
    s.title = required<std::string>(j, "title");
    if (s.title.empty()) throw FormatError("source title must not be empty");
    s.url = optional_string(j, "url");
    if (auto from = optional_string(j, "applicableFrom")) s.applicable_from = parse_date(*from);
    return s;
}

json violation_to_json(const Violation& v) {
    json sources = json::array();
    for (const auto& s : v.sources) sources.push_back(source_to_json(s));
    return {{"kind", kind_name(v.kind)},
            {"subject", v.subject},
            {"at", v.at.str()},
            {"motivation", v.motivation ? json(*v.motivation) : json(nullptr)},
            {"sources", sources},
            {"clauses", v.clauses},
            {"explanation", v.explanation}};
}

Violation violation_from_json(const json& j) {
    Violation v;
    auto kind = required<std::string>(j, "kind");
    if (kind == kind_name(ViolationKind::NonPermittedExecution))
        v.kind = ViolationKind::NonPermittedExecution;
    else if (kind == kind_name(ViolationKind::DutyViolated))
        v.kind = ViolationKind::DutyViolated;
    else
        throw FormatError("unknown violation kind '" + kind + "'");
    v.subject = required<std::string>(j, "subject");
    v.at = parse_datetime(required<std::string>(j, "at"));
    v.motivation = optional_string(j, "motivation");
    if (j.contains("sources"))
        for (const auto& s : j.at("sources")) v.sources.push_back(source_from_json(s));
    if (j.contains("clauses"))
        for (const auto& c : j.at("clauses")) {
            if (!c.is_string()) throw FormatError("violation clauses must be strings");
            v.clauses.push_back(c.get<std::string>());
        }
    v.explanation = required<std::string>(j, "explanation");
    return v;
}

json state_to_json(const NormState& state) {
    json assignments = json::object();
    for (const auto& [key, value] : state.assignments) assignments[key] = scalar_to_json(value);
    json duties = json::array();
    for (const auto& d : state.duties)
        duties.push_back({{"duty", d.duty},
                          {"holder", d.holder},
                          {"claimant", d.claimant},
                          {"deadline", d.deadline ? json(d.deadline->str()) : json(nullptr)},
                          {"fulfilled", d.fulfilled},
                          {"violatedAt", d.violated_at ? json(d.violated_at->str()) : json(nullptr)}});
    json history = json::array();
    for (const auto& h : state.history)
        history.push_back({{"act", h.act},
                           {"actor", h.actor},
                           {"at", h.at.str()},
                           {"status", to_string(h.status_at_execution)},
                           {"motivation", h.motivation ? json(*h.motivation) : json(nullptr)}});
    json violations = json::array();
    for (const auto& v : state.violations) violations.push_back(violation_to_json(v));
    return {{"assignments", assignments},
            {"duties", duties},
            {"history", history},
            {"violations", violations},
            {"clock", state.clock.str()}};
}

std::vector<Assignment> assignments_from_json(const json& j, const NormSpec& spec) {
    if (!j.is_object()) throw FormatError("assignments must be an object");
    std::vector<Assignment> out;
    for (const auto& [key, value] : j.items()) {
        auto ref = dsl::parse_fact_ref(key);
        if (!ref) throw FormatError("malformed fact key '" + key + "'");
        const auto* decl = spec.find_fact(ref->name);
        if (!decl) throw FormatError("unknown fact '" + ref->name + "'");
        if (value.is_null())
            out.emplace_back(*ref, std::nullopt);
        else
            try {
                out.emplace_back(*ref, scalar_from_json(value, decl->type));
            } catch (const FormatError& e) {
                throw FormatError("fact '" + key + "': " + e.what());
            }
    }
    return out;
}

NormState state_from_json(const json& j, const NormSpec& spec) {
    if (!j.is_object()) throw FormatError("state must be a JSON object");
    NormState state;
    state.clock = parse_date(required<std::string>(j, "clock"));
    if (j.contains("assignments"))
        for (auto& [ref, value] : assignments_from_json(j.at("assignments"), spec))
            if (value) state.assignments[dsl::instance_key(ref)] = *value;
    if (j.contains("duties"))
        for (const auto& d : j.at("duties")) {
            DutyInstance inst;
            inst.duty = required<std::string>(d, "duty");
            inst.holder = required<std::string>(d, "holder");
            inst.claimant = required<std::string>(d, "claimant");
            if (auto dl = optional_string(d, "deadline")) inst.deadline = parse_date(*dl);
            inst.fulfilled = required<bool>(d, "fulfilled");
            if (auto va = optional_string(d, "violatedAt")) inst.violated_at = parse_date(*va);
            state.duties.push_back(std::move(inst));
        }
    if (j.contains("history"))
        for (const auto& h : j.at("history")) {
            ExecutedAction e;
            e.act = required<std::string>(h, "act");
            e.actor = required<std::string>(h, "actor");
            e.at = parse_datetime(required<std::string>(h, "at"));
            auto st = status_from_string(required<std::string>(h, "status"));
            if (!st) throw FormatError("unknown status in history");
            e.status_at_execution = *st;
            e.motivation = optional_string(h, "motivation");
            state.history.push_back(std::move(e));
        }
    if (j.contains("violations"))
        for (const auto& v : j.at("violations")) state.violations.push_back(violation_from_json(v));
    return state;
}

std::string state_digest(const NormState& state) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : state_to_json(state).dump()) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace normcase::engine
