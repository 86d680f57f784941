#include "normcase/policy/bundle.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "normcase/core/kv_file.hpp"
#include "normcase/dsl/parser.hpp"
#include "normcase/engine/serialize.hpp"

#ifndef NORMCASE_POLICY_DIR
#define NORMCASE_POLICY_DIR "policy"
#endif

namespace normcase::policy {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw BundleError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const fs::path& path) {
    try {
        return json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw BundleError(path.string() + ": " + e.what());
    }
}

QuestionSchema load_schema(const fs::path& path, const dsl::NormSpec& spec) {
    QuestionSchema schema;
    json j = read_json(path);
    if (!j.contains("questions") || !j["questions"].is_array())
        throw BundleError(path.string() + ": expected a `questions` array");
    for (const auto& q : j["questions"]) {
        Question out;
        try {
            out.fact = q.at("fact").get<std::string>();
            out.prompt = q.at("prompt").get<std::string>();
            auto type = scalar_type_from_string(q.at("type").get<std::string>());
            if (!type) throw BundleError("unknown answer type for question '" + out.fact + "'");
            out.type = *type;
            out.required = q.value("required", true);
            out.allows_unknown = q.value("allowsUnknown", false);
        } catch (const json::exception& e) {
            throw BundleError(path.string() + ": " + e.what());
        }
        const auto* decl = spec.find_fact(out.fact);
        if (!decl) throw BundleError(path.string() + ": question '" + out.fact + "' names no declared fact");
        if (!decl->params.empty())
            throw BundleError(path.string() + ": question '" + out.fact + "' refers to a parameterised fact");
        if (decl->type != out.type)
            throw BundleError(path.string() + ": question '" + out.fact + "' has type " +
                              std::string(to_string(out.type)) + " but the fact is " +
                              std::string(to_string(decl->type)));
        if (schema.find(out.fact)) throw BundleError(path.string() + ": duplicate question '" + out.fact + "'");
        schema.questions.push_back(std::move(out));
    }
    return schema;
}

Fixture load_fixture(const fs::path& path, const PolicyBundle& bundle) {
    json j = read_json(path);
    Fixture f;
    try {
        f.name = j.value("name", path.stem().string());
        f.description = j.value("description", "");
        f.seed = j.value("seed", false);
        f.client_name = j.at("client").at("name").get<std::string>();
        auto kind = client_kind_from_string(j.at("client").value("kind", "civilian"));
        if (!kind) throw BundleError(path.string() + ": unknown client kind");
        f.client_kind = *kind;
        f.case_type = j.value("caseType", bundle.case_type);
        for (auto& [ref, value] : engine::assignments_from_json(j.value("answers", json::object()), bundle.spec))
            f.answers[dsl::instance_key(ref)] = value;
        for (const auto& step : j.value("steps", json::array())) {
            FixtureStep s;
            s.act = step.at("execute").get<std::string>();
            if (step.contains("motivation")) s.motivation = step["motivation"].get<std::string>();
            if (!bundle.spec.find_act(s.act)) throw BundleError(path.string() + ": unknown act '" + s.act + "'");
            f.steps.push_back(std::move(s));
        }
    } catch (const json::exception& e) {
        throw BundleError(path.string() + ": " + e.what());
    } catch (const engine::FormatError& e) {
        throw BundleError(path.string() + ": " + e.what());
    }
    for (const auto& [fact, _] : f.answers)
        if (!bundle.schema.find(fact)) throw BundleError(path.string() + ": '" + fact + "' is not a question");
    return f;
}

}  // namespace

const Question* QuestionSchema::find(std::string_view fact) const {
    for (const auto& q : questions)
        if (q.fact == fact) return &q;
    return nullptr;
}

std::string_view to_string(ClientKind k) {
    switch (k) {
        case ClientKind::Civilian: return "civilian";
        case ClientKind::Organisation: return "organisation";
        case ClientKind::Government: return "government";
    }
    return "civilian";
}

std::optional<ClientKind> client_kind_from_string(std::string_view s) {
    if (s == "civilian") return ClientKind::Civilian;
    if (s == "organisation") return ClientKind::Organisation;
    if (s == "government") return ClientKind::Government;
    return std::nullopt;
}

std::string_view to_string(Household h) {
    switch (h) {
        case Household::Single: return "single";
        case Household::SingleParent: return "single-parent";
        case Household::Couple: return "couple";
    }
    return "single";
}

std::optional<Household> household_from_string(std::string_view s) {
    if (s == "single") return Household::Single;
    if (s == "single-parent") return Household::SingleParent;
    if (s == "couple") return Household::Couple;
    return std::nullopt;
}

const Fixture* PolicyBundle::find_fixture(std::string_view fixture) const {
    for (const auto& f : fixtures)
        if (f.name == fixture) return &f;
    return nullptr;
}

std::vector<engine::Assignment> PolicyBundle::case_assignments(const std::map<std::string, FactValue>& answers) const {
    std::vector<engine::Assignment> out = parameters;
    for (const auto& [fact, value] : answers) out.emplace_back(dsl::FactRef{fact, {}}, value);
    return out;
}

PolicyBundle load_policy_bundle(const fs::path& spec_path) {
    PolicyBundle b;
    b.spec_path = spec_path;
    b.spec_text = read_text(spec_path);
    auto parsed = dsl::parse_spec({b.spec_text, spec_path.string()});
    if (!parsed.ok()) {
        std::string msg = "specification has errors:";
        for (const auto& d : parsed.diagnostics) msg += "\n  " + dsl::format_diagnostic(d, spec_path.string());
        throw BundleError(msg);
    }
    b.spec = std::move(*parsed.spec);

    fs::path dir = spec_path.parent_path();
    std::string stem = spec_path.stem().string();

    fs::path params_path = dir / (stem + ".params.toml");
    KvFile params = [&] {
        try {
            return KvFile::load(params_path);
        } catch (const KvFile::Error& e) {
            throw BundleError(e.what());
        }
    }();
    try {
        b.name = params.get_string("bundle", "name").value_or(stem);
        b.case_type = params.get_string("bundle", "case-type").value_or(stem);
        b.decision_duty = params.get_string("bundle", "decision-duty").value_or("");
        b.officer_role = params.get_string("bundle", "officer-role").value_or("officer");
    } catch (const KvFile::Error& e) {
        throw BundleError(e.what());
    }
    if (!b.decision_duty.empty() && !b.spec.find_duty(b.decision_duty))
        throw BundleError(params_path.string() + ": decision duty '" + b.decision_duty + "' is not declared");

    engine::Engine engine(b.spec);
    for (const auto& [key, raw] : params.section("facts")) {
        const auto* decl = b.spec.find_fact(key);
        if (!decl) throw BundleError(params_path.string() + ": parameter '" + key + "' names no declared fact");
        Scalar value = std::visit([](const auto& v) -> Scalar { return v; }, raw);
        if (decl->type == ScalarType::Date)
            if (const auto* s = std::get_if<std::string>(&value))
                if (auto d = Date::parse(*s)) value = *d;
        try {
            engine.check_assignment({key, {}}, value);
        } catch (const engine::EngineError& e) {
            throw BundleError(params_path.string() + ": " + e.what());
        }
        b.parameters.emplace_back(dsl::FactRef{key, {}}, value);
    }
    for (const auto& [key, raw] : params.section("amounts")) {
        auto h = household_from_string(key);
        const auto* amount = std::get_if<std::int64_t>(&raw);
        if (!h || !amount) throw BundleError(params_path.string() + ": bad amount entry '" + key + "'");
        b.amounts[*h] = *amount;
    }

    b.schema = load_schema(dir / (stem + ".questions.json"), b.spec);
    for (const auto& q : b.schema.questions)
        for (const auto& p : b.parameters)
            if (p.first.name == q.fact) throw BundleError("question '" + q.fact + "' is also a parameter");

    fs::path fixtures_dir = dir / "fixtures";
    if (fs::is_directory(fixtures_dir)) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(fixtures_dir))
            if (entry.path().extension() == ".json") files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) b.fixtures.push_back(load_fixture(f, b));
    }
    return b;
}

fs::path bundled_policy_dir() { return fs::path(NORMCASE_POLICY_DIR); }

PolicyBundle load_bundled_policy() { return load_policy_bundle(bundled_policy_dir() / "iit.norm"); }

std::int64_t decision_amount(Household household, const PolicyBundle& bundle) {
    auto it = bundle.amounts.find(household);
    if (it == bundle.amounts.end())
        throw BundleError("no amount configured for household '" + std::string(to_string(household)) + "'");
    return it->second;
}

}  // namespace normcase::policy
