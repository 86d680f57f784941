#include "normcase/simulation/simulation.hpp"

#include <deque>

#include "normcase/engine/serialize.hpp"

namespace normcase::simulation {

namespace {

const std::string& decl_name(const RuleDecl& d) {
    return std::visit([](const auto& x) -> const std::string& { return x.name; }, d);
}

RuleGroup* find_group(Scenario& s, std::string_view rule_id) {
    for (auto& g : s.rules)
        if (g.rule_id == rule_id) return &g;
    return nullptr;
}

json status_json(const NormativeStatus& st) {
    json reasons = json::array();
    for (const auto& r : st.reasons) {
        json sources = json::array();
        for (const auto& src : r.sources) sources.push_back(engine::source_to_json(src));
        reasons.push_back({{"clause", r.clause}, {"value", engine::to_string(r.value)}, {"sources", sources}});
    }
    return {{"status", engine::to_string(st.status)}, {"reasons", reasons}};
}

}  // namespace

const RuleVersion* RuleGroup::find(std::string_view version_id) const {
    for (const auto& v : versions)
        if (v.version_id == version_id) return &v;
    return nullptr;
}

const RuleVersion* RuleGroup::active() const { return active_version ? find(*active_version) : nullptr; }

const RuleGroup* Scenario::find_rule(std::string_view rule_id) const {
    for (const auto& g : rules)
        if (g.rule_id == rule_id) return &g;
    return nullptr;
}

std::vector<RuleGroup> seed_rule_groups(const dsl::NormSpec& spec, DateTime at) {
    std::vector<RuleGroup> out;
    for (const auto& a : spec.acts)
        out.push_back({a.name, true, {{"v1", a, dsl::print_act(a), at}}, "v1"});
    for (const auto& d : spec.duties)
        out.push_back({d.name, false, {{"v1", d, dsl::print_duty(d), at}}, "v1"});
    return out;
}

dsl::NormSpec effective_spec(const dsl::NormSpec& base, const Scenario& scenario) {
    dsl::NormSpec out;
    out.facts = base.facts;
    out.sources = base.sources;
    for (const auto& g : scenario.rules) {
        const auto* v = g.active();
        if (!v) continue;
        if (const auto* a = std::get_if<dsl::ActDecl>(&v->decl))
            out.acts.push_back(*a);
        else
            out.duties.push_back(std::get<dsl::DutyDecl>(v->decl));
    }
    return out;
}

Scenario toggle_rule(Scenario scenario, std::string_view rule_id, const std::optional<std::string>& version_id) {
    auto* g = find_group(scenario, rule_id);
    if (!g) throw SimulationError(SimulationErrorCode::UnknownRule, "unknown rule '" + std::string(rule_id) + "'");
    if (version_id && !g->find(*version_id))
        throw SimulationError(SimulationErrorCode::UnknownVersion,
                              "rule '" + g->rule_id + "' has no version '" + *version_id + "'");
    g->active_version = version_id;
    return scenario;
}

Scenario add_rule_version(Scenario scenario, const dsl::NormSpec& base, std::string_view rule_id,
                          std::string_view text, DateTime at) {
    auto* g = find_group(scenario, rule_id);
    if (!g) throw SimulationError(SimulationErrorCode::UnknownRule, "unknown rule '" + std::string(rule_id) + "'");
    auto r = dsl::validate_rule_text(text, base);
    if (!r.ok()) throw SimulationError(SimulationErrorCode::InvalidRule, "rule text has errors", r.diagnostics);
    bool is_act = std::holds_alternative<dsl::ActDecl>(*r.decl);
    if (decl_name(*r.decl) != g->rule_id || is_act != g->is_act)
        throw SimulationError(SimulationErrorCode::InvalidRule, "a version of '" + g->rule_id + "' must declare " +
                                                                    (g->is_act ? "act " : "duty ") + g->rule_id);
    std::string id = "v" + std::to_string(g->versions.size() + 1);
    while (g->find(id)) id += "'";
    g->versions.push_back({id, *r.decl, std::string(text), at});
    return scenario;
}

ActionTree build_tree(const engine::Engine& engine, const NormState& base, int depth, const TreeOptions& opts) {
    if (depth < 1 || depth > opts.max_depth)
        throw SimulationError(SimulationErrorCode::DepthOutOfRange,
                              "depth must be between 1 and " + std::to_string(opts.max_depth));
    ActionTree tree;
    tree.depth = depth;
    tree.nodes.push_back(TreeNode{0, std::nullopt, "", 0, std::nullopt, false, true, engine::state_digest(base)});
    tree.states.emplace_back(base);

    std::deque<std::size_t> queue{0};
    while (!queue.empty()) {
        std::size_t parent = queue.front();
        queue.pop_front();
        if (tree.nodes[parent].depth >= depth) continue;
        // copy: push_back below may reallocate
        NormState state = *tree.states[parent];
        DateTime at = DateTime::start_of(state.clock);
        for (const auto& [act, status] : engine.available_actions(state)) {
            if (tree.nodes.size() >= opts.node_cap) {
                tree.truncated = true;
                return tree;
            }
            TreeNode node;
            node.id = tree.nodes.size();
            node.parent = parent;
            node.act = act->name;
            node.depth = tree.nodes[parent].depth + 1;
            node.status = status;
            if (status.status == Status::NotAllowed) {
                node.expanded = false;
                tree.nodes.push_back(std::move(node));
                tree.states.emplace_back();
                continue;
            }
            std::optional<std::string> motivation;
            if (status.status == Status::Indefinite) {
                node.motivation_required = true;
                motivation = std::string(kSimulatedMotivation);
            }
            auto result = engine.execute(state, act->name, act->actor, at, motivation);
            node.digest = engine::state_digest(result.state);
            tree.nodes.push_back(std::move(node));
            tree.states.emplace_back(std::move(result.state));
            queue.push_back(tree.nodes.size() - 1);
        }
    }
    return tree;
}

ActionTree build_tree(const dsl::NormSpec& base, const Scenario& scenario, int depth, const TreeOptions& opts) {
    engine::Engine engine(effective_spec(base, scenario));
    return build_tree(engine, scenario.base_state, depth, opts);
}

NodeExplanation explain_node(const Scenario& scenario, const ActionTree& tree, std::size_t node,
                             const dsl::NormSpec& effective) {
    if (node >= tree.nodes.size())
        throw SimulationError(SimulationErrorCode::UnknownNode, "unknown node " + std::to_string(node));
    const auto& n = tree.nodes[node];
    NodeExplanation e;
    e.node = node;
    e.act = n.act;
    e.status = n.status;
    const NormState* state = tree.states[node] ? &*tree.states[node] : nullptr;
    if (!state && n.parent) state = &*tree.states[*n.parent];
    if (state) {
        for (const auto& h : state->history) e.executed.push_back(h.act);
        e.violations = state->violations.size();
    }
    if (n.act.empty()) return e;
    if (const auto* g = scenario.find_rule(n.act))
        if (g->active_version) e.versions.emplace_back(g->rule_id, *g->active_version);
    if (const auto* act = effective.find_act(n.act)) e.sources = act->sources;
    return e;
}

json tree_to_json(const ActionTree& tree) {
    json nodes = json::array();
    for (const auto& n : tree.nodes) {
        json j;
        j["id"] = n.id;
        j["parent"] = n.parent ? json(*n.parent) : json(nullptr);
        j["act"] = n.act.empty() ? json(nullptr) : json(n.act);
        j["status"] = n.status ? json(engine::to_string(n.status->status)) : json(nullptr);
        j["motivationRequired"] = n.motivation_required;
        j["depth"] = n.depth;
        j["expanded"] = n.expanded;
        j["digest"] = n.digest ? json(*n.digest) : json(nullptr);
        nodes.push_back(std::move(j));
    }
    return {{"depth", tree.depth}, {"truncated", tree.truncated}, {"nodes", nodes}};
}

json explanation_to_json(const NodeExplanation& e) {
    json versions = json::array();
    for (const auto& [rule, version] : e.versions) versions.push_back({{"ruleId", rule}, {"versionId", version}});
    json sources = json::array();
    for (const auto& s : e.sources) sources.push_back(engine::source_to_json(s));
    json j{{"node", e.node},
           {"act", e.act.empty() ? json(nullptr) : json(e.act)},
           {"versions", versions},
           {"sources", sources},
           {"executed", e.executed},
           {"violations", e.violations}};
    if (e.status) {
        auto st = status_json(*e.status);
        j["status"] = st["status"];
        j["clauses"] = st["reasons"];
    } else {
        j["status"] = nullptr;
        j["clauses"] = json::array();
    }
    return j;
}

json scenario_to_json(const Scenario& s) {
    json rules = json::array();
    for (const auto& g : s.rules) {
        json versions = json::array();
        for (const auto& v : g.versions)
            versions.push_back({{"versionId", v.version_id}, {"text", v.text}, {"createdAt", v.created_at.str()}});
        rules.push_back({{"ruleId", g.rule_id},
                         {"kind", g.is_act ? "act" : "duty"},
                         {"activeVersion", g.active_version ? json(*g.active_version) : json(nullptr)},
                         {"versions", versions}});
    }
    return {{"id", s.id},
            {"label", s.label},
            {"sourceCase", s.source_case ? json(*s.source_case) : json(nullptr)},
            {"baseState", engine::state_to_json(s.base_state)},
            {"rules", rules}};
}

Scenario scenario_from_json(const json& j, const dsl::NormSpec& base) {
    Scenario s;
    try {
        s.id = j.at("id").get<std::string>();
        s.label = j.at("label").get<std::string>();
        if (!j.at("sourceCase").is_null()) s.source_case = j["sourceCase"].get<std::string>();
        s.base_state = engine::state_from_json(j.at("baseState"), base);
        for (const auto& g : j.at("rules")) {
            RuleGroup group;
            group.rule_id = g.at("ruleId").get<std::string>();
            group.is_act = g.at("kind").get<std::string>() == "act";
            if (!g.at("activeVersion").is_null()) group.active_version = g["activeVersion"].get<std::string>();
            for (const auto& v : g.at("versions")) {
                auto text = v.at("text").get<std::string>();
                auto r = dsl::validate_rule_text(text, base);
                if (!r.ok()) throw engine::FormatError("stored rule version does not parse: " + group.rule_id);
                auto at = DateTime::parse(v.at("createdAt").get<std::string>());
                if (!at) throw engine::FormatError("bad createdAt");
                group.versions.push_back({v.at("versionId").get<std::string>(), *r.decl, text, *at});
            }
            s.rules.push_back(std::move(group));
        }
    } catch (const nlohmann::json::exception& e) {
        throw engine::FormatError(std::string("scenario: ") + e.what());
    }
    return s;
}

}  // namespace normcase::simulation
