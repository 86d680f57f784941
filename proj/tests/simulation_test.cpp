#include <gtest/gtest.h>

#include "normcase/engine/serialize.hpp"
#include "normcase/policy/bundle.hpp"
#include "normcase/simulation/simulation.hpp"
#include "tree_oracle.hpp"

using namespace normcase;
using namespace normcase::simulation;

namespace {

const policy::PolicyBundle& bundle() {
    static const policy::PolicyBundle b = policy::load_bundled_policy();
    return b;
}

const DateTime kAt = DateTime::start_of(Date(2024, 5, 13));

Scenario fixture_scenario(const std::string& fixture = "usertest-goal1") {
    engine::Engine engine(bundle().spec);
    Scenario s;
    s.id = "s1";
    s.label = "test";
    auto answers = bundle().find_fixture(fixture)->answers;
    auto assignments = bundle().case_assignments(answers);
    assignments.emplace_back(dsl::FactRef{"decision-term", {}}, Scalar(Date(2024, 7, 8)));
    s.base_state = engine.impose_duty(engine.init_state(assignments, Date(2024, 5, 13)), "decide-on-request");
    s.rules = seed_rule_groups(bundle().spec, kAt);
    return s;
}

std::map<std::string, normcase::testing::OraclePath> tree_paths(const ActionTree& tree) {
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
        EXPECT_TRUE(out.emplace(key[n.id], p).second) << "duplicate path " << key[n.id];
    }
    return out;
}

void expect_same(const std::map<std::string, normcase::testing::OraclePath>& a,
                 const std::map<std::string, normcase::testing::OraclePath>& b) {
    ASSERT_EQ(a.size(), b.size());
    for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib) {
        ASSERT_EQ(ia->first, ib->first);
        EXPECT_EQ(ia->second.status, ib->second.status) << ia->first;
        EXPECT_EQ(ia->second.motivation_required, ib->second.motivation_required) << ia->first;
        EXPECT_EQ(ia->second.expanded, ib->second.expanded) << ia->first;
        EXPECT_EQ(ia->second.digest, ib->second.digest) << ia->first;
    }
}

const char* kRelaxedSingleGrant = R"(act grant-iit-single
  actor officer
  recipient applicant
  conditioned by registered-in-municipality and age >= min-age and age < max-age and long-term-low-income
    and single and not child-at-home and income <= 2000 and wealth <= wealth-threshold-single
  creates approved
  terminates decide-on-request
  source "Proefregel ruimere inkomensgrens" url "https://example.org/proef"
)";

}  // namespace

TEST(Scenario, SeedsOneActiveGroupPerDeclaration) {
    auto s = fixture_scenario();
    EXPECT_EQ(s.rules.size(), bundle().spec.acts.size() + bundle().spec.duties.size());
    for (const auto& g : s.rules) {
        ASSERT_EQ(g.versions.size(), 1u);
        EXPECT_EQ(g.active_version, "v1");
    }
    EXPECT_EQ(effective_spec(bundle().spec, s), bundle().spec);
}

TEST(Scenario, DeactivateAllLeavesNoActsAndARootOnlyTree) {
    auto s = fixture_scenario();
    for (const auto& g : std::vector<RuleGroup>(s.rules)) s = toggle_rule(s, g.rule_id, std::nullopt);
    EXPECT_TRUE(effective_spec(bundle().spec, s).acts.empty());
    auto tree = build_tree(bundle().spec, s, 3);
    EXPECT_EQ(tree.nodes.size(), 1u);
}

TEST(Scenario, ToggleErrors) {
    auto s = fixture_scenario();
    EXPECT_THROW(toggle_rule(s, "nope", std::nullopt), SimulationError);
    EXPECT_THROW(toggle_rule(s, "reject-iit", std::string("v9")), SimulationError);
}

TEST(Scenario, AddVersionKeepsActiveVersion) {
    auto s = fixture_scenario();
    auto t = add_rule_version(s, bundle().spec, "grant-iit-single", kRelaxedSingleGrant, kAt);
    const auto* g = t.find_rule("grant-iit-single");
    ASSERT_EQ(g->versions.size(), 2u);
    EXPECT_EQ(g->versions[1].version_id, "v2");
    EXPECT_EQ(g->active_version, "v1");
    try {
        add_rule_version(s, bundle().spec, "grant-iit-single", "act grant-iit-single conditioned by bogus", kAt);
        FAIL();
    } catch (const SimulationError& e) {
        EXPECT_EQ(e.code(), SimulationErrorCode::InvalidRule);
        EXPECT_FALSE(e.diagnostics().empty());
    }
    EXPECT_THROW(add_rule_version(s, bundle().spec, "reject-iit", kRelaxedSingleGrant, kAt), SimulationError);
    EXPECT_THROW(add_rule_version(s, bundle().spec, "nope", kRelaxedSingleGrant, kAt), SimulationError);
}

TEST(Scenario, RelaxedVersionOpensANewAllowedPath) {
    // income 1500 with no child at home exceeds the configured single threshold
    auto s = fixture_scenario();
    engine::Engine engine(bundle().spec);
    s.base_state = engine.assign_fact(s.base_state, {"child-at-home", {}}, Scalar(false));
    s.base_state = engine.assign_fact(s.base_state, {"income", {}}, Scalar(std::int64_t{1500}));
    auto allowed_at_root = [](const ActionTree& t) {
        std::vector<std::string> out;
        for (const auto& n : t.nodes)
            if (n.depth == 1 && n.status->status == Status::Allowed) out.push_back(n.act);
        return out;
    };
    auto before = build_tree(bundle().spec, s, 1);
    EXPECT_EQ(allowed_at_root(before), std::vector<std::string>{"reject-iit"});
    s = add_rule_version(s, bundle().spec, "grant-iit-single", kRelaxedSingleGrant, kAt);
    s = toggle_rule(s, "grant-iit-single", std::string("v2"));
    auto after = build_tree(bundle().spec, s, 1);
    EXPECT_EQ(allowed_at_root(after), (std::vector<std::string>{"grant-iit-single", "reject-iit"}));

    auto eff = effective_spec(bundle().spec, s);
    std::size_t grant = 0;
    for (const auto& n : after.nodes)
        if (n.act == "grant-iit-single") grant = n.id;
    auto e = explain_node(s, after, grant, eff);
    ASSERT_EQ(e.versions.size(), 1u);
    EXPECT_EQ(e.versions[0].second, "v2");
    ASSERT_EQ(e.sources.size(), 1u);
    EXPECT_EQ(e.sources[0].title, "Proefregel ruimere inkomensgrens");

    auto again = toggle_rule(s, "grant-iit-single", std::string("v2"));
    EXPECT_EQ(tree_to_json(build_tree(bundle().spec, again, 2)), tree_to_json(build_tree(bundle().spec, s, 2)));
}

TEST(BuildTree, DepthBounds) {
    auto s = fixture_scenario();
    EXPECT_THROW(build_tree(bundle().spec, s, 0), SimulationError);
    EXPECT_THROW(build_tree(bundle().spec, s, 5), SimulationError);
    EXPECT_NO_THROW(build_tree(bundle().spec, s, 4));
}

TEST(BuildTree, MatchesBruteForceEnumeration) {
    for (const char* fixture : {"usertest-goal1", "registered-unknown", "usertest1"}) {
        auto s = fixture_scenario(fixture);
        engine::Engine engine(bundle().spec);
        for (int d = 1; d <= 3; ++d) {
            auto tree = build_tree(bundle().spec, s, d);
            EXPECT_FALSE(tree.truncated);
            expect_same(tree_paths(tree), normcase::testing::enumerate_paths(engine, s.base_state, d));
        }
    }
}

TEST(BuildTree, EdgesAgreeWithEngineExecute) {
    auto s = fixture_scenario("registered-unknown");
    engine::Engine engine(bundle().spec);
    auto tree = build_tree(bundle().spec, s, 3);
    for (const auto& n : tree.nodes) {
        if (!n.parent || !n.expanded) continue;
        const auto& parent = *tree.states[*n.parent];
        std::optional<std::string> m;
        if (n.motivation_required) m = std::string(kSimulatedMotivation);
        auto r = engine.execute(parent, n.act, engine.spec().find_act(n.act)->actor,
                                DateTime::start_of(parent.clock), m);
        ASSERT_EQ(engine::state_digest(r.state), n.digest);
    }
}

TEST(BuildTree, DeactivatingARuleNeverAddsNodes) {
    auto s = fixture_scenario("registered-unknown");
    auto full = build_tree(bundle().spec, s, 3).nodes.size();
    for (const auto& g : s.rules) {
        auto t = toggle_rule(s, g.rule_id, std::nullopt);
        EXPECT_LE(build_tree(bundle().spec, t, 3).nodes.size(), full) << g.rule_id;
    }
}

TEST(BuildTree, NodeCapTruncates) {
    auto s = fixture_scenario("registered-unknown");
    auto tree = build_tree(bundle().spec, s, 4, TreeOptions{4, 10});
    EXPECT_TRUE(tree.truncated);
    EXPECT_EQ(tree.nodes.size(), 10u);
}

TEST(BuildTree, JsonContract) {
    auto s = fixture_scenario();
    auto j = tree_to_json(build_tree(bundle().spec, s, 2));
    ASSERT_GT(j["nodes"].size(), 1u);
    const auto& root = j["nodes"][0];
    EXPECT_EQ(root["id"], 0);
    EXPECT_TRUE(root["parent"].is_null());
    EXPECT_TRUE(root["act"].is_null());
    for (const auto& n : j["nodes"])
        for (const char* key : {"id", "parent", "act", "status", "motivationRequired"}) EXPECT_TRUE(n.contains(key));
}

TEST(ExplainNode, RootAndUnknownNode) {
    auto s = fixture_scenario("usertest1");
    auto tree = build_tree(bundle().spec, s, 1);
    auto eff = effective_spec(bundle().spec, s);
    auto root = explain_node(s, tree, 0, eff);
    EXPECT_TRUE(root.act.empty());
    EXPECT_TRUE(root.versions.empty());
    EXPECT_THROW(explain_node(s, tree, tree.nodes.size(), eff), SimulationError);
}

TEST(Scenario, JsonRoundTrip) {
    auto s = add_rule_version(fixture_scenario(), bundle().spec, "grant-iit-single", kRelaxedSingleGrant, kAt);
    s = toggle_rule(s, "reject-iit", std::nullopt);
    auto j = scenario_to_json(s);
    auto back = scenario_from_json(j, bundle().spec);
    EXPECT_EQ(scenario_to_json(back), j);
    EXPECT_EQ(effective_spec(bundle().spec, back), effective_spec(bundle().spec, s));
}
