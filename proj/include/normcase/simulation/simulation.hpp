#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "normcase/dsl/parser.hpp"
#include "normcase/engine/engine.hpp"

namespace normcase::simulation {

using dsl::RuleDecl;
using engine::NormativeStatus;
using engine::NormState;
using engine::Status;
using json = nlohmann::json;

struct RuleVersion {
    std::string version_id;
    RuleDecl decl;
    std::string text;
    DateTime created_at;
};

/// All versions of one act or duty declaration, keyed by its name.
struct RuleGroup {
    std::string rule_id;
    bool is_act = true;
    std::vector<RuleVersion> versions;
    std::optional<std::string> active_version;

    const RuleVersion* find(std::string_view version_id) const;
    const RuleVersion* active() const;
};

struct Scenario {
    std::string id;
    std::string label;
    std::optional<std::string> source_case;
    NormState base_state;
    std::vector<RuleGroup> rules;

    const RuleGroup* find_rule(std::string_view rule_id) const;
};

enum class SimulationErrorCode { UnknownRule, UnknownVersion, InvalidRule, DepthOutOfRange, UnknownNode };

class SimulationError : public std::runtime_error {
public:
    SimulationError(SimulationErrorCode code, const std::string& what,
                    std::vector<dsl::Diagnostic> diagnostics = {})
        : std::runtime_error(what), code_(code), diagnostics_(std::move(diagnostics)) {}

    SimulationErrorCode code() const { return code_; }
    const std::vector<dsl::Diagnostic>& diagnostics() const { return diagnostics_; }

private:
    SimulationErrorCode code_;
    std::vector<dsl::Diagnostic> diagnostics_;
};

/// One group per act and duty of `spec`, each with an active version "v1".
std::vector<RuleGroup> seed_rule_groups(const dsl::NormSpec& spec, DateTime at);

/// Facts and top-level sources of `base` plus the active declarations.
dsl::NormSpec effective_spec(const dsl::NormSpec& base, const Scenario& scenario);

/// Activates `version_id` in the group, or deactivates it when nullopt.
Scenario toggle_rule(Scenario scenario, std::string_view rule_id, const std::optional<std::string>& version_id);

/// Appends a new inactive version; the text must declare the same rule.
Scenario add_rule_version(Scenario scenario, const dsl::NormSpec& base, std::string_view rule_id,
                          std::string_view text, DateTime at);

struct TreeNode {
    std::size_t id = 0;
    std::optional<std::size_t> parent;
    std::string act;
    int depth = 0;
    std::optional<NormativeStatus> status;
    bool motivation_required = false;
    /// False for NotAllowed annotations, which are never executed.
    bool expanded = true;
    std::optional<std::string> digest;
};

struct ActionTree {
    int depth = 0;
    bool truncated = false;
    std::vector<TreeNode> nodes;
    /// States of expanded nodes, indexed like `nodes`.
    std::vector<std::optional<NormState>> states;
};

struct TreeOptions {
    int max_depth = 4;
    std::size_t node_cap = 10000;
};

/// Breadth-first expansion of every unexecuted act from `base`. Allowed and
/// Indefinite acts are executed (Indefinite with a placeholder motivation);
/// NotAllowed acts are leaf annotations.
ActionTree build_tree(const engine::Engine& engine, const NormState& base, int depth, const TreeOptions& opts = {});
ActionTree build_tree(const dsl::NormSpec& base, const Scenario& scenario, int depth,
                      const TreeOptions& opts = {});

/// Motivation attached to non-Allowed executions inside the tree.
inline constexpr std::string_view kSimulatedMotivation = "simulated execution";

struct NodeExplanation {
    std::size_t node = 0;
    std::string act;
    std::optional<NormativeStatus> status;
    std::vector<std::pair<std::string, std::string>> versions;
    std::vector<dsl::SourceRef> sources;
    std::vector<std::string> executed;
    std::size_t violations = 0;
};

NodeExplanation explain_node(const Scenario& scenario, const ActionTree& tree, std::size_t node,
                             const dsl::NormSpec& effective);

json tree_to_json(const ActionTree& tree);
json explanation_to_json(const NodeExplanation& e);
json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const json& j, const dsl::NormSpec& base);

}  // namespace normcase::simulation
