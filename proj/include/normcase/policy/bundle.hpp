#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "normcase/dsl/ast.hpp"
#include "normcase/engine/engine.hpp"

namespace normcase::policy {

struct Question {
    std::string fact;
    std::string prompt;
    ScalarType type = ScalarType::Boolean;
    bool required = true;
    bool allows_unknown = false;
};

struct QuestionSchema {
    std::vector<Question> questions;

    const Question* find(std::string_view fact) const;
};

enum class ClientKind { Civilian, Organisation, Government };

std::string_view to_string(ClientKind k);
std::optional<ClientKind> client_kind_from_string(std::string_view s);

struct FixtureStep {
    std::string act;
    std::optional<std::string> motivation;
};

struct Fixture {
    std::string name;
    std::string description;
    /// Seed fixtures are created as cases when the service starts on an empty store.
    bool seed = false;
    std::string client_name;
    ClientKind client_kind = ClientKind::Civilian;
    std::string case_type;
    /// Answer per question fact; nullopt is an explicit "unknown".
    std::map<std::string, FactValue> answers;
    std::vector<FixtureStep> steps;
};

enum class Household { Single, SingleParent, Couple };

std::string_view to_string(Household h);
std::optional<Household> household_from_string(std::string_view s);

struct PolicyBundle {
    std::filesystem::path spec_path;
    std::string name;
    std::string case_type;
    std::string decision_duty;
    std::string officer_role;
    std::string spec_text;
    dsl::NormSpec spec;
    QuestionSchema schema;
    /// Parameter values injected as facts into every case state.
    std::vector<engine::Assignment> parameters;
    std::map<Household, std::int64_t> amounts;
    std::vector<Fixture> fixtures;

    const Fixture* find_fixture(std::string_view name) const;
    /// Parameters followed by the given answers, ready for Engine::init_state.
    std::vector<engine::Assignment> case_assignments(const std::map<std::string, FactValue>& answers) const;
};

class BundleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Loads `<stem>.norm` with its sibling `<stem>.questions.json`,
/// `<stem>.params.toml` and `fixtures/*.json`.
PolicyBundle load_policy_bundle(const std::filesystem::path& spec_path);

/// The IIT bundle shipped in the source tree's policy directory.
PolicyBundle load_bundled_policy();
std::filesystem::path bundled_policy_dir();

std::int64_t decision_amount(Household household, const PolicyBundle& bundle);

}  // namespace normcase::policy
