#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "normcase/engine/engine.hpp"
#include "normcase/policy/bundle.hpp"
#include "normcase/service/config.hpp"
#include "normcase/service/event_log.hpp"
#include "normcase/service/urgency.hpp"
#include "normcase/simulation/simulation.hpp"

namespace normcase::service {

using json = nlohmann::json;

/// Error surfaced to API clients as `{error, fields?}` with an HTTP status.
class ServiceError : public std::runtime_error {
public:
    ServiceError(int http_status, std::string code, const std::string& message, std::vector<std::string> fields = {},
                 json details = nullptr)
        : std::runtime_error(message),
          http_status_(http_status),
          code_(std::move(code)),
          fields_(std::move(fields)),
          details_(std::move(details)) {}

    int http_status() const { return http_status_; }
    const std::string& code() const { return code_; }
    const std::vector<std::string>& fields() const { return fields_; }
    const json& details() const { return details_; }

private:
    int http_status_;
    std::string code_;
    std::vector<std::string> fields_;
    json details_;
};

struct User {
    std::string id;
    std::string name;
    std::string credential_hash;
    std::string role = "officer";
};

struct Client {
    std::string id;
    std::string name;
    policy::ClientKind kind = policy::ClientKind::Civilian;
};

struct AuditEvent {
    DateTime at;
    std::string user;
    std::string action;
    std::string detail;

    friend bool operator==(const AuditEvent&, const AuditEvent&) = default;
};

enum class CaseStatus { InBehandeling, WachtenOpBericht, Afgerond };
std::string_view to_string(CaseStatus s);
std::optional<CaseStatus> case_status_from_string(std::string_view s);

enum class DecisionOutcome { Approved, Denied, NotTakenIntoAccount };
std::string_view to_string(DecisionOutcome o);
std::optional<DecisionOutcome> decision_outcome_from_string(std::string_view s);

struct Case {
    std::string id;
    std::string client_id;
    std::string case_type;
    Date created_on;
    Date decision_term;
    DateTime last_modified;
    std::string notes;
    std::map<std::string, FactValue> answers;
    engine::NormState state;
    std::optional<DecisionOutcome> outcome;
    std::vector<AuditEvent> audit;
};

/// Raw intake fields; validation happens in create_case so that every
/// problem is reported at once.
struct CaseInput {
    std::optional<std::string> client_id;
    std::optional<std::string> client_name;
    std::optional<std::string> client_kind;
    std::optional<std::string> case_type;
    std::optional<std::string> created_on;
    std::optional<std::string> decision_term;
    std::string notes;
    json answers = json::object();
};

struct CaseEdit {
    json answers = json::object();
    std::optional<std::string> notes;
    std::optional<std::string> decision_term;
    std::optional<std::string> client_name;
};

struct CaseQuery {
    std::optional<CaseStatus> status;
    std::optional<Date> from;
    std::optional<Date> to;
    std::string text;
    std::string sort = "termijn";
    bool descending = false;
    std::size_t offset = 0;
    std::optional<std::size_t> limit;
};

struct CaseSummary {
    std::string id;
    std::string client_name;
    std::string case_type;
    CaseStatus status = CaseStatus::InBehandeling;
    Date created_on;
    Date decision_term;
    Urgency urgency;
    std::optional<std::string> next_action;
    DateTime last_modified;
    std::size_t violations = 0;
};

struct CasePage {
    std::vector<CaseSummary> items;
    std::size_t total = 0;
};

struct OpenAction {
    CaseSummary summary;
    std::string act;
};

class CaseService {
public:
    using Clock = std::function<DateTime()>;

    /// Opens (or creates) the store in config.data_dir and replays it.
    CaseService(ServiceConfig config, policy::PolicyBundle bundle, Clock clock = &DateTime::now);

    CaseService(const CaseService&) = delete;
    CaseService& operator=(const CaseService&) = delete;

    const ServiceConfig& config() const { return config_; }
    const policy::PolicyBundle& bundle() const { return bundle_; }
    const engine::Engine& engine() const { return engine_; }
    DateTime now() const { return clock_(); }

    std::string register_user(const std::string& name, const std::string& secret);
    std::string login(const std::string& name, const std::string& secret);
    User authenticate(const std::string& token) const;
    void logout(const std::string& token);

    std::shared_ptr<const Case> create_case(const User& user, const CaseInput& input);
    std::shared_ptr<const Case> edit_case(const User& user, const std::string& id, const CaseEdit& edit);
    std::shared_ptr<const Case> execute_action(const User& user, const std::string& id, const std::string& act,
                                               const std::optional<std::string>& motivation);
    /// Records a duty check on every case whose duties became violated.
    /// Returns the number of such cases.
    std::size_t sweep_duties();

    std::shared_ptr<const Case> get_case(const std::string& id) const;
    Client get_client(const std::string& id) const;
    CasePage list_cases(const CaseQuery& query) const;
    std::vector<OpenAction> open_actions(const User& user) const;

    std::vector<dsl::SourceRef> list_sources() const;
    void add_source(const User& user, const dsl::SourceRef& source);

    std::shared_ptr<const simulation::Scenario> create_scenario(const User& user, const std::string& label,
                                                                const std::optional<std::string>& case_id);
    std::shared_ptr<const simulation::Scenario> get_scenario(const std::string& id) const;
    std::shared_ptr<const simulation::Scenario> add_rule_version(const User& user, const std::string& id,
                                                                 const std::string& rule_id, const std::string& text);
    std::shared_ptr<const simulation::Scenario> toggle_rule(const User& user, const std::string& id,
                                                            const std::string& rule_id,
                                                            const std::optional<std::string>& version_id);
    simulation::ActionTree scenario_tree(const std::string& id, int depth) const;
    json explain_node(const std::string& id, std::size_t node, int depth) const;

    CaseStatus status_of(const Case& c) const;
    bool is_decision_act(std::string_view act) const;
    CaseSummary summarize(const Case& c, Date today) const;

    json summary_json(const CaseSummary& s) const;
    json case_json(const Case& c) const;
    json actions_json(const Case& c) const;
    json user_json(const User& u) const;

    /// Canonical dump of the whole store; equal stores dump to equal bytes.
    json snapshot_json() const;
    void write_snapshot();
    std::uint64_t last_seq() const;

    /// Creates the bundle's seed fixtures when the store has no events yet.
    void seed_if_empty();

private:
    std::shared_ptr<std::mutex> entity_lock(const std::string& key) const;
    /// Builds an event under the log lock, appends it and applies it.
    json commit(const std::function<json()>& build);
    void apply(const json& event);
    void apply_case_created(const json& e);
    void apply_case_edited(const json& e);
    void apply_action_executed(const json& e);
    void apply_duties_checked(const json& e);
    void put_case(std::shared_ptr<const Case> c);
    void put_scenario(std::shared_ptr<const simulation::Scenario> s);
    std::string next_id(const char* prefix, std::uint64_t& counter);

    std::map<std::string, FactValue> validate_answers(const json& answers, bool intake,
                                                      std::vector<std::string>& fields) const;
    std::shared_ptr<const Case> require_case(const std::string& id) const;
    std::shared_ptr<const simulation::Scenario> require_scenario(const std::string& id) const;
    engine::NormativeStatus status_now(const Case& c, const std::string& act, Date today) const;
    json snapshot_unlocked() const;
    void load_snapshot(const json& j);
    void rotate_snapshot_if_due();

    ServiceConfig config_;
    policy::PolicyBundle bundle_;
    engine::Engine engine_;
    Clock clock_;
    EventLog log_;

    mutable std::shared_mutex store_mutex_;
    std::map<std::string, std::shared_ptr<const Case>> cases_;
    std::map<std::string, Client> clients_;
    std::map<std::string, User> users_;
    std::vector<dsl::SourceRef> manual_sources_;
    std::map<std::string, std::shared_ptr<const simulation::Scenario>> scenarios_;
    std::uint64_t case_counter_ = 0;
    std::uint64_t client_counter_ = 0;
    std::uint64_t user_counter_ = 0;
    std::uint64_t scenario_counter_ = 0;

    std::mutex commit_mutex_;
    std::uint64_t seq_ = 0;
    std::uint64_t snapshot_seq_ = 0;

    mutable std::mutex locks_mutex_;
    mutable std::map<std::string, std::shared_ptr<std::mutex>> entity_locks_;

    mutable std::mutex sessions_mutex_;
    std::map<std::string, std::string> sessions_;
};

}  // namespace normcase::service
