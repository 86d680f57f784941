#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "normcase/core/date.hpp"
#include "normcase/core/value.hpp"
#include "normcase/dsl/ast.hpp"
#include "normcase/engine/truth.hpp"

namespace normcase::engine {

using dsl::ActDecl;
using dsl::DutyDecl;
using dsl::Expr;
using dsl::FactRef;
using dsl::NormSpec;
using dsl::SourceRef;

enum class Status { Allowed, NotAllowed, Indefinite };

std::string_view to_string(Status s);
std::optional<Status> status_from_string(std::string_view s);

/// True -> Allowed, False -> NotAllowed, Unknown -> Indefinite.
constexpr Status status_of(TruthValue v) {
    switch (v) {
        case TruthValue::True: return Status::Allowed;
        case TruthValue::False: return Status::NotAllowed;
        default: return Status::Indefinite;
    }
}

struct Reason {
    std::string clause;
    TruthValue value = TruthValue::Unknown;
    std::vector<SourceRef> sources;

    friend bool operator==(const Reason&, const Reason&) = default;
};

struct NormativeStatus {
    Status status = Status::Indefinite;
    std::vector<Reason> reasons;

    friend bool operator==(const NormativeStatus&, const NormativeStatus&) = default;
};

struct DutyInstance {
    std::string duty;
    std::string holder;
    std::string claimant;
    std::optional<Date> deadline;
    bool fulfilled = false;
    std::optional<Date> violated_at;

    friend bool operator==(const DutyInstance&, const DutyInstance&) = default;
};

struct ExecutedAction {
    std::string act;
    std::string actor;
    DateTime at;
    Status status_at_execution = Status::Allowed;
    std::optional<std::string> motivation;

    friend bool operator==(const ExecutedAction&, const ExecutedAction&) = default;
};

enum class ViolationKind { NonPermittedExecution, DutyViolated };

struct Violation {
    ViolationKind kind = ViolationKind::NonPermittedExecution;
    std::string subject;
    DateTime at;
    std::optional<std::string> motivation;
    std::vector<SourceRef> sources;
    /// Clauses that were not true when the violation arose.
    std::vector<std::string> clauses;
    std::string explanation;

    friend bool operator==(const Violation&, const Violation&) = default;
};

/// Knowledge state of one case. Absent assignment keys are Unknown.
struct NormState {
    std::map<std::string, Scalar, std::less<>> assignments;
    std::vector<DutyInstance> duties;
    std::vector<ExecutedAction> history;
    std::vector<Violation> violations;
    Date clock;

    bool executed(std::string_view act) const;
    FactValue value_of(const FactRef& ref) const;

    friend bool operator==(const NormState&, const NormState&) = default;
};

enum class EngineErrorCode { TypeMismatch, UnknownFact, UnknownAct, UnknownDuty, MotivationRequired, AlreadyExecuted };

class EngineError : public std::runtime_error {
public:
    EngineError(EngineErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    EngineErrorCode code() const { return code_; }

private:
    EngineErrorCode code_;
};

using Assignment = std::pair<FactRef, FactValue>;

struct ExecutionResult {
    NormState state;
    std::optional<Violation> violation;
};

struct DutyCheckResult {
    NormState state;
    std::vector<Violation> violations;
};

/// Evaluates one NormSpec. Holds the spec by shared pointer; copies are cheap
/// and all member functions are const and side-effect free.
class Engine {
public:
    explicit Engine(std::shared_ptr<const NormSpec> spec);
    explicit Engine(NormSpec spec) : Engine(std::make_shared<const NormSpec>(std::move(spec))) {}

    const NormSpec& spec() const { return *spec_; }
    const std::shared_ptr<const NormSpec>& spec_ptr() const { return spec_; }

    NormState init_state(const std::vector<Assignment>& assignments, Date clock) const;

    TruthValue eval(const NormState& state, const Expr& e, const DutyInstance* duty = nullptr) const;

    NormativeStatus action_status(const NormState& state, std::string_view act) const;
    NormativeStatus action_status(const NormState& state, const ActDecl& act) const;

    /// Acts not yet executed, in declaration order.
    std::vector<std::pair<const ActDecl*, NormativeStatus>> available_actions(const NormState& state) const;

    /// Throws MotivationRequired (state untouched) when a non-Allowed act is
    /// executed without a non-blank motivation.
    ExecutionResult execute(const NormState& state, std::string_view act, std::string_view actor, DateTime at,
                            std::optional<std::string> motivation = std::nullopt) const;

    DutyCheckResult check_duties(const NormState& state, Date clock) const;

    NormState assign_fact(const NormState& state, const FactRef& fact, FactValue value) const;

    /// External event: impose a duty outside any act (e.g. on case intake).
    NormState impose_duty(const NormState& state, std::string_view duty) const;

    /// Validates a (fact, value) pair against the fact declarations.
    void check_assignment(const FactRef& fact, const FactValue& value) const;

private:
    TruthValue deadline_passed(const NormState& state, const DutyInstance* duty) const;
    void apply_impose(NormState& state, const DutyDecl& duty) const;
    static std::string explain_execution(const ActDecl& act, const NormativeStatus& status,
                                         const std::optional<std::string>& motivation);

    std::shared_ptr<const NormSpec> spec_;
};

struct AssignEvent {
    FactRef fact;
    FactValue value;
};
struct ExecuteEvent {
    std::string act;
    std::string actor;
    DateTime at;
    std::optional<std::string> motivation;
};
struct AdvanceClockEvent {
    Date clock;
};
struct ImposeDutyEvent {
    std::string duty;
};

using NormEvent = std::variant<AssignEvent, ExecuteEvent, AdvanceClockEvent, ImposeDutyEvent>;

/// Applies events in order; clock advances run the duty check.
NormState replay(const Engine& engine, NormState initial, const std::vector<NormEvent>& events);

}  // namespace normcase::engine
