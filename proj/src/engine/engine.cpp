#include "normcase/engine/engine.hpp"

#include <algorithm>
#include <cctype>

#include "normcase/dsl/parser.hpp"

namespace normcase::engine {

using dsl::CompareOp;
using dsl::ExprKind;

std::string_view to_string(Status s) {
    switch (s) {
        case Status::Allowed: return "allowed";
        case Status::NotAllowed: return "not_allowed";
        case Status::Indefinite: return "indefinite";
    }
    return "?";
}

std::optional<Status> status_from_string(std::string_view s) {
    if (s == "allowed") return Status::Allowed;
    if (s == "not_allowed") return Status::NotAllowed;
    if (s == "indefinite") return Status::Indefinite;
    return std::nullopt;
}

bool NormState::executed(std::string_view act) const {
    return std::any_of(history.begin(), history.end(), [&](const ExecutedAction& e) { return e.act == act; });
}

FactValue NormState::value_of(const FactRef& ref) const {
    auto it = ref.args.empty() ? assignments.find(ref.name) : assignments.find(dsl::instance_key(ref));
    if (it == assignments.end()) return std::nullopt;
    return it->second;
}

namespace {

bool is_blank(const std::optional<std::string>& s) {
    return !s || std::all_of(s->begin(), s->end(), [](unsigned char c) { return std::isspace(c); });
}

template <typename T>
TruthValue compare_values(const T& a, const T& b, CompareOp op) {
    switch (op) {
        case CompareOp::Eq: return from_bool(a == b);
        case CompareOp::Ne: return from_bool(a != b);
        case CompareOp::Lt: return from_bool(a < b);
        case CompareOp::Le: return from_bool(a <= b);
        case CompareOp::Gt: return from_bool(a > b);
        case CompareOp::Ge: return from_bool(a >= b);
    }
    return TruthValue::Unknown;
}

std::string join_sources(const std::vector<SourceRef>& sources) {
    std::string s;
    for (const auto& src : sources) {
        if (!s.empty()) s += "; ";
        s += src.title;
        if (src.url) s += " <" + *src.url + ">";
    }
    return s;
}

}  // namespace

Engine::Engine(std::shared_ptr<const NormSpec> spec) : spec_(std::move(spec)) {}

void Engine::check_assignment(const FactRef& fact, const FactValue& value) const {
    const auto* decl = spec_->find_fact(fact.name);
    if (!decl) throw EngineError(EngineErrorCode::UnknownFact, "unknown fact '" + fact.name + "'");
    if (fact.args.size() != decl->params.size())
        throw EngineError(EngineErrorCode::TypeMismatch, "fact '" + fact.name + "' takes " +
                                                             std::to_string(decl->params.size()) + " argument(s)");
    for (std::size_t i = 0; i < fact.args.size(); ++i)
        if (type_of(fact.args[i]) != decl->params[i].type)
            throw EngineError(EngineErrorCode::TypeMismatch,
                              "argument '" + decl->params[i].name + "' of '" + fact.name + "' expects " +
                                  std::string(normcase::to_string(decl->params[i].type)));
    if (value && type_of(*value) != decl->type)
        throw EngineError(EngineErrorCode::TypeMismatch, "fact '" + fact.name + "' expects " +
                                                             std::string(normcase::to_string(decl->type)) + ", got " +
                                                             std::string(normcase::to_string(type_of(*value))));
}

NormState Engine::init_state(const std::vector<Assignment>& assignments, Date clock) const {
    NormState state;
    state.clock = clock;
    for (const auto& [fact, value] : assignments) {
        check_assignment(fact, value);
        if (value)
            state.assignments[dsl::instance_key(fact)] = *value;
        else
            state.assignments.erase(dsl::instance_key(fact));
    }
    return state;
}

TruthValue Engine::deadline_passed(const NormState& state, const DutyInstance* duty) const {
    if (!duty) return TruthValue::Unknown;
    if (duty->deadline) return from_bool(*duty->deadline < state.clock);
    const auto* decl = spec_->find_duty(duty->duty);
    return decl && decl->deadline_field ? TruthValue::Unknown : TruthValue::False;
}

TruthValue Engine::eval(const NormState& state, const Expr& e, const DutyInstance* duty) const {
    switch (e.kind) {
        case ExprKind::Literal: {
            const bool* b = std::get_if<bool>(&e.literal);
            return b ? from_bool(*b) : TruthValue::Unknown;
        }
        case ExprKind::Unknown: return TruthValue::Unknown;
        case ExprKind::Fact: {
            auto v = state.value_of(e.fact);
            if (!v) return TruthValue::Unknown;
            const bool* b = std::get_if<bool>(&*v);
            return b ? from_bool(*b) : TruthValue::Unknown;
        }
        case ExprKind::DeadlinePassed: return deadline_passed(state, duty);
        case ExprKind::Compare: {
            auto term = [&](const Expr& t) -> FactValue {
                if (t.kind == ExprKind::Literal) return t.literal;
                if (t.kind == ExprKind::Fact) return state.value_of(t.fact);
                return std::nullopt;
            };
            auto lhs = term(e.operands[0]);
            auto rhs = term(e.operands[1]);
            if (!lhs || !rhs || lhs->index() != rhs->index()) return TruthValue::Unknown;
            return std::visit(
                [&](const auto& a) -> TruthValue {
                    using T = std::decay_t<decltype(a)>;
                    return compare_values(a, std::get<T>(*rhs), e.op);
                },
                *lhs);
        }
        case ExprKind::And: return kleene_and(eval(state, e.operands[0], duty), eval(state, e.operands[1], duty));
        case ExprKind::Or: return kleene_or(eval(state, e.operands[0], duty), eval(state, e.operands[1], duty));
        case ExprKind::Not: return kleene_not(eval(state, e.operands[0], duty));
    }
    return TruthValue::Unknown;
}

NormativeStatus Engine::action_status(const NormState& state, std::string_view act) const {
    const auto* decl = spec_->find_act(act);
    if (!decl) throw EngineError(EngineErrorCode::UnknownAct, "unknown act '" + std::string(act) + "'");
    return action_status(state, *decl);
}

NormativeStatus Engine::action_status(const NormState& state, const ActDecl& act) const {
    NormativeStatus out;
    out.status = status_of(eval(state, act.condition));
    for (const Expr* clause : dsl::conjuncts(act.condition))
        out.reasons.push_back({dsl::print_expr(*clause), eval(state, *clause), act.sources});
    return out;
}

std::vector<std::pair<const ActDecl*, NormativeStatus>> Engine::available_actions(const NormState& state) const {
    std::vector<std::pair<const ActDecl*, NormativeStatus>> out;
    for (const auto& act : spec_->acts)
        if (!state.executed(act.name)) out.emplace_back(&act, action_status(state, act));
    return out;
}

std::string Engine::explain_execution(const ActDecl& act, const NormativeStatus& status,
                                      const std::optional<std::string>& motivation) {
    std::string s = "Act '" + act.name + "' was executed while " +
                    (status.status == Status::NotAllowed ? "not allowed" : "its permission was indefinite") + ".";
    for (const auto& r : status.reasons) {
        if (r.value == TruthValue::True) continue;
        s += " Clause `" + r.clause + "` is " + std::string(to_string(r.value)) + ".";
    }
    if (!act.sources.empty()) s += " Sources: " + join_sources(act.sources) + ".";
    if (motivation) s += " Motivation: " + *motivation;
    return s;
}

void Engine::apply_impose(NormState& state, const DutyDecl& duty) const {
    bool active = std::any_of(state.duties.begin(), state.duties.end(),
                              [&](const DutyInstance& d) { return d.duty == duty.name && !d.fulfilled; });
    if (active) return;
    DutyInstance inst;
    inst.duty = duty.name;
    inst.holder = duty.holder;
    inst.claimant = duty.claimant;
    if (duty.deadline_field)
        if (auto v = state.value_of(FactRef{*duty.deadline_field, {}}))
            if (const Date* d = std::get_if<Date>(&*v)) inst.deadline = *d;
    state.duties.push_back(std::move(inst));
}

ExecutionResult Engine::execute(const NormState& state, std::string_view act_name, std::string_view actor,
                                DateTime at, std::optional<std::string> motivation) const {
    const auto* act = spec_->find_act(act_name);
    if (!act) throw EngineError(EngineErrorCode::UnknownAct, "unknown act '" + std::string(act_name) + "'");
    if (state.executed(act->name))
        throw EngineError(EngineErrorCode::AlreadyExecuted, "act '" + act->name + "' has already been executed");
    NormativeStatus status = action_status(state, *act);
    if (is_blank(motivation)) motivation.reset();
    if (status.status != Status::Allowed && !motivation)
        throw EngineError(EngineErrorCode::MotivationRequired,
                          "act '" + act->name + "' is " + std::string(to_string(status.status)) +
                              "; a motivation is required");

    ExecutionResult result{state, std::nullopt};
    NormState& next = result.state;
    for (const auto& eff : act->terminates) {
        if (spec_->find_duty(eff.target.name)) {
            for (auto& d : next.duties)
                if (d.duty == eff.target.name) d.fulfilled = true;
            continue;
        }
        const auto* fact = spec_->find_fact(eff.target.name);
        if (!fact) continue;
        if (fact->type == ScalarType::Boolean)
            next.assignments[dsl::instance_key(eff.target)] = false;
        else
            next.assignments.erase(dsl::instance_key(eff.target));
    }
    for (const auto& eff : act->creates) {
        if (!spec_->find_fact(eff.target.name)) continue;
        next.assignments[dsl::instance_key(eff.target)] = eff.value ? *eff.value : Scalar(true);
    }
    for (const auto& eff : act->imposes)
        if (const auto* duty = spec_->find_duty(eff.target.name)) apply_impose(next, *duty);

    next.history.push_back({act->name, std::string(actor), at, status.status, motivation});
    if (status.status != Status::Allowed) {
        Violation v;
        v.kind = ViolationKind::NonPermittedExecution;
        v.subject = act->name;
        v.at = at;
        v.motivation = motivation;
        v.sources = act->sources;
        for (const auto& r : status.reasons)
            if (r.value != TruthValue::True) v.clauses.push_back(r.clause);
        v.explanation = explain_execution(*act, status, motivation);
        next.violations.push_back(v);
        result.violation = std::move(v);
    }
    return result;
}

DutyCheckResult Engine::check_duties(const NormState& state, Date clock) const {
    DutyCheckResult result{state, {}};
    NormState& next = result.state;
    next.clock = clock;
    for (auto& inst : next.duties) {
        if (inst.fulfilled || inst.violated_at) continue;
        const auto* decl = spec_->find_duty(inst.duty);
        if (!decl) continue;
        if (eval(next, decl->violated_when, &inst) != TruthValue::True) continue;
        inst.violated_at = clock;
        Violation v;
        v.kind = ViolationKind::DutyViolated;
        v.subject = inst.duty;
        v.at = DateTime::start_of(clock);
        v.sources = decl->sources;
        v.clauses.push_back(dsl::print_expr(decl->violated_when));
        v.explanation = "Duty '" + inst.duty + "' of " + inst.holder + " towards " + inst.claimant +
                        " is violated: `" + dsl::print_expr(decl->violated_when) + "` holds on " + clock.str();
        if (inst.deadline) v.explanation += " (deadline " + inst.deadline->str() + ")";
        v.explanation += ".";
        if (!decl->sources.empty()) v.explanation += " Sources: " + join_sources(decl->sources) + ".";
        next.violations.push_back(v);
        result.violations.push_back(std::move(v));
    }
    return result;
}

NormState Engine::assign_fact(const NormState& state, const FactRef& fact, FactValue value) const {
    check_assignment(fact, value);
    NormState next = state;
    if (value)
        next.assignments[dsl::instance_key(fact)] = *value;
    else
        next.assignments.erase(dsl::instance_key(fact));
    if (fact.args.empty()) {
        for (auto& inst : next.duties) {
            if (inst.fulfilled || inst.violated_at) continue;
            const auto* decl = spec_->find_duty(inst.duty);
            if (!decl || decl->deadline_field != fact.name) continue;
            inst.deadline.reset();
            if (value)
                if (const Date* d = std::get_if<Date>(&*value)) inst.deadline = *d;
        }
    }
    return next;
}

NormState Engine::impose_duty(const NormState& state, std::string_view duty) const {
    const auto* decl = spec_->find_duty(duty);
    if (!decl) throw EngineError(EngineErrorCode::UnknownDuty, "unknown duty '" + std::string(duty) + "'");
    NormState next = state;
    apply_impose(next, *decl);
    return next;
}

NormState replay(const Engine& engine, NormState state, const std::vector<NormEvent>& events) {
    for (const auto& ev : events) {
        std::visit(
            [&](const auto& e) {
                using T = std::decay_t<decltype(e)>;
                if constexpr (std::is_same_v<T, AssignEvent>) {
                    state = engine.assign_fact(state, e.fact, e.value);
                } else if constexpr (std::is_same_v<T, ExecuteEvent>) {
                    state = engine.execute(state, e.act, e.actor, e.at, e.motivation).state;
                } else if constexpr (std::is_same_v<T, AdvanceClockEvent>) {
                    state = engine.check_duties(state, e.clock).state;
                } else {
                    state = engine.impose_duty(state, e.duty);
                }
            },
            ev);
    }
    return state;
}

}  // namespace normcase::engine
