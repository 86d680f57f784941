#pragma once

#include <optional>
#include <string>
#include <vector>

#include "normcase/core/date.hpp"
#include "normcase/core/value.hpp"

namespace normcase::dsl {

struct Location {
    int line = 1;
    int column = 1;
};

struct SourceRef {
    std::string title;
    std::optional<std::string> url;
    std::optional<Date> applicable_from;

    friend bool operator==(const SourceRef&, const SourceRef&) = default;
};

struct Param {
    std::string name;
    ScalarType type = ScalarType::Boolean;

    friend bool operator==(const Param&, const Param&) = default;
};

struct FactDecl {
    std::string name;
    std::vector<Param> params;
    /// Value type of each instance; boolean facts either hold or not.
    ScalarType type = ScalarType::Boolean;
    Location loc;
};

/// Reference to a fact instance: fact name plus literal arguments.
struct FactRef {
    std::string name;
    std::vector<Scalar> args;

    friend bool operator==(const FactRef&, const FactRef&) = default;
};

enum class ExprKind { Literal, Unknown, Fact, DeadlinePassed, Compare, And, Or, Not };
enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };

struct Expr {
    ExprKind kind = ExprKind::Literal;
    Scalar literal = true;
    FactRef fact;
    CompareOp op = CompareOp::Eq;
    std::vector<Expr> operands;
    Location loc;

    static Expr make_literal(Scalar v, Location at = {});
    static Expr make_unknown(Location at = {});
    static Expr make_fact(FactRef ref, Location at = {});
    static Expr make_compare(CompareOp op, Expr lhs, Expr rhs, Location at = {});
    static Expr make_and(Expr lhs, Expr rhs, Location at = {});
    static Expr make_or(Expr lhs, Expr rhs, Location at = {});
    static Expr make_not(Expr e, Location at = {});
};

/// creates / terminates / imposes target. `value` is only meaningful for creates.
struct Effect {
    FactRef target;
    std::optional<Scalar> value;
    Location loc;
};

struct ActDecl {
    std::string name;
    std::string actor;
    std::string recipient;
    Expr condition = Expr::make_literal(true);
    std::vector<Effect> creates;
    std::vector<Effect> terminates;
    std::vector<Effect> imposes;
    std::vector<SourceRef> sources;
    Location loc;
};

struct DutyDecl {
    std::string name;
    std::string holder;
    std::string claimant;
    std::optional<std::string> deadline_field;
    Expr violated_when = Expr::make_literal(false);
    std::vector<SourceRef> sources;
    Location loc;
};

struct NormSpec {
    std::vector<FactDecl> facts;
    std::vector<ActDecl> acts;
    std::vector<DutyDecl> duties;
    /// Top-level `source` statements.
    std::vector<SourceRef> sources;

    const FactDecl* find_fact(std::string_view name) const;
    const ActDecl* find_act(std::string_view name) const;
    const DutyDecl* find_duty(std::string_view name) const;

    /// Top-level sources followed by every declaration's sources, first occurrence kept.
    std::vector<SourceRef> all_sources() const;
};

// Structural equality: source locations are ignored.
bool operator==(const FactDecl& a, const FactDecl& b);
bool operator==(const Expr& a, const Expr& b);
bool operator==(const Effect& a, const Effect& b);
bool operator==(const ActDecl& a, const ActDecl& b);
bool operator==(const DutyDecl& a, const DutyDecl& b);
bool operator==(const NormSpec& a, const NormSpec& b);

/// Splits a left-nested `and` chain into its top-level conjuncts.
std::vector<const Expr*> conjuncts(const Expr& e);

/// Canonical key of a fact instance, e.g. `age` or `allowance("single")`.
std::string instance_key(const FactRef& ref);

}  // namespace normcase::dsl
