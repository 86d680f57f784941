#include "normcase/dsl/ast.hpp"

#include <algorithm>

namespace normcase::dsl {

Expr Expr::make_literal(Scalar v, Location at) {
    Expr e;
    e.kind = ExprKind::Literal;
    e.literal = std::move(v);
    e.loc = at;
    return e;
}

Expr Expr::make_unknown(Location at) {
    Expr e;
    e.kind = ExprKind::Unknown;
    e.loc = at;
    return e;
}

Expr Expr::make_fact(FactRef ref, Location at) {
    Expr e;
    e.kind = ExprKind::Fact;
    e.fact = std::move(ref);
    e.loc = at;
    return e;
}

Expr Expr::make_compare(CompareOp op, Expr lhs, Expr rhs, Location at) {
    Expr e;
    e.kind = ExprKind::Compare;
    e.op = op;
    e.operands.push_back(std::move(lhs));
    e.operands.push_back(std::move(rhs));
    e.loc = at;
    return e;
}

Expr Expr::make_and(Expr lhs, Expr rhs, Location at) {
    Expr e;
    e.kind = ExprKind::And;
    e.operands.push_back(std::move(lhs));
    e.operands.push_back(std::move(rhs));
    e.loc = at;
    return e;
}

Expr Expr::make_or(Expr lhs, Expr rhs, Location at) {
    Expr e;
    e.kind = ExprKind::Or;
    e.operands.push_back(std::move(lhs));
    e.operands.push_back(std::move(rhs));
    e.loc = at;
    return e;
}

Expr Expr::make_not(Expr inner, Location at) {
    Expr e;
    e.kind = ExprKind::Not;
    e.operands.push_back(std::move(inner));
    e.loc = at;
    return e;
}

bool operator==(const FactDecl& a, const FactDecl& b) {
    return a.name == b.name && a.params == b.params && a.type == b.type;
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case ExprKind::Literal: return a.literal == b.literal;
        case ExprKind::Unknown:
        case ExprKind::DeadlinePassed: return true;
        case ExprKind::Fact: return a.fact == b.fact;
        case ExprKind::Compare: return a.op == b.op && a.operands == b.operands;
        case ExprKind::And:
        case ExprKind::Or:
        case ExprKind::Not: return a.operands == b.operands;
    }
    return false;
}

bool operator==(const Effect& a, const Effect& b) {
    return a.target == b.target && a.value == b.value;
}

bool operator==(const ActDecl& a, const ActDecl& b) {
    return a.name == b.name && a.actor == b.actor && a.recipient == b.recipient &&
           a.condition == b.condition && a.creates == b.creates && a.terminates == b.terminates &&
           a.imposes == b.imposes && a.sources == b.sources;
}

bool operator==(const DutyDecl& a, const DutyDecl& b) {
    return a.name == b.name && a.holder == b.holder && a.claimant == b.claimant &&
           a.deadline_field == b.deadline_field && a.violated_when == b.violated_when &&
           a.sources == b.sources;
}

bool operator==(const NormSpec& a, const NormSpec& b) {
    return a.facts == b.facts && a.acts == b.acts && a.duties == b.duties && a.sources == b.sources;
}

const FactDecl* NormSpec::find_fact(std::string_view name) const {
    auto it = std::find_if(facts.begin(), facts.end(), [&](const FactDecl& f) { return f.name == name; });
    return it == facts.end() ? nullptr : &*it;
}

const ActDecl* NormSpec::find_act(std::string_view name) const {
    auto it = std::find_if(acts.begin(), acts.end(), [&](const ActDecl& a) { return a.name == name; });
    return it == acts.end() ? nullptr : &*it;
}

const DutyDecl* NormSpec::find_duty(std::string_view name) const {
    auto it = std::find_if(duties.begin(), duties.end(), [&](const DutyDecl& d) { return d.name == name; });
    return it == duties.end() ? nullptr : &*it;
}

std::vector<SourceRef> NormSpec::all_sources() const {
    std::vector<SourceRef> out;
    auto add = [&](const std::vector<SourceRef>& refs) {
        for (const auto& s : refs)
            if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
    };
    add(sources);
    for (const auto& a : acts) add(a.sources);
    for (const auto& d : duties) add(d.sources);
    return out;
}

std::vector<const Expr*> conjuncts(const Expr& e) {
    if (e.kind != ExprKind::And) return {&e};
    auto out = conjuncts(e.operands[0]);
    auto rhs = conjuncts(e.operands[1]);
    out.insert(out.end(), rhs.begin(), rhs.end());
    return out;
}

std::string instance_key(const FactRef& ref) {
    if (ref.args.empty()) return ref.name;
    std::string key = ref.name + "(";
    for (std::size_t i = 0; i < ref.args.size(); ++i) {
        if (i) key += ",";
        key += to_literal(ref.args[i]);
    }
    return key + ")";
}

}  // namespace normcase::dsl
