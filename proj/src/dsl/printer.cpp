#include "normcase/dsl/parser.hpp"

namespace normcase::dsl {

namespace {

constexpr std::string_view kHeader = "# normcase specification\n";

int precedence(const Expr& e) {
    switch (e.kind) {
        case ExprKind::Or: return 1;
        case ExprKind::And: return 2;
        case ExprKind::Not: return 3;
        default: return 4;
    }
}

std::string_view op_text(CompareOp op) {
    switch (op) {
        case CompareOp::Eq: return "=";
        case CompareOp::Ne: return "!=";
        case CompareOp::Lt: return "<";
        case CompareOp::Le: return "<=";
        case CompareOp::Gt: return ">";
        case CompareOp::Ge: return ">=";
    }
    return "?";
}

std::string print_ref(const FactRef& ref) {
    return instance_key(ref);
}

// Left operands bind at the node's own level, right operands one level
// tighter so left-nested chains print without parentheses and re-parse
// to the same tree.
std::string print_at(const Expr& e, int min_prec) {
    std::string s;
    switch (e.kind) {
        case ExprKind::Literal: s = to_literal(e.literal); break;
        case ExprKind::Unknown: s = "unknown"; break;
        case ExprKind::DeadlinePassed: s = "deadline-passed"; break;
        case ExprKind::Fact: s = print_ref(e.fact); break;
        case ExprKind::Compare:
            s = print_at(e.operands[0], 4) + " " + std::string(op_text(e.op)) + " " + print_at(e.operands[1], 4);
            break;
        case ExprKind::And: s = print_at(e.operands[0], 2) + " and " + print_at(e.operands[1], 3); break;
        case ExprKind::Or: s = print_at(e.operands[0], 1) + " or " + print_at(e.operands[1], 2); break;
        case ExprKind::Not: s = "not " + print_at(e.operands[0], 3); break;
    }
    if (precedence(e) < min_prec) return "(" + s + ")";
    return s;
}

std::string print_effects(std::string_view keyword, const std::vector<Effect>& effects) {
    if (effects.empty()) return {};
    std::string s = "  " + std::string(keyword) + " ";
    for (std::size_t i = 0; i < effects.size(); ++i) {
        if (i) s += ", ";
        s += print_ref(effects[i].target);
        if (effects[i].value) s += " = " + to_literal(*effects[i].value);
    }
    return s + "\n";
}

std::string print_source(const SourceRef& src) {
    std::string s = "source " + to_literal(Scalar(src.title));
    if (src.url) s += " url " + to_literal(Scalar(*src.url));
    if (src.applicable_from) s += " from " + src.applicable_from->str();
    return s;
}

std::string print_fact(const FactDecl& f) {
    std::string s = "fact " + f.name;
    if (!f.params.empty()) {
        s += "(";
        for (std::size_t i = 0; i < f.params.size(); ++i) {
            if (i) s += ", ";
            s += f.params[i].name + " : " + std::string(to_string(f.params[i].type));
        }
        s += ")";
    }
    return s + " : " + std::string(to_string(f.type)) + "\n";
}

}  // namespace

std::string print_expr(const Expr& e) { return print_at(e, 0); }

std::string print_act(const ActDecl& a) {
    std::string s = "act " + a.name + "\n";
    s += "  actor " + a.actor + "\n";
    s += "  recipient " + a.recipient + "\n";
    s += "  conditioned by " + print_expr(a.condition) + "\n";
    s += print_effects("creates", a.creates);
    s += print_effects("terminates", a.terminates);
    s += print_effects("imposes", a.imposes);
    for (const auto& src : a.sources) s += "  " + print_source(src) + "\n";
    return s;
}

std::string print_duty(const DutyDecl& d) {
    std::string s = "duty " + d.name + "\n";
    s += "  holder " + d.holder + "\n";
    s += "  claimant " + d.claimant + "\n";
    if (d.deadline_field) s += "  deadline " + *d.deadline_field + "\n";
    s += "  violated when " + print_expr(d.violated_when) + "\n";
    for (const auto& src : d.sources) s += "  " + print_source(src) + "\n";
    return s;
}

std::string print_spec(const NormSpec& spec) {
    std::string out(kHeader);
    if (!spec.sources.empty()) {
        out += "\n";
        for (const auto& s : spec.sources) out += print_source(s) + "\n";
    }
    if (!spec.facts.empty()) {
        out += "\n";
        for (const auto& f : spec.facts) out += print_fact(f);
    }
    for (const auto& a : spec.acts) out += "\n" + print_act(a);
    for (const auto& d : spec.duties) out += "\n" + print_duty(d);
    return out;
}

}  // namespace normcase::dsl
