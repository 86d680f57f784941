#include "normcase/dsl/parser.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "lexer.hpp"

namespace normcase::dsl {

using detail::Tok;
using detail::Token;

std::string_view to_string(DiagnosticCode code) {
    switch (code) {
        case DiagnosticCode::SyntaxError: return "syntax error";
        case DiagnosticCode::ExpectedDeclaration: return "expected declaration";
        case DiagnosticCode::DuplicateName: return "duplicate name";
        case DiagnosticCode::UnresolvedIdentifier: return "unresolved identifier";
        case DiagnosticCode::TypeMismatch: return "type mismatch";
    }
    return "error";
}

std::string format_diagnostic(const Diagnostic& d, std::string_view origin) {
    return std::string(origin) + ":" + std::to_string(d.loc.line) + ":" + std::to_string(d.loc.column) + ": " +
           (d.severity == Severity::Error ? "error: " : "warning: ") + d.message;
}

namespace {

struct SyntaxAbort {};

/// Recursive-descent parser over the token stream. On a syntax error it
/// records a diagnostic and resynchronises at the next declaration keyword.
class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    struct Output {
        NormSpec spec;
        std::vector<Diagnostic> diags;
        /// Declaration kinds in source order ('f', 'a', 'd', 's').
        std::string order;
    };

    Output parse_all() {
        Output out;
        while (peek().kind != Tok::End) {
            try {
                parse_declaration(out);
            } catch (const SyntaxAbort&) {
                synchronize();
            }
        }
        out.diags = std::move(diags_);
        return out;
    }

    std::optional<Expr> parse_standalone_expr() {
        try {
            Expr e = parse_expr();
            if (peek().kind != Tok::End) fail(peek(), "unexpected '" + describe(peek()) + "' after expression");
            return e;
        } catch (const SyntaxAbort&) {
            return std::nullopt;
        }
    }

    std::vector<Diagnostic> take_diags() { return std::move(diags_); }

private:
    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
        return toks_[i];
    }

    const Token& next() {
        const Token& t = toks_[pos_];
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }

    bool is_word(std::string_view w, std::size_t ahead = 0) const {
        const Token& t = peek(ahead);
        return t.kind == Tok::Ident && t.text == w;
    }

    static std::string describe(const Token& t) {
        switch (t.kind) {
            case Tok::End: return "end of input";
            case Tok::String: return "\"" + t.text + "\"";
            default: return t.text;
        }
    }

    [[noreturn]] void fail(const Token& at, std::string message) {
        if (at.kind == Tok::Invalid) message = at.text;
        diags_.push_back({Severity::Error, DiagnosticCode::SyntaxError, "syntax error: " + message, at.loc});
        throw SyntaxAbort{};
    }

    void expect_word(std::string_view w) {
        if (!is_word(w)) fail(peek(), "expected '" + std::string(w) + "', found '" + describe(peek()) + "'");
        next();
    }

    void expect(Tok kind, std::string_view what) {
        if (peek().kind != kind) fail(peek(), "expected " + std::string(what) + ", found '" + describe(peek()) + "'");
        next();
    }

    std::string expect_name(std::string_view what) {
        const Token& t = peek();
        if (t.kind != Tok::Ident) fail(t, "expected " + std::string(what) + ", found '" + describe(t) + "'");
        if (detail::is_reserved(t.text)) fail(t, "'" + t.text + "' is a keyword and cannot be used as " + std::string(what));
        return next().text;
    }

    void synchronize() {
        while (peek().kind != Tok::End) {
            if (is_word("fact") || is_word("act") || is_word("duty")) return;
            next();
        }
    }

    void parse_declaration(Output& out) {
        if (is_word("fact")) {
            out.spec.facts.push_back(parse_fact());
            out.order += 'f';
        } else if (is_word("act")) {
            out.spec.acts.push_back(parse_act());
            out.order += 'a';
        } else if (is_word("duty")) {
            out.spec.duties.push_back(parse_duty());
            out.order += 'd';
        } else if (is_word("source")) {
            out.spec.sources.push_back(parse_source());
            out.order += 's';
        } else {
            fail(peek(), "expected declaration ('fact', 'act', 'duty' or 'source'), found '" + describe(peek()) + "'");
        }
    }

    ScalarType parse_type() {
        const Token& t = peek();
        if (t.kind == Tok::Ident)
            if (auto ty = scalar_type_from_string(t.text)) {
                next();
                return *ty;
            }
        fail(t, "expected type (boolean, integer, text or date), found '" + describe(t) + "'");
    }

    FactDecl parse_fact() {
        FactDecl f;
        f.loc = next().loc;
        f.name = expect_name("fact name");
        if (peek().kind == Tok::LParen) {
            next();
            while (true) {
                Param p;
                p.name = expect_name("parameter name");
                expect(Tok::Colon, "':'");
                p.type = parse_type();
                f.params.push_back(std::move(p));
                if (peek().kind == Tok::Comma) {
                    next();
                    continue;
                }
                expect(Tok::RParen, "')'");
                break;
            }
        }
        if (peek().kind == Tok::Colon) {
            next();
            f.type = parse_type();
        }
        return f;
    }

    SourceRef parse_source() {
        const Token& kw = next();
        SourceRef s;
        if (peek().kind != Tok::String) fail(peek(), "expected source title string after 'source'");
        const Token& title = next();
        if (title.text.empty()) fail(title, "source title must not be empty");
        (void)kw;
        s.title = title.text;
        if (is_word("url")) {
            next();
            if (peek().kind != Tok::String) fail(peek(), "expected url string");
            s.url = next().text;
        }
        if (is_word("from")) {
            next();
            if (peek().kind != Tok::DateLit) fail(peek(), "expected date after 'from'");
            s.applicable_from = Date::parse(next().text);
        }
        return s;
    }

    void single_clause(std::set<std::string>& seen, const Token& kw) {
        if (!seen.insert(kw.text).second) fail(kw, "duplicate '" + kw.text + "' clause");
    }

    ActDecl parse_act() {
        ActDecl a;
        const Token& start = next();
        a.loc = start.loc;
        a.name = expect_name("act name");
        std::set<std::string> seen;
        bool has_condition = false;
        while (true) {
            const Token& kw = peek();
            if (is_word("actor")) {
                single_clause(seen, next());
                a.actor = expect_name("actor role");
            } else if (is_word("recipient")) {
                single_clause(seen, next());
                a.recipient = expect_name("recipient role");
            } else if (is_word("conditioned")) {
                single_clause(seen, next());
                expect_word("by");
                a.condition = parse_expr();
                has_condition = true;
            } else if (is_word("creates")) {
                next();
                parse_effects(a.creates, true);
            } else if (is_word("terminates")) {
                next();
                parse_effects(a.terminates, false);
            } else if (is_word("imposes")) {
                next();
                parse_effects(a.imposes, false);
            } else if (is_word("source")) {
                a.sources.push_back(parse_source());
            } else {
                break;
            }
            (void)kw;
        }
        if (!has_condition) a.condition = Expr::make_literal(true, a.loc);
        if (a.actor.empty()) fail(start, "act '" + a.name + "' is missing an 'actor' clause");
        if (a.recipient.empty()) fail(start, "act '" + a.name + "' is missing a 'recipient' clause");
        return a;
    }

    DutyDecl parse_duty() {
        DutyDecl d;
        const Token& start = next();
        d.loc = start.loc;
        d.name = expect_name("duty name");
        std::set<std::string> seen;
        bool has_violation = false;
        while (true) {
            if (is_word("holder")) {
                single_clause(seen, next());
                d.holder = expect_name("holder role");
            } else if (is_word("claimant")) {
                single_clause(seen, next());
                d.claimant = expect_name("claimant role");
            } else if (is_word("deadline")) {
                single_clause(seen, next());
                d.deadline_field = expect_name("deadline fact");
            } else if (is_word("violated")) {
                single_clause(seen, next());
                expect_word("when");
                d.violated_when = parse_expr();
                has_violation = true;
            } else if (is_word("source")) {
                d.sources.push_back(parse_source());
            } else {
                break;
            }
        }
        if (!has_violation) d.violated_when = Expr::make_literal(false, d.loc);
        if (d.holder.empty()) fail(start, "duty '" + d.name + "' is missing a 'holder' clause");
        if (d.claimant.empty()) fail(start, "duty '" + d.name + "' is missing a 'claimant' clause");
        return d;
    }

    void parse_effects(std::vector<Effect>& out, bool allow_value) {
        while (true) {
            Effect e;
            e.loc = peek().loc;
            e.target.name = expect_name("effect target");
            if (peek().kind == Tok::LParen) e.target.args = parse_args();
            if (peek().kind == Tok::Eq) {
                if (!allow_value) fail(peek(), "only 'creates' effects may assign a value");
                next();
                e.value = parse_literal_value();
            }
            out.push_back(std::move(e));
            if (peek().kind != Tok::Comma) return;
            next();
        }
    }

    std::vector<Scalar> parse_args() {
        expect(Tok::LParen, "'('");
        std::vector<Scalar> args;
        if (peek().kind == Tok::RParen) fail(peek(), "empty argument list");
        while (true) {
            args.push_back(parse_literal_value());
            if (peek().kind == Tok::Comma) {
                next();
                continue;
            }
            expect(Tok::RParen, "')'");
            return args;
        }
    }

    std::optional<Scalar> try_literal() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Int: return Scalar(static_cast<std::int64_t>(std::stoll(next().text)));
            case Tok::String: return Scalar(next().text);
            case Tok::DateLit: return Scalar(*Date::parse(next().text));
            case Tok::Ident:
                if (t.text == "true") {
                    next();
                    return Scalar(true);
                }
                if (t.text == "false") {
                    next();
                    return Scalar(false);
                }
                return std::nullopt;
            default: return std::nullopt;
        }
    }

    Scalar parse_literal_value() {
        if (auto v = try_literal()) return *v;
        fail(peek(), "expected literal value, found '" + describe(peek()) + "'");
    }

    Expr parse_expr() { return parse_or(); }

    Expr parse_or() {
        Expr lhs = parse_and();
        while (is_word("or")) {
            Location at = next().loc;
            lhs = Expr::make_or(std::move(lhs), parse_and(), at);
        }
        return lhs;
    }

    Expr parse_and() {
        Expr lhs = parse_not();
        while (is_word("and")) {
            Location at = next().loc;
            lhs = Expr::make_and(std::move(lhs), parse_not(), at);
        }
        return lhs;
    }

    Expr parse_not() {
        if (is_word("not")) {
            Location at = next().loc;
            return Expr::make_not(parse_not(), at);
        }
        return parse_comparison();
    }

    static std::optional<CompareOp> relop(Tok k) {
        switch (k) {
            case Tok::Eq: return CompareOp::Eq;
            case Tok::Ne: return CompareOp::Ne;
            case Tok::Lt: return CompareOp::Lt;
            case Tok::Le: return CompareOp::Le;
            case Tok::Gt: return CompareOp::Gt;
            case Tok::Ge: return CompareOp::Ge;
            default: return std::nullopt;
        }
    }

    Expr parse_comparison() {
        bool parenthesized = peek().kind == Tok::LParen;
        Expr lhs = parse_primary();
        if (auto op = relop(peek().kind)) {
            const Token& op_tok = next();
            if (parenthesized || lhs.kind == ExprKind::DeadlinePassed)
                fail(op_tok, "comparison operands must be facts or literals");
            Location at = lhs.loc;
            if (peek().kind == Tok::LParen || is_word("deadline-passed") || is_word("not"))
                fail(peek(), "comparison operands must be facts or literals");
            Expr rhs = parse_primary();
            return Expr::make_compare(*op, std::move(lhs), std::move(rhs), at);
        }
        return lhs;
    }

    Expr parse_primary() {
        const Token& t = peek();
        Location at = t.loc;
        if (t.kind == Tok::LParen) {
            next();
            Expr e = parse_expr();
            expect(Tok::RParen, "')'");
            return e;
        }
        if (t.kind == Tok::Ident && t.text == "unknown") {
            next();
            return Expr::make_unknown(at);
        }
        if (t.kind == Tok::Ident && t.text == "deadline-passed") {
            next();
            Expr e;
            e.kind = ExprKind::DeadlinePassed;
            e.loc = at;
            return e;
        }
        if (auto v = try_literal()) return Expr::make_literal(*v, at);
        if (t.kind == Tok::Ident && !detail::is_reserved(t.text)) {
            FactRef ref;
            ref.name = next().text;
            if (peek().kind == Tok::LParen) ref.args = parse_args();
            return Expr::make_fact(std::move(ref), at);
        }
        fail(t, "expected expression, found '" + describe(t) + "'");
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::vector<Diagnostic> diags_;
};

/// Name resolution and type checking.
class Checker {
public:
    Checker(const std::vector<FactDecl>& facts, const std::vector<std::string>& duties,
            std::vector<Diagnostic>& diags)
        : diags_(diags) {
        for (const auto& f : facts) facts_.emplace(f.name, &f);
        for (const auto& d : duties) duties_.insert(d);
    }

    void check_fact_decl(const FactDecl& f) {
        std::set<std::string> names;
        for (const auto& p : f.params)
            if (!names.insert(p.name).second)
                report(DiagnosticCode::DuplicateName,
                       "duplicate name: parameter '" + p.name + "' in fact '" + f.name + "'", f.loc);
    }

    void check_act(const ActDecl& a) {
        check_condition(a.condition, false);
        for (const auto& e : a.creates) check_creates(e);
        for (const auto& e : a.terminates) check_terminates(e);
        for (const auto& e : a.imposes) check_imposes(e);
    }

    void check_duty(const DutyDecl& d) {
        check_condition(d.violated_when, true);
        if (d.deadline_field) {
            auto it = facts_.find(*d.deadline_field);
            if (it == facts_.end()) {
                report(DiagnosticCode::UnresolvedIdentifier, "unresolved identifier '" + *d.deadline_field + "'", d.loc);
            } else if (it->second->type != ScalarType::Date || !it->second->params.empty()) {
                report(DiagnosticCode::TypeMismatch,
                       "type mismatch: deadline '" + *d.deadline_field + "' must be a date fact without parameters",
                       d.loc);
            }
        }
    }

    void check_condition(const Expr& e, bool allow_deadline) {
        if (auto t = check(e, allow_deadline); t && *t != ScalarType::Boolean)
            report(DiagnosticCode::TypeMismatch,
                   "type mismatch: condition must be boolean, found " + std::string(to_string(*t)), e.loc);
    }

private:
    void report(DiagnosticCode code, std::string message, Location at) {
        diags_.push_back({Severity::Error, code, std::move(message), at});
    }

    /// Checks a fact reference; returns its value type when it resolves.
    std::optional<ScalarType> check_ref(const FactRef& ref, Location at) {
        auto it = facts_.find(ref.name);
        if (it == facts_.end()) {
            report(DiagnosticCode::UnresolvedIdentifier, "unresolved identifier '" + ref.name + "'", at);
            return std::nullopt;
        }
        const FactDecl& f = *it->second;
        if (ref.args.size() != f.params.size()) {
            report(DiagnosticCode::TypeMismatch,
                   "type mismatch: fact '" + f.name + "' takes " + std::to_string(f.params.size()) +
                       " argument(s), got " + std::to_string(ref.args.size()),
                   at);
            return f.type;
        }
        for (std::size_t i = 0; i < ref.args.size(); ++i)
            if (type_of(ref.args[i]) != f.params[i].type)
                report(DiagnosticCode::TypeMismatch,
                       "type mismatch: argument '" + f.params[i].name + "' of '" + f.name + "' expects " +
                           std::string(to_string(f.params[i].type)) + ", got " +
                           std::string(to_string(type_of(ref.args[i]))),
                       at);
        return f.type;
    }

    std::optional<ScalarType> check(const Expr& e, bool allow_deadline) {
        switch (e.kind) {
            case ExprKind::Literal: return type_of(e.literal);
            case ExprKind::Unknown: return ScalarType::Boolean;
            case ExprKind::Fact: return check_ref(e.fact, e.loc);
            case ExprKind::DeadlinePassed:
                if (!allow_deadline)
                    report(DiagnosticCode::UnresolvedIdentifier,
                           "unresolved identifier 'deadline-passed' (only available in 'violated when')", e.loc);
                return ScalarType::Boolean;
            case ExprKind::Compare: {
                auto lt = check(e.operands[0], allow_deadline);
                auto rt = check(e.operands[1], allow_deadline);
                if (!lt || !rt) return ScalarType::Boolean;
                if (*lt != *rt) {
                    report(DiagnosticCode::TypeMismatch,
                           "type mismatch: cannot compare " + std::string(to_string(*lt)) + " with " +
                               std::string(to_string(*rt)),
                           e.loc);
                } else if (e.op != CompareOp::Eq && e.op != CompareOp::Ne && *lt != ScalarType::Integer &&
                           *lt != ScalarType::Date) {
                    report(DiagnosticCode::TypeMismatch,
                           "type mismatch: ordering comparison on " + std::string(to_string(*lt)), e.loc);
                }
                return ScalarType::Boolean;
            }
            case ExprKind::And:
            case ExprKind::Or:
            case ExprKind::Not:
                for (const auto& o : e.operands) check_condition(o, allow_deadline);
                return ScalarType::Boolean;
        }
        return std::nullopt;
    }

    void check_creates(const Effect& e) {
        if (duties_.count(e.target.name) && !facts_.count(e.target.name)) {
            report(DiagnosticCode::TypeMismatch,
                   "type mismatch: 'creates' expects a fact, '" + e.target.name + "' is a duty (use 'imposes')", e.loc);
            return;
        }
        auto ty = check_ref(e.target, e.loc);
        if (!ty) return;
        if (e.value) {
            if (type_of(*e.value) != *ty)
                report(DiagnosticCode::TypeMismatch,
                       "type mismatch: fact '" + e.target.name + "' holds " + std::string(to_string(*ty)) +
                           ", got " + std::string(to_string(type_of(*e.value))),
                       e.loc);
        } else if (*ty != ScalarType::Boolean) {
            report(DiagnosticCode::TypeMismatch,
                   "type mismatch: creating " + std::string(to_string(*ty)) + " fact '" + e.target.name +
                       "' requires a value",
                   e.loc);
        }
    }

    void check_terminates(const Effect& e) {
        if (duties_.count(e.target.name)) {
            if (!e.target.args.empty())
                report(DiagnosticCode::TypeMismatch, "type mismatch: duty '" + e.target.name + "' takes no arguments",
                       e.loc);
            return;
        }
        check_ref(e.target, e.loc);
    }

    void check_imposes(const Effect& e) {
        if (!duties_.count(e.target.name)) {
            if (facts_.count(e.target.name))
                report(DiagnosticCode::TypeMismatch,
                       "type mismatch: 'imposes' expects a duty, '" + e.target.name + "' is a fact", e.loc);
            else
                report(DiagnosticCode::UnresolvedIdentifier, "unresolved identifier '" + e.target.name + "'", e.loc);
            return;
        }
        if (!e.target.args.empty())
            report(DiagnosticCode::TypeMismatch, "type mismatch: duty '" + e.target.name + "' takes no arguments",
                   e.loc);
    }

    std::map<std::string, const FactDecl*> facts_;
    std::set<std::string> duties_;
    std::vector<Diagnostic>& diags_;
};

/// Clamps every diagnostic location into the bounds of `text`.
void clamp_locations(std::vector<Diagnostic>& diags, std::string_view text) {
    std::vector<int> line_len{0};
    for (char c : text) {
        if (c == '\n')
            line_len.push_back(0);
        else
            ++line_len.back();
    }
    for (auto& d : diags) {
        d.loc.line = std::clamp(d.loc.line, 1, static_cast<int>(line_len.size()));
        d.loc.column = std::clamp(d.loc.column, 1, line_len[d.loc.line - 1] + 1);
    }
}

bool has_errors(const std::vector<Diagnostic>& diags) {
    return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

std::vector<std::string> duty_names(const std::vector<DutyDecl>& duties) {
    std::vector<std::string> out;
    for (const auto& d : duties) out.push_back(d.name);
    return out;
}

}  // namespace

ParseResult parse_spec(const SpecText& src) {
    Parser parser(detail::tokenize(src.content));
    auto out = parser.parse_all();
    auto& diags = out.diags;

    std::map<std::string, Location> seen;
    auto declare = [&](const std::string& name, Location at) {
        if (auto [it, inserted] = seen.emplace(name, at); !inserted)
            diags.push_back({Severity::Error, DiagnosticCode::DuplicateName,
                             "duplicate name '" + name + "' (first declared at line " +
                                 std::to_string(it->second.line) + ")",
                             at});
    };
    for (const auto& f : out.spec.facts) declare(f.name, f.loc);
    for (const auto& a : out.spec.acts) declare(a.name, a.loc);
    for (const auto& d : out.spec.duties) declare(d.name, d.loc);

    Checker checker(out.spec.facts, duty_names(out.spec.duties), diags);
    for (const auto& f : out.spec.facts) checker.check_fact_decl(f);
    for (const auto& a : out.spec.acts) checker.check_act(a);
    for (const auto& d : out.spec.duties) checker.check_duty(d);

    ParseResult result;
    clamp_locations(diags, src.content);
    std::stable_sort(diags.begin(), diags.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return std::pair(a.loc.line, a.loc.column) < std::pair(b.loc.line, b.loc.column);
    });
    result.diagnostics = std::move(diags);
    if (!has_errors(result.diagnostics)) result.spec = std::move(out.spec);
    return result;
}

RuleParseResult validate_rule_text(std::string_view rule_text, const NormSpec& context) {
    RuleParseResult result;
    Parser parser(detail::tokenize(rule_text));
    auto out = parser.parse_all();
    auto& diags = out.diags;

    if (!has_errors(diags)) {
        if (out.order.empty()) {
            diags.push_back({Severity::Error, DiagnosticCode::ExpectedDeclaration,
                             "expected declaration: rule text is empty", {1, 1}});
        } else if (out.order.size() > 1) {
            diags.push_back({Severity::Error, DiagnosticCode::SyntaxError,
                             "syntax error: rule text must contain exactly one declaration", {1, 1}});
        } else if (out.order[0] != 'a' && out.order[0] != 'd') {
            diags.push_back({Severity::Error, DiagnosticCode::ExpectedDeclaration,
                             "expected declaration: an 'act' or 'duty' declaration", {1, 1}});
        } else {
            auto duties = duty_names(context.duties);
            if (out.order[0] == 'd') duties.push_back(out.spec.duties[0].name);
            if (context.find_fact(out.order[0] == 'a' ? out.spec.acts[0].name : out.spec.duties[0].name)) {
                Location at = out.order[0] == 'a' ? out.spec.acts[0].loc : out.spec.duties[0].loc;
                diags.push_back({Severity::Error, DiagnosticCode::DuplicateName,
                                 "duplicate name: rule name clashes with a fact", at});
            }
            Checker checker(context.facts, duties, diags);
            if (out.order[0] == 'a')
                checker.check_act(out.spec.acts[0]);
            else
                checker.check_duty(out.spec.duties[0]);
        }
    }

    clamp_locations(diags, rule_text);
    result.diagnostics = std::move(diags);
    if (!has_errors(result.diagnostics)) {
        if (out.order[0] == 'a')
            result.decl = std::move(out.spec.acts[0]);
        else
            result.decl = std::move(out.spec.duties[0]);
    }
    return result;
}

std::optional<Expr> parse_expr(std::string_view text, const NormSpec& context, std::vector<Diagnostic>* diagnostics) {
    Parser parser(detail::tokenize(text));
    auto e = parser.parse_standalone_expr();
    auto diags = parser.take_diags();
    if (e) {
        Checker checker(context.facts, duty_names(context.duties), diags);
        checker.check_condition(*e, false);
    }
    clamp_locations(diags, text);
    bool failed = has_errors(diags);
    if (diagnostics) *diagnostics = std::move(diags);
    if (failed) return std::nullopt;
    return e;
}

}  // namespace normcase::dsl

namespace normcase::dsl {

std::optional<FactRef> parse_fact_ref(std::string_view text) {
    auto toks = detail::tokenize(text);
    std::size_t i = 0;
    if (toks[i].kind != Tok::Ident || detail::is_reserved(toks[i].text)) return std::nullopt;
    FactRef ref{toks[i++].text, {}};
    if (toks[i].kind == Tok::LParen) {
        ++i;
        while (true) {
            const Token& t = toks[i++];
            switch (t.kind) {
                case Tok::Int: ref.args.emplace_back(static_cast<std::int64_t>(std::stoll(t.text))); break;
                case Tok::String: ref.args.emplace_back(t.text); break;
                case Tok::DateLit: ref.args.emplace_back(*Date::parse(t.text)); break;
                case Tok::Ident:
                    if (t.text == "true" || t.text == "false") {
                        ref.args.emplace_back(t.text == "true");
                        break;
                    }
                    return std::nullopt;
                default: return std::nullopt;
            }
            if (toks[i].kind == Tok::Comma) {
                ++i;
                continue;
            }
            if (toks[i].kind != Tok::RParen) return std::nullopt;
            ++i;
            break;
        }
    }
    if (toks[i].kind != Tok::End) return std::nullopt;
    return ref;
}

}  // namespace normcase::dsl
