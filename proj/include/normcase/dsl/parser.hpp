#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "normcase/dsl/ast.hpp"

namespace normcase::dsl {

struct SpecText {
    std::string content;
    std::string origin = "<text>";
};

enum class Severity { Error, Warning };

enum class DiagnosticCode { SyntaxError, ExpectedDeclaration, DuplicateName, UnresolvedIdentifier, TypeMismatch };

struct Diagnostic {
    Severity severity = Severity::Error;
    DiagnosticCode code = DiagnosticCode::SyntaxError;
    std::string message;
    Location loc;
};

std::string_view to_string(DiagnosticCode code);

/// `origin:line:column: error: message`
std::string format_diagnostic(const Diagnostic& d, std::string_view origin);

struct ParseResult {
    std::optional<NormSpec> spec;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return spec.has_value(); }
};

ParseResult parse_spec(const SpecText& src);

using RuleDecl = std::variant<ActDecl, DutyDecl>;

struct RuleParseResult {
    std::optional<RuleDecl> decl;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return decl.has_value(); }
};

/// Parses exactly one act or duty declaration, resolving names against
/// `context` (its facts and duties). The declaration may reuse a name
/// already declared in the context.
RuleParseResult validate_rule_text(std::string_view rule_text, const NormSpec& context);

/// Parses a standalone condition expression against the facts of `context`.
std::optional<Expr> parse_expr(std::string_view text, const NormSpec& context,
                               std::vector<Diagnostic>* diagnostics = nullptr);

std::string print_spec(const NormSpec& spec);
std::string print_act(const ActDecl& act);
std::string print_duty(const DutyDecl& duty);
std::string print_expr(const Expr& e);

/// Parses an instance key such as `age` or `allowance("single")`.
std::optional<FactRef> parse_fact_ref(std::string_view text);

}  // namespace normcase::dsl
