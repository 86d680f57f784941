#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "normcase/dsl/parser.hpp"
#include "test_support.hpp"

using namespace normcase;
using namespace normcase::dsl;
using normcase::testing::read_file;

namespace {

ParseResult parse(const std::string& text) { return parse_spec({text, "test"}); }

bool has_code(const std::vector<Diagnostic>& diags, DiagnosticCode code) {
    return std::any_of(diags.begin(), diags.end(), [&](const Diagnostic& d) { return d.code == code; });
}

void expect_in_bounds(const std::vector<Diagnostic>& diags, const std::string& text) {
    std::vector<int> lens{0};
    for (char c : text) {
        if (c == '\n')
            lens.push_back(0);
        else
            ++lens.back();
    }
    for (const auto& d : diags) {
        ASSERT_GE(d.loc.line, 1);
        ASSERT_LE(d.loc.line, static_cast<int>(lens.size()));
        ASSERT_GE(d.loc.column, 1);
        ASSERT_LE(d.loc.column, lens[d.loc.line - 1] + 1) << d.message;
    }
}

}  // namespace

TEST(ParseSpec, EmptyTextHasNoDeclarations) {
    auto r = parse("");
    ASSERT_TRUE(r.ok());
    EXPECT_TRUE(r.spec->facts.empty());
    EXPECT_TRUE(r.spec->acts.empty());
    EXPECT_TRUE(r.spec->duties.empty());
    EXPECT_TRUE(r.diagnostics.empty());
}

TEST(ParseSpec, BundledIitPolicy) {
    auto spec = normcase::testing::iit_spec();
    auto grants = std::count_if(spec.acts.begin(), spec.acts.end(),
                                [](const ActDecl& a) { return a.name.rfind("grant-", 0) == 0; });
    EXPECT_EQ(grants, 3);
    ASSERT_NE(spec.find_act("grant-iit-single"), nullptr);
    ASSERT_NE(spec.find_act("grant-iit-single-parent"), nullptr);
    ASSERT_NE(spec.find_act("grant-iit-couple"), nullptr);
    ASSERT_NE(spec.find_act("reject-iit"), nullptr);
    const auto* decide = spec.find_duty("decide-on-request");
    ASSERT_NE(decide, nullptr);
    EXPECT_EQ(decide->deadline_field, "decision-term");
    for (const char* q : {"age", "registered-in-municipality", "single", "child-at-home", "long-term-low-income",
                          "income", "wealth"})
        EXPECT_NE(spec.find_fact(q), nullptr) << q;
    EXPECT_EQ(spec.find_fact("age")->type, ScalarType::Integer);
    EXPECT_EQ(spec.find_fact("registered-in-municipality")->type, ScalarType::Boolean);
}

TEST(ParseSpec, UnresolvedIdentifierIsLocated) {
    auto r = parse("fact a\n\nact do-it\n  actor x\n  recipient y\n  conditioned by a and Foo\n");
    ASSERT_FALSE(r.ok());
    ASSERT_EQ(r.diagnostics.size(), 1u);
    const auto& d = r.diagnostics[0];
    EXPECT_EQ(d.code, DiagnosticCode::UnresolvedIdentifier);
    EXPECT_NE(d.message.find("unresolved identifier 'Foo'"), std::string::npos);
    EXPECT_EQ(d.loc.line, 6);
    EXPECT_EQ(d.loc.column, 24);
}

TEST(ParseSpec, DistinctDiagnosticClasses) {
    auto dup = parse("fact a\nfact a\n");
    ASSERT_FALSE(dup.ok());
    EXPECT_TRUE(has_code(dup.diagnostics, DiagnosticCode::DuplicateName));
    EXPECT_EQ(dup.diagnostics[0].loc.line, 2);

    auto dup_kinds = parse("fact a\nact a\n actor x\n recipient y\n");
    EXPECT_TRUE(has_code(dup_kinds.diagnostics, DiagnosticCode::DuplicateName));

    auto type = parse("fact n : integer\nact x\n actor a\n recipient b\n conditioned by n = true\n");
    ASSERT_FALSE(type.ok());
    EXPECT_TRUE(has_code(type.diagnostics, DiagnosticCode::TypeMismatch));

    auto ordering = parse("fact t : text\nact x\n actor a\n recipient b\n conditioned by t < \"b\"\n");
    EXPECT_TRUE(has_code(ordering.diagnostics, DiagnosticCode::TypeMismatch));

    auto non_bool = parse("fact n : integer\nact x\n actor a\n recipient b\n conditioned by n\n");
    EXPECT_TRUE(has_code(non_bool.diagnostics, DiagnosticCode::TypeMismatch));

    auto syntax = parse("fact a\nact x\n actor a\n recipient b\n conditioned by a and\n");
    ASSERT_FALSE(syntax.ok());
    EXPECT_TRUE(has_code(syntax.diagnostics, DiagnosticCode::SyntaxError));

    auto arity = parse("fact z(name : text)\nact x\n actor a\n recipient b\n conditioned by z(1)\n");
    EXPECT_TRUE(has_code(arity.diagnostics, DiagnosticCode::TypeMismatch));

    auto effect = parse("fact n : integer\nact x\n actor a\n recipient b\n creates n\n");
    EXPECT_TRUE(has_code(effect.diagnostics, DiagnosticCode::TypeMismatch));

    auto impose = parse("fact n : integer\nact x\n actor a\n recipient b\n imposes nothing\n");
    EXPECT_TRUE(has_code(impose.diagnostics, DiagnosticCode::UnresolvedIdentifier));

    auto deadline = parse("fact a\nact x\n actor a\n recipient b\n conditioned by deadline-passed\n");
    EXPECT_TRUE(has_code(deadline.diagnostics, DiagnosticCode::UnresolvedIdentifier));

    auto bad_deadline = parse("fact a\nduty d\n holder a\n claimant b\n deadline a\n");
    EXPECT_TRUE(has_code(bad_deadline.diagnostics, DiagnosticCode::TypeMismatch));
}

TEST(ParseSpec, MissingRolesAndDuplicateClauses) {
    EXPECT_FALSE(parse("act x\n recipient b\n").ok());
    EXPECT_FALSE(parse("act x\n actor a\n actor c\n recipient b\n").ok());
    EXPECT_FALSE(parse("duty d\n holder a\n").ok());
}

TEST(ParseSpec, RecoversAndReportsSeveralErrors) {
    auto r = parse("fact\nfact ok\nact x\n actor\nfact fine\nact y\n actor a\n recipient b\n conditioned by missing\n");
    ASSERT_FALSE(r.ok());
    EXPECT_GE(r.diagnostics.size(), 3u);
}

TEST(ParseSpec, IsDeterministic) {
    for (const auto& path : normcase::testing::spec_corpus()) {
        std::string text = read_file(path);
        auto a = parse(text);
        auto b = parse(text);
        ASSERT_TRUE(a.ok()) << path;
        EXPECT_EQ(*a.spec, *b.spec);
    }
}

TEST(PrintSpec, EmptySpecIsHeaderOnly) {
    EXPECT_EQ(print_spec(NormSpec{}), "# normcase specification\n");
}

TEST(PrintSpec, SingleFactDeclaration) {
    auto r = parse("fact age : integer");
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(print_spec(*r.spec), "# normcase specification\n\nfact age : integer\n");
}

TEST(PrintSpec, RoundTripOverCorpus) {
    for (const auto& path : normcase::testing::spec_corpus()) {
        auto first = parse(read_file(path));
        ASSERT_TRUE(first.ok()) << path;
        std::string printed = print_spec(*first.spec);
        auto second = parse(printed);
        ASSERT_TRUE(second.ok()) << path << "\n" << printed;
        EXPECT_EQ(*first.spec, *second.spec) << path;
        EXPECT_EQ(print_spec(*second.spec), printed) << path;
        EXPECT_EQ(printed.find('\r'), std::string::npos);
    }
}

TEST(PrintSpec, ParenthesesPreserveTreeShape) {
    NormSpec ctx;
    for (const char* n : {"a", "b", "c"}) ctx.facts.push_back({n, {}, ScalarType::Boolean, {}});
    for (const char* text : {"a and (b and c)", "(a or b) and c", "not (a and b)", "a or b and c", "not not a"}) {
        auto e = parse_expr(text, ctx);
        ASSERT_TRUE(e) << text;
        auto again = parse_expr(print_expr(*e), ctx);
        ASSERT_TRUE(again) << print_expr(*e);
        EXPECT_EQ(*e, *again) << text;
    }
    EXPECT_EQ(print_expr(*parse_expr("a and (b and c)", ctx)), "a and (b and c)");
    EXPECT_EQ(print_expr(*parse_expr("(a and b) and c", ctx)), "a and b and c");
}

TEST(ValidateRuleText, ParsesReplacementAct) {
    auto ctx = normcase::testing::iit_spec();
    auto r = validate_rule_text(
        "act grant-iit-single\n  actor officer\n  recipient applicant\n"
        "  conditioned by registered-in-municipality and wealth <= 10000\n"
        "  creates approved\n  terminates decide-on-request\n",
        ctx);
    ASSERT_TRUE(r.ok()) << (r.diagnostics.empty() ? "" : r.diagnostics[0].message);
    const auto& act = std::get<ActDecl>(*r.decl);
    EXPECT_EQ(act.name, "grant-iit-single");
    EXPECT_EQ(act.terminates.size(), 1u);
}

TEST(ValidateRuleText, UnknownFactIsAnError) {
    auto ctx = normcase::testing::iit_spec();
    auto r = validate_rule_text("act x\n actor a\n recipient b\n conditioned by shoe-size > 40\n", ctx);
    ASSERT_FALSE(r.ok());
    EXPECT_EQ(r.diagnostics[0].code, DiagnosticCode::UnresolvedIdentifier);
}

TEST(ValidateRuleText, EmptyTextExpectsDeclaration) {
    auto r = validate_rule_text("  \n# only a comment\n", NormSpec{});
    ASSERT_FALSE(r.ok());
    EXPECT_EQ(r.diagnostics[0].code, DiagnosticCode::ExpectedDeclaration);
    EXPECT_NE(r.diagnostics[0].message.find("expected declaration"), std::string::npos);
}

TEST(ValidateRuleText, RejectsFactsAndMultipleDeclarations) {
    EXPECT_FALSE(validate_rule_text("fact q", NormSpec{}).ok());
    EXPECT_FALSE(validate_rule_text("act a\n actor x\n recipient y\nact b\n actor x\n recipient y\n", NormSpec{}).ok());
}

TEST(ParseFactRef, RoundTripsInstanceKeys) {
    FactRef ref{"allowance", {Scalar(std::string("single")), Scalar(std::int64_t{3}), Scalar(Date(2024, 2, 29))}};
    auto parsed = parse_fact_ref(instance_key(ref));
    ASSERT_TRUE(parsed);
    EXPECT_EQ(*parsed, ref);
    EXPECT_FALSE(parse_fact_ref("and"));
    EXPECT_FALSE(parse_fact_ref("x("));
}

// Random byte-level mutations of corpus files either parse to a spec that
// survives the round trip or produce in-bounds diagnostics.
TEST(ParseSpecFuzz, MutatedCorpusYieldsSpecOrDiagnostics) {
    std::mt19937 rng(20240611);
    const std::string alphabet = "abcxyz-_ ()=<>!:,\"#\n0123456789andornotfactactduty";
    for (const auto& path : normcase::testing::spec_corpus()) {
        const std::string base = read_file(path);
        for (int iter = 0; iter < 300; ++iter) {
            std::string text = base;
            int edits = 1 + static_cast<int>(rng() % 4);
            for (int k = 0; k < edits && !text.empty(); ++k) {
                std::size_t pos = rng() % text.size();
                switch (rng() % 3) {
                    case 0: text.erase(pos, 1 + rng() % 5); break;
                    case 1: text.insert(pos, 1, alphabet[rng() % alphabet.size()]); break;
                    default: text[pos] = alphabet[rng() % alphabet.size()]; break;
                }
            }
            auto r = parse(text);
            if (r.ok()) {
                auto again = parse(print_spec(*r.spec));
                ASSERT_TRUE(again.ok()) << text;
                ASSERT_EQ(*again.spec, *r.spec) << text;
            } else {
                ASSERT_FALSE(r.diagnostics.empty());
                expect_in_bounds(r.diagnostics, text);
            }
        }
    }
}
