#pragma once

// Test-only oracles, independent of the engine's evaluation path.

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "normcase/dsl/ast.hpp"
#include "normcase/engine/engine.hpp"

namespace normcase::testing {

/// Expression over boolean variables p0..p(n-1), evaluated on the numeric
/// encoding 0 = false, 1 = unknown, 2 = true with and = min, or = max,
/// not = 2 - x.
struct OracleExpr {
    enum class Op { Var, Lit, And, Or, Not } op = Op::Lit;
    int index = 0;  // variable index or literal value
    std::shared_ptr<const OracleExpr> lhs, rhs;

    int eval(const std::vector<int>& vars) const;
    std::string text() const;
};

using OraclePtr = std::shared_ptr<const OracleExpr>;

/// Every expression of depth <= max_depth (atoms have depth 1) over the given
/// number of variables plus the literals true/false/unknown.
std::vector<OraclePtr> enumerate_expressions(int variables, int max_depth);

/// All 3^n assignments in the numeric encoding.
std::vector<std::vector<int>> all_assignments(int variables);

engine::TruthValue to_truth(int v);

/// Random spec with boolean and integer facts and acts whose conditions mix
/// connectives and comparisons.
dsl::NormSpec random_spec(std::mt19937& rng);

/// Random assignment for `spec`, each fact Unknown with probability 1/3.
std::vector<engine::Assignment> random_assignments(const dsl::NormSpec& spec, std::mt19937& rng);

/// A definite random value for the fact.
Scalar random_value(const dsl::FactDecl& fact, std::mt19937& rng);

}  // namespace normcase::testing
