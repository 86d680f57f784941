#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "normcase/core/date.hpp"

namespace normcase {

enum class ScalarType { Boolean, Integer, Text, Date };

std::string_view to_string(ScalarType t);
std::optional<ScalarType> scalar_type_from_string(std::string_view s);

/// A definite fact value. Unknown is modelled as an empty FactValue.
using Scalar = std::variant<bool, std::int64_t, std::string, Date>;
using FactValue = std::optional<Scalar>;

ScalarType type_of(const Scalar& v);

/// Literal form used by the DSL printer: true, 42, "text", 2024-01-31.
std::string to_literal(const Scalar& v);

}  // namespace normcase
