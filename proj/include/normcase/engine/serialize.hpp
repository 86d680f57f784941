#pragma once

#include <string>

#include <json.hpp>

#include "normcase/engine/engine.hpp"

namespace normcase::engine {

using json = nlohmann::json;

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

json scalar_to_json(const Scalar& v);
/// Decodes a value of the declared type; throws FormatError on mismatch.
Scalar scalar_from_json(const json& j, ScalarType type);

json source_to_json(const dsl::SourceRef& s);
dsl::SourceRef source_from_json(const json& j);

json violation_to_json(const Violation& v);
Violation violation_from_json(const json& j);

/// Snapshot format: `assignments`, `duties`, `history`, `violations`, `clock`.
json state_to_json(const NormState& state);
NormState state_from_json(const json& j, const NormSpec& spec);

/// Reads a `{fact-key: value-or-null}` object into typed assignments.
std::vector<Assignment> assignments_from_json(const json& j, const NormSpec& spec);

/// Stable 64-bit FNV-1a digest of the canonical snapshot, as 16 hex digits.
std::string state_digest(const NormState& state);

}  // namespace normcase::engine
