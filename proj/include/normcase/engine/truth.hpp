#pragma once

#include <string_view>

namespace normcase::engine {

/// Strong-Kleene truth values.
enum class TruthValue { False, Unknown, True };

constexpr TruthValue kleene_not(TruthValue v) {
    switch (v) {
        case TruthValue::True: return TruthValue::False;
        case TruthValue::False: return TruthValue::True;
        default: return TruthValue::Unknown;
    }
}

constexpr TruthValue kleene_and(TruthValue a, TruthValue b) {
    if (a == TruthValue::False || b == TruthValue::False) return TruthValue::False;
    if (a == TruthValue::True && b == TruthValue::True) return TruthValue::True;
    return TruthValue::Unknown;
}

constexpr TruthValue kleene_or(TruthValue a, TruthValue b) {
    if (a == TruthValue::True || b == TruthValue::True) return TruthValue::True;
    if (a == TruthValue::False && b == TruthValue::False) return TruthValue::False;
    return TruthValue::Unknown;
}

constexpr TruthValue from_bool(bool b) { return b ? TruthValue::True : TruthValue::False; }

constexpr std::string_view to_string(TruthValue v) {
    switch (v) {
        case TruthValue::True: return "true";
        case TruthValue::False: return "false";
        default: return "unknown";
    }
}

}  // namespace normcase::engine
