#include "normcase/core/value.hpp"

namespace normcase {

std::string_view to_string(ScalarType t) {
    switch (t) {
        case ScalarType::Boolean: return "boolean";
        case ScalarType::Integer: return "integer";
        case ScalarType::Text: return "text";
        case ScalarType::Date: return "date";
    }
    return "?";
}

std::optional<ScalarType> scalar_type_from_string(std::string_view s) {
    if (s == "boolean") return ScalarType::Boolean;
    if (s == "integer") return ScalarType::Integer;
    if (s == "text") return ScalarType::Text;
    if (s == "date") return ScalarType::Date;
    return std::nullopt;
}

ScalarType type_of(const Scalar& v) {
    return static_cast<ScalarType>(v.index());
}

std::string to_literal(const Scalar& v) {
    switch (type_of(v)) {
        case ScalarType::Boolean: return std::get<bool>(v) ? "true" : "false";
        case ScalarType::Integer: return std::to_string(std::get<std::int64_t>(v));
        case ScalarType::Date: return std::get<Date>(v).str();
        case ScalarType::Text: {
            std::string out = "\"";
            for (char c : std::get<std::string>(v)) {
                if (c == '"' || c == '\\') out += '\\';
                if (c == '\n') {
                    out += "\\n";
                    continue;
                }
                out += c;
            }
            return out + "\"";
        }
    }
    return {};
}

}  // namespace normcase
