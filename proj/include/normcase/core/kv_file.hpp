#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace normcase {

/// Minimal TOML subset: `[section]` headers, `key = value` with string,
/// integer or boolean values, and `#` comments. Keys outside any section
/// land in section "".
class KvFile {
public:
    using Value = std::variant<bool, std::int64_t, std::string>;
    using Section = std::map<std::string, Value, std::less<>>;

    struct Error : std::runtime_error {
        Error(const std::string& origin, int line, const std::string& msg)
            : std::runtime_error(origin + ":" + std::to_string(line) + ": " + msg) {}
    };

    static KvFile parse(std::string_view text, const std::string& origin = "<config>");
    static KvFile load(const std::filesystem::path& path);

    bool has_section(std::string_view name) const { return sections_.find(name) != sections_.end(); }
    /// Empty section when absent.
    const Section& section(std::string_view name) const;
    std::vector<std::string> section_names() const;

    std::optional<std::string> get_string(std::string_view section, std::string_view key) const;
    std::optional<std::int64_t> get_int(std::string_view section, std::string_view key) const;
    std::optional<bool> get_bool(std::string_view section, std::string_view key) const;

private:
    template <typename T>
    std::optional<T> get(std::string_view section, std::string_view key) const;

    std::string origin_;
    std::map<std::string, Section, std::less<>> sections_;
};

}  // namespace normcase
