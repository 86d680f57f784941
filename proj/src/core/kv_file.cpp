#include "normcase/core/kv_file.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace normcase {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool is_key_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_' ||
           c == '.';
}

bool valid_key(std::string_view k) {
    if (k.empty()) return false;
    for (char c : k)
        if (!is_key_char(c)) return false;
    return true;
}

// Strips a trailing comment outside of quotes.
std::string_view strip_comment(std::string_view line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted && c == '\\') {
            ++i;
            continue;
        }
        if (c == '"') quoted = !quoted;
        if (c == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

}  // namespace

KvFile KvFile::parse(std::string_view text, const std::string& origin) {
    KvFile out;
    out.origin_ = origin;
    out.sections_[""];
    std::string current;
    int lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = trim(strip_comment(text.substr(pos, nl - pos)));
        pos = nl + 1;
        ++lineno;
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw Error(origin, lineno, "unterminated section header");
            auto name = trim(line.substr(1, line.size() - 2));
            if (!valid_key(name)) throw Error(origin, lineno, "invalid section name");
            current = std::string(name);
            if (out.sections_.count(current) && current != "")
                throw Error(origin, lineno, "duplicate section [" + current + "]");
            out.sections_[current];
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string_view::npos) throw Error(origin, lineno, "expected key = value");
        auto key = trim(line.substr(0, eq));
        auto raw = trim(line.substr(eq + 1));
        if (!valid_key(key)) throw Error(origin, lineno, "invalid key '" + std::string(key) + "'");
        Value value;
        if (raw == "true" || raw == "false") {
            value = raw == "true";
        } else if (!raw.empty() && raw.front() == '"') {
            if (raw.size() < 2 || raw.back() != '"') throw Error(origin, lineno, "unterminated string");
            std::string s;
            for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
                char c = raw[i];
                if (c == '\\' && i + 2 < raw.size()) {
                    char n = raw[++i];
                    switch (n) {
                        case 'n': s += '\n'; break;
                        case 't': s += '\t'; break;
                        case '"': s += '"'; break;
                        case '\\': s += '\\'; break;
                        default: throw Error(origin, lineno, "unsupported escape");
                    }
                } else if (c == '"') {
                    throw Error(origin, lineno, "stray quote in string");
                } else {
                    s += c;
                }
            }
            value = std::move(s);
        } else {
            std::string digits;
            for (char c : raw)
                if (c != '_') digits += c;
            std::int64_t n = 0;
            auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
            if (digits.empty() || ec != std::errc() || p != digits.data() + digits.size())
                throw Error(origin, lineno, "unsupported value '" + std::string(raw) + "'");
            value = n;
        }
        auto& sec = out.sections_[current];
        if (sec.count(key)) throw Error(origin, lineno, "duplicate key '" + std::string(key) + "'");
        sec.emplace(std::string(key), std::move(value));
    }
    return out;
}

KvFile KvFile::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(path.string(), 0, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

const KvFile::Section& KvFile::section(std::string_view name) const {
    static const Section empty;
    auto it = sections_.find(name);
    return it == sections_.end() ? empty : it->second;
}

std::vector<std::string> KvFile::section_names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : sections_)
        if (!name.empty()) out.push_back(name);
    return out;
}

template <typename T>
std::optional<T> KvFile::get(std::string_view sec, std::string_view key) const {
    const auto& s = section(sec);
    auto it = s.find(key);
    if (it == s.end()) return std::nullopt;
    if (const T* v = std::get_if<T>(&it->second)) return *v;
    throw Error(origin_, 0, "key '" + std::string(key) + "' in [" + std::string(sec) + "] has the wrong type");
}

std::optional<std::string> KvFile::get_string(std::string_view s, std::string_view k) const {
    return get<std::string>(s, k);
}
std::optional<std::int64_t> KvFile::get_int(std::string_view s, std::string_view k) const {
    return get<std::int64_t>(s, k);
}
std::optional<bool> KvFile::get_bool(std::string_view s, std::string_view k) const { return get<bool>(s, k); }

}  // namespace normcase
