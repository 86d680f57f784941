#include "normcase/core/date.hpp"

#include <cctype>
#include <cstdio>

namespace normcase {

namespace {

bool read_digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
    if (pos + n > s.size()) return false;
    out = 0;
    for (std::size_t i = pos; i < pos + n; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
        out = out * 10 + (s[i] - '0');
    }
    return true;
}

}  // namespace

Date::Date(int year, unsigned month, unsigned day)
    : days_(std::chrono::year_month_day{std::chrono::year{year}, std::chrono::month{month},
                                        std::chrono::day{day}}) {}

std::optional<Date> Date::parse(std::string_view text) {
    int y = 0, m = 0, d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    if (!read_digits(text, 0, 4, y) || !read_digits(text, 5, 2, m) || !read_digits(text, 8, 2, d))
        return std::nullopt;
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                    std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return Date(std::chrono::sys_days(ymd));
}

std::string Date::str() const {
    std::chrono::year_month_day ymd{days_};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::optional<DateTime> DateTime::parse(std::string_view text) {
    if (text.size() == 10) {
        auto d = Date::parse(text);
        if (!d) return std::nullopt;
        return start_of(*d);
    }
    if (text.size() != 20 || text[10] != 'T' || text[13] != ':' || text[16] != ':' || text[19] != 'Z')
        return std::nullopt;
    auto d = Date::parse(text.substr(0, 10));
    int hh = 0, mm = 0, ss = 0;
    if (!d || !read_digits(text, 11, 2, hh) || !read_digits(text, 14, 2, mm) || !read_digits(text, 17, 2, ss))
        return std::nullopt;
    if (hh > 23 || mm > 59 || ss > 59) return std::nullopt;
    return DateTime(std::chrono::sys_seconds(d->sys_days()) + std::chrono::hours(hh) +
                    std::chrono::minutes(mm) + std::chrono::seconds(ss));
}

DateTime DateTime::now() {
    return DateTime(std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()));
}

std::string DateTime::str() const {
    auto day = std::chrono::floor<std::chrono::days>(t_);
    std::chrono::hh_mm_ss hms{t_ - day};
    char buf[64];
    std::snprintf(buf, sizeof buf, "T%02ld:%02ld:%02ldZ", static_cast<long>(hms.hours().count()),
                  static_cast<long>(hms.minutes().count()), static_cast<long>(hms.seconds().count()));
    return Date(day).str() + buf;
}

}  // namespace normcase
