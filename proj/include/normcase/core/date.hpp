#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace normcase {

/// Calendar date (days since the Unix epoch), printed as YYYY-MM-DD.
class Date {
public:
    constexpr Date() = default;
    constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}
    Date(int year, unsigned month, unsigned day);

    static std::optional<Date> parse(std::string_view text);
    static Date from_days(long days) { return Date(std::chrono::sys_days(std::chrono::days(days))); }

    std::string str() const;
    long days_since_epoch() const { return days_.time_since_epoch().count(); }
    std::chrono::sys_days sys_days() const { return days_; }

    Date plus_days(long n) const { return Date(days_ + std::chrono::days(n)); }
    long days_until(const Date& later) const { return (later.days_ - days_).count(); }

    friend constexpr auto operator<=>(const Date&, const Date&) = default;
    friend constexpr bool operator==(const Date&, const Date&) = default;

private:
    std::chrono::sys_days days_{};
};

/// UTC timestamp with second resolution, printed as YYYY-MM-DDTHH:MM:SSZ.
class DateTime {
public:
    constexpr DateTime() = default;
    constexpr explicit DateTime(std::chrono::sys_seconds t) : t_(t) {}

    static std::optional<DateTime> parse(std::string_view text);
    static DateTime start_of(const Date& d) { return DateTime(std::chrono::sys_seconds(d.sys_days())); }
    static DateTime now();

    std::string str() const;
    Date date() const { return Date(std::chrono::floor<std::chrono::days>(t_)); }
    DateTime plus_seconds(long s) const { return DateTime(t_ + std::chrono::seconds(s)); }

    friend constexpr auto operator<=>(const DateTime&, const DateTime&) = default;
    friend constexpr bool operator==(const DateTime&, const DateTime&) = default;

private:
    std::chrono::sys_seconds t_{};
};

}  // namespace normcase
