#pragma once

#include <optional>
#include <string_view>

#include "normcase/core/date.hpp"
#include "normcase/service/config.hpp"

namespace normcase::service {

enum class UrgencyClock { Green, Yellow, Red };

std::string_view to_string(UrgencyClock c);

struct Urgency {
    UrgencyClock clock = UrgencyClock::Green;
    bool overdue = false;
    long days_remaining = 0;

    friend bool operator==(const Urgency&, const Urgency&) = default;
};

/// Red within `red_days` of the term, Yellow within `yellow_days`, else
/// Green. A passed term is Red and overdue.
Urgency compute_urgency(Date decision_term, Date today, const UrgencyThresholds& thresholds = {});

}  // namespace normcase::service
