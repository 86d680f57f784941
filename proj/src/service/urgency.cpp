#include "normcase/service/urgency.hpp"

namespace normcase::service {

std::string_view to_string(UrgencyClock c) {
    switch (c) {
        case UrgencyClock::Green: return "green";
        case UrgencyClock::Yellow: return "yellow";
        case UrgencyClock::Red: return "red";
    }
    return "green";
}

Urgency compute_urgency(Date decision_term, Date today, const UrgencyThresholds& t) {
    Urgency u;
    u.days_remaining = today.days_until(decision_term);
    u.overdue = u.days_remaining < 0;
    if (u.days_remaining <= t.red_days)
        u.clock = UrgencyClock::Red;
    else if (u.days_remaining <= t.yellow_days)
        u.clock = UrgencyClock::Yellow;
    else
        u.clock = UrgencyClock::Green;
    return u;
}

}  // namespace normcase::service
