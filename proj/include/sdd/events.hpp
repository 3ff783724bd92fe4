#pragma once

#include <optional>
#include <string>
#include <vector>

namespace sdd {

enum class EventType {
    OrderGenerated,
    OrderAccepted,
    OrderExpired,
    Pickup,
    Delivery,
    DeadlineMissed,
    InvalidAction,
    EpisodeEnd,
};

const char* event_name(EventType type);

struct Event {
    int t = 0;
    EventType type = EventType::EpisodeEnd;
    std::optional<int> vehicle;
    std::optional<int> slot;
    double reward = 0.0;

    friend bool operator==(const Event&, const Event&) = default;
};

/// One line-delimited JSON record: {"t":..,"event":..,"vehicle":..,"slot":..,"reward":..}
std::string to_jsonl(const Event& e);

}  // namespace sdd
