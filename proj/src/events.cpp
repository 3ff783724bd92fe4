#include "sdd/events.hpp"

#include <json.hpp>

namespace sdd {

const char* event_name(EventType type) {
    switch (type) {
        case EventType::OrderGenerated: return "OrderGenerated";
        case EventType::OrderAccepted: return "OrderAccepted";
        case EventType::OrderExpired: return "OrderExpired";
        case EventType::Pickup: return "Pickup";
        case EventType::Delivery: return "Delivery";
        case EventType::DeadlineMissed: return "DeadlineMissed";
        case EventType::InvalidAction: return "InvalidAction";
        case EventType::EpisodeEnd: return "EpisodeEnd";
    }
    return "Unknown";
}

std::string to_jsonl(const Event& e) {
    nlohmann::json j{{"t", e.t}, {"event", event_name(e.type)}, {"reward", e.reward}};
    j["vehicle"] = e.vehicle ? nlohmann::json(*e.vehicle) : nlohmann::json(nullptr);
    j["slot"] = e.slot ? nlohmann::json(*e.slot) : nlohmann::json(nullptr);
    return j.dump();
}

}  // namespace sdd
