#pragma once

#include <optional>

#include "sdd/grid.hpp"

namespace sdd {

/// Order status codes. The world state stores the assignee id and uses
/// AssignedSelfUnpicked/Onboard for assigned slots; the per-vehicle
/// projection (relative_status) renders AssignedOther for every vehicle
/// that is not the assignee.
enum class OrderStatus : int {
    Inactive = -1,
    Open = 0,
    AssignedOther = 1,
    AssignedSelfUnpicked = 2,
    Onboard = 3,
    Delivered = 4,
};

struct OrderSlot {
    GridCoord location{};
    int request_time = 0;
    int deadline = 0;
    int reward = 0;
    OrderStatus status = OrderStatus::Inactive;
    std::optional<int> assignee;
    std::optional<int> zone;

    bool active() const { return status != OrderStatus::Inactive; }

    void clear() {
        status = OrderStatus::Inactive;
        assignee.reset();
        zone.reset();
        location = {};
        request_time = 0;
        deadline = 0;
        reward = 0;
    }

    friend bool operator==(const OrderSlot&, const OrderSlot&) = default;
};

/// Observer-relative status value as seen by `viewer`.
inline OrderStatus relative_status(const OrderSlot& slot, int viewer) {
    switch (slot.status) {
        case OrderStatus::AssignedSelfUnpicked:
        case OrderStatus::Onboard:
            if (slot.assignee && *slot.assignee != viewer) return OrderStatus::AssignedOther;
            return slot.status;
        default:
            return slot.status;
    }
}

}  // namespace sdd
