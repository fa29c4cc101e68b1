#pragma once

#include <vector>

#include "tacsim/events.hpp"
#include "tacsim/types.hpp"

namespace tacsim {

// Per-tick world state. Entity ordering is fixed for the whole rollout and
// doubles as the deterministic tie-break order; dead entities stay in place
// with health 0.
struct GlobalState {
    int tick = 0;
    double time = 0.0;  // tick * dt, recomputed each step
    std::vector<EntityState> entities;
    std::vector<Event> transient_events;  // events emitted by the step that produced this state

    int entity_index(const std::string& id) const {
        for (std::size_t i = 0; i < entities.size(); ++i) {
            if (entities[i].id == id) return static_cast<int>(i);
        }
        return -1;
    }
    EntityState* find_entity(const std::string& id) {
        const int i = entity_index(id);
        return i < 0 ? nullptr : &entities[static_cast<std::size_t>(i)];
    }
    const EntityState* find_entity(const std::string& id) const {
        const int i = entity_index(id);
        return i < 0 ? nullptr : &entities[static_cast<std::size_t>(i)];
    }
};

GlobalState initial_state(const Scenario& scenario);

}  // namespace tacsim
