#pragma once

#include <map>
#include <string>

namespace tacsim {

enum class EventKind { Fire, Hit, Miss, SuppressStart, SuppressEnd, Destroyed, MoveCompleted };

const char* to_string(EventKind k);
EventKind event_kind_from_string(const std::string& s);

// One transient event. `target_id` is empty for kinds that have no target.
// The payload carries kind-specific numeric fields (distance, p, roll, ...)
// so engagement decisions can be audited from the log alone.
struct Event {
    int tick = 0;
    EventKind kind = EventKind::Fire;
    std::string actor_id;
    std::string target_id;
    std::map<std::string, double> payload;
};

}  // namespace tacsim
