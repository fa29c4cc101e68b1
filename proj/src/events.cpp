#include "tacsim/events.hpp"

#include "tacsim/errors.hpp"

namespace tacsim {

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::Fire: return "Fire";
        case EventKind::Hit: return "Hit";
        case EventKind::Miss: return "Miss";
        case EventKind::SuppressStart: return "SuppressStart";
        case EventKind::SuppressEnd: return "SuppressEnd";
        case EventKind::Destroyed: return "Destroyed";
        case EventKind::MoveCompleted: return "MoveCompleted";
    }
    return "";
}

EventKind event_kind_from_string(const std::string& s) {
    if (s == "Fire") return EventKind::Fire;
    if (s == "Hit") return EventKind::Hit;
    if (s == "Miss") return EventKind::Miss;
    if (s == "SuppressStart") return EventKind::SuppressStart;
    if (s == "SuppressEnd") return EventKind::SuppressEnd;
    if (s == "Destroyed") return EventKind::Destroyed;
    if (s == "MoveCompleted") return EventKind::MoveCompleted;
    throw SchemaError("unknown event kind '" + s + "'");
}

}  // namespace tacsim
