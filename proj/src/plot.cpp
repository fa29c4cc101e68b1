#include "tacsim/plot.hpp"

#include <cstdio>
#include <sstream>

namespace tacsim {

std::string trajectory_csv(const RolloutRecord& record) {
    std::string out = "tick,entity_id,x,y,health,suppressed\n";
    char line[160];
    for (const EntitySummary& e : record.entities) {
        auto it = record.trajectories.find(e.id);
        if (it == record.trajectories.end()) continue;
        for (std::size_t t = 0; t < it->second.size(); ++t) {
            const TrajPoint& p = it->second[t];
            std::snprintf(line, sizeof(line), "%zu,%s,%.6f,%.6f,%.6f,%d\n", t, e.id.c_str(),
                          p.position.x, p.position.y, p.health, p.suppressed ? 1 : 0);
            out += line;
        }
    }
    return out;
}

namespace {

void polyline(std::ostringstream& svg, const std::vector<Vec2>& pts, const char* color,
              double width, bool dashed, double scale, double height) {
    if (pts.size() < 2) return;
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width << "\"";
    if (dashed) svg << " stroke-dasharray=\"4 3\"";
    svg << " points=\"";
    for (const Vec2& p : pts) svg << p.x * scale << "," << (height - p.y) * scale << " ";
    svg << "\"/>\n";
}

}  // namespace

std::string trajectory_svg(const RolloutRecord& record, const CandidatePlan& plan,
                           const Scenario& scenario) {
    const double scale = 4.0;
    const double w = scenario.map_width * scale;
    const double h = scenario.map_height * scale;
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    svg << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"#fafaf5\"/>\n";

    for (const Circle& z : scenario.constraint_set.no_fly_zones) {
        svg << "<circle cx=\"" << z.center.x * scale << "\" cy=\""
            << (scenario.map_height - z.center.y) * scale << "\" r=\"" << z.radius * scale
            << "\" fill=\"#d0d0d0\" fill-opacity=\"0.5\" stroke=\"#888\"/>\n";
    }
    for (const EntityState& e : scenario.entities) {
        if (e.side != Side::Opponent || !e.weapon) continue;
        svg << "<circle cx=\"" << e.position.x * scale << "\" cy=\""
            << (scenario.map_height - e.position.y) * scale << "\" r=\""
            << e.weapon->range * scale
            << "\" fill=\"#cc3333\" fill-opacity=\"0.08\" stroke=\"#cc3333\" "
               "stroke-opacity=\"0.4\"/>\n";
    }

    for (const auto& [id, pts] : plan.planned_trajectories) {
        polyline(svg, pts, "#3366cc", 1.2, true, scale, scenario.map_height);
    }
    for (const EntitySummary& e : record.entities) {
        auto it = record.trajectories.find(e.id);
        if (it == record.trajectories.end()) continue;
        std::vector<Vec2> pts;
        pts.reserve(it->second.size());
        for (const TrajPoint& p : it->second) pts.push_back(p.position);
        polyline(svg, pts, e.side == Side::PlanExecuting ? "#1a5fb4" : "#c01c28", 1.8, false,
                 scale, scenario.map_height);
    }
    for (const EntityState& e : scenario.entities) {
        svg << "<circle cx=\"" << e.position.x * scale << "\" cy=\""
            << (scenario.map_height - e.position.y) * scale << "\" r=\"4\" fill=\""
            << (e.side == Side::PlanExecuting ? "#1a5fb4" : "#c01c28") << "\"/>\n";
        svg << "<text x=\"" << e.position.x * scale + 6 << "\" y=\""
            << (scenario.map_height - e.position.y) * scale - 4
            << "\" font-size=\"11\" font-family=\"sans-serif\">" << e.id << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace tacsim
