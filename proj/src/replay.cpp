#include "craft/replay.hpp"

#include <sstream>

#include "craft/serialize.hpp"

namespace craft::replay {

namespace {

char heading_glyph(Heading h) {
  switch (h) {
    case Heading::North: return '^';
    case Heading::East: return '>';
    case Heading::South: return 'v';
    case Heading::West: return '<';
  }
  return '?';
}

char object_glyph(const ObjectState& o) {
  if (o.kind == ObjectKind::Block) return '#';
  return o.folded ? 'f' : heading_glyph(o.heading);
}

void render_level(const WorldState& s, int level, int y,
                  std::ostringstream& os) {
  for (int x = 0; x < s.width; ++x) {
    char oc = '.', tc = '.', hc = '.';
    if (const ObjectState* o = s.object_at(x, y, level)) oc = object_glyph(*o);
    if (const RobotState* r = s.robot_at(x, y, level)) {
      tc = static_cast<char>((r->carrying ? 'a' : 'A') + r->team);
      hc = heading_glyph(r->heading);
    }
    if (x > 0) os << ' ';
    os << oc << tc << hc;
  }
}

}  // namespace

std::string render_state(const WorldState& s) {
  std::ostringstream os;
  for (int y = s.height - 1; y >= 0; --y) {
    render_level(s, 0, y, os);
    os << "  |  ";
    render_level(s, 1, y, os);
    os << '\n';
  }
  return os.str();
}

std::vector<std::string> render_trajectory(const async::Trajectory& traj) {
  std::vector<std::string> frames;
  frames.reserve(traj.records.size());
  for (size_t i = 0; i < traj.records.size(); ++i) {
    const async::TrajRecord& rec = traj.records[i];
    std::ostringstream os;
    os << "frame " << i << " t=" << io::format_double(rec.time) << " robot=";
    if (rec.deciding_robot < 0)
      os << '-';
    else
      os << rec.deciding_robot;
    os << '\n' << render_state(rec.state);
    frames.push_back(os.str());
  }
  return frames;
}

}  // namespace craft::replay
