#include "craft/serialize.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace craft::io {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string opt_id(const std::optional<int>& v) {
  return v ? std::to_string(*v) : "-";
}

std::optional<int> parse_opt_id(const std::string& tok) {
  if (tok == "-") return std::nullopt;
  return std::stoi(tok);
}

struct ParseError : ConfigError {
  using ConfigError::ConfigError;
};

std::string next_token(std::istringstream& is, const char* what) {
  std::string tok;
  if (!(is >> tok)) throw ParseError(std::string("missing token: ") + what);
  return tok;
}

int next_int(std::istringstream& is, const char* what) {
  return std::stoi(next_token(is, what));
}

}  // namespace

std::string world_to_record(const WorldState& s) {
  std::ostringstream os;
  os << "W " << s.width << ' ' << s.height << ' ' << s.step_count;
  os << " P " << s.progress.size();
  for (int p : s.progress) os << ' ' << p;
  os << " R " << s.robots.size();
  for (const auto& r : s.robots) {
    os << ' ' << r.id << ' ' << r.team << ' ' << r.pos.x << ' ' << r.pos.y
       << ' ' << r.pos.level << ' ' << heading_name(r.heading) << ' '
       << opt_id(r.carrying) << ' ' << (r.under_block ? 1 : 0) << ' '
       << (r.in_slope ? 1 : 0);
  }
  os << " O " << s.objects.size();
  for (const auto& o : s.objects) {
    os << ' ' << o.id << ' ' << (o.kind == ObjectKind::Block ? 'B' : 'S')
       << ' ' << o.pos.x << ' ' << o.pos.y << ' ' << o.pos.level << ' '
       << heading_name(o.heading) << ' ' << (o.folded ? 1 : 0) << ' '
       << opt_id(o.carried_by);
  }
  return os.str();
}

WorldState world_from_record(const std::string& line) {
  std::istringstream is(line);
  WorldState s;
  std::string tag = next_token(is, "W");
  if (tag != "W") throw ParseError("expected world record, got '" + tag + "'");
  s.width = next_int(is, "width");
  s.height = next_int(is, "height");
  s.step_count = next_int(is, "step");
  if (next_token(is, "P") != "P") throw ParseError("expected P section");
  int nteams = next_int(is, "team count");
  s.progress.resize(nteams);
  for (int t = 0; t < nteams; ++t) s.progress[t] = next_int(is, "progress");
  if (next_token(is, "R") != "R") throw ParseError("expected R section");
  int nr = next_int(is, "robot count");
  for (int i = 0; i < nr; ++i) {
    RobotState r;
    r.id = next_int(is, "robot id");
    r.team = next_int(is, "team");
    r.pos.x = next_int(is, "x");
    r.pos.y = next_int(is, "y");
    r.pos.level = next_int(is, "level");
    r.heading = heading_from_name(next_token(is, "heading"));
    r.carrying = parse_opt_id(next_token(is, "carry"));
    r.under_block = next_int(is, "under_block") != 0;
    r.in_slope = next_int(is, "in_slope") != 0;
    s.robots.push_back(r);
  }
  if (next_token(is, "O") != "O") throw ParseError("expected O section");
  int no = next_int(is, "object count");
  for (int i = 0; i < no; ++i) {
    ObjectState o;
    o.id = next_int(is, "object id");
    std::string k = next_token(is, "kind");
    o.kind = k == "B" ? ObjectKind::Block : ObjectKind::Slope;
    o.pos.x = next_int(is, "x");
    o.pos.y = next_int(is, "y");
    o.pos.level = next_int(is, "level");
    o.heading = heading_from_name(next_token(is, "heading"));
    o.folded = next_int(is, "folded") != 0;
    o.carried_by = parse_opt_id(next_token(is, "carrier"));
    s.objects.push_back(o);
  }
  return s;
}

void write_trajectory(std::ostream& os, const async::Trajectory& traj) {
  size_t teams = traj.records.empty() ? 1 : traj.records[0].team_rewards.size();
  os << "TRAJ v1 id=" << traj.id << " outcome=" << traj.outcome_team
     << " success=" << (traj.success ? 1 : 0) << " teams=" << teams << '\n';
  for (const auto& rec : traj.records) {
    os << "REC t=" << format_double(rec.time) << " robot=" << rec.deciding_robot
       << " mask=" << rec.mask_bits << " repl=" << (rec.replaced ? 1 : 0)
       << " acts=";
    for (size_t i = 0; i < rec.in_flight.size(); ++i) {
      if (i) os << ',';
      os << static_cast<int>(rec.in_flight[i]);
    }
    os << " rew=";
    for (size_t i = 0; i < rec.team_rewards.size(); ++i) {
      if (i) os << ',';
      os << format_double(rec.team_rewards[i]);
    }
    os << " | " << world_to_record(rec.state) << '\n';
  }
  os << "END\n";
}

namespace {

std::string expect_kv(const std::string& tok, const std::string& key,
                      int line_no) {
  if (tok.rfind(key + "=", 0) != 0)
    throw ConfigError("trajectory parse error at line " +
                      std::to_string(line_no) + ": expected " + key + "=...");
  return tok.substr(key.size() + 1);
}

template <typename F>
std::vector<std::invoke_result_t<F, std::string>> split_list(
    const std::string& s, F f) {
  std::vector<std::invoke_result_t<F, std::string>> out;
  if (s.empty()) return out;
  std::istringstream is(s);
  std::string item;
  while (std::getline(is, item, ',')) out.push_back(f(item));
  return out;
}

}  // namespace

async::Trajectory read_trajectory(std::istream& is) {
  async::Trajectory traj;
  std::string line;
  int line_no = 0;
  if (!std::getline(is, line))
    throw ConfigError("trajectory parse error: empty input");
  ++line_no;
  {
    std::istringstream hs(line);
    std::string tag, ver, tok;
    hs >> tag >> ver;
    if (tag != "TRAJ" || ver != "v1")
      throw ConfigError("trajectory parse error at line 1: bad header");
    hs >> tok;
    traj.id = std::stoull(expect_kv(tok, "id", line_no));
    hs >> tok;
    traj.outcome_team = std::stoi(expect_kv(tok, "outcome", line_no));
    hs >> tok;
    traj.success = std::stoi(expect_kv(tok, "success", line_no)) != 0;
  }
  while (std::getline(is, line)) {
    ++line_no;
    if (line == "END") return traj;
    std::istringstream rs(line);
    std::string tag, tok;
    rs >> tag;
    if (tag != "REC")
      throw ConfigError("trajectory parse error at line " +
                        std::to_string(line_no) + ": expected REC");
    async::TrajRecord rec;
    rs >> tok;
    rec.time = std::stod(expect_kv(tok, "t", line_no));
    rs >> tok;
    rec.deciding_robot = std::stoi(expect_kv(tok, "robot", line_no));
    rs >> tok;
    rec.mask_bits = static_cast<uint16_t>(std::stoi(expect_kv(tok, "mask", line_no)));
    rs >> tok;
    rec.replaced = std::stoi(expect_kv(tok, "repl", line_no)) != 0;
    rs >> tok;
    rec.in_flight = split_list(expect_kv(tok, "acts", line_no), [](const std::string& s) {
      return static_cast<Action>(std::stoi(s));
    });
    rs >> tok;
    rec.team_rewards = split_list(expect_kv(tok, "rew", line_no), [](const std::string& s) {
      return std::stod(s);
    });
    rs >> tok;  // separator
    if (tok != "|")
      throw ConfigError("trajectory parse error at line " +
                        std::to_string(line_no) + ": expected '|'");
    std::string rest;
    std::getline(rs, rest);
    try {
      rec.state = world_from_record(rest.substr(rest.find_first_not_of(' ')));
    } catch (const std::exception& ex) {
      throw ConfigError("trajectory parse error at line " +
                        std::to_string(line_no) + ": " + ex.what());
    }
    traj.records.push_back(std::move(rec));
  }
  throw ConfigError("trajectory parse error at line " +
                    std::to_string(line_no) + ": missing END");
}

void save_trajectories(const std::string& path,
                       const std::vector<async::Trajectory>& trajs) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open for writing: " + path);
  for (const auto& t : trajs) write_trajectory(os, t);
}

std::vector<async::Trajectory> load_trajectories(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open: " + path);
  std::vector<async::Trajectory> out;
  while (is.peek() != EOF && is.good()) {
    out.push_back(read_trajectory(is));
    is >> std::ws;
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON configs
// ---------------------------------------------------------------------------

namespace {

GridPos pos_from_json(const json& j) {
  GridPos p;
  p.x = j.at("x").get<int>();
  p.y = j.at("y").get<int>();
  p.level = j.value("level", 0);
  return p;
}

json pos_to_json(const GridPos& p) {
  return json{{"x", p.x}, {"y", p.y}, {"level", p.level}};
}

ObjectKind kind_from_string(const std::string& s) {
  if (s == "Block" || s == "block") return ObjectKind::Block;
  if (s == "Slope" || s == "slope") return ObjectKind::Slope;
  throw ConfigError("unknown object kind: " + s);
}

}  // namespace

TaskSpec taskspec_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& ex) {
    throw ConfigError(std::string("task config parse error: ") + ex.what());
  }
  TaskSpec spec;
  spec.name = j.value("name", "");
  std::string mode = j.value("mode", "cooperative");
  if (mode == "cooperative")
    spec.mode = TaskMode::Cooperative;
  else if (mode == "competitive")
    spec.mode = TaskMode::Competitive;
  else
    throw ConfigError("unknown mode: " + mode);
  spec.width = j.at("width").get<int>();
  spec.height = j.at("height").get<int>();
  spec.r_build = j.value("r_build", 1.0);
  spec.r_completion = j.value("r_completion", 5.0);
  spec.horizon = j.value("horizon", 500);

  for (const auto& team : j.at("targets")) {
    std::vector<TargetPiece> pieces;
    for (const auto& tj : team) {
      TargetPiece t;
      t.pos = pos_from_json(tj);
      t.kind = kind_from_string(tj.value("kind", "Block"));
      if (tj.contains("heading"))
        t.heading = heading_from_name(tj.at("heading").get<std::string>());
      t.require_unfolded = tj.value("unfolded", false);
      pieces.push_back(t);
    }
    spec.targets.push_back(std::move(pieces));
  }
  if (j.contains("territories")) {
    for (const auto& rj : j.at("territories")) {
      CellRegion r;
      r.x0 = rj.at("x0").get<int>();
      r.y0 = rj.at("y0").get<int>();
      r.x1 = rj.at("x1").get<int>();
      r.y1 = rj.at("y1").get<int>();
      spec.territories.push_back(r);
    }
  }
  for (const auto& oj : j.at("inventory")) {
    InitialObject o;
    o.kind = kind_from_string(oj.at("kind").get<std::string>());
    o.pos = pos_from_json(oj);
    if (oj.contains("heading"))
      o.heading = heading_from_name(oj.at("heading").get<std::string>());
    o.folded = oj.value("folded", false);
    spec.inventory.push_back(o);
  }
  for (const auto& rj : j.at("robots")) {
    RobotSpawn r;
    r.team = rj.value("team", 0);
    if (rj.contains("x")) r.pos = pos_from_json(rj);
    if (rj.contains("heading"))
      r.heading = heading_from_name(rj.at("heading").get<std::string>());
    spec.robots.push_back(r);
  }
  return spec;
}

std::string taskspec_to_json(const TaskSpec& spec) {
  json j;
  j["name"] = spec.name;
  j["mode"] = spec.mode == TaskMode::Cooperative ? "cooperative" : "competitive";
  j["width"] = spec.width;
  j["height"] = spec.height;
  j["r_build"] = spec.r_build;
  j["r_completion"] = spec.r_completion;
  j["horizon"] = spec.horizon;
  j["targets"] = json::array();
  for (const auto& team : spec.targets) {
    json tj = json::array();
    for (const auto& t : team) {
      json p = pos_to_json(t.pos);
      p["kind"] = kind_name(t.kind);
      if (t.heading) p["heading"] = heading_name(*t.heading);
      p["unfolded"] = t.require_unfolded;
      tj.push_back(p);
    }
    j["targets"].push_back(tj);
  }
  if (!spec.territories.empty()) {
    j["territories"] = json::array();
    for (const auto& r : spec.territories)
      j["territories"].push_back(
          json{{"x0", r.x0}, {"y0", r.y0}, {"x1", r.x1}, {"y1", r.y1}});
  }
  j["inventory"] = json::array();
  for (const auto& o : spec.inventory) {
    json oj = pos_to_json(o.pos);
    oj["kind"] = kind_name(o.kind);
    oj["heading"] = heading_name(o.heading);
    oj["folded"] = o.folded;
    j["inventory"].push_back(oj);
  }
  j["robots"] = json::array();
  for (const auto& r : spec.robots) {
    json rj;
    rj["team"] = r.team;
    if (r.pos) {
      rj["x"] = r.pos->x;
      rj["y"] = r.pos->y;
      rj["level"] = r.pos->level;
    }
    rj["heading"] = heading_name(r.heading);
    j["robots"].push_back(rj);
  }
  return j.dump(2);
}

TaskSpec load_taskspec(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open task config: " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return taskspec_from_json(ss.str());
}

async::DurationModel duration_model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& ex) {
    throw ConfigError(std::string("duration model parse error: ") + ex.what());
  }
  async::DurationModel m;
  m.straight_continue = j.value("straight_continue", m.straight_continue);
  m.straight_start = j.value("straight_start", m.straight_start);
  m.lateral = j.value("lateral", m.lateral);
  m.turn = j.value("turn", m.turn);
  m.lift_drop = j.value("lift_drop", m.lift_drop);
  m.fold_unfold = j.value("fold_unfold", m.fold_unfold);
  m.stop = j.value("stop", m.stop);
  m.carry_factor = j.value("carry_factor", m.carry_factor);
  m.slope_factor = j.value("slope_factor", m.slope_factor);
  m.jitter = j.value("jitter", m.jitter);
  for (const auto& [k, v] :
       std::initializer_list<std::pair<const char*, double>>{
           {"straight_continue", m.straight_continue},
           {"straight_start", m.straight_start},
           {"lateral", m.lateral},
           {"turn", m.turn},
           {"lift_drop", m.lift_drop},
           {"fold_unfold", m.fold_unfold},
           {"stop", m.stop}})
    if (v <= 0.0)
      throw ConfigError(std::string("duration entry must be positive: ") + k);
  if (!(m.straight_continue < m.straight_start))
    throw ConfigError("continuing straight must be faster than starting");
  return m;
}

std::string duration_model_to_json(const async::DurationModel& m) {
  json j{{"straight_continue", m.straight_continue},
         {"straight_start", m.straight_start},
         {"lateral", m.lateral},
         {"turn", m.turn},
         {"lift_drop", m.lift_drop},
         {"fold_unfold", m.fold_unfold},
         {"stop", m.stop},
         {"carry_factor", m.carry_factor},
         {"slope_factor", m.slope_factor},
         {"jitter", m.jitter}};
  return j.dump(2);
}

}  // namespace craft::io
