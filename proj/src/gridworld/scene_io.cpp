#include "primnav/gridworld/scene_io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace primnav::gridworld {

using nlohmann::json;

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    throw FormatError(source_ + ": field '" + field + "': " + what);
  }

  void check_keys(const json& obj, const std::string& where,
                  std::initializer_list<std::string_view> allowed) const {
    if (!obj.is_object()) fail(where, "expected an object");
    for (const auto& [key, _] : obj.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
        fail(where.empty() ? key : where + "." + key, "unknown field");
    }
  }

  const json& require(const json& obj, const std::string& where, const std::string& key) const {
    auto it = obj.find(key);
    if (it == obj.end()) fail(where.empty() ? key : where + "." + key, "missing");
    return *it;
  }

  double number(const json& v, const std::string& field) const {
    if (!v.is_number()) fail(field, "expected a number");
    return v.get<double>();
  }
  int integer(const json& v, const std::string& field) const {
    if (!v.is_number_integer()) fail(field, "expected an integer");
    return v.get<int>();
  }
  std::string text(const json& v, const std::string& field) const {
    if (!v.is_string()) fail(field, "expected a string");
    return v.get<std::string>();
  }

 private:
  std::string source_;
};

std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

Grid parse_grid(const Reader& r, const json& rows) {
  if (!rows.is_array() || rows.empty()) r.fail("grid", "expected a non-empty array of strings");
  std::size_t width = 0;
  std::vector<std::string> lines;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::string row = r.text(rows[i], "grid[" + std::to_string(i) + "]");
    if (i == 0) width = row.size();
    if (row.empty() || row.size() != width)
      r.fail("grid[" + std::to_string(i) + "]", "rows must be non-empty and of equal length");
    lines.push_back(std::move(row));
  }
  Grid g(static_cast<int>(lines.size()), static_cast<int>(width));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      char c = lines[i][j];
      if (c != '#' && c != '.')
        r.fail("grid[" + std::to_string(i) + "]", std::string("unexpected cell character '") + c + "'");
      g.set({static_cast<int>(i), static_cast<int>(j)}, c == '#' ? CellKind::kObstacle : CellKind::kFree);
    }
  }
  return g;
}

SceneObject parse_object(const Reader& r, const json& v, const std::string& where) {
  r.check_keys(v, where, {"id", "category", "subcategory", "attributes", "x", "y", "image_ref"});
  SceneObject o;
  o.id = r.integer(r.require(v, where, "id"), where + ".id");
  o.category = r.text(r.require(v, where, "category"), where + ".category");
  o.position.x = r.number(r.require(v, where, "x"), where + ".x");
  o.position.y = r.number(r.require(v, where, "y"), where + ".y");
  if (auto it = v.find("subcategory"); it != v.end()) o.subcategory = r.text(*it, where + ".subcategory");
  if (auto it = v.find("attributes"); it != v.end()) {
    if (!it->is_object()) r.fail(where + ".attributes", "expected an object");
    for (const auto& [k, val] : it->items())
      o.attributes[k] = r.text(val, where + ".attributes." + k);
  }
  if (auto it = v.find("image_ref"); it != v.end() && !it->is_null())
    o.image_ref = r.text(*it, where + ".image_ref");
  return o;
}

AgentPose parse_pose(const Reader& r, const json& v, const std::string& where) {
  r.check_keys(v, where, {"x", "y", "heading", "pitch"});
  AgentPose p;
  p.x = r.number(r.require(v, where, "x"), where + ".x");
  p.y = r.number(r.require(v, where, "y"), where + ".y");
  if (auto it = v.find("heading"); it != v.end()) p.heading = r.number(*it, where + ".heading");
  if (auto it = v.find("pitch"); it != v.end()) p.pitch = r.number(*it, where + ".pitch");
  return p;
}

GoalSpec parse_goal(const Reader& r, const json& v, const std::string& where) {
  r.check_keys(v, where, {"kind", "payload", "target_ids", "ground_truth_answer"});
  GoalSpec g;
  try {
    g.kind = goal_kind_from_string(r.text(r.require(v, where, "kind"), where + ".kind"));
  } catch (const ValidationError& e) {
    r.fail(where + ".kind", e.what());
  }
  g.payload = r.text(r.require(v, where, "payload"), where + ".payload");
  if (auto it = v.find("target_ids"); it != v.end()) {
    if (!it->is_array()) r.fail(where + ".target_ids", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i)
      g.target_ids.push_back(r.integer((*it)[i], where + ".target_ids[" + std::to_string(i) + "]"));
  }
  if (auto it = v.find("ground_truth_answer"); it != v.end() && !it->is_null())
    g.ground_truth_answer = r.text(*it, where + ".ground_truth_answer");
  return g;
}

Episode parse_episode(const Reader& r, const json& v, const std::string& where) {
  r.check_keys(v, where, {"id", "scene_ref", "start_pose", "goals", "task_kind",
                          "step_budget_per_goal", "success_radius"});
  Episode e;
  if (auto it = v.find("id"); it != v.end()) e.id = r.text(*it, where + ".id");
  if (auto it = v.find("scene_ref"); it != v.end()) e.scene_ref = r.text(*it, where + ".scene_ref");
  e.start_pose = parse_pose(r, r.require(v, where, "start_pose"), where + ".start_pose");
  const json& goals = r.require(v, where, "goals");
  if (!goals.is_array()) r.fail(where + ".goals", "expected an array");
  for (std::size_t i = 0; i < goals.size(); ++i)
    e.goals.push_back(parse_goal(r, goals[i], where + ".goals[" + std::to_string(i) + "]"));
  try {
    e.task_kind = task_kind_from_string(r.text(r.require(v, where, "task_kind"), where + ".task_kind"));
  } catch (const ValidationError& ex) {
    r.fail(where + ".task_kind", ex.what());
  }
  if (auto it = v.find("step_budget_per_goal"); it != v.end())
    e.step_budget_per_goal = r.integer(*it, where + ".step_budget_per_goal");
  if (auto it = v.find("success_radius"); it != v.end())
    e.success_radius = r.number(*it, where + ".success_radius");
  return e;
}

json pose_json(const AgentPose& p) {
  return {{"x", p.x}, {"y", p.y}, {"heading", p.heading}, {"pitch", p.pitch}};
}

}  // namespace

SceneFile parse_scene_file(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(source + ": line " + std::to_string(line_of(text, e.byte)) + ": " + e.what());
  }
  Reader r(source);
  r.check_keys(doc, "", {"name", "resolution", "grid", "objects", "episodes"});
  SceneFile out;
  Scene& s = out.scene;
  if (auto it = doc.find("name"); it != doc.end()) s.name = r.text(*it, "name");
  s.resolution = r.number(r.require(doc, "", "resolution"), "resolution");
  s.grid = parse_grid(r, r.require(doc, "", "grid"));
  if (auto it = doc.find("objects"); it != doc.end()) {
    if (!it->is_array()) r.fail("objects", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i)
      s.objects.push_back(parse_object(r, (*it)[i], "objects[" + std::to_string(i) + "]"));
  }
  s.validate();
  if (auto it = doc.find("episodes"); it != doc.end()) {
    if (!it->is_array()) r.fail("episodes", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      Episode e = parse_episode(r, (*it)[i], "episodes[" + std::to_string(i) + "]");
      if (e.scene_ref.empty()) e.scene_ref = s.name;
      e.validate();
      out.episodes.push_back(std::move(e));
    }
  }
  return out;
}

SceneFile load_scene_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path.string() + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scene_file(ss.str(), path.string());
}

Scene load_scene(const std::filesystem::path& path) { return load_scene_file(path).scene; }

std::string dump_scene_file(const Scene& scene, const std::vector<Episode>& episodes) {
  json doc;
  doc["name"] = scene.name;
  doc["resolution"] = scene.resolution;
  json rows = json::array();
  for (int r = 0; r < scene.grid.rows(); ++r) {
    std::string row;
    for (int c = 0; c < scene.grid.cols(); ++c)
      row.push_back(scene.grid.at({r, c}) == CellKind::kObstacle ? '#' : '.');
    rows.push_back(row);
  }
  doc["grid"] = rows;
  json objs = json::array();
  for (const auto& o : scene.objects) {
    json j = {{"id", o.id},          {"category", o.category},     {"subcategory", o.subcategory},
              {"attributes", o.attributes}, {"x", o.position.x}, {"y", o.position.y}};
    j["image_ref"] = o.image_ref ? json(*o.image_ref) : json(nullptr);
    objs.push_back(std::move(j));
  }
  doc["objects"] = objs;
  json eps = json::array();
  for (const auto& e : episodes) {
    json goals = json::array();
    for (const auto& g : e.goals) {
      json jg = {{"kind", to_string(g.kind)}, {"payload", g.payload}, {"target_ids", g.target_ids}};
      if (g.ground_truth_answer) jg["ground_truth_answer"] = *g.ground_truth_answer;
      goals.push_back(std::move(jg));
    }
    eps.push_back({{"id", e.id},
                   {"scene_ref", e.scene_ref},
                   {"start_pose", pose_json(e.start_pose)},
                   {"goals", goals},
                   {"task_kind", to_string(e.task_kind)},
                   {"step_budget_per_goal", e.step_budget_per_goal},
                   {"success_radius", e.success_radius}});
  }
  doc["episodes"] = eps;
  return doc.dump(1) + "\n";
}

void save_scene_file(const std::filesystem::path& path, const Scene& scene,
                     const std::vector<Episode>& episodes) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot write file");
  out << dump_scene_file(scene, episodes);
}

}  // namespace primnav::gridworld
