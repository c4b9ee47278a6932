#include "primnav/interpreter/value.hpp"

#include <sstream>

namespace primnav::interp {

namespace {

constexpr const char* kKindNames[] = {"text", "number", "boolean", "point", "detections", "embedding", "answer", "nav_outcome"};

[[noreturn]] void wrong_kind(ValueKind want, ValueKind got) {
  throw ValidationError("expected " + to_string(want) + ", got " + to_string(got));
}

std::string format_number(double d) {
  std::ostringstream os;
  os.precision(6);
  os << d;
  return os.str();
}

// JSON has no infinities; they travel as strings.
nlohmann::json number_to_json(double d) {
  if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
  if (std::isnan(d)) return "nan";
  return d;
}

double number_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInfinity;
    if (s == "-inf") return -kInfinity;
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw FormatError("bad number '" + s + "'");
  }
  return j.get<double>();
}

}  // namespace

std::string to_string(ValueKind k) { return kKindNames[static_cast<int>(k)]; }

ValueKind value_kind_from_string(std::string_view s) {
  for (int i = 0; i < 8; ++i)
    if (s == kKindNames[i]) return static_cast<ValueKind>(i);
  throw FormatError("unknown value type '" + std::string(s) + "'");
}

const std::string& Value::text() const {
  if (auto* t = std::get_if<Text>(&v_)) return t->value;
  if (auto* a = std::get_if<Answer>(&v_)) return a->value;
  wrong_kind(ValueKind::kText, kind());
}

double Value::number() const {
  if (auto* d = std::get_if<double>(&v_)) return *d;
  wrong_kind(ValueKind::kNumber, kind());
}

bool Value::boolean() const {
  if (auto* b = std::get_if<bool>(&v_)) return *b;
  wrong_kind(ValueKind::kBoolean, kind());
}

const Point& Value::point() const {
  if (auto* p = std::get_if<Point>(&v_)) return *p;
  wrong_kind(ValueKind::kPoint, kind());
}

const Detections& Value::detections() const {
  if (auto* d = std::get_if<Detections>(&v_)) return *d;
  wrong_kind(ValueKind::kDetections, kind());
}

const perception::EmbeddingVector& Value::embedding() const {
  if (auto* e = std::get_if<perception::EmbeddingVector>(&v_)) return *e;
  wrong_kind(ValueKind::kEmbedding, kind());
}

const pointnav::NavOutcome& Value::nav() const {
  if (auto* n = std::get_if<pointnav::NavOutcome>(&v_)) return *n;
  wrong_kind(ValueKind::kNavOutcome, kind());
}

bool Value::truthy() const {
  switch (kind()) {
    case ValueKind::kText:
    case ValueKind::kAnswer: return !text().empty();
    case ValueKind::kNumber: return number() != 0.0;
    case ValueKind::kBoolean: return boolean();
    case ValueKind::kPoint: return true;
    case ValueKind::kDetections: return !detections().empty();
    case ValueKind::kEmbedding: return !embedding().empty();
    case ValueKind::kNavOutcome: return nav().status == pointnav::NavStatus::kReached;
  }
  return false;
}

std::string Value::summary() const {
  switch (kind()) {
    case ValueKind::kText: return "'" + text() + "'";
    case ValueKind::kAnswer: return "answer '" + text() + "'";
    case ValueKind::kNumber: return format_number(number());
    case ValueKind::kBoolean: return boolean() ? "True" : "False";
    case ValueKind::kPoint: return "(" + format_number(point().x) + ", " + format_number(point().y) + ")";
    case ValueKind::kDetections: {
      std::string s = std::to_string(detections().size()) + " detection(s)";
      for (const auto& d : detections()) s += " [" + d.label + " #" + std::to_string(d.object_id) + " @" + format_number(d.range) + "m]";
      return s;
    }
    case ValueKind::kEmbedding: return "embedding(" + std::to_string(embedding().dim()) + ")";
    case ValueKind::kNavOutcome:
      return pointnav::to_string(nav().status) + " in " + std::to_string(nav().steps_used) + " steps, " +
             format_number(nav().final_distance) + " m left";
  }
  return "?";
}

nlohmann::json to_json(const Value& v) {
  using nlohmann::json;
  json out{{"type", to_string(v.kind())}};
  switch (v.kind()) {
    case ValueKind::kText:
    case ValueKind::kAnswer: out["value"] = v.text(); break;
    case ValueKind::kNumber: out["value"] = number_to_json(v.number()); break;
    case ValueKind::kBoolean: out["value"] = v.boolean(); break;
    case ValueKind::kPoint: out["value"] = {v.point().x, v.point().y}; break;
    case ValueKind::kDetections: {
      json arr = json::array();
      for (const auto& d : v.detections())
        arr.push_back({{"object_id", d.object_id}, {"label", d.label}, {"bearing", d.bearing}, {"range", d.range},
                       {"confidence", d.confidence}, {"position", {d.position.x, d.position.y}}});
      out["value"] = arr;
      break;
    }
    case ValueKind::kEmbedding: out["value"] = v.embedding().components; break;
    case ValueKind::kNavOutcome:
      out["value"] = {{"status", pointnav::to_string(v.nav().status)},
                      {"steps_used", v.nav().steps_used},
                      {"final_distance", number_to_json(v.nav().final_distance)}};
      break;
  }
  return out;
}

Value value_from_json(const nlohmann::json& j) {
  try {
    const auto kind = value_kind_from_string(j.at("type").get<std::string>());
    const auto& v = j.at("value");
    switch (kind) {
      case ValueKind::kText: return Text{v.get<std::string>()};
      case ValueKind::kAnswer: return Answer{v.get<std::string>()};
      case ValueKind::kNumber: return number_from_json(v);
      case ValueKind::kBoolean: return v.get<bool>();
      case ValueKind::kPoint: return Point{v.at(0).get<double>(), v.at(1).get<double>()};
      case ValueKind::kDetections: {
        Detections out;
        for (const auto& d : v) {
          perception::Detection det;
          det.object_id = d.at("object_id").get<int>();
          det.label = d.at("label").get<std::string>();
          det.bearing = d.at("bearing").get<double>();
          det.range = d.at("range").get<double>();
          det.confidence = d.at("confidence").get<double>();
          det.position = {d.at("position").at(0).get<double>(), d.at("position").at(1).get<double>()};
          out.push_back(std::move(det));
        }
        return out;
      }
      case ValueKind::kEmbedding: return perception::EmbeddingVector{v.get<std::vector<double>>()};
      case ValueKind::kNavOutcome: {
        pointnav::NavOutcome n;
        n.status = pointnav::nav_status_from_string(v.at("status").get<std::string>());
        n.steps_used = v.at("steps_used").get<int>();
        n.final_distance = number_from_json(v.at("final_distance"));
        return n;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed value: ") + e.what());
  }
  throw FormatError("malformed value");
}

}  // namespace primnav::interp
