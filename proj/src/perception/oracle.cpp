#include "primnav/perception/oracle.hpp"

#include <algorithm>
#include <set>

namespace primnav::perception {

using gridworld::Observation;
using gridworld::Scene;
using gridworld::SceneObject;

void NoiseConfig::validate() const {
  auto ok = [](double r) { return r >= 0.0 && r <= 1.0; };
  if (!ok(false_negative_rate) || !ok(false_positive_rate))
    throw ValidationError("noise rates must lie in [0, 1]");
}

bool token_match(std::string_view label, std::string_view query) {
  auto q = tokenize(query);
  if (q.empty()) return false;
  auto l = tokenize(label);
  std::set<std::string> have(l.begin(), l.end());
  return std::all_of(q.begin(), q.end(), [&](const std::string& t) { return have.count(t) > 0; });
}

bool object_matches(const SceneObject& object, std::string_view query) {
  return token_match(object.category, query) ||
         (!object.subcategory.empty() && token_match(object.subcategory, query));
}

namespace {

double draw(std::uint64_t seed, int object_id, int step, std::string_view salt) {
  std::uint64_t h = mix_seed(seed, fnv1a64(salt));
  h = mix_seed(h, static_cast<std::uint64_t>(static_cast<std::uint32_t>(object_id)));
  h = mix_seed(h, static_cast<std::uint64_t>(static_cast<std::uint32_t>(step)));
  return unit_double(splitmix64(h));
}

std::string singular(const std::string& t) {
  if (t.size() > 3 && t.back() == 's' && t[t.size() - 2] != 's') return t.substr(0, t.size() - 1);
  return t;
}

bool matches_loose(const SceneObject& o, const std::vector<std::string>& noun) {
  std::vector<std::string> q;
  for (const auto& t : noun) q.push_back(singular(t));
  auto check = [&](const std::string& label) {
    std::set<std::string> have;
    for (const auto& t : tokenize(label)) have.insert(singular(t));
    return !q.empty() && std::all_of(q.begin(), q.end(), [&](const auto& t) { return have.count(t) > 0; });
  };
  return check(o.category) || (!o.subcategory.empty() && check(o.subcategory));
}

// Visible objects matching `noun`, nearest first.
std::vector<std::pair<double, const SceneObject*>> visible_matching(const Scene& scene, const Observation& obs,
                                                                    const std::vector<std::string>& noun) {
  std::vector<std::pair<double, const SceneObject*>> out;
  for (const auto& s : obs.sightings) {
    const auto* o = scene.find_object(s.object_id);
    if (o && matches_loose(*o, noun)) out.push_back({s.range, o});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first < b.first : a.second->id < b.second->id;
  });
  return out;
}

std::vector<std::string> strip_articles(std::vector<std::string> t) {
  static const std::set<std::string> kArticles = {"the", "a", "an", "any", "there"};
  std::erase_if(t, [](const std::string& s) { return kArticles.count(s) > 0; });
  return t;
}

std::string attribute_or_unknown(const SceneObject& o, const std::string& key) {
  auto it = o.attributes.find(key);
  return it == o.attributes.end() ? "unknown" : it->second;
}

std::string object_name(const SceneObject& o) {
  return o.subcategory.empty() ? o.category : o.subcategory;
}

}  // namespace

std::vector<Detection> detect(const Scene& scene, const Observation& obs,
                              std::span<const std::string> queries, const NoiseConfig& noise) {
  if (queries.empty()) throw ValidationError("detect: queries must be non-empty");
  std::vector<Detection> out;
  for (const auto& s : obs.sightings) {
    const auto* o = scene.find_object(s.object_id);
    if (!o) continue;
    auto hit = std::find_if(queries.begin(), queries.end(),
                            [&](const std::string& q) { return object_matches(*o, q); });
    if (hit != queries.end()) {
      if (noise.false_negative_rate > 0.0 &&
          draw(noise.seed, o->id, obs.steps_taken, "fn") < noise.false_negative_rate)
        continue;
      out.push_back({o->id, *hit, s.bearing, s.range, kTrueDetectionConfidence, {}});
    } else if (noise.false_positive_rate > 0.0 &&
               draw(noise.seed, o->id, obs.steps_taken, "fp") < noise.false_positive_rate) {
      std::size_t qi = static_cast<std::size_t>(
          splitmix64(noise.seed ^ static_cast<std::uint64_t>(o->id)) % queries.size());
      out.push_back({o->id, queries[qi], s.bearing, s.range, kFalsePositiveConfidence, {}});
    }
  }
  std::sort(out.begin(), out.end(), [](const Detection& a, const Detection& b) {
    return a.range != b.range ? a.range < b.range : a.object_id < b.object_id;
  });
  return out;
}

std::string classify(const Scene& scene, const Detection& detection,
                     std::span<const std::string> subcategories) {
  if (subcategories.empty()) throw ValidationError("classify: subcategory list is empty");
  const auto* o = scene.find_object(detection.object_id);
  if (!o) throw LookupError("classify: no object with id " + std::to_string(detection.object_id));
  std::string mine = to_lower(o->subcategory);
  for (const auto& s : subcategories)
    if (!mine.empty() && to_lower(s) == mine) return s;
  return "other";
}

std::string answer(const Scene& scene, const Observation& obs, std::string_view question) {
  auto t = tokenize(question);
  if (t.empty()) throw ValidationError("answer: empty question");
  auto starts = [&](std::initializer_list<const char*> p) {
    if (t.size() < p.size()) return false;
    std::size_t i = 0;
    for (const char* w : p)
      if (t[i++] != w) return false;
    return true;
  };
  auto rest = [&](std::size_t from, std::size_t drop_back = 0) {
    std::vector<std::string> r(t.begin() + static_cast<long>(from), t.end() - static_cast<long>(drop_back));
    return strip_articles(std::move(r));
  };

  if ((starts({"what", "color", "is"}) || starts({"what", "colour", "is"})) && t.size() > 3) {
    auto hits = visible_matching(scene, obs, rest(3));
    return hits.empty() ? "unknown" : attribute_or_unknown(*hits.front().second, "color");
  }
  if (starts({"how", "many"}) && t.size() > 2) {
    auto noun = rest(2);
    static const std::set<std::string> kTail = {"are", "is", "there", "visible", "here", "in", "view"};
    while (!noun.empty() && kTail.count(noun.back())) noun.pop_back();
    if (noun.empty()) return "unknown";
    return std::to_string(visible_matching(scene, obs, noun).size());
  }
  if (starts({"where", "is"}) && t.size() > 2) {
    auto hits = visible_matching(scene, obs, rest(2));
    return hits.empty() ? "unknown" : attribute_or_unknown(*hits.front().second, "room");
  }
  if (starts({"what", "object", "is", "this"}) || starts({"what", "is", "this"})) {
    if (obs.sightings.empty()) return "unknown";
    const auto* nearest = &obs.sightings.front();
    for (const auto& s : obs.sightings)
      if (s.range < nearest->range) nearest = &s;
    const auto* o = scene.find_object(nearest->object_id);
    return o ? object_name(*o) : "unknown";
  }
  if (starts({"is"}) && t.size() >= 3) {
    const std::string& state = t.back();
    auto hits = visible_matching(scene, obs, rest(1, 1));
    if (hits.empty()) return "unknown";
    const auto& attrs = hits.front().second->attributes;
    auto it = attrs.find("state");
    if (it == attrs.end()) return "unknown";
    return it->second == state ? "yes" : "no";
  }
  return "unknown";
}

std::string answer_image(const Scene& scene, std::string_view image_ref, std::string_view question) {
  const auto* o = scene.find_by_image(image_ref);
  if (!o) throw LookupError("unknown image_ref '" + std::string(image_ref) + "'");
  auto t = tokenize(question);
  bool what_object = (t.size() >= 3 && t[0] == "what" && (t[1] == "object" || t[1] == "is"));
  if (what_object) return object_name(*o);
  if (t.size() >= 2 && t[0] == "what" && (t[1] == "color" || t[1] == "colour"))
    return attribute_or_unknown(*o, "color");
  return "unknown";
}

double match(const Scene& scene, const Observation& obs, std::string_view goal_image,
             const Embedder& embedder) {
  const auto* goal = scene.find_by_image(goal_image);
  if (!goal) throw LookupError("match: unknown image_ref '" + std::string(goal_image) + "'");
  const gridworld::Sighting* nearest = nullptr;
  for (const auto& s : obs.sightings) {
    if (s.object_id == goal->id) return 1.0;
    const auto* o = scene.find_object(s.object_id);
    if (o && o->category == goal->category && (!nearest || s.range < nearest->range)) nearest = &s;
  }
  if (!nearest) return 0.0;
  const auto* other = scene.find_object(nearest->object_id);
  double c = cosine(embedder.embed_text(goal->category), embedder.embed_text(object_text(*other)));
  return std::clamp(c, 0.0, 1.0);
}

std::string observation_text(const Scene& scene, const Observation& obs) {
  std::string s;
  for (const auto& sight : obs.sightings) {
    const auto* o = scene.find_object(sight.object_id);
    if (!o) continue;
    if (!s.empty()) s += ' ';
    s += object_text(*o);
  }
  return s.empty() ? "floor" : s;
}

}  // namespace primnav::perception
