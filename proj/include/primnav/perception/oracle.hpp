#pragma once

#include <span>
#include <string>
#include <vector>

#include "primnav/gridworld/world.hpp"
#include "primnav/perception/embedding.hpp"

namespace primnav::perception {

struct Detection {
  int object_id = 0;
  std::string label;
  double bearing = 0.0;
  double range = 0.0;
  double confidence = 1.0;
  // World-frame estimate of the object position; filled in by callers that know the pose.
  Point position;

  friend bool operator==(const Detection&, const Detection&) = default;
};

struct NoiseConfig {
  double false_negative_rate = 0.0;
  double false_positive_rate = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

inline constexpr double kTrueDetectionConfidence = 1.0;
inline constexpr double kFalsePositiveConfidence = 0.6;

// True when every token of `query` appears in `label`.
bool token_match(std::string_view label, std::string_view query);
// Category or subcategory token-matches the query.
bool object_matches(const gridworld::SceneObject& object, std::string_view query);

// Oracle detector over the current sightings. False negatives drop a true detection with
// probability `false_negative_rate`; false positives relabel a visible non-matching
// object as one of the queries. Both draws are keyed by (seed, object id, step), so the
// same observation always yields the same detections. Sorted by range, then id.
std::vector<Detection> detect(const gridworld::Scene& scene, const gridworld::Observation& obs,
                              std::span<const std::string> queries, const NoiseConfig& noise);

// Subcategory of the detected object if listed (case-insensitive), else "other".
std::string classify(const gridworld::Scene& scene, const Detection& detection,
                     std::span<const std::string> subcategories);

// Attribute lookup over visible objects. Supported questions: "what color is the X",
// "is the X <state>", "how many X", "where is the X", "what object is this".
// Anything else, or no visible referent, answers "unknown".
std::string answer(const gridworld::Scene& scene, const gridworld::Observation& obs,
                   std::string_view question);
// Answer about a goal image rather than the current view.
std::string answer_image(const gridworld::Scene& scene, std::string_view image_ref,
                         std::string_view question);

// 1.0 when the referenced instance is visible, else the cosine between the goal
// category and the nearest visible same-category object's text, 0.0 when none is visible.
double match(const gridworld::Scene& scene, const gridworld::Observation& obs,
             std::string_view goal_image, const Embedder& embedder);

// Text describing everything in view, or "floor" for an empty view.
std::string observation_text(const gridworld::Scene& scene, const gridworld::Observation& obs);

}  // namespace primnav::perception
