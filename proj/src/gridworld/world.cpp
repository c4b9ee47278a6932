#include "primnav/gridworld/world.hpp"

#include <algorithm>

#include "primnav/gridworld/raycast.hpp"

namespace primnav::gridworld {

std::string to_string(Action a) {
  switch (a) {
    case Action::kForward: return "Forward";
    case Action::kMoveLeft: return "MoveLeft";
    case Action::kMoveRight: return "MoveRight";
    case Action::kLookUp: return "LookUp";
    case Action::kLookDown: return "LookDown";
    case Action::kStop: return "Stop";
  }
  return "?";
}

Action action_from_string(std::string_view s) {
  if (s == "Forward") return Action::kForward;
  if (s == "MoveLeft") return Action::kMoveLeft;
  if (s == "MoveRight") return Action::kMoveRight;
  if (s == "LookUp") return Action::kLookUp;
  if (s == "LookDown") return Action::kLookDown;
  if (s == "Stop") return Action::kStop;
  throw ValidationError("unknown action '" + std::string(s) + "'");
}

bool is_rotation(Action a) { return a == Action::kMoveLeft || a == Action::kMoveRight; }

namespace {

bool blocked_in(const Scene& scene, const Cell& c) { return !scene.grid.is_free(c); }

}  // namespace

WorldState::WorldState(std::shared_ptr<const Scene> scene, Episode episode, SensorConfig sensor,
                       AgentConfig agent)
    : scene_(std::move(scene)),
      episode_(std::move(episode)),
      sensor_(sensor),
      agent_(agent),
      pose_(episode_.start_pose),
      records_(episode_.goals.size()) {
  if (!scene_) throw ValidationError("reset: null scene");
  episode_.validate();
  if (!episode_.scene_ref.empty() && episode_.scene_ref != scene_->name)
    throw ValidationError("episode '" + episode_.id + "' refers to scene '" + episode_.scene_ref +
                          "', got '" + scene_->name + "'");
  if (!scene_->is_free(pose_.position()))
    throw ValidationError("episode '" + episode_.id + "': start pose is not on a free cell");
  pose_.heading = wrap360(pose_.heading);
  pose_.pitch = std::clamp(pose_.pitch, -agent_.pitch_limit, agent_.pitch_limit);
}

WorldState reset(std::shared_ptr<const Scene> scene, const Episode& episode, SensorConfig sensor,
                 AgentConfig agent) {
  return WorldState(std::move(scene), episode, sensor, agent);
}

const GoalSpec& WorldState::current_goal() const {
  std::size_t i = std::min(goal_index_, episode_.goals.size() - 1);
  return episode_.goals[i];
}

std::span<const GoalSpec> WorldState::visible_goals() const {
  std::size_t n = std::min(goal_index_ + 1, episode_.goals.size());
  return {episode_.goals.data(), n};
}

void WorldState::resolve_goal(bool reached, bool stopped) {
  auto& rec = records_[goal_index_];
  rec.attempted = true;
  rec.reached = reached;
  rec.stopped = stopped;
  rec.steps_at_end = steps_taken_;
  if (stopped) rec.stop_position = pose_.position();
  if (episode_.task_kind == TaskKind::kMultion && !reached) {
    wrong_found_ = stopped;
    terminated_ = true;
    return;
  }
  ++goal_index_;
  if (goal_index_ >= episode_.goals.size()) terminated_ = true;
}

void WorldState::abandon_goal() {
  if (terminated_) return;
  resolve_goal(false, false);
}

Observation WorldState::step(Action action) {
  if (terminated_) throw ProtocolError("step() called after the episode terminated");
  last_collided_ = false;
  switch (action) {
    case Action::kForward: {
      Point from = pose_.position();
      Point to = from + heading_vector(pose_.heading) * agent_.forward_step;
      bool ok = scene_->is_free(to) &&
                segment_clear(scene_->resolution, from, to,
                              [&](const Cell& c) { return blocked_in(*scene_, c); });
      if (ok) {
        pose_.x = to.x;
        pose_.y = to.y;
        path_length_ += agent_.forward_step;
      } else {
        last_collided_ = true;
      }
      break;
    }
    case Action::kMoveLeft: pose_.heading = wrap360(pose_.heading - agent_.turn_deg); break;
    case Action::kMoveRight: pose_.heading = wrap360(pose_.heading + agent_.turn_deg); break;
    case Action::kLookUp:
      pose_.pitch = std::min(pose_.pitch + agent_.pitch_step, agent_.pitch_limit);
      break;
    case Action::kLookDown:
      pose_.pitch = std::max(pose_.pitch - agent_.pitch_step, -agent_.pitch_limit);
      break;
    case Action::kStop: break;
  }
  ++steps_taken_;
  if (action == Action::kStop) {
    bool reached = false;
    const auto& goal = current_goal();
    if (!goal.target_ids.empty())
      reached = distance_to_targets(*scene_, goal, pose_.position()) <= episode_.success_radius;
    resolve_goal(reached, true);
  }
  Observation obs = sense();
  obs.collided = last_collided_;
  return obs;
}

Observation WorldState::sense() const {
  Observation obs = sense_at(*scene_, pose_, sensor_);
  obs.steps_taken = steps_taken_;
  obs.collided = last_collided_;
  if (nav_point_) {
    Point d = *nav_point_ - pose_.position();
    double dist = d.norm();
    double offset = dist > 0.0 ? wrap180(rad2deg(std::atan2(d.y, d.x)) - pose_.heading) : 0.0;
    obs.relative_goal = RelativeGoal{dist, offset};
  }
  return obs;
}

Observation sense_at(const Scene& scene, const AgentPose& pose, const SensorConfig& sensor) {
  Observation obs;
  const Point origin = pose.position();
  auto blocked = [&](const Cell& c) { return blocked_in(scene, c); };
  obs.depth_scan.resize(static_cast<std::size_t>(std::max(sensor.depth_width, 0)));
  const int w = sensor.depth_width;
  for (int i = 0; i < w; ++i) {
    double offset = w == 1 ? 0.0 : -sensor.hfov_deg / 2.0 + sensor.hfov_deg * i / (w - 1);
    obs.depth_scan[static_cast<std::size_t>(i)] =
        cast_ray(scene.resolution, origin, pose.heading + offset, sensor.max_range, blocked);
  }
  for (const auto& o : scene.objects) {
    Point d = o.position - origin;
    double range = d.norm();
    if (range > sensor.max_range) continue;
    double bearing = range > 1e-12 ? wrap180(rad2deg(std::atan2(d.y, d.x)) - pose.heading) : 0.0;
    if (std::abs(bearing) > sensor.hfov_deg / 2.0) continue;
    if (!segment_clear(scene.resolution, origin, o.position, blocked)) continue;
    obs.sightings.push_back(Sighting{o.id, o.category, bearing, range});
  }
  return obs;
}

double distance_to_targets(const Scene& scene, const GoalSpec& goal, const Point& p) {
  double best = kInfinity;
  for (int id : goal.target_ids)
    if (const auto* o = scene.find_object(id)) best = std::min(best, distance(o->position, p));
  return best;
}

}  // namespace primnav::gridworld
