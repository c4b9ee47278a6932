#include "primnav/interpreter/agent.hpp"

#include <algorithm>

#include "primnav/gridworld/raycast.hpp"

namespace primnav::interp {

using gridworld::Action;
using pointnav::NavOutcome;
using pointnav::NavStatus;

namespace {

explorer::MapGeometry geometry_of(const gridworld::Scene& scene) {
  return {scene.grid.rows(), scene.grid.cols(), scene.resolution, {0.0, 0.0}};
}

bool is_target(const gridworld::WorldState& world, int object_id) {
  if (world.terminated()) return false;
  const auto& ids = world.current_goal().target_ids;
  return std::find(ids.begin(), ids.end(), object_id) != ids.end();
}

}  // namespace

Agent::Agent(gridworld::WorldState& world, const perception::Embedder& embedder, AgentOptions options)
    : world_(&world),
      embedder_(&embedder),
      options_(std::move(options)),
      explorer_(geometry_of(world.scene()), embedder, options_.explorer),
      remaining_(world.episode().step_budget_per_goal) {
  options_.noise.validate();
  observe(world.sense());
}

void Agent::observe(const gridworld::Observation& obs) {
  obs_ = obs;
  const auto& scene = world_->scene();
  const auto emb = embedder_->embed_text(perception::observation_text(scene, obs));
  explorer_.integrate(world_->pose(), obs, emb, world_->sensor());
  for (const auto& s : obs.sightings)
    if (is_target(*world_, s.object_id)) evidence_.sighted_targets.insert(s.object_id);
}

void Agent::begin_goal() {
  goal_closed_ = false;
  explorer_.begin_goal();
}

bool Agent::act(Action action) {
  while (explorer_.spin_remaining() > 0) {
    explorer_.take_spin_action();
    if (!step_once(Action::kMoveLeft)) return false;
  }
  return step_once(action);
}

bool Agent::step_once(Action action) {
  if (goal_closed_ || out_of_steps()) return false;
  const auto& pose = world_->pose();
  const Point dest = pose.position() + gridworld::heading_vector(pose.heading) * world_->agent_config().forward_step;
  const auto obs = world_->step(action);
  --remaining_;
  evidence_.actions.push_back(action);
  if (obs.collided) {
    auto& map = explorer_.obstacle_map();
    const auto& g = map.geometry();
    const Cell dc = g.cell_of(dest);
    if (g.in_bounds(dc) && dc != g.cell_of(world_->pose().position())) map.mark_occupied(dc);
  }
  if (!world_->terminated()) observe(obs);
  else obs_ = obs;
  return true;
}

std::vector<perception::Detection> Agent::detect(const std::vector<std::string>& queries, bool log_query) {
  if (log_query) evidence_.queries.insert(evidence_.queries.end(), queries.begin(), queries.end());
  auto dets = perception::detect(world_->scene(), obs_, queries, options_.noise);
  const auto& pose = world_->pose();
  if (world_->goal_index() != detections_goal_) {
    goal_detections_.clear();
    detections_goal_ = world_->goal_index();
  }
  for (auto& d : dets) {
    d.position = pose.position() + gridworld::heading_vector(pose.heading + d.bearing) * d.range;
    if (is_target(*world_, d.object_id)) evidence_.detected_targets.insert(d.object_id);
    goal_detections_.push_back(d);
  }
  return dets;
}

NavOutcome Agent::outcome(NavStatus status, int start_steps, double remaining) const {
  NavOutcome out;
  out.status = status;
  out.steps_used = world_->steps_taken() - start_steps;
  out.final_distance = remaining;
  return out;
}

NavOutcome Agent::explore(const std::string& target) {
  const int start = world_->steps_taken();
  evidence_.queries.push_back(target);
  explorer_.set_target(target);
  pointnav::Navigator nav(options_.nav);
  int idle = 0;
  for (;;) {
    if (goal_closed_) return outcome(NavStatus::kBlocked, start, kInfinity);
    if (out_of_steps()) return outcome(NavStatus::kBudgetExhausted, start, kInfinity);
    const auto dets = detect({target}, false);
    const auto d = explorer_.explore_step(world_->pose(), dets);
    switch (d.kind) {
      case explorer::DirectiveKind::kRotate:
        step_once(Action::kMoveLeft);
        idle = 0;
        break;
      case explorer::DirectiveKind::kTargetFound:
        return outcome(NavStatus::kReached, start, distance(world_->pose().position(), d.point));
      case explorer::DirectiveKind::kExhausted:
        return outcome(NavStatus::kBlocked, start, kInfinity);
      case explorer::DirectiveKind::kGoto: {
        const auto dec = nav.decide(explorer_.obstacle_map(), world_->pose(), d.point, world_->last_collided(),
                                    world_->agent_config());
        if (dec.blocked) {
          explorer_.report_unreachable();
          nav.reset();
          ++idle;
        } else if (dec.action == Action::kStop) {
          explorer_.report_arrived();
          nav.reset();
          ++idle;
        } else {
          act(dec.action);
          idle = 0;
        }
        break;
      }
    }
    if (idle > options_.max_idle_decisions) return outcome(NavStatus::kBlocked, start, kInfinity);
  }
}

NavOutcome Agent::navigate(Point goal) {
  const int start = world_->steps_taken();
  pointnav::Navigator nav(options_.nav);
  for (;;) {
    const double left = distance(world_->pose().position(), goal);
    if (goal_closed_) return outcome(NavStatus::kBlocked, start, left);
    if (out_of_steps()) return outcome(NavStatus::kBudgetExhausted, start, left);
    const auto dec =
        nav.decide(explorer_.obstacle_map(), world_->pose(), goal, world_->last_collided(), world_->agent_config());
    if (dec.blocked) return outcome(NavStatus::kBlocked, start, left);
    if (dec.action == Action::kStop) return outcome(NavStatus::kReached, start, left);
    act(dec.action);
  }
}

NavOutcome Agent::turn(int degrees) {
  const int start = world_->steps_taken();
  const double quantum = world_->agent_config().turn_deg;
  const double n = std::abs(degrees) / quantum;
  if (std::abs(n - std::round(n)) > 1e-9)
    throw ValidationError("turn angle " + std::to_string(degrees) + " is not a multiple of " +
                          std::to_string(static_cast<int>(quantum)));
  for (int i = 0; i < static_cast<int>(std::lround(n)); ++i)
    if (goal_closed_) return outcome(NavStatus::kBlocked, start, 0.0);
    else if (!act(degrees > 0 ? Action::kMoveRight : Action::kMoveLeft))
      return outcome(NavStatus::kBudgetExhausted, start, 0.0);
  return outcome(NavStatus::kReached, start, 0.0);
}

bool Agent::declare_found() {
  if (goal_closed_) return false;
  FoundEvent ev;
  ev.goal_index = world_->goal_index();
  ev.position = world_->pose().position();
  const double radius = world_->episode().success_radius;
  if (world_->goal_index() == detections_goal_)
    for (const auto& d : goal_detections_) {
      const auto* obj = world_->scene().find_object(d.object_id);
      const Point p = obj ? obj->position : d.position;
      if (distance(p, ev.position) <= radius &&
          std::find(ev.nearby_detected.begin(), ev.nearby_detected.end(), d.object_id) == ev.nearby_detected.end())
        ev.nearby_detected.push_back(d.object_id);
    }
  std::sort(ev.nearby_detected.begin(), ev.nearby_detected.end());
  if (!act(Action::kStop)) return false;
  goal_closed_ = true;
  ev.step = world_->steps_taken();
  ev.reached = world_->goal_records()[ev.goal_index].reached;
  evidence_.found_events.push_back(ev);
  return ev.reached;
}

}  // namespace primnav::interp
