#pragma once

#include <string>

#include "primnav/interpreter/registry.hpp"
#include "primnav/interpreter/trace.hpp"

namespace primnav::interp {

struct ExecOptions {
  bool record_wall_time = false;
  // When set, the maps are dumped after every statement that moved the agent, as
  // <stem>_line<L>_*.pgm, and the paths are listed in the record.
  std::string snapshot_stem;
};

// Runs the statements in order against the agent. Never throws for program faults:
// unknown modules, bad arguments, type mismatches and handler failures end the run
// with a runtime_error terminal; a primitive that runs out of steps ends it with
// budget_exhausted.
Trace execute(const Program& program, const Registry& registry, Agent& agent, const gridworld::GoalSpec& goal,
              const ExecOptions& options = {});

}  // namespace primnav::interp
