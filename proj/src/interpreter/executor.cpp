#include "primnav/interpreter/executor.hpp"

#include <chrono>

namespace primnav::interp {

namespace {

Value literal(const ArgValue& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return Text{*s};
  if (const auto* d = std::get_if<double>(&v)) return *d;
  return std::get<bool>(v);
}

std::string kind_list(const std::vector<ValueKind>& kinds) {
  std::string s;
  for (auto k : kinds) s += (s.empty() ? "" : "|") + to_string(k);
  return s;
}

}  // namespace

Trace execute(const Program& program, const Registry& registry, Agent& agent, const gridworld::GoalSpec& goal,
              const ExecOptions& options) {
  Trace trace;
  std::map<std::string, Value, std::less<>> env;
  env["obs"] = Text{kCurrentView};
  env["goal"] = Text{goal.payload};
  CallContext ctx{agent, goal, env, trace.answer};

  for (const auto& st : program.statements) {
    TraceRecord rec;
    rec.line = st.line;
    rec.module = st.module_name;
    rec.output_var = st.output_var;
    const int steps_before = agent.world().steps_taken();
    const auto t0 = std::chrono::steady_clock::now();
    auto finish_record = [&] {
      rec.steps = agent.world().steps_taken() - steps_before;
      if (options.record_wall_time)
        rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      if (!options.snapshot_stem.empty() && rec.steps > 0)
        rec.map_snapshots =
            explorer::dump_maps(agent.explorer(), options.snapshot_stem + "_line" + std::to_string(st.line));
      trace.records.push_back(std::move(rec));
    };
    auto stop = [&](TerminalKind kind, std::string error_kind, std::string message) {
      rec.output = Text{"error: " + message};
      finish_record();
      trace.terminal = {kind, st.line, std::move(error_kind), std::move(message)};
    };

    try {
      const auto* entry = registry.find(st.module_name);
      if (!entry) throw ModuleError("unknown_module", "unknown module '" + st.module_name + "'");
      const auto& sig = entry->signature;
      Args args;
      for (const auto& a : st.args) {
        const auto* spec = sig.find_arg(a.name);
        if (!spec) throw ModuleError("bad_argument", st.module_name + " has no argument '" + a.name + "'");
        Value v;
        if (const auto* ref = std::get_if<VarRef>(&a.value)) {
          auto it = env.find(ref->name);
          if (it == env.end()) throw ModuleError("undefined_variable", "'" + ref->name + "' is not bound");
          v = it->second;
        } else {
          v = literal(a.value);
        }
        if (std::find(spec->kinds.begin(), spec->kinds.end(), v.kind()) == spec->kinds.end())
          throw ModuleError("type_mismatch", "argument '" + a.name + "' of " + st.module_name + " expects " +
                                                 kind_list(spec->kinds) + ", got " + to_string(v.kind()));
        rec.inputs.emplace_back(a.name, v);
        args.emplace(a.name, std::move(v));
      }
      for (const auto& spec : sig.args)
        if (spec.required && !args.count(spec.name))
          throw ModuleError("bad_argument", st.module_name + " is missing argument '" + spec.name + "'");

      Value out = entry->handler(args, ctx);
      rec.output = out;
      finish_record();
      if (!st.output_var.empty()) env[st.output_var] = std::move(out);
      const auto& bound = trace.records.back().output;
      if (bound.kind() == ValueKind::kNavOutcome && bound.nav().status == pointnav::NavStatus::kBudgetExhausted) {
        trace.terminal = {TerminalKind::kBudgetExhausted, st.line, "", st.module_name + " ran out of steps"};
        return trace;
      }
    } catch (const ModuleError& e) {
      if (e.kind == "budget_exhausted") stop(TerminalKind::kBudgetExhausted, "", e.what());
      else stop(TerminalKind::kRuntimeError, e.kind, e.what());
      return trace;
    } catch (const ValidationError& e) {
      stop(TerminalKind::kRuntimeError, "invalid_value", e.what());
      return trace;
    } catch (const std::exception& e) {
      stop(TerminalKind::kRuntimeError, "internal", e.what());
      return trace;
    }
  }
  trace.terminal = {TerminalKind::kCompleted, 0, "", ""};
  return trace;
}

}  // namespace primnav::interp
