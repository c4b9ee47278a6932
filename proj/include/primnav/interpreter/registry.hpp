#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "primnav/gridworld/scene.hpp"
#include "primnav/interpreter/agent.hpp"
#include "primnav/interpreter/program.hpp"
#include "primnav/interpreter/value.hpp"

namespace primnav::interp {

// The builtin `obs` is bound to this text; image arguments equal to it mean the
// current view, anything else is a goal image reference.
inline const std::string kCurrentView = "<current view>";

struct ArgSpec {
  std::string name;
  std::vector<ValueKind> kinds;
  bool required = true;
  std::string description;
};

struct ModuleSignature {
  std::string name;
  std::vector<ArgSpec> args;
  std::vector<ValueKind> outputs;  // empty: same kind as the input (return)
  std::string description;

  const ArgSpec* find_arg(std::string_view n) const;
};

// Failure raised by a handler; `kind` lands in the trace terminal.
struct ModuleError : std::runtime_error {
  ModuleError(std::string kind, const std::string& msg) : std::runtime_error(msg), kind(std::move(kind)) {}
  std::string kind;
};

using Args = std::map<std::string, Value, std::less<>>;

// What a handler can reach besides its arguments.
struct CallContext {
  Agent& agent;
  const gridworld::GoalSpec& goal;
  const std::map<std::string, Value, std::less<>>& env;
  std::optional<Value>& answer;
};

using Handler = std::function<Value(const Args&, CallContext&)>;

class Registry {
 public:
  struct Entry {
    ModuleSignature signature;
    Handler handler;
  };

  // Throws ValidationError when the name is taken.
  void register_module(ModuleSignature signature, Handler handler);
  const Entry* find(std::string_view name) const;
  std::size_t size() const { return entries_.size(); }
  // Registration order.
  std::vector<const ModuleSignature*> signatures() const;

 private:
  std::vector<Entry> entries_;
};

// detect, classify, answer, match, count, is_found, eval, navigate_to, explore_scene,
// return, turn.
Registry default_registry();

// Checks every call against the registry: module exists, argument names are known,
// required arguments are present, and literal or inferable argument kinds fit.
std::vector<ParseIssue> check_program(const Program& program, const Registry& registry);

}  // namespace primnav::interp
