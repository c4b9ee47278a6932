#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "primnav/interpreter/value.hpp"

namespace primnav::interp {

struct TraceRecord {
  int line = 0;
  std::string module;
  std::string output_var;
  std::vector<std::pair<std::string, Value>> inputs;  // in argument order, resolved
  Value output;
  int steps = 0;
  double wall_ms = 0.0;  // 0 unless wall time recording is on
  std::vector<std::string> map_snapshots;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

enum class TerminalKind { kCompleted, kRuntimeError, kBudgetExhausted };

std::string to_string(TerminalKind k);
TerminalKind terminal_kind_from_string(std::string_view s);

struct Terminal {
  TerminalKind kind = TerminalKind::kCompleted;
  int line = 0;                // statement line for runtime errors and budget exhaustion
  std::string error_kind;      // e.g. unknown_module, type_mismatch, bad_argument
  std::string message;
  friend bool operator==(const Terminal&, const Terminal&) = default;
};

struct Trace {
  std::vector<TraceRecord> records;
  Terminal terminal;
  std::optional<Value> answer;  // bound by return(...)
  int total_steps() const;
  friend bool operator==(const Trace&, const Trace&) = default;
};

// Line-delimited JSON. Each statement is one object:
//   {"record":"statement","line":L,"module":M,"output_var":V,"inputs":[[name,value]...],
//    "output":value,"steps":N,"wall_ms":T,"maps":[paths]}
// followed by one terminal object:
//   {"record":"terminal","kind":K,"line":L,"error_kind":E,"message":S,"answer":value|null}
// Values are {"type":T,"value":...} as produced by to_json(Value).
nlohmann::json to_json(const TraceRecord& r);
nlohmann::json to_json(const Terminal& t, const std::optional<Value>& answer);
std::string to_jsonl(const Trace& trace);

// Parses one trace (statements then a terminal). Other record kinds are ignored.
// Throws FormatError naming the 1-based line of a malformed record.
Trace trace_from_jsonl(std::string_view text);
TraceRecord record_from_json(const nlohmann::json& j);

}  // namespace primnav::interp
