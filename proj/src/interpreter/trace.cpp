#include "primnav/interpreter/trace.hpp"

namespace primnav::interp {

using nlohmann::json;

namespace {
constexpr const char* kTerminalNames[] = {"completed", "runtime_error", "budget_exhausted"};
}

std::string to_string(TerminalKind k) { return kTerminalNames[static_cast<int>(k)]; }

TerminalKind terminal_kind_from_string(std::string_view s) {
  for (int i = 0; i < 3; ++i)
    if (s == kTerminalNames[i]) return static_cast<TerminalKind>(i);
  throw FormatError("unknown terminal kind '" + std::string(s) + "'");
}

int Trace::total_steps() const {
  int n = 0;
  for (const auto& r : records) n += r.steps;
  return n;
}

json to_json(const TraceRecord& r) {
  json inputs = json::array();
  for (const auto& [name, v] : r.inputs) inputs.push_back({name, to_json(v)});
  return {{"record", "statement"}, {"line", r.line},   {"module", r.module},   {"output_var", r.output_var},
          {"inputs", inputs},      {"output", to_json(r.output)}, {"steps", r.steps}, {"wall_ms", r.wall_ms},
          {"maps", r.map_snapshots}};
}

json to_json(const Terminal& t, const std::optional<Value>& answer) {
  return {{"record", "terminal"},         {"kind", to_string(t.kind)}, {"line", t.line},
          {"error_kind", t.error_kind},   {"message", t.message},
          {"answer", answer ? to_json(*answer) : json(nullptr)}};
}

std::string to_jsonl(const Trace& trace) {
  std::string out;
  for (const auto& r : trace.records) out += to_json(r).dump() + "\n";
  out += to_json(trace.terminal, trace.answer).dump() + "\n";
  return out;
}

TraceRecord record_from_json(const json& j) {
  TraceRecord r;
  r.line = j.at("line").get<int>();
  r.module = j.at("module").get<std::string>();
  r.output_var = j.at("output_var").get<std::string>();
  for (const auto& in : j.at("inputs")) r.inputs.emplace_back(in.at(0).get<std::string>(), value_from_json(in.at(1)));
  r.output = value_from_json(j.at("output"));
  r.steps = j.at("steps").get<int>();
  r.wall_ms = j.at("wall_ms").get<double>();
  r.map_snapshots = j.at("maps").get<std::vector<std::string>>();
  return r;
}

Trace trace_from_jsonl(std::string_view text) {
  Trace trace;
  bool have_terminal = false;
  int line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = text.substr(start, nl - start);
    start = nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const json j = json::parse(line);
      const auto kind = j.at("record").get<std::string>();
      if (kind == "statement") {
        trace.records.push_back(record_from_json(j));
      } else if (kind == "terminal") {
        trace.terminal.kind = terminal_kind_from_string(j.at("kind").get<std::string>());
        trace.terminal.line = j.at("line").get<int>();
        trace.terminal.error_kind = j.at("error_kind").get<std::string>();
        trace.terminal.message = j.at("message").get<std::string>();
        if (!j.at("answer").is_null()) trace.answer = value_from_json(j.at("answer"));
        have_terminal = true;
      }
    } catch (const json::exception& e) {
      throw FormatError("trace line " + std::to_string(line_no) + ": " + e.what());
    } catch (const FormatError& e) {
      throw FormatError("trace line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_terminal) throw FormatError("trace has no terminal record (" + std::to_string(line_no) + " lines read)");
  return trace;
}

}  // namespace primnav::interp
