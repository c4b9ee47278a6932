#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "primnav/harness/harness.hpp"

namespace primnav::harness {

using nlohmann::json;

namespace {

const std::vector<std::string> kColumns = {
    "index",        "episode_id", "task",  "seed",   "success",          "agent_path_length", "optimal_length",
    "optimal_length_reached", "goals", "goals_reached", "progress", "dtg", "steps", "answer",
    "sigma",        "failure_category", "failure_rule", "harness_error", "trace"};

std::string real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quote(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      field.clear();
      row.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (in_quotes) throw FormatError("results csv: unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

double to_real(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw FormatError("results csv line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

long long to_int(const std::string& s, std::size_t line) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw FormatError("results csv line " + std::to_string(line) + ": bad integer '" + s + "'");
}

json real_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string results_csv(const std::vector<EpisodeResult>& results) {
  std::string out = join(kColumns, ",") + "\n";
  for (const auto& r : results) {
    int reached = 0;
    for (const auto& g : r.per_goal) reached += g.reached ? 1 : 0;
    std::vector<std::string> f = {std::to_string(r.index),
                                  quote(r.episode_id),
                                  gridworld::to_string(r.task),
                                  std::to_string(r.seed),
                                  r.success ? "1" : "0",
                                  real(r.agent_path_length),
                                  real(r.optimal_length),
                                  real(r.optimal_length_reached),
                                  std::to_string(r.per_goal.size()),
                                  std::to_string(reached),
                                  real(r.progress_fraction),
                                  real(r.dtg),
                                  std::to_string(r.steps),
                                  r.answer ? quote(*r.answer) : "",
                                  r.sigma ? std::to_string(*r.sigma) : "",
                                  r.failure ? to_string(*r.failure) : "",
                                  quote(r.failure_rule),
                                  r.harness_error ? "1" : "0",
                                  quote(r.trace_path)};
    out += join(f, ",") + "\n";
  }
  return out;
}

std::vector<EpisodeResult> parse_results_csv(std::string_view text) {
  const auto rows = parse_csv(text);
  if (rows.empty() || rows.front() != kColumns) throw FormatError("results csv: missing or unexpected header");
  std::vector<EpisodeResult> out;
  for (std::size_t li = 1; li < rows.size(); ++li) {
    const auto& f = rows[li];
    const std::size_t line = li + 1;
    if (f.size() != kColumns.size())
      throw FormatError("results csv line " + std::to_string(line) + ": expected " + std::to_string(kColumns.size()) +
                        " fields, got " + std::to_string(f.size()));
    EpisodeResult r;
    r.index = static_cast<std::size_t>(to_int(f[0], line));
    r.episode_id = f[1];
    r.task = gridworld::task_kind_from_string(f[2]);
    r.seed = std::stoull(f[3]);
    r.success = f[4] == "1";
    r.agent_path_length = to_real(f[5], line);
    r.optimal_length = to_real(f[6], line);
    r.optimal_length_reached = to_real(f[7], line);
    const auto goals = to_int(f[8], line);
    const auto reached = to_int(f[9], line);
    if (goals < 0 || reached < 0 || reached > goals)
      throw FormatError("results csv line " + std::to_string(line) + ": bad goal counts");
    r.per_goal.resize(static_cast<std::size_t>(goals));
    for (long long i = 0; i < reached; ++i) r.per_goal[static_cast<std::size_t>(i)].reached = true;
    r.progress_fraction = to_real(f[10], line);
    r.dtg = to_real(f[11], line);
    r.steps = static_cast<int>(to_int(f[12], line));
    if (!f[13].empty()) r.answer = f[13];
    if (!f[14].empty()) r.sigma = static_cast<int>(to_int(f[14], line));
    if (!f[15].empty()) r.failure = failure_category_from_string(f[15]);
    r.failure_rule = f[16];
    r.harness_error = f[17] == "1";
    r.trace_path = f[18];
    out.push_back(std::move(r));
  }
  return out;
}

json summary_json(const SuiteReport& report) {
  json j;
  j["seed"] = report.seed;
  j["config"] = report.config;
  j["episodes"] = report.results.size();
  j["tasks"] = json::array();
  for (const auto& a : report.per_task) {
    json t = {{"task", gridworld::to_string(a.task)},
              {"episodes", a.episodes},
              {"sr", a.sr},
              {"spl", a.spl},
              {"progress", a.progress},
              {"ppl", a.ppl},
              {"dtg", real_json(a.dtg)},
              {"dtg_excluded", a.dtg_excluded},
              {"score", a.score ? json(*a.score) : json(nullptr)},
              {"unscored", a.unscored},
              {"harness_errors", a.harness_errors}};
    json failures = json::object();
    for (int i = 0; i < kFailureCategoryCount; ++i) {
      const auto c = static_cast<FailureCategory>(i);
      const auto it = a.failures.find(c);
      failures[to_string(c)] = it == a.failures.end() ? 0 : it->second;
    }
    t["failures"] = failures;
    j["tasks"].push_back(t);
  }
  j["warnings"] = report.warnings;
  return j;
}

std::string aggregate_line(const TaskAggregate& a) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s: episodes=%d SR=%.2f SPL=%.2f Progress=%.2f PPL=%.2f DTG=%.2f",
                gridworld::to_string(a.task).c_str(), a.episodes, a.sr, a.spl, a.progress, a.ppl, a.dtg);
  std::string out = buf;
  if (a.score) {
    std::snprintf(buf, sizeof buf, " Score=%.2f", *a.score);
    out += buf;
  }
  if (a.harness_errors) out += " harness_errors=" + std::to_string(a.harness_errors);
  return out;
}

void write_report(const SuiteReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& body) {
    const auto tmp = dir / (name + ".tmp");
    {
      std::ofstream f(tmp, std::ios::binary);
      f << body;
      if (!f) throw std::runtime_error("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, dir / name);
  };
  write("results.csv", results_csv(report.results));
  write("summary.json", summary_json(report).dump(2) + "\n");
}

std::string episode_trace_jsonl(const EpisodeRun& run) {
  std::string out;
  for (const auto& g : run.trace.goals) {
    json h = {{"record", "goal"},
              {"goal_index", g.goal_index},
              {"kind", gridworld::to_string(g.goal.kind)},
              {"payload", g.goal.payload},
              {"program", g.program_text},
              {"planning_error", g.planning_error ? json(*g.planning_error) : json(nullptr)}};
    out += h.dump() + "\n";
    if (g.trace) out += interp::to_jsonl(*g.trace);
  }
  const auto& r = run.result;
  json e = {{"record", "episode"},
            {"episode_id", r.episode_id},
            {"task", gridworld::to_string(r.task)},
            {"seed", r.seed},
            {"success", r.success},
            {"steps", r.steps},
            {"agent_path_length", r.agent_path_length},
            {"optimal_length", real_json(r.optimal_length)},
            {"progress", r.progress_fraction},
            {"dtg", real_json(r.dtg)},
            {"answer", r.answer ? json(*r.answer) : json(nullptr)},
            {"sigma", r.sigma ? json(*r.sigma) : json(nullptr)},
            {"failure_category", r.failure ? json(to_string(*r.failure)) : json(nullptr)},
            {"failure_rule", r.failure_rule}};
  out += e.dump() + "\n";
  return out;
}

TraceFile parse_episode_trace(std::string_view text) {
  TraceFile file;
  std::string chunk;
  std::size_t chunk_start = 0, line_no = 0, start = 0;
  bool have_goal = false, have_episode = false;
  auto flush = [&]() {
    if (!have_goal) return;
    auto& g = file.goals.back();
    if (g.header.at("planning_error").is_null()) {
      try {
        g.trace = interp::trace_from_jsonl(chunk);
      } catch (const FormatError& e) {
        throw FormatError("episode trace, goal starting at line " + std::to_string(chunk_start) + ": " + e.what());
      }
    } else if (!chunk.empty()) {
      throw FormatError("episode trace line " + std::to_string(chunk_start) + ": records after a planning error");
    }
    chunk.clear();
  };
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = text.substr(start, nl - start);
    start = nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    if (have_episode) throw FormatError("episode trace line " + std::to_string(line_no) + ": data after episode record");
    json j;
    std::string kind;
    try {
      j = json::parse(line);
      kind = j.at("record").get<std::string>();
    } catch (const json::exception& e) {
      throw FormatError("episode trace line " + std::to_string(line_no) + ": " + e.what());
    }
    if (kind == "goal") {
      flush();
      if (!j.contains("planning_error")) throw FormatError("episode trace line " + std::to_string(line_no) + ": goal record lacks planning_error");
      file.goals.push_back({j, {}});
      have_goal = true;
      chunk_start = line_no;
    } else if (kind == "episode") {
      flush();
      file.episode = j;
      have_episode = true;
    } else if (kind == "statement" || kind == "terminal") {
      if (!have_goal) throw FormatError("episode trace line " + std::to_string(line_no) + ": record before any goal");
      chunk.append(line);
      chunk += '\n';
    } else {
      throw FormatError("episode trace line " + std::to_string(line_no) + ": unknown record '" + kind + "'");
    }
  }
  if (!have_episode) throw FormatError("episode trace has no episode record");
  return file;
}

}  // namespace primnav::harness
