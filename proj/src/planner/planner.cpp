#include "primnav/planner/planner.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "primnav/gridworld/generator.hpp"

namespace primnav::planner {

using gridworld::GoalKind;
using gridworld::GoalSpec;

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("PRIMNAV_DATA")) return env;
  return PRIMNAV_DATA_DIR;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<InContextExample> load_examples(const std::filesystem::path& path) {
  std::vector<InContextExample> out;
  try {
    const auto doc = nlohmann::json::parse(read_file(path));
    for (const auto& e : doc) {
      InContextExample ex;
      ex.instruction = e.at("instruction").get<std::string>();
      ex.program = e.at("program").get<std::string>();
      ex.scene = e.at("scene").get<std::string>();
      const auto& g = e.at("goal");
      ex.goal.kind = gridworld::goal_kind_from_string(g.at("kind").get<std::string>());
      ex.goal.payload = g.at("payload").get<std::string>();
      ex.goal.target_ids = g.at("target_ids").get<std::vector<int>>();
      if (g.contains("ground_truth_answer")) ex.goal.ground_truth_answer = g.at("ground_truth_answer").get<std::string>();
      out.push_back(std::move(ex));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return out;
}

const std::vector<InContextExample>& bundled_examples() {
  static const auto examples = load_examples(data_dir() / "planner" / "examples.json");
  return examples;
}

std::string task_text(const GoalSpec& goal) {
  switch (goal.kind) {
    case GoalKind::kCategory: return "Find the " + goal.payload + ".";
    case GoalKind::kDescription: return "Find " + goal.payload + ".";
    case GoalKind::kImage: return "Find the object shown in the goal image.";
    case GoalKind::kQuestion: {
      std::string q = goal.payload;
      if (!q.empty()) q[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(q[0])));
      if (q.empty() || q.back() != '?') q += "?";
      return q;
    }
  }
  return goal.payload;
}

std::string build_prompt(std::string_view task, const std::vector<InContextExample>& examples,
                         const interp::Registry& registry) {
  if (examples.empty()) throw ValidationError("build_prompt needs at least one in-context example");
  std::string p =
      "You control a robot exploring an indoor scene. Write a program that completes the task.\n"
      "Each line calls one module with keyword arguments and may store the result:\n"
      "  result = module(name=value, ...)\n"
      "Values are quoted strings, numbers, True/False, or variables assigned on earlier lines.\n"
      "`obs` is the robot's current view and `goal` is the goal given with the task.\n"
      "Comment your steps with lines starting with '#'. Output only the program.\n"
      "\nModules:\n";
  for (const auto* sig : registry.signatures()) {
    std::string args;
    for (const auto& a : sig->args) args += (args.empty() ? "" : ", ") + a.name + (a.required ? "" : "?");
    p += "  " + sig->name + "(" + args + "): " + sig->description + "\n";
  }
  p += "\nExamples:\n";
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& ex = examples[i];
    try {
      interp::parse_program(ex.program);
    } catch (const interp::ParseError& e) {
      throw ValidationError("example " + std::to_string(i + 1) + " does not parse: " + e.what());
    }
    p += "\nInstruction: " + ex.instruction + "\nProgram:\n" + ex.program;
    if (p.back() != '\n') p += '\n';
  }
  p += "\nInstruction: " + std::string(task) + "\nProgram:\n";
  return p;
}

std::string extract_program(std::string_view raw) {
  if (auto open = raw.find("```"); open != std::string_view::npos) {
    auto body = raw.find('\n', open);
    if (body != std::string_view::npos) {
      ++body;
      auto close = raw.find("```", body);
      if (close == std::string_view::npos) close = raw.size();
      return std::string(raw.substr(body, close - body));
    }
  }
  std::string run;
  bool has_statement = false;
  std::size_t start = 0;
  while (start <= raw.size()) {
    std::size_t nl = raw.find('\n', start);
    if (nl == std::string_view::npos) nl = raw.size();
    const auto line = raw.substr(start, nl - start);
    start = nl + 1;
    bool ok = false;
    try {
      auto parsed = interp::parse_line(line);
      if (std::holds_alternative<interp::Statement>(parsed)) {
        ok = true;
        has_statement = true;
      } else if (std::holds_alternative<interp::Comment>(parsed)) {
        ok = true;
      }
    } catch (const interp::ParseError&) {
    }
    if (ok) {
      run += std::string(line) + "\n";
    } else {
      if (has_statement) return run;
      run.clear();
    }
    if (nl == raw.size()) break;
  }
  return has_statement ? run : std::string();
}

namespace {

const std::set<std::string> kArticles = {"the", "a", "an"};
const std::set<std::string> kColors = {"white", "black", "brown", "gray",   "grey",  "blue", "red",
                                       "green", "beige", "yellow", "pink", "orange", "purple"};

std::vector<std::string> strip_articles(std::vector<std::string> t) {
  std::erase_if(t, [](const std::string& w) { return kArticles.count(w) > 0; });
  return t;
}

bool disjoint(const std::string& a, const std::set<std::string>& tokens) {
  for (const auto& t : tokenize(a))
    if (tokens.count(t)) return false;
  return true;
}

std::string quote(const std::string& s) { return interp::format_arg_value(s); }

std::string find_block(const std::string& target_expr, const std::string& query_expr) {
  return "nav = explore_scene(target=" + target_expr + ")\n" +
         "boxes = detect(image=obs, query=" + query_expr + ")\n";
}

}  // namespace

std::string stub_plan(const GoalSpec& goal, std::uint64_t seed, const StubOptions& options) {
  Rng rng(mix_seed(seed, fnv1a64(gridworld::to_string(goal.kind) + "|" + goal.payload)));
  const bool fault = options.fault_rate > 0.0 && rng.uniform() < options.fault_rate;

  // What the program will search for, and the question when there is one.
  std::string target;
  std::string subcategory;  // descriptions only
  enum class Ask { kNone, kAnswer, kCount } ask = Ask::kNone;
  const auto tokens = tokenize(goal.payload);

  switch (goal.kind) {
    case GoalKind::kCategory:
      target = join(tokens, " ");
      break;
    case GoalKind::kDescription: {
      auto t = strip_articles(tokens);
      std::erase_if(t, [](const std::string& w) { return kColors.count(w) > 0; });
      subcategory = join(t, " ");
      target = subcategory;
      break;
    }
    case GoalKind::kImage:
      break;
    case GoalKind::kQuestion: {
      auto starts = [&](std::initializer_list<const char*> p) {
        if (tokens.size() <= p.size()) return false;
        std::size_t i = 0;
        for (const char* w : p)
          if (tokens[i++] != w) return false;
        return true;
      };
      auto noun = [&](std::size_t from, std::size_t drop_back) {
        std::vector<std::string> r(tokens.begin() + static_cast<long>(from),
                                   tokens.end() - static_cast<long>(drop_back));
        return join(strip_articles(std::move(r)), " ");
      };
      if (starts({"what", "color", "is"}) || starts({"what", "colour", "is"})) {
        target = noun(3, 0);
        ask = Ask::kAnswer;
      } else if (starts({"where", "is"})) {
        target = noun(2, 0);
        ask = Ask::kAnswer;
      } else if (starts({"how", "many"})) {
        std::vector<std::string> r(tokens.begin() + 2, tokens.end());
        static const std::set<std::string> kTail = {"are", "is", "there", "visible", "here", "in", "view", "can", "you", "see"};
        while (!r.empty() && kTail.count(r.back())) r.pop_back();
        target = join(strip_articles(std::move(r)), " ");
        ask = Ask::kCount;
      } else if (tokens.size() >= 3 && tokens[0] == "is") {
        target = noun(1, 1);
        ask = Ask::kAnswer;
      }
      if (target.empty()) throw PlanningError("no rule matches the question '" + goal.payload + "'");
      break;
    }
  }
  if (goal.kind != GoalKind::kImage && target.empty())
    throw PlanningError("cannot find a target in '" + goal.payload + "'");

  if (fault) {
    std::vector<std::string> pool = options.fault_targets;
    if (pool.empty())
      for (const auto& k : gridworld::default_object_kinds())
        if (!k.unique_subcategory) pool.push_back(k.category);
    std::set<std::string> goal_tokens(tokens.begin(), tokens.end());
    std::erase_if(pool, [&](const std::string& c) { return !disjoint(c, goal_tokens) || tokenize(c).empty(); });
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    if (!pool.empty()) {
      target = pool[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(pool.size()) - 1))];
      subcategory = target;
    }
  }

  std::string p;
  switch (goal.kind) {
    case GoalKind::kCategory:
      p = "# look around until a " + target + " is in view\n" + find_block(quote(target), quote(target)) +
          "path = navigate_to(target=boxes)\nfound = is_found(target=path)\n";
      break;
    case GoalKind::kDescription:
      p = "# search for the " + subcategory + " itself\n" + find_block(quote(target), quote(target)) +
          "# keep only the described kind\n"
          "kept = classify(items=boxes, subcategories=" + quote(subcategory + ", other") +
          ", keep=" + quote(subcategory) + ")\n"
          "path = navigate_to(target=kept)\nfound = is_found(target=path)\n";
      break;
    case GoalKind::kImage: {
      const std::string t = (fault && !target.empty()) ? quote(target) : "label";
      p = "# first extract the semantic object in the image\n"
          "label = answer(image=goal, question='what object is this')\n" +
          find_block(t, t) +
          "# confirm it is the same instance\n"
          "score = match(image=obs, goal=goal)\n"
          "ok = eval(expr='score > 0.9')\n"
          "path = navigate_to(target=boxes)\n"
          "found = is_found(target=path, condition=ok)\n";
      break;
    }
    case GoalKind::kQuestion:
      p = "# find the " + target + " to answer from a close view\n" + find_block(quote(target), quote(target));
      if (ask == Ask::kCount) {
        p += "n = count(items=boxes)\nreturn(value=n)\n";
      } else {
        p += "path = navigate_to(target=boxes)\n"
             "ans = answer(image=obs, question=" + quote(goal.payload) + ")\n"
             "return(value=ans)\n";
      }
      break;
  }
  return p;
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path ResponseCache::path_for(std::string_view prompt, std::string_view model) const {
  return dir_ / (sha256_hex(std::string(model) + "\n" + std::string(prompt)) + ".json");
}

std::optional<std::string> ResponseCache::get(std::string_view prompt, std::string_view model) const {
  const auto path = path_for(prompt, model);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    const auto j = nlohmann::json::parse(ss.str());
    if (j.at("model").get<std::string>() != model) return std::nullopt;
    if (j.at("prompt_sha256").get<std::string>() != sha256_hex(prompt)) return std::nullopt;
    return j.at("response").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

void ResponseCache::put(std::string_view prompt, std::string_view model, std::string_view response) {
  const auto path = path_for(prompt, model);
  const nlohmann::json j = {{"model", model}, {"prompt_sha256", sha256_hex(prompt)}, {"response", response}};
  std::lock_guard lock(write_mu_);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write cache entry " + tmp.string());
    out << j.dump();
  }
  std::filesystem::rename(tmp, path);
}

std::string to_string(Backend b) { return b == Backend::kStub ? "stub" : "endpoint"; }

Backend backend_from_string(std::string_view s) {
  if (s == "stub") return Backend::kStub;
  if (s == "endpoint") return Backend::kEndpoint;
  throw ValidationError("unknown planner backend '" + std::string(s) + "' (expected stub or endpoint)");
}

EndpointConfig EndpointConfig::from_env() {
  EndpointConfig c;
  const char* url = std::getenv("PRIMNAV_LLM_URL");
  if (!url || !*url) throw ValidationError("PRIMNAV_LLM_URL is not set; the endpoint planner needs it");
  c.url = url;
  if (const char* key = std::getenv("PRIMNAV_LLM_KEY")) c.api_key = key;
  if (const char* model = std::getenv("PRIMNAV_LLM_MODEL"); model && *model) c.model = model;
  return c;
}

namespace {

interp::Program parse_checked(const std::string& text) {
  auto prog = interp::parse_program(text);
  static const auto registry = interp::default_registry();
  auto issues = interp::check_program(prog, registry);
  if (!issues.empty()) throw interp::ParseError(std::move(issues));
  if (prog.statements.empty()) throw interp::ParseError({{0, 0, "program has no statements"}});
  return prog;
}

}  // namespace

PlanResult generate_program(const GoalSpec& goal, std::uint64_t seed, const PlannerOptions& options) {
  PlanResult out;
  out.prompt = build_prompt(task_text(goal), bundled_examples());
  if (options.backend == Backend::kStub) {
    out.program_text = stub_plan(goal, seed, options.stub);
    out.attempts = 1;
    try {
      out.program = parse_checked(out.program_text);
    } catch (const interp::ParseError& e) {
      throw PlanningError(std::string("stub program rejected: ") + e.what());
    }
    return out;
  }

  if (!options.endpoint) throw ValidationError("endpoint planner selected without endpoint configuration");
  const auto& cfg = *options.endpoint;
  std::optional<ResponseCache> cache;
  if (options.cache_dir) cache.emplace(*options.cache_dir);
  std::string prompt = out.prompt;
  std::string last_error;
  for (int attempt = 1; attempt <= 2; ++attempt) {
    out.attempts = attempt;
    std::string raw;
    if (auto hit = cache ? cache->get(prompt, cfg.model) : std::nullopt) {
      raw = *hit;
      out.cache_hit = true;
    } else {
      raw = call_endpoint(cfg, {prompt, options.temperature, cfg.model}).raw;
      if (cache) cache->put(prompt, cfg.model, raw);
    }
    out.program_text = extract_program(raw);
    try {
      out.program = parse_checked(out.program_text);
      return out;
    } catch (const interp::ParseError& e) {
      last_error = e.what();
    }
    prompt = out.prompt + "Output only the program, one statement per line, with no other text.\n";
  }
  throw PlanningError("planner reply did not parse after a retry: " + last_error);
}

}  // namespace primnav::planner
