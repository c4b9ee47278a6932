#include <algorithm>

#include "primnav/interpreter/eval.hpp"
#include "primnav/interpreter/registry.hpp"

namespace primnav::interp {

namespace {

using K = ValueKind;

const std::vector<ValueKind> kAnyKind = {K::kText,       K::kNumber,    K::kBoolean, K::kPoint,
                                         K::kDetections, K::kEmbedding, K::kAnswer,  K::kNavOutcome};

const std::string& current_view(const Args& args, std::string_view module) {
  const auto& image = args.at("image").text();
  if (image != kCurrentView)
    throw ModuleError("bad_argument", std::string(module) + " needs image=obs, got '" + image + "'");
  return image;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t comma = s.find(',', start);
    std::string part = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    const auto b = part.find_first_not_of(" \t");
    const auto e = part.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(part.substr(b, e - b + 1));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

Value detect_module(const Args& args, CallContext& ctx) {
  current_view(args, "detect");
  const auto& query = args.at("query").text();
  if (tokenize(query).empty()) throw ModuleError("bad_argument", "detect query is empty");
  return Detections(ctx.agent.detect({query}));
}

Value classify_module(const Args& args, CallContext& ctx) {
  const auto& items = args.at("items").detections();
  auto subs = split_list(args.at("subcategories").text());
  if (subs.empty()) throw ModuleError("bad_argument", "classify needs at least one subcategory");
  std::optional<std::string> keep;
  if (auto it = args.find("keep"); it != args.end()) keep = to_lower(it->second.text());
  Detections out;
  for (auto d : items) {
    const std::string sub = perception::classify(ctx.agent.world().scene(), d, subs);
    if (keep) {
      if (to_lower(sub) == *keep) out.push_back(std::move(d));
    } else {
      d.label = sub;
      out.push_back(std::move(d));
    }
  }
  return out;
}

Value answer_module(const Args& args, CallContext& ctx) {
  const auto& image = args.at("image").text();
  const auto& question = args.at("question").text();
  const auto& scene = ctx.agent.world().scene();
  if (image == kCurrentView) return Answer{perception::answer(scene, ctx.agent.observation(), question)};
  return Answer{perception::answer_image(scene, image, question)};
}

Value match_module(const Args& args, CallContext& ctx) {
  current_view(args, "match");
  return perception::match(ctx.agent.world().scene(), ctx.agent.observation(), args.at("goal").text(),
                           ctx.agent.embedder());
}

Value count_module(const Args& args, CallContext&) {
  return static_cast<double>(args.at("items").detections().size());
}

Value is_found_module(const Args& args, CallContext& ctx) {
  bool found = args.at("target").truthy();
  if (auto it = args.find("condition"); it != args.end()) found = found && it->second.truthy();
  if (!found) return false;
  if (ctx.agent.goal_closed()) return true;
  if (ctx.agent.out_of_steps()) throw ModuleError("budget_exhausted", "no step left to declare the target found");
  ctx.agent.declare_found();
  return true;
}

Value eval_module(const Args& args, CallContext& ctx) {
  try {
    return evaluate_expression(args.at("expr").text(), [&](std::string_view name) -> std::optional<Value> {
      auto it = ctx.env.find(name);
      if (it == ctx.env.end()) return std::nullopt;
      return it->second;
    });
  } catch (const EvalError& e) {
    throw ModuleError("eval_error", e.what());
  }
}

Value navigate_module(const Args& args, CallContext& ctx) {
  const auto& target = args.at("target");
  if (target.kind() == K::kPoint) return ctx.agent.navigate(target.point());
  const auto& dets = target.detections();
  if (dets.empty()) return pointnav::NavOutcome{pointnav::NavStatus::kBlocked, 0, kInfinity};
  const auto nearest = std::min_element(dets.begin(), dets.end(), [](const auto& a, const auto& b) {
    return a.range < b.range || (a.range == b.range && a.object_id < b.object_id);
  });
  return ctx.agent.navigate(nearest->position);
}

Value explore_module(const Args& args, CallContext& ctx) {
  const auto& target = args.at("target").text();
  if (tokenize(target).empty()) throw ModuleError("bad_argument", "explore_scene target is empty");
  return ctx.agent.explore(target);
}

Value return_module(const Args& args, CallContext& ctx) {
  ctx.answer = args.at("value");
  return args.at("value");
}

Value turn_module(const Args& args, CallContext& ctx) {
  const double angle = args.at("angle").number();
  if (angle != std::round(angle)) throw ModuleError("bad_argument", "turn angle must be whole degrees");
  try {
    return ctx.agent.turn(static_cast<int>(angle));
  } catch (const ValidationError& e) {
    throw ModuleError("bad_argument", e.what());
  }
}

}  // namespace

const ArgSpec* ModuleSignature::find_arg(std::string_view n) const {
  for (const auto& a : args)
    if (a.name == n) return &a;
  return nullptr;
}

void Registry::register_module(ModuleSignature signature, Handler handler) {
  if (find(signature.name)) throw ValidationError("module '" + signature.name + "' is already registered");
  if (!handler) throw ValidationError("module '" + signature.name + "' has no handler");
  entries_.push_back({std::move(signature), std::move(handler)});
}

const Registry::Entry* Registry::find(std::string_view name) const {
  for (const auto& e : entries_)
    if (e.signature.name == name) return &e;
  return nullptr;
}

std::vector<const ModuleSignature*> Registry::signatures() const {
  std::vector<const ModuleSignature*> out;
  for (const auto& e : entries_) out.push_back(&e.signature);
  return out;
}

Registry default_registry() {
  Registry r;
  const std::vector<K> text = {K::kText, K::kAnswer};
  r.register_module({"detect",
                     {{"image", {K::kText}, true, "obs"}, {"query", text, true, "object category to look for"}},
                     {K::kDetections},
                     "detect objects matching the query in the current view"},
                    detect_module);
  r.register_module({"classify",
                     {{"items", {K::kDetections}, true, "detections"},
                      {"subcategories", text, true, "comma-separated subcategory names"},
                      {"keep", text, false, "only keep detections of this subcategory"}},
                     {K::kDetections},
                     "assign each detection one of the subcategories, or 'other'"},
                    classify_module);
  r.register_module({"answer",
                     {{"image", {K::kText}, true, "obs or goal"}, {"question", text, true, "question text"}},
                     {K::kAnswer},
                     "answer a question about the current view or the goal image"},
                    answer_module);
  r.register_module({"match",
                     {{"image", {K::kText}, true, "obs"}, {"goal", {K::kText}, true, "goal image"}},
                     {K::kNumber},
                     "similarity in [0, 1] between the current view and the goal image"},
                    match_module);
  r.register_module({"count", {{"items", {K::kDetections}, true, "detections"}}, {K::kNumber},
                     "number of detections"},
                    count_module);
  r.register_module({"is_found",
                     {{"target", {K::kDetections, K::kNavOutcome, K::kBoolean}, true, "evidence of the target"},
                      {"condition", {K::kBoolean}, false, "extra condition that must also hold"}},
                     {K::kBoolean},
                     "declare the target found (stop) when the evidence holds"},
                    is_found_module);
  r.register_module({"eval", {{"expr", {K::kText}, true, "expression over bound variables"}},
                     {K::kNumber, K::kBoolean, K::kText},
                     "evaluate a comparison/boolean/arithmetic expression"},
                    eval_module);
  r.register_module({"navigate_to",
                     {{"target", {K::kDetections, K::kPoint}, true, "detections or a point"}},
                     {K::kNavOutcome},
                     "walk to the nearest detection or the point"},
                    navigate_module);
  r.register_module({"explore_scene", {{"target", text, true, "what to look for"}}, {K::kNavOutcome},
                     "explore until the target is in view"},
                    explore_module);
  r.register_module({"return", {{"value", kAnyKind, true, "final answer"}}, {},
                     "set the program's answer"},
                    return_module);
  r.register_module({"turn", {{"angle", {K::kNumber}, true, "degrees, positive turns right"}}, {K::kNavOutcome},
                     "rotate in place by a multiple of 30 degrees"},
                    turn_module);
  return r;
}

std::vector<ParseIssue> check_program(const Program& program, const Registry& registry) {
  std::vector<ParseIssue> issues;
  // Kinds a variable may hold; empty means unknown.
  std::map<std::string, std::vector<K>> kinds;
  for (const auto& b : kBuiltinNames) kinds[b] = {K::kText};
  auto fits = [](const std::vector<K>& have, const std::vector<K>& want) {
    if (have.empty()) return true;
    return std::any_of(have.begin(), have.end(),
                       [&](K k) { return std::find(want.begin(), want.end(), k) != want.end(); });
  };
  for (const auto& st : program.statements) {
    const auto* entry = registry.find(st.module_name);
    if (!entry) {
      issues.push_back({st.line, 0, "unknown module '" + st.module_name + "'"});
      if (!st.output_var.empty()) kinds[st.output_var] = {};
      continue;
    }
    const auto& sig = entry->signature;
    std::vector<K> passthrough;
    for (const auto& a : st.args) {
      const auto* spec = sig.find_arg(a.name);
      if (!spec) {
        issues.push_back({st.line, 0, st.module_name + " has no argument '" + a.name + "'"});
        continue;
      }
      std::vector<K> have;
      if (std::holds_alternative<std::string>(a.value)) have = {K::kText};
      else if (std::holds_alternative<double>(a.value)) have = {K::kNumber};
      else if (std::holds_alternative<bool>(a.value)) have = {K::kBoolean};
      else if (auto it = kinds.find(std::get<VarRef>(a.value).name); it != kinds.end()) have = it->second;
      if (!fits(have, spec->kinds))
        issues.push_back({st.line, 0, "argument '" + a.name + "' of " + st.module_name + " has the wrong type"});
      passthrough = have;
    }
    for (const auto& spec : sig.args)
      if (spec.required && !st.find_arg(spec.name))
        issues.push_back({st.line, 0, st.module_name + " is missing argument '" + spec.name + "'"});
    if (!st.output_var.empty()) kinds[st.output_var] = sig.outputs.empty() ? passthrough : sig.outputs;
  }
  return issues;
}

}  // namespace primnav::interp
