#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <gtest/gtest.h>

#include <fstream>
#include <thread>

#include "fixtures.hpp"
#include "primnav/gridworld/generator.hpp"
#include "primnav/interpreter/executor.hpp"
#include "primnav/planner/planner.hpp"

namespace primnav::planner {
namespace {

using gridworld::GoalKind;
using gridworld::GoalSpec;

GoalSpec goal(GoalKind kind, std::string payload) { return {kind, std::move(payload), {1}, std::nullopt}; }

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("primnav_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

TEST(Examples, FifteenBundled) {
  const auto& ex = bundled_examples();
  ASSERT_EQ(ex.size(), 15u);
  const auto reg = interp::default_registry();
  for (const auto& e : ex) {
    const auto prog = interp::parse_program(e.program);
    EXPECT_TRUE(interp::check_program(prog, reg).empty()) << e.instruction;
  }
}

TEST(BuildPrompt, ContainsAllPairsInOrder) {
  const auto& ex = bundled_examples();
  const auto prompt = build_prompt("find the chair", ex);
  std::size_t at = 0;
  for (const auto& e : ex) {
    const auto pair = "Instruction: " + e.instruction + "\nProgram:\n" + e.program;
    const auto pos = prompt.find(pair, at);
    ASSERT_NE(pos, std::string::npos) << e.instruction;
    at = pos + pair.size();
  }
  const std::string tail = "\nInstruction: find the chair\nProgram:\n";
  EXPECT_EQ(prompt.substr(prompt.size() - tail.size()), tail);
  for (const char* m : {"detect(", "classify(", "answer(", "match(", "count(", "is_found(", "eval(", "navigate_to(",
                        "explore_scene(", "return(", "turn("})
    EXPECT_NE(prompt.find(m), std::string::npos) << m;
}

TEST(BuildPrompt, ByteStableAndPinned) {
  const auto a = build_prompt("find the chair", bundled_examples());
  const auto b = build_prompt("find the chair", bundled_examples());
  EXPECT_EQ(a, b);
  EXPECT_EQ(sha256_hex(a), "efb88e7b37612c2b048933620736653793bec18af7f87b137acaa6f789c4004b");
}

TEST(BuildPrompt, Errors) {
  EXPECT_THROW(build_prompt("find the chair", {}), ValidationError);
  std::vector<InContextExample> bad = {{"x", "a = (", {}, ""}};
  EXPECT_THROW(build_prompt("find the chair", bad), ValidationError);
}

TEST(Sha256, KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(StubPlan, CategoryGoal) {
  const auto text = stub_plan(goal(GoalKind::kCategory, "gas boiler"), 1);
  const auto prog = interp::parse_program(text);
  ASSERT_EQ(prog.statements.size(), 4u);
  EXPECT_EQ(prog.statements[0].module_name, "explore_scene");
  EXPECT_EQ(prog.statements[1].module_name, "detect");
  EXPECT_EQ(prog.statements[1].find_arg("query")->value, interp::ArgValue(std::string("gas boiler")));
  EXPECT_EQ(prog.statements[2].module_name, "navigate_to");
  EXPECT_EQ(prog.statements[3].module_name, "is_found");
}

TEST(StubPlan, QuestionEndsWithAnswerThenReturn) {
  const auto prog = interp::parse_program(stub_plan(goal(GoalKind::kQuestion, "what color is the bed"), 1));
  const auto& s = prog.statements;
  ASSERT_GE(s.size(), 2u);
  EXPECT_EQ(s[s.size() - 2].module_name, "answer");
  EXPECT_EQ(s[s.size() - 2].output_var, "ans");
  EXPECT_EQ(s.back().module_name, "return");
  EXPECT_EQ(s.back().find_arg("value")->value, interp::ArgValue(interp::VarRef{"ans"}));
  EXPECT_EQ(s[0].find_arg("target")->value, interp::ArgValue(std::string("bed")));
}

TEST(StubPlan, ImageGoalStartsWithLabel) {
  const auto prog = interp::parse_program(stub_plan(goal(GoalKind::kImage, "apartment_small/img_12"), 1));
  EXPECT_EQ(interp::format_statement(prog.statements[0]), "label = answer(image=goal, question='what object is this')");
  EXPECT_NE(std::find_if(prog.statements.begin(), prog.statements.end(),
                         [](const auto& s) { return s.module_name == "match"; }),
            prog.statements.end());
}

TEST(StubPlan, DescriptionUsesClassify) {
  const auto prog = interp::parse_program(stub_plan(goal(GoalKind::kDescription, "the black office chair"), 1));
  const auto it = std::find_if(prog.statements.begin(), prog.statements.end(),
                               [](const auto& s) { return s.module_name == "classify"; });
  ASSERT_NE(it, prog.statements.end());
  EXPECT_EQ(it->find_arg("keep")->value, interp::ArgValue(std::string("office chair")));
}

TEST(StubPlan, QuestionPatterns) {
  EXPECT_NO_THROW(stub_plan(goal(GoalKind::kQuestion, "is the tv on"), 0));
  EXPECT_NO_THROW(stub_plan(goal(GoalKind::kQuestion, "where is the refrigerator"), 0));
  const auto count = interp::parse_program(stub_plan(goal(GoalKind::kQuestion, "how many chairs are there"), 0));
  EXPECT_EQ(count.statements[0].find_arg("target")->value, interp::ArgValue(std::string("chairs")));
  EXPECT_THROW(stub_plan(goal(GoalKind::kQuestion, "why is the sky blue"), 0), PlanningError);
  EXPECT_THROW(stub_plan(goal(GoalKind::kCategory, "  "), 0), PlanningError);
}

TEST(StubPlan, FaultModeTargetsAnotherCategory) {
  StubOptions opts;
  opts.fault_rate = 1.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto prog = interp::parse_program(stub_plan(goal(GoalKind::kCategory, "bed"), seed, opts));
    const auto q = std::get<std::string>(prog.statements[1].find_arg("query")->value);
    EXPECT_NE(q, "bed");
    for (const auto& t : tokenize(q)) EXPECT_NE(t, "bed");
  }
  opts.fault_rate = 0.0;
  const auto clean = interp::parse_program(stub_plan(goal(GoalKind::kCategory, "bed"), 3, opts));
  EXPECT_EQ(clean.statements[1].find_arg("query")->value, interp::ArgValue(std::string("bed")));
}

TEST(StubPlan, FaultRateIsSeededBernoulli) {
  StubOptions opts;
  opts.fault_rate = 0.3;
  int faults = 0;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    const auto text = stub_plan(goal(GoalKind::kCategory, "bed"), seed, opts);
    EXPECT_EQ(text, stub_plan(goal(GoalKind::kCategory, "bed"), seed, opts));
    if (text.find("'bed'") == std::string::npos) ++faults;
  }
  EXPECT_NEAR(faults / 2000.0, 0.3, 0.04);
}

TEST(StubPlan, EveryGeneratedGoalPlansCleanly) {
  const auto reg = interp::default_registry();
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    gridworld::GeneratorConfig gc;
    gc.required = {{"cylinder", 5}};
    const auto scene = gridworld::generate_scene(gc, seed);
    for (auto task : {gridworld::TaskKind::kOvon, gridworld::TaskKind::kGoat, gridworld::TaskKind::kMultion,
                      gridworld::TaskKind::kEqa}) {
      gridworld::EpisodeGenConfig ec;
      ec.task = task;
      ec.count = 10;
      for (const auto& e : gridworld::generate_episodes(scene, ec, seed))
        for (const auto& g : e.goals) {
          const auto text = stub_plan(g, seed);
          const auto prog = interp::parse_program(text);
          EXPECT_TRUE(interp::check_program(prog, reg).empty()) << text;
        }
    }
  }
}

TEST(ExtractProgram, FencedAndContiguous) {
  EXPECT_EQ(extract_program("Sure!\n```python\na = count(items=obs)\n```\nDone"), "a = count(items=obs)\n");
  EXPECT_EQ(extract_program("Here you go:\n\n# step\na = count(items=obs)\nb = count(items=a)\n\nHope it helps."),
            "# step\na = count(items=obs)\nb = count(items=a)\n");
  EXPECT_EQ(extract_program("I cannot do that."), "");
}

TEST(Cache, PutGetAndMisses) {
  ResponseCache cache(scratch_dir("cache"));
  EXPECT_FALSE(cache.get("prompt", "m1"));
  cache.put("prompt", "m1", "a = count(items=obs)\n");
  EXPECT_EQ(cache.get("prompt", "m1"), std::optional<std::string>("a = count(items=obs)\n"));
  EXPECT_FALSE(cache.get("prompt", "m2"));
  EXPECT_FALSE(cache.get("prompt2", "m1"));
  const auto path = cache.path_for("prompt", "m1");
  std::filesystem::resize_file(path, std::filesystem::file_size(path) / 2);
  EXPECT_FALSE(cache.get("prompt", "m1"));
  cache.put("prompt", "m1", "again");
  EXPECT_EQ(cache.get("prompt", "m1"), std::optional<std::string>("again"));
}

// Minimal chat-completions server for the endpoint client.
class FakeEndpoint {
 public:
  explicit FakeEndpoint(std::vector<std::string> replies) : replies_(std::move(replies)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      if (req.get_header_value("Authorization") != "Bearer good-key") {
        res.status = 401;
        res.set_content(R"({"error":"bad key"})", "application/json");
        return;
      }
      const auto body = nlohmann::json::parse(req.body);
      prompts_.push_back(body.at("messages").at(0).at("content").get<std::string>());
      const auto& reply = replies_[std::min(calls_++, replies_.size() - 1)];
      res.set_content(nlohmann::json({{"id", "x"}, {"choices", {{{"message", {{"role", "assistant"}, {"content", reply}}}}}}}).dump(),
                      "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeEndpoint() {
    server_.stop();
    thread_.join();
  }
  EndpointConfig config(std::string key) const {
    EndpointConfig c;
    c.url = "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
    c.api_key = std::move(key);
    c.model = "test-model";
    c.timeout_seconds = 5;
    return c;
  }
  std::size_t calls() const { return calls_; }
  const std::vector<std::string>& prompts() const { return prompts_; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::vector<std::string> replies_;
  std::size_t calls_ = 0;
  std::vector<std::string> prompts_;
};

TEST(Endpoint, InvalidKeyIsAuthError) {
  FakeEndpoint server({"x"});
  PlannerOptions opts;
  opts.backend = Backend::kEndpoint;
  opts.endpoint = server.config("wrong");
  EXPECT_THROW(generate_program(goal(GoalKind::kCategory, "bed"), 0, opts), AuthError);
}

TEST(Endpoint, FencedReplyParses) {
  FakeEndpoint server({"```\nnav = explore_scene(target='bed')\nfound = is_found(target=nav)\n```"});
  PlannerOptions opts;
  opts.backend = Backend::kEndpoint;
  opts.endpoint = server.config("good-key");
  const auto r = generate_program(goal(GoalKind::kCategory, "bed"), 0, opts);
  EXPECT_EQ(r.program.statements.size(), 2u);
  EXPECT_EQ(r.attempts, 1);
  EXPECT_EQ(server.prompts().at(0), r.prompt);
}

TEST(Endpoint, RetriesOnceThenGivesUp) {
  {
    FakeEndpoint server({"I think you should look around.", "nav = explore_scene(target='bed')\n"});
    PlannerOptions opts;
    opts.backend = Backend::kEndpoint;
    opts.endpoint = server.config("good-key");
    const auto r = generate_program(goal(GoalKind::kCategory, "bed"), 0, opts);
    EXPECT_EQ(r.attempts, 2);
    EXPECT_NE(server.prompts().at(1).find("Output only the program"), std::string::npos);
  }
  {
    FakeEndpoint server({"no program here"});
    PlannerOptions opts;
    opts.backend = Backend::kEndpoint;
    opts.endpoint = server.config("good-key");
    EXPECT_THROW(generate_program(goal(GoalKind::kCategory, "bed"), 0, opts), PlanningError);
    EXPECT_EQ(server.calls(), 2u);
  }
}

TEST(Endpoint, CacheHitBypassesNetwork) {
  const auto dir = scratch_dir("endpoint_cache");
  PlannerOptions opts;
  opts.backend = Backend::kEndpoint;
  opts.cache_dir = dir;
  {
    FakeEndpoint server({"nav = explore_scene(target='bed')\n"});
    opts.endpoint = server.config("good-key");
    EXPECT_FALSE(generate_program(goal(GoalKind::kCategory, "bed"), 0, opts).cache_hit);
  }
  opts.endpoint->url = "http://127.0.0.1:9/v1/chat/completions";  // nothing listens here
  const auto r = generate_program(goal(GoalKind::kCategory, "bed"), 0, opts);
  EXPECT_TRUE(r.cache_hit);
  EXPECT_EQ(r.program.statements.size(), 1u);
}

TEST(Endpoint, UnreachableIsNetworkError) {
  PlannerOptions opts;
  opts.backend = Backend::kEndpoint;
  opts.endpoint = EndpointConfig{"http://127.0.0.1:9/v1/chat/completions", "k", "m", 2, false};
  EXPECT_THROW(generate_program(goal(GoalKind::kCategory, "bed"), 0, opts), NetworkError);
}

TEST(Examples, ExecuteToCompletionOnFixture) {
  const auto reg = interp::default_registry();
  perception::Embedder embedder;
  for (const auto& ex : bundled_examples()) {
    auto episode = fixture::apartment_episode("ovon-bed");
    episode.goals = {ex.goal};
    episode.task_kind = ex.goal.kind == GoalKind::kQuestion ? gridworld::TaskKind::kEqa : gridworld::TaskKind::kOvon;
    gridworld::WorldState world(fixture::apartment_scene(), episode);
    interp::Agent agent(world, embedder);
    const auto trace = interp::execute(interp::parse_program(ex.program), reg, agent, world.current_goal());
    EXPECT_EQ(trace.terminal.kind, interp::TerminalKind::kCompleted) << ex.instruction << ": " << trace.terminal.message;
    EXPECT_EQ(trace.records.size(), interp::parse_program(ex.program).statements.size());
  }
}

}  // namespace
}  // namespace primnav::planner
