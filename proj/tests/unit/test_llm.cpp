#include <doctest.h>

#include "iconforge/errors.hpp"
#include "iconforge/llm.hpp"
#include "mock_llm.hpp"
#include "shapes.hpp"

using namespace iconforge;
using namespace iconforge::testing;

namespace {

Scene fixture(const char* name) { return load_scene(std::string(ICONFORGE_FIXTURES) + "/" + name); }

int count_lines_with(const std::string& text, const std::string& needle) {
  int n = 0;
  std::size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    ++n;
    pos += needle.size();
  }
  return n;
}

}  // namespace

TEST_CASE("scene summary") {
  const Scene one = make_scene({{"cup", "cup", rect(10, 20, 30, 50)}});
  const std::string s1 = llm::build_scene_summary(one, build_graph(one));
  CHECK(s1 == "seg0:(cup:cup) bbox=[(10,20),(30,20),(30,50),(10,50)]\n");

  const Scene lamp = fixture("lamp.json");
  const RelationGraph g = build_graph(lamp);
  const std::string s = llm::build_scene_summary(lamp, g);
  CHECK(s.find("seg0:(lamp:shade)") != std::string::npos);
  CHECK(count_lines_with(s, "connected-to") == 4);
  CHECK(count_lines_with(s, "bbox=") == 5);
  CHECK(llm::build_scene_summary(lamp, g) == s);
}

TEST_CASE("prompt carries the whole operator inventory and the few-shot file") {
  const std::string sys = llm::system_prompt();
  for (std::string_view name : dsl::operator_names()) {
    CAPTURE(name);
    CHECK(sys.find(std::string(name) + "(") != std::string::npos);
  }
  const auto& shots = llm::default_fewshot();
  REQUIRE(shots.size() == 6);
  for (const auto& e : shots) {
    CAPTURE(e.request);
    CHECK_NOTHROW(dsl::parse(e.program));
    CHECK(e.scene.find("seg0:(") == 0);
  }
  const Scene lamp = fixture("lamp.json");
  const auto msgs = llm::build_messages(llm::build_prompt("move it", lamp, build_graph(lamp)));
  REQUIRE(msgs.size() == 14);
  CHECK(msgs.front().role == "system");
  CHECK(msgs[2].role == "assistant");
  CHECK(msgs.back().content.find("Request: move it") != std::string::npos);
  CHECK(llm::system_prompt(3).find(std::string(llm::kAlternativeDelimiter)) != std::string::npos);
}

TEST_CASE("few-shot parser rejects unknown sections") {
  CHECK(llm::parse_fewshot("### request\na\n### program\nmove(seg0)\n").size() == 1);
  CHECK_THROWS_AS(llm::parse_fewshot("### request\na\n### answer\nx\n"), ParseError);
  CHECK_THROWS_AS(llm::parse_fewshot("### request\na\n"), ParseError);
}

TEST_CASE("program extraction") {
  CHECK(llm::extract_program("Sure:\n```\nmove(seg0)\n```\nthanks") == "move(seg0)");
  CHECK(llm::extract_program("```icp\nmove(seg0)\ntouch(seg0, seg4)\n```") == "move(seg0)\ntouch(seg0, seg4)");
  CHECK(llm::extract_program("  move(seg1)  \n") == "move(seg1)");
  CHECK(llm::extract_program("```\nscale(seg2)") == "scale(seg2)");
  const auto alts = llm::split_alternatives("```\nmove(seg0)\n```\n=== alternative ===\n```\nrotate(seg0)\n```\n");
  REQUIRE(alts.size() == 2);
  CHECK(llm::extract_program(alts[1]) == "rotate(seg0)");
}

TEST_CASE("crucial classifier prompt and reply") {
  const Scene basket = fixture("basket.json");
  const RelationGraph g = build_graph(basket);
  const std::string p = llm::crucial_prompt(basket, g);
  CHECK(count_lines_with(p, "(basket:handle)-seg") >= 2);
  const auto m = llm::parse_crucial_reply("seg0-seg1: noncrucial\nseg3 - seg0 : crucial\n");
  CHECK(m.at({0, 1}) == false);
  CHECK(m.at({0, 3}) == true);
}

TEST_CASE("request_program against a local mock") {
  const Scene lamp = fixture("lamp.json");
  const RelationGraph g = build_graph(lamp);
  llm::LlmConfig cfg;
  cfg.timeout_s = 5;

  SUBCASE("verbatim program") {
    MockLlm mock([](int, const nlohmann::json&) { return "```\nmove(seg0)\ntouch(seg0, seg4)\n```"; });
    cfg.endpoint = mock.endpoint();
    const auto r = llm::request_program("Move the lamp shade to touch the base", lamp, g, cfg);
    REQUIRE(r.programs.size() == 1);
    CHECK(r.programs[0].motions.size() == 1);
    CHECK(r.programs[0].constraints.size() == 1);
    CHECK(r.retries == 0);
    const auto reqs = mock.requests();
    REQUIRE(reqs.size() == 1);
    CHECK(reqs[0]["temperature"] == 0.0);
    CHECK(reqs[0]["messages"][0]["role"] == "system");
    CHECK(reqs[0]["messages"].back()["content"].get<std::string>().find("seg0:(lamp:shade)") != std::string::npos);
    // deterministic with the network mocked
    const auto again = llm::request_program("Move the lamp shade to touch the base", lamp, g, cfg);
    CHECK(again.programs == r.programs);
    CHECK(mock.requests()[1] == reqs[0]);
  }

  SUBCASE("one retry recovers") {
    MockLlm mock([](int n, const nlohmann::json&) {
      return n == 0 ? std::string("```\nmove(seg0)\nsnuggle(seg0, seg4)\n```")
                    : std::string("```\nmove(seg0)\ntouch(seg0, seg4)\n```");
    });
    cfg.endpoint = mock.endpoint();
    const auto r = llm::request_program("Move the lamp shade to touch the base", lamp, g, cfg);
    CHECK(r.retries == 1);
    CHECK(r.programs.at(0).constraints.size() == 1);
    const auto reqs = mock.requests();
    REQUIRE(reqs.size() == 2);
    const std::string last = reqs[1]["messages"].back()["content"];
    CHECK(last.find("snuggle") != std::string::npos);
  }

  SUBCASE("retries exhausted") {
    MockLlm mock([](int, const nlohmann::json&) { return "I cannot do that"; });
    cfg.endpoint = mock.endpoint();
    cfg.max_retries = 1;
    try {
      llm::request_program("x", lamp, g, cfg);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("I cannot do that") != std::string::npos);
    }
    CHECK(mock.requests().size() == 2);
  }

  SUBCASE("timeout") {
    MockLlm mock([](int, const nlohmann::json&) { return "move(seg0)"; }, std::chrono::milliseconds(1500));
    cfg.endpoint = mock.endpoint();
    cfg.timeout_s = 0.3;
    try {
      llm::request_program("x", lamp, g, cfg);
      FAIL("expected a transport error");
    } catch (const TransportError& e) {
      CHECK(std::string(e.what()).find("--program") != std::string::npos);
    }
  }

  SUBCASE("multiple interpretations") {
    MockLlm mock([](int, const nlohmann::json&) {
      return "```\nmove(seg0)\ntouch(seg0, seg4)\n```\n=== alternative ===\n```\nmove(seg0)\non_top(seg0, seg4)\n```";
    });
    cfg.endpoint = mock.endpoint();
    cfg.alternatives = 2;
    const auto r = llm::request_program("x", lamp, g, cfg);
    CHECK(r.programs.size() == 2);
  }
}

TEST_CASE("transport failures") {
  const Scene lamp = fixture("lamp.json");
  const RelationGraph g = build_graph(lamp);
  llm::LlmConfig cfg;
  CHECK_THROWS_AS(llm::request_program("x", lamp, g, cfg), ValidationError);
  cfg.endpoint = "http://127.0.0.1:1/v1/chat/completions";
  cfg.timeout_s = 1;
  CHECK_THROWS_AS(llm::request_program("x", lamp, g, cfg), TransportError);
  cfg.endpoint = "not a url";
  CHECK_THROWS_AS(llm::request_program("x", lamp, g, cfg), ValidationError);
}
