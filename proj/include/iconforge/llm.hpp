#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "iconforge/dsl.hpp"
#include "iconforge/relations.hpp"
#include "iconforge/scene.hpp"

namespace iconforge::llm {

struct LlmConfig {
  std::string endpoint;  // full URL of the chat-completions route
  std::string api_key;
  std::string model = "gpt-4";
  double temperature = 0.0;
  double timeout_s = 60.0;
  int max_retries = 2;
  /// Alternative programs requested per reply (multi-interpretation mode).
  int alternatives = 1;
};

/// Overrides endpoint, key and model from ICONFORGE_LLM_ENDPOINT,
/// ICONFORGE_LLM_API_KEY and ICONFORGE_LLM_MODEL when set.
LlmConfig from_env(LlmConfig base = {});

struct Exchange {
  std::string request;
  std::string scene;
  std::string program;
};

struct PromptBundle {
  std::string system;
  std::vector<Exchange> fewshot;
  std::string scene_summary;
  std::string request;
};

/// One line per segment with its label and bbox corners, then one line per
/// relation edge. No outline geometry.
std::string build_scene_summary(const Scene& scene, const RelationGraph& graph);

/// Reference for the model: every operator with its signature plus output rules.
std::string system_prompt(int alternatives = 1);

/// Parses "### request / ### scene / ### program" sections.
std::vector<Exchange> parse_fewshot(std::string_view text);
/// The bundled exchanges.
const std::vector<Exchange>& default_fewshot();

PromptBundle build_prompt(std::string_view request, const Scene& scene, const RelationGraph& graph,
                          int alternatives = 1);

struct Message {
  std::string role;
  std::string content;
};

/// system, few-shot user/assistant pairs, then the request.
std::vector<Message> build_messages(const PromptBundle& bundle);
/// Chat-completions request body.
std::string request_body(const std::vector<Message>& messages, const LlmConfig& cfg);

/// First fenced code block, or the whole reply when there is none.
std::string extract_program(std::string_view reply);
/// Splits a multi-interpretation reply on the delimiter line.
std::vector<std::string> split_alternatives(std::string_view text);
inline constexpr std::string_view kAlternativeDelimiter = "=== alternative ===";

struct LlmResult {
  std::vector<dsl::ConstraintProgram> programs;  // one per interpretation
  std::string raw_reply;
  int retries = 0;
};

/// Posts the prompt, extracts and parses the program; on a parse failure the
/// error is appended to the conversation and the request repeated.
/// Throws TransportError on network failure, ParseError when retries run out.
LlmResult request_program(std::string_view request, const Scene& scene, const RelationGraph& graph,
                          const LlmConfig& cfg);

/// Optional prompt asking the model which intra-object edges are crucial.
std::string crucial_prompt(const Scene& scene, const RelationGraph& graph);
/// Reads "segA-segB: crucial|noncrucial" lines into override_crucial input.
std::map<std::pair<int, int>, bool> parse_crucial_reply(std::string_view reply);

}  // namespace iconforge::llm
