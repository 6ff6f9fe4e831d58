#include "iconforge/llm.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <json.hpp>
#include <regex>
#include <sstream>

#include "iconforge/errors.hpp"

namespace iconforge::llm {

extern const char* const kBundledFewshot;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string fmt_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.0f", std::round(v));
  return buf;
}

std::string sort_name(dsl::Sort s) {
  switch (s) {
    case dsl::Sort::Violation: return "constraint";
    case dsl::Sort::Number: return "number";
    case dsl::Sort::Segment: return "segment";
    case dsl::Sort::Point: return "point";
  }
  return "?";
}

}  // namespace

LlmConfig from_env(LlmConfig base) {
  if (const char* v = std::getenv("ICONFORGE_LLM_ENDPOINT"); v && *v) base.endpoint = v;
  if (const char* v = std::getenv("ICONFORGE_LLM_API_KEY"); v && *v) base.api_key = v;
  if (const char* v = std::getenv("ICONFORGE_LLM_MODEL"); v && *v) base.model = v;
  return base;
}

std::string build_scene_summary(const Scene& scene, const RelationGraph& graph) {
  std::string out;
  for (const Segment& seg : scene.segments) {
    std::vector<Vec2> all;
    for (const Path& p : seg.paths) all.insert(all.end(), p.begin(), p.end());
    const BBox b = bbox(all);
    const std::string x0 = fmt_coord(b.min_x), y0 = fmt_coord(b.min_y);
    const std::string x1 = fmt_coord(b.max_x), y1 = fmt_coord(b.max_y);
    out += "seg" + std::to_string(seg.id) + ":" + seg.label.text() + " bbox=[(" + x0 + "," + y0 + "),(" + x1 + "," +
           y0 + "),(" + x1 + "," + y1 + "),(" + x0 + "," + y1 + ")]\n";
  }
  for (const RelationEdge& e : graph.edges) {
    out += "seg" + std::to_string(e.a) + " connected-to seg" + std::to_string(e.b) + " (" +
           std::string(kind_name(e.kind)) + ")\n";
  }
  return out;
}

std::string system_prompt(int alternatives) {
  std::string out =
      "You translate icon editing requests into constraint programs.\n"
      "The scene is a list of labelled segments with axis-aligned bounding boxes in pixels "
      "(x to the right, y downward) and the detected contacts between them.\n"
      "Write the few constraints that must hold after the edit. Other segments keep their "
      "contacts automatically, so do not restate them.\n\n"
      "Motion statements name the segments the request moves:\n";
  for (auto k : {dsl::MotionKind::Translate, dsl::MotionKind::Rotate, dsl::MotionKind::Scale, dsl::MotionKind::Stay,
                 dsl::MotionKind::Adjust}) {
    out += "  " + std::string(dsl::motion_name(k)) + "(segN)\n";
  }
  out += "translate (also written move), rotate and scale allow that motion, stay keeps a segment fixed, adjust lets the solver "
         "decide.\n\nOperators:\n";
  for (int k = 0; k <= static_cast<int>(dsl::Op::CenterDist); ++k) {
    const dsl::OpInfo& info = dsl::op_info(static_cast<dsl::Op>(k));
    std::string args;
    for (std::size_t i = 0; i < info.args.size(); ++i) {
      if (i) args += ", ";
      args += sort_name(info.args[i]);
    }
    if (info.variadic) args += ", ...";
    out += "  " + std::string(info.name) + "(" + args + ") -> " + sort_name(info.result) + "\n";
  }
  out += "Arithmetic may also be written with + - * / and parentheses. Segments are written segN. "
         "old(segN) is the segment before the edit.\n\n"
         "Reply with the program only, inside one fenced code block, one statement per line.\n";
  if (alternatives > 1) {
    out += "Give " + std::to_string(alternatives) +
           " different interpretations of the request, each in its own fenced block, separated by a line "
           "containing exactly \"" +
           std::string(kAlternativeDelimiter) + "\".\n";
  }
  return out;
}

std::vector<Exchange> parse_fewshot(std::string_view text) {
  std::vector<Exchange> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::string* target = nullptr;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t == "### request") {
      out.emplace_back();
      target = &out.back().request;
      continue;
    }
    if (t == "### scene" || t == "### program") {
      if (out.empty()) throw ParseError("few-shot section before the first request", line_no);
      target = t == "### scene" ? &out.back().scene : &out.back().program;
      continue;
    }
    if (t.rfind("###", 0) == 0) throw ParseError("unknown few-shot section '" + t + "'", line_no);
    if (target) *target += line + "\n";
  }
  for (Exchange& e : out) {
    e.request = trim(e.request);
    e.scene = trim(e.scene);
    e.program = trim(e.program);
    if (e.request.empty() || e.program.empty()) throw ParseError("few-shot exchange without request or program");
  }
  return out;
}

const std::vector<Exchange>& default_fewshot() {
  static const std::vector<Exchange> shots = parse_fewshot(kBundledFewshot);
  return shots;
}

PromptBundle build_prompt(std::string_view request, const Scene& scene, const RelationGraph& graph,
                          int alternatives) {
  return {system_prompt(alternatives), default_fewshot(), build_scene_summary(scene, graph), std::string(request)};
}

namespace {

std::string user_turn(std::string_view scene, std::string_view request) {
  return "Scene:\n" + std::string(scene) + "\nRequest: " + std::string(request);
}

}  // namespace

std::vector<Message> build_messages(const PromptBundle& bundle) {
  std::vector<Message> out{{"system", bundle.system}};
  for (const Exchange& e : bundle.fewshot) {
    out.push_back({"user", user_turn(e.scene, e.request)});
    out.push_back({"assistant", "```\n" + e.program + "\n```"});
  }
  out.push_back({"user", user_turn(bundle.scene_summary, bundle.request)});
  return out;
}

std::string request_body(const std::vector<Message>& messages, const LlmConfig& cfg) {
  nlohmann::json body;
  body["model"] = cfg.model;
  body["temperature"] = cfg.temperature;
  body["messages"] = nlohmann::json::array();
  for (const Message& m : messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  return body.dump();
}

std::string extract_program(std::string_view reply) {
  const auto open = reply.find("```");
  if (open == std::string_view::npos) return trim(reply);
  auto body = reply.find('\n', open);
  if (body == std::string_view::npos) return trim(reply.substr(open + 3));
  ++body;
  const auto close = reply.find("```", body);
  return trim(reply.substr(body, close == std::string_view::npos ? std::string_view::npos : close - body));
}

std::vector<std::string> split_alternatives(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line) == kAlternativeDelimiter) {
      out.push_back(current);
      current.clear();
    } else {
      current += line + "\n";
    }
  }
  out.push_back(current);
  std::erase_if(out, [](const std::string& s) { return trim(s).empty(); });
  return out;
}

namespace {

struct Endpoint {
  std::string base;  // scheme://host:port
  std::string path;
};

Endpoint parse_endpoint(const std::string& url) {
  static const std::regex re(R"(^(https?)://([^/:]+)(?::(\d+))?(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw ValidationError("malformed LLM endpoint URL '" + url + "'");
  const std::string scheme = m[1];
  const std::string port = m[3].matched ? m[3].str() : (scheme == "https" ? "443" : "80");
  return {scheme + "://" + m[2].str() + ":" + port, m[4].matched ? m[4].str() : "/"};
}

const char* kOfflineHint = "; to run offline pass a hand-written program with --program";

std::string post(const Endpoint& ep, const std::string& body, const LlmConfig& cfg) {
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (ep.base.rfind("https", 0) == 0) {
    throw TransportError("this build has no TLS support for " + ep.base + kOfflineHint);
  }
#endif
  httplib::Client cli(ep.base);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::duration<double>(cfg.timeout_s));
  const auto sec = static_cast<time_t>(timeout.count() / 1000000);
  const auto usec = static_cast<time_t>(timeout.count() % 1000000);
  cli.set_connection_timeout(sec, usec);
  cli.set_read_timeout(sec, usec);
  cli.set_write_timeout(sec, usec);
  httplib::Headers headers;
  if (!cfg.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg.api_key);
  auto res = cli.Post(ep.path, headers, body, "application/json");
  if (!res) {
    throw TransportError("request to " + ep.base + ep.path + " failed: " + httplib::to_string(res.error()) +
                         kOfflineHint);
  }
  if (res->status != 200) {
    throw TransportError("endpoint returned HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
  }
  try {
    const auto j = nlohmann::json::parse(res->body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("malformed chat-completion response: ") + e.what());
  }
}

}  // namespace

LlmResult request_program(std::string_view request, const Scene& scene, const RelationGraph& graph,
                          const LlmConfig& cfg) {
  if (cfg.endpoint.empty()) {
    throw ValidationError(std::string("no LLM endpoint configured (set ICONFORGE_LLM_ENDPOINT)") + kOfflineHint);
  }
  const Endpoint ep = parse_endpoint(cfg.endpoint);
  std::vector<Message> messages = build_messages(build_prompt(request, scene, graph, cfg.alternatives));
  LlmResult result;
  for (int attempt = 0;; ++attempt) {
    result.retries = attempt;
    result.raw_reply = post(ep, request_body(messages, cfg), cfg);
    try {
      result.programs.clear();
      for (const std::string& part : split_alternatives(result.raw_reply)) {
        result.programs.push_back(dsl::parse(extract_program(part), scene));
      }
      if (result.programs.empty()) throw ParseError("empty reply");
      return result;
    } catch (const ParseError& e) {
      if (attempt >= cfg.max_retries) {
        throw ParseError(std::string(e.what()) + " (after " + std::to_string(attempt) + " retries)\n--- reply ---\n" +
                         result.raw_reply);
      }
      spdlog::info("LLM reply did not parse ({}); retrying", e.what());
      messages.push_back({"assistant", result.raw_reply});
      messages.push_back({"user", std::string("That program does not parse: ") + e.what() +
                                      "\nReply with the corrected program in one fenced block."});
    }
  }
}

std::string crucial_prompt(const Scene& scene, const RelationGraph& graph) {
  std::string out =
      "Each line below is a contact between two parts of the same object. A contact is crucial when "
      "removing it breaks the object physically (a handle detached from its body). For every line answer "
      "\"segA-segB: crucial\" or \"segA-segB: noncrucial\".\n\n";
  for (const RelationEdge& e : graph.edges) {
    if (e.inter()) continue;
    out += "seg" + std::to_string(e.a) + scene.segment(e.a).label.text() + "-seg" + std::to_string(e.b) +
           scene.segment(e.b).label.text() + "\n";
  }
  return out;
}

std::map<std::pair<int, int>, bool> parse_crucial_reply(std::string_view reply) {
  std::map<std::pair<int, int>, bool> out;
  static const std::regex re(R"(seg(\d+)\s*-\s*seg(\d+)\s*:\s*(crucial|noncrucial))");
  const std::string text(reply);
  for (auto it = std::sregex_iterator(text.begin(), text.end(), re); it != std::sregex_iterator(); ++it) {
    const int a = std::stoi((*it)[1]);
    const int b = std::stoi((*it)[2]);
    out[{std::min(a, b), std::max(a, b)}] = (*it)[3] == "crucial";
  }
  return out;
}

}  // namespace iconforge::llm
