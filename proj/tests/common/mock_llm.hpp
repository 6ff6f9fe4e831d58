#pragma once

#include <httplib.h>

#include <chrono>
#include <functional>
#include <json.hpp>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace iconforge::testing {

/// Local chat-completions stand-in. `reply(n, body)` gives the assistant
/// content for the n-th request (0-based); `delay` stalls every response.
class MockLlm {
 public:
  using Reply = std::function<std::string(int, const nlohmann::json&)>;

  explicit MockLlm(Reply reply, std::chrono::milliseconds delay = std::chrono::milliseconds(0))
      : reply_(std::move(reply)), delay_(delay) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      const auto body = nlohmann::json::parse(req.body);
      int n = 0;
      {
        std::lock_guard lock(mu_);
        n = static_cast<int>(requests_.size());
        requests_.push_back(body);
      }
      if (delay_.count() > 0) std::this_thread::sleep_for(delay_);
      const nlohmann::json out = {
          {"choices", {{{"index", 0}, {"message", {{"role", "assistant"}, {"content", reply_(n, body)}}}}}}};
      res.set_content(out.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~MockLlm() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }

  std::vector<nlohmann::json> requests() const {
    std::lock_guard lock(mu_);
    return requests_;
  }

 private:
  Reply reply_;
  std::chrono::milliseconds delay_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  mutable std::mutex mu_;
  std::vector<nlohmann::json> requests_;
};

}  // namespace iconforge::testing
