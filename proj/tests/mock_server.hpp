#pragma once

// Local HTTP server answering /search?q=... with a canned result-count page.

#include <atomic>
#include <functional>
#include <string>
#include <thread>

#include "httplib.h"

class MockSearchServer {
 public:
  // body_for(query) -> (status, body)
  using Handler = std::function<std::pair<int, std::string>(const std::string&)>;

  explicit MockSearchServer(Handler handler) : handler_(std::move(handler)) {
    server_.Get("/search", [this](const httplib::Request& req, httplib::Response& res) {
      ++calls_;
      last_user_agent_ = req.get_header_value("User-Agent");
      const auto [status, body] = handler_(req.get_param_value("q"));
      res.status = status;
      res.set_content(body, "text/html");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockSearchServer() {
    server_.stop();
    thread_.join();
  }

  std::string url_template() const { return "http://127.0.0.1:" + std::to_string(port_) + "/search?q={Q}"; }
  int calls() const { return calls_.load(); }
  std::string last_user_agent() const { return last_user_agent_; }

 private:
  Handler handler_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::atomic<int> calls_{0};
  std::string last_user_agent_;
};
