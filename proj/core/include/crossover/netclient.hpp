#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <unordered_map>

#include "crossover/errors.hpp"
#include "crossover/probe.hpp"

namespace crossover {

struct RemoteConfig {
  // Request URL with the placeholder {Q} standing for the percent-encoded query.
  std::string url_template;
  // ECMAScript regex with exactly one capture group around the count.
  std::string count_pattern;
  double qps_limit = 1.0;
  int max_retries = 3;
  std::chrono::milliseconds backoff_base{500};
  std::optional<std::filesystem::path> cache_path;
  std::string user_agent = "crossover-probe/1.0";

  void validate() const;  // Throws ConfigError.
};

// Time source for rate limiting and backoff, replaceable in tests.
class Clock {
 public:
  using duration = std::chrono::steady_clock::duration;
  using time_point = std::chrono::steady_clock::time_point;
  virtual ~Clock() = default;
  virtual time_point now() = 0;
  virtual void sleep_until(time_point t) = 0;
};

class SystemClock final : public Clock {
 public:
  time_point now() override { return std::chrono::steady_clock::now(); }
  void sleep_until(time_point t) override;
};

// Virtual time: sleeping advances the clock instantly.
class ManualClock final : public Clock {
 public:
  time_point now() override;
  void sleep_until(time_point t) override;
  void advance(duration d);
  duration elapsed();

 private:
  std::mutex mutex_;
  time_point start_{};
  time_point now_{};
};

// Token bucket with burst 1: consecutive grants are at least 1/rate apart.
class TokenBucket {
 public:
  TokenBucket(double rate_per_second, Clock& clock);
  // Blocks until a token is available; returns the grant time.
  Clock::time_point acquire();

 private:
  Clock& clock_;
  Clock::duration interval_;
  std::mutex mutex_;
  std::optional<Clock::time_point> next_;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Raised by transports when no HTTP response was obtained (connect/read failure).
class TransportError : public Error {
 public:
  explicit TransportError(const std::string& what) : Error("TransportError", what) {}
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse get(const std::string& url, const std::string& user_agent) = 0;
};

// cpp-httplib client. Honors HTTP_PROXY / HTTPS_PROXY (and lowercase forms).
class HttplibTransport final : public HttpTransport {
 public:
  HttpResponse get(const std::string& url, const std::string& user_agent) override;
};

// Compiled count pattern; rejects patterns without exactly one capture group.
class CountPattern {
 public:
  explicit CountPattern(const std::string& pattern);
  const std::regex& regex() const noexcept { return regex_; }

 private:
  std::regex regex_;
};

// First match's capture, with digit-group separators (',', '.', ' ', '\'', '_',
// U+00A0, U+202F) removed. Throws ParseError when nothing matches, the capture
// is not a number, or it overflows 64 bits.
std::uint64_t extract_count(std::string_view body, const CountPattern& pattern);
std::uint64_t extract_count(std::string_view body, const std::string& pattern);

std::string percent_encode(std::string_view text);
std::string expand_url_template(const std::string& url_template, std::string_view query);

// Append-only "query<TAB>E" file; the last entry for a query wins on reload.
class ResultCache {
 public:
  explicit ResultCache(std::optional<std::filesystem::path> path);
  std::optional<std::uint64_t> get(const std::string& query);
  void put(const std::string& query, std::uint64_t e);
  std::size_t size();

 private:
  std::optional<std::filesystem::path> path_;
  std::mutex mutex_;
  std::unordered_map<std::string, std::uint64_t> entries_;
};

// Rate-limited, retrying, caching count client over an HTTP transport.
// Errors propagate; a failed lookup never turns into a zero.
class RemoteBackend final : public QueryBackend {
 public:
  RemoteBackend(RemoteConfig config, std::shared_ptr<HttpTransport> transport, Clock& clock);
  explicit RemoteBackend(RemoteConfig config);

  std::uint64_t count(std::string_view query) override;
  std::string id() const override { return "remote"; }

  // HTTP requests issued so far, retries included.
  std::uint64_t network_calls() const noexcept { return network_calls_.load(); }

 private:
  RemoteConfig config_;
  CountPattern pattern_;
  std::shared_ptr<HttpTransport> transport_;
  SystemClock system_clock_;
  Clock& clock_;
  TokenBucket bucket_;
  ResultCache cache_;
  std::atomic<std::uint64_t> network_calls_{0};
};

// One-shot lookup with a fresh client over the real network.
std::uint64_t remote_lookup(const RemoteConfig& config, std::string_view query);

}  // namespace crossover
