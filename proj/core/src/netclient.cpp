#include "crossover/netclient.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <thread>

#include "crossover/errors.hpp"

#ifdef CROSSOVER_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include "httplib.h"

namespace crossover {

void RemoteConfig::validate() const {
  const auto first = url_template.find("{Q}");
  if (first == std::string::npos || url_template.find("{Q}", first + 1) != std::string::npos)
    throw ConfigError("remote.url_template must contain {Q} exactly once");
  try {
    CountPattern check(count_pattern);
  } catch (const ParseError& e) {
    throw ConfigError(std::string("remote.count_pattern: ") + e.what());
  }
  if (!(qps_limit > 0.0)) throw ConfigError("remote.qps must be positive");
  if (max_retries < 0) throw ConfigError("remote.max_retries must be >= 0");
  if (backoff_base.count() < 0) throw ConfigError("remote.backoff_ms must be >= 0");
}

void SystemClock::sleep_until(time_point t) { std::this_thread::sleep_until(t); }

Clock::time_point ManualClock::now() {
  std::lock_guard lock(mutex_);
  return now_;
}

void ManualClock::sleep_until(time_point t) {
  std::lock_guard lock(mutex_);
  if (t > now_) now_ = t;
}

void ManualClock::advance(duration d) {
  std::lock_guard lock(mutex_);
  now_ += d;
}

Clock::duration ManualClock::elapsed() {
  std::lock_guard lock(mutex_);
  return now_ - start_;
}

TokenBucket::TokenBucket(double rate_per_second, Clock& clock)
    : clock_(clock),
      interval_(std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(1.0 / rate_per_second))) {
  if (!(rate_per_second > 0.0)) throw ConfigError("rate limit must be positive");
}

Clock::time_point TokenBucket::acquire() {
  // Holding the lock while sleeping serializes callers in arrival order.
  std::lock_guard lock(mutex_);
  auto grant = clock_.now();
  if (next_ && *next_ > grant) {
    clock_.sleep_until(*next_);
    grant = *next_;
  }
  next_ = grant + interval_;
  return grant;
}

namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string target;  // path and query, at least "/"
  bool https = false;
};

ParsedUrl parse_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("URL lacks a scheme: " + url);
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw ConfigError("unsupported URL scheme: " + scheme);
  const auto path_start = url.find('/', scheme_end + 3);
  ParsedUrl out;
  out.https = scheme == "https";
  out.origin = url.substr(0, path_start);
  out.target = path_start == std::string::npos ? "/" : url.substr(path_start);
  return out;
}

std::optional<std::pair<std::string, int>> proxy_from_env(bool https) {
  const char* names_https[] = {"HTTPS_PROXY", "https_proxy"};
  const char* names_http[] = {"HTTP_PROXY", "http_proxy"};
  for (const char* name : https ? names_https : names_http) {
    const char* value = std::getenv(name);
    if (!value || !*value) continue;
    std::string v(value);
    if (const auto p = v.find("://"); p != std::string::npos) v = v.substr(p + 3);
    if (const auto slash = v.find('/'); slash != std::string::npos) v.resize(slash);
    if (const auto at = v.rfind('@'); at != std::string::npos) v = v.substr(at + 1);
    int port = https ? 443 : 80;
    if (const auto colon = v.rfind(':'); colon != std::string::npos) {
      port = std::atoi(v.c_str() + colon + 1);
      v.resize(colon);
    }
    if (!v.empty()) return std::make_pair(v, port);
  }
  return std::nullopt;
}

bool is_separator_at(std::string_view s, std::size_t i, std::size_t& width) {
  const auto c = static_cast<unsigned char>(s[i]);
  if (c == ',' || c == '.' || c == ' ' || c == '\'' || c == '_') {
    width = 1;
    return true;
  }
  // U+00A0 (C2 A0) and U+202F (E2 80 AF) are common thousands separators.
  if (c == 0xC2 && i + 1 < s.size() && static_cast<unsigned char>(s[i + 1]) == 0xA0) {
    width = 2;
    return true;
  }
  if (c == 0xE2 && i + 2 < s.size() && static_cast<unsigned char>(s[i + 1]) == 0x80 &&
      static_cast<unsigned char>(s[i + 2]) == 0xAF) {
    width = 3;
    return true;
  }
  return false;
}

}  // namespace

HttpResponse HttplibTransport::get(const std::string& url, const std::string& user_agent) {
  const auto parsed = parse_url(url);
#ifndef CROSSOVER_HAVE_OPENSSL
  if (parsed.https) throw ConfigError("this build has no TLS support; use an http:// endpoint");
#endif
  httplib::Client client(parsed.origin);
  client.set_connection_timeout(std::chrono::seconds(10));
  client.set_read_timeout(std::chrono::seconds(30));
  client.set_follow_location(true);
  if (auto proxy = proxy_from_env(parsed.https)) client.set_proxy(proxy->first, proxy->second);
  const httplib::Headers headers{{"User-Agent", user_agent}};
  auto res = client.Get(parsed.target, headers);
  if (!res) throw TransportError("request to " + parsed.origin + " failed: " + httplib::to_string(res.error()));
  return {res->status, res->body};
}

CountPattern::CountPattern(const std::string& pattern) {
  try {
    regex_ = std::regex(pattern, std::regex::ECMAScript);
  } catch (const std::regex_error& e) {
    throw ParseError(std::string("invalid count pattern: ") + e.what());
  }
  if (regex_.mark_count() != 1)
    throw ParseError("count pattern must have exactly one capture group, has " + std::to_string(regex_.mark_count()));
}

std::uint64_t extract_count(std::string_view body, const CountPattern& pattern) {
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_search(body.begin(), body.end(), m, pattern.regex()) || !m[1].matched)
    throw ParseError("result count not found in response");
  if (m[1].length() == 0) throw ParseError("captured count is empty");
  const std::string_view capture(&*m[1].first, static_cast<std::size_t>(m[1].length()));
  std::uint64_t value = 0;
  std::size_t digits = 0;
  for (std::size_t i = 0; i < capture.size();) {
    std::size_t width = 0;
    if (is_separator_at(capture, i, width)) {
      i += width;
      continue;
    }
    const char c = capture[i];
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw ParseError("captured count '" + std::string(capture) + "' is not a number");
    const std::uint64_t d = static_cast<std::uint64_t>(c - '0');
    if (value > (std::numeric_limits<std::uint64_t>::max() - d) / 10)
      throw ParseError("captured count '" + std::string(capture) + "' overflows");
    value = value * 10 + d;
    ++digits;
    ++i;
  }
  if (digits == 0) throw ParseError("captured count is empty");
  return value;
}

std::uint64_t extract_count(std::string_view body, const std::string& pattern) {
  return extract_count(body, CountPattern(pattern));
}

std::string percent_encode(std::string_view text) {
  static constexpr char hex[] = "0123456789ABCDEF";
  std::string out;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~') {
      out += ch;
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 15];
    }
  }
  return out;
}

std::string expand_url_template(const std::string& url_template, std::string_view query) {
  const auto pos = url_template.find("{Q}");
  if (pos == std::string::npos) throw ConfigError("URL template has no {Q} placeholder");
  return url_template.substr(0, pos) + percent_encode(query) + url_template.substr(pos + 3);
}

ResultCache::ResultCache(std::optional<std::filesystem::path> path) : path_(std::move(path)) {
  if (!path_) return;
  std::ifstream in(*path_);
  if (!in) return;  // created on first put
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("cache line lacks a tab", lineno);
    std::uint64_t e = 0;
    const char* first = line.data() + tab + 1;
    const char* last = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(first, last, e);
    if (ec != std::errc() || ptr != last || first == last) throw ParseError("cache count is not an integer", lineno);
    entries_[line.substr(0, tab)] = e;
  }
}

std::optional<std::uint64_t> ResultCache::get(const std::string& query) {
  std::lock_guard lock(mutex_);
  const auto it = entries_.find(query);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ResultCache::put(const std::string& query, std::uint64_t e) {
  std::lock_guard lock(mutex_);
  entries_[query] = e;
  if (!path_) return;
  std::ofstream out(*path_, std::ios::app | std::ios::binary);
  if (!out) throw IoError("cannot append to cache " + path_->string());
  out << query << '\t' << e << '\n';
}

std::size_t ResultCache::size() {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

RemoteBackend::RemoteBackend(RemoteConfig config, std::shared_ptr<HttpTransport> transport, Clock& clock)
    : config_((config.validate(), std::move(config))),
      pattern_(config_.count_pattern),
      transport_(std::move(transport)),
      clock_(clock),
      bucket_(config_.qps_limit, clock_),
      cache_(config_.cache_path) {}

RemoteBackend::RemoteBackend(RemoteConfig config)
    : config_((config.validate(), std::move(config))),
      pattern_(config_.count_pattern),
      transport_(std::make_shared<HttplibTransport>()),
      clock_(system_clock_),
      bucket_(config_.qps_limit, clock_),
      cache_(config_.cache_path) {}

std::uint64_t RemoteBackend::count(std::string_view query) {
  const std::string key(query);
  if (auto hit = cache_.get(key)) return *hit;

  const auto url = expand_url_template(config_.url_template, query);
  std::string last_error;
  for (int attempt = 0;; ++attempt) {
    bucket_.acquire();
    ++network_calls_;
    bool transient = false;
    try {
      const auto res = transport_->get(url, config_.user_agent);
      if (res.status >= 200 && res.status < 300) {
        const auto e = extract_count(res.body, pattern_);
        cache_.put(key, e);
        return e;
      }
      last_error = "HTTP " + std::to_string(res.status);
      transient = res.status >= 500 || res.status == 429;
      if (!transient) throw BackendRejected("query '" + key + "' rejected with " + last_error);
    } catch (const TransportError& e) {
      last_error = e.what();
      transient = true;
    }
    if (attempt >= config_.max_retries)
      throw BackendUnavailable("query '" + key + "' failed after " + std::to_string(attempt + 1) +
                               " attempts: " + last_error);
    clock_.sleep_until(clock_.now() + config_.backoff_base * (std::int64_t{1} << std::min(attempt, 30)));
  }
}

std::uint64_t remote_lookup(const RemoteConfig& config, std::string_view query) {
  RemoteBackend backend(config);
  return backend.count(query);
}

}  // namespace crossover
