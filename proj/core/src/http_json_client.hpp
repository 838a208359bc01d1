#pragma once

#include <chrono>
#include <cstdlib>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "ontomatch/errors.hpp"

namespace ontomatch::detail {

struct HttpEndpoint {
  std::string base;  // scheme://host[:port]
  std::string path;  // /v1/...
};

inline HttpEndpoint split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("endpoint URL \"" + url + "\" must start with http:// or https://");
  }
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

struct HttpCallOptions {
  std::string endpoint;
  std::string api_key_env;
  std::size_t max_retries = 3;
  std::size_t timeout_ms = 30000;
  std::size_t min_interval_ms = 0;
  std::size_t backoff_ms = 100;
};

/// POSTs JSON bodies to one endpoint with bearer auth, bounded retries with
/// exponential backoff on transport failures / 429 / 5xx, and an optional
/// minimum interval between requests.
class JsonHttpClient {
 public:
  explicit JsonHttpClient(HttpCallOptions options)
      : options_(std::move(options)), endpoint_(split_url(options_.endpoint)) {}

  nlohmann::json post(const nlohmann::json& body) {
    const std::string payload = body.dump();
    std::string last_error;

    for (std::size_t attempt = 0; attempt < std::max<std::size_t>(1, options_.max_retries);
         ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(
            std::chrono::milliseconds(options_.backoff_ms << (attempt - 1)));
      }
      throttle();

      httplib::Client client(endpoint_.base);
      client.set_connection_timeout(0, static_cast<time_t>(options_.timeout_ms) * 1000);
      client.set_read_timeout(static_cast<time_t>(options_.timeout_ms / 1000),
                              static_cast<time_t>((options_.timeout_ms % 1000) * 1000));
      httplib::Headers headers;
      if (!options_.api_key_env.empty()) {
        const char* key = std::getenv(options_.api_key_env.c_str());
        if (key != nullptr && key[0] != '\0') {
          headers.emplace("Authorization", std::string("Bearer ") + key);
        }
      }

      auto res = client.Post(endpoint_.path, headers, payload, "application/json");
      if (!res) {
        last_error = "transport error: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status == 429 || res->status >= 500) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status != 200) {
        throw ProviderError("endpoint " + options_.endpoint + " answered HTTP " +
                                std::to_string(res->status) + ": " + res->body,
                            /*retryable=*/false);
      }
      try {
        return nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::parse_error& e) {
        throw ProviderError("endpoint " + options_.endpoint +
                                " returned unparseable JSON: " + e.what(),
                            /*retryable=*/false);
      }
    }
    throw ProviderError("endpoint " + options_.endpoint + " unreachable after " +
                            std::to_string(options_.max_retries) + " attempts (" + last_error + ")",
                        /*retryable=*/true);
  }

 private:
  void throttle() {
    if (options_.min_interval_ms == 0) return;
    std::lock_guard<std::mutex> lock(mutex_);
    const auto now = std::chrono::steady_clock::now();
    const auto interval = std::chrono::milliseconds(options_.min_interval_ms);
    if (last_request_.time_since_epoch().count() != 0 && now - last_request_ < interval) {
      std::this_thread::sleep_for(interval - (now - last_request_));
    }
    last_request_ = std::chrono::steady_clock::now();
  }

  HttpCallOptions options_;
  HttpEndpoint endpoint_;
  std::mutex mutex_;
  std::chrono::steady_clock::time_point last_request_{};
};

}  // namespace ontomatch::detail
