#pragma once

#include <chrono>
#include <cstdlib>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "strata/core/json.hpp"
#include "strata/core/util.hpp"
#include "strata/llm/prompts.hpp"

#include <httplib.h>

namespace strata::llm {

/// A rendered prompt. The template name and slot values travel with the
/// text because the scripted stub fingerprints requests by (template,
/// slots), not by raw prompt bytes.
struct Prompt {
  std::string template_name;
  std::map<std::string, std::string> slots;
  std::string text;
};

inline Prompt render(const PromptTemplate& tmpl,
                     const std::map<std::string, std::string>& slots) {
  return Prompt{tmpl.name, slots, render_text(tmpl, slots)};
}

inline Prompt render(std::string_view template_name,
                     const std::map<std::string, std::string>& slots) {
  return render(prompt_template(template_name), slots);
}

inline std::string request_fingerprint(const Prompt& prompt) {
  uint64_t h = fnv1a64(prompt.template_name);
  h = fnv1a64("\x1f", h);
  for (const auto& [key, value] : prompt.slots) {
    h = fnv1a64(key, h);
    h = fnv1a64("\x1e", h);
    h = fnv1a64(value, h);
    h = fnv1a64("\x1f", h);
  }
  return to_hex(h);
}

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string complete(const Prompt& prompt) = 0;
};

/// Deterministic canned backend. Responses are served either by exact
/// request fingerprint or from a per-template FIFO queue; a miss raises
/// UnscriptedRequest rather than improvising.
class ScriptedStub : public Backend {
 public:
  ScriptedStub() = default;

  void add_exact(const std::string& template_name,
                 const std::map<std::string, std::string>& slots,
                 std::string response) {
    std::lock_guard lock(mutex_);
    exact_[request_fingerprint(Prompt{template_name, slots, ""})] = std::move(response);
  }

  void push(const std::string& template_name, std::string response) {
    std::lock_guard lock(mutex_);
    queues_[template_name].push_back(std::move(response));
  }

  std::string complete(const Prompt& prompt) override {
    std::lock_guard lock(mutex_);
    auto exact = exact_.find(request_fingerprint(prompt));
    if (exact != exact_.end()) return exact->second;
    auto queue = queues_.find(prompt.template_name);
    if (queue != queues_.end() && !queue->second.empty()) {
      std::string response = std::move(queue->second.front());
      queue->second.pop_front();
      return response;
    }
    throw Error(ErrorCode::UnscriptedRequest,
                "no scripted response for template '" + prompt.template_name +
                    "' (fingerprint " + request_fingerprint(prompt) + ")");
  }

  size_t remaining() const {
    std::lock_guard lock(mutex_);
    size_t n = 0;
    for (const auto& [name, queue] : queues_) n += queue.size();
    return n;
  }

  /// Script document: {"responses": [{"template", "response", "slots"?}]}.
  /// Entries with slots become exact-fingerprint matches, the rest feed the
  /// per-template queues in file order.
  void load_script(const Json& script) {
    if (!script.contains("responses")) return;
    for (const Json& entry : script["responses"]) {
      std::string name = require_string(entry, "template", "stub script entry");
      std::string response = require_string(entry, "response", "stub script entry");
      if (entry.contains("slots")) {
        std::map<std::string, std::string> slots;
        for (const auto& [k, v] : entry["slots"].items()) slots[k] = v.get<std::string>();
        add_exact(name, slots, response);
      } else {
        push(name, response);
      }
    }
  }

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::string> exact_;
  std::map<std::string, std::deque<std::string>> queues_;
};

struct HttpChatConfig {
  std::string endpoint;  // e.g. http://127.0.0.1:8089/v1/chat/completions
  std::string model;
  double temperature = 0.0;
  std::string api_key_env;  // env var holding the bearer token, may be empty
  int max_retries = 3;      // retries after the first attempt
  int backoff_base_ms = 250;
  double backoff_factor = 2.0;
  int min_interval_ms = 0;  // per-backend rate limit between requests
  int timeout_seconds = 120;
};

/// Chat-completions HTTP backend: POST {model, messages, temperature},
/// answer read from choices[0].message.content. Transport errors, 429 and
/// 5xx are retried with exponential backoff.
class HttpChat : public Backend {
 public:
  explicit HttpChat(HttpChatConfig config) : config_(std::move(config)) {
    size_t scheme = config_.endpoint.find("://");
    if (scheme == std::string::npos) {
      throw Error(ErrorCode::ConfigError, "endpoint must be an absolute URL");
    }
    size_t path_start = config_.endpoint.find('/', scheme + 3);
    if (path_start == std::string::npos) {
      base_ = config_.endpoint;
      path_ = "/";
    } else {
      base_ = config_.endpoint.substr(0, path_start);
      path_ = config_.endpoint.substr(path_start);
    }
  }

  std::string complete(const Prompt& prompt) override {
    rate_limit();
    Json body;
    body["model"] = config_.model;
    body["messages"] = Json::array({Json{{"role", "user"}, {"content", prompt.text}}});
    body["temperature"] = config_.temperature;
    const std::string payload = body.dump();

    int attempts = 0;
    for (;;) {
      ++attempts;
      httplib::Client client(base_);
      client.set_connection_timeout(config_.timeout_seconds);
      client.set_read_timeout(config_.timeout_seconds);
      httplib::Headers headers;
      if (!config_.api_key_env.empty()) {
        if (const char* key = std::getenv(config_.api_key_env.c_str())) {
          headers.emplace("Authorization", std::string("Bearer ") + key);
        }
      }
      auto res = client.Post(path_, headers, payload, "application/json");
      if (res && res->status >= 200 && res->status < 300) {
        return extract_content(res->body);
      }
      bool retryable = !res || res->status == 429 || res->status >= 500;
      if (!retryable) {
        throw Error(ErrorCode::TransportError,
                    "chat endpoint returned status " + std::to_string(res->status));
      }
      if (attempts > config_.max_retries) {
        if (res && res->status == 429) {
          throw Error(ErrorCode::RateLimited,
                      "chat endpoint kept returning 429 after " +
                          std::to_string(attempts) + " attempts");
        }
        std::string reason = res ? "status " + std::to_string(res->status)
                                 : std::string(httplib::to_string(res.error()));
        throw Error(ErrorCode::TransportError,
                    "chat request failed after " + std::to_string(attempts) +
                        " attempts (" + reason + ")");
      }
      double delay = config_.backoff_base_ms;
      for (int i = 1; i < attempts; ++i) delay *= config_.backoff_factor;
      std::this_thread::sleep_for(std::chrono::milliseconds(static_cast<long>(delay)));
    }
  }

 private:
  void rate_limit() {
    if (config_.min_interval_ms <= 0) return;
    std::unique_lock lock(rate_mutex_);
    auto now = std::chrono::steady_clock::now();
    auto earliest = last_request_ + std::chrono::milliseconds(config_.min_interval_ms);
    if (now < earliest) {
      std::this_thread::sleep_for(earliest - now);
      now = std::chrono::steady_clock::now();
    }
    last_request_ = now;
  }

  static std::string extract_content(const std::string& body) {
    Json parsed = Json::parse(body, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("choices") || parsed["choices"].empty()) {
      throw Error(ErrorCode::TransportError, "malformed chat completion response");
    }
    const Json& message = parsed["choices"][0];
    if (!message.contains("message") || !message["message"].contains("content") ||
        !message["message"]["content"].is_string()) {
      throw Error(ErrorCode::TransportError, "chat completion has no message content");
    }
    return message["message"]["content"].get<std::string>();
  }

  HttpChatConfig config_;
  std::string base_;
  std::string path_;
  std::mutex rate_mutex_;
  std::chrono::steady_clock::time_point last_request_{};
};

}  // namespace strata::llm
