#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "strata/agent/types.hpp"
#include "strata/core/json.hpp"
#include "strata/llm/backend.hpp"
#include "strata/web/site.hpp"

namespace strata::run {

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) {
    throw Error(ErrorCode::ConfigError, "cannot read file").with_path(path.string());
  }
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out.good()) {
    throw Error(ErrorCode::ConfigError, "cannot write file").with_path(path.string());
  }
  out << text;
}

struct BackendBinding {
  std::string kind;  // "scripted" | "http"
  std::string script_path;  // resolved, scripted kind
  llm::HttpChatConfig http;
  Json raw;  // resolved form recorded in the manifest
};

struct RunConfig {
  std::string tasks_path;  // resolved
  std::string sites_dir;   // resolved
  std::string representation = "nl";       // human | nl | pddl
  std::string action_space = "expanded";   // expanded | action_object | action_id
  std::map<std::string, BackendBinding> backends;  // planner, executor, checker, judge
  agent::Budgets budgets;
  std::string output_dir;  // resolved
  int concurrency = 4;
  uint64_t seed = 0;

  agent::RunSettings settings() const {
    agent::RunSettings s;
    s.use_human_plan = representation == "human";
    s.representation =
        representation == "pddl" ? agent::Representation::PDDL : agent::Representation::NL;
    s.action_space = web::parse_action_space(action_space);
    s.budgets = budgets;
    s.seed = seed;
    return s;
  }

  /// Fully resolved snapshot: replaying a run needs nothing but this.
  Json to_json() const {
    Json j;
    j["schema_version"] = 1;
    j["tasks"] = tasks_path;
    j["sites_dir"] = sites_dir;
    j["representation"] = representation;
    j["action_space"] = action_space;
    j["backends"] = Json::object();
    for (const auto& [role, binding] : backends) j["backends"][role] = binding.raw;
    j["budgets"] = agent::budgets_to_json(budgets);
    j["output_dir"] = output_dir;
    j["concurrency"] = concurrency;
    j["seed"] = seed;
    return j;
  }
};

namespace detail {

inline std::string resolve(const std::filesystem::path& base, const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute()) return p.lexically_normal().string();
  return (base / p).lexically_normal().string();
}

inline BackendBinding parse_binding(const Json& j, const std::filesystem::path& base,
                                    const std::string& role) {
  BackendBinding binding;
  binding.kind = require_string(j, "kind", "backends." + role);
  if (binding.kind == "scripted") {
    binding.script_path = resolve(base, require_string(j, "script", "backends." + role));
    if (!std::filesystem::exists(binding.script_path)) {
      throw Error(ErrorCode::ConfigError, "stub script does not exist")
          .with_path(binding.script_path);
    }
    binding.raw = Json{{"kind", "scripted"}, {"script", binding.script_path}};
  } else if (binding.kind == "http") {
    binding.http.endpoint = require_string(j, "endpoint", "backends." + role);
    binding.http.model = j.value("model", std::string());
    binding.http.temperature = j.value("temperature", 0.0);
    binding.http.api_key_env = j.value("api_key_env", std::string());
    binding.http.max_retries = j.value("max_retries", 3);
    binding.http.backoff_base_ms = j.value("backoff_base_ms", 250);
    binding.http.min_interval_ms = j.value("min_interval_ms", 0);
    binding.http.timeout_seconds = j.value("timeout_seconds", 120);
    binding.raw = Json{{"kind", "http"},
                       {"endpoint", binding.http.endpoint},
                       {"model", binding.http.model},
                       {"temperature", binding.http.temperature},
                       {"api_key_env", binding.http.api_key_env},
                       {"max_retries", binding.http.max_retries},
                       {"backoff_base_ms", binding.http.backoff_base_ms},
                       {"min_interval_ms", binding.http.min_interval_ms},
                       {"timeout_seconds", binding.http.timeout_seconds}};
  } else {
    throw Error(ErrorCode::ConfigError,
                "backend kind must be 'scripted' or 'http', got '" + binding.kind + "'")
        .with_path("backends." + role);
  }
  return binding;
}

}  // namespace detail

inline RunConfig run_config_from_json(const Json& doc, const std::filesystem::path& base_dir) {
  RunConfig config;
  config.tasks_path = detail::resolve(base_dir, require_string(doc, "tasks", "run config"));
  config.sites_dir = detail::resolve(base_dir, require_string(doc, "sites_dir", "run config"));
  if (!std::filesystem::exists(config.tasks_path))
    throw Error(ErrorCode::ConfigError, "task file does not exist").with_path(config.tasks_path);
  if (!std::filesystem::is_directory(config.sites_dir))
    throw Error(ErrorCode::ConfigError, "sites_dir is not a directory").with_path(config.sites_dir);

  config.representation = doc.value("representation", std::string("nl"));
  if (config.representation != "human" && config.representation != "nl" &&
      config.representation != "pddl") {
    throw Error(ErrorCode::ConfigError,
                "representation must be human|nl|pddl, got '" + config.representation + "'");
  }
  config.action_space = doc.value("action_space", std::string("expanded"));
  (void)web::parse_action_space(config.action_space);  // validates

  const Json& backends = require_field(doc, "backends", "run config");
  for (const char* role : {"planner", "executor", "checker", "judge"}) {
    if (!backends.contains(role)) {
      throw Error(ErrorCode::ConfigError, std::string("missing backend binding for role ") + role);
    }
    config.backends[role] = detail::parse_binding(backends[role], base_dir, role);
  }

  if (doc.contains("budgets")) config.budgets = agent::budgets_from_json(doc["budgets"]);
  if (config.budgets.max_attempts <= 0 || config.budgets.max_actions_per_subgoal <= 0 ||
      config.budgets.replan_rounds < 0 || config.budgets.retry_r < 0 ||
      config.budgets.repetition_k <= 0) {
    throw Error(ErrorCode::ConfigError, "budgets must be positive");
  }
  config.output_dir = detail::resolve(base_dir, doc.value("output_dir", std::string("run")));
  config.concurrency = doc.value("concurrency", 4);
  if (config.concurrency <= 0)
    throw Error(ErrorCode::ConfigError, "concurrency must be positive");
  config.seed = doc.value("seed", 0ULL);
  return config;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  Json doc = parse_json(read_text_file(path), path.string());
  return run_config_from_json(doc, path.parent_path());
}

// --- task file --------------------------------------------------------------

struct TaskFile {
  std::vector<agent::TaskSpec> tasks;
};

inline TaskFile load_task_file(const std::filesystem::path& path,
                               const std::filesystem::path& sites_dir) {
  Json doc = parse_json(read_text_file(path), path.string());
  TaskFile file;
  std::set<std::string> ids;
  const Json& tasks = require_field(doc, "tasks", path.string());
  size_t i = 0;
  for (const Json& t : tasks) {
    std::string where = path.string() + ": tasks[" + std::to_string(i++) + "]";
    agent::TaskSpec task;
    task.id = require_string(t, "id", where);
    if (!ids.insert(task.id).second)
      throw Error(ErrorCode::ConfigError, "duplicate task id '" + task.id + "'").with_path(where);
    task.instruction = require_string(t, "instruction", where);
    task.start_url = require_string(t, "start_url", where);
    task.site_domain = require_string(t, "site_domain", where);
    task.site = require_string(t, "site", where);
    if (!std::filesystem::exists(sites_dir / task.site))
      throw Error(ErrorCode::ConfigError, "unknown site script '" + task.site + "'").with_path(where);
    if (registrable_domain(task.start_url) != task.site_domain)
      throw Error(ErrorCode::ConfigError,
                  "start_url " + task.start_url + " is not on site_domain " + task.site_domain)
          .with_path(where);
    if (t.contains("human_plan")) {
      for (const Json& step : t["human_plan"]) task.human_plan.push_back(step.get<std::string>());
    }
    file.tasks.push_back(std::move(task));
  }
  return file;
}

// --- backend instantiation ---------------------------------------------------

/// Owns the role bindings for one run. Scripted roles get one stub per task
/// (per-task response sections keep concurrent runs deterministic); http
/// roles share a thread-safe client.
class BackendSet {
 public:
  explicit BackendSet(const RunConfig& config) {
    for (const auto& [role, binding] : config.backends) {
      if (binding.kind == "scripted") {
        scripts_[role] = parse_json(read_text_file(binding.script_path), binding.script_path);
      } else {
        http_[role] = std::make_unique<llm::HttpChat>(binding.http);
      }
    }
  }

  struct TaskBackends {
    std::vector<std::unique_ptr<llm::Backend>> owned;
    agent::RoleBackends roles;
  };

  TaskBackends for_task(const std::string& task_id) const {
    TaskBackends out;
    auto bind = [&](const std::string& role) -> llm::Backend* {
      auto http = http_.find(role);
      if (http != http_.end()) return http->second.get();
      const Json& script = scripts_.at(role);
      auto stub = std::make_unique<llm::ScriptedStub>();
      if (script.contains("tasks") && script["tasks"].contains(task_id)) {
        stub->load_script(script["tasks"][task_id]);
      } else {
        stub->load_script(script);
      }
      llm::Backend* ptr = stub.get();
      out.owned.push_back(std::move(stub));
      return ptr;
    };
    out.roles.planner = bind("planner");
    out.roles.executor = bind("executor");
    out.roles.checker = bind("checker");
    out.roles.judge = bind("judge");
    return out;
  }

 private:
  std::map<std::string, Json> scripts_;
  std::map<std::string, std::unique_ptr<llm::HttpChat>> http_;
};

/// Site scripts are immutable; load each file once and share across runs.
class SiteCache {
 public:
  explicit SiteCache(std::filesystem::path sites_dir) : sites_dir_(std::move(sites_dir)) {}

  const web::SiteScript& get(const std::string& site_file) {
    std::lock_guard lock(mutex_);
    auto it = sites_.find(site_file);
    if (it != sites_.end()) return *it->second;
    auto site = std::make_unique<web::SiteScript>(
        web::load_site_text(read_text_file(sites_dir_ / site_file)));
    return *sites_.emplace(site_file, std::move(site)).first->second;
  }

 private:
  std::filesystem::path sites_dir_;
  std::mutex mutex_;
  std::map<std::string, std::unique_ptr<web::SiteScript>> sites_;
};

}  // namespace strata::run
