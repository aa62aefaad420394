#pragma once

#include <atomic>
#include <filesystem>
#include <mutex>
#include <thread>
#include <vector>

#include "strata/agent/runner.hpp"
#include "strata/agent/trajectory_io.hpp"
#include "strata/eval/alignment.hpp"
#include "strata/run/config.hpp"

namespace strata::run {

struct BatchResult {
  std::filesystem::path run_dir;
  int executed = 0;
  int skipped = 0;
  int failed = 0;  // tasks whose trajectory records a stage error
};

namespace detail {

inline bool trajectory_file_complete(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return false;
  try {
    (void)agent::trajectory_from_jsonl(read_text_file(path), path.string());
    return true;
  } catch (const Error&) {
    return false;  // partial or corrupt: redo the task
  }
}

/// Judges the plan against the human reference and writes the judgment
/// artifact. Judge errors are surfaced on the trajectory, not thrown.
inline void judge_and_store(llm::Backend& judge, const agent::TaskSpec& task,
                            const std::vector<std::string>& llm_steps,
                            const std::string& phase, const agent::Budgets& budgets,
                            const std::filesystem::path& alignments_dir,
                            agent::Trajectory& trajectory) {
  if (task.human_plan.empty() || llm_steps.empty()) return;
  try {
    eval::AlignmentJudgment judgment = eval::judge_alignment(
        judge, task.instruction, task.human_plan, llm_steps, budgets.retry_r);
    Json artifact;
    artifact["schema_version"] = 1;
    artifact["task_id"] = task.id;
    artifact["phase"] = phase;
    artifact["human_plan"] = task.human_plan;
    artifact["llm_plan"] = llm_steps;
    artifact["judgment"] = eval::judgment_to_json(judgment);
    write_text_file(alignments_dir / (task.id + "." + phase + ".json"),
                    artifact.dump(2) + "\n");
  } catch (const Error& e) {
    trajectory.errors.push_back("alignment judging (" + phase + ") failed: " + e.what());
  }
}

}  // namespace detail

/// Executes every task in the config at the configured concurrency.
/// Completed tasks (valid trajectory file present) are skipped, so reruns
/// over a half-finished directory resume idempotently.
inline BatchResult run_batch(const RunConfig& config) {
  namespace fs = std::filesystem;
  BatchResult result;
  result.run_dir = config.output_dir;
  fs::create_directories(result.run_dir / "trajectories");
  fs::create_directories(result.run_dir / "alignments");

  TaskFile task_file = load_task_file(config.tasks_path, config.sites_dir);
  BackendSet backends(config);
  SiteCache sites(config.sites_dir);
  agent::RunSettings settings = config.settings();

  Json manifest;
  manifest["schema_version"] = 1;
  manifest["config"] = config.to_json();
  manifest["representation"] = config.representation;
  manifest["action_space"] = config.action_space;
  manifest["budgets"] = agent::budgets_to_json(config.budgets);
  manifest["seed"] = config.seed;
  manifest["task_ids"] = Json::array();
  for (const agent::TaskSpec& t : task_file.tasks) manifest["task_ids"].push_back(t.id);
  write_text_file(result.run_dir / "manifest.json", manifest.dump(2) + "\n");

  std::atomic<size_t> next{0};
  std::atomic<int> executed{0}, skipped{0}, failed{0};
  std::mutex error_mutex;
  std::vector<std::string> infra_errors;

  auto worker = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= task_file.tasks.size()) return;
      const agent::TaskSpec& task = task_file.tasks[i];
      fs::path out_path = result.run_dir / "trajectories" / (task.id + ".jsonl");
      if (detail::trajectory_file_complete(out_path)) {
        ++skipped;
        continue;
      }
      try {
        const web::SiteScript& site = sites.get(task.site);
        BackendSet::TaskBackends task_backends = backends.for_task(task.id);
        agent::Trajectory trajectory =
            agent::run_task(task, site, task_backends.roles, settings);

        if (config.representation != "human") {
          detail::judge_and_store(*task_backends.roles.judge, task,
                                  trajectory.initial_plan.step_texts(), "before",
                                  config.budgets, result.run_dir / "alignments", trajectory);
          if (trajectory.replan_event) {
            std::vector<std::string> effective;
            for (const agent::Subgoal& s : trajectory.effective_subgoals())
              effective.push_back(s.text);
            detail::judge_and_store(*task_backends.roles.judge, task, effective, "after",
                                    config.budgets, result.run_dir / "alignments", trajectory);
          }
        }
        if (!trajectory.errors.empty()) ++failed;
        write_text_file(out_path, agent::trajectory_to_jsonl(trajectory));
        ++executed;
      } catch (const std::exception& e) {
        // unexpected infrastructure failure: record it in-band so the batch
        // can continue and the rerun can retry
        agent::Trajectory stub;
        stub.task = task;
        stub.errors.push_back(std::string("task run failed: ") + e.what());
        stub.final_verdict = llm::JudgeVerdict{"NO", "task run failed"};
        Json snapshot;
        snapshot["representation"] = config.representation;
        snapshot["action_space"] = config.action_space;
        snapshot["budgets"] = agent::budgets_to_json(config.budgets);
        snapshot["seed"] = config.seed;
        stub.config_snapshot = snapshot;
        write_text_file(out_path, agent::trajectory_to_jsonl(stub));
        ++executed;
        ++failed;
        std::lock_guard lock(error_mutex);
        infra_errors.push_back(task.id + ": " + e.what());
      }
    }
  };

  size_t width = std::min<size_t>(static_cast<size_t>(config.concurrency),
                                  std::max<size_t>(task_file.tasks.size(), 1));
  std::vector<std::thread> pool;
  for (size_t i = 0; i < width; ++i) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  result.executed = executed;
  result.skipped = skipped;
  result.failed = failed;
  return result;
}

}  // namespace strata::run
