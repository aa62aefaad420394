#pragma once

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include "strata/agent/trajectory_io.hpp"
#include "strata/eval/report.hpp"
#include "strata/run/config.hpp"

namespace strata::run {

struct EvaluateResult {
  eval::MetricsReport report;
  std::filesystem::path report_path;
};

/// Consumes a run directory (manifest + trajectory JSONL + alignment
/// judgments), writes report.json and tables/*.csv into it, and returns the
/// report. Malformed inputs are excluded and listed in the report metadata.
inline EvaluateResult evaluate_run_dir(const std::filesystem::path& run_dir) {
  namespace fs = std::filesystem;
  if (!fs::exists(run_dir / "manifest.json")) {
    throw Error(ErrorCode::ConfigError, "run directory has no manifest.json")
        .with_path(run_dir.string());
  }
  Json manifest = parse_json(read_text_file(run_dir / "manifest.json"), "manifest.json");

  eval::ReportInputs inputs;
  inputs.repetition_k = manifest.contains("budgets")
                            ? agent::budgets_from_json(manifest["budgets"]).repetition_k
                            : 3;

  std::vector<fs::path> trajectory_files;
  if (fs::is_directory(run_dir / "trajectories")) {
    for (const auto& entry : fs::directory_iterator(run_dir / "trajectories")) {
      if (entry.path().extension() == ".jsonl") trajectory_files.push_back(entry.path());
    }
  }
  std::sort(trajectory_files.begin(), trajectory_files.end());
  for (const fs::path& file : trajectory_files) {
    try {
      inputs.trajectories.push_back(
          agent::trajectory_from_jsonl(read_text_file(file), file.filename().string()));
    } catch (const Error& e) {
      inputs.excluded.push_back(file.filename().string() + ": " + e.what());
    }
  }
  if (inputs.trajectories.empty()) {
    throw Error(ErrorCode::EmptyInput, "no trajectories in run directory")
        .with_path(run_dir.string());
  }

  if (fs::is_directory(run_dir / "alignments")) {
    std::vector<fs::path> judgment_files;
    for (const auto& entry : fs::directory_iterator(run_dir / "alignments")) {
      if (entry.path().extension() == ".json") judgment_files.push_back(entry.path());
    }
    std::sort(judgment_files.begin(), judgment_files.end());
    for (const fs::path& file : judgment_files) {
      std::string name = file.filename().string();
      try {
        Json doc = parse_json(read_text_file(file), name);
        std::string task_id = require_string(doc, "task_id", name);
        std::string phase = require_string(doc, "phase", name);
        eval::AlignmentJudgment judgment =
            eval::judgment_from_json(require_field(doc, "judgment", name), name);
        size_t human_steps = require_field(doc, "human_plan", name).size();
        size_t llm_steps = require_field(doc, "llm_plan", name).size();
        eval::validate_judgment(judgment, human_steps, llm_steps);
        inputs.judgments[{task_id, phase}] = std::move(judgment);
      } catch (const Error& e) {
        inputs.excluded.push_back(name + ": " + e.what());
      }
    }
  }

  inputs.metadata["representation"] = manifest.value("representation", "nl");
  inputs.metadata["action_space"] = manifest.value("action_space", "expanded");
  inputs.metadata["seed"] = manifest.value("seed", 0);
  inputs.metadata["trajectories"] = inputs.trajectories.size();

  eval::MetricsReport report = eval::build_report(inputs);

  fs::create_directories(run_dir / "tables");
  write_text_file(run_dir / "report.json", eval::report_to_json(report).dump(2) + "\n");
  write_text_file(run_dir / "tables" / "alignment.csv", eval::alignment_csv(report));
  write_text_file(run_dir / "tables" / "execution.csv", eval::execution_csv(report));
  write_text_file(run_dir / "tables" / "failures.csv", eval::failures_csv(report));

  return EvaluateResult{std::move(report), run_dir / "report.json"};
}

}  // namespace strata::run
