#pragma once

#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "strata/agent/types.hpp"
#include "strata/core/json.hpp"
#include "strata/eval/alignment.hpp"
#include "strata/eval/metrics.hpp"

namespace strata::eval {

struct MetricsBlock {
  std::string representation;  // human | nl | pddl
  std::string phase;           // before | after
  std::vector<std::string> trajectory_ids;
  std::optional<AlignmentRates> alignment;
  ExecutionMetrics execution;
  FailureModeMetrics failures;
};

struct MetricsReport {
  Json metadata;
  std::vector<MetricsBlock> blocks;
  std::vector<std::string> excluded;  // malformed inputs, skipped with a note
};

struct ReportInputs {
  std::vector<agent::Trajectory> trajectories;
  /// validated judgments keyed by (task id, phase name)
  std::map<std::pair<std::string, std::string>, AlignmentJudgment> judgments;
  int repetition_k = 3;
  Json metadata = Json::object();
  std::vector<std::string> excluded;
};

inline MetricsReport build_report(const ReportInputs& inputs) {
  if (inputs.trajectories.empty())
    throw Error(ErrorCode::EmptyInput, "no trajectories to report on");

  // group by representation recorded in each trajectory's config snapshot
  std::map<std::string, std::vector<agent::Trajectory>> groups;
  for (const agent::Trajectory& t : inputs.trajectories) {
    std::string repr = t.config_snapshot.value("representation", std::string("nl"));
    groups[repr].push_back(t);
  }

  MetricsReport report;
  report.metadata = inputs.metadata;
  report.excluded = inputs.excluded;
  for (const auto& [repr, trajectories] : groups) {
    for (Phase phase : {Phase::Before, Phase::After}) {
      MetricsBlock block;
      block.representation = repr;
      block.phase = phase_name(phase);
      for (const agent::Trajectory& t : trajectories)
        block.trajectory_ids.push_back(t.task.id);
      block.execution = compute_execution_metrics(trajectories, phase);
      block.failures = compute_failure_modes(trajectories, phase, inputs.repetition_k);
      std::vector<AlignmentJudgment> judgments;
      for (const agent::Trajectory& t : trajectories) {
        auto it = inputs.judgments.find({t.task.id, block.phase});
        if (it != inputs.judgments.end()) judgments.push_back(it->second);
      }
      if (!judgments.empty()) block.alignment = aggregate_alignment(judgments);
      report.blocks.push_back(std::move(block));
    }
  }
  return report;
}

namespace detail {

inline std::string fmt_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", fraction * 100.0);
  return buf;
}

inline std::string fmt_mean(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", value);
  return buf;
}

inline std::string opt_percent(const std::optional<double>& v) {
  return v ? fmt_percent(*v) : std::string();
}

inline std::string opt_mean(const std::optional<double>& v) {
  return v ? fmt_mean(*v) : std::string();
}

inline Json rate_json(const Rate& r) {
  return Json{{"rate", r.value()}, {"numerator", r.numerator}, {"denominator", r.denominator}};
}

inline Json opt_json(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace detail

inline Json report_to_json(const MetricsReport& report) {
  Json j;
  j["schema_version"] = 1;
  j["metadata"] = report.metadata;
  j["blocks"] = Json::array();
  for (const MetricsBlock& b : report.blocks) {
    Json block;
    block["representation"] = b.representation;
    block["phase"] = b.phase;
    block["count"] = b.trajectory_ids.size();
    block["trajectories"] = b.trajectory_ids;
    if (b.alignment) {
      const AlignmentRates& a = *b.alignment;
      block["alignment"] = Json{{"tasks", a.tasks},
                                {"human_steps", a.human_steps},
                                {"llm_steps", a.llm_steps},
                                {"perfect", a.perfect},
                                {"partial", a.partial},
                                {"missing", a.missing},
                                {"decomposed", a.decomposed},
                                {"matched", a.matched},
                                {"unmatched", a.unmatched}};
    } else {
      block["alignment"] = nullptr;
    }
    const ExecutionMetrics& e = b.execution;
    block["execution"] =
        Json{{"subgoal_completion_rate", detail::opt_json(e.subgoal_completion_rate)},
             {"subgoals_completed", e.subgoals_completed},
             {"subgoals_attempted", e.subgoals_attempted},
             {"plan_completion_rate", detail::opt_json(e.plan_completion_rate)},
             {"plans_completed", e.plans_completed},
             {"plans_total", e.plans_total},
             {"task_success_rate", detail::opt_json(e.task_success_rate)},
             {"tasks_succeeded", e.tasks_succeeded},
             {"plan_efficiency_successful", detail::opt_json(e.plan_efficiency_successful)},
             {"plan_efficiency_all", detail::opt_json(e.plan_efficiency_all)},
             {"mean_subgoals", detail::opt_json(e.mean_subgoals)},
             {"mean_low_level_actions", detail::opt_json(e.mean_low_level_actions)}};
    const FailureModeMetrics& f = b.failures;
    block["failure_modes"] = Json{{"invalid_action", detail::rate_json(f.invalid_action)},
                                  {"hallucinated_link", detail::rate_json(f.hallucinated_link)},
                                  {"repetition_failure", detail::rate_json(f.repetition_failure)},
                                  {"redundancy", detail::rate_json(f.redundancy)},
                                  {"out_of_domain", detail::rate_json(f.out_of_domain)}};
    j["blocks"].push_back(std::move(block));
  }
  j["excluded"] = report.excluded;
  return j;
}

/// Table 2-shaped rows: alignment percentages per (representation, phase).
inline std::string alignment_csv(const MetricsReport& report) {
  std::string out =
      "representation,phase,tasks,human_steps,llm_steps,Perfect Match,Partial,Missing,"
      "Decomposed,Matched,Unmatched\n";
  for (const MetricsBlock& b : report.blocks) {
    out += b.representation + "," + b.phase + ",";
    if (b.alignment) {
      const AlignmentRates& a = *b.alignment;
      out += std::to_string(a.tasks) + "," + std::to_string(a.human_steps) + "," +
             std::to_string(a.llm_steps) + "," + detail::fmt_percent(a.perfect) + "," +
             detail::fmt_percent(a.partial) + "," + detail::fmt_percent(a.missing) + "," +
             detail::fmt_percent(a.decomposed) + "," + detail::fmt_percent(a.matched) + "," +
             detail::fmt_percent(a.unmatched);
    } else {
      out += ",,,,,,,,";
    }
    out += "\n";
  }
  return out;
}

/// Execution metrics rows (Table 3 lengths plus completion/success rates),
/// with both plan-efficiency variants.
inline std::string execution_csv(const MetricsReport& report) {
  std::string out =
      "representation,phase,tasks,Subgoal Completion Rate,Plan Completion Rate,"
      "Task Success Rate,Plan Efficiency (successful tasks),Plan Efficiency (all tasks),"
      "# High-level subgoals,# Low-level actions\n";
  for (const MetricsBlock& b : report.blocks) {
    const ExecutionMetrics& e = b.execution;
    out += b.representation + "," + b.phase + "," + std::to_string(e.plans_total) + "," +
           detail::opt_percent(e.subgoal_completion_rate) + "," +
           detail::opt_percent(e.plan_completion_rate) + "," +
           detail::opt_percent(e.task_success_rate) + "," +
           detail::opt_mean(e.plan_efficiency_successful) + "," +
           detail::opt_mean(e.plan_efficiency_all) + "," + detail::opt_mean(e.mean_subgoals) +
           "," + detail::opt_mean(e.mean_low_level_actions) + "\n";
  }
  return out;
}

/// Failure-mode rows (Tables 4-5): every rate with its numerator and base set.
inline std::string failures_csv(const MetricsReport& report) {
  std::string out =
      "representation,phase,Invalid Action Rate,Invalid Actions,Proposed Actions,"
      "Hallucinated Link Rate,Hallucinated Links,Goto Actions,"
      "Repetition Rate,Repetition Failures,Failed Attempts,"
      "Redundancy Rate,Redundant Actions,Valid Actions,"
      "Out-of-domain Rate,Out-of-domain Actions,All Actions\n";
  auto rate_cells = [](const Rate& r) {
    return detail::fmt_percent(r.value()) + "," + std::to_string(r.numerator) + "," +
           std::to_string(r.denominator);
  };
  for (const MetricsBlock& b : report.blocks) {
    const FailureModeMetrics& f = b.failures;
    out += b.representation + "," + b.phase + "," + rate_cells(f.invalid_action) + "," +
           rate_cells(f.hallucinated_link) + "," + rate_cells(f.repetition_failure) + "," +
           rate_cells(f.redundancy) + "," + rate_cells(f.out_of_domain) + "\n";
  }
  return out;
}

}  // namespace strata::eval
