#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "strata/agent/types.hpp"
#include "strata/core/error.hpp"
#include "strata/llm/backend.hpp"
#include "strata/llm/parse.hpp"

namespace strata::eval {

/// Phase split mirroring the report tables. "Before" attributes a run to its
/// initial plan: attempts are cut at the replan event, and plan-level
/// outcomes count only while the initial plan (or its local adjustment)
/// stays in force -- a globally replanned run abandons its initial plan.
/// "After" covers the full run under the final effective plan.
enum class Phase { Before, After };

inline const char* phase_name(Phase p) { return p == Phase::Before ? "before" : "after"; }

namespace detail {

inline size_t attempts_in_phase(const agent::Trajectory& t, Phase phase) {
  if (phase == Phase::After || !t.replan_event) return t.attempts.size();
  return static_cast<size_t>(t.replan_event->attempts_before);
}

inline bool subgoal_succeeded(const agent::Trajectory& t, const std::string& phase_tag,
                              int index, size_t attempt_limit) {
  for (size_t i = 0; i < attempt_limit && i < t.attempts.size(); ++i) {
    const agent::SubgoalAttempt& a = t.attempts[i];
    if (a.plan_phase == phase_tag && a.subgoal.index == index && a.verdict.yes()) return true;
  }
  return false;
}

/// All subgoals of the plan in force completed. For Before this is the
/// salvaged initial plan (false outright after a global replan).
inline bool plan_completed(const agent::Trajectory& t, Phase phase) {
  using agent::ReplanDecisionKind;
  if (phase == Phase::Before && t.replan_event &&
      t.replan_event->decision == ReplanDecisionKind::GlobalReplanning) {
    return false;
  }
  std::vector<agent::Subgoal> plan = t.effective_subgoals();
  if (plan.empty()) return false;
  for (const agent::Subgoal& s : plan) {
    std::string tag =
        s.source == agent::PlanSource::ModelReplanned ? "replanned" : "initial";
    if (!subgoal_succeeded(t, tag, s.index, t.attempts.size())) return false;
  }
  return true;
}

inline bool task_succeeded(const agent::Trajectory& t, Phase phase) {
  using agent::ReplanDecisionKind;
  if (!t.final_verdict.yes()) return false;
  if (phase == Phase::Before && t.replan_event &&
      t.replan_event->decision == ReplanDecisionKind::GlobalReplanning) {
    return false;
  }
  return true;
}

}  // namespace detail

struct ExecutionMetrics {
  std::optional<double> subgoal_completion_rate;
  size_t subgoals_completed = 0, subgoals_attempted = 0;
  std::optional<double> plan_completion_rate;
  size_t plans_completed = 0, plans_total = 0;
  std::optional<double> task_success_rate;
  size_t tasks_succeeded = 0;
  std::optional<double> plan_efficiency_successful;  // mean actions, completed plans only
  std::optional<double> plan_efficiency_all;         // mean actions, every task
  std::optional<double> mean_subgoals;               // mean plan length
  std::optional<double> mean_low_level_actions;      // mean executed actions
};

inline ExecutionMetrics compute_execution_metrics(
    const std::vector<agent::Trajectory>& trajectories, Phase phase = Phase::After) {
  if (trajectories.empty())
    throw Error(ErrorCode::EmptyInput, "no trajectories");

  ExecutionMetrics m;
  m.plans_total = trajectories.size();
  size_t total_actions = 0, total_plan_len = 0;
  size_t successful_actions = 0, successful_tasks_with_actions = 0;

  for (const agent::Trajectory& t : trajectories) {
    size_t limit = detail::attempts_in_phase(t, phase);

    // distinct subgoal instances attempted within the phase
    std::map<std::pair<std::string, int>, bool> instances;
    size_t actions = 0;
    for (size_t i = 0; i < limit; ++i) {
      const agent::SubgoalAttempt& a = t.attempts[i];
      auto key = std::make_pair(a.plan_phase, a.subgoal.index);
      instances[key] = instances[key] || a.verdict.yes();
      actions += a.steps.size();
    }
    m.subgoals_attempted += instances.size();
    for (const auto& [key, yes] : instances)
      if (yes) ++m.subgoals_completed;

    bool completed = detail::plan_completed(t, phase);
    if (completed) ++m.plans_completed;
    if (detail::task_succeeded(t, phase)) ++m.tasks_succeeded;

    total_actions += actions;
    total_plan_len += phase == Phase::Before ? t.initial_plan.subgoals.size()
                                             : t.effective_subgoals().size();
    if (completed) {
      successful_actions += actions;
      ++successful_tasks_with_actions;
    }
  }

  double n = static_cast<double>(trajectories.size());
  if (m.subgoals_attempted > 0) {
    m.subgoal_completion_rate = static_cast<double>(m.subgoals_completed) /
                                static_cast<double>(m.subgoals_attempted);
  }
  m.plan_completion_rate = static_cast<double>(m.plans_completed) / n;
  m.task_success_rate = static_cast<double>(m.tasks_succeeded) / n;
  if (successful_tasks_with_actions > 0) {
    m.plan_efficiency_successful = static_cast<double>(successful_actions) /
                                   static_cast<double>(successful_tasks_with_actions);
  }
  m.plan_efficiency_all = static_cast<double>(total_actions) / n;
  m.mean_subgoals = static_cast<double>(total_plan_len) / n;
  m.mean_low_level_actions = static_cast<double>(total_actions) / n;
  return m;
}

struct Rate {
  size_t numerator = 0;
  size_t denominator = 0;
  double value() const {
    return denominator == 0 ? 0.0
                            : static_cast<double>(numerator) / static_cast<double>(denominator);
  }
};

struct FailureModeMetrics {
  Rate invalid_action;     // InvalidTarget steps / proposed steps
  Rate hallucinated_link;  // dead goto landings / goto steps
  Rate repetition_failure; // failed attempts with a >k repeated signature / failed attempts
  Rate redundancy;         // valid steps without a state change / valid steps
  Rate out_of_domain;      // off-site steps / all steps
};

/// Five single-pass failure-mode rates. In simulation mode a hallucinated
/// link is a goto landing on the scripted error page; with a judge backend
/// the landing observation is judged instead (live-log mode).
inline FailureModeMetrics compute_failure_modes(
    const std::vector<agent::Trajectory>& trajectories, Phase phase = Phase::After,
    int repetition_k = 3, llm::Backend* judge = nullptr, int retry_r = 2) {
  FailureModeMetrics m;
  for (const agent::Trajectory& t : trajectories) {
    size_t limit = detail::attempts_in_phase(t, phase);
    for (size_t i = 0; i < limit && i < t.attempts.size(); ++i) {
      const agent::SubgoalAttempt& attempt = t.attempts[i];
      std::map<std::string, int> signature_counts;
      for (const agent::Step& step : attempt.steps) {
        ++m.invalid_action.denominator;
        ++m.out_of_domain.denominator;
        bool invalid = step.outcome.error_class == web::ErrorClass::InvalidTarget;
        if (invalid) ++m.invalid_action.numerator;
        if (step.outcome.off_site) ++m.out_of_domain.numerator;
        if (!invalid) {
          ++m.redundancy.denominator;
          if (!step.outcome.state_changed) ++m.redundancy.numerator;
        }
        if (step.action.kind == web::ActionKind::Goto) {
          ++m.hallucinated_link.denominator;
          bool dead;
          if (judge == nullptr) {
            dead = step.outcome.new_state.is_error_page;
          } else {
            llm::Prompt prompt = llm::render(
                "postcondition_expanded",
                {{"task", t.task.instruction},
                 {"executed_action",
                  "goto " + step.action.value +
                      " - verify the destination page loaded and displays information"},
                 {"domain_file", "N/A"},
                 {"web_page", step.observation},
                 {"history", "goto " + step.action.value}});
            auto verdict = std::get<llm::JudgeVerdict>(
                llm::complete_and_parse(*judge, prompt, retry_r));
            dead = !verdict.yes();
          }
          if (dead) ++m.hallucinated_link.numerator;
        }
        ++signature_counts[web::action_signature(step.action)];
      }
      if (!attempt.verdict.yes()) {
        ++m.repetition_failure.denominator;
        for (const auto& [sig, count] : signature_counts) {
          if (count > repetition_k) {
            ++m.repetition_failure.numerator;
            break;
          }
        }
      }
    }
  }
  return m;
}

}  // namespace strata::eval
