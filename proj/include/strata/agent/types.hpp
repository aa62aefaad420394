#pragma once

#include <optional>
#include <string>
#include <vector>

#include "strata/core/json.hpp"
#include "strata/llm/parse.hpp"
#include "strata/pddl/ast.hpp"
#include "strata/web/actions.hpp"

namespace strata::agent {

enum class Representation { NL, PDDL };

inline const char* representation_name(Representation r) {
  return r == Representation::NL ? "nl" : "pddl";
}

enum class PlanSource { Human, ModelInitial, ModelReplanned };

inline const char* plan_source_name(PlanSource s) {
  switch (s) {
    case PlanSource::Human: return "human";
    case PlanSource::ModelInitial: return "model_initial";
    case PlanSource::ModelReplanned: return "model_replanned";
  }
  return "?";
}

struct Subgoal {
  int index = 1;     // 1-based position within its plan
  std::string text;  // NL step text, or the printed PDDL instantiation
  std::optional<pddl::GroundAction> ground;  // set for PDDL subgoals
  PlanSource source = PlanSource::ModelInitial;
};

struct HighLevelPlan {
  Representation representation = Representation::NL;
  PlanSource source = PlanSource::ModelInitial;
  std::vector<Subgoal> subgoals;
  std::string domain_text;                   // raw text fed into prompts (PDDL)
  std::optional<pddl::DomainFile> domain;    // parsed form (PDDL)

  std::vector<std::string> step_texts() const {
    std::vector<std::string> out;
    out.reserve(subgoals.size());
    for (const Subgoal& s : subgoals) out.push_back(s.text);
    return out;
  }
};

struct Step {
  web::Action action;
  web::StepOutcome outcome;
  std::string observation;  // serialized post-action page
};

struct SubgoalAttempt {
  Subgoal subgoal;
  std::string plan_phase = "initial";  // "initial" | "replanned"
  int attempt_number = 1;
  std::vector<Step> steps;
  llm::JudgeVerdict verdict;
  bool checker_warning = false;  // checker reply unparseable, treated as NO
};

enum class ReplanDecisionKind { LocalAdjustment, GlobalReplanning };

inline const char* replan_decision_name(ReplanDecisionKind d) {
  return d == ReplanDecisionKind::LocalAdjustment ? "local_adjustment" : "global_replanning";
}

struct ReplanEvent {
  int trigger_subgoal = 0;  // 1-based index of the failed subgoal
  ReplanDecisionKind decision = ReplanDecisionKind::LocalAdjustment;
  HighLevelPlan new_plan;   // remaining steps (local) or the full new plan (global)
  int attempts_before = 0;  // how many attempts were recorded before the event
};

struct TaskSpec {
  std::string id;
  std::string instruction;
  std::string start_url;
  std::string site_domain;
  std::vector<std::string> human_plan;  // reference plan from key-node annotations
  std::string site;                     // site-script key (file name)
};

struct Trajectory {
  TaskSpec task;
  HighLevelPlan initial_plan;
  std::vector<SubgoalAttempt> attempts;
  std::optional<ReplanEvent> replan_event;
  llm::JudgeVerdict final_verdict;
  Json config_snapshot;              // budgets + run settings, for reproducibility
  std::vector<std::string> errors;   // surfaced stage errors, run continued/NO

  /// Plan in force at the end of the run: the initial plan, its locally
  /// adjusted form (accomplished prefix + replacement tail), or the global
  /// replacement.
  std::vector<Subgoal> effective_subgoals() const {
    if (!replan_event) return initial_plan.subgoals;
    if (replan_event->decision == ReplanDecisionKind::GlobalReplanning)
      return replan_event->new_plan.subgoals;
    std::vector<Subgoal> out;
    for (const Subgoal& s : initial_plan.subgoals) {
      if (s.index >= replan_event->trigger_subgoal) break;
      out.push_back(s);
    }
    for (const Subgoal& s : replan_event->new_plan.subgoals) out.push_back(s);
    return out;
  }
};

struct Budgets {
  int max_attempts = 3;
  int max_actions_per_subgoal = 10;
  int replan_rounds = 1;  // the pipeline supports at most one
  int retry_r = 2;        // re-prompts on malformed model output
  int repetition_k = 3;   // "> k" identical signatures flag a repetition failure
  int history_max_chars = 0;  // 0 = pass full history
  bool reset_on_global_replan = false;
};

inline Json budgets_to_json(const Budgets& b) {
  Json j;
  j["max_attempts"] = b.max_attempts;
  j["max_actions_per_subgoal"] = b.max_actions_per_subgoal;
  j["replan_rounds"] = b.replan_rounds;
  j["retry_r"] = b.retry_r;
  j["repetition_k"] = b.repetition_k;
  j["history_max_chars"] = b.history_max_chars;
  j["reset_on_global_replan"] = b.reset_on_global_replan;
  return j;
}

inline Budgets budgets_from_json(const Json& j) {
  Budgets b;
  if (j.contains("max_attempts")) b.max_attempts = j["max_attempts"].get<int>();
  if (j.contains("max_actions_per_subgoal"))
    b.max_actions_per_subgoal = j["max_actions_per_subgoal"].get<int>();
  if (j.contains("replan_rounds")) b.replan_rounds = j["replan_rounds"].get<int>();
  if (j.contains("retry_r")) b.retry_r = j["retry_r"].get<int>();
  if (j.contains("repetition_k")) b.repetition_k = j["repetition_k"].get<int>();
  if (j.contains("history_max_chars")) b.history_max_chars = j["history_max_chars"].get<int>();
  if (j.contains("reset_on_global_replan"))
    b.reset_on_global_replan = j["reset_on_global_replan"].get<bool>();
  return b;
}

struct RoleBackends {
  llm::Backend* planner = nullptr;
  llm::Backend* executor = nullptr;
  llm::Backend* checker = nullptr;
  llm::Backend* judge = nullptr;
};

struct RunSettings {
  Representation representation = Representation::NL;
  bool use_human_plan = false;
  web::ActionSpace action_space = web::ActionSpace::Expanded;
  Budgets budgets;
  uint64_t seed = 0;
};

}  // namespace strata::agent
