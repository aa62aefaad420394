#pragma once

#include <map>
#include <string>
#include <vector>

#include "strata/agent/types.hpp"
#include "strata/llm/backend.hpp"
#include "strata/llm/parse.hpp"
#include "strata/pddl/consistency.hpp"
#include "strata/pddl/parser.hpp"
#include "strata/web/env.hpp"

namespace strata::agent {

namespace detail {

inline const char* kExpandedFormatDescription =
    "Each action in the history is a JSON object with the keys \"thought\", \"action\", "
    "\"action_input\", \"element_id\" and \"description\", followed by whether it was "
    "successful and an observation of the webpage state after the action was executed.";

inline const char* kPrimitiveFormatDescription =
    "Each action in the history is a JSON object with the keys \"INDEX\", \"ACTION\", "
    "\"SELECTOR\", \"VALUE\" and \"TEXT\", followed by whether it was successful and an "
    "observation of the webpage state after the action was executed.";

inline const char* kActionObjectAvailability =
    "(not restricted to a list: output a full CLICK/TYPE/SELECT/HOVER action object "
    "targeting an element visible in the accessibility tree, with SELECTOR \"id=<element_id>\")";

inline std::string action_wire_json(const web::Action& action) {
  Json j;
  if (action.space == web::ActionSpace::Expanded) {
    j["thought"] = action.thought;
    j["action"] = web::expanded_kind_name(action.kind);
    j["action_input"] = action.value;
    j["element_id"] = action.target ? std::to_string(*action.target) : "";
    j["description"] = action.description;
  } else {
    j["INDEX"] = action.index ? Json(*action.index) : Json("");
    j["ACTION"] = web::primitive_kind_name(action.kind);
    j["SELECTOR"] = action.selector;
    j["VALUE"] = action.value;
    j["TEXT"] = action.description;
  }
  return j.dump();
}

inline std::string step_result_text(const web::StepOutcome& outcome) {
  if (outcome.ok && !outcome.error_class) return "SUCCESS";
  if (outcome.ok) return std::string("SUCCESS (") + web::error_class_name(*outcome.error_class) + ")";
  return std::string("FAILED (") + web::error_class_name(*outcome.error_class) + ")";
}

inline std::string history_entry(size_t n, const web::Action& action,
                                 const web::StepOutcome& outcome,
                                 const std::string& observation) {
  return std::to_string(n) + ". " + action_wire_json(action) + "\nResult: " +
         step_result_text(outcome) + "\nObservation:\n" + observation;
}

inline std::string format_history(const std::vector<std::string>& entries, int max_chars) {
  if (entries.empty()) return "(no actions yet)";
  std::string text;
  for (size_t i = 0; i < entries.size(); ++i) {
    if (i) text += "\n\n";
    text += entries[i];
  }
  if (max_chars > 0 && text.size() > static_cast<size_t>(max_chars)) {
    text = "[truncated]\n" + text.substr(text.size() - static_cast<size_t>(max_chars));
  }
  return text;
}

inline std::string numbered(const std::vector<std::string>& items) {
  if (items.empty()) return "(none)";
  std::string out;
  for (size_t i = 0; i < items.size(); ++i) {
    if (i) out += "\n";
    out += std::to_string(i + 1) + ". " + items[i];
  }
  return out;
}

inline std::string available_actions_text(const std::vector<web::Action>& actions,
                                          const web::PageState& page) {
  std::string out;
  for (size_t i = 0; i < actions.size(); ++i) {
    const web::Action& a = actions[i];
    const web::Element* e = a.target ? web::find_element(page.root, *a.target) : nullptr;
    Json j;
    j["INDEX"] = a.index ? *a.index : static_cast<int>(i) + 1;
    j["ACTION"] = web::primitive_kind_name(a.kind);
    j["SELECTOR"] = a.selector;
    j["VALUE"] = "";
    j["TEXT"] = e ? e->text : "";
    j["EXPLANATION"] = "";
    if (i) out += "\n";
    out += j.dump();
  }
  if (actions.empty()) out = "(no actions available on this page)";
  return out;
}

/// Resolves an ActionObject reply onto the current page: "id=N" selectors
/// first, then "text='...'" selectors, then the TEXT field. An unresolved
/// target flows through apply_action as InvalidTarget.
inline void resolve_action_object_target(web::Action& action, const web::PageState& page) {
  if (action.target) return;
  std::string selector = trim(action.selector);
  if (selector.rfind("id=", 0) == 0) {
    try {
      action.target = std::stoi(selector.substr(3));
      return;
    } catch (...) {
    }
  }
  std::string wanted;
  size_t open = selector.find("text='");
  if (open != std::string::npos) {
    size_t close = selector.rfind('\'');
    if (close > open + 6) wanted = selector.substr(open + 6, close - open - 6);
  }
  if (wanted.empty()) wanted = action.description;  // TEXT field
  if (wanted.empty()) return;
  const web::Element* hit = nullptr;
  web::visit_elements(page.root, [&](const web::Element& e, int depth) {
    if (depth > 0 && hit == nullptr && e.text == wanted) hit = &e;
  });
  if (hit) action.target = hit->id;
}

}  // namespace detail

struct ExecContext {
  const TaskSpec* task = nullptr;
  const HighLevelPlan* plan = nullptr;  // plan in force
  std::vector<std::string> accomplished;
  std::vector<std::string> history;  // formatted action-history entries
  web::ActionSpace space = web::ActionSpace::Expanded;
  Budgets budgets;
};

/// High-level planning: NL prompt, or PDDL prompt plus a generated domain
/// file validated by check_consistency (one domain regeneration, then
/// InconsistentPlan).
inline HighLevelPlan generate_plan(llm::Backend& planner, const TaskSpec& task,
                                   Representation representation,
                                   const std::string& observation, const Budgets& budgets) {
  HighLevelPlan plan;
  plan.representation = representation;
  plan.source = PlanSource::ModelInitial;
  if (representation == Representation::NL) {
    llm::Prompt prompt = llm::render("nl_plan", {{"task", task.instruction},
                                                 {"web_page", observation}});
    auto parsed = std::get<llm::NlPlan>(llm::complete_and_parse(planner, prompt, budgets.retry_r));
    for (size_t i = 0; i < parsed.steps.size(); ++i) {
      plan.subgoals.push_back(Subgoal{static_cast<int>(i) + 1, parsed.steps[i], std::nullopt,
                                      PlanSource::ModelInitial});
    }
    return plan;
  }

  llm::Prompt prompt = llm::render("pddl_plan", {{"task", task.instruction},
                                                 {"web_page", observation}});
  auto parsed = std::get<llm::PddlPlanText>(llm::complete_and_parse(planner, prompt, budgets.retry_r));
  std::vector<pddl::GroundAction> actions = pddl::parse_plan(parsed.text);
  for (size_t i = 0; i < actions.size(); ++i) {
    plan.subgoals.push_back(Subgoal{static_cast<int>(i) + 1, pddl::print_action(actions[i]),
                                    actions[i], PlanSource::ModelInitial});
  }

  llm::Prompt domain_prompt = llm::render(
      "pddl_domain", {{"task", task.instruction}, {"high_level_plan", parsed.text}});
  llm::Prompt current = domain_prompt;
  for (int round = 0;; ++round) {
    auto domain_text =
        std::get<llm::DomainText>(llm::complete_and_parse(planner, current, budgets.retry_r));
    pddl::DomainFile domain = pddl::parse_domain(domain_text.text);
    std::string failure;
    try {
      pddl::ConsistencyReport report = pddl::check_consistency(domain, actions);
      if (report.valid) {
        plan.domain = std::move(domain);
        plan.domain_text = domain_text.text;
        return plan;
      }
      failure = "plan is inconsistent at step " +
                std::to_string(report.failed_step.value_or(0)) + " (unmet:";
      for (const std::string& fact : report.unmet) failure += " " + fact;
      failure += ")";
    } catch (const Error& e) {
      failure = e.message();
    }
    if (round >= 1) {
      throw Error(ErrorCode::InconsistentPlan,
                  "generated domain leaves the plan inconsistent: " + failure);
    }
    current = domain_prompt;
    current.slots["__retry"] = "1";
    current.text = domain_prompt.text +
                   "\n\nThe previous domain file was rejected: " + failure +
                   "\nGenerate a corrected domain file.";
  }
}

/// One postcondition check over the action history and current page.
/// An unparseable checker reply (after retries) counts as NO with a warning.
inline std::pair<llm::JudgeVerdict, bool> check_postcondition(
    llm::Backend& checker, const Subgoal& subgoal, const ExecContext& ctx,
    const std::string& observation) {
  const char* template_name =
      ctx.space == web::ActionSpace::Expanded ? "postcondition_expanded" : "postcondition_id";
  std::map<std::string, std::string> slots = {
      {"task", ctx.task->instruction},
      {"executed_action", subgoal.text},
      {"domain_file", ctx.plan->domain_text.empty() ? "N/A" : ctx.plan->domain_text},
      {"web_page", observation},
      {"history", detail::format_history(ctx.history, ctx.budgets.history_max_chars)},
  };
  try {
    auto verdict = std::get<llm::JudgeVerdict>(llm::complete_and_parse(
        checker, llm::render(template_name, slots), ctx.budgets.retry_r));
    return {verdict, false};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ParseFailure) throw;
    return {llm::JudgeVerdict{"NO", "postcondition checker reply unparseable; treated as NO"},
            true};
  }
}

/// Low-level execution loop for one subgoal: propose an action, apply it,
/// check the postcondition, until YES or the step budget runs out.
inline SubgoalAttempt execute_subgoal(llm::Backend& executor, llm::Backend& checker,
                                      web::Session& session, const Subgoal& subgoal,
                                      ExecContext& ctx, int attempt_number,
                                      const std::string& plan_phase) {
  SubgoalAttempt attempt;
  attempt.subgoal = subgoal;
  attempt.attempt_number = attempt_number;
  attempt.plan_phase = plan_phase;
  attempt.verdict = llm::JudgeVerdict{"NO", "no actions executed"};

  for (int t = 0; t < ctx.budgets.max_actions_per_subgoal; ++t) {
    std::string observation = web::serialize_observation(session.state());
    std::string history_text = detail::format_history(ctx.history, ctx.budgets.history_max_chars);
    std::string domain_text = ctx.plan->domain_text.empty() ? "N/A" : ctx.plan->domain_text;

    web::Action action;
    std::vector<web::Action> available;
    try {
      if (ctx.space == web::ActionSpace::Expanded) {
        llm::Prompt prompt = llm::render("lowlevel_expanded", {{"subgoal", subgoal.text},
                                                               {"history", history_text},
                                                               {"web_page", observation}});
        action = std::get<llm::LowLevelAction>(
                     llm::complete_and_parse(executor, prompt, ctx.budgets.retry_r))
                     .action;
      } else {
        available = web::enumerate_actions(session.state());
        std::string available_text =
            ctx.space == web::ActionSpace::ActionId
                ? detail::available_actions_text(available, session.state())
                : detail::kActionObjectAvailability;
        llm::Prompt prompt = llm::render(
            "lowlevel_action_id",
            {{"web_page", observation},
             {"history", history_text},
             {"domain_file", domain_text},
             {"subgoals_accomplished", detail::numbered(ctx.accomplished)},
             {"subgoal", subgoal.text},
             {"available_actions", available_text}});
        action = std::get<llm::LowLevelAction>(
                     llm::complete_and_parse(executor, prompt, ctx.budgets.retry_r))
                     .action;
        action.space = ctx.space;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ParseFailure) throw;
      // Unusable executor output consumes the step without touching the page.
      web::StepOutcome outcome;
      outcome.ok = false;
      outcome.new_state = session.state();
      outcome.error_class = web::ErrorClass::InvalidTarget;
      outcome.off_site =
          registrable_domain(session.state().url) != session.site().site_domain;
      web::Action unparsed;
      unparsed.space = ctx.space;
      unparsed.description = "unparseable executor reply";
      std::string obs_after = web::serialize_observation(session.state());
      attempt.steps.push_back(Step{unparsed, outcome, obs_after});
      ctx.history.push_back(
          detail::history_entry(ctx.history.size() + 1, unparsed, outcome, obs_after));
      continue;
    }

    web::StepOutcome outcome;
    if (ctx.space == web::ActionSpace::ActionId) {
      // Only listed indices are accepted; value (and explanation) may be
      // overridden by the model.
      if (action.index && *action.index >= 1 &&
          *action.index <= static_cast<int>(available.size())) {
        web::Action chosen = available[static_cast<size_t>(*action.index - 1)];
        chosen.value = action.value;
        chosen.thought = action.thought;
        outcome = session.step(chosen);
        action = chosen;
      } else {
        outcome.ok = false;
        outcome.new_state = session.state();
        outcome.state_changed = false;
        outcome.error_class = web::ErrorClass::InvalidTarget;
        outcome.off_site =
            registrable_domain(session.state().url) != session.site().site_domain;
      }
    } else {
      if (ctx.space == web::ActionSpace::ActionObject) {
        detail::resolve_action_object_target(action, session.state());
      }
      outcome = session.step(action);
    }

    std::string obs_after = web::serialize_observation(outcome.new_state);
    attempt.steps.push_back(Step{action, outcome, obs_after});
    ctx.history.push_back(
        detail::history_entry(ctx.history.size() + 1, action, outcome, obs_after));

    auto [verdict, warning] = check_postcondition(checker, subgoal, ctx, obs_after);
    attempt.verdict = verdict;
    attempt.checker_warning = attempt.checker_warning || warning;
    if (verdict.yes()) break;
  }
  return attempt;
}

struct ReplanOutcome {
  ReplanDecisionKind decision = ReplanDecisionKind::LocalAdjustment;
  HighLevelPlan new_plan;
};

/// Single-round replanning. Salvageable YES keeps the accomplished prefix
/// and returns only the remaining steps; NO returns a full replacement plan.
inline ReplanOutcome replan(llm::Backend& planner, const TaskSpec& task,
                            const HighLevelPlan& plan_in_force, const Subgoal& failed,
                            int failed_attempts, ExecContext& ctx,
                            const std::string& observation) {
  std::string plan_context =
      "Original high-level plan:\n" + detail::numbered(plan_in_force.step_texts()) +
      "\n\nSubgoals already completed successfully:\n" + detail::numbered(ctx.accomplished);
  std::string history_text =
      "History of actions performed so far:\n" +
      detail::format_history(ctx.history, ctx.budgets.history_max_chars);
  std::string failure_context = "The subgoal that failed: " + failed.text + " (after " +
                                std::to_string(failed_attempts) + " attempt(s))";
  llm::Prompt prompt = llm::render("replanning", {{"plan_context", plan_context},
                                                  {"history_text", history_text},
                                                  {"failure_context", failure_context},
                                                  {"web_page", observation},
                                                  {"task", task.instruction}});
  auto decision = std::get<llm::ReplanDecision>(
      llm::complete_and_parse(planner, prompt, ctx.budgets.retry_r));

  ReplanOutcome outcome;
  outcome.decision = decision.salvageable ? ReplanDecisionKind::LocalAdjustment
                                          : ReplanDecisionKind::GlobalReplanning;
  outcome.new_plan.representation = plan_in_force.representation;
  outcome.new_plan.source = PlanSource::ModelReplanned;
  outcome.new_plan.domain = plan_in_force.domain;
  outcome.new_plan.domain_text = plan_in_force.domain_text;
  for (size_t i = 0; i < decision.steps.size(); ++i) {
    Subgoal subgoal;
    subgoal.index = static_cast<int>(i) + 1;
    subgoal.text = decision.steps[i];
    subgoal.source = PlanSource::ModelReplanned;
    if (plan_in_force.representation == Representation::PDDL) {
      std::vector<pddl::GroundAction> parsed = pddl::parse_plan(decision.steps[i]);
      if (parsed.size() != 1) {
        throw Error(ErrorCode::ParseFailure,
                    "replanned PDDL step is not a single action instantiation")
            .with_raw(decision.steps[i]);
      }
      subgoal.ground = parsed[0];
      subgoal.text = pddl::print_action(parsed[0]);
    }
    outcome.new_plan.subgoals.push_back(std::move(subgoal));
  }
  return outcome;
}

/// The full three-stage pipeline for one task. Stage errors never abort:
/// they are recorded on the trajectory and the run ends with verdict NO.
inline Trajectory run_task(const TaskSpec& task, const web::SiteScript& site,
                           const RoleBackends& backends, const RunSettings& settings) {
  Trajectory trajectory;
  trajectory.task = task;

  Json snapshot;
  snapshot["representation"] =
      settings.use_human_plan ? "human" : representation_name(settings.representation);
  snapshot["action_space"] = web::action_space_name(settings.action_space);
  snapshot["budgets"] = budgets_to_json(settings.budgets);
  snapshot["seed"] = settings.seed;
  trajectory.config_snapshot = snapshot;

  const web::PageState* start = site.find_page(task.start_url);
  if (start == nullptr) {
    trajectory.errors.push_back("start_url is not scripted: " + task.start_url);
    trajectory.final_verdict = llm::JudgeVerdict{"NO", "run aborted: start page missing"};
    return trajectory;
  }
  web::Session session(site, *start);
  ExecContext ctx;
  ctx.task = &task;
  ctx.space = settings.action_space;
  ctx.budgets = settings.budgets;

  // Stage 1: high-level planning (or the human reference plan).
  try {
    if (settings.use_human_plan) {
      trajectory.initial_plan.representation = Representation::NL;
      trajectory.initial_plan.source = PlanSource::Human;
      for (size_t i = 0; i < task.human_plan.size(); ++i) {
        trajectory.initial_plan.subgoals.push_back(Subgoal{
            static_cast<int>(i) + 1, task.human_plan[i], std::nullopt, PlanSource::Human});
      }
    } else {
      trajectory.initial_plan =
          generate_plan(*backends.planner, task, settings.representation,
                        web::serialize_observation(session.state()), settings.budgets);
    }
  } catch (const Error& e) {
    trajectory.errors.push_back(std::string("planning failed: ") + e.what());
    trajectory.final_verdict = llm::JudgeVerdict{"NO", "high-level planning failed"};
    return trajectory;
  }

  // Stage 2 + 3: execution with postcondition checks and one replan round.
  const HighLevelPlan* plan_in_force = &trajectory.initial_plan;
  ctx.plan = plan_in_force;
  size_t next_subgoal = 0;
  int replan_rounds_left = settings.budgets.replan_rounds;
  bool aborted = false;

  while (!aborted && next_subgoal < plan_in_force->subgoals.size()) {
    const Subgoal& subgoal = plan_in_force->subgoals[next_subgoal];
    std::string phase =
        plan_in_force->source == PlanSource::ModelReplanned ? "replanned" : "initial";
    bool succeeded = false;
    int attempts_made = 0;
    for (int attempt = 1; attempt <= settings.budgets.max_attempts; ++attempt) {
      SubgoalAttempt record = execute_subgoal(*backends.executor, *backends.checker, session,
                                              subgoal, ctx, attempt, phase);
      attempts_made = attempt;
      bool yes = record.verdict.yes();
      trajectory.attempts.push_back(std::move(record));
      if (yes) {
        succeeded = true;
        break;
      }
    }
    if (succeeded) {
      ctx.accomplished.push_back(subgoal.text);
      ++next_subgoal;
      continue;
    }
    if (replan_rounds_left <= 0) break;  // failure after the replan round: stop executing
    --replan_rounds_left;
    try {
      ReplanOutcome outcome =
          replan(*backends.planner, task, *plan_in_force, subgoal, attempts_made, ctx,
                 web::serialize_observation(session.state()));
      ReplanEvent event;
      event.trigger_subgoal = subgoal.index;
      event.decision = outcome.decision;
      event.new_plan = std::move(outcome.new_plan);
      event.attempts_before = static_cast<int>(trajectory.attempts.size());
      trajectory.replan_event = std::move(event);
      if (trajectory.replan_event->decision == ReplanDecisionKind::GlobalReplanning) {
        ctx.accomplished.clear();
        if (settings.budgets.reset_on_global_replan) session.reset(*start);
      }
      plan_in_force = &trajectory.replan_event->new_plan;
      ctx.plan = plan_in_force;
      next_subgoal = 0;
    } catch (const Error& e) {
      trajectory.errors.push_back(std::string("replanning failed: ") + e.what());
      aborted = true;
    }
  }

  // Final end-to-end verdict over the full action history.
  try {
    const char* format_description = settings.action_space == web::ActionSpace::Expanded
                                         ? detail::kExpandedFormatDescription
                                         : detail::kPrimitiveFormatDescription;
    llm::Prompt prompt = llm::render(
        "e2e_eval",
        {{"action_format_description", format_description},
         {"task", task.instruction},
         {"action_history",
          detail::format_history(ctx.history, settings.budgets.history_max_chars)},
         {"web_page", web::serialize_observation(session.state())}});
    trajectory.final_verdict = std::get<llm::JudgeVerdict>(
        llm::complete_and_parse(*backends.judge, prompt, settings.budgets.retry_r));
  } catch (const Error& e) {
    trajectory.errors.push_back(std::string("final evaluation failed: ") + e.what());
    trajectory.final_verdict = llm::JudgeVerdict{"NO", "final evaluation failed"};
  }
  return trajectory;
}

}  // namespace strata::agent
