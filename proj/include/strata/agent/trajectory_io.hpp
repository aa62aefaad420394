#pragma once

#include <optional>
#include <string>
#include <vector>

#include "strata/agent/types.hpp"
#include "strata/core/json.hpp"
#include "strata/core/util.hpp"

namespace strata::agent {

// One JSONL file per task run: a header record, one record per step and per
// attempt verdict, an optional replan record, and a footer. Field names are
// stable so external tools can consume the logs.

namespace detail {

inline Json action_to_json(const web::Action& a) {
  Json j;
  j["space"] = web::action_space_name(a.space);
  j["kind"] = web::expanded_kind_name(a.kind);
  j["target"] = a.target ? Json(*a.target) : Json(nullptr);
  j["selector"] = a.selector;
  j["value"] = a.value;
  j["thought"] = a.thought;
  j["description"] = a.description;
  j["index"] = a.index ? Json(*a.index) : Json(nullptr);
  return j;
}

inline web::Action action_from_json(const Json& j) {
  web::Action a;
  a.space = web::parse_action_space(j.value("space", std::string("expanded")));
  if (auto kind = web::lookup_action_kind(j.value("kind", std::string("click")))) a.kind = *kind;
  if (j.contains("target") && !j["target"].is_null()) a.target = j["target"].get<int>();
  a.selector = j.value("selector", std::string());
  a.value = j.value("value", std::string());
  a.thought = j.value("thought", std::string());
  a.description = j.value("description", std::string());
  if (j.contains("index") && !j["index"].is_null()) a.index = j["index"].get<int>();
  return a;
}

inline Json outcome_to_json(const web::StepOutcome& o) {
  Json j;
  j["ok"] = o.ok;
  j["state_changed"] = o.state_changed;
  j["error_class"] = o.error_class ? Json(web::error_class_name(*o.error_class)) : Json(nullptr);
  j["off_site"] = o.off_site;
  j["url"] = o.new_state.url;
  j["is_error_page"] = o.new_state.is_error_page;
  j["cached_data"] = o.cached_data ? Json(*o.cached_data) : Json(nullptr);
  j["final_answer"] = o.final_answer ? Json(*o.final_answer) : Json(nullptr);
  return j;
}

inline web::StepOutcome outcome_from_json(const Json& j) {
  web::StepOutcome o;
  o.ok = j.value("ok", true);
  o.state_changed = j.value("state_changed", false);
  if (j.contains("error_class") && !j["error_class"].is_null()) {
    o.error_class = web::lookup_error_class(j["error_class"].get<std::string>());
  }
  o.off_site = j.value("off_site", false);
  o.new_state.url = j.value("url", std::string());
  o.new_state.is_error_page = j.value("is_error_page", false);
  if (j.contains("cached_data") && !j["cached_data"].is_null())
    o.cached_data = j["cached_data"].get<std::string>();
  if (j.contains("final_answer") && !j["final_answer"].is_null())
    o.final_answer = j["final_answer"].get<std::string>();
  return o;
}

inline Json plan_to_json(const HighLevelPlan& plan) {
  Json j;
  j["representation"] = representation_name(plan.representation);
  j["source"] = plan_source_name(plan.source);
  j["steps"] = plan.step_texts();
  j["domain"] = plan.domain_text;
  return j;
}

inline HighLevelPlan plan_from_json(const Json& j, const std::string& where) {
  HighLevelPlan plan;
  plan.representation = j.value("representation", std::string("nl")) == "pddl"
                            ? Representation::PDDL
                            : Representation::NL;
  std::string source = j.value("source", std::string("model_initial"));
  plan.source = source == "human"            ? PlanSource::Human
                : source == "model_replanned" ? PlanSource::ModelReplanned
                                              : PlanSource::ModelInitial;
  plan.domain_text = j.value("domain", std::string());
  const Json& steps = require_field(j, "steps", where);
  int index = 1;
  for (const Json& step : steps) {
    Subgoal s;
    s.index = index++;
    s.text = step.get<std::string>();
    s.source = plan.source;
    plan.subgoals.push_back(std::move(s));
  }
  return plan;
}

}  // namespace detail

inline constexpr int kTrajectorySchemaVersion = 1;

inline std::string trajectory_to_jsonl(const Trajectory& t) {
  std::string out;
  auto emit = [&out](const Json& j) { out += j.dump() + "\n"; };

  Json header;
  header["type"] = "header";
  header["schema_version"] = kTrajectorySchemaVersion;
  header["task_id"] = t.task.id;
  header["instruction"] = t.task.instruction;
  header["start_url"] = t.task.start_url;
  header["site_domain"] = t.task.site_domain;
  header["site"] = t.task.site;
  header["human_plan"] = t.task.human_plan;
  header["config"] = t.config_snapshot;
  header["plan"] = detail::plan_to_json(t.initial_plan);
  emit(header);

  int replan_at = t.replan_event ? t.replan_event->attempts_before : -1;
  for (size_t i = 0; i < t.attempts.size(); ++i) {
    if (static_cast<int>(i) == replan_at) {
      Json r;
      r["type"] = "replan";
      r["trigger_subgoal"] = t.replan_event->trigger_subgoal;
      r["decision"] = replan_decision_name(t.replan_event->decision);
      r["attempts_before"] = t.replan_event->attempts_before;
      r["new_plan"] = detail::plan_to_json(t.replan_event->new_plan);
      emit(r);
    }
    const SubgoalAttempt& attempt = t.attempts[i];
    for (size_t s = 0; s < attempt.steps.size(); ++s) {
      const Step& step = attempt.steps[s];
      Json j;
      j["type"] = "step";
      j["phase"] = attempt.plan_phase;
      j["subgoal"] = attempt.subgoal.index;
      j["subgoal_text"] = attempt.subgoal.text;
      j["attempt"] = attempt.attempt_number;
      j["step"] = static_cast<int>(s) + 1;
      j["action"] = detail::action_to_json(step.action);
      j["outcome"] = detail::outcome_to_json(step.outcome);
      j["observation"] = step.observation;
      emit(j);
    }
    Json a;
    a["type"] = "attempt";
    a["phase"] = attempt.plan_phase;
    a["subgoal"] = attempt.subgoal.index;
    a["subgoal_text"] = attempt.subgoal.text;
    a["attempt"] = attempt.attempt_number;
    a["steps"] = attempt.steps.size();
    a["verdict"] = attempt.verdict.answer;
    a["explanation"] = attempt.verdict.explanation;
    a["checker_warning"] = attempt.checker_warning;
    emit(a);
  }
  if (t.replan_event && replan_at == static_cast<int>(t.attempts.size())) {
    // replan recorded after the last attempt (run ended right after)
    Json r;
    r["type"] = "replan";
    r["trigger_subgoal"] = t.replan_event->trigger_subgoal;
    r["decision"] = replan_decision_name(t.replan_event->decision);
    r["attempts_before"] = t.replan_event->attempts_before;
    r["new_plan"] = detail::plan_to_json(t.replan_event->new_plan);
    emit(r);
  }

  Json footer;
  footer["type"] = "footer";
  footer["final_verdict"] = Json{{"answer", t.final_verdict.answer},
                                 {"explanation", t.final_verdict.explanation}};
  footer["errors"] = t.errors;
  footer["totals"] = Json{{"attempts", t.attempts.size()},
                          {"steps", [&] {
                             size_t n = 0;
                             for (const auto& a : t.attempts) n += a.steps.size();
                             return n;
                           }()}};
  emit(footer);
  return out;
}

/// Rebuilds a Trajectory from its JSONL record stream. Page snapshots are
/// reduced to the fields the metrics consume (url, error-page flag).
inline Trajectory trajectory_from_jsonl(const std::string& text, const std::string& where) {
  Trajectory t;
  bool saw_header = false, saw_footer = false;
  SubgoalAttempt* open_attempt = nullptr;
  std::vector<Step> pending_steps;

  for (const std::string& line : split_lines(text)) {
    if (trim(line).empty()) continue;
    Json record = parse_json(line, where);
    std::string type = require_string(record, "type", where);
    if (type == "header") {
      saw_header = true;
      if (record.value("schema_version", 0) != kTrajectorySchemaVersion) {
        throw Error(ErrorCode::SchemaError, where + ": unsupported schema_version");
      }
      t.task.id = require_string(record, "task_id", where);
      t.task.instruction = record.value("instruction", std::string());
      t.task.start_url = record.value("start_url", std::string());
      t.task.site_domain = record.value("site_domain", std::string());
      t.task.site = record.value("site", std::string());
      if (record.contains("human_plan")) {
        for (const Json& s : record["human_plan"]) t.task.human_plan.push_back(s.get<std::string>());
      }
      t.config_snapshot = record.value("config", Json::object());
      t.initial_plan = detail::plan_from_json(require_field(record, "plan", where), where);
    } else if (type == "step") {
      Step step;
      step.action = detail::action_from_json(require_field(record, "action", where));
      step.outcome = detail::outcome_from_json(require_field(record, "outcome", where));
      step.observation = record.value("observation", std::string());
      pending_steps.push_back(std::move(step));
    } else if (type == "attempt") {
      SubgoalAttempt attempt;
      attempt.subgoal.index = record.value("subgoal", 1);
      attempt.subgoal.text = record.value("subgoal_text", std::string());
      attempt.plan_phase = record.value("phase", std::string("initial"));
      attempt.attempt_number = record.value("attempt", 1);
      attempt.verdict.answer = record.value("verdict", std::string("NO"));
      attempt.verdict.explanation = record.value("explanation", std::string());
      attempt.checker_warning = record.value("checker_warning", false);
      attempt.steps = std::move(pending_steps);
      pending_steps.clear();
      t.attempts.push_back(std::move(attempt));
      open_attempt = nullptr;
    } else if (type == "replan") {
      ReplanEvent event;
      event.trigger_subgoal = record.value("trigger_subgoal", 0);
      event.decision = record.value("decision", std::string()) == "global_replanning"
                           ? ReplanDecisionKind::GlobalReplanning
                           : ReplanDecisionKind::LocalAdjustment;
      event.attempts_before = record.value("attempts_before", 0);
      event.new_plan = detail::plan_from_json(require_field(record, "new_plan", where), where);
      t.replan_event = std::move(event);
    } else if (type == "footer") {
      saw_footer = true;
      if (record.contains("final_verdict")) {
        t.final_verdict.answer = record["final_verdict"].value("answer", std::string("NO"));
        t.final_verdict.explanation =
            record["final_verdict"].value("explanation", std::string());
      }
      if (record.contains("errors")) {
        for (const Json& e : record["errors"]) t.errors.push_back(e.get<std::string>());
      }
    } else {
      throw Error(ErrorCode::SchemaError, where + ": unknown record type '" + type + "'");
    }
  }
  (void)open_attempt;
  if (!saw_header) throw Error(ErrorCode::SchemaError, where + ": missing header record");
  if (!saw_footer) throw Error(ErrorCode::SchemaError, where + ": missing footer record");
  if (!pending_steps.empty())
    throw Error(ErrorCode::SchemaError, where + ": dangling step records without an attempt");
  return t;
}

}  // namespace strata::agent
