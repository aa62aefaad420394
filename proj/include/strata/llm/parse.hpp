#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "strata/core/json.hpp"
#include "strata/core/util.hpp"
#include "strata/eval/alignment_types.hpp"
#include "strata/llm/backend.hpp"
#include "strata/pddl/parser.hpp"
#include "strata/web/actions.hpp"

namespace strata::llm {

struct NlPlan {
  std::vector<std::string> steps;
};

struct PddlPlanText {
  std::string text;  // numbered s-expression lines, one action per line
};

struct DomainText {
  std::string text;
};

struct LowLevelAction {
  web::Action action;
};

struct JudgeVerdict {
  std::string answer;  // "YES" | "NO"
  std::string explanation;
  bool yes() const { return answer == "YES"; }
};

struct ReplanDecision {
  bool salvageable = false;
  std::vector<std::string> steps;  // proposed plan lines, representation-agnostic
};

using ParsedResponse = std::variant<NlPlan, PddlPlanText, DomainText, LowLevelAction,
                                    JudgeVerdict, ReplanDecision, eval::AlignmentJudgment>;

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& message, const std::string& raw) {
  throw Error(ErrorCode::ParseFailure, message).with_raw(raw);
}

inline std::string strip_code_fences(std::string_view raw) {
  std::string text = trim(raw);
  if (text.rfind("```", 0) == 0) {
    size_t first_newline = text.find('\n');
    if (first_newline != std::string::npos) {
      size_t closing = text.rfind("```");
      if (closing > first_newline) {
        text = trim(text.substr(first_newline + 1, closing - first_newline - 1));
      }
    }
  }
  return text;
}

inline Json strict_json_object(const std::string& raw) {
  std::string text = strip_code_fences(raw);
  Json parsed = Json::parse(text, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object()) {
    parse_fail("response is not a JSON object", raw);
  }
  return parsed;
}

/// Collects "N. text" / "N) text" items following the given header.
inline std::vector<std::string> numbered_items_after(const std::string& raw,
                                                     std::string_view header) {
  size_t at = find_ci(raw, header);
  if (at == std::string::npos) parse_fail("missing '" + std::string(header) + "' header", raw);
  size_t colon = raw.find(':', at + header.size() - 1);
  std::string rest = colon == std::string::npos ? raw.substr(at + header.size())
                                                : raw.substr(colon + 1);
  std::vector<std::string> items;
  for (const std::string& line : split_lines(rest)) {
    std::string_view t = trim_view(line);
    if (t.empty()) {
      if (items.empty()) continue;
      break;
    }
    size_t d = 0;
    while (d < t.size() && std::isdigit(static_cast<unsigned char>(t[d]))) ++d;
    if (d == 0 || d >= t.size() || (t[d] != '.' && t[d] != ')')) break;
    items.emplace_back(trim_view(t.substr(d + 1)));
  }
  if (items.empty()) parse_fail("no numbered steps after '" + std::string(header) + "'", raw);
  return items;
}

inline std::optional<int> to_int(const Json& value) {
  if (value.is_number_integer()) return value.get<int>();
  if (value.is_string()) {
    const std::string s = trim(value.get<std::string>());
    if (s.empty()) return std::nullopt;
    size_t i = 0;
    if (s[0] == '-') i = 1;
    for (; i < s.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return std::nullopt;
    try {
      return std::stoi(s);
    } catch (...) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

inline std::string normalized_answer(const Json& obj, const std::string& raw) {
  if (!obj.contains("answer") || !obj["answer"].is_string())
    parse_fail("missing required key 'answer'", raw);
  std::string answer = trim(obj["answer"].get<std::string>());
  std::string upper;
  for (char c : answer) upper += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (upper != "YES" && upper != "NO") parse_fail("answer must be YES or NO", raw);
  return upper;
}

inline LowLevelAction parse_primitive_action(const std::string& raw) {
  Json obj = strict_json_object(raw);
  if (!obj.contains("INDEX")) parse_fail("missing required key 'INDEX'", raw);
  if (!obj.contains("ACTION")) parse_fail("missing required key 'ACTION'", raw);
  web::Action action;
  action.space = web::ActionSpace::ActionId;
  auto index = to_int(obj["INDEX"]);
  if (!index) parse_fail("INDEX must be an integer", raw);
  action.index = *index;
  if (!obj["ACTION"].is_string()) parse_fail("ACTION must be a string", raw);
  auto kind = web::lookup_action_kind(obj["ACTION"].get<std::string>());
  if (!kind || !web::kind_legal_for_space(*kind, web::ActionSpace::ActionId))
    parse_fail("unknown primitive ACTION '" + obj["ACTION"].dump() + "'", raw);
  action.kind = *kind;
  if (obj.contains("SELECTOR") && obj["SELECTOR"].is_string())
    action.selector = obj["SELECTOR"].get<std::string>();
  if (obj.contains("VALUE") && obj["VALUE"].is_string())
    action.value = obj["VALUE"].get<std::string>();
  if (obj.contains("EXPLANATION") && obj["EXPLANATION"].is_string())
    action.thought = obj["EXPLANATION"].get<std::string>();
  if (obj.contains("TEXT") && obj["TEXT"].is_string())
    action.description = obj["TEXT"].get<std::string>();
  // "id=N" selectors resolve directly to a target element.
  if (action.selector.rfind("id=", 0) == 0) {
    auto target = to_int(Json(action.selector.substr(3)));
    if (target) action.target = *target;
  }
  return LowLevelAction{std::move(action)};
}

inline LowLevelAction parse_expanded_action(const std::string& raw) {
  Json obj = strict_json_object(raw);
  if (!obj.contains("action")) parse_fail("missing required key 'action'", raw);
  if (!obj.contains("action_input")) parse_fail("missing required key 'action_input'", raw);
  if (!obj["action"].is_string()) parse_fail("'action' must be a string", raw);
  web::Action action;
  action.space = web::ActionSpace::Expanded;
  auto kind = web::lookup_action_kind(obj["action"].get<std::string>());
  if (!kind || !web::kind_legal_for_space(*kind, web::ActionSpace::Expanded))
    parse_fail("unknown expanded action '" + obj["action"].dump() + "'", raw);
  action.kind = *kind;
  action.value = obj["action_input"].is_string() ? obj["action_input"].get<std::string>()
                                                 : obj["action_input"].dump();
  if (obj.contains("element_id")) {
    if (auto target = to_int(obj["element_id"])) action.target = *target;
  }
  if (obj.contains("thought") && obj["thought"].is_string())
    action.thought = obj["thought"].get<std::string>();
  if (obj.contains("description") && obj["description"].is_string())
    action.description = obj["description"].get<std::string>();
  return LowLevelAction{std::move(action)};
}

inline eval::AlignmentJudgment parse_alignment(const std::string& raw) {
  Json obj = strict_json_object(raw);
  if (!obj.contains("steps") || !obj["steps"].is_array())
    parse_fail("missing required key 'steps'", raw);
  eval::AlignmentJudgment judgment;
  for (const Json& step : obj["steps"]) {
    if (!step.is_object()) parse_fail("judgment steps must be objects", raw);
    eval::AlignmentEntry entry;
    if (step.contains("reasoning") && step["reasoning"].is_string())
      entry.reasoning = step["reasoning"].get<std::string>();
    if (!step.contains("human_step")) parse_fail("entry missing 'human_step'", raw);
    if (step["human_step"].is_string()) {
      entry.human_step = step["human_step"].get<std::string>();
    } else if (!step["human_step"].is_null()) {
      parse_fail("'human_step' must be text or null", raw);
    }
    if (!step.contains("status") || !step["status"].is_string())
      parse_fail("entry missing 'status'", raw);
    auto status = eval::lookup_alignment_status(to_lower(step["status"].get<std::string>()));
    if (!status) parse_fail("unknown status '" + step["status"].dump() + "'", raw);
    entry.status = *status;
    if (!step.contains("matched_llm_steps") || !step["matched_llm_steps"].is_array())
      parse_fail("entry missing 'matched_llm_steps'", raw);
    for (const Json& idx : step["matched_llm_steps"]) {
      auto n = to_int(idx);
      if (!n) parse_fail("matched_llm_steps must hold 1-indexed integers", raw);
      entry.matched_llm_steps.push_back(*n);
    }
    if (step.contains("decomposition_quality") && step["decomposition_quality"].is_string())
      entry.decomposition_quality = step["decomposition_quality"].get<std::string>();
    judgment.steps.push_back(std::move(entry));
  }
  if (judgment.steps.empty()) parse_fail("judgment has no steps", raw);
  return judgment;
}

inline ReplanDecision parse_replanning(const std::string& raw) {
  size_t at = find_ci(raw, "salvageable");
  if (at == std::string::npos) parse_fail("missing salvageability assessment", raw);
  size_t answer_at = find_ci(std::string_view(raw).substr(at), "answer");
  if (answer_at == std::string::npos) parse_fail("missing salvageability answer", raw);
  std::string_view after = std::string_view(raw).substr(at + answer_at);
  size_t yes = find_ci(after, "yes");
  size_t no = find_ci(after, "no");
  ReplanDecision decision;
  if (yes == std::string_view::npos && no == std::string_view::npos)
    parse_fail("salvageability answer must be YES or NO", raw);
  decision.salvageable = yes != std::string_view::npos &&
                         (no == std::string_view::npos || yes < no);
  decision.steps = numbered_items_after(raw, "proposed high-level plan");
  return decision;
}

inline PddlPlanText parse_pddl_plan(const std::string& raw) {
  std::vector<std::string> items = numbered_items_after(raw, "high level plan");
  std::string text;
  for (size_t i = 0; i < items.size(); ++i) {
    if (i) text += "\n";
    text += std::to_string(i + 1) + ". " + items[i];
  }
  try {
    auto actions = pddl::parse_plan(text);
    if (actions.empty()) parse_fail("plan has no actions", raw);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseFailure) throw;
    parse_fail(std::string("plan lines are not valid action instantiations: ") + e.message(), raw);
  }
  return PddlPlanText{text};
}

inline DomainText parse_domain_response(const std::string& raw) {
  size_t at = find_ci(raw, "domain file");
  if (at == std::string::npos) parse_fail("missing 'Domain File:' header", raw);
  size_t colon = raw.find(':', at);
  if (colon == std::string::npos) parse_fail("missing 'Domain File:' header", raw);
  std::string text = strip_code_fences(trim(raw.substr(colon + 1)));
  try {
    pddl::DomainFile domain = pddl::parse_domain(text);
    if (domain.schemas.empty()) parse_fail("domain file defines no actions", raw);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseFailure) throw;
    parse_fail(std::string("domain file does not parse: ") + e.message(), raw);
  }
  return DomainText{text};
}

}  // namespace detail

/// Parses a bare {"explanation", "answer": YES|NO} object (the verdict wire
/// shape shared by the checking and evaluation prompts).
inline JudgeVerdict parse_verdict(const std::string& raw) {
  Json obj = detail::strict_json_object(raw);
  JudgeVerdict verdict;
  verdict.answer = detail::normalized_answer(obj, raw);
  if (obj.contains("explanation") && obj["explanation"].is_string())
    verdict.explanation = obj["explanation"].get<std::string>();
  return verdict;
}

/// Parses a raw completion according to the template that produced it.
/// Throws ParseFailure (with the raw text attached) on any malformed reply.
inline ParsedResponse parse_response(std::string_view template_name, const std::string& raw) {
  if (template_name == "nl_plan") {
    return NlPlan{detail::numbered_items_after(raw, "proposed high-level plan")};
  }
  if (template_name == "pddl_plan") {
    return detail::parse_pddl_plan(raw);
  }
  if (template_name == "pddl_domain") {
    return detail::parse_domain_response(raw);
  }
  if (template_name == "lowlevel_action_id") {
    return detail::parse_primitive_action(raw);
  }
  if (template_name == "lowlevel_expanded") {
    return detail::parse_expanded_action(raw);
  }
  if (template_name == "postcondition_id" || template_name == "postcondition_expanded" ||
      template_name == "e2e_eval") {
    Json obj = detail::strict_json_object(raw);
    JudgeVerdict verdict;
    verdict.answer = detail::normalized_answer(obj, raw);
    if (obj.contains("explanation") && obj["explanation"].is_string())
      verdict.explanation = obj["explanation"].get<std::string>();
    return verdict;
  }
  if (template_name == "replanning") {
    return detail::parse_replanning(raw);
  }
  if (template_name == "alignment_judge") {
    return detail::parse_alignment(raw);
  }
  detail::parse_fail("no parser for template '" + std::string(template_name) + "'", raw);
}

/// Completion with bounded re-prompting: a malformed reply triggers up to
/// `retry_r` re-prompts that append the parse error, then the ParseFailure
/// propagates to the caller.
inline ParsedResponse complete_and_parse(Backend& backend, const Prompt& prompt,
                                         int retry_r) {
  Prompt current = prompt;
  for (int attempt = 0;; ++attempt) {
    std::string raw = backend.complete(current);
    try {
      return parse_response(prompt.template_name, raw);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ParseFailure || attempt >= retry_r) throw;
      current = prompt;
      current.slots["__retry"] = std::to_string(attempt + 1);
      current.text = prompt.text +
                     "\n\nYour previous response could not be parsed: " + e.message() +
                     "\nFollow the required output format exactly.";
    }
  }
}

}  // namespace strata::llm
