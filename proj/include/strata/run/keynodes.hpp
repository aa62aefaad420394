#pragma once

#include <regex>
#include <string>
#include <vector>

#include "strata/core/json.hpp"
#include "strata/llm/backend.hpp"
#include "strata/llm/parse.hpp"

namespace strata::run {

// Key-node conversion is human-in-the-loop: the tool emits draft plans plus
// a review checklist; drafts are never promoted to reference plans.
//
// Assumed annotation schema (the benchmark's exact key-node JSON is not
// fixed): {"annotations": [{"task_id", "instruction", "key_nodes": [...]}]}
// where each key node is a free-form object (url / description /
// match_function fields are all carried through verbatim).

namespace detail {

inline const char* kDraftPromptBody =
    R"PROMPT(You are given the expert-annotated key nodes for one web task. Convert the JSON key-node representation into a coherent sequence of abstract high-level steps that captures the expert's intended task progression without low-level details.

Task: {instruction}

Key nodes:
{key_nodes}

Rules:
- Each step must be a clear, meaningful high-level subgoal.
- Do not frame steps as evaluations or checks.
- Do not navigate to raw links directly.
- Do NOT use markdown formatting.

Output your response in this strict format:

Proposed high-level plan:
1. Step one
2. Step two
...
)PROMPT";

inline const char* kReviewPromptBody =
    R"PROMPT(You are reviewing a draft high-level plan converted from expert key-node annotations.

Key nodes:
{key_nodes}

Draft plan:
{plan}

Step under review: {step}

Question: {question}

Your output should ONLY be a json object with the following keys:
{
    "explanation": "a short explanation",
    "answer": "YES" | "NO"
}
)PROMPT";

struct ReviewQuestion {
  const char* category;
  const char* question;
  bool per_step;
};

inline const std::vector<ReviewQuestion>& review_questions() {
  static const std::vector<ReviewQuestion> questions = {
      {"framed_as_evaluation",
       "Is this step framed as an evaluation or verification rather than an actionable "
       "high-level step?",
       true},
      {"overly_specific",
       "Does this step hard-code specifics (such as navigating directly to a link) that "
       "should be abstracted?",
       true},
      {"incomplete",
       "Is the draft plan missing part of the requirements captured in the key nodes?",
       false},
  };
  return questions;
}

inline llm::JudgeVerdict ask(llm::Backend& backend, const std::string& template_name,
                             const std::string& body,
                             const std::map<std::string, std::string>& slots, int retry_r) {
  llm::PromptTemplate tmpl;
  tmpl.name = template_name;
  tmpl.body = body;
  for (const auto& [k, v] : slots) tmpl.required_slots.push_back(k);
  llm::Prompt prompt = llm::render(tmpl, slots);
  llm::Prompt current = prompt;
  for (int attempt = 0;; ++attempt) {
    std::string raw = backend.complete(current);
    try {
      return llm::parse_verdict(raw);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ParseFailure || attempt >= retry_r) throw;
      current = prompt;
      current.slots["__retry"] = std::to_string(attempt + 1);
      current.text = prompt.text + "\n\nYour previous response could not be parsed: " +
                     e.message() + "\nFollow the required output format exactly.";
    }
  }
}

inline bool contains_raw_url(const std::string& step) {
  static const std::regex url_re(R"((https?://|www\.)\S+)", std::regex::icase);
  return std::regex_search(step, url_re);
}

}  // namespace detail

/// Converts key-node annotations into draft human plans plus a review
/// checklist over the three manual-fix categories. Per-annotation parse
/// failures are reported and skipped.
inline Json convert_keynodes(const Json& annotations_doc, llm::Backend& drafting_backend,
                             llm::Backend& review_backend, int retry_r = 2) {
  Json out;
  out["schema_version"] = 1;
  out["drafts"] = Json::array();
  out["skipped"] = Json::array();
  if (!annotations_doc.contains("annotations") || !annotations_doc["annotations"].is_array()) {
    throw Error(ErrorCode::SchemaError, "annotations document needs an 'annotations' array");
  }

  for (const Json& annotation : annotations_doc["annotations"]) {
    std::string task_id = annotation.value("task_id", std::string("(unknown)"));
    try {
      std::string instruction = require_string(annotation, "instruction", "annotation " + task_id);
      const Json& key_nodes = require_field(annotation, "key_nodes", "annotation " + task_id);
      std::string key_nodes_text = key_nodes.dump(2);

      llm::PromptTemplate draft_tmpl;
      draft_tmpl.name = "keynode_draft";
      draft_tmpl.body = detail::kDraftPromptBody;
      draft_tmpl.required_slots = {"instruction", "key_nodes"};
      llm::Prompt prompt = llm::render(
          draft_tmpl, {{"instruction", instruction}, {"key_nodes", key_nodes_text}});
      auto plan = std::get<llm::NlPlan>(
          llm::complete_and_parse(drafting_backend, prompt, retry_r));

      Json draft;
      draft["task_id"] = task_id;
      draft["instruction"] = instruction;
      draft["steps"] = plan.steps;
      draft["review"] = Json::array();
      std::string plan_text;
      for (size_t i = 0; i < plan.steps.size(); ++i) {
        if (i) plan_text += "\n";
        plan_text += std::to_string(i + 1) + ". " + plan.steps[i];
      }

      // rule-based flag: a draft step containing a raw URL is overly specific
      for (size_t i = 0; i < plan.steps.size(); ++i) {
        if (detail::contains_raw_url(plan.steps[i])) {
          draft["review"].push_back(Json{{"step", i + 1},
                                         {"category", "overly_specific"},
                                         {"source", "rule"},
                                         {"note", "step contains a raw URL"}});
        }
      }

      for (const detail::ReviewQuestion& q : detail::review_questions()) {
        if (q.per_step) {
          for (size_t i = 0; i < plan.steps.size(); ++i) {
            llm::JudgeVerdict verdict = detail::ask(
                review_backend, "keynode_review", detail::kReviewPromptBody,
                {{"key_nodes", key_nodes_text},
                 {"plan", plan_text},
                 {"step", plan.steps[i]},
                 {"question", q.question}},
                retry_r);
            if (verdict.yes()) {
              draft["review"].push_back(Json{{"step", i + 1},
                                             {"category", q.category},
                                             {"source", "judge"},
                                             {"note", verdict.explanation}});
            }
          }
        } else {
          llm::JudgeVerdict verdict = detail::ask(
              review_backend, "keynode_review", detail::kReviewPromptBody,
              {{"key_nodes", key_nodes_text},
               {"plan", plan_text},
               {"step", "(whole plan)"},
               {"question", q.question}},
              retry_r);
          if (verdict.yes()) {
            draft["review"].push_back(Json{{"step", nullptr},
                                           {"category", q.category},
                                           {"source", "judge"},
                                           {"note", verdict.explanation}});
          }
        }
      }
      out["drafts"].push_back(std::move(draft));
    } catch (const Error& e) {
      out["skipped"].push_back(Json{{"task_id", task_id}, {"error", e.what()}});
    }
  }
  return out;
}

}  // namespace strata::run
