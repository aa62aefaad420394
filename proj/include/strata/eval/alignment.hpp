#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "strata/core/json.hpp"
#include "strata/eval/alignment_types.hpp"
#include "strata/llm/backend.hpp"
#include "strata/llm/parse.hpp"

namespace strata::eval {

/// Enforces the partition invariants: human-side categories partition the
/// human steps, LLM-side matched/unmatched partition the LLM steps, and at
/// most one pooled unmatched entry exists. Throws JudgeError naming the
/// violation; judgments are never silently normalized.
inline void validate_judgment(const AlignmentJudgment& judgment, size_t human_steps,
                              size_t llm_steps) {
  auto fail = [](const std::string& violation) {
    throw Error(ErrorCode::JudgeError, violation);
  };
  size_t human_entries = 0;
  size_t unmatched_entries = 0;
  std::set<int> seen_indices;
  for (const AlignmentEntry& entry : judgment.steps) {
    if (entry.human_step.has_value()) {
      ++human_entries;
      switch (entry.status) {
        case AlignmentStatus::Unmatched:
          fail("a human-step entry is labeled 'unmatched'");
          break;
        case AlignmentStatus::Aligned:
          if (entry.matched_llm_steps.size() != 1)
            fail("an 'aligned' entry must match exactly one LLM step");
          break;
        case AlignmentStatus::Partial:
          if (entry.matched_llm_steps.empty())
            fail("a 'partial' entry must match at least one LLM step");
          break;
        case AlignmentStatus::Missing:
          if (!entry.matched_llm_steps.empty())
            fail("a 'missing' entry must match no LLM steps");
          break;
        case AlignmentStatus::Decomposed:
          if (entry.matched_llm_steps.size() < 2)
            fail("a 'decomposed' entry must match at least two LLM steps");
          break;
      }
    } else {
      ++unmatched_entries;
      if (entry.status != AlignmentStatus::Unmatched)
        fail("the null-human entry must be labeled 'unmatched'");
    }
    for (int idx : entry.matched_llm_steps) {
      if (idx < 1 || idx > static_cast<int>(llm_steps))
        fail("LLM step index " + std::to_string(idx) + " is out of range 1.." +
             std::to_string(llm_steps));
      if (!seen_indices.insert(idx).second)
        fail("LLM step index " + std::to_string(idx) + " appears in more than one entry");
    }
  }
  if (unmatched_entries > 1) fail("more than one pooled unmatched entry");
  if (human_entries != human_steps)
    fail("judgment covers " + std::to_string(human_entries) + " human steps, expected " +
         std::to_string(human_steps));
  if (seen_indices.size() != llm_steps)
    fail("only " + std::to_string(seen_indices.size()) + " of " + std::to_string(llm_steps) +
         " LLM steps are covered");
}

namespace detail {

inline std::string numbered_steps(const std::vector<std::string>& steps) {
  std::string out;
  for (size_t i = 0; i < steps.size(); ++i) {
    if (i) out += "\n";
    out += std::to_string(i + 1) + ". " + steps[i];
  }
  return out;
}

}  // namespace detail

/// Judge-based alignment of an LLM plan against the human reference plan.
/// An invariant violation triggers one re-prompt that names the violation,
/// then a hard JudgeError.
inline AlignmentJudgment judge_alignment(llm::Backend& judge, const std::string& task,
                                         const std::vector<std::string>& human_plan,
                                         const std::vector<std::string>& llm_plan,
                                         int retry_r = 2) {
  if (human_plan.empty() || llm_plan.empty())
    throw Error(ErrorCode::EmptyInput, "both plans must be non-empty");
  llm::Prompt prompt = llm::render("alignment_judge",
                                   {{"task", task},
                                    {"human_plan", detail::numbered_steps(human_plan)},
                                    {"llm_plan", detail::numbered_steps(llm_plan)}});
  llm::Prompt current = prompt;
  for (int round = 0;; ++round) {
    auto judgment = std::get<AlignmentJudgment>(
        llm::complete_and_parse(judge, current, retry_r));
    try {
      validate_judgment(judgment, human_plan.size(), llm_plan.size());
      return judgment;
    } catch (const Error& e) {
      if (round >= 1) throw;
      current = prompt;
      current.slots["__invariant_retry"] = "1";
      current.text = prompt.text +
                     "\n\nYour previous judgment was invalid: " + e.message() +
                     "\nRe-annotate so that every human step appears exactly once and every "
                     "LLM step index appears in exactly one entry.";
    }
  }
}

/// Pooled (micro-averaged) rates over a set of validated judgments. The
/// human-side categories are fractions of all human steps; matched/unmatched
/// are fractions of all LLM steps. A partial step's matched LLM steps count
/// as matched.
struct AlignmentRates {
  double perfect = 0, partial = 0, missing = 0, decomposed = 0;
  double matched = 0, unmatched = 0;
  size_t human_steps = 0, llm_steps = 0, tasks = 0;
};

inline AlignmentRates aggregate_alignment(const std::vector<AlignmentJudgment>& judgments,
                                          bool macro_average = false) {
  if (judgments.empty())
    throw Error(ErrorCode::EmptyInput, "no judgments to aggregate");
  AlignmentRates rates;
  rates.tasks = judgments.size();
  double macro_perfect = 0, macro_partial = 0, macro_missing = 0, macro_decomposed = 0;
  double macro_matched = 0, macro_unmatched = 0;
  size_t perfect = 0, partial = 0, missing = 0, decomposed = 0;
  size_t matched = 0, unmatched = 0;

  for (const AlignmentJudgment& j : judgments) {
    size_t jp = 0, jpa = 0, jm = 0, jd = 0, jmatched = 0, junmatched = 0;
    for (const AlignmentEntry& e : j.steps) {
      if (e.human_step.has_value()) {
        switch (e.status) {
          case AlignmentStatus::Aligned: ++jp; break;
          case AlignmentStatus::Partial: ++jpa; break;
          case AlignmentStatus::Missing: ++jm; break;
          case AlignmentStatus::Decomposed: ++jd; break;
          case AlignmentStatus::Unmatched: break;
        }
        jmatched += e.matched_llm_steps.size();
      } else {
        junmatched += e.matched_llm_steps.size();
      }
    }
    size_t human = jp + jpa + jm + jd;
    size_t llm_total = jmatched + junmatched;
    perfect += jp;
    partial += jpa;
    missing += jm;
    decomposed += jd;
    matched += jmatched;
    unmatched += junmatched;
    rates.human_steps += human;
    rates.llm_steps += llm_total;
    if (macro_average && human > 0 && llm_total > 0) {
      macro_perfect += static_cast<double>(jp) / static_cast<double>(human);
      macro_partial += static_cast<double>(jpa) / static_cast<double>(human);
      macro_missing += static_cast<double>(jm) / static_cast<double>(human);
      macro_decomposed += static_cast<double>(jd) / static_cast<double>(human);
      macro_matched += static_cast<double>(jmatched) / static_cast<double>(llm_total);
      macro_unmatched += static_cast<double>(junmatched) / static_cast<double>(llm_total);
    }
  }

  if (macro_average) {
    double n = static_cast<double>(judgments.size());
    rates.perfect = macro_perfect / n;
    rates.partial = macro_partial / n;
    rates.missing = macro_missing / n;
    rates.decomposed = macro_decomposed / n;
    rates.matched = macro_matched / n;
    rates.unmatched = macro_unmatched / n;
    return rates;
  }
  if (rates.human_steps == 0 || rates.llm_steps == 0)
    throw Error(ErrorCode::EmptyInput, "judgments cover no steps");
  double human = static_cast<double>(rates.human_steps);
  double llm_total = static_cast<double>(rates.llm_steps);
  rates.perfect = static_cast<double>(perfect) / human;
  rates.partial = static_cast<double>(partial) / human;
  rates.missing = static_cast<double>(missing) / human;
  rates.decomposed = static_cast<double>(decomposed) / human;
  rates.matched = static_cast<double>(matched) / llm_total;
  rates.unmatched = static_cast<double>(unmatched) / llm_total;
  return rates;
}

// --- judgment file format (run-directory artifact) -------------------------

inline Json judgment_to_json(const AlignmentJudgment& judgment) {
  Json steps = Json::array();
  for (const AlignmentEntry& e : judgment.steps) {
    Json j;
    j["reasoning"] = e.reasoning;
    j["human_step"] = e.human_step ? Json(*e.human_step) : Json(nullptr);
    j["matched_llm_steps"] = e.matched_llm_steps;
    j["status"] = alignment_status_name(e.status);
    if (e.decomposition_quality) j["decomposition_quality"] = *e.decomposition_quality;
    steps.push_back(std::move(j));
  }
  return Json{{"steps", std::move(steps)}};
}

inline AlignmentJudgment judgment_from_json(const Json& j, const std::string& where) {
  return std::get<AlignmentJudgment>(llm::parse_response("alignment_judge", j.dump()));
  (void)where;
}

}  // namespace strata::eval
