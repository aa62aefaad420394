#pragma once

#include <optional>
#include <string>
#include <vector>

#include "strata/core/error.hpp"

namespace strata::eval {

enum class AlignmentStatus { Aligned, Partial, Missing, Decomposed, Unmatched };

inline const char* alignment_status_name(AlignmentStatus s) {
  switch (s) {
    case AlignmentStatus::Aligned: return "aligned";
    case AlignmentStatus::Partial: return "partial";
    case AlignmentStatus::Missing: return "missing";
    case AlignmentStatus::Decomposed: return "decomposed";
    case AlignmentStatus::Unmatched: return "unmatched";
  }
  return "?";
}

inline std::optional<AlignmentStatus> lookup_alignment_status(const std::string& name) {
  if (name == "aligned") return AlignmentStatus::Aligned;
  if (name == "partial") return AlignmentStatus::Partial;
  if (name == "missing") return AlignmentStatus::Missing;
  if (name == "decomposed") return AlignmentStatus::Decomposed;
  if (name == "unmatched") return AlignmentStatus::Unmatched;
  return std::nullopt;
}

/// One row of the judge output: a human step (or null for the pooled
/// unmatched entry) together with the 1-indexed LLM steps matched to it.
struct AlignmentEntry {
  std::string reasoning;
  std::optional<std::string> human_step;
  std::vector<int> matched_llm_steps;
  AlignmentStatus status = AlignmentStatus::Aligned;
  std::optional<std::string> decomposition_quality;  // "useful" | "harmful"

  friend bool operator==(const AlignmentEntry&, const AlignmentEntry&) = default;
};

struct AlignmentJudgment {
  std::vector<AlignmentEntry> steps;

  size_t human_step_count() const {
    size_t n = 0;
    for (const AlignmentEntry& e : steps)
      if (e.human_step.has_value()) ++n;
    return n;
  }

  size_t llm_step_count() const {
    size_t n = 0;
    for (const AlignmentEntry& e : steps) n += e.matched_llm_steps.size();
    return n;
  }

  friend bool operator==(const AlignmentJudgment&, const AlignmentJudgment&) = default;
};

}  // namespace strata::eval
