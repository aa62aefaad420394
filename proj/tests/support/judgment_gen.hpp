#pragma once

// Random valid AlignmentJudgment generator for the invariant property tests.

#include <algorithm>
#include <vector>

#include "strata/eval/alignment_types.hpp"

#include "generators.hpp"

namespace gen {

struct JudgmentFixture {
  strata::eval::AlignmentJudgment judgment;
  size_t human_steps = 0;
  size_t llm_steps = 0;
};

inline JudgmentFixture random_judgment(Rng& rng) {
  using strata::eval::AlignmentEntry;
  using strata::eval::AlignmentStatus;

  JudgmentFixture fx;
  fx.human_steps = static_cast<size_t>(pick(rng, 1, 6));
  fx.llm_steps = static_cast<size_t>(pick(rng, 1, 9));

  // assign every LLM index either to a human step or to the unmatched pool
  std::vector<std::vector<int>> per_human(fx.human_steps);
  std::vector<int> unmatched;
  for (int idx = 1; idx <= static_cast<int>(fx.llm_steps); ++idx) {
    if (chance(rng, 0.25)) {
      unmatched.push_back(idx);
    } else {
      per_human[static_cast<size_t>(pick(rng, 0, static_cast<int>(fx.human_steps) - 1))]
          .push_back(idx);
    }
  }

  for (size_t h = 0; h < fx.human_steps; ++h) {
    AlignmentEntry entry;
    entry.human_step = "human step " + std::to_string(h + 1);
    entry.reasoning = "synthetic";
    entry.matched_llm_steps = per_human[h];
    if (per_human[h].empty()) {
      entry.status = AlignmentStatus::Missing;
    } else if (per_human[h].size() == 1) {
      entry.status = chance(rng, 0.5) ? AlignmentStatus::Aligned : AlignmentStatus::Partial;
    } else {
      entry.status = AlignmentStatus::Decomposed;
      entry.decomposition_quality = chance(rng, 0.5) ? "useful" : "harmful";
    }
    fx.judgment.steps.push_back(std::move(entry));
  }
  if (!unmatched.empty()) {
    AlignmentEntry entry;
    entry.reasoning = "extra steps";
    entry.matched_llm_steps = unmatched;
    entry.status = AlignmentStatus::Unmatched;
    fx.judgment.steps.push_back(std::move(entry));
  }
  return fx;
}

}  // namespace gen
