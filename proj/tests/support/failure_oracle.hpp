#pragma once

// Independent single-pass counter for the five failure-mode rates. Kept
// deliberately naive: raw loops and integer tallies over the trajectory
// records, no shared code with the metrics module beyond the data types.

#include <map>
#include <string>
#include <vector>

#include "strata/agent/types.hpp"

namespace oracle {

struct FailureCounts {
  long invalid_num = 0, invalid_den = 0;
  long dead_goto_num = 0, goto_den = 0;
  long repetition_num = 0, failed_attempts = 0;
  long redundant_num = 0, valid_den = 0;
  long offsite_num = 0, all_steps = 0;
};

inline FailureCounts count_failures(const std::vector<strata::agent::Trajectory>& trajectories,
                                    int k) {
  FailureCounts c;
  for (const auto& t : trajectories) {
    for (const auto& attempt : t.attempts) {
      std::map<std::string, long> reps;
      for (const auto& step : attempt.steps) {
        c.all_steps += 1;
        c.invalid_den += 1;
        bool invalid = step.outcome.error_class.has_value() &&
                       *step.outcome.error_class == strata::web::ErrorClass::InvalidTarget;
        if (invalid) c.invalid_num += 1;
        if (!invalid) {
          c.valid_den += 1;
          if (!step.outcome.state_changed) c.redundant_num += 1;
        }
        if (step.action.kind == strata::web::ActionKind::Goto) {
          c.goto_den += 1;
          if (step.outcome.new_state.is_error_page) c.dead_goto_num += 1;
        }
        if (step.outcome.off_site) c.offsite_num += 1;
        std::string sig = std::string(strata::web::expanded_kind_name(step.action.kind)) + "#" +
                          (step.action.target ? std::to_string(*step.action.target)
                                              : step.action.selector) +
                          "#" + step.action.value;
        reps[sig] += 1;
      }
      if (attempt.verdict.answer != "YES") {
        c.failed_attempts += 1;
        bool flagged = false;
        for (const auto& [sig, n] : reps) {
          if (n > k) flagged = true;
        }
        if (flagged) c.repetition_num += 1;
      }
    }
  }
  return c;
}

}  // namespace oracle
