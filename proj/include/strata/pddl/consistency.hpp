#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "strata/core/error.hpp"
#include "strata/core/json.hpp"
#include "strata/pddl/ast.hpp"

namespace strata::pddl {

struct ConsistencyReport {
  bool valid = false;
  std::optional<int> failed_step;  // 1-based index of the first failing action
  std::vector<std::string> unmet;  // unmet ground preconditions at that step
  std::optional<SymbolicState> final_state;  // present iff valid
};

inline Json to_json(const ConsistencyReport& report) {
  Json j;
  j["valid"] = report.valid;
  j["failed_step"] = report.failed_step ? Json(*report.failed_step) : Json(nullptr);
  j["unmet"] = report.unmet;
  if (report.final_state) {
    j["final_state"] = Json::array();
    for (const std::string& fact : report.final_state->facts) j["final_state"].push_back(fact);
  } else {
    j["final_state"] = nullptr;
  }
  return j;
}

namespace detail {

inline std::string ground_literal_text(const Literal& lit, const ActionSchema& schema,
                                       const GroundAction& action, bool with_negation) {
  std::vector<Term> ground_args;
  ground_args.reserve(lit.args.size());
  for (const Term& t : lit.args) {
    if (!t.is_variable) {
      ground_args.push_back(t);
      continue;
    }
    bool bound = false;
    for (size_t i = 0; i < schema.params.size(); ++i) {
      if (schema.params[i].name == t.value) {
        ground_args.push_back(Term{action.args[i].value, false, action.args[i].quoted});
        bound = true;
        break;
      }
    }
    if (!bound) {
      throw Error(ErrorCode::UnboundVariable,
                  "variable '?" + t.value + "' in action '" + schema.name +
                      "' has no matching parameter");
    }
  }
  std::string fact = ground_fact(lit.predicate, ground_args);
  if (with_negation && lit.negated) return "(not " + fact + ")";
  return fact;
}

}  // namespace detail

/// Simulates the plan from the domain's initial state under closed-world
/// STRIPS semantics: every ground precondition must hold before a step;
/// effects then delete negated literals and add positive ones.
inline ConsistencyReport check_consistency(const DomainFile& domain,
                                           const std::vector<GroundAction>& plan) {
  SymbolicState state{domain.initial_state};
  for (size_t step = 0; step < plan.size(); ++step) {
    const GroundAction& action = plan[step];
    const ActionSchema* schema = domain.find(action.schema_name);
    if (schema == nullptr) {
      throw Error(ErrorCode::UnknownAction,
                  "plan step " + std::to_string(step + 1) + " uses unknown action '" +
                      action.schema_name + "'");
    }
    if (schema->params.size() != action.args.size()) {
      throw Error(ErrorCode::ArityMismatch,
                  "action '" + action.schema_name + "' takes " +
                      std::to_string(schema->params.size()) + " argument(s) but step " +
                      std::to_string(step + 1) + " supplies " +
                      std::to_string(action.args.size()));
    }
    std::vector<std::string> unmet;
    for (const Literal& pre : schema->preconditions) {
      std::string fact = detail::ground_literal_text(pre, *schema, action, false);
      bool holds = pre.negated ? !state.holds(fact) : state.holds(fact);
      if (!holds) unmet.push_back(pre.negated ? "(not " + fact + ")" : fact);
    }
    if (!unmet.empty()) {
      ConsistencyReport report;
      report.valid = false;
      report.failed_step = static_cast<int>(step) + 1;
      report.unmet = std::move(unmet);
      return report;
    }
    // STRIPS application order: deletes first, then adds.
    for (const Literal& eff : schema->effects) {
      if (eff.negated) state.facts.erase(detail::ground_literal_text(eff, *schema, action, false));
    }
    for (const Literal& eff : schema->effects) {
      if (!eff.negated) state.facts.insert(detail::ground_literal_text(eff, *schema, action, false));
    }
  }
  ConsistencyReport report;
  report.valid = true;
  report.final_state = std::move(state);
  return report;
}

}  // namespace strata::pddl
