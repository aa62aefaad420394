#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace strata::pddl {

/// A term inside a literal: either a variable (?query), a bare constant
/// symbol, or a quoted string constant. The quoted flag is kept so that
/// printing reproduces the source form.
struct Term {
  std::string value;
  bool is_variable = false;
  bool quoted = false;

  friend bool operator==(const Term&, const Term&) = default;
};

struct Literal {
  std::string predicate;
  std::vector<Term> args;
  bool negated = false;

  bool is_ground() const {
    for (const Term& t : args)
      if (t.is_variable) return false;
    return true;
  }

  friend bool operator==(const Literal&, const Literal&) = default;
};

struct Parameter {
  std::string name;  // without the leading '?'
  std::string type;  // empty when untyped; stored but never type-checked

  friend bool operator==(const Parameter&, const Parameter&) = default;
};

struct ActionSchema {
  std::string name;
  std::vector<Parameter> params;
  std::vector<Literal> preconditions;
  std::vector<Literal> effects;

  friend bool operator==(const ActionSchema&, const ActionSchema&) = default;
};

/// Parsed domain: action schemas in source order plus the initial symbolic
/// state (positive ground facts in canonical text form).
struct DomainFile {
  std::vector<ActionSchema> schemas;
  std::set<std::string> initial_state{"(on-homepage)"};

  const ActionSchema* find(const std::string& name) const {
    for (const ActionSchema& s : schemas)
      if (s.name == name) return &s;
    return nullptr;
  }

  friend bool operator==(const DomainFile&, const DomainFile&) = default;
};

struct PlanArg {
  std::string value;
  bool quoted = false;

  friend bool operator==(const PlanArg&, const PlanArg&) = default;
};

struct GroundAction {
  std::string schema_name;
  std::vector<PlanArg> args;

  friend bool operator==(const GroundAction&, const GroundAction&) = default;
};

inline std::string quote_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string term_text(const Term& t) {
  if (t.is_variable) return "?" + t.value;
  if (t.quoted) return quote_string(t.value);
  return t.value;
}

inline std::string literal_text(const Literal& lit) {
  std::string inner = "(" + lit.predicate;
  for (const Term& t : lit.args) inner += " " + term_text(t);
  inner += ")";
  if (lit.negated) return "(not " + inner + ")";
  return inner;
}

/// Canonical text form of a ground fact; SymbolicState and the initial
/// state store facts in this form.
inline std::string ground_fact(const std::string& predicate,
                               const std::vector<Term>& args) {
  std::string out = "(" + predicate;
  for (const Term& t : args) out += " " + term_text(t);
  out += ")";
  return out;
}

/// Set of positive ground facts under closed-world semantics: a fact is
/// false iff absent.
struct SymbolicState {
  std::set<std::string> facts;

  bool holds(const std::string& fact) const { return facts.count(fact) > 0; }

  friend bool operator==(const SymbolicState&, const SymbolicState&) = default;
};

inline std::string print_schema(const ActionSchema& schema) {
  std::string out = "(:action " + schema.name + "\n    :parameters (";
  bool first = true;
  for (const Parameter& p : schema.params) {
    if (!first) out += " ";
    first = false;
    out += "?" + p.name;
    if (!p.type.empty()) out += " - " + p.type;
  }
  out += ")";
  if (!schema.preconditions.empty()) {
    out += "\n    :precondition (and";
    for (const Literal& l : schema.preconditions) out += " " + literal_text(l);
    out += ")";
  }
  if (!schema.effects.empty()) {
    out += "\n    :effect (and";
    for (const Literal& l : schema.effects) out += " " + literal_text(l);
    out += ")";
  }
  out += ")";
  return out;
}

inline std::string print_domain(const DomainFile& domain) {
  std::string out;
  for (size_t i = 0; i < domain.schemas.size(); ++i) {
    if (i) out += "\n";
    out += print_schema(domain.schemas[i]);
  }
  return out;
}

inline std::string print_action(const GroundAction& action) {
  std::string out = "(" + action.schema_name;
  for (const PlanArg& a : action.args) {
    out += " ";
    out += a.quoted ? quote_string(a.value) : a.value;
  }
  out += ")";
  return out;
}

inline std::string print_plan(const std::vector<GroundAction>& plan) {
  std::string out;
  for (size_t i = 0; i < plan.size(); ++i) {
    if (i) out += "\n";
    out += std::to_string(i + 1) + ". " + print_action(plan[i]);
  }
  return out;
}

}  // namespace strata::pddl
