#pragma once

#include <optional>
#include <string>

#include "strata/core/error.hpp"
#include "strata/core/util.hpp"
#include "strata/web/dom.hpp"

namespace strata::web {

enum class ActionSpace { Expanded, ActionObject, ActionId };

inline const char* action_space_name(ActionSpace s) {
  switch (s) {
    case ActionSpace::Expanded: return "expanded";
    case ActionSpace::ActionObject: return "action_object";
    case ActionSpace::ActionId: return "action_id";
  }
  return "?";
}

inline ActionSpace parse_action_space(const std::string& name) {
  if (name == "expanded") return ActionSpace::Expanded;
  if (name == "action_object") return ActionSpace::ActionObject;
  if (name == "action_id") return ActionSpace::ActionId;
  throw Error(ErrorCode::ConfigError, "unknown action space '" + name + "'");
}

/// A single action kind covers both surface syntaxes: click/CLICK,
/// fill_form/TYPE and select_option/SELECT behave identically.
enum class ActionKind {
  Goto,
  GoogleSearch,
  Fill,
  Click,
  Select,
  Hover,
  GoBack,
  CacheData,
  GetFinalAnswer,
};

inline const char* expanded_kind_name(ActionKind k) {
  switch (k) {
    case ActionKind::Goto: return "goto";
    case ActionKind::GoogleSearch: return "google_search";
    case ActionKind::Fill: return "fill_form";
    case ActionKind::Click: return "click";
    case ActionKind::Select: return "select_option";
    case ActionKind::Hover: return "hover";
    case ActionKind::GoBack: return "go_back";
    case ActionKind::CacheData: return "cache_data";
    case ActionKind::GetFinalAnswer: return "get_final_answer";
  }
  return "?";
}

inline const char* primitive_kind_name(ActionKind k) {
  switch (k) {
    case ActionKind::Click: return "CLICK";
    case ActionKind::Fill: return "TYPE";
    case ActionKind::Select: return "SELECT";
    case ActionKind::Hover: return "HOVER";
    default: return expanded_kind_name(k);
  }
}

inline std::optional<ActionKind> lookup_action_kind(const std::string& name) {
  std::string n = to_lower(trim(name));
  if (n == "goto") return ActionKind::Goto;
  if (n == "google_search") return ActionKind::GoogleSearch;
  if (n == "fill_form" || n == "type") return ActionKind::Fill;
  if (n == "click") return ActionKind::Click;
  if (n == "select_option" || n == "select") return ActionKind::Select;
  if (n == "hover") return ActionKind::Hover;
  if (n == "go_back") return ActionKind::GoBack;
  if (n == "cache_data") return ActionKind::CacheData;
  if (n == "get_final_answer") return ActionKind::GetFinalAnswer;
  return std::nullopt;
}

inline bool kind_legal_for_space(ActionKind kind, ActionSpace space) {
  if (space == ActionSpace::Expanded) return kind != ActionKind::Hover;
  switch (kind) {
    case ActionKind::Click:
    case ActionKind::Fill:
    case ActionKind::Select:
    case ActionKind::Hover:
      return true;
    default:
      return false;
  }
}

struct Action {
  ActionSpace space = ActionSpace::Expanded;
  ActionKind kind = ActionKind::Click;
  std::optional<int> target;  // element id, when the kind addresses an element
  std::string selector;       // ActionObject textual selector, e.g. "id=40" or "text='About'"
  std::string value;
  std::string thought;
  std::string description;
  std::optional<int> index;  // 1-based index into the enumerated action list

  friend bool operator==(const Action&, const Action&) = default;
};

/// Signature used for transition matching and repetition detection:
/// (kind, target element or normalized selector, value).
inline std::string action_signature(const Action& a) {
  std::string target = a.target ? std::to_string(*a.target) : to_lower(trim(a.selector));
  return std::string(expanded_kind_name(a.kind)) + "|" + target + "|" + a.value;
}

enum class ErrorClass { InvalidTarget, DeadLink, OffSite, NoEffect };

inline const char* error_class_name(ErrorClass e) {
  switch (e) {
    case ErrorClass::InvalidTarget: return "InvalidTarget";
    case ErrorClass::DeadLink: return "DeadLink";
    case ErrorClass::OffSite: return "OffSite";
    case ErrorClass::NoEffect: return "NoEffect";
  }
  return "?";
}

inline std::optional<ErrorClass> lookup_error_class(const std::string& name) {
  if (name == "InvalidTarget") return ErrorClass::InvalidTarget;
  if (name == "DeadLink") return ErrorClass::DeadLink;
  if (name == "OffSite") return ErrorClass::OffSite;
  if (name == "NoEffect") return ErrorClass::NoEffect;
  return std::nullopt;
}

struct StepOutcome {
  bool ok = true;
  PageState new_state;
  bool state_changed = false;
  std::optional<ErrorClass> error_class;
  bool off_site = false;
  std::optional<std::string> cached_data;
  std::optional<std::string> final_answer;
};

}  // namespace strata::web
