#pragma once

#include <string>
#include <vector>

#include "strata/core/util.hpp"
#include "strata/web/actions.hpp"
#include "strata/web/dom.hpp"
#include "strata/web/site.hpp"

namespace strata::web {

inline PageState make_error_page(std::string url) {
  PageState page;
  page.url = std::move(url);
  page.title = "404 Not Found";
  page.root = Element{0, "generic", "", {}, {Element{1, "generic", "Page not found", {}, {}}}};
  page.is_error_page = true;
  return page;
}

inline PageState make_no_results_page(const SiteScript& site, const std::string& query) {
  PageState page;
  page.url = "https://" + site.site_domain + "/search?results=none";
  page.title = "Search results";
  page.root = Element{
      0, "generic", "", {},
      {Element{1, "generic", "No results found for '" + query + "'", {}, {}}}};
  return page;
}

/// Deterministic list of primitive actions applicable on the page:
/// kind-major order (CLICK, TYPE, SELECT, HOVER), document order within a
/// kind. Indices are 1-based.
inline std::vector<Action> enumerate_actions(const PageState& page) {
  std::vector<Action> out;
  auto collect = [&](ActionKind kind, auto&& applies) {
    visit_elements(page.root, [&](const Element& e, int depth) {
      if (depth == 0 || !applies(e)) return;
      Action a;
      a.space = ActionSpace::ActionId;
      a.kind = kind;
      a.target = e.id;
      a.selector = "id=" + std::to_string(e.id);
      out.push_back(std::move(a));
    });
  };
  collect(ActionKind::Click, [](const Element& e) { return e.tag == "link" || e.tag == "button"; });
  collect(ActionKind::Fill, [](const Element& e) { return e.tag == "textarea"; });
  collect(ActionKind::Select, [](const Element& e) { return e.tag == "select"; });
  collect(ActionKind::Hover, [](const Element& e) {
    return e.tag == "link" || e.tag == "button" || e.tag == "textarea" || e.tag == "select";
  });
  for (size_t i = 0; i < out.size(); ++i) out[i].index = static_cast<int>(i) + 1;
  return out;
}

namespace detail {

inline bool select_has_option(const Element& select, const std::string& value) {
  for (const Element& child : select.children) {
    if (child.tag == "option" && child.text == value) return true;
  }
  return false;
}

inline PageState fresh_page(const SiteScript& site, const std::string& url) {
  if (const PageState* page = site.find_page(url)) return *page;
  return make_error_page(url);
}

}  // namespace detail

/// Pure transition function of the simulated environment. Failures are
/// modeled in the outcome, never thrown. `nav_history` supplies the URL
/// stack consumed by go_back; callers that need go_back should use Session.
inline StepOutcome apply_action(const SiteScript& site, const PageState& state,
                                const Action& action,
                                const std::vector<std::string>& nav_history = {}) {
  StepOutcome out;
  out.new_state = state;

  auto element = [&](int id) { return find_element(state.root, id); };
  bool dom_action = false;  // actions that address the current DOM

  switch (action.kind) {
    case ActionKind::Goto: {
      if (const PageState* page = site.find_page(action.value)) {
        out.new_state = *page;
      } else {
        out.new_state = make_error_page(action.value);
        out.error_class = ErrorClass::DeadLink;
      }
      break;
    }
    case ActionKind::GoogleSearch: {
      auto hit = site.search_index.find(action.value);
      if (hit != site.search_index.end()) {
        out.new_state = detail::fresh_page(site, hit->second);
      } else {
        out.new_state = make_no_results_page(site, action.value);
      }
      break;
    }
    case ActionKind::Fill: {
      dom_action = true;
      const Element* e = action.target ? element(*action.target) : nullptr;
      if (e == nullptr) {
        out.error_class = ErrorClass::InvalidTarget;
        break;
      }
      if (e->tag == "textarea") out.new_state.form_values[e->id] = action.value;
      break;
    }
    case ActionKind::Click:
    case ActionKind::Hover: {
      dom_action = true;
      const Element* e = action.target ? element(*action.target) : nullptr;
      if (e == nullptr) {
        out.error_class = ErrorClass::InvalidTarget;
        break;
      }
      const Transition* t = site.find_transition(state.url, action.kind, e->id, action.value);
      if (t != nullptr && !t->noop) out.new_state = detail::fresh_page(site, t->to);
      break;
    }
    case ActionKind::Select: {
      dom_action = true;
      const Element* e = action.target ? element(*action.target) : nullptr;
      if (e == nullptr) {
        out.error_class = ErrorClass::InvalidTarget;
        break;
      }
      if (e->tag == "select" && detail::select_has_option(*e, action.value)) {
        out.new_state.form_values[e->id] = action.value;
        const Transition* t = site.find_transition(state.url, ActionKind::Select, e->id, action.value);
        if (t != nullptr && !t->noop) out.new_state = detail::fresh_page(site, t->to);
      }
      // A value that matches no option leaves the page untouched, which the
      // diff below reports as NoEffect.
      break;
    }
    case ActionKind::GoBack: {
      dom_action = true;
      if (!nav_history.empty()) out.new_state = detail::fresh_page(site, nav_history.back());
      break;
    }
    case ActionKind::CacheData: {
      out.cached_data = action.value;
      break;
    }
    case ActionKind::GetFinalAnswer: {
      out.final_answer = action.value;
      break;
    }
  }

  out.state_changed = canonical_page_text(out.new_state) != canonical_page_text(state);
  out.off_site = registrable_domain(out.new_state.url) != site.site_domain;
  if (!out.error_class && out.off_site) out.error_class = ErrorClass::OffSite;
  if (!out.error_class && dom_action && !out.state_changed) out.error_class = ErrorClass::NoEffect;
  out.ok = !out.error_class || *out.error_class == ErrorClass::OffSite;
  if (out.error_class == ErrorClass::InvalidTarget) out.new_state = state;
  return out;
}

/// Tracks the current page and the navigation history for one task run.
/// State snapshots stay immutable; the session only replaces them.
class Session {
 public:
  Session(const SiteScript& site, PageState start)
      : site_(&site), state_(std::move(start)) {}

  const SiteScript& site() const { return *site_; }
  const PageState& state() const { return state_; }
  const std::vector<std::string>& history() const { return history_; }

  StepOutcome step(const Action& action) {
    StepOutcome out = apply_action(*site_, state_, action, history_);
    if (action.kind == ActionKind::GoBack) {
      if (!history_.empty()) history_.pop_back();
    } else if (out.new_state.url != state_.url) {
      history_.push_back(state_.url);
    }
    state_ = out.new_state;
    return out;
  }

  void reset(PageState state) {
    state_ = std::move(state);
    history_.clear();
  }

 private:
  const SiteScript* site_;
  PageState state_;
  std::vector<std::string> history_;
};

}  // namespace strata::web
