#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "strata/core/error.hpp"

namespace strata::web {

inline const std::set<std::string>& known_tags() {
  static const std::set<std::string> tags = {"link",   "button", "textarea",
                                             "select", "option", "generic"};
  return tags;
}

struct Element {
  int id = 0;
  std::string tag = "generic";
  std::string text;
  std::map<std::string, std::string> attributes;
  std::vector<Element> children;

  friend bool operator==(const Element&, const Element&) = default;
};

struct PageState {
  std::string url;
  std::string title;
  Element root;
  std::map<int, std::string> form_values;
  bool is_error_page = false;

  friend bool operator==(const PageState&, const PageState&) = default;
};

inline const Element* find_element(const Element& node, int id) {
  if (node.id == id) return &node;
  for (const Element& child : node.children) {
    if (const Element* hit = find_element(child, id)) return hit;
  }
  return nullptr;
}

template <typename Fn>
void visit_elements(const Element& node, Fn&& fn, int depth = 0) {
  fn(node, depth);
  for (const Element& child : node.children) visit_elements(child, fn, depth + 1);
}

/// Accessibility-tree text: a tab-name header followed by one indented
/// "[id] tag 'text'" line per element below the root container.
inline std::string serialize_observation(const PageState& page) {
  std::string out = "current web tab name is '" + page.title + "'";
  for (const Element& top : page.root.children) {
    visit_elements(top, [&](const Element& e, int depth) {
      out += "\n" + std::string(static_cast<size_t>(4 * (depth + 1)), ' ') + "[" +
             std::to_string(e.id) + "] " + e.tag + " '" + e.text + "'";
    });
  }
  return out;
}

/// Canonical serialization of (url, root, form_values) used for DOM-diff
/// based state-change detection.
inline std::string canonical_page_text(const PageState& page) {
  std::string out = page.url + "\n" + page.title + "\n";
  out += page.is_error_page ? "error\n" : "ok\n";
  visit_elements(page.root, [&](const Element& e, int depth) {
    out += std::to_string(depth) + "|" + std::to_string(e.id) + "|" + e.tag + "|" +
           e.text;
    for (const auto& [k, v] : e.attributes) out += "|" + k + "=" + v;
    out += "\n";
  });
  for (const auto& [id, value] : page.form_values) {
    out += "form:" + std::to_string(id) + "=" + value + "\n";
  }
  return out;
}

inline void validate_page(const PageState& page, const std::string& where) {
  std::set<int> seen;
  bool ok = true;
  std::string problem;
  visit_elements(page.root, [&](const Element& e, int) {
    if (!known_tags().count(e.tag)) {
      ok = false;
      problem = "unknown tag '" + e.tag + "'";
    }
    if (!seen.insert(e.id).second) {
      ok = false;
      problem = "duplicate element id " + std::to_string(e.id);
    }
    for (const Element& child : e.children) {
      if (child.tag == "option" && e.tag != "select") {
        ok = false;
        problem = "option element " + std::to_string(child.id) + " outside a select";
      }
    }
  });
  if (!ok) throw Error(ErrorCode::ConfigError, problem).with_path(where);
}

}  // namespace strata::web
