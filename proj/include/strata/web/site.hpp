#pragma once

#include <map>
#include <string>
#include <vector>

#include "strata/core/json.hpp"
#include "strata/core/util.hpp"
#include "strata/web/actions.hpp"
#include "strata/web/dom.hpp"

namespace strata::web {

struct Transition {
  std::string from;
  ActionKind kind = ActionKind::Click;
  int target = -1;
  std::string value;  // empty matches any action value
  std::string to;     // empty for no-op transitions
  bool noop = false;

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// A scripted, deterministic stand-in for one live website: page templates,
/// transition table and a search index for google_search.
struct SiteScript {
  std::string site_domain;
  std::map<std::string, PageState> pages;  // url -> template
  std::vector<Transition> transitions;
  std::map<std::string, std::string> search_index;  // query -> url

  const PageState* find_page(const std::string& url) const {
    auto it = pages.find(url);
    return it == pages.end() ? nullptr : &it->second;
  }

  const Transition* find_transition(const std::string& url, ActionKind kind,
                                    int target, const std::string& value) const {
    for (const Transition& t : transitions) {
      if (t.from != url || t.kind != kind || t.target != target) continue;
      if (!t.value.empty() && t.value != value) continue;
      return &t;
    }
    return nullptr;
  }

  friend bool operator==(const SiteScript&, const SiteScript&) = default;
};

namespace detail {

inline Element element_from_json(const Json& node, const std::string& where) {
  if (!node.is_object()) throw Error(ErrorCode::ConfigError, "tree node must be an object").with_path(where);
  Element e;
  if (!node.contains("id") || !node["id"].is_number_integer())
    throw Error(ErrorCode::ConfigError, "tree node needs an integer 'id'").with_path(where);
  e.id = node["id"].get<int>();
  e.tag = node.value("tag", std::string("generic"));
  e.text = node.value("text", std::string());
  if (node.contains("attributes")) {
    for (const auto& [k, v] : node["attributes"].items()) {
      if (!v.is_string())
        throw Error(ErrorCode::ConfigError, "attribute values must be strings").with_path(where + ".attributes." + k);
      e.attributes[k] = v.get<std::string>();
    }
  }
  if (node.contains("children")) {
    if (!node["children"].is_array())
      throw Error(ErrorCode::ConfigError, "'children' must be an array").with_path(where + ".children");
    size_t i = 0;
    for (const Json& child : node["children"]) {
      e.children.push_back(element_from_json(child, where + ".children[" + std::to_string(i) + "]"));
      ++i;
    }
  }
  return e;
}

inline Json element_to_json(const Element& e) {
  Json node;
  node["id"] = e.id;
  node["tag"] = e.tag;
  node["text"] = e.text;
  if (!e.attributes.empty()) {
    node["attributes"] = Json::object();
    for (const auto& [k, v] : e.attributes) node["attributes"][k] = v;
  }
  if (!e.children.empty()) {
    node["children"] = Json::array();
    for (const Element& child : e.children) node["children"].push_back(element_to_json(child));
  }
  return node;
}

}  // namespace detail

/// Parses and fully validates a site-config document. Every transition and
/// search-index target must name a configured page.
inline SiteScript load_site(const Json& config) {
  SiteScript site;
  if (!config.is_object()) throw Error(ErrorCode::ConfigError, "site config must be a JSON object");
  site.site_domain = require_string(config, "site_domain", "site config");
  if (site.site_domain.empty())
    throw Error(ErrorCode::ConfigError, "site_domain must be non-empty").with_path("site_domain");

  const Json& pages = require_field(config, "pages", "site config");
  for (const auto& [url, page_json] : pages.items()) {
    std::string where = "pages." + url;
    if (url_host(url).empty())
      throw Error(ErrorCode::ConfigError, "page url must be absolute").with_path(where);
    PageState page;
    page.url = url;
    page.title = require_string(page_json, "title", where);
    page.root = detail::element_from_json(require_field(page_json, "tree", where), where + ".tree");
    validate_page(page, where);
    if (page_json.contains("forms")) {
      for (const auto& [id_str, value] : page_json["forms"].items()) {
        int id = 0;
        try {
          id = std::stoi(id_str);
        } catch (...) {
          throw Error(ErrorCode::ConfigError, "form keys must be element ids").with_path(where + ".forms." + id_str);
        }
        if (find_element(page.root, id) == nullptr)
          throw Error(ErrorCode::ConfigError, "form element " + id_str + " not in tree").with_path(where + ".forms." + id_str);
        page.form_values[id] = value.is_string() ? value.get<std::string>() : value.dump();
      }
    }
    site.pages[url] = std::move(page);
  }

  if (config.contains("transitions")) {
    size_t i = 0;
    for (const Json& t : config["transitions"]) {
      std::string where = "transitions[" + std::to_string(i) + "]";
      Transition tr;
      tr.from = require_string(t, "from", where);
      const PageState* from_page = site.find_page(tr.from);
      if (from_page == nullptr)
        throw Error(ErrorCode::ConfigError, "unknown 'from' page " + tr.from).with_path(where + ".from");
      const Json& action = require_field(t, "action", where);
      std::string kind_name = require_string(action, "kind", where + ".action");
      auto kind = lookup_action_kind(kind_name);
      if (!kind)
        throw Error(ErrorCode::ConfigError, "unknown action kind '" + kind_name + "'").with_path(where + ".action.kind");
      tr.kind = *kind;
      if (action.contains("target")) {
        if (!action["target"].is_number_integer())
          throw Error(ErrorCode::ConfigError, "action target must be an element id").with_path(where + ".action.target");
        tr.target = action["target"].get<int>();
        if (find_element(from_page->root, tr.target) == nullptr)
          throw Error(ErrorCode::ConfigError,
                      "target element " + std::to_string(tr.target) + " not on page " + tr.from)
              .with_path(where + ".action.target");
      }
      tr.value = action.value("value", std::string());
      if (t.contains("to")) {
        tr.to = t["to"].get<std::string>();
        if (site.find_page(tr.to) == nullptr)
          throw Error(ErrorCode::ConfigError, "transition target " + tr.to + " is not a configured page")
              .with_path(where + ".to");
      } else if (t.contains("effect") && t["effect"] == "noop") {
        tr.noop = true;
      } else {
        throw Error(ErrorCode::ConfigError, "transition needs 'to' or 'effect': 'noop'").with_path(where);
      }
      site.transitions.push_back(std::move(tr));
      ++i;
    }
  }

  if (config.contains("search_index")) {
    for (const auto& [query, url] : config["search_index"].items()) {
      if (!url.is_string() || site.find_page(url.get<std::string>()) == nullptr)
        throw Error(ErrorCode::ConfigError, "search_index target must be a configured page")
            .with_path("search_index." + query);
      site.search_index[query] = url.get<std::string>();
    }
  }
  return site;
}

inline SiteScript load_site_text(const std::string& text) {
  return load_site(parse_json(text, "site config"));
}

inline Json serialize_site(const SiteScript& site) {
  Json out;
  out["schema_version"] = 1;
  out["site_domain"] = site.site_domain;
  out["pages"] = Json::object();
  for (const auto& [url, page] : site.pages) {
    Json p;
    p["title"] = page.title;
    p["tree"] = detail::element_to_json(page.root);
    if (!page.form_values.empty()) {
      p["forms"] = Json::object();
      for (const auto& [id, value] : page.form_values) p["forms"][std::to_string(id)] = value;
    }
    out["pages"][url] = std::move(p);
  }
  out["transitions"] = Json::array();
  for (const Transition& t : site.transitions) {
    Json j;
    j["from"] = t.from;
    j["action"] = Json::object();
    j["action"]["kind"] = expanded_kind_name(t.kind);
    if (t.target >= 0) j["action"]["target"] = t.target;
    if (!t.value.empty()) j["action"]["value"] = t.value;
    if (t.noop) {
      j["effect"] = "noop";
    } else {
      j["to"] = t.to;
    }
    out["transitions"].push_back(std::move(j));
  }
  out["search_index"] = Json::object();
  for (const auto& [query, url] : site.search_index) out["search_index"][query] = url;
  return out;
}

}  // namespace strata::web
