#pragma once

// Random simulated-site generator for the webenv property tests.

#include <string>
#include <vector>

#include "strata/web/env.hpp"
#include "strata/web/site.hpp"

#include "generators.hpp"

namespace gen {

inline strata::web::Element random_tree(Rng& rng, int& next_id, int depth = 0) {
  strata::web::Element node;
  node.id = next_id++;
  if (depth == 0) {
    node.tag = "generic";
  } else {
    switch (pick(rng, 0, 4)) {
      case 0: node.tag = "link"; break;
      case 1: node.tag = "button"; break;
      case 2: node.tag = "textarea"; break;
      case 3: node.tag = "select"; break;
      default: node.tag = "generic"; break;
    }
  }
  node.text = "el-" + std::to_string(node.id);
  if (node.tag == "select") {
    int options = pick(rng, 1, 3);
    for (int i = 0; i < options; ++i) {
      strata::web::Element option;
      option.id = next_id++;
      option.tag = "option";
      option.text = "opt-" + std::to_string(i);
      node.children.push_back(option);
    }
    return node;
  }
  if (depth < 2 && node.tag == "generic") {
    int kids = pick(rng, 0, 3);
    for (int i = 0; i < kids; ++i) node.children.push_back(random_tree(rng, next_id, depth + 1));
  } else if (depth < 2 && chance(rng, 0.3)) {
    int kids = pick(rng, 0, 2);
    for (int i = 0; i < kids; ++i) node.children.push_back(random_tree(rng, next_id, depth + 1));
  }
  return node;
}

inline strata::web::PageState random_page(Rng& rng, const std::string& url,
                                          const std::string& title) {
  strata::web::PageState page;
  page.url = url;
  page.title = title;
  int next_id = 0;
  page.root = random_tree(rng, next_id);
  return page;
}

inline strata::web::SiteScript random_site(Rng& rng) {
  strata::web::SiteScript site;
  site.site_domain = "sim.test";
  int n_pages = pick(rng, 1, 5);
  std::vector<std::string> urls;
  for (int i = 0; i < n_pages; ++i) {
    std::string url = "https://www.sim.test/p" + std::to_string(i);
    site.pages[url] = random_page(rng, url, "Page " + std::to_string(i));
    urls.push_back(url);
  }
  for (const auto& [url, page] : site.pages) {
    strata::web::visit_elements(page.root, [&](const strata::web::Element& e, int depth) {
      if (depth == 0) return;
      bool clickable = e.tag == "link" || e.tag == "button";
      bool selectable = e.tag == "select";
      if (clickable && chance(rng, 0.5)) {
        strata::web::Transition t;
        t.from = url;
        t.kind = strata::web::ActionKind::Click;
        t.target = e.id;
        if (chance(rng, 0.2)) {
          t.noop = true;
        } else {
          t.to = urls[static_cast<size_t>(pick(rng, 0, n_pages - 1))];
        }
        site.transitions.push_back(t);
      }
      if (selectable && chance(rng, 0.5) && !e.children.empty()) {
        strata::web::Transition t;
        t.from = url;
        t.kind = strata::web::ActionKind::Select;
        t.target = e.id;
        t.value = e.children[0].text;
        t.to = urls[static_cast<size_t>(pick(rng, 0, n_pages - 1))];
        site.transitions.push_back(t);
      }
    });
  }
  int n_queries = pick(rng, 0, 3);
  for (int i = 0; i < n_queries; ++i) {
    site.search_index["query " + std::to_string(i)] =
        urls[static_cast<size_t>(pick(rng, 0, n_pages - 1))];
  }
  return site;
}

}  // namespace gen
