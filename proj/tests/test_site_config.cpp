#include <catch2/catch_amalgamated.hpp>

#include "strata/web/site.hpp"

#include "support/web_generators.hpp"

using namespace strata;
using namespace strata::web;

namespace {

Json three_page_shop() {
  return parse_json(R"({
    "schema_version": 1,
    "site_domain": "example.shop",
    "pages": {
      "https://example.shop/": {
        "title": "Example Shop",
        "tree": {"id": 0, "tag": "generic", "text": "", "children": [
          {"id": 1, "tag": "textarea", "text": "Search products"},
          {"id": 2, "tag": "button", "text": "Search"}
        ]},
        "forms": {"1": ""}
      },
      "https://example.shop/results": {
        "title": "Search Results",
        "tree": {"id": 0, "tag": "generic", "text": "", "children": [
          {"id": 10, "tag": "link", "text": "Red Cotton T-Shirt"}
        ]}
      },
      "https://example.shop/product": {
        "title": "Red Cotton T-Shirt",
        "tree": {"id": 0, "tag": "generic", "text": "", "children": [
          {"id": 20, "tag": "button", "text": "Add to cart"},
          {"id": 21, "tag": "link", "text": "Back to results"}
        ]}
      }
    },
    "transitions": [
      {"from": "https://example.shop/", "action": {"kind": "click", "target": 2}, "to": "https://example.shop/results"},
      {"from": "https://example.shop/results", "action": {"kind": "click", "target": 10}, "to": "https://example.shop/product"},
      {"from": "https://example.shop/product", "action": {"kind": "click", "target": 21}, "to": "https://example.shop/results"},
      {"from": "https://example.shop/product", "action": {"kind": "click", "target": 20}, "effect": "noop"}
    ],
    "search_index": {"red t-shirt": "https://example.shop/results"}
  })", "fixture");
}

}  // namespace

TEST_CASE("a three page shop config loads with all transitions resolved") {
  SiteScript site = load_site(three_page_shop());
  CHECK(site.site_domain == "example.shop");
  CHECK(site.pages.size() == 3);
  CHECK(site.transitions.size() == 4);
  CHECK(site.search_index.size() == 1);
  const PageState& home = site.pages.at("https://example.shop/");
  CHECK(home.title == "Example Shop");
  CHECK(home.form_values.at(1).empty());
  CHECK(site.find_transition("https://example.shop/", ActionKind::Click, 2, "") != nullptr);
  CHECK(site.find_transition("https://example.shop/product", ActionKind::Click, 20, "")->noop);
}

TEST_CASE("a transition to a missing page is a ConfigError with a path") {
  Json config = three_page_shop();
  config["transitions"][0]["to"] = "https://example.shop/missing";
  try {
    load_site(config);
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
    REQUIRE(e.path().has_value());
    CHECK(*e.path() == "transitions[0].to");
  }
}

TEST_CASE("config validation rejects structural mistakes") {
  SECTION("duplicate element ids") {
    Json config = three_page_shop();
    config["pages"]["https://example.shop/"]["tree"]["children"][1]["id"] = 1;
    CHECK_THROWS_AS(load_site(config), Error);
  }
  SECTION("option outside a select") {
    Json config = three_page_shop();
    config["pages"]["https://example.shop/"]["tree"]["children"][0]["tag"] = "option";
    CHECK_THROWS_AS(load_site(config), Error);
  }
  SECTION("unknown tag") {
    Json config = three_page_shop();
    config["pages"]["https://example.shop/"]["tree"]["children"][0]["tag"] = "iframe";
    CHECK_THROWS_AS(load_site(config), Error);
  }
  SECTION("search index pointing nowhere") {
    Json config = three_page_shop();
    config["search_index"]["query"] = "https://example.shop/void";
    CHECK_THROWS_AS(load_site(config), Error);
  }
  SECTION("form value for an element that is not in the tree") {
    Json config = three_page_shop();
    config["pages"]["https://example.shop/"]["forms"]["77"] = "x";
    CHECK_THROWS_AS(load_site(config), Error);
  }
  SECTION("transition from an unknown page") {
    Json config = three_page_shop();
    config["transitions"][0]["from"] = "https://example.shop/void";
    CHECK_THROWS_AS(load_site(config), Error);
  }
  SECTION("relative page url") {
    Json config = three_page_shop();
    config["pages"]["/relative"] = config["pages"]["https://example.shop/results"];
    CHECK_THROWS_AS(load_site(config), Error);
  }
}

TEST_CASE("configs round-trip through serialize and load") {
  gen::Rng rng(20240601);
  for (int i = 0; i < 50; ++i) {
    SiteScript site = gen::random_site(rng);
    SiteScript reloaded = load_site(serialize_site(site));
    SiteScript twice = load_site(serialize_site(reloaded));
    REQUIRE(reloaded == twice);
    REQUIRE(reloaded.pages == site.pages);
    REQUIRE(reloaded.search_index == site.search_index);
    REQUIRE(reloaded.transitions.size() == site.transitions.size());
  }
}
