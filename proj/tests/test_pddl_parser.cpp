#include <catch2/catch_amalgamated.hpp>

#include "strata/pddl/parser.hpp"

#include "support/generators.hpp"

using namespace strata;
using namespace strata::pddl;

namespace {

const char* kLoginDomain =
    "(:action login :parameters (?u - username ?p - password) "
    ":precondition (and (on-login-page) (not (logged-in))) "
    ":effect (and (logged-in)))";

}  // namespace

TEST_CASE("login action parses to the exact schema structure") {
  DomainFile domain = parse_domain(kLoginDomain);
  REQUIRE(domain.schemas.size() == 1);
  const ActionSchema& login = domain.schemas[0];
  CHECK(login.name == "login");
  REQUIRE(login.params.size() == 2);
  CHECK(login.params[0] == Parameter{"u", "username"});
  CHECK(login.params[1] == Parameter{"p", "password"});
  REQUIRE(login.preconditions.size() == 2);
  CHECK(login.preconditions[0] == Literal{"on-login-page", {}, false});
  CHECK(login.preconditions[1] == Literal{"logged-in", {}, true});
  REQUIRE(login.effects.size() == 1);
  CHECK(login.effects[0] == Literal{"logged-in", {}, false});
  CHECK(domain.initial_state == std::set<std::string>{"(on-homepage)"});
}

TEST_CASE("empty input yields an empty domain with the default initial state") {
  DomainFile domain = parse_domain("");
  CHECK(domain.schemas.empty());
  CHECK(domain.initial_state.count("(on-homepage)") == 1);
}

TEST_CASE("action blocks may omit the closing paren before the next block") {
  // The Appendix domain excerpt chains (:action ...) blocks without closing
  // the previous one.
  DomainFile domain = parse_domain(
      "(:action login\n"
      "    :parameters (?u - username ?p - password)\n"
      "    :precondition (and (on-login-page)\n"
      "    (not (logged-in)))\n"
      "    :effect (and (logged-in))\n"
      "(:action search_product\n"
      "    :parameters (?query - string)\n"
      "    :precondition (and (logged-in))\n"
      "    :effect (and (search-results-visible))\n");
  REQUIRE(domain.schemas.size() == 2);
  CHECK(domain.schemas[0].name == "login");
  CHECK(domain.schemas[1].name == "search_product");
  CHECK(domain.schemas[1].preconditions == std::vector<Literal>{{"logged-in", {}, false}});
}

TEST_CASE("duplicate action names are rejected") {
  try {
    parse_domain("(:action go :effect (and (x))) (:action go :effect (and (y)))");
    FAIL("expected DuplicateAction");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DuplicateAction);
  }
}

TEST_CASE("body variables must be declared parameters") {
  try {
    parse_domain("(:action go :parameters (?a) :precondition (and (p ?b)))");
    FAIL("expected UnboundVariable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnboundVariable);
  }
}

TEST_CASE("syntax errors carry line and column") {
  try {
    parse_domain("(:action go\n  :precondition (and (p q) %))");
    FAIL("expected SyntaxError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SyntaxError);
    REQUIRE(e.line().has_value());
    CHECK(*e.line() == 2);
    CHECK(e.column().has_value());
  }
}

TEST_CASE("effect-free actions are legal") {
  DomainFile domain = parse_domain(
      "(:action verify_walkthrough_loaded :parameters () "
      ":precondition (and (walkthrough-open)))");
  REQUIRE(domain.schemas.size() == 1);
  CHECK(domain.schemas[0].effects.empty());
}

TEST_CASE("plans parse line by line with numbering stripped") {
  auto plan = parse_plan("1. (search_product \"iphone\")\n2. (filter_by_price \"low\")");
  REQUIRE(plan.size() == 2);
  CHECK(plan[0].schema_name == "search_product");
  REQUIRE(plan[0].args.size() == 1);
  CHECK(plan[0].args[0].value == "iphone");
  CHECK(plan[0].args[0].quoted);
  CHECK(plan[1].schema_name == "filter_by_price");
  CHECK(plan[1].args[0].value == "low");
}

TEST_CASE("bare s-expression lines parse without numbering") {
  auto plan = parse_plan("(select_top_result)");
  REQUIRE(plan.size() == 1);
  CHECK(plan[0].schema_name == "select_top_result");
  CHECK(plan[0].args.empty());
}

TEST_CASE("an empty plan is not an error") {
  CHECK(parse_plan("").empty());
  CHECK(parse_plan("\n  \n").empty());
}

TEST_CASE("plan syntax errors carry the line number") {
  try {
    parse_plan("1. (ok_step)\n2. offering nothing parseable");
    FAIL("expected SyntaxError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SyntaxError);
    REQUIRE(e.line().has_value());
    CHECK(*e.line() == 2);
  }
}

TEST_CASE("variables are rejected in ground plans") {
  try {
    parse_plan("(login ?username ?password)");
    FAIL("expected SyntaxError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SyntaxError);
  }
}

TEST_CASE("string arguments keep exact contents") {
  auto plan = parse_plan("(filter_by_year \"before 2015\")");
  REQUIRE(plan.size() == 1);
  CHECK(plan[0].args[0].value == "before 2015");
}

TEST_CASE("domain round-trips through print and parse") {
  gen::Rng rng(20240811);
  for (int i = 0; i < 200; ++i) {
    DomainFile domain = gen::random_domain(rng);
    domain.initial_state = {"(on-homepage)"};  // print_domain does not carry state
    DomainFile once = parse_domain(print_domain(domain));
    DomainFile twice = parse_domain(print_domain(once));
    REQUIRE(once == twice);
    REQUIRE(once.schemas == domain.schemas);
  }
}

TEST_CASE("plan round-trips through print and parse") {
  gen::Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    DomainFile domain = gen::random_domain(rng);
    auto plan = gen::random_plan(rng, domain, 4);
    auto reparsed = parse_plan(print_plan(plan));
    REQUIRE(reparsed == plan);
  }
}

TEST_CASE("parsers are total over arbitrary byte input") {
  gen::Rng rng(99);
  int parsed_ok = 0;
  for (int i = 0; i < 600; ++i) {
    std::string junk = gen::random_bytes(rng, 120);
    try {
      (void)parse_domain(junk);
      ++parsed_ok;
    } catch (const Error&) {
      // structured failure is the accepted outcome
    }
    try {
      (void)parse_plan(junk);
      ++parsed_ok;
    } catch (const Error&) {
    }
  }
  // Mostly garbage, but empty-ish inputs parse; just ensure no crash happened.
  CHECK(parsed_ok >= 0);
}

TEST_CASE("deep nesting is rejected rather than overflowing") {
  std::string deep = "(:action go :precondition ";
  for (int i = 0; i < 4000; ++i) deep += "(and ";
  deep += "(p)";
  for (int i = 0; i < 4000; ++i) deep += ")";
  deep += ")";
  try {
    parse_domain(deep);
    FAIL("expected SyntaxError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SyntaxError);
  }
}

TEST_CASE("identical inputs parse to structurally identical outputs") {
  const char* text = "(:action a :parameters (?x) :precondition (and (p ?x) (not (q))) :effect (and (r)))";
  CHECK(parse_domain(text) == parse_domain(text));
  CHECK(parse_plan("(a \"v\")") == parse_plan("(a \"v\")"));
}
