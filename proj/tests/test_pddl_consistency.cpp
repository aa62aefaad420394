#include <catch2/catch_amalgamated.hpp>

#include "strata/pddl/consistency.hpp"
#include "strata/pddl/parser.hpp"

#include "support/generators.hpp"
#include "support/pddl_oracle.hpp"

using namespace strata;
using namespace strata::pddl;

namespace {

const char* kShopDomain = R"((:action search
    :parameters (?query - string)
    :precondition (and (on-homepage))
    :effect (and (search-results-visible)))
(:action filter_by_price
    :parameters (?order - string)
    :precondition (and (search-results-visible))
    :effect (and (results-filtered)))
(:action select_top_result
    :parameters ()
    :precondition (and (search-results-visible))
    :effect (and (product-page-open))))";

}  // namespace

TEST_CASE("the good shop plan validates") {
  DomainFile domain = parse_domain(kShopDomain);
  auto plan = parse_plan(
      "1. (search \"red t-shirt\")\n"
      "2. (filter_by_price \"low\")\n"
      "3. (select_top_result)");
  ConsistencyReport report = check_consistency(domain, plan);
  CHECK(report.valid);
  REQUIRE(report.final_state.has_value());
  CHECK(report.final_state->holds("(search-results-visible)"));
  CHECK(report.final_state->holds("(results-filtered)"));
  CHECK(report.final_state->holds("(product-page-open)"));
  CHECK(report.final_state->holds("(on-homepage)"));
}

TEST_CASE("the reordered shop plan fails at step 1 with the unmet literal") {
  DomainFile domain = parse_domain(kShopDomain);
  auto plan = parse_plan(
      "1. (filter_by_price \"low\")\n"
      "2. (search \"red t-shirt\")\n"
      "3. (select_top_result)");
  ConsistencyReport report = check_consistency(domain, plan);
  CHECK_FALSE(report.valid);
  REQUIRE(report.failed_step.has_value());
  CHECK(*report.failed_step == 1);
  REQUIRE(report.unmet.size() == 1);
  CHECK(report.unmet[0] == "(search-results-visible)");
  CHECK_FALSE(report.final_state.has_value());
}

TEST_CASE("an empty plan is vacuously valid") {
  DomainFile domain = parse_domain(kShopDomain);
  ConsistencyReport report = check_consistency(domain, {});
  CHECK(report.valid);
  REQUIRE(report.final_state.has_value());
  CHECK(report.final_state->facts == domain.initial_state);
}

TEST_CASE("unknown actions and arity mismatches are hard errors") {
  DomainFile domain = parse_domain(kShopDomain);
  try {
    check_consistency(domain, parse_plan("(warp_to_checkout)"));
    FAIL("expected UnknownAction");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownAction);
  }
  try {
    check_consistency(domain, parse_plan("(search \"a\" \"b\")"));
    FAIL("expected ArityMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ArityMismatch);
  }
}

TEST_CASE("negative preconditions read closed-world") {
  DomainFile domain = parse_domain(
      "(:action login :parameters () "
      ":precondition (and (on-homepage) (not (logged-in))) "
      ":effect (and (logged-in)))");
  auto once = parse_plan("(login)");
  CHECK(check_consistency(domain, once).valid);
  auto twice = parse_plan("(login)\n(login)");
  ConsistencyReport report = check_consistency(domain, twice);
  CHECK_FALSE(report.valid);
  CHECK(*report.failed_step == 2);
  CHECK(report.unmet == std::vector<std::string>{"(not (logged-in))"});
}

TEST_CASE("delete effects are applied before add effects") {
  DomainFile domain = parse_domain(
      "(:action toggle :parameters () :effect (and (not (p)) (p)))");
  ConsistencyReport report = check_consistency(domain, parse_plan("(toggle)"));
  REQUIRE(report.valid);
  CHECK(report.final_state->holds("(p)"));
}

TEST_CASE("effects ground through parameters") {
  DomainFile domain = parse_domain(
      "(:action pick :parameters (?item - string) :precondition (and (on-homepage)) "
      ":effect (and (selected ?item)))");
  auto plan = parse_plan("(pick \"red shirt\")");
  ConsistencyReport report = check_consistency(domain, plan);
  REQUIRE(report.valid);
  CHECK(report.final_state->holds("(selected \"red shirt\")"));
}

TEST_CASE("report serializes to the documented JSON shape") {
  DomainFile domain = parse_domain(kShopDomain);
  Json valid = to_json(check_consistency(domain, parse_plan("(search \"x\")")));
  CHECK(valid["valid"] == true);
  CHECK(valid["failed_step"].is_null());
  CHECK(valid["unmet"].empty());
  CHECK(valid["final_state"].is_array());

  Json invalid = to_json(check_consistency(domain, parse_plan("(select_top_result)")));
  CHECK(invalid["valid"] == false);
  CHECK(invalid["failed_step"] == 1);
  CHECK(invalid["unmet"][0] == "(search-results-visible)");
  CHECK(invalid["final_state"].is_null());
}

TEST_CASE("check_consistency agrees with the brute-force oracle") {
  gen::Rng rng(20251231);
  int cases = 0;
  for (int d = 0; d < 400; ++d) {
    DomainFile domain = gen::random_domain(rng);
    for (int p = 0; p < 30; ++p) {
      auto plan = gen::random_plan(rng, domain, 4);
      oracle::SimResult expected = oracle::simulate(domain, plan);
      ConsistencyReport got = check_consistency(domain, plan);
      REQUIRE(got.valid == expected.valid);
      if (!expected.valid) {
        REQUIRE(got.failed_step.has_value());
        REQUIRE(*got.failed_step == expected.failed_step);
        REQUIRE(got.unmet == expected.unmet);
      } else {
        REQUIRE(got.final_state.has_value());
        REQUIRE(got.final_state->facts == expected.final_state);
      }
      ++cases;
    }
  }
  CHECK(cases == 12000);
}

TEST_CASE("effect application holds after any valid prefix") {
  gen::Rng rng(4242);
  for (int d = 0; d < 120; ++d) {
    DomainFile domain = gen::random_domain(rng);
    auto plan = gen::random_plan(rng, domain, 4);
    ConsistencyReport report = check_consistency(domain, plan);
    if (!report.valid || plan.empty()) continue;
    const ActionSchema* last = domain.find(plan.back().schema_name);
    REQUIRE(last != nullptr);
    std::map<std::string, PlanArg> binding;
    for (size_t i = 0; i < last->params.size(); ++i)
      binding[last->params[i].name] = plan.back().args[i];
    for (const Literal& eff : last->effects) {
      std::string fact = oracle::fact_string(eff, binding);
      bool added_later = false;
      // a delete can be re-added by a later add effect of the same action
      if (eff.negated) {
        for (const Literal& other : last->effects) {
          if (!other.negated && oracle::fact_string(other, binding) == fact) {
            added_later = true;
            break;
          }
        }
      }
      if (eff.negated && !added_later) {
        CHECK_FALSE(report.final_state->holds(fact));
      }
      if (!eff.negated) {
        CHECK(report.final_state->holds(fact));
      }
    }
  }
}
