#include <catch2/catch_amalgamated.hpp>

#include "strata/llm/parse.hpp"

#include "support/generators.hpp"

using namespace strata;
using namespace strata::llm;

TEST_CASE("NL plans are extracted from the numbered list after the header") {
  std::string raw =
      "Explanation: the task needs three steps.\n\n"
      "Proposed high-level plan:\n"
      "1. Search for \"red t-shirt\"\n"
      "2. Filter by price \"low\"\n"
      "3. Select top result";
  auto parsed = std::get<NlPlan>(parse_response("nl_plan", raw));
  REQUIRE(parsed.steps.size() == 3);
  CHECK(parsed.steps[0] == "Search for \"red t-shirt\"");
  CHECK(parsed.steps[1] == "Filter by price \"low\"");
  CHECK(parsed.steps[2] == "Select top result");
}

TEST_CASE("prose without a plan header is a ParseFailure") {
  try {
    parse_response("nl_plan", "no plan here");
    FAIL("expected ParseFailure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseFailure);
    REQUIRE(e.raw().has_value());
    CHECK(*e.raw() == "no plan here");
  }
}

TEST_CASE("PDDL plans come back as numbered s-expression lines") {
  std::string raw =
      "Explanation:\n- search first.\n\n"
      "High Level Plan:\n"
      "1. (search \"red t-shirt\")\n"
      "2. (filter_by_price \"low\")\n"
      "3. (select_top_result)\n";
  auto parsed = std::get<PddlPlanText>(parse_response("pddl_plan", raw));
  auto actions = pddl::parse_plan(parsed.text);
  REQUIRE(actions.size() == 3);
  CHECK(actions[0].schema_name == "search");
  CHECK(actions[2].schema_name == "select_top_result");
}

TEST_CASE("a PDDL plan whose lines are not actions is a ParseFailure") {
  CHECK_THROWS_AS(parse_response("pddl_plan", "High Level Plan:\n1. just words"), Error);
}

TEST_CASE("domain responses parse after the Domain File header") {
  std::string raw =
      "Explanation:\n- one action.\n\n"
      "Domain File:\n"
      "(:action search\n"
      "    :parameters (?q - string)\n"
      "    :precondition (and (on-homepage))\n"
      "    :effect (and (search-results-visible)))";
  auto parsed = std::get<DomainText>(parse_response("pddl_domain", raw));
  auto domain = pddl::parse_domain(parsed.text);
  REQUIRE(domain.schemas.size() == 1);
  CHECK(domain.schemas[0].name == "search");
}

TEST_CASE("postcondition verdicts normalize the answer to uppercase") {
  auto yes = std::get<JudgeVerdict>(
      parse_response("postcondition_id", R"({"explanation":"done","answer":"YES"})"));
  CHECK(yes.yes());
  CHECK(yes.explanation == "done");

  auto no = std::get<JudgeVerdict>(
      parse_response("postcondition_expanded", R"({"explanation":"x","answer":"no"})"));
  CHECK_FALSE(no.yes());
  CHECK(no.answer == "NO");
}

TEST_CASE("JSON replies missing required keys are rejected") {
  CHECK_THROWS_AS(parse_response("postcondition_id", R"({"explanation":"done"})"), Error);
  CHECK_THROWS_AS(parse_response("lowlevel_expanded", R"({"action":"click"})"), Error);
  CHECK_THROWS_AS(parse_response("lowlevel_action_id", R"({"ACTION":"CLICK"})"), Error);
}

TEST_CASE("code fences are stripped before strict JSON parsing") {
  std::string raw = "```json\n{\"answer\": \"YES\", \"explanation\": \"fenced\"}\n```";
  auto verdict = std::get<JudgeVerdict>(parse_response("e2e_eval", raw));
  CHECK(verdict.yes());
}

TEST_CASE("expanded low-level actions carry kind, target and value") {
  std::string raw = R"({
    "thought": "open the deals page",
    "action": "click",
    "action_input": "link",
    "element_id": "3",
    "description": "clicking Deals"
  })";
  auto parsed = std::get<LowLevelAction>(parse_response("lowlevel_expanded", raw));
  CHECK(parsed.action.space == web::ActionSpace::Expanded);
  CHECK(parsed.action.kind == web::ActionKind::Click);
  CHECK(parsed.action.target == 3);
  CHECK(parsed.action.thought == "open the deals page");
}

TEST_CASE("action-id selections carry the 1-based index and value override") {
  std::string raw = R"({
    "INDEX": 2,
    "ACTION": "TYPE",
    "SELECTOR": "id=1",
    "VALUE": "red t-shirt",
    "TEXT": "Search products",
    "EXPLANATION": "search box"
  })";
  auto parsed = std::get<LowLevelAction>(parse_response("lowlevel_action_id", raw));
  CHECK(parsed.action.index == 2);
  CHECK(parsed.action.kind == web::ActionKind::Fill);
  CHECK(parsed.action.value == "red t-shirt");
  CHECK(parsed.action.target == 1);
}

TEST_CASE("hallucinated expanded kinds are rejected") {
  CHECK_THROWS_AS(
      parse_response("lowlevel_expanded",
                     R"({"action":"teleport","action_input":"x","element_id":""})"),
      Error);
}

TEST_CASE("replanning parses salvageability plus the proposed steps") {
  std::string raw =
      "Plan Salvageability Assessment:\n"
      "- Is the original plan salvageable? Answer: \"YES\"\n"
      "- Reasoning: the first step already worked.\n\n"
      "Explanation:\n- continue from step 2.\n\n"
      "Proposed high-level plan:\n"
      "1. Click the Buy e-gift card button\n";
  auto parsed = std::get<ReplanDecision>(parse_response("replanning", raw));
  CHECK(parsed.salvageable);
  REQUIRE(parsed.steps.size() == 1);
  CHECK(parsed.steps[0] == "Click the Buy e-gift card button");

  std::string fresh =
      "Plan Salvageability Assessment:\n"
      "- Is the original plan salvageable? Answer: \"NO\"\n"
      "- Reasoning: wrong approach entirely.\n\n"
      "Proposed high-level plan:\n"
      "1. Open the Deals section\n"
      "2. Read the offers\n";
  auto global = std::get<ReplanDecision>(parse_response("replanning", fresh));
  CHECK_FALSE(global.salvageable);
  CHECK(global.steps.size() == 2);
}

TEST_CASE("alignment judgments parse entries with numeric or string indices") {
  std::string raw = R"({
    "steps": [
      {"reasoning": "same intent", "human_step": "Go to the E-Gift card purchase page.",
       "matched_llm_steps": [1], "status": "aligned"},
      {"reasoning": "split in two", "human_step": "Add the highest rated activity to your wish list.",
       "matched_llm_steps": ["2", "3"], "status": "decomposed", "decomposition_quality": "useful"},
      {"reasoning": "extra steps", "human_step": null,
       "matched_llm_steps": [4], "status": "unmatched"}
    ]
  })";
  auto judgment = std::get<eval::AlignmentJudgment>(parse_response("alignment_judge", raw));
  REQUIRE(judgment.steps.size() == 3);
  CHECK(judgment.steps[0].status == eval::AlignmentStatus::Aligned);
  CHECK(judgment.steps[1].matched_llm_steps == std::vector<int>{2, 3});
  CHECK(judgment.steps[1].decomposition_quality == "useful");
  CHECK_FALSE(judgment.steps[2].human_step.has_value());
}

TEST_CASE("parse_response is total over arbitrary bytes") {
  gen::Rng rng(555);
  const char* templates[] = {"nl_plan",          "pddl_plan",       "pddl_domain",
                             "lowlevel_action_id", "lowlevel_expanded", "postcondition_id",
                             "postcondition_expanded", "replanning",  "e2e_eval",
                             "alignment_judge"};
  for (int i = 0; i < 300; ++i) {
    std::string junk = gen::random_bytes(rng, 200);
    for (const char* name : templates) {
      try {
        (void)parse_response(name, junk);
      } catch (const Error&) {
        // structured failure is fine
      }
    }
  }
  SUCCEED();
}

TEST_CASE("complete_and_parse re-prompts on malformed output up to R times") {
  const std::string good = "Proposed high-level plan:\n1. Step one";
  Prompt prompt = render("nl_plan", {{"task", "t"}, {"web_page", "w"}});

  SECTION("recovers when a retry yields parseable output") {
    ScriptedStub stub;
    stub.push("nl_plan", "garbage");
    stub.push("nl_plan", "still garbage");
    stub.push("nl_plan", good);
    auto parsed = std::get<NlPlan>(complete_and_parse(stub, prompt, 2));
    CHECK(parsed.steps == std::vector<std::string>{"Step one"});
    CHECK(stub.remaining() == 0);
  }

  SECTION("hard ParseFailure once the retry budget is spent") {
    ScriptedStub stub;
    stub.push("nl_plan", "garbage");
    stub.push("nl_plan", "garbage");
    stub.push("nl_plan", "garbage");
    try {
      complete_and_parse(stub, prompt, 2);
      FAIL("expected ParseFailure");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ParseFailure);
    }
    CHECK(stub.remaining() == 0);
  }

  SECTION("the re-prompt carries the parse error") {
    struct Capture : Backend {
      std::vector<std::string> prompts;
      std::string complete(const Prompt& p) override {
        prompts.push_back(p.text);
        return prompts.size() < 2 ? "garbage" : "Proposed high-level plan:\n1. Step one";
      }
    } capture;
    (void)complete_and_parse(capture, prompt, 2);
    REQUIRE(capture.prompts.size() == 2);
    CHECK(capture.prompts[1].find("could not be parsed") != std::string::npos);
  }
}
