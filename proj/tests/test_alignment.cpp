#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "strata/eval/alignment.hpp"

#include "support/judgment_gen.hpp"

using namespace strata;
using namespace strata::eval;

namespace {

AlignmentEntry entry(const char* human, std::vector<int> matched, AlignmentStatus status) {
  AlignmentEntry e;
  if (human != nullptr) e.human_step = human;
  e.matched_llm_steps = std::move(matched);
  e.status = status;
  return e;
}

std::string table1_judgment() {
  Json j = Json{
      {"steps",
       Json::array(
           {Json{{"reasoning", "same intent, one-to-one"},
                 {"human_step", "Go to the E-Gift card purchase page."},
                 {"matched_llm_steps", Json::array({1})},
                 {"status", "aligned"}},
            Json{{"reasoning", "year filter only covers part of the criteria"},
                 {"human_step",
                  "Set the search criteria to include Audi cars made between 1992 and 2015."},
                 {"matched_llm_steps", Json::array({2})},
                 {"status", "partial"}},
            Json{{"reasoning", "select then add covers one human step"},
                 {"human_step", "Add the highest rated activity to your wish list."},
                 {"matched_llm_steps", Json::array({3, 4})},
                 {"status", "decomposed"},
                 {"decomposition_quality", "useful"}}})}};
  return j.dump();
}

}  // namespace

TEST_CASE("a well-formed judgment validates") {
  AlignmentJudgment j;
  j.steps = {entry("a", {1}, AlignmentStatus::Aligned),
             entry("b", {2, 3}, AlignmentStatus::Decomposed),
             entry("c", {}, AlignmentStatus::Missing),
             entry(nullptr, {4}, AlignmentStatus::Unmatched)};
  CHECK_NOTHROW(validate_judgment(j, 3, 4));
}

TEST_CASE("violations are rejected, never normalized") {
  SECTION("duplicate LLM index") {
    AlignmentJudgment j;
    j.steps = {entry("a", {1}, AlignmentStatus::Aligned),
               entry("b", {1, 2}, AlignmentStatus::Decomposed)};
    CHECK_THROWS_AS(validate_judgment(j, 2, 2), Error);
  }
  SECTION("uncovered LLM index") {
    AlignmentJudgment j;
    j.steps = {entry("a", {1}, AlignmentStatus::Aligned)};
    CHECK_THROWS_AS(validate_judgment(j, 1, 2), Error);
  }
  SECTION("human step count mismatch") {
    AlignmentJudgment j;
    j.steps = {entry("a", {1}, AlignmentStatus::Aligned)};
    CHECK_THROWS_AS(validate_judgment(j, 2, 1), Error);
  }
  SECTION("two unmatched pools") {
    AlignmentJudgment j;
    j.steps = {entry("a", {1}, AlignmentStatus::Aligned),
               entry(nullptr, {2}, AlignmentStatus::Unmatched),
               entry(nullptr, {3}, AlignmentStatus::Unmatched)};
    CHECK_THROWS_AS(validate_judgment(j, 1, 3), Error);
  }
  SECTION("aligned entry with two matches") {
    AlignmentJudgment j;
    j.steps = {entry("a", {1, 2}, AlignmentStatus::Aligned)};
    CHECK_THROWS_AS(validate_judgment(j, 1, 2), Error);
  }
  SECTION("missing entry with a match") {
    AlignmentJudgment j;
    j.steps = {entry("a", {1}, AlignmentStatus::Missing)};
    CHECK_THROWS_AS(validate_judgment(j, 1, 1), Error);
  }
  SECTION("out-of-range index") {
    AlignmentJudgment j;
    j.steps = {entry("a", {5}, AlignmentStatus::Aligned)};
    CHECK_THROWS_AS(validate_judgment(j, 1, 1), Error);
  }
  SECTION("human entry labeled unmatched") {
    AlignmentJudgment j;
    j.steps = {entry("a", {1}, AlignmentStatus::Unmatched)};
    CHECK_THROWS_AS(validate_judgment(j, 1, 1), Error);
  }
}

TEST_CASE("the Table 1 worked examples classify under a scripted judge") {
  llm::ScriptedStub judge;
  judge.push("alignment_judge", table1_judgment());
  std::vector<std::string> human = {
      "Go to the E-Gift card purchase page.",
      "Set the search criteria to include Audi cars made between 1992 and 2015.",
      "Add the highest rated activity to your wish list."};
  std::vector<std::string> llm_plan = {
      "Navigate to the e-gift card section.",
      "Apply a year filter to restrict results to model years before 2015 (i.e., 2014 and "
      "earlier).",
      "From the results, identify the card with the highest rating and open its details by "
      "clicking on that card.",
      "Add the identified experience to your wishlist by clicking the Save to Wishlist "
      "control on the details page."};

  AlignmentJudgment j = judge_alignment(judge, "shop task", human, llm_plan);
  REQUIRE(j.steps.size() == 3);
  CHECK(j.steps[0].status == AlignmentStatus::Aligned);
  CHECK(j.steps[1].status == AlignmentStatus::Partial);
  CHECK(j.steps[2].status == AlignmentStatus::Decomposed);
  CHECK(j.steps[2].matched_llm_steps == std::vector<int>{3, 4});
}

TEST_CASE("an invariant violation triggers one corrective re-prompt") {
  // first reply drops LLM step 2; the retry covers it
  Json bad = Json{{"steps", Json::array({Json{{"reasoning", ""},
                                              {"human_step", "step"},
                                              {"matched_llm_steps", Json::array({1})},
                                              {"status", "aligned"}}})}};
  Json good = Json{{"steps", Json::array({Json{{"reasoning", ""},
                                               {"human_step", "step"},
                                               {"matched_llm_steps", Json::array({1})},
                                               {"status", "aligned"}},
                                          Json{{"reasoning", ""},
                                               {"human_step", nullptr},
                                               {"matched_llm_steps", Json::array({2})},
                                               {"status", "unmatched"}}})}};
  SECTION("retry succeeds") {
    llm::ScriptedStub judge;
    judge.push("alignment_judge", bad.dump());
    judge.push("alignment_judge", good.dump());
    AlignmentJudgment j = judge_alignment(judge, "t", {"step"}, {"a", "b"});
    CHECK(j.steps.size() == 2);
    CHECK(judge.remaining() == 0);
  }
  SECTION("second violation is a hard JudgeError") {
    llm::ScriptedStub judge;
    judge.push("alignment_judge", bad.dump());
    judge.push("alignment_judge", bad.dump());
    try {
      judge_alignment(judge, "t", {"step"}, {"a", "b"});
      FAIL("expected JudgeError");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::JudgeError);
    }
  }
}

TEST_CASE("aggregate rates follow pooled step counts") {
  // counts {perfect 2, partial 1, missing 1, decomposed 1} over 5 human steps
  AlignmentJudgment j;
  j.steps = {entry("a", {1}, AlignmentStatus::Aligned),
             entry("b", {2}, AlignmentStatus::Aligned),
             entry("c", {3}, AlignmentStatus::Partial),
             entry("d", {}, AlignmentStatus::Missing),
             entry("e", {4, 5}, AlignmentStatus::Decomposed),
             entry(nullptr, {6}, AlignmentStatus::Unmatched)};
  validate_judgment(j, 5, 6);
  AlignmentRates rates = aggregate_alignment({j});
  CHECK(rates.perfect == Catch::Approx(0.40));
  CHECK(rates.partial == Catch::Approx(0.20));
  CHECK(rates.missing == Catch::Approx(0.20));
  CHECK(rates.decomposed == Catch::Approx(0.20));
  CHECK(rates.matched == Catch::Approx(5.0 / 6.0));
  CHECK(rates.unmatched == Catch::Approx(1.0 / 6.0));
}

TEST_CASE("all-aligned judgments aggregate to perfect 1.0") {
  AlignmentJudgment j;
  j.steps = {entry("a", {1}, AlignmentStatus::Aligned),
             entry("b", {2}, AlignmentStatus::Aligned)};
  AlignmentRates rates = aggregate_alignment({j});
  CHECK(rates.perfect == 1.0);
  CHECK(rates.partial == 0.0);
  CHECK(rates.missing == 0.0);
  CHECK(rates.decomposed == 0.0);
  CHECK(rates.matched == 1.0);
  CHECK(rates.unmatched == 0.0);
}

TEST_CASE("aggregation requires input") {
  CHECK_THROWS_AS(aggregate_alignment({}), Error);
}

TEST_CASE("rate closure holds on random judgments within 1e-9") {
  gen::Rng rng(808);
  for (int i = 0; i < 200; ++i) {
    auto fx = gen::random_judgment(rng);
    validate_judgment(fx.judgment, fx.human_steps, fx.llm_steps);
    AlignmentRates r = aggregate_alignment({fx.judgment});
    CHECK(std::abs(r.perfect + r.partial + r.missing + r.decomposed - 1.0) < 1e-9);
    CHECK(std::abs(r.matched + r.unmatched - 1.0) < 1e-9);
  }
}

TEST_CASE("a Table-2-shaped fixture closes to 100 percent") {
  // 1000 human steps split 606/57/42/295, mirroring the NL column shape.
  std::vector<AlignmentJudgment> judgments;
  AlignmentJudgment j;
  int llm_idx = 1;
  auto add = [&](int count, AlignmentStatus status) {
    for (int i = 0; i < count; ++i) {
      AlignmentEntry e;
      e.human_step = "h";
      e.status = status;
      if (status == AlignmentStatus::Aligned || status == AlignmentStatus::Partial) {
        e.matched_llm_steps = {llm_idx++};
      } else if (status == AlignmentStatus::Decomposed) {
        e.matched_llm_steps = {llm_idx, llm_idx + 1};
        llm_idx += 2;
      }
      j.steps.push_back(std::move(e));
    }
  };
  add(606, AlignmentStatus::Aligned);
  add(57, AlignmentStatus::Partial);
  add(42, AlignmentStatus::Missing);
  add(295, AlignmentStatus::Decomposed);
  judgments.push_back(j);
  AlignmentRates r = aggregate_alignment(judgments);
  CHECK(r.perfect == Catch::Approx(0.606));
  CHECK(r.partial == Catch::Approx(0.057));
  CHECK(r.missing == Catch::Approx(0.042));
  CHECK(r.decomposed == Catch::Approx(0.295));
  CHECK(std::abs(r.perfect + r.partial + r.missing + r.decomposed - 1.0) < 1e-9);
}

TEST_CASE("micro and macro averaging differ on unbalanced judgment sets") {
  AlignmentJudgment small;
  small.steps = {entry("a", {1}, AlignmentStatus::Aligned)};
  AlignmentJudgment large;
  large.steps = {entry("a", {}, AlignmentStatus::Missing),
                 entry("b", {}, AlignmentStatus::Missing),
                 entry("c", {}, AlignmentStatus::Missing),
                 entry("d", {1}, AlignmentStatus::Aligned)};
  AlignmentRates micro = aggregate_alignment({small, large});
  AlignmentRates macro = aggregate_alignment({small, large}, true);
  CHECK(micro.perfect == Catch::Approx(2.0 / 5.0));
  CHECK(macro.perfect == Catch::Approx((1.0 + 0.25) / 2.0));
}

TEST_CASE("judgments round-trip through their JSON file form") {
  gen::Rng rng(11);
  for (int i = 0; i < 30; ++i) {
    auto fx = gen::random_judgment(rng);
    Json j = judgment_to_json(fx.judgment);
    AlignmentJudgment back = judgment_from_json(j, "test");
    REQUIRE(back == fx.judgment);
  }
}
